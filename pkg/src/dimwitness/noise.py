"""Noise channels and leakage models.

Two families live here, corresponding to the two halves of the robustness
story.  Parameter-independent imperfections (depolarizing, damping, readout
confusion, constant leakage into an external state) leave the witness null:
they transform the probability matrix affinely in a way the determinant
ignores.  Parameter-dependent leakage, modeled by :func:`leaky_gate`, is
the minimal mechanism that breaks the null and is what the detection tests
exercise.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DensityState, MeasEffect, UnitaryGate, make_s, make_s_theta
from .witness import ProbMatrix, SAMPLED_ROWS

CHANNEL_ATOL = 1e-10


@dataclass(frozen=True)
class KrausChannel:
    """A completely positive trace-preserving map given by Kraus operators."""

    operators: tuple
    label: str

    def __init__(self, operators, label):
        ops = tuple(np.array(k, dtype=np.complex128) for k in operators)
        if not ops:
            raise ValueError("KrausChannel needs at least one operator")
        d = ops[0].shape[0]
        for k in ops:
            if k.shape != (d, d):
                raise ValueError("Kraus operators must share one square shape")
            k.setflags(write=False)
        comp = sum(k.conj().T @ k for k in ops)
        dev = np.max(np.abs(comp - np.eye(d)))
        if dev > CHANNEL_ATOL:
            raise ValueError(
                f"KrausChannel {label!r}: sum K^dag K deviates from identity "
                f"by {dev:.3e}"
            )
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "label", str(label))

    @property
    def dim(self):
        return self.operators[0].shape[0]


def _check_unit(p, name):
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return p


def depolarizing(p):
    """Qubit depolarizing channel: rho -> (1-p) rho + p I/2."""
    p = _check_unit(p, "depolarizing probability")
    i2 = np.eye(2, dtype=np.complex128)
    x = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
    z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    return KrausChannel(
        (math.sqrt(1.0 - 0.75 * p) * i2,
         math.sqrt(0.25 * p) * x,
         math.sqrt(0.25 * p) * y,
         math.sqrt(0.25 * p) * z),
        f"depolarizing({p:g})",
    )


def amplitude_damping(gamma):
    """Relaxation toward |0>: the excited population decays by gamma."""
    gamma = _check_unit(gamma, "amplitude damping")
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]],
                  dtype=np.complex128)
    k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=np.complex128)
    return KrausChannel((k0, k1), f"amplitude_damping({gamma:g})")


def phase_damping(lam):
    """Pure dephasing: off-diagonals shrink, populations untouched."""
    lam = _check_unit(lam, "phase damping")
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - lam)]],
                  dtype=np.complex128)
    k1 = np.array([[0.0, 0.0], [0.0, math.sqrt(lam)]], dtype=np.complex128)
    return KrausChannel((k0, k1), f"phase_damping({lam:g})")


def apply_channel(channel, state):
    """Sum_k K rho K^dag as a validated DensityState."""
    if channel.dim != state.dim:
        raise ValueError(
            f"dimension mismatch: channel is {channel.dim}, "
            f"state is {state.dim}"
        )
    rho = state.matrix
    out = sum(k @ rho @ k.conj().T for k in channel.operators)
    return DensityState(out)


@dataclass(frozen=True)
class ReadoutConfusion:
    """Classical readout flips: eps0 = P(read 1 | true 0),
    eps1 = P(read 0 | true 1)."""

    eps0: float
    eps1: float

    def __init__(self, eps0, eps1):
        object.__setattr__(self, "eps0", _check_unit(eps0, "eps0"))
        object.__setattr__(self, "eps1", _check_unit(eps1, "eps1"))


def apply_readout(p, conf):
    """Probability of reading outcome 0 given true probability p."""
    p = _check_unit(p, "probability")
    return p * (1.0 - conf.eps0) + (1.0 - p) * conf.eps1


@dataclass(frozen=True)
class LeakageModel:
    """Leakage out of the qubit space.

    kind="constant": a fraction ``weight`` of the population sits in a
    fixed external state ``external_state`` (normalized; the qubit sector
    carries the remaining 1 - weight) regardless of the circuit settings.
    kind="parameter_dependent": each phase gate couples |1> to a third
    level with amplitude ``coupling`` * theta; see :func:`leaky_gate`.
    """

    kind: str
    weight: float = 0.0
    coupling: float = 0.0
    external_state: Optional[DensityState] = None

    def __init__(self, kind, weight=0.0, coupling=0.0, external_state=None):
        if kind not in ("constant", "parameter_dependent"):
            raise ValueError(f"unknown leakage kind {kind!r}")
        weight = _check_unit(weight, "leakage weight")
        coupling = float(coupling)
        if kind == "constant":
            if external_state is None:
                raise ValueError("constant leakage needs an external_state")
        else:
            if not 0.0 <= coupling <= 0.5:
                raise ValueError(
                    f"coupling must lie in [0, 0.5], got {coupling}"
                )
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "external_state", external_state)


def constant_leakage(f, model, m_effects):
    """Shift row k of ``f`` by c_k = weight * Tr(M_k P_ext).

    This is the bookkeeping for preparations gaining a settings-independent
    external component: every entry of a row moves by the same constant, so
    the determinant is exactly unchanged.  Entries may leave [0, 1]; range
    checking is disabled on the result.
    """
    if model.kind != "constant":
        raise ValueError(f"expected a constant leakage model, got {model.kind!r}")
    effects = list(m_effects)
    if len(effects) != SAMPLED_ROWS:
        raise ValueError(f"expected {SAMPLED_ROWS} effects, got {len(effects)}")
    ext = model.external_state
    entries = np.array(f.entries if isinstance(f, ProbMatrix) else f,
                       dtype=np.float64)
    for k, eff in enumerate(effects):
        if eff.dim != ext.dim:
            raise ValueError(
                f"effect {k + 1} has dim {eff.dim}, external state {ext.dim}"
            )
        c = model.weight * float(np.trace(eff.matrix @ ext.matrix).real)
        entries[k] += c
    return ProbMatrix(entries, check_range=False)


def leaky_gate(theta, epsilon):
    """Three-level phase gate with settings-dependent leakage.

    Acts as S_theta on the {|0>, |1>} block, followed by a real rotation
    coupling |1> and |2> by angle epsilon * theta.  At epsilon = 0 this is
    exactly S_theta padded with an untouched third level.  Because the
    leaked amplitude grows with the circuit parameter itself, this model
    violates the settings-independence that the witness's robustness rests
    on, and the determinant responds.
    """
    theta = float(theta)
    epsilon = float(epsilon)
    if not 0.0 <= epsilon <= 0.5:
        raise ValueError(f"epsilon must lie in [0, 0.5], got {epsilon}")
    s = make_s_theta(theta).matrix
    embed = np.eye(3, dtype=np.complex128)
    embed[:2, :2] = s
    a = epsilon * theta
    rot = np.array([
        [1.0, 0.0, 0.0],
        [0.0, math.cos(a), -math.sin(a)],
        [0.0, math.sin(a), math.cos(a)],
    ], dtype=np.complex128)
    return UnitaryGate(rot @ embed)


def leaky_prob_matrix(angles, epsilon):
    """Exact outcome probabilities for the circuit run with leaky phase
    gates (three-level statevector evolution, readout of level 0)."""
    s3 = np.eye(3, dtype=np.complex128)
    s3[:2, :2] = make_s().matrix
    start = s3[:, 0]
    entries = np.ones((5, 5))
    for j, beta in enumerate(angles.beta):
        prepped = leaky_gate(beta, epsilon).matrix @ start
        for k, phi in enumerate(angles.phi):
            out = s3 @ (leaky_gate(phi, epsilon).matrix @ prepped)
            p = float(abs(out[0]) ** 2)
            entries[k][j] = min(1.0, max(0.0, p))
    return ProbMatrix(entries)
