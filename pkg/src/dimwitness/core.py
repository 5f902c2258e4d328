"""Single-qubit circuit primitives for the dimension-witness test.

The experiment uses one gate family: the symmetric beamsplitter-like gate S
and its phase-conjugated version S_theta = Z(-theta) S Z(theta).  A test
setting prepares ``S_beta S |0>`` and asks for the probability of returning
to |0> after ``S S_phi``.  Everything downstream (the witness matrix, the
noise models, the Monte Carlo sampler) is built from the three constructors
and two circuit halves defined here.

States and effects are represented as explicit 2x2 (or dxd) complex
matrices wrapped in validated, immutable containers, so a dimension or
positivity mistake fails at construction time rather than as a silently
wrong probability.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

ATOL = 1e-12
# Eigenvalue checks tolerate slightly more because outer products and
# channel outputs accumulate rounding in the last bits.
EIG_ATOL = 1e-10

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
for _m in (PAULI_X, PAULI_Y, PAULI_Z):
    _m.setflags(write=False)


def _frozen_complex(entries, name):
    arr = np.array(entries, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name}: expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError(f"{name}: entries must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class UnitaryGate:
    """A d x d unitary, validated at construction (U U^dag = I within 1e-12)."""

    matrix: np.ndarray

    def __init__(self, matrix):
        arr = _frozen_complex(matrix, "UnitaryGate")
        dev = np.max(np.abs(arr @ arr.conj().T - np.eye(arr.shape[0])))
        if dev > ATOL:
            raise ValueError(f"UnitaryGate: not unitary (deviation {dev:.3e})")
        object.__setattr__(self, "matrix", arr)

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class DensityState:
    """A density matrix: hermitian, unit trace, positive semidefinite."""

    matrix: np.ndarray

    def __init__(self, matrix):
        arr = _frozen_complex(matrix, "DensityState")
        if np.max(np.abs(arr - arr.conj().T)) > ATOL:
            raise ValueError("DensityState: not hermitian")
        tr = np.trace(arr)
        if abs(tr - 1.0) > ATOL:
            raise ValueError(f"DensityState: trace {tr:.15g} != 1")
        lo = np.linalg.eigvalsh(arr).min()
        if lo < -EIG_ATOL:
            raise ValueError(f"DensityState: negative eigenvalue {lo:.3e}")
        object.__setattr__(self, "matrix", arr)

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class MeasEffect:
    """A POVM effect: hermitian with spectrum inside [0, 1]."""

    matrix: np.ndarray

    def __init__(self, matrix):
        arr = _frozen_complex(matrix, "MeasEffect")
        if np.max(np.abs(arr - arr.conj().T)) > ATOL:
            raise ValueError("MeasEffect: not hermitian")
        ev = np.linalg.eigvalsh(arr)
        if ev.min() < -EIG_ATOL or ev.max() > 1.0 + EIG_ATOL:
            raise ValueError(
                f"MeasEffect: spectrum [{ev.min():.3e}, {ev.max():.3e}] "
                "outside [0, 1]"
            )
        object.__setattr__(self, "matrix", arr)

    @property
    def dim(self):
        return self.matrix.shape[0]


class BlochVector(NamedTuple):
    x: float
    y: float
    z: float


_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def make_s():
    """The symmetric two-outcome gate S = (1/sqrt 2) [[1, -i], [-i, 1]]."""
    return UnitaryGate([[_INV_SQRT2, -1j * _INV_SQRT2],
                        [-1j * _INV_SQRT2, _INV_SQRT2]])


def make_z(theta):
    """Phase gate Z(theta) = diag(e^{-i theta/2}, e^{+i theta/2})."""
    half = 0.5 * float(theta)
    return UnitaryGate([[np.exp(-1j * half), 0.0],
                        [0.0, np.exp(1j * half)]])


def make_s_theta(theta):
    """Phase-dressed gate S_theta = Z(-theta) S Z(theta).

    Written out, S_theta = (1/sqrt 2) [[1, -i e^{i theta}],
                                       [-i e^{-i theta}, 1]];
    the constructor uses this closed form, and the product identity is
    checked in the test suite.  S_0 is S itself.
    """
    th = float(theta)
    return UnitaryGate([
        [_INV_SQRT2, -1j * np.exp(1j * th) * _INV_SQRT2],
        [-1j * np.exp(-1j * th) * _INV_SQRT2, _INV_SQRT2],
    ])


def prepare(beta):
    """State prepared by the first circuit half: S_beta S |0>."""
    u = make_s_theta(beta).matrix @ make_s().matrix
    psi = u[:, 0]
    return DensityState(np.outer(psi, psi.conj()))


def measurement_effect(phi):
    """Effect tested by the second circuit half.

    The readout projects onto |0> after ``S S_phi``, so the effect in the
    Heisenberg picture is ``(S S_phi)^dag |0><0| (S S_phi)``.
    ``measurement_effect(0)`` is the projector onto |1>.
    """
    u = make_s().matrix @ make_s_theta(phi).matrix
    chi = u.conj().T[:, 0]
    return MeasEffect(np.outer(chi, chi.conj()))


def born_probability(effect, state):
    """Tr(M rho), clamped to [0, 1].

    Raises ValueError when the effect and state dimensions differ.
    """
    if effect.dim != state.dim:
        raise ValueError(
            f"dimension mismatch: effect is {effect.dim}, state is {state.dim}"
        )
    p = float(np.trace(effect.matrix @ state.matrix).real)
    if p < 0.0:
        return 0.0
    if p > 1.0:
        return 1.0
    return p


def bloch_vector(state):
    """Bloch coordinates (Tr(rho X), Tr(rho Y), Tr(rho Z)) of a qubit state."""
    if state.dim != 2:
        raise ValueError(f"bloch_vector needs a qubit state, got dim {state.dim}")
    rho = state.matrix
    return BlochVector(
        float(np.trace(rho @ PAULI_X).real),
        float(np.trace(rho @ PAULI_Y).real),
        float(np.trace(rho @ PAULI_Z).real),
    )


def viviani_point(angle, branch):
    """Point on the two figure-eight curves traced on the Bloch sphere.

    branch="preparation" gives -(sin a cos a, sin^2 a, cos a) and
    branch="measurement" gives +(sin a cos a, sin^2 a, cos a).  The states
    produced by :func:`prepare` and :func:`measurement_effect` trace the
    same two window-shaped curves with a mirrored parameterization (the
    overall geometry, and everything derived from it, is identical):
    bloch(prepare(b)) equals viviani_point(-b, "preparation").  Each branch
    lies on a cylinder of radius 1/2 touching the sphere:
    x^2 + (y - 1/2)^2 = 1/4 for the measurement branch and
    x^2 + (y + 1/2)^2 = 1/4 for the preparation branch.
    """
    a = float(angle)
    p = (math.sin(a) * math.cos(a), math.sin(a) ** 2, math.cos(a))
    if branch == "preparation":
        return BlochVector(-p[0], -p[1], -p[2])
    if branch == "measurement":
        return BlochVector(p[0], p[1], p[2])
    raise ValueError(f"unknown branch {branch!r}")
