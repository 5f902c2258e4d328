"""Protocol-level simulator: jobs, shots, repetitions, shuffling, drift.

A plan describes N jobs of M shots times m repetitions; every job samples
each of the 20 circuit cells total = M*m times.  Determinism is part of the
contract: job i draws from the substream
``SeedSequence(shuffle_seed, spawn_key=(i,))``, so any job can be
regenerated independently (and in parallel) from the plan alone.  Within a
job the stream is consumed in a fixed order: first the circuit shuffle,
then one vectorized binomial draw over the 4x5 cells in row-major order.

Counts are per-cell binomial draws rather than a literal shot-by-shot
sequence; under the independence assumption the two are distributionally
identical and this is orders of magnitude faster.  The shuffled circuit
order is retained as metadata, and becomes load-bearing only under
``random_walk`` drift, where the miscalibration evolves while the job runs
and each cell picks up the walk value at its slot.

Drift streams live in ``spawn_key=(DRIFT_STREAM,)``, disjoint from every
job index.  A random walk advances in 20 sub-steps per job (one per slot)
with per-step std magnitude/sqrt(20), so the aggregated per-job increment
has std equal to ``magnitude``; the walk continues across job boundaries
rather than resetting.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import kernels
from .core import born_probability, measurement_effect, prepare
from .noise import (ReadoutConfusion, amplitude_damping, apply_channel,
                    depolarizing, leaky_prob_matrix, phase_damping)
from .witness import AngleConfig, ProbMatrix, SAMPLED_ROWS, MATRIX_SIZE

N_CELLS = SAMPLED_ROWS * MATRIX_SIZE
# Sub-steps per job for random-walk drift; one per circuit slot.
SLOTS = N_CELLS
# spawn_key for the drift stream; job indices can never collide with it.
DRIFT_STREAM = 1 << 32

_MAX_SEED = 1 << 64


@dataclass(frozen=True)
class DriftSpec:
    """Slow miscalibration of the phase-gate angles across (and within) jobs.

    kind "none" is static; "linear" offsets every angle by
    magnitude * job_index; "random_walk" is a continuing Gaussian walk with
    per-job std ``magnitude``.  target chooses which circuit half drifts.
    """

    kind: str = "none"
    magnitude: float = 0.0
    target: str = "both"

    def __init__(self, kind="none", magnitude=0.0, target="both"):
        if kind not in ("none", "linear", "random_walk"):
            raise ValueError(f"unknown drift kind {kind!r}")
        if target not in ("preparation", "measurement", "both"):
            raise ValueError(f"unknown drift target {target!r}")
        magnitude = float(magnitude)
        if not (math.isfinite(magnitude) and magnitude >= 0.0):
            raise ValueError(f"drift magnitude must be >= 0, got {magnitude}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "magnitude", magnitude)
        object.__setattr__(self, "target", target)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model attached to a plan.

    kind "ideal" samples the exact closed-form probabilities; "channels"
    routes every preparation through the configured depolarizing/damping
    channels before measurement; "leaky" replaces the phase gates with
    three-level leaky ones (coupling ``epsilon``).  Independent of kind, a
    constant leak mixes each sampled row toward a fixed per-row response
    (weight ``leak_weight``), and a readout confusion is applied last.
    """

    kind: str = "ideal"
    depolarizing: float = 0.0
    amplitude_damping: float = 0.0
    phase_damping: float = 0.0
    readout: Optional[ReadoutConfusion] = None
    epsilon: float = 0.0
    leak_weight: float = 0.0
    leak_response: Optional[tuple] = None

    def __init__(self, kind="ideal", depolarizing=0.0, amplitude_damping=0.0,
                 phase_damping=0.0, readout=None, epsilon=0.0,
                 leak_weight=0.0, leak_response=None):
        if kind not in ("ideal", "channels", "leaky"):
            raise ValueError(f"unknown noise kind {kind!r}")
        for name, v in (("depolarizing", depolarizing),
                        ("amplitude_damping", amplitude_damping),
                        ("phase_damping", phase_damping),
                        ("leak_weight", leak_weight)):
            v = float(v)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        epsilon = float(epsilon)
        if not 0.0 <= epsilon <= 0.5:
            raise ValueError(f"epsilon must lie in [0, 0.5], got {epsilon}")
        if kind != "leaky" and epsilon != 0.0:
            raise ValueError("epsilon is only meaningful for kind='leaky'")
        if leak_weight > 0.0:
            if leak_response is None:
                raise ValueError("leak_weight > 0 requires leak_response")
            leak_response = tuple(float(x) for x in leak_response)
            if len(leak_response) != SAMPLED_ROWS:
                raise ValueError(
                    f"leak_response needs {SAMPLED_ROWS} row values"
                )
            for x in leak_response:
                if not 0.0 <= x <= 1.0:
                    raise ValueError(
                        f"leak_response values must lie in [0, 1], got {x}"
                    )
        elif leak_response is not None:
            leak_response = tuple(float(x) for x in leak_response)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "depolarizing", float(depolarizing))
        object.__setattr__(self, "amplitude_damping", float(amplitude_damping))
        object.__setattr__(self, "phase_damping", float(phase_damping))
        object.__setattr__(self, "readout", readout)
        object.__setattr__(self, "epsilon", epsilon)
        object.__setattr__(self, "leak_weight", float(leak_weight))
        object.__setattr__(self, "leak_response", leak_response)

    def channel_chain(self):
        """The configured channels, in a fixed application order."""
        chain = []
        if self.depolarizing > 0.0:
            chain.append(depolarizing(self.depolarizing))
        if self.amplitude_damping > 0.0:
            chain.append(amplitude_damping(self.amplitude_damping))
        if self.phase_damping > 0.0:
            chain.append(phase_damping(self.phase_damping))
        return chain


IDEAL_NOISE = NoiseSpec()


@dataclass(frozen=True)
class ExperimentPlan:
    """Everything needed to (re)produce one simulated dataset."""

    jobs: int
    shots: int
    repetitions: int
    angle_config: AngleConfig
    noise: NoiseSpec = IDEAL_NOISE
    shuffle_seed: int = 0
    drift: DriftSpec = DriftSpec()

    def __init__(self, jobs, shots, repetitions, angle_config,
                 noise=IDEAL_NOISE, shuffle_seed=0, drift=None):
        for name, v in (("jobs", jobs), ("shots", shots),
                        ("repetitions", repetitions)):
            if int(v) != v or int(v) < 1:
                raise ValueError(f"{name} must be a positive integer, got {v}")
        seed = int(shuffle_seed)
        if not 0 <= seed < _MAX_SEED:
            raise ValueError("shuffle_seed must fit in 64 bits")
        if not isinstance(angle_config, AngleConfig):
            raise TypeError("angle_config must be an AngleConfig")
        if not isinstance(noise, NoiseSpec):
            raise TypeError("noise must be a NoiseSpec")
        if drift is None:
            drift = DriftSpec()
        if not isinstance(drift, DriftSpec):
            raise TypeError("drift must be a DriftSpec")
        object.__setattr__(self, "jobs", int(jobs))
        object.__setattr__(self, "shots", int(shots))
        object.__setattr__(self, "repetitions", int(repetitions))
        object.__setattr__(self, "angle_config", angle_config)
        object.__setattr__(self, "noise", noise)
        object.__setattr__(self, "shuffle_seed", seed)
        object.__setattr__(self, "drift", drift)

    @property
    def t_total(self):
        """Samples behind each matrix cell once all jobs are pooled."""
        return self.jobs * self.shots * self.repetitions

    @property
    def samples_per_job(self):
        return self.shots * self.repetitions


@dataclass(frozen=True)
class JobCounts:
    """Raw counts for one job: per-cell successes out of totals, plus the
    shuffled circuit order and the job's derived 64-bit seed."""

    job_index: int
    successes: np.ndarray
    totals: np.ndarray
    circuit_order: tuple
    seed: int

    def __init__(self, job_index, successes, totals, circuit_order, seed):
        succ = np.array(successes, dtype=np.int64)
        tot = np.array(totals, dtype=np.int64)
        if succ.shape != (SAMPLED_ROWS, MATRIX_SIZE) or tot.shape != succ.shape:
            raise ValueError("successes and totals must both be 4x5")
        if np.any(tot < 0):
            raise ValueError("cell totals must be >= 0")
        if np.any(succ < 0) or np.any(succ > tot):
            k, j = np.unravel_index(np.argmax(succ - tot), succ.shape)
            raise ValueError(
                f"cell ({k + 1}, {j + 1}): successes outside [0, total]"
            )
        order = tuple(int(x) for x in circuit_order)
        if sorted(order) != list(range(N_CELLS)):
            raise ValueError(
                f"circuit_order must be a permutation of 0..{N_CELLS - 1}"
            )
        succ.setflags(write=False)
        tot.setflags(write=False)
        object.__setattr__(self, "job_index", int(job_index))
        object.__setattr__(self, "successes", succ)
        object.__setattr__(self, "totals", tot)
        object.__setattr__(self, "circuit_order", order)
        object.__setattr__(self, "seed", int(seed))


class AngleOffsets(NamedTuple):
    beta: float
    phi: float


def _ideal_cell(beta, phi):
    sb = math.sin(beta)
    cb = math.cos(beta)
    sf = math.sin(phi)
    cf = math.cos(phi)
    p = 0.5 * (1.0 - sb * cb * sf * cf - sb * sb * sf * sf + cb * cf)
    return min(1.0, max(0.0, p))


def _finish_probs(probs, noise):
    """Constant leak, then readout confusion, then a safety clamp."""
    if noise.leak_weight > 0.0:
        resp = np.array(noise.leak_response).reshape(SAMPLED_ROWS, 1)
        probs = (1.0 - noise.leak_weight) * probs + noise.leak_weight * resp
    if noise.readout is not None:
        probs = (probs * (1.0 - noise.readout.eps0)
                 + (1.0 - probs) * noise.readout.eps1)
    return np.clip(probs, 0.0, 1.0)


def cell_probabilities(angles, noise):
    """Exact per-cell sampling probabilities (4x5) under a noise model."""
    if noise.kind == "ideal":
        probs = np.array(kernels.prob_matrix(angles.beta, angles.phi))[:SAMPLED_ROWS]
    elif noise.kind == "channels":
        chain = noise.channel_chain()
        effects = [measurement_effect(phi) for phi in angles.phi]
        probs = np.empty((SAMPLED_ROWS, MATRIX_SIZE))
        for j, beta in enumerate(angles.beta):
            rho = prepare(beta)
            for ch in chain:
                rho = apply_channel(ch, rho)
            for k, eff in enumerate(effects):
                probs[k, j] = born_probability(eff, rho)
    elif noise.kind == "leaky":
        probs = np.array(
            leaky_prob_matrix(angles, noise.epsilon).entries
        )[:SAMPLED_ROWS]
    else:  # pragma: no cover - guarded by NoiseSpec
        raise ValueError(f"unknown noise kind {noise.kind!r}")
    return _finish_probs(probs, noise)


def _single_prob(beta, phi, noise):
    """One cell of cell_probabilities, for drifted per-slot evaluation."""
    angles = AngleConfig((beta, 0.0, 0.0, 0.0, 0.0), (phi, 0.0, 0.0, 0.0))
    return float(cell_probabilities(angles, noise)[0, 0])


def _drift_steps(plan, n_steps):
    rng = np.random.default_rng(
        np.random.SeedSequence(plan.shuffle_seed, spawn_key=(DRIFT_STREAM,))
    )
    std = plan.drift.magnitude / math.sqrt(SLOTS)
    return rng.normal(0.0, std, size=n_steps)


def apply_drift(plan, job_index):
    """Angle offsets in effect when job ``job_index`` starts.

    Under a random walk the offset keeps moving while the job runs; the
    returned value is the walk at the job boundary, and the simulator
    applies the per-slot continuation internally.
    """
    job_index = int(job_index)
    if job_index < 0:
        raise ValueError("job_index must be >= 0")
    drift = plan.drift
    if drift.kind == "none":
        off = 0.0
    elif drift.kind == "linear":
        off = drift.magnitude * job_index
    else:
        off = float(np.sum(_drift_steps(plan, SLOTS * job_index)))
    beta_off = off if drift.target in ("preparation", "both") else 0.0
    phi_off = off if drift.target in ("measurement", "both") else 0.0
    return AngleOffsets(beta_off, phi_off)


def _job_probs(plan, job_index, circuit_order):
    drift = plan.drift
    angles = plan.angle_config
    if drift.kind != "random_walk":
        boff, foff = apply_drift(plan, job_index)
        if boff == 0.0 and foff == 0.0:
            return cell_probabilities(angles, plan.noise)
        shifted = AngleConfig(tuple(b + boff for b in angles.beta),
                              tuple(f + foff for f in angles.phi))
        return cell_probabilities(shifted, plan.noise)
    walk = np.cumsum(_drift_steps(plan, SLOTS * (job_index + 1)))
    probs = np.empty((SAMPLED_ROWS, MATRIX_SIZE))
    to_beta = drift.target in ("preparation", "both")
    to_phi = drift.target in ("measurement", "both")
    for slot in range(SLOTS):
        k, j = divmod(circuit_order[slot], MATRIX_SIZE)
        off = walk[SLOTS * job_index + slot]
        b = angles.beta[j] + (off if to_beta else 0.0)
        f = angles.phi[k] + (off if to_phi else 0.0)
        probs[k, j] = _single_prob(b, f, plan.noise)
    return probs


def _simulate_job(plan, job_index):
    ss = np.random.SeedSequence(plan.shuffle_seed, spawn_key=(job_index,))
    rng = np.random.default_rng(ss)
    order = tuple(int(x) for x in rng.permutation(N_CELLS))
    probs = _job_probs(plan, job_index, order)
    total = plan.samples_per_job
    draws = rng.binomial(total, np.clip(probs, 0.0, 1.0))
    seed64 = int(ss.generate_state(1, dtype=np.uint64)[0])
    totals = np.full((SAMPLED_ROWS, MATRIX_SIZE), total, dtype=np.int64)
    return JobCounts(job_index, draws.astype(np.int64), totals, order, seed64)


def simulate_counts(plan, workers=None):
    """Run the full plan and return one JobCounts per job, in job order.

    ``workers`` > 1 simulates jobs in a process pool; results are identical
    to the serial run because every job owns an independent substream.
    """
    indices = range(plan.jobs)
    if workers is not None and int(workers) > 1:
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            out = list(pool.map(_simulate_job, [plan] * plan.jobs, indices))
    else:
        out = [_simulate_job(plan, i) for i in indices]
    out.sort(key=lambda jc: jc.job_index)
    return out


def binomial_sample(p, n, rng):
    """One exact binomial draw; p in [0, 1], n >= 0."""
    p = float(p)
    n = int(n)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return int(rng.binomial(n, p))


def empirical_F(counts):
    """Ratio matrix from one JobCounts or an iterable of them (pooled).

    Cell-wise: successes divided by totals, with the fifth row set to exact
    ones.  Raises on any pooled cell with zero samples.
    """
    if isinstance(counts, JobCounts):
        jobs = [counts]
    else:
        jobs = list(counts)
        if not jobs:
            raise ValueError("no jobs to pool")
    succ = np.zeros((SAMPLED_ROWS, MATRIX_SIZE), dtype=np.int64)
    tot = np.zeros((SAMPLED_ROWS, MATRIX_SIZE), dtype=np.int64)
    for job in jobs:
        succ += job.successes
        tot += job.totals
    if tot.min() < 1:
        k, j = np.unravel_index(np.argmin(tot), tot.shape)
        raise ValueError(f"cell ({k + 1}, {j + 1}) has zero samples")
    entries = np.ones((MATRIX_SIZE, MATRIX_SIZE))
    entries[:SAMPLED_ROWS] = succ / tot
    return ProbMatrix(entries)
