"""Witness matrix construction and the two error-propagation schemes.

The test statistic is W = det F, where F is the 5x5 matrix whose first
four rows hold ground-state return probabilities for four measurement
settings against five preparation settings, and whose fifth row is all
ones.  For data produced by any true two-level system the five rows are
affinely dependent (each probability row is an affine function of three
Bloch coordinates), so W = 0 identically, for every choice of angles.
A statistically significant nonzero W therefore certifies that the device
is exploring more than a qubit.

Two estimates of the uncertainty on W are provided:

* per-job (scheme i): the empirical standard error of the per-job
  determinants, robust to slow drift between jobs;
* pooled (scheme ii): first-order propagation of binomial cell variance
  through the determinant,

      sigma^2 = (1/T) * sum_{k<=4, j} F_kj (1 - F_kj) Adj(F)_jk^2,

  where T is the number of samples behind each cell and Adj is the
  adjugate.  Quadrupling T halves sigma.

Agreement of the two schemes is itself a diagnostic: a drifting device
shows scheme (i) exceeding scheme (ii).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels

MATRIX_SIZE = 5
SAMPLED_ROWS = 4


@dataclass(frozen=True)
class AngleConfig:
    """Angle settings: five preparation angles and four measurement angles."""

    beta: tuple
    phi: tuple

    def __init__(self, beta, phi):
        b = tuple(float(x) for x in beta)
        f = tuple(float(x) for x in phi)
        if len(b) != 5:
            raise ValueError(f"expected 5 preparation angles, got {len(b)}")
        if len(f) != 4:
            raise ValueError(f"expected 4 measurement angles, got {len(f)}")
        for name, vals in (("beta", b), ("phi", f)):
            if not all(math.isfinite(v) for v in vals):
                raise ValueError(f"{name} contains a non-finite angle")
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "phi", f)


def default_angles():
    """The standard setting: beta = (pi/4, -pi/4, 3pi/4, -3pi/4, 0) and
    phi_k = -beta_k for the first four."""
    beta = (math.pi / 4, -math.pi / 4, 3 * math.pi / 4, -3 * math.pi / 4, 0.0)
    phi = tuple(-b for b in beta[:4])
    return AngleConfig(beta, phi)


@dataclass(frozen=True)
class ProbMatrix:
    """A 5x5 probability matrix: finite entries, fifth row exactly ones.

    With ``check_range=True`` (the default) the four sampled rows must lie
    in [0, 1].  Leakage-adjusted matrices may carry entries outside that
    range; they are constructed with ``check_range=False`` and keep the
    ones-row invariant.
    """

    entries: np.ndarray

    def __init__(self, entries, check_range=True):
        arr = np.array(entries, dtype=np.float64)
        if arr.shape != (MATRIX_SIZE, MATRIX_SIZE):
            raise ValueError(f"expected a 5x5 matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("probability matrix contains a non-finite entry")
        if not np.all(arr[SAMPLED_ROWS] == 1.0):
            raise ValueError("fifth row must be exactly all ones")
        if check_range:
            top = arr[:SAMPLED_ROWS]
            if top.min() < 0.0 or top.max() > 1.0:
                k, j = np.unravel_index(
                    np.argmax(np.abs(top - 0.5)), top.shape
                )
                raise ValueError(
                    f"entry ({k + 1}, {j + 1}) = {top[k, j]:.6g} outside [0, 1]"
                )
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    def __getitem__(self, idx):
        return self.entries[idx]


def _as_matrix(f):
    if isinstance(f, ProbMatrix):
        return f.entries
    arr = np.asarray(f, dtype=np.float64)
    if arr.shape != (MATRIX_SIZE, MATRIX_SIZE):
        raise ValueError(f"expected a 5x5 matrix, got shape {arr.shape}")
    return arr


def ideal_prob_matrix(angles):
    """Noiseless probability matrix for the given settings.

    Uses the closed form p = (1 - sin b cos b sin f cos f
    - sin^2 b sin^2 f + cos b cos f) / 2, which the tests verify against
    the explicit circuit route (prepare, then Born rule).
    """
    return ProbMatrix(kernels.prob_matrix(angles.beta, angles.phi))


def determinant(f):
    """det of a 5x5 matrix (ProbMatrix or array-like), cofactor expansion."""
    return float(kernels.det5(_as_matrix(f)))


def adjugate(f):
    """Adjugate of a 5x5 matrix; f @ adjugate(f) = det(f) * identity."""
    return kernels.adjugate5(_as_matrix(f))


def witness_sigma(f, t):
    """First-order standard deviation of det F.

    ``t`` is the number of binomial samples behind each sampled cell of
    ``f``: a single integer when all 20 cells share one depth, or a 4x5
    array of per-cell depths.
    """
    t_arr = np.asarray(t)
    if t_arr.ndim == 0:
        t = int(t_arr)
        if t < 1:
            raise ValueError(f"sample count per cell must be >= 1, got {t}")
        return math.sqrt(kernels.sigma_t2_sum(_as_matrix(f)) / t)
    if t_arr.shape != (SAMPLED_ROWS, MATRIX_SIZE):
        raise ValueError(
            f"per-cell totals must be {SAMPLED_ROWS}x{MATRIX_SIZE}, "
            f"got shape {t_arr.shape}"
        )
    if t_arr.min() < 1:
        raise ValueError("every cell needs at least one sample")
    arr = _as_matrix(f)
    adj = kernels.adjugate5(arr)
    acc = 0.0
    for k in range(SAMPLED_ROWS):
        for j in range(MATRIX_SIZE):
            a = adj[j][k]
            acc += arr[k][j] * (1.0 - arr[k][j]) * a * a / float(t_arr[k][j])
    return math.sqrt(acc)


def _zscore(w, sigma):
    if sigma > 0.0:
        return w / sigma
    return 0.0 if w == 0.0 else math.copysign(math.inf, w)


@dataclass(frozen=True)
class WitnessResult:
    """Outcome of one analysis scheme.

    w is the witness value, sigma its one-standard-deviation uncertainty,
    z = w / sigma (0 when both vanish, signed infinity when sigma alone
    vanishes), scheme is "per_job" or "pooled", and t_total the number of
    samples behind each matrix cell, summed over jobs.
    """

    w: float
    sigma: float
    z: float
    scheme: str
    t_total: int


def analyze_per_job(matrices, per_job_t):
    """Scheme (i): empirical mean and standard error of per-job witnesses.

    Parameters
    ----------
    matrices : sequence of ProbMatrix
        One empirical matrix per job; at least two.
    per_job_t : sequence of int
        Samples behind each cell of the corresponding job.
    """
    mats = list(matrices)
    totals = [int(t) for t in per_job_t]
    if len(mats) < 2:
        raise ValueError(f"per-job analysis needs >= 2 jobs, got {len(mats)}")
    if len(totals) != len(mats):
        raise ValueError("one sample total per job is required")
    ws = np.array([determinant(m) for m in mats])
    n = len(ws)
    w_mean = float(ws.mean())
    sigma = float(ws.std(ddof=1) / math.sqrt(n))
    return WitnessResult(w_mean, sigma, _zscore(w_mean, sigma),
                         "per_job", sum(totals))


def analyze_pooled(jobs):
    """Scheme (ii): pool counts across jobs, then propagate binomial errors.

    ``jobs`` is a non-empty iterable of objects carrying 4x5 integer arrays
    ``successes`` and ``totals`` (for instance
    :class:`dimwitness.montecarlo.JobCounts`).  Every pooled cell must have
    at least one sample.
    """
    jobs = list(jobs)
    if not jobs:
        raise ValueError("pooled analysis needs at least one job")
    succ = np.zeros((SAMPLED_ROWS, MATRIX_SIZE), dtype=np.int64)
    tot = np.zeros((SAMPLED_ROWS, MATRIX_SIZE), dtype=np.int64)
    for job in jobs:
        succ += np.asarray(job.successes, dtype=np.int64)
        tot += np.asarray(job.totals, dtype=np.int64)
    if tot.min() < 1:
        k, j = np.unravel_index(np.argmin(tot), tot.shape)
        raise ValueError(f"pooled cell ({k + 1}, {j + 1}) has zero samples")
    entries = np.ones((MATRIX_SIZE, MATRIX_SIZE))
    entries[:SAMPLED_ROWS] = succ / tot
    f = ProbMatrix(entries)
    w = determinant(f)
    if np.all(tot == tot.flat[0]):
        sigma = witness_sigma(f, int(tot.flat[0]))
        t_ref = int(tot.flat[0])
    else:
        sigma = witness_sigma(f, tot)
        t_ref = int(round(tot.mean()))
    return WitnessResult(w, sigma, _zscore(w, sigma), "pooled", t_ref)
