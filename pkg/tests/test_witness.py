import math

import numpy as np
import pytest

from dimwitness.witness import (
    AngleConfig,
    ProbMatrix,
    adjugate,
    analyze_per_job,
    analyze_pooled,
    default_angles,
    determinant,
    ideal_prob_matrix,
    witness_sigma,
)

SIGMA_1E6 = 9.882117688026182e-05  # default angles, T = 10^6 per cell


def ones_row_matrix(rows4):
    entries = np.ones((5, 5))
    entries[:4] = rows4
    return entries


def test_default_angles_frozen():
    a = default_angles()
    assert a.beta == (math.pi / 4, -math.pi / 4, 3 * math.pi / 4,
                      -3 * math.pi / 4, 0.0)
    assert a.phi == tuple(-b for b in a.beta[:4])


def test_angle_config_validation():
    with pytest.raises(ValueError):
        AngleConfig((0.1, 0.2), (0.3, 0.4, 0.5, 0.6))
    with pytest.raises(ValueError):
        AngleConfig((0.1, 0.2, 0.3, 0.4, 0.5), (0.3, 0.4, 0.5))
    with pytest.raises(ValueError):
        AngleConfig((0.1, 0.2, 0.3, 0.4, math.nan), (0.3, 0.4, 0.5, 0.6))


def test_prob_matrix_requires_ones_row():
    entries = np.full((5, 5), 0.5)
    with pytest.raises(ValueError):
        ProbMatrix(entries)
    entries[4] = 1.0
    f = ProbMatrix(entries)
    assert f[4, 0] == 1.0


def test_prob_matrix_range_check_names_cell():
    entries = np.ones((5, 5)) * 0.5
    entries[4] = 1.0
    entries[1][3] = 1.25
    with pytest.raises(ValueError) as err:
        ProbMatrix(entries)
    msg = str(err.value)
    assert "2" in msg and "4" in msg  # 1-based row/column of the bad cell
    # check_range=False admits the same entries
    f = ProbMatrix(entries, check_range=False)
    assert f[1, 3] == 1.25


def test_prob_matrix_rejects_bad_shape_and_nan():
    with pytest.raises(ValueError):
        ProbMatrix(np.ones((4, 5)))
    entries = np.ones((5, 5)) * 0.5
    entries[4] = 1.0
    entries[0][0] = math.inf
    with pytest.raises(ValueError):
        ProbMatrix(entries, check_range=False)


def test_prob_matrix_is_readonly():
    f = ideal_prob_matrix(default_angles())
    with pytest.raises(ValueError):
        f.entries[0, 0] = 0.9


def test_ideal_matrix_determinant_vanishes():
    assert abs(determinant(ideal_prob_matrix(default_angles()))) < 1e-12


def test_determinant_identity_and_numpy_agreement():
    assert determinant(np.eye(5)) == 1.0
    rng = np.random.default_rng(301)
    for _ in range(100):
        m = rng.uniform(-1, 1, size=(5, 5))
        assert determinant(m) == pytest.approx(np.linalg.det(m),
                                               rel=1e-10, abs=1e-12)


def test_determinant_equal_columns():
    rng = np.random.default_rng(302)
    m = rng.uniform(0, 1, size=(5, 5))
    m[:, 3] = m[:, 1]
    assert abs(determinant(m)) < 1e-13


def test_adjugate_identity_relation():
    rng = np.random.default_rng(303)
    for _ in range(30):
        m = rng.uniform(-1, 1, size=(5, 5))
        prod = m @ adjugate(m)
        assert np.abs(prod - determinant(m) * np.eye(5)).max() < 1e-10
    assert np.array_equal(adjugate(np.eye(5)), np.eye(5))


def test_witness_sigma_frozen_value():
    f = ideal_prob_matrix(default_angles())
    assert witness_sigma(f, 10**6) == pytest.approx(SIGMA_1E6, rel=1e-12)


def test_witness_sigma_scales_with_samples():
    f = ideal_prob_matrix(default_angles())
    s1 = witness_sigma(f, 2500)
    s4 = witness_sigma(f, 10000)
    assert s4 == pytest.approx(s1 / 2, rel=1e-14)


def test_witness_sigma_zero_for_deterministic_cells():
    rows = np.zeros((4, 5))
    rows[1] = 1.0
    f = ProbMatrix(ones_row_matrix(rows))
    assert witness_sigma(f, 1000) == 0.0


def test_witness_sigma_rejects_bad_t():
    f = ideal_prob_matrix(default_angles())
    with pytest.raises(ValueError):
        witness_sigma(f, 0)
    with pytest.raises(ValueError):
        witness_sigma(f, -5)


def test_witness_sigma_per_cell_totals():
    f = ideal_prob_matrix(default_angles())
    t = np.full((4, 5), 1200, dtype=np.int64)
    assert witness_sigma(f, t) == pytest.approx(witness_sigma(f, 1200), rel=1e-14)
    t[2, 3] = 4800  # heavier sampling on one cell can only shrink sigma
    assert witness_sigma(f, t) < witness_sigma(f, 1200)


def test_analyze_per_job_needs_two_jobs():
    f = ideal_prob_matrix(default_angles())
    with pytest.raises(ValueError):
        analyze_per_job([f], [1000])


def test_analyze_per_job_matches_numpy_formulas():
    rng = np.random.default_rng(304)
    mats, ws = [], []
    for _ in range(12):
        rows = np.clip(
            np.array(ideal_prob_matrix(default_angles()).entries)[:4]
            + rng.normal(0, 0.01, size=(4, 5)), 0, 1)
        f = ProbMatrix(ones_row_matrix(rows))
        mats.append(f)
        ws.append(determinant(f))
    res = analyze_per_job(mats, [5000] * 12)
    assert res.scheme == "per_job"
    assert res.w == pytest.approx(np.mean(ws), rel=1e-14)
    assert res.sigma == pytest.approx(np.std(ws, ddof=1) / math.sqrt(12), rel=1e-12)
    assert res.z == pytest.approx(res.w / res.sigma, rel=1e-12)
    assert res.t_total == 60000


def test_analyze_per_job_identical_jobs():
    # Zero spread: z collapses to 0 when the mean witness is exactly zero.
    entries = np.ones((5, 5))
    f = ProbMatrix(entries, check_range=False)
    res = analyze_per_job([f, f, f], [10, 10, 10])
    assert res.sigma == 0.0
    assert res.w == 0.0
    assert res.z == 0.0


def test_analyze_per_job_identical_nonzero_w():
    rows = np.array(ideal_prob_matrix(default_angles()).entries)[:4].copy()
    rows[0, 0] = min(1.0, rows[0, 0] + 0.05)
    f = ProbMatrix(ones_row_matrix(rows))
    assert determinant(f) != 0.0
    res = analyze_per_job([f, f], [100, 100])
    assert res.sigma == 0.0
    assert math.isinf(res.z)


class _Counts:
    def __init__(self, successes, totals):
        self.successes = np.asarray(successes, dtype=np.int64)
        self.totals = np.asarray(totals, dtype=np.int64)


def test_analyze_pooled_matches_manual_addition():
    rng = np.random.default_rng(305)
    probs = np.array(ideal_prob_matrix(default_angles()).entries)[:4]
    jobs = []
    for _ in range(6):
        tot = np.full((4, 5), 700, dtype=np.int64)
        suc = rng.binomial(tot, np.clip(probs, 0, 1))
        jobs.append(_Counts(suc, tot))
    res = analyze_pooled(jobs)
    pooled = sum(j.successes for j in jobs) / sum(j.totals for j in jobs)
    f = ProbMatrix(ones_row_matrix(pooled))
    assert res.scheme == "pooled"
    assert res.w == pytest.approx(determinant(f), rel=1e-13, abs=1e-18)
    assert res.sigma == pytest.approx(witness_sigma(f, 4200), rel=1e-13)
    assert res.t_total == 4200


def test_analyze_pooled_nonuniform_totals():
    rng = np.random.default_rng(306)
    probs = np.array(ideal_prob_matrix(default_angles()).entries)[:4]
    tot1 = np.full((4, 5), 500, dtype=np.int64)
    tot2 = np.full((4, 5), 800, dtype=np.int64)
    tot2[0, 0] = 1400
    jobs = [_Counts(rng.binomial(tot1, probs), tot1),
            _Counts(rng.binomial(tot2, probs), tot2)]
    res = analyze_pooled(jobs)
    tot = tot1 + tot2
    pooled = (jobs[0].successes + jobs[1].successes) / tot
    f = ProbMatrix(ones_row_matrix(pooled))
    assert res.w == pytest.approx(determinant(f), rel=1e-13, abs=1e-18)
    assert res.sigma == pytest.approx(witness_sigma(f, tot), rel=1e-13)


def test_analyze_pooled_rejects_empty():
    with pytest.raises(ValueError):
        analyze_pooled([])
