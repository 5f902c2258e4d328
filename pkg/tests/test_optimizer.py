import math

import numpy as np
import pytest

from dimwitness.optimizer import REFERENCE_T, optimize_angles, sensitivity
from dimwitness.witness import (
    AngleConfig,
    default_angles,
    determinant,
    ideal_prob_matrix,
    witness_sigma,
)
from dimwitness import kernels

DEFAULT_OBJECTIVE = 0.24999999999999992


def random_config(rng):
    beta = rng.uniform(-math.pi, math.pi, size=5)
    phi = rng.uniform(-math.pi, math.pi, size=4)
    return AngleConfig(beta, phi)


def test_sensitivity_default_angles():
    rep = sensitivity(default_angles())
    assert rep.adj_frobenius == pytest.approx(DEFAULT_OBJECTIVE, rel=1e-12)
    assert rep.adj_min_abs == 0.0
    f = ideal_prob_matrix(default_angles())
    assert rep.predicted_sigma_at_t == pytest.approx(
        witness_sigma(f, REFERENCE_T), rel=1e-14)


def test_sensitivity_invariants():
    rng = np.random.default_rng(601)
    for _ in range(50):
        rep = sensitivity(random_config(rng))
        assert rep.adj_frobenius >= rep.adj_min_abs >= 0.0
        assert rep.predicted_sigma_at_t >= 0.0


def test_objective_invariant_under_measurement_swap():
    # Swapping two measurement rows flips the determinant sign but not the
    # adjugate mass.
    rng = np.random.default_rng(602)
    for _ in range(20):
        beta = rng.uniform(-math.pi, math.pi, size=5)
        phi = list(rng.uniform(-math.pi, math.pi, size=4))
        a = kernels.adj_frobenius(beta, phi)
        phi[0], phi[2] = phi[2], phi[0]
        b = kernels.adj_frobenius(beta, phi)
        assert a == pytest.approx(b, rel=1e-12)


def test_budget_one_returns_init():
    init = default_angles()
    rep = optimize_angles(init, budget=1)
    assert rep.angles == init
    assert rep.adj_frobenius == pytest.approx(DEFAULT_OBJECTIVE, rel=1e-12)


def test_argument_validation():
    with pytest.raises(ValueError):
        optimize_angles(default_angles(), budget=0)
    with pytest.raises(ValueError):
        optimize_angles(default_angles(), budget=100, constraint="tight")


def test_result_never_below_init():
    rng = np.random.default_rng(603)
    for _ in range(5):
        init = random_config(rng)
        rep = optimize_angles(init, budget=300, constraint="free")
        assert rep.adj_frobenius >= sensitivity(init).adj_frobenius - 1e-15


def test_deterministic():
    rng = np.random.default_rng(604)
    init = random_config(rng)
    a = optimize_angles(init, budget=500, constraint="free")
    b = optimize_angles(init, budget=500, constraint="free")
    assert a.angles == b.angles
    assert a.adj_frobenius == b.adj_frobenius


def test_paired_constraint_is_enforced():
    rng = np.random.default_rng(605)
    beta = rng.uniform(-math.pi, math.pi, size=5)
    init = AngleConfig(beta, -beta[:4])
    rep = optimize_angles(init, budget=2000, constraint="viviani_paired")
    for b, p in zip(rep.angles.beta[:4], rep.angles.phi):
        assert p == pytest.approx(-b, abs=1e-15)


def test_optimized_angles_stay_on_the_null_manifold():
    rng = np.random.default_rng(606)
    init = random_config(rng)
    rep = optimize_angles(init, budget=1000, constraint="free")
    assert abs(determinant(ideal_prob_matrix(rep.angles))) < 1e-10


def test_angles_are_wrapped():
    init = AngleConfig((3.0, -3.0, 1.0, -1.0, 0.0), (-3.0, 3.0, -1.0, 1.0))
    rep = optimize_angles(init, budget=400, constraint="free")
    for v in rep.angles.beta + rep.angles.phi:
        assert -math.pi < v <= math.pi


def test_improves_from_default_with_budget():
    rep = optimize_angles(default_angles(), budget=5000,
                          constraint="viviani_paired")
    assert rep.adj_frobenius >= DEFAULT_OBJECTIVE - 1e-12
