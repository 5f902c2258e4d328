import math

import numpy as np
import pytest

from dimwitness import core
from dimwitness.core import (
    DensityState,
    MeasEffect,
    UnitaryGate,
    bloch_vector,
    born_probability,
    make_s,
    make_s_theta,
    make_z,
    measurement_effect,
    prepare,
    viviani_point,
)
from dimwitness.witness import default_angles, ideal_prob_matrix


def test_make_s_matrix():
    s = make_s().matrix
    want = np.array([[1, -1j], [-1j, 1]]) / math.sqrt(2)
    assert np.abs(s - want).max() < 1e-15


def test_make_z_is_diagonal_phase():
    rng = np.random.default_rng(201)
    for theta in rng.uniform(-6, 6, size=40):
        z = make_z(theta).matrix
        assert z[0][1] == 0 and z[1][0] == 0
        assert z[0][0] == pytest.approx(np.exp(-1j * theta / 2), abs=1e-15)
        assert z[1][1] == pytest.approx(np.exp(1j * theta / 2), abs=1e-15)


def test_s_theta_product_identity():
    # The phased gate is the plain S conjugated by Z rotations.
    rng = np.random.default_rng(202)
    for theta in rng.uniform(-2 * math.pi, 2 * math.pi, size=200):
        direct = make_s_theta(theta).matrix
        product = make_z(-theta).matrix @ make_s().matrix @ make_z(theta).matrix
        assert np.abs(direct - product).max() < 1e-15


def test_s_theta_zero_is_s():
    assert np.array_equal(make_s_theta(0.0).matrix, make_s().matrix)


def test_gates_are_unitary():
    rng = np.random.default_rng(203)
    for theta in rng.uniform(-10, 10, size=100):
        u = make_s_theta(theta).matrix
        assert np.abs(u @ u.conj().T - np.eye(2)).max() < 1e-14


def test_unitary_gate_rejects_nonunitary():
    with pytest.raises(ValueError):
        UnitaryGate(np.array([[1.0, 0.0], [0.0, 2.0]]))
    with pytest.raises(ValueError):
        UnitaryGate(np.ones((2, 3)))


def test_density_state_validation():
    with pytest.raises(ValueError):
        DensityState(np.array([[0.5, 0.1], [0.2, 0.5]]))  # not hermitian
    with pytest.raises(ValueError):
        DensityState(np.array([[0.9, 0.0], [0.0, 0.3]]))  # trace != 1
    with pytest.raises(ValueError):
        DensityState(np.array([[1.2, 0.0], [0.0, -0.2]]))  # negative eigenvalue


def test_meas_effect_validation():
    with pytest.raises(ValueError):
        MeasEffect(np.array([[1.5, 0.0], [0.0, 0.0]]))  # eigenvalue > 1
    with pytest.raises(ValueError):
        MeasEffect(np.array([[0.5, 0.3j], [0.3j, 0.5]]))  # not hermitian
    eff = MeasEffect(np.eye(2) * 0.5)
    assert eff.dim == 2


def test_prepare_is_pure_state():
    rng = np.random.default_rng(204)
    for beta in rng.uniform(-math.pi, math.pi, size=50):
        rho = prepare(beta).matrix
        assert abs(np.trace(rho).real - 1.0) < 1e-14
        assert np.abs(rho @ rho - rho).max() < 1e-14


def test_measurement_effect_zero_angle():
    # phi = 0 measures the excited-state projector.
    eff = measurement_effect(0.0).matrix
    want = np.array([[0.0, 0.0], [0.0, 1.0]])
    assert np.abs(eff - want).max() < 1e-15


def test_born_probability_range_and_dual_route():
    angles = default_angles()
    f = ideal_prob_matrix(angles)
    for k, phi in enumerate(angles.phi):
        eff = measurement_effect(phi)
        for j, beta in enumerate(angles.beta):
            p = born_probability(eff, prepare(beta))
            assert 0.0 <= p <= 1.0
            assert p == pytest.approx(f[k, j], abs=1e-12)


def test_born_probability_random_angles_dual_route():
    rng = np.random.default_rng(205)
    for _ in range(25):
        beta = rng.uniform(-math.pi, math.pi, size=5)
        phi = rng.uniform(-math.pi, math.pi, size=4)
        from dimwitness.witness import AngleConfig

        f = ideal_prob_matrix(AngleConfig(beta, phi))
        k = int(rng.integers(4))
        j = int(rng.integers(5))
        p = born_probability(measurement_effect(phi[k]), prepare(beta[j]))
        assert p == pytest.approx(f[k, j], abs=1e-12)


def test_born_probability_dim_mismatch():
    qutrit = DensityState(np.diag([1.0, 0.0, 0.0]))
    with pytest.raises(ValueError):
        born_probability(measurement_effect(0.3), qutrit)


def test_ideal_matrix_frozen_first_row():
    f = ideal_prob_matrix(default_angles())
    assert f[0, 0] == pytest.approx(0.75, abs=1e-15)
    assert f[0, 1] == pytest.approx(0.5, abs=1e-15)
    assert f[0, 2] == 0.0
    assert f[0, 3] == pytest.approx(0.25, abs=1e-15)
    assert f[0, 4] == pytest.approx((2 + math.sqrt(2)) / 4, abs=1e-15)


def test_bloch_vector_unit_norm():
    rng = np.random.default_rng(206)
    for beta in rng.uniform(-math.pi, math.pi, size=50):
        v = bloch_vector(prepare(beta))
        assert v.x**2 + v.y**2 + v.z**2 == pytest.approx(1.0, abs=1e-13)


def test_bloch_vector_requires_qubit():
    with pytest.raises(ValueError):
        bloch_vector(DensityState(np.diag([1.0, 0.0, 0.0])))


def test_viviani_branches_and_cylinders():
    rng = np.random.default_rng(207)
    for a in rng.uniform(-math.pi, math.pi, size=100):
        vm = viviani_point(a, "measurement")
        vp = viviani_point(a, "preparation")
        # Both live on the unit sphere ...
        assert vm.x**2 + vm.y**2 + vm.z**2 == pytest.approx(1.0, abs=1e-13)
        assert vp.x**2 + vp.y**2 + vp.z**2 == pytest.approx(1.0, abs=1e-13)
        # ... and on their tangent half-radius cylinders.
        assert vm.x**2 + (vm.y - 0.5) ** 2 == pytest.approx(0.25, abs=1e-13)
        assert vp.x**2 + (vp.y + 0.5) ** 2 == pytest.approx(0.25, abs=1e-13)
        assert vm == viviani_point(a, "measurement")


def test_viviani_unknown_branch():
    with pytest.raises(ValueError):
        viviani_point(0.1, "diagonal")


def test_states_trace_the_curves():
    # Prepared states land on the preparation branch (x-mirrored
    # parameterization), projector states of the effects on the
    # measurement branch.
    rng = np.random.default_rng(208)
    for a in rng.uniform(-math.pi, math.pi, size=60):
        sv = bloch_vector(prepare(a))
        cv = viviani_point(-a, "preparation")
        assert sv.x == pytest.approx(cv.x, abs=1e-13)
        assert sv.y == pytest.approx(cv.y, abs=1e-13)
        assert sv.z == pytest.approx(cv.z, abs=1e-13)
        ev = bloch_vector(DensityState(measurement_effect(a).matrix))
        mv = viviani_point(math.pi - a, "measurement")
        assert ev.x == pytest.approx(mv.x, abs=1e-13)
        assert ev.y == pytest.approx(mv.y, abs=1e-13)
        assert ev.z == pytest.approx(mv.z, abs=1e-13)


def test_pauli_constants_are_readonly():
    with pytest.raises(ValueError):
        core.PAULI_X[0, 0] = 5.0
