# tests/test_filter.py

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from src.filtering.emckf import (
    NU_FLOOR,
    CorrentropyKalmanFilter,
    FilterMode,
    FilterState,
    check_covariance,
    correntropy_weight,
    filter_step,
    gain,
    initialize,
    kernel
)
from src.filtering.filter_selection import create_filter
from src.model.integrator import rk4_step
from src.model.seiar import MEASUREMENT_JACOBIAN, measurement
from src.utils.errors import BadCovariance, SingularR
from tests.conftest import ESTIMATE_STATE, NOMINAL_STATE

R = 0.01 * np.eye(2)
Q = np.eye(5)


class TestKernel:

    def test_zero_residual(self):
        assert kernel(0.0, 0.01) == 1.0

    def test_wide_kernel_is_flat(self):
        sigma = 1e6
        for x in (1.0, 10.0, 100.0, 1000.0):
            # exp(-a) >= 1 - a
            deficit = x * x / (2.0 * sigma * sigma)
            assert 1.0 - deficit - 1e-15 <= kernel(x, sigma) <= 1.0
        assert kernel(40.0, sigma) >= 1.0 - 1e-9

    def test_value_at_scaled_bandwidth(self):
        assert kernel(np.sqrt(2.0) * 3.0, 3.0) == pytest.approx(np.exp(-1.0), rel=1e-12)

    def test_rejects_nonpositive_bandwidth(self):
        with pytest.raises(ValueError):
            kernel(1.0, 0.0)


class TestCorrentropyWeight:

    def test_exact_measurement(self):
        y = measurement(ESTIMATE_STATE)
        assert correntropy_weight(y, ESTIMATE_STATE, R, 0.01) == 1.0

    def test_outlier_is_rejected(self):
        y = measurement(ESTIMATE_STATE) + np.array([200.0, 0.0])
        nu = correntropy_weight(y, ESTIMATE_STATE, R, 0.01)
        assert 0.0 < nu < 1e-12
        assert nu == NU_FLOOR

    def test_wide_kernel_keeps_measurement(self):
        y = measurement(ESTIMATE_STATE) + np.array([20.0, -20.0])
        assert correntropy_weight(y, ESTIMATE_STATE, np.eye(2), 1e6) >= 1.0 - 1e-9

    def test_quadratic_form_plays_squared_norm(self):
        y = measurement(ESTIMATE_STATE) + np.array([0.2, 0.0])
        quadratic = 0.2 ** 2 / 0.01
        nu = correntropy_weight(y, ESTIMATE_STATE, R, 2.0)
        assert nu == pytest.approx(np.exp(-quadratic / 8.0))

    def test_literal_kernel_squares_the_form(self):
        y = measurement(ESTIMATE_STATE) + np.array([0.2, 0.0])
        quadratic = 0.2 ** 2 / 0.01
        nu = correntropy_weight(y, ESTIMATE_STATE, R, 2.0, literal=True)
        assert nu == pytest.approx(np.exp(-quadratic ** 2 / 8.0))

    def test_singular_noise_covariance(self):
        with pytest.raises(SingularR):
            correntropy_weight(np.zeros(2), ESTIMATE_STATE, np.zeros((2, 2)), 0.01)


class TestGain:

    def test_zero_weight_rejects_measurement(self):
        assert_array_equal(gain(np.eye(5), MEASUREMENT_JACOBIAN, R, 0.0), np.zeros((5, 2)))

    def test_unit_weight_is_kalman_bucy(self, rng):
        M = rng.standard_normal((5, 5))
        P = M @ M.T
        expected = P @ MEASUREMENT_JACOBIAN.T @ np.linalg.inv(R)
        assert_allclose(gain(P, MEASUREMENT_JACOBIAN, R, 1.0), expected)

    def test_linear_in_weight(self, rng):
        M = rng.standard_normal((5, 5))
        P = M @ M.T
        assert_allclose(gain(P, MEASUREMENT_JACOBIAN, R, 0.5), 0.5 * gain(P, MEASUREMENT_JACOBIAN, R, 1.0))


class TestInitialize:

    def test_identity_covariance_accepted(self):
        fs = initialize(ESTIMATE_STATE, np.eye(5), 0.01)
        assert fs.nu == 1.0
        assert fs.z_hat.sum() == 16000.0
        assert_array_equal(fs.P, np.eye(5))

    def test_indefinite_covariance_rejected(self):
        with pytest.raises(BadCovariance):
            initialize(ESTIMATE_STATE, np.diag([1.0, 1.0, -1.0, 1.0, 1.0]), 0.01)

    def test_asymmetric_covariance_rejected(self):
        P0 = np.eye(5)
        P0[0, 1] = 0.5
        with pytest.raises(BadCovariance):
            check_covariance(P0)

    def test_wrong_shape_rejected(self):
        with pytest.raises(BadCovariance):
            check_covariance(np.eye(4))


class TestFilterStep:

    def test_zero_covariance_follows_model(self, params):
        u = np.array([0.3, 0.1])
        z = ESTIMATE_STATE.copy()
        fs = initialize(z, np.zeros((5, 5)), 0.01)

        for _ in range(100):
            fs = filter_step(fs, measurement(fs.z_hat), u, params, 0.01, np.zeros((5, 5)), R)
            z, _ = rk4_step(z, u, params, np.zeros(5), 0.01)

        assert_array_equal(fs.z_hat, z)
        assert_array_equal(fs.P, np.zeros((5, 5)))
        assert fs.nu == 1.0

    def test_covariance_stays_symmetric_psd(self, params, rng):
        fs = initialize(ESTIMATE_STATE, np.eye(5), 0.01)
        u = np.array([0.5, 0.5])
        for _ in range(500):
            y = measurement(NOMINAL_STATE) + rng.standard_normal(2) * 0.1
            fs = filter_step(fs, y, u, params, 0.01, Q, R, mode=FilterMode.EKF)
            check_covariance(fs.P)
        assert_array_equal(fs.P, fs.P.T)

    def test_ekf_mode_pulls_estimate_toward_measurement(self, params):
        fs = initialize(ESTIMATE_STATE, np.eye(5), 0.01)
        y = measurement(NOMINAL_STATE)
        ekf = filter_step(fs, y, np.zeros(2), params, 0.01, Q, R, mode=FilterMode.EKF)
        emckf = filter_step(fs, y, np.zeros(2), params, 0.01, Q, R, mode=FilterMode.EMCKF)

        start = np.abs(measurement(fs.z_hat) - y)
        assert np.all(np.abs(measurement(ekf.z_hat) - y) < start)
        assert ekf.nu == 1.0
        assert emckf.nu == NU_FLOOR
        assert ekf.correction > 100.0 * max(emckf.correction, 1e-12)

    def test_shot_step_stays_on_model(self, params):
        u = np.array([0.2, 0.4])
        fs = initialize(ESTIMATE_STATE, np.eye(5), 0.01)
        y = measurement(ESTIMATE_STATE) + 200.0
        model_step, _ = rk4_step(ESTIMATE_STATE, u, params, np.zeros(5), 0.01)

        emckf = filter_step(fs, y, u, params, 0.01, Q, R, mode=FilterMode.EMCKF)
        ekf = filter_step(fs, y, u, params, 0.01, Q, R, mode=FilterMode.EKF)

        assert np.linalg.norm(emckf.z_hat - model_step) <= 1.0
        assert np.linalg.norm(ekf.z_hat - model_step) >= 10.0

    def test_riccati_ignores_weight(self, params):
        # при beta = 0 якобиан не зависит от оценки, и P не должна зависеть от ν
        linear = params.model_copy(update={'beta': 0.0})
        fs = initialize(ESTIMATE_STATE, np.eye(5), 0.01)
        y = measurement(NOMINAL_STATE)
        ekf = filter_step(fs, y, np.zeros(2), linear, 0.01, Q, R, mode=FilterMode.EKF)
        emckf = filter_step(fs, y, np.zeros(2), linear, 0.01, Q, R, mode=FilterMode.EMCKF)
        assert_array_equal(ekf.P, emckf.P)
        assert not np.array_equal(ekf.z_hat, emckf.z_hat)

    def test_rejects_nonpositive_step(self, params):
        fs = initialize(ESTIMATE_STATE, np.eye(5), 0.01)
        with pytest.raises(ValueError):
            filter_step(fs, np.zeros(2), np.zeros(2), params, 0.0, Q, R)

    def test_returns_filter_state(self, params):
        fs = initialize(ESTIMATE_STATE, np.eye(5), 0.5)
        result = filter_step(fs, measurement(ESTIMATE_STATE), np.zeros(2), params, 0.01, Q, R)
        assert isinstance(result, FilterState)
        assert result.sigma == 0.5


class TestFilterObject:

    def test_rejects_nonpositive_bandwidth(self, params):
        with pytest.raises(ValueError):
            CorrentropyKalmanFilter(params, (1.0,) * 5, (0.01, 0.01), sigma=0.0)

    def test_step_delegates(self, params):
        kalman = CorrentropyKalmanFilter(params, (1.0,) * 5, (0.01, 0.01), sigma=0.01, mode='ekf')
        fs = kalman.initialize(ESTIMATE_STATE, np.eye(5))
        y = measurement(NOMINAL_STATE)
        expected = filter_step(fs, y, np.zeros(2), params, 0.01, Q, R, mode=FilterMode.EKF)
        assert_array_equal(kalman.step(fs, y, np.zeros(2), 0.01).z_hat, expected.z_hat)

    def test_create_filter_from_scenario(self, nominal_config):
        kalman = create_filter(nominal_config)
        assert kalman.mode == FilterMode.EMCKF
        assert kalman.sigma == 0.01
        assert_array_equal(np.diag(kalman.R), [0.01, 0.01])
        assert kalman.theta_hat == nominal_config.filter_params

        ekf = create_filter(nominal_config.replaced(filter_mode=FilterMode.EKF))
        assert ekf.mode == FilterMode.EKF
