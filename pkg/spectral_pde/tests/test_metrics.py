import logging

import numpy as np
import pytest

from spectral_pde.exceptions import ShapeMismatchError
from spectral_pde.models.problem import Trajectory
from spectral_pde.services.metrics import (
    ensemble_mean,
    evaluate,
    exact_series,
    observable_series,
    rms_error_uniform,
    rms_error_weighted,
    sampling_error,
    sampling_error_from_moments,
    scale_maximum,
    sigma_deviation,
    step_error,
    trapezoid_integral,
    weights_consistent,
)
from spectral_pde.services.lattice import build_grid
from spectral_pde.services.problems import get_problem

NUMERIC = np.array([[1.0, 2.0], [3.0, 4.0]])


class TestUniform:
    def test_printed_normalization(self):
        assert rms_error_uniform(NUMERIC, np.zeros((2, 2)), normalization="printed") == pytest.approx(np.sqrt(7.5 / 4))

    def test_squared_normalization(self):
        assert rms_error_uniform(NUMERIC, np.zeros((2, 2)), normalization="squared") == pytest.approx(np.sqrt(7.5) / 4)

    def test_fixed_scale(self):
        assert rms_error_uniform(NUMERIC, NUMERIC + 0.5, scale=9.0) == pytest.approx(np.sqrt(0.25 / 9))

    def test_identical_series(self):
        assert rms_error_uniform(NUMERIC, NUMERIC) == 0.0

    def test_complex_differences_use_modulus(self):
        numeric = np.array([[1j, 1.0]])
        assert rms_error_uniform(numeric, np.zeros((1, 2)), normalization="squared") == pytest.approx(1.0)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            rms_error_uniform(NUMERIC, np.zeros((2, 3)))

    def test_unknown_normalization(self):
        with pytest.raises(ValueError):
            rms_error_uniform(NUMERIC, np.zeros((2, 2)), normalization="cubed")

    def test_zero_scale(self):
        with pytest.raises(ValueError):
            rms_error_uniform(np.zeros((2, 2)), np.zeros((2, 2)))

    def test_scale_maximum(self):
        assert scale_maximum(np.array([[-5.0, 2.0], [1j, 0.0]])) == 5.0


class TestWeighted:
    def test_equal_weights_match_uniform(self, rng):
        numeric = rng.normal(size=(6, 2, 5))
        analytic = rng.normal(size=(6, 2, 5))
        dx = np.full(5, 2.0 / 5)
        dt = np.full(6, 3.0 / 6)
        weighted = rms_error_weighted(numeric, analytic, dx, dt, 2.0, 3.0)
        assert weighted == pytest.approx(rms_error_uniform(numeric, analytic))

    def test_weights_change_the_average(self):
        numeric = np.array([[1.0, 0.0]])
        analytic = np.zeros((1, 2))
        weighted = rms_error_weighted(numeric, analytic, np.array([0.75, 0.25]), np.array([1.0]), 1.0, 1.0,
                                      scale=1.0, normalization="squared")
        assert weighted == pytest.approx(np.sqrt(0.75))

    def test_inconsistent_weights_warn(self, caplog):
        with caplog.at_level(logging.WARNING):
            rms_error_weighted(NUMERIC, np.zeros((2, 2)), np.ones(2), np.ones(2), 5.0, 2.0)
        assert "Weight sums" in caplog.text

    def test_consistency_check(self):
        assert weights_consistent(np.full(10, 0.1), np.full(4, 0.25), 1.0, 1.0)
        assert not weights_consistent(np.full(10, 0.1), np.full(4, 0.25), 1.1, 1.0)

    def test_weight_shapes(self):
        with pytest.raises(ShapeMismatchError):
            rms_error_weighted(NUMERIC, np.zeros((2, 2)), np.ones(3), np.ones(2), 3.0, 2.0)

    def test_non_positive_weights(self):
        with pytest.raises(ValueError):
            rms_error_weighted(NUMERIC, np.zeros((2, 2)), np.array([1.0, -1.0]), np.ones(2), 0.0, 2.0)


class TestEnsembles:
    def test_sampling_error(self):
        values = np.array([[1.0, 2.0], [3.0, 2.0]])
        np.testing.assert_allclose(sampling_error(values), [1.0, 0.0])

    def test_single_sample_has_no_error(self):
        np.testing.assert_array_equal(sampling_error(np.ones((1, 3))), 0.0)

    def test_error_from_running_moments(self, rng):
        values = rng.normal(size=(50, 4)) + 1j * rng.normal(size=(50, 4))
        from_moments = sampling_error_from_moments(values.mean(axis=0), np.mean(np.abs(values) ** 2, axis=0), 50)
        np.testing.assert_allclose(from_moments, np.std(values, axis=0) / np.sqrt(49))
        np.testing.assert_allclose(sampling_error(values), from_moments)

    def test_sigma_deviation(self):
        mean = np.array([[0.0], [1.2], [2.0]])
        error = np.array([[0.0], [0.1], [0.5]])
        expected = np.array([[5.0], [1.0], [2.5]])
        assert sigma_deviation(mean, error, expected) == pytest.approx(2.0)
        assert sigma_deviation(mean, np.zeros_like(error), expected) == 0.0

    def test_ensemble_mean(self):
        np.testing.assert_allclose(ensemble_mean([np.zeros(3), np.full(3, 2.0)]), 1.0)

    def test_step_error(self):
        assert step_error(np.array([1.0, 2.0]), np.array([1.5, 1.9])) == pytest.approx(0.5)


class TestObservables:
    def test_trapezoid(self):
        problem = get_problem("stochastic_heat")
        grid = build_grid(problem.interval, 11, problem.boundary)
        values = np.ones((3, 1, 11))
        np.testing.assert_allclose(trapezoid_integral(values, grid), 5.0)

    def test_observable_series_integrates(self):
        problem = get_problem("stochastic_heat")
        grid = build_grid(problem.interval, 11, problem.boundary)
        fields = np.full((2, 1, 11), 2.0 + 0j)
        trajectory = Trajectory(times=np.array([0.0, 1.0]), fields=fields, observables=None, final=fields[-1])
        series = observable_series(trajectory, problem.observable, grid, integrate_space=True)
        np.testing.assert_allclose(series, 20.0)
        with pytest.raises(ValueError):
            observable_series(trajectory, problem.observable, integrate_space=True)

    def test_exact_series_of_heat(self):
        problem = get_problem("heat", "DD")
        grid = build_grid(problem.interval, 11, problem.boundary)
        series = exact_series(problem, grid, np.array([0.0, 1.0]))
        assert series.shape == (2, 1, 11)
        np.testing.assert_allclose(series[0, 0], problem.exact(0.0, grid.coordinates(0))[0])

    def test_diverged_trajectory_scores_infinity(self):
        problem = get_problem("heat", "DD")
        grid = build_grid(problem.interval, 11, problem.boundary)
        trajectory = Trajectory(times=np.array([0.0]), fields=np.zeros((1, 1, 11)), observables=np.zeros((1, 1, 11)),
                                final=np.zeros((1, 11)), diverged_step=3)
        assert evaluate(problem, grid, trajectory) == float("inf")
