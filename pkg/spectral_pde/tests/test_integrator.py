from dataclasses import replace

import numpy as np
import pytest

from spectral_pde.exceptions import DivergenceError, ShapeMismatchError
from spectral_pde.models.grid import TimeGrid
from spectral_pde.models.problem import LinearCoefficients, MethodConfig, Problem
from spectral_pde.services.boundaries import dirichlet_mask, spec_from_label
from spectral_pde.services.integrator import (
    STEPPER_CLASSES,
    InteractionPictureStepper,
    NoiseSource,
    divergence_limit,
    estimate_step_error,
    midpoint_step,
    run,
    sample_noise,
)
from spectral_pde.services.lattice import build_grid
from spectral_pde.services.metrics import evaluate, trapezoid_integral
from spectral_pde.services.problems import get_problem, stochastic_heat_moment


def _setup(problem_id, boundary=None, points=None):
    problem = get_problem(problem_id, boundary)
    grid = build_grid(problem.interval, points or problem.default_points, problem.boundary)
    return problem, grid


def _config(method, problem, steps, **kwargs):
    t_start, t_end = problem.time_window
    observe_every = kwargs.pop("observe_every", 1)
    return MethodConfig(method, TimeGrid(t_start, t_end, steps, observe_every), **kwargs)


class TestInteractionPicture:
    @pytest.mark.parametrize("boundary", ["DD", "NN"])
    def test_heat_is_exact_at_large_steps(self, boundary):
        problem, grid = _setup("heat_zero", boundary)
        trajectory = run(problem, grid, _config("fip", problem, 10))
        assert evaluate(problem, grid, trajectory) < 1e-12

    @pytest.mark.parametrize("boundary", ["DD", "NN", "DN", "ND"])
    def test_heat_with_every_boundary_pair(self, boundary):
        problem, grid = _setup("heat", boundary)
        trajectory = run(problem, grid, _config("fip", problem, problem.default_steps))
        assert evaluate(problem, grid, trajectory) < 1e-12

    def test_propagate_over_custom_interval(self):
        problem, grid = _setup("heat_zero", "DD")
        stepper = InteractionPictureStepper(problem, grid, 0.1)
        u0 = problem.initial(grid)[None]
        out = stepper.propagate(u0, 0.0, 0.0, tau=0.25)
        np.testing.assert_allclose(out[0], problem.exact(0.25, grid.coordinates(0)), atol=1e-13)


class TestStability:
    @pytest.mark.parametrize("method", ["fd", "fsd"])
    def test_explicit_methods_diverge_at_large_steps(self, method):
        problem, grid = _setup("heat_zero", "DD")
        with pytest.raises(DivergenceError) as info:
            run(problem, grid, _config(method, problem, 10))
        partial = info.value.partial
        assert partial is not None and partial.diverged
        assert partial.diverged_step == info.value.step
        assert partial.times[0] == 0.0
        assert 1 <= info.value.step <= 10

    def test_fsd_converges_at_small_steps(self):
        problem, grid = _setup("heat_zero", "DD")
        trajectory = run(problem, grid, _config("fsd", problem, 2000, observe_every=20))
        assert evaluate(problem, grid, trajectory) < 1e-6

    def test_fd_error_is_spatial(self):
        problem, grid = _setup("heat_zero", "DD")
        trajectory = run(problem, grid, _config("fd", problem, 2000, observe_every=20))
        assert 1e-4 < evaluate(problem, grid, trajectory) < 1e-2


class TestBoundaryTracking:
    @pytest.mark.parametrize("method", ["fip", "fsd", "fd"])
    def test_dirichlet_ends_follow_their_values(self, method):
        problem, grid = _setup("soliton", "DD")
        trajectory = run(problem, grid, MethodConfig(method, TimeGrid(0.0, 0.5, 200)))
        exact = problem.exact(0.5, grid.coordinates(0))
        assert trajectory.final[0, 0] == pytest.approx(exact[0, 0], abs=1e-12)
        assert trajectory.final[0, -1] == pytest.approx(exact[0, -1], abs=1e-12)

    @pytest.mark.parametrize("method, tolerance", [("fsd", 5e-3), ("fd", 1e-2)])
    def test_soliton_stays_close(self, method, tolerance):
        problem, grid = _setup("soliton", "DD")
        trajectory = run(problem, grid, MethodConfig(method, TimeGrid(0.0, 0.5, 200)))
        exact = problem.exact(0.5, grid.coordinates(0))
        assert np.max(np.abs(trajectory.final - exact)) < tolerance

    @pytest.mark.parametrize("boundary", ["NN", "DN", "ND"])
    def test_soliton_with_neumann_ends(self, boundary):
        problem, grid = _setup("soliton", boundary)
        trajectory = run(problem, grid, MethodConfig("fsd", TimeGrid(0.0, 0.5, 200)))
        exact = problem.exact(0.5, grid.coordinates(0))
        assert np.max(np.abs(trajectory.final - exact)) < 5e-3


class TestMidpointStep:
    def test_single_and_batched_fields_agree(self):
        problem, grid = _setup("heat_zero", "DD")
        config = _config("fsd", problem, 100)
        u0 = problem.initial(grid)
        single = midpoint_step(u0, 0.0, 0.01, problem, grid, config)
        batch = midpoint_step(np.stack([u0, u0]), 0.0, 0.01, problem, grid, config)
        assert single.shape == grid.field_shape
        assert batch.shape == (2,) + grid.field_shape
        np.testing.assert_allclose(batch[1], single)

    def test_non_finite_field_raises(self):
        problem, grid = _setup("heat_zero", "DD")
        u0 = problem.initial(grid)
        u0[0, 5] = np.nan
        with pytest.raises(DivergenceError):
            midpoint_step(u0, 0.0, 0.01, problem, grid, _config("fip", problem, 100), step=4)

    def test_limit_follows_initial_scale(self):
        problem, grid = _setup("heat_zero", "DD")
        config = _config("fip", problem, 100)
        u0 = problem.initial(grid)
        assert divergence_limit(u0) == pytest.approx(1e12 * np.max(np.abs(u0)))
        midpoint_step(10 * u0, 0.0, 0.01, problem, grid, config)
        with pytest.raises(DivergenceError) as info:
            midpoint_step(1e13 * u0, 0.0, 0.01, problem, grid, config, step=7)
        assert info.value.step == 7

    def test_shape_checked(self):
        problem, grid = _setup("heat_zero", "DD")
        with pytest.raises(ShapeMismatchError):
            midpoint_step(np.zeros((1, 7)), 0.0, 0.01, problem, grid, _config("fip", problem, 100))

    def test_every_method_is_registered(self):
        assert sorted(STEPPER_CLASSES) == ["fd", "fip", "fsd"]


class TestNoise:
    def test_variance_and_mask(self, rng):
        problem, grid = _setup("stochastic_heat", points=26)
        mask = dirichlet_mask(problem.boundary, grid).any(axis=0)
        sample = sample_noise(rng, grid, 0.01, 1, trajectories=10000, mask=mask)
        assert sample.variance == pytest.approx(1 / (0.01 * 0.2))
        assert sample.w.shape == (10000, 1, 26)
        np.testing.assert_array_equal(sample.w[..., 0], 0.0)
        np.testing.assert_array_equal(sample.w[..., -1], 0.0)
        assert np.var(sample.w[..., 1:-1]) == pytest.approx(sample.variance, rel=0.02)

    def test_steps_axis(self, rng, dd_grid):
        assert sample_noise(rng, dd_grid, 0.1, 2, trajectories=3, steps=4).w.shape == (4, 3, 2, 21)

    def test_rejects_bad_step(self, rng, dd_grid):
        with pytest.raises(ValueError):
            sample_noise(rng, dd_grid, 0.0, 1)

    def test_double_step_averages_half_steps(self):
        problem, grid = _setup("stochastic_heat", points=26)
        fine = NoiseSource(np.random.SeedSequence(3).spawn(2), grid, 0.005, 1)
        coarse = NoiseSource(np.random.SeedSequence(3).spawn(2), grid, 0.01, 1, double_step=True)
        for _ in range(40):
            expected = (fine() + fine()) / 2
            np.testing.assert_allclose(coarse(), expected)


class TestEnsembles:
    def test_same_seed_same_result(self):
        problem, grid = _setup("stochastic_heat", points=26)
        first = run(problem, grid, _config("fip", problem, 20, ensemble_size=150, rng_seed=5))
        second = run(problem, grid, _config("fip", problem, 20, ensemble_size=150, rng_seed=5, threads=2))
        assert first.trajectories == 150
        assert first.final.shape == (150, 1, 26)
        np.testing.assert_array_equal(first.observables, second.observables)
        np.testing.assert_array_equal(first.final, second.final)

    def test_different_seeds_differ(self):
        problem, grid = _setup("stochastic_heat", points=26)
        first = run(problem, grid, _config("fip", problem, 20, ensemble_size=10, rng_seed=1))
        second = run(problem, grid, _config("fip", problem, 20, ensemble_size=10, rng_seed=2))
        assert not np.allclose(first.observables[1:], second.observables[1:])

    def test_deterministic_problem_runs_once(self):
        problem, grid = _setup("heat_zero", "DD")
        trajectory = run(problem, grid, _config("fip", problem, 10, ensemble_size=50))
        assert trajectory.trajectories == 1
        assert trajectory.sampling_error is None
        assert trajectory.final.shape == grid.field_shape

    def test_mean_moment_matches_lattice_expectation(self):
        problem, grid = _setup("stochastic_heat", points=26)
        config = _config("fip", problem, 100, ensemble_size=400, rng_seed=11, observe_every=20)
        trajectory = run(problem, grid, config)
        expected = stochastic_heat_moment(trajectory.times, 5.0, n_modes=24, dt=0.01)
        mean = trajectory.observables[:, 0].real
        sigma = trajectory.sampling_error[:, 0]
        assert trajectory.times.size == 6
        assert mean[0] == 0.0
        assert np.all(sigma[1:] > 0)
        assert np.all(np.abs(mean[1:] - expected[1:]) <= 5 * sigma[1:])


class TestStepError:
    def test_exact_method_has_no_step_error(self):
        problem, grid = _setup("heat_zero", "DD")
        assert estimate_step_error(problem, grid, _config("fip", problem, 10)) < 1e-12

    def test_stochastic_step_error_is_small(self):
        problem, grid = _setup("stochastic_heat", points=26)
        error = estimate_step_error(problem, grid, _config("fip", problem, 20, ensemble_size=20, rng_seed=4))
        assert 0 < error < 1.0


class TestIterations:
    def test_changes_shrink_with_more_iterations(self):
        problem, grid = _setup("soliton", "DD")
        finals = {k: run(problem, grid, MethodConfig("fsd", TimeGrid(0.0, 0.5, 200), iterations=k)).final
                  for k in (2, 3, 4)}
        change_23 = np.max(np.abs(finals[3] - finals[2]))
        change_34 = np.max(np.abs(finals[4] - finals[3]))
        assert change_34 < change_23
        assert change_34 < 1e-4


def _neumann_patch_problem():
    """u_t = u_xx on [0, 1] with u_x(0) = 0, u_x(1) = 2 and u(0) = x^2, solved by x^2 + 2t."""
    slopes = (0.0, 2.0)
    return Problem(
        name="neumann_patch",
        components=1,
        coefficients=LinearCoefficients([[1.0]]),
        drift=lambda u, t, x, du: np.zeros_like(u),
        initial=lambda grid: (grid.coordinates(0) ** 2)[None].astype(complex),
        boundary=spec_from_label("NN", neumann=lambda c, end: lambda t: slopes[end]),
        interval=[(0.0, 1.0)],
        time_window=(0.0, 0.1),
        default_points=21,
        default_steps=1000,
        exact=lambda t, x: (np.asarray(x) ** 2 + 2 * t)[None].astype(complex),
    )


class TestPatches:
    @pytest.mark.parametrize("method", ["fip", "fsd", "fd"])
    def test_neumann_patch_with_drifting_mean(self, method):
        problem = _neumann_patch_problem()
        grid = build_grid(problem.interval, problem.default_points, problem.boundary)
        trajectory = run(problem, grid, _config(method, problem, problem.default_steps, observe_every=100))
        x = grid.coordinates(0)
        for t, field in zip(trajectory.times, trajectory.fields):
            np.testing.assert_allclose(field, problem.exact(t, x), atol=1e-10)


class TestDriftArguments:
    @pytest.mark.parametrize("method", ["fip", "fsd", "fd"])
    def test_advection_uses_first_derivative(self, method):
        problem, grid = _setup("advection", "DD")
        trajectory = run(problem, grid, _config(method, problem, problem.default_steps, observe_every=100))
        exact = problem.exact(problem.time_window[1], grid.coordinates(0))
        assert np.max(np.abs(trajectory.final - exact)) < 5e-3

    @pytest.mark.parametrize("boundary", ["NN", "DN", "ND"])
    def test_advection_with_neumann_ends(self, boundary):
        problem, grid = _setup("advection", boundary)
        trajectory = run(problem, grid, _config("fsd", problem, problem.default_steps, observe_every=100))
        exact = problem.exact(problem.time_window[1], grid.coordinates(0))
        assert np.max(np.abs(trajectory.final - exact)) < 1e-2

    def test_drift_sees_coordinates(self):
        seen = {}

        def drift(u, t, x, du):
            seen["du"] = du
            return np.sin(x[0]) * np.ones_like(u)

        # sin(x) is a steady state of u_t = u_xx + sin(x) with zero ends on [0, pi]
        problem = Problem(
            name="steady_source",
            components=1,
            coefficients=LinearCoefficients([[1.0]]),
            drift=drift,
            initial=lambda grid: np.sin(grid.coordinates(0))[None].astype(complex),
            boundary=spec_from_label("DD"),
            interval=[(0.0, np.pi)],
            time_window=(0.0, 0.2),
            default_points=21,
            default_steps=200,
        )
        grid = build_grid(problem.interval, problem.default_points, problem.boundary)
        trajectory = run(problem, grid, _config("fsd", problem, problem.default_steps))
        np.testing.assert_allclose(trajectory.final, problem.initial(grid), atol=1e-12)
        assert seen["du"] is None


class TestInvariants:
    def test_silent_noise_matches_deterministic_run(self):
        problem, grid = _setup("heat_zero", "DD")
        silent = replace(problem, noise=lambda u, t, x, w: np.zeros_like(u), noise_components=1)
        assert silent.stochastic
        deterministic = run(problem, grid, _config("fip", problem, 10))
        ensemble = run(silent, grid, _config("fip", silent, 10, ensemble_size=5, rng_seed=3))
        assert ensemble.trajectories == 5
        for final in ensemble.final:
            np.testing.assert_allclose(final, deterministic.final, rtol=0, atol=1e-13)
        np.testing.assert_allclose(ensemble.observables, deterministic.observables, rtol=0, atol=1e-13)

    def test_nlse_conserves_norm(self):
        problem = Problem(
            name="free_soliton",
            components=1,
            coefficients=LinearCoefficients([[0.5j]]),
            drift=lambda u, t, x, du: 1j * u * np.abs(u) ** 2,
            initial=lambda grid: (1 / np.cosh(grid.coordinates(0)))[None].astype(complex),
            boundary=spec_from_label("DD"),
            interval=[(-15.0, 15.0)],
            time_window=(0.0, 2.0),
            default_points=301,
            default_steps=200,
        )
        grid = build_grid(problem.interval, problem.default_points, problem.boundary)
        trajectory = run(problem, grid, _config("fip", problem, problem.default_steps, observe_every=50))
        norms = trapezoid_integral(np.abs(trajectory.fields) ** 2, grid)[:, 0]
        assert norms[0] == pytest.approx(2.0, rel=1e-3)
        assert np.max(np.abs(norms - norms[0])) / norms[0] < 1e-6
