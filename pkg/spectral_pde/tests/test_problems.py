import numpy as np
import pytest

from spectral_pde.exceptions import UnknownProblemError
from spectral_pde.models.boundary import BoundaryKind
from spectral_pde.services.lattice import build_grid
from spectral_pde.services.problems import (
    BOUNDARY_OPTIONS,
    PROBLEMS,
    SHIFTED_SOLITON_BACKGROUND,
    check_boundary_slope,
    get_problem,
    pde_residual,
    stochastic_heat_moment,
)

CASES = [(problem_id, boundary) for problem_id, options in BOUNDARY_OPTIONS.items() for boundary in options]
EXACT_CASES = [case for case in CASES if case[0] != "stochastic_heat"]


def test_catalog_and_boundary_options_agree():
    assert set(PROBLEMS) == set(BOUNDARY_OPTIONS)


@pytest.mark.parametrize("problem_id, boundary", CASES)
def test_problem_builds(problem_id, boundary):
    problem = get_problem(problem_id, boundary)
    assert problem.boundary.label() == boundary
    assert problem.coefficients.components == problem.components
    grid = build_grid(problem.interval, problem.default_points, problem.boundary)
    u0 = problem.initial(grid)
    assert u0.shape == grid.field_shape
    assert np.all(np.isfinite(u0))


@pytest.mark.parametrize("problem_id, boundary", EXACT_CASES)
def test_exact_solutions_satisfy_their_equations(problem_id, boundary):
    problem = get_problem(problem_id, boundary)
    x_a, x_b = problem.interval[0]
    x = np.linspace(x_a, x_b, 41)
    t_start, t_end = problem.time_window
    for t in np.linspace(t_start, t_end, 5)[1:-1]:
        scale = max(float(np.max(np.abs(problem.exact(t, x)))), 1.0)
        assert pde_residual(problem, t, x) / scale < 1e-4


@pytest.mark.parametrize("problem_id, boundary", EXACT_CASES)
def test_boundary_data_follows_exact_solution(problem_id, boundary):
    problem = get_problem(problem_id, boundary)
    x_a, x_b = problem.interval[0]
    t = 0.5 * sum(problem.time_window)
    h = 1e-6
    for c in range(problem.components):
        for end, x in enumerate((x_a, x_b)):
            condition = problem.boundary.ends(c, 0)[end]
            if condition.kind == BoundaryKind.DIRICHLET:
                expected = problem.exact(t, np.array([x]))[c, 0]
            else:
                points = np.array([x + h, x - h])
                values = problem.exact(t, points)[c]
                expected = (values[0] - values[1]) / (2 * h)
            assert condition.at(t) == pytest.approx(expected, abs=1e-6)


class TestHeat:
    def test_zero_boundary_initial_field(self):
        problem = get_problem("heat_zero", "DD")
        x = np.array([np.pi / 2])
        assert problem.exact(0.0, x)[0, 0] == pytest.approx(2.0)
        assert problem.default_points == 21

    @pytest.mark.parametrize("boundary", ["DD", "NN", "DN", "ND"])
    def test_nonperiodic_window(self, boundary):
        problem = get_problem("heat", boundary)
        assert problem.time_window == (0.0, 4.0)
        assert problem.default_steps == 40

    def test_unsupported_boundary(self):
        with pytest.raises(ValueError):
            get_problem("heat_zero", "DN")


class TestSolitons:
    def test_shifted_soliton_vanishes_at_its_ends(self):
        problem = get_problem("nlse_shifted", "DD")
        x = np.array([-5.0, 0.0, 5.0])
        values = problem.exact(0.3, x)[0]
        assert values[0] == pytest.approx(0.0, abs=1e-15)
        assert values[2] == pytest.approx(0.0, abs=1e-15)
        assert values[1] == pytest.approx(1.0 - SHIFTED_SOLITON_BACKGROUND)

    @pytest.mark.parametrize("boundary, interval", [("DD", (-5.0, 5.0)), ("DN", (-5.0, 0.0)), ("ND", (0.0, 5.0))])
    def test_shifted_soliton_intervals(self, boundary, interval):
        problem = get_problem("nlse_shifted", boundary)
        assert problem.interval == [interval]
        grid = build_grid(problem.interval, problem.default_points, problem.boundary)
        assert grid.spacings[0] == pytest.approx(0.1)

    def test_peregrine_peak(self):
        problem = get_problem("peregrine", "DD")
        assert problem.observable(problem.exact(0.0, np.array([0.0])))[0, 0] == pytest.approx(9.0)
        assert problem.normalization == 9.0

    def test_breather_starts_as_double_soliton(self):
        problem = get_problem("breather", "NN")
        x = np.linspace(-2.0, 2.0, 9)
        np.testing.assert_allclose(problem.exact(0.0, x)[0], 2.0 / np.cosh(x), atol=1e-14)

    def test_slope_check_catches_a_wrong_formula(self):
        def value(t, x):
            return np.sin(x)[None, :]

        wrong = value
        with pytest.raises(ValueError):
            check_boundary_slope(value, wrong, np.array([0.3, 1.0]), np.array([0.0]))

    def test_simultons_are_stationary_profiles(self):
        problem = get_problem("triple_simulton")
        x = np.array([0.0])
        np.testing.assert_allclose(np.abs(problem.exact(1.3, x))[:, 0], 1.5)
        assert problem.components == 3


class TestStochasticHeat:
    def test_starts_at_zero(self):
        assert stochastic_heat_moment(np.array([0.0]))[0] == 0.0

    def test_saturates(self):
        # sum_n 1 / (2 D k_n^2) = L^2 / (12 D)
        assert stochastic_heat_moment(np.array([200.0]))[0] == pytest.approx(25.0 / 6.0, rel=1e-10)

    def test_closed_form_matches_mode_sum(self):
        t = np.array([0.05, 0.3, 1.0])
        closed = stochastic_heat_moment(t)
        summed = stochastic_heat_moment(t, n_modes=20000)
        np.testing.assert_allclose(closed, summed, atol=1e-3)

    def test_lattice_expectation_approaches_continuum(self):
        t = np.array([0.2, 0.6, 1.0])
        lattice = stochastic_heat_moment(t, n_modes=24, dt=1e-5)
        continuum = stochastic_heat_moment(t, n_modes=24)
        np.testing.assert_allclose(lattice, continuum, rtol=1e-3)

    def test_increasing(self):
        values = stochastic_heat_moment(np.linspace(0.0, 1.0, 11))
        assert np.all(np.diff(values) > 0)

    def test_rejects_negative_times(self):
        with pytest.raises(ValueError):
            stochastic_heat_moment(np.array([-0.1]))

    def test_lattice_expectation_needs_modes(self):
        with pytest.raises(ValueError):
            stochastic_heat_moment(np.array([0.1]), dt=0.01)

    def test_problem_exact_observable(self):
        problem = get_problem("stochastic_heat")
        assert problem.stochastic
        assert problem.exact_observable(np.array([0.0, 0.5])).shape == (2, 1)


def test_unknown_problem():
    with pytest.raises(UnknownProblemError):
        get_problem("wave")
