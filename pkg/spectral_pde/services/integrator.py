"""
Iterated midpoint integration.

One step from u_j at t_j with step dt:

    a0 = P_in(u_j)
    a  = a0 + dt/2 D[a, t_j + dt/2]      (repeated `iterations` times)
    u_{j+1} = P_out(2 a - a0)

FIP propagates the homogeneous part exactly over each half-step; FSD and FD use
the identity propagator and put the Laplacian inside D.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from time import perf_counter
from typing import List, Optional, Sequence

import numpy as np

from ..config.settings import BOUNDARY_RATE_FRACTION, DEFAULT_ITERATIONS, DIVERGENCE_LIMIT, ENSEMBLE_BATCH, NOISE_CHUNK
from ..exceptions import DivergenceError, ShapeMismatchError
from ..models.boundary import BoundaryKind
from ..models.grid import Grid, TimeGrid
from ..models.problem import MethodConfig, NoiseSample, Problem, Trajectory
from .boundaries import boundary_rate, dirichlet_mask, patch_field, patch_laplacian
from .metrics import observable_values, sampling_error_from_moments, step_error
from .operators import build_propagator, fd_laplacian, first_derivative_fd, spectral_laplacian
from .operators import propagate as propagate_field

logger = logging.getLogger(__name__)


def sample_noise(
    rng: np.random.Generator,
    grid: Grid,
    dt: float,
    components: int,
    trajectories: int = 1,
    steps: Optional[int] = None,
    mask: Optional[np.ndarray] = None,
) -> NoiseSample:
    """
    Delta-correlated Gaussian noise on the lattice.

    Args:
        rng: Random generator
        grid: Spatial lattice, sets the volume element
        dt: Time step
        components: Noise components
        trajectories: Leading trajectory count
        steps: When given, an extra leading axis of that many steps
        mask: Spatial points (True) where the noise is pinned to zero

    Returns:
        NoiseSample with w of shape ([steps,] trajectories, components, N_1, ..., N_d)
    """
    if dt <= 0:
        raise ValueError(f"Time step must be positive: {dt}")
    variance = 1.0 / (dt * grid.volume_element)
    shape = ((steps,) if steps is not None else ()) + (trajectories, components) + grid.shape
    w = rng.normal(scale=np.sqrt(variance), size=shape)
    if mask is not None:
        w = np.where(mask, 0.0, w)
    return NoiseSample(w=w, variance=variance)


class NoiseSource:
    """
    Noise for a batch of trajectories, each from its own generator.

    With double_step the increments of two half-steps are averaged, so a run at dt
    sees the same Wiener path as a run at dt/2 with the same seeds.
    """

    def __init__(self, seeds: Sequence[np.random.SeedSequence], grid: Grid, dt: float, components: int,
                 mask: Optional[np.ndarray] = None, double_step: bool = False, chunk: int = NOISE_CHUNK):
        self.rngs = [np.random.default_rng(seed) for seed in seeds]
        self.grid = grid
        self.dt = dt / 2 if double_step else dt
        self.components = components
        self.mask = mask
        self.double_step = double_step
        self.chunk = chunk
        self._buffer = None
        self._position = 0

    def _draw(self) -> np.ndarray:
        if self._buffer is None or self._position == self._buffer.shape[0]:
            draws = [sample_noise(rng, self.grid, self.dt, self.components, steps=self.chunk, mask=self.mask).w[:, 0]
                     for rng in self.rngs]
            self._buffer = np.stack(draws, axis=1)
            self._position = 0
        w = self._buffer[self._position]
        self._position += 1
        return w

    def __call__(self) -> np.ndarray:
        if self.double_step:
            return (self._draw() + self._draw()) / 2
        return self._draw()


class Stepper:
    """
    Midpoint stepper over fields of shape (trajectories, components, N_1, ..., N_d).

    Subclasses supply the propagation into and out of the midpoint and the derivative.
    """

    def __init__(self, problem: Problem, grid: Grid, dt: float, iterations: int = DEFAULT_ITERATIONS):
        self.problem = problem
        self.grid = grid
        self.dt = dt
        self.iterations = iterations
        self.mask = dirichlet_mask(problem.boundary, grid)
        self.x = grid.mesh()

    def derivative_terms(self, u: np.ndarray, t: float, w: Optional[np.ndarray]) -> np.ndarray:
        """g(u, t, x, du) plus the noise term when noise is present."""
        du = None
        if self.problem.needs_gradient:
            du = [first_derivative_fd(u, self.grid, i) for i in range(self.grid.d)]
        a = self.problem.drift(u, t, self.x, du)
        if w is not None and self.problem.noise is not None:
            a = a + self.problem.noise(u, t, self.x, w)
        return a

    def patch(self, t_values: float, t_ref: float, t: float) -> np.ndarray:
        return patch_field(self.problem.boundary, self.grid, self.problem.coefficients, t_values, t_ref, t)

    def propagate_in(self, u: np.ndarray, t: float) -> np.ndarray:
        return u

    def propagate_out(self, a: np.ndarray, t: float) -> np.ndarray:
        return a

    def deriv(self, a: np.ndarray, s: float, t: float, w: Optional[np.ndarray]) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, u: np.ndarray, t: float, w: Optional[np.ndarray] = None) -> np.ndarray:
        half = self.dt / 2
        am = self.propagate_in(u, t)
        at = am
        for _ in range(self.iterations):
            d1 = half * self.deriv(at, t + half, t, w)
            at = am + d1
        return self.propagate_out(at + d1, t)


class InteractionPictureStepper(Stepper):
    """FIP: the Laplacian is integrated exactly on the homogeneous part, g by the midpoint rule."""

    def __init__(self, problem: Problem, grid: Grid, dt: float, iterations: int = DEFAULT_ITERATIONS):
        super().__init__(problem, grid, dt, iterations)
        self.propagator = build_propagator(problem.coefficients, grid, dt / 2)

    def propagate(self, u: np.ndarray, t_values: float, t_ref: float, tau: Optional[float] = None) -> np.ndarray:
        """
        Propagate u over tau (half a step by default).

        The patch is built from boundary values at t_values and subtracted as evaluated at t_ref;
        the homogeneous remainder is propagated spectrally and the patch at t_ref + tau is added back.
        """
        propagator = self.propagator
        if tau is not None and tau != propagator.tau:
            propagator = build_propagator(self.problem.coefficients, self.grid, tau)
        h = u - self.patch(t_values, t_ref, t_ref)
        return propagate_field(h, self.grid, propagator) + self.patch(t_values, t_ref, t_ref + propagator.tau)

    def propagate_in(self, u: np.ndarray, t: float) -> np.ndarray:
        return self.propagate(u, t, t)

    def propagate_out(self, a: np.ndarray, t: float) -> np.ndarray:
        return self.propagate(a, t + self.dt, t + self.dt / 2)

    def deriv(self, a: np.ndarray, s: float, t: float, w: Optional[np.ndarray]) -> np.ndarray:
        return self.derivative_terms(a, s, w)


class SpectralDerivativeStepper(Stepper):
    """FSD: evolves v = u - P with the spectral Laplacian of v inside the midpoint derivative."""

    def __init__(self, problem: Problem, grid: Grid, dt: float, iterations: int = DEFAULT_ITERATIONS):
        super().__init__(problem, grid, dt, iterations)
        self.rate_step = BOUNDARY_RATE_FRACTION * dt

    def propagate_in(self, u: np.ndarray, t: float) -> np.ndarray:
        return u - self.patch(t, t, t)

    def propagate_out(self, a: np.ndarray, t: float) -> np.ndarray:
        return a + self.patch(t + self.dt, t, t + self.dt)

    def deriv(self, v: np.ndarray, s: float, t: float, w: Optional[np.ndarray]) -> np.ndarray:
        h = self.rate_step
        p = self.patch(s, t, s)
        p_rate = (self.patch(s + h, t, s + h) - self.patch(s - h, t, s - h)) / (2 * h)
        p_laplacian = patch_laplacian(self.problem.boundary, self.grid, self.problem.coefficients, s)
        forcing = self.derivative_terms(v + p, s, w) + p_laplacian - p_rate
        return np.where(self.mask, 0.0, forcing) + spectral_laplacian(v, self.grid, self.problem.coefficients)


class FiniteDifferenceStepper(Stepper):
    """FD: central differences for the Laplacian, Dirichlet ends follow their boundary values."""

    def __init__(self, problem: Problem, grid: Grid, dt: float, iterations: int = DEFAULT_ITERATIONS):
        super().__init__(problem, grid, dt, iterations)
        self.rate_step = BOUNDARY_RATE_FRACTION * dt

    def dirichlet_rates(self, t: float) -> np.ndarray:
        rates = np.zeros(self.grid.field_shape, dtype=complex)
        boundary = self.problem.boundary
        for c in range(boundary.components):
            for i in range(self.grid.d):
                for end, condition in zip((0, -1), boundary.ends(c, i)):
                    if condition.kind != BoundaryKind.DIRICHLET:
                        continue
                    index = [slice(None)] * self.grid.d
                    index[i] = end
                    rates[c][tuple(index)] = boundary_rate(condition, t, self.rate_step)
        return rates

    def propagate_out(self, a: np.ndarray, t: float) -> np.ndarray:
        t_next = t + self.dt
        return np.where(self.mask, self.patch(t_next, t_next, t_next), a)

    def deriv(self, u: np.ndarray, s: float, t: float, w: Optional[np.ndarray]) -> np.ndarray:
        laplacian = fd_laplacian(u, self.grid, self.problem.coefficients, self.problem.boundary, s)
        return np.where(self.mask, self.dirichlet_rates(s), self.derivative_terms(u, s, w) + laplacian)


STEPPER_CLASSES = dict(
    fip=InteractionPictureStepper,
    fsd=SpectralDerivativeStepper,
    fd=FiniteDifferenceStepper)


def divergence_limit(u0: np.ndarray) -> float:
    """Largest magnitude a field may reach before the run counts as diverged."""
    return DIVERGENCE_LIMIT * max(float(np.max(np.abs(u0))), 1.0)


def _diverged(u: np.ndarray, limit: float) -> bool:
    return not np.all(np.isfinite(u)) or np.max(np.abs(u)) > limit


def midpoint_step(
    u: np.ndarray,
    t: float,
    dt: float,
    problem: Problem,
    grid: Grid,
    config: MethodConfig,
    w: Optional[np.ndarray] = None,
    step: int = 1,
) -> np.ndarray:
    """
    Advance one field, or a (trajectories, ...) stack of fields, by one step.

    Raises:
        DivergenceError: When the new field is not finite or exceeds DIVERGENCE_LIMIT times the
            scale of the problem's initial field
    """
    u = np.asarray(u, dtype=complex)
    single = u.ndim == grid.d + 1
    if u.shape[u.ndim - grid.d - 1:] != grid.field_shape:
        raise ShapeMismatchError(f"Field shape {u.shape} does not match grid {grid.field_shape}")
    stepper = STEPPER_CLASSES[config.method.value](problem, grid, dt, config.iterations)
    limit = divergence_limit(problem.initial(grid))
    with np.errstate(all="ignore"):
        out = stepper(u[None] if single else u, t, w)
    if _diverged(out, limit):
        raise DivergenceError(step, t + dt)
    return out[0] if single else out


@dataclass
class _BatchResult:
    count: int
    observed: int
    field_sum: np.ndarray
    observable_sum: np.ndarray
    observable_square_sum: np.ndarray
    final: np.ndarray


def _integrate_batch(stepper: Stepper, u0: np.ndarray, time: TimeGrid, problem: Problem, grid: Grid,
                     count: int, noise: Optional[NoiseSource]) -> _BatchResult:
    n_obs = time.steps // time.observe_every + 1
    u = np.array(np.broadcast_to(u0, (count,) + u0.shape))
    limit = divergence_limit(u0)
    result = None

    def record(k: int, fields: np.ndarray) -> _BatchResult:
        nonlocal result
        values = observable_values(fields, problem, grid)
        if result is None:
            result = _BatchResult(
                count=count,
                observed=0,
                field_sum=np.zeros((n_obs,) + u0.shape, dtype=complex),
                observable_sum=np.zeros((n_obs,) + values.shape[1:], dtype=values.dtype),
                observable_square_sum=np.zeros((n_obs,) + values.shape[1:]),
                final=fields,
            )
        result.field_sum[k] = fields.sum(axis=0)
        result.observable_sum[k] = values.sum(axis=0)
        result.observable_square_sum[k] = (np.abs(values) ** 2).sum(axis=0)
        result.observed = k + 1
        result.final = fields
        return result

    record(0, u)
    times = time.times
    for step in range(1, time.steps + 1):
        w = noise() if noise is not None else None
        with np.errstate(all="ignore"):
            u = stepper(u, times[step - 1], w)
        if _diverged(u, limit):
            raise DivergenceError(step, times[step], result)
        if step % time.observe_every == 0:
            record(step // time.observe_every, u)
    return result


def _trajectory(results: List[_BatchResult], time: TimeGrid, single: bool, seconds: float,
                diverged_step: Optional[int] = None) -> Trajectory:
    n = sum(r.count for r in results)
    observed = min(r.observed for r in results)
    mean_fields = sum(r.field_sum[:observed] for r in results) / n
    mean = sum(r.observable_sum[:observed] for r in results) / n
    error = None
    if n > 1:
        square = sum(r.observable_square_sum[:observed] for r in results) / n
        error = sampling_error_from_moments(mean, square, n)
    final = results[0].final[0] if single else np.concatenate([r.final for r in results])
    return Trajectory(
        times=time.observation_times[:observed],
        fields=mean_fields,
        observables=mean,
        final=final,
        sampling_error=error,
        wall_seconds=seconds,
        trajectories=n,
        diverged_step=diverged_step,
    )


def run(problem: Problem, grid: Grid, config: MethodConfig, double_step: bool = False) -> Trajectory:
    """
    Integrate a problem over the configured time grid.

    Stochastic problems run config.ensemble_size trajectories in batches; trajectory r
    draws its noise from SeedSequence(rng_seed).spawn(n)[r]. Deterministic problems
    run one trajectory. final is the last field, stacked over trajectories when n > 1.

    Args:
        problem: Problem to integrate
        grid: Spatial lattice built for the problem's boundaries
        config: Method, time grid, iterations and ensemble settings
        double_step: Average pairs of half-step noise increments, for step-error estimates

    Raises:
        DivergenceError: With the trajectory observed up to the divergence as partial
    """
    time = config.time
    u0 = np.asarray(problem.initial(grid), dtype=complex)
    if u0.shape != grid.field_shape:
        raise ShapeMismatchError(f"Initial field shape {u0.shape} does not match grid {grid.field_shape}")
    stepper = STEPPER_CLASSES[config.method.value](problem, grid, time.dt, config.iterations)

    n = config.ensemble_size if problem.stochastic else 1
    if not problem.stochastic and config.ensemble_size > 1:
        logger.debug(f"{problem.name} is deterministic, integrating a single trajectory")
    seeds = np.random.SeedSequence(config.rng_seed).spawn(n) if problem.stochastic else []
    noise_mask = dirichlet_mask(problem.boundary, grid).any(axis=0)
    batches = [(start, min(start + ENSEMBLE_BATCH, n)) for start in range(0, n, ENSEMBLE_BATCH)]

    def integrate_batch(bounds) -> _BatchResult:
        start, stop = bounds
        noise = None
        if problem.stochastic:
            noise = NoiseSource(seeds[start:stop], grid, time.dt, problem.noise_components,
                                mask=noise_mask, double_step=double_step)
        logger.debug(f"Integrating trajectories {start}..{stop - 1}")
        return _integrate_batch(stepper, u0, time, problem, grid, stop - start, noise)

    logger.info(f"Integrating {problem.name} ({problem.boundary.label()}) with {config.method.value.upper()}: "
                f"{time.steps} steps of {time.dt:.6g}, {n} trajectories")
    started = perf_counter()
    try:
        with ThreadPoolExecutor(max_workers=max(1, config.threads)) as pool:
            results = list(pool.map(integrate_batch, batches))
    except DivergenceError as e:
        seconds = perf_counter() - started
        logger.warning(f"{problem.name} with {config.method.value.upper()} diverged at step {e.step} (t = {e.time:.6g})")
        partial = None
        if e.partial is not None:
            partial = _trajectory([e.partial], time, n == 1, seconds, diverged_step=e.step)
        raise DivergenceError(e.step, e.time, partial) from e
    seconds = perf_counter() - started

    trajectory = _trajectory(results, time, n == 1, seconds)
    logger.info(f"Finished {problem.name} in {seconds:.3f}s")
    return trajectory


def estimate_step_error(problem: Problem, grid: Grid, config: MethodConfig) -> float:
    """
    Largest change of the observable series when the time step is halved.

    The coarse run averages pairs of the fine run's noise increments, so both follow the same paths.
    """
    time = config.time
    fine_time = TimeGrid(time.t_start, time.t_end, time.steps * 2, time.observe_every * 2)
    coarse = run(problem, grid, config, double_step=True)
    fine = run(problem, grid, replace(config, time=fine_time))
    return step_error(coarse.observables, fine.observables)
