"""Minimax eigensolver on the constraint manifold {u in V_k : M_s(u) = 1}.

Level 1 is the maximum of G on the manifold. Higher levels are approximated
from below by maximizing, over i-dimensional subspaces W, the infimum of G on
the unit sphere of W. Every candidate is polished by a damped Newton solve of
the stationarity system before it is returned.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from scipy import linalg, special
from scipy.stats import qmc

from orlicz_spectra.errors import ConvergenceError, InputError, LevelError, OrliczSpectraError
from orlicz_spectra.mesh import CoefficientVector
from orlicz_spectra.operator import (
    AssembledProblem,
    grad_G,
    grad_Ms,
    modular_Ms,
    potential_G,
    rayleigh_lambda,
    weak_residual,
)
from orlicz_spectra.young import YoungFunction, YoungKind

logger = logging.getLogger(__name__)

TIE_TOL = 1e-10
SCALE_TOL = 1e-13
SPHERE_CHUNK = 16
LINE_SEARCH_HALVINGS = 10


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances, iteration limits and seeding of the eigensolver."""

    kkt_tol: float = 1e-8
    max_iter: int = 500
    restarts: int = 8
    rng_seed: int = 0
    sphere_samples: int | None = None
    newton_max_iter: int = 50
    fd_step: float = 1e-6
    armijo: float = 1e-4
    backtrack: float = 0.5
    min_step: float = 1e-12
    handoff_tol: float = 1e-6
    outer_iter: int = 50
    inner_iter: int = 100
    manifold_tol: float = 1e-8

    def __post_init__(self) -> None:
        for name in ("kkt_tol", "fd_step", "min_step", "handoff_tol", "manifold_tol"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise InputError(f"solver.{name} must be a positive number, got {value}")
        for name in ("max_iter", "restarts", "newton_max_iter", "outer_iter", "inner_iter"):
            if getattr(self, name) < 1:
                raise InputError(f"solver.{name} must be at least 1, got {getattr(self, name)}")
        if self.sphere_samples is not None and self.sphere_samples < 1:
            raise InputError(f"solver.sphere_samples must be at least 1, got {self.sphere_samples}")
        if not 0.0 < self.armijo < 1.0:
            raise InputError(f"solver.armijo must lie in (0, 1), got {self.armijo}")
        if not 0.0 < self.backtrack < 1.0:
            raise InputError(f"solver.backtrack must lie in (0, 1), got {self.backtrack}")

    def samples_for(self, level: int) -> int:
        """Number of sphere directions used at a level, 64 i unless configured."""
        return self.sphere_samples if self.sphere_samples is not None else 64 * level


@dataclass(frozen=True, eq=False)
class Eigenpair:
    """A converged stationary point on the constraint manifold.

    ``c_value`` is G(u) of the refined u. ``minimax_value`` is the attained
    max-min of G over the candidate subspace spheres, which bounds the true
    critical level from below.
    """

    eigenvalue: float
    u: np.ndarray
    level: int
    dim: int
    c_value: float
    residual: float
    iterations: int
    modular: float
    minimax_value: float | None = None
    frame: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "i": self.level,
            "k": self.dim,
            "lambda": self.eigenvalue,
            "c_value": self.c_value,
            "residual": self.residual,
            "iterations": self.iterations,
            "modular": self.modular,
            "minimax_value": self.minimax_value,
            "coefficients": [float(c) for c in self.u],
        }


def _unit_scales(young: YoungFunction, weights: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Per column j, the sigma > 0 with sum_n w_n M(sigma values[n, j]) = 1.

    Safeguarded Newton on log(sigma) inside a bisection bracket; the modular
    is strictly increasing in sigma for nonzero columns.
    """
    magnitudes = np.abs(values)
    if young.kind == YoungKind.POWER:
        # M is p-homogeneous
        with np.errstate(divide="ignore"):
            return np.sum(weights[:, None] * young.primitive(magnitudes), axis=0) ** (-1.0 / young.p)
    count = magnitudes.shape[1]
    lo = np.zeros(count)
    hi = np.full(count, np.inf)
    sigma = np.ones(count)
    w = weights[:, None]
    for _ in range(200):
        with np.errstate(over="ignore", invalid="ignore"):
            t = magnitudes * sigma
            level = np.sum(w * young.primitive(t), axis=0)
            slope = np.sum(w * young.density(t) * t, axis=0)
        excess = level - 1.0
        done = np.abs(excess) <= SCALE_TOL
        above = ~(excess <= 0.0)
        hi = np.where(above, np.minimum(hi, sigma), hi)
        lo = np.where(above, lo, np.maximum(lo, sigma))
        collapsed = np.isfinite(hi) & (hi - lo <= 4.0 * np.finfo(float).eps * hi)
        if np.all(done | collapsed):
            break
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            newton = sigma * np.exp(-level * np.log(level) / slope)
            bisect = np.where(np.isfinite(hi), np.where(lo > 0.0, np.sqrt(lo * hi), 0.5 * hi), 2.0 * sigma)
        inside = np.isfinite(newton) & (newton > lo) & (newton < hi)
        sigma = np.where(done | collapsed, sigma, np.where(inside, newton, bisect))
    return sigma


def normalize_to_manifold(prob: AssembledProblem, u: CoefficientVector) -> CoefficientVector:
    """Scale u onto {M_s = 1}.

    Raises:
        InputError: If u is the zero vector
    """
    c = prob.coefficients(u)
    if not np.any(c):
        raise InputError("cannot normalize the zero vector onto the constraint manifold")
    z = np.asarray(prob.quotients @ c)
    sigma = _unit_scales(prob.young, prob.quad.weights, z[:, None])[0]
    return sigma * c


def _sign_normalize(u: np.ndarray) -> np.ndarray:
    """Pick the representative of {u, -u} with nonnegative mean."""
    total = math.fsum(u)
    if abs(total) > 1e-12 * float(np.sum(np.abs(u))):
        return u if total > 0.0 else -u
    significant = np.flatnonzero(np.abs(u) > 1e-12 * float(np.max(np.abs(u))))
    return u if u[significant[0]] > 0.0 else -u


def _select(pairs: Sequence[Eigenpair], value: Any) -> Eigenpair:
    """Largest value wins; near ties go to the smallest eigenvalue, then the smallest u."""
    best = max(value(p) for p in pairs)
    tied = [p for p in pairs if value(p) >= best - TIE_TOL]
    return min(tied, key=lambda p: (p.eigenvalue, tuple(p.u)))


def _tangent_direction(prob: AssembledProblem, g_m: np.ndarray, g_g: np.ndarray) -> np.ndarray:
    """Preconditioned ascent direction for G, tangent to {M_s = 1}."""
    pg = prob.precondition(g_g)
    pm = prob.precondition(g_m)
    return pg - (np.dot(g_m, pg) / np.dot(g_m, pm)) * pm


def _ascend(prob: AssembledProblem, u0: np.ndarray, cfg: SolverConfig) -> tuple[np.ndarray, int]:
    """Projected Armijo ascent of G until the residual reaches the Newton hand-off."""
    u = normalize_to_manifold(prob, u0)
    value = potential_G(prob, u)
    step: float | None = None
    for iteration in range(1, cfg.max_iter + 1):
        g_m = grad_Ms(prob, u)
        g_g = grad_G(prob, u)
        lam = float(np.dot(g_m, u) / np.dot(g_g, u))
        residual = float(np.max(np.abs(g_m - lam * g_g) / (1.0 + np.abs(g_m))))
        if residual <= cfg.handoff_tol:
            return u, iteration
        d = _tangent_direction(prob, g_m, g_g)
        slope = float(np.dot(g_g, d))
        if not slope > 0.0:
            return u, iteration
        t = step if step is not None else abs(lam)
        while t >= cfg.min_step:
            candidate = normalize_to_manifold(prob, u + t * d)
            candidate_value = potential_G(prob, candidate)
            if candidate_value >= value + cfg.armijo * t * slope:
                break
            t *= cfg.backtrack
        else:
            logger.debug(f"Ascent stalled after {iteration} iterations at residual {residual:.3e}")
            return u, iteration
        gain = candidate_value - value
        u, value = candidate, candidate_value
        step = 2.0 * t
        if gain <= 1e-15 * abs(value):
            return u, iteration
    return u, cfg.max_iter


def _stationarity(prob: AssembledProblem, u: np.ndarray, lam: float) -> np.ndarray:
    return grad_Ms(prob, u) - lam * grad_G(prob, u)


def _newton_step(prob: AssembledProblem, u: np.ndarray, lam: float, cfg: SolverConfig) -> np.ndarray | None:
    """Solve the bordered system for (du, dlam) with a central-difference Jacobian."""
    k = u.size
    hessian = np.empty((k, k))
    for j in range(k):
        h = cfg.fd_step * (1.0 + abs(u[j]))
        e = np.zeros(k)
        e[j] = h
        hessian[:, j] = (_stationarity(prob, u + e, lam) - _stationarity(prob, u - e, lam)) / (2.0 * h)
    g_m = grad_Ms(prob, u)
    g_g = grad_G(prob, u)
    jacobian = np.zeros((k + 1, k + 1))
    jacobian[:k, :k] = hessian
    jacobian[:k, k] = -g_g
    jacobian[k, :k] = g_m
    rhs = -np.concatenate([g_m - lam * g_g, [modular_Ms(prob, u) - 1.0]])
    try:
        delta = linalg.solve(jacobian, rhs)
    except (linalg.LinAlgError, ValueError):
        delta = linalg.lstsq(jacobian, rhs)[0]
    if not np.all(np.isfinite(delta)):
        return None
    return np.asarray(delta[:k])


def kkt_refine(
    prob: AssembledProblem,
    u0: CoefficientVector,
    cfg: SolverConfig,
    level: int = 1,
) -> Eigenpair:
    """Solve grad_Ms(u) = lam grad_G(u) with M_s(u) = 1 by damped Newton.

    Each trial point is retracted onto the manifold and paired with its
    Rayleigh multiplier. When no damped Newton step lowers the residual a
    preconditioned residual step is taken instead.

    Raises:
        InputError: If u0 is zero
        ConvergenceError: If the tolerances are not met within newton_max_iter steps
    """
    u = normalize_to_manifold(prob, u0)
    lam = rayleigh_lambda(prob, u)
    residual = weak_residual(prob, lam, u)
    best = (residual, u, lam)
    iterations = 0
    while True:
        modular_gap = abs(modular_Ms(prob, u) - 1.0)
        if residual <= cfg.kkt_tol and modular_gap <= cfg.manifold_tol:
            break
        if iterations >= cfg.newton_max_iter:
            res, u_best, lam_best = best
            raise ConvergenceError(
                f"KKT refinement stalled at residual {res:.3e} after {iterations} iterations (level {level}, k={prob.k})",
                best=_pair(prob, u_best, lam_best, res, iterations, level),
                diagnostics={"level": level, "dim": prob.k, "residual": res, "iterations": iterations},
            )
        iterations += 1
        accepted = False
        du = _newton_step(prob, u, lam, cfg)
        if du is not None:
            alpha = 1.0
            for _ in range(LINE_SEARCH_HALVINGS + 1):
                trial = u + alpha * du
                if np.any(trial):
                    candidate = normalize_to_manifold(prob, trial)
                    candidate_lam = rayleigh_lambda(prob, candidate)
                    candidate_res = weak_residual(prob, candidate_lam, candidate)
                    if candidate_res < residual:
                        u, lam, residual = candidate, candidate_lam, candidate_res
                        accepted = True
                        break
                alpha *= 0.5
        if not accepted:
            fallback = u - prob.precondition(_stationarity(prob, u, lam))
            if not np.any(fallback):
                fallback = u
            u = normalize_to_manifold(prob, fallback)
            lam = rayleigh_lambda(prob, u)
            residual = weak_residual(prob, lam, u)
            logger.debug(f"Newton step rejected at level {level}; residual step to {residual:.3e}")
        if residual < best[0]:
            best = (residual, u, lam)
    if not lam > 0.0:
        raise ConvergenceError(
            f"stationary point with non-positive multiplier {lam:.6g} (level {level}, k={prob.k})",
            diagnostics={"level": level, "dim": prob.k, "lambda": lam},
        )
    return _pair(prob, _sign_normalize(u), lam, residual, iterations, level)


def _pair(prob: AssembledProblem, u: np.ndarray, lam: float, residual: float, iterations: int, level: int) -> Eigenpair:
    return Eigenpair(
        eigenvalue=float(lam),
        u=u,
        level=level,
        dim=prob.k,
        c_value=potential_G(prob, u),
        residual=float(residual),
        iterations=iterations,
        modular=modular_Ms(prob, u),
    )


def _random_starts(prob: AssembledProblem, cfg: SolverConfig, first: np.ndarray) -> list[np.ndarray]:
    rng = np.random.default_rng(cfg.rng_seed)
    return [first] + [rng.standard_normal(prob.k) for _ in range(cfg.restarts - 1)]


def _best_failure(failures: Sequence[ConvergenceError]) -> Eigenpair | None:
    bests = [exc.best for exc in failures if exc.best is not None]
    return min(bests, key=lambda p: p.residual) if bests else None


def _warm_refine(prob: AssembledProblem, u0: np.ndarray, cfg: SolverConfig) -> Eigenpair | None:
    try:
        return kkt_refine(prob, u0, replace(cfg, newton_max_iter=1), level=1)
    except (ConvergenceError, InputError):
        return None


def solve_first(
    prob: AssembledProblem,
    cfg: SolverConfig,
    initial: CoefficientVector | None = None,
) -> Eigenpair:
    """First eigenpair: the maximum of G on the constraint manifold.

    Restart 0 starts from ``initial`` or from the first linear surrogate mode;
    the remaining restarts start from seeded Gaussian directions. An ``initial``
    vector that refines within one Newton step is returned as is.
    """
    if initial is not None:
        warm = _warm_refine(prob, prob.coefficients(initial), cfg)
        if warm is not None:
            return replace(warm, minimax_value=warm.c_value, frame=warm.u[:, None])
    first = prob.coefficients(initial) if initial is not None else prob.surrogate_modes[1][:, 0]
    starts = _random_starts(prob, cfg, first)
    if initial is None and prob.is_linear:
        # the surrogate mode is exact for the (A, B) pencil
        starts = starts[:1]
    logger.info(f"Solving level 1 at k={prob.k} with {len(starts)} restarts")
    pairs: list[Eigenpair] = []
    failures: list[ConvergenceError] = []
    for restart, u0 in enumerate(starts):
        try:
            u, ascent_iterations = _ascend(prob, u0, cfg)
            pair = kkt_refine(prob, u, cfg, level=1)
        except ConvergenceError as exc:
            logger.warning(f"Restart {restart} did not converge: {exc}")
            failures.append(exc)
            continue
        logger.debug(f"Restart {restart}: lambda={pair.eigenvalue:.12g}, c={pair.c_value:.12g}")
        pairs.append(replace(pair, iterations=pair.iterations + ascent_iterations))
    if not pairs:
        raise ConvergenceError(
            f"no restart converged for level 1 at k={prob.k}",
            best=_best_failure(failures),
            diagnostics={"level": 1, "dim": prob.k, "restarts": cfg.restarts},
        )
    best = _select(pairs, lambda p: p.c_value)
    logger.info(f"Level 1 at k={prob.k}: lambda={best.eigenvalue:.10g}, residual={best.residual:.2e}")
    return replace(best, minimax_value=best.c_value, frame=best.u[:, None])


def _sphere_directions(dim: int, count: int, seed: int) -> np.ndarray:
    """Quasi-uniform unit directions in R^dim, one per antipodal pair, as columns."""
    if dim == 1:
        return np.ones((1, 1))
    sampler = qmc.Sobol(d=dim, scramble=True, seed=seed)
    points = sampler.random_base2(m=max(1, math.ceil(math.log2(count))))[:count]
    normal = special.ndtri(np.clip(points, 1e-12, 1.0 - 1e-12))
    normal /= np.linalg.norm(normal, axis=1, keepdims=True)
    normal[normal[:, 0] < 0.0] *= -1.0
    return np.ascontiguousarray(normal.T)


@dataclass
class _SubspaceState:
    """A frame Q with its quotient and line images, and the current inner minimizer."""

    frame: np.ndarray
    quotients: np.ndarray
    line_values: np.ndarray
    coords: np.ndarray
    value: float


def _subspace(prob: AssembledProblem, frame: np.ndarray) -> _SubspaceState:
    q, _ = linalg.qr(frame, mode="economic")
    return _SubspaceState(
        frame=q,
        quotients=np.asarray(prob.quotients @ q),
        line_values=np.asarray(prob.line_values @ q),
        coords=np.zeros(q.shape[1]),
        value=math.inf,
    )


def _sample_sphere(prob: AssembledProblem, state: _SubspaceState, directions: np.ndarray) -> None:
    """Set the state's minimizer to the best sampled direction."""
    best_value = math.inf
    best_coords = state.coords
    for start in range(0, directions.shape[1], SPHERE_CHUNK):
        chunk = directions[:, start : start + SPHERE_CHUNK]
        sigma = _unit_scales(prob.young, prob.quad.weights, state.quotients @ chunk)
        coords = chunk * sigma
        values = np.sum(prob.line_weights[:, None] * prob.growth.G(state.line_values @ coords), axis=0)
        j = int(np.argmin(values))
        if values[j] < best_value:
            best_value = float(values[j])
            best_coords = coords[:, j]
    state.coords = best_coords
    state.value = best_value


def _sphere_value(prob: AssembledProblem, state: _SubspaceState, coords: np.ndarray) -> tuple[np.ndarray, float]:
    sigma = _unit_scales(prob.young, prob.quad.weights, (state.quotients @ coords)[:, None])[0]
    scaled = sigma * coords
    return scaled, potential_G(prob, state.frame @ scaled)


def _descend_sphere(prob: AssembledProblem, state: _SubspaceState, cfg: SolverConfig) -> None:
    """Local Armijo descent of G on the unit sphere of span(frame)."""
    q = state.frame
    coords, value = _sphere_value(prob, state, state.coords)
    step: float | None = None
    for _ in range(cfg.inner_iter):
        u = q @ coords
        g_g = q.T @ grad_G(prob, u)
        g_m = q.T @ grad_Ms(prob, u)
        d = -(g_g - (np.dot(g_m, g_g) / np.dot(g_m, g_m)) * g_m)
        slope = float(np.dot(g_g, d))
        d_norm = float(np.linalg.norm(d))
        if d_norm <= 1e-12 * float(np.linalg.norm(g_g)) or not slope < 0.0:
            break
        t = step if step is not None else float(np.linalg.norm(coords)) / d_norm
        while t >= cfg.min_step:
            candidate, candidate_value = _sphere_value(prob, state, coords + t * d)
            if candidate_value <= value + cfg.armijo * t * slope:
                break
            t *= cfg.backtrack
        else:
            break
        gain = value - candidate_value
        coords, value = candidate, candidate_value
        step = 2.0 * t
        if gain <= 1e-15 * abs(value):
            break
    state.coords = coords
    state.value = value


def _maximin(
    prob: AssembledProblem,
    frame: np.ndarray,
    directions: np.ndarray,
    cfg: SolverConfig,
) -> tuple[_SubspaceState, int]:
    """Maximize over frames the infimum of G on the unit sphere of their span.

    The outer move tilts the frame so that the inner minimizer u* moves along
    the tangent ascent direction d, Q <- Q + t d a*^T / |a*|^2, and keeps the
    tilt when the warm-started inner minimum increases.
    """
    state = _subspace(prob, frame)
    _sample_sphere(prob, state, directions)
    _descend_sphere(prob, state, cfg)
    step: float | None = None
    outer = 0
    for outer in range(1, cfg.outer_iter + 1):
        u = state.frame @ state.coords
        g_m = grad_Ms(prob, u)
        g_g = grad_G(prob, u)
        d = _tangent_direction(prob, g_m, g_g)
        if not np.dot(g_g, d) > 1e-14 * abs(np.dot(g_g, u)):
            break
        a = state.coords
        t = step if step is not None else rayleigh_lambda(prob, u)
        improved = False
        while t >= cfg.min_step:
            trial = _subspace(prob, state.frame + t * np.outer(d, a) / np.dot(a, a))
            trial.coords = trial.frame.T @ (u + t * d)
            _descend_sphere(prob, trial, cfg)
            if trial.value > state.value:
                improved = True
                break
            t *= cfg.backtrack
        if not improved:
            break
        gain = trial.value - state.value
        state = trial
        step = 2.0 * t
        if gain <= 1e-15 * abs(state.value):
            break
    # The warm inner minimizer may be local; resample the final sphere.
    final = replace(state)
    _sample_sphere(prob, final, directions)
    _descend_sphere(prob, final, cfg)
    return (state if final.value > state.value else final), outer


def solve_level(
    prob: AssembledProblem,
    i: int,
    cfg: SolverConfig,
    initial_frame: np.ndarray | None = None,
) -> Eigenpair:
    """Eigenpair at minimax level i over spheres of i-dimensional subspaces.

    Raises:
        InputError: If i < 1
        LevelError: If i exceeds the Galerkin dimension
        ConvergenceError: If no restart yields a refined stationary point
    """
    if i < 1:
        raise InputError(f"level must be at least 1, got {i}")
    if i > prob.k:
        raise LevelError(i, prob.k)
    if i == 1:
        initial = initial_frame[:, 0] if initial_frame is not None else None
        return solve_first(prob, cfg, initial)

    rng = np.random.default_rng(cfg.rng_seed)
    first = initial_frame if initial_frame is not None else prob.surrogate_modes[1][:, :i]
    frames = [np.asarray(first, dtype=float)] + [rng.standard_normal((prob.k, i)) for _ in range(cfg.restarts - 1)]
    if initial_frame is None and prob.is_linear:
        # the surrogate frame spans the first i modes of the (A, B) pencil
        frames = frames[:1]
    directions = _sphere_directions(i, cfg.samples_for(i), cfg.rng_seed)
    logger.info(f"Solving level {i} at k={prob.k}: {len(frames)} frames, {directions.shape[1]} sphere directions")

    pairs: list[Eigenpair] = []
    failures: list[ConvergenceError] = []
    incumbent = -math.inf
    for restart, frame in enumerate(frames):
        state, outer = _maximin(prob, frame, directions, cfg)
        if state.value < incumbent - TIE_TOL:
            logger.debug(f"Frame {restart}: max-min={state.value:.12g} below the incumbent, not refined")
            continue
        try:
            pair = kkt_refine(prob, state.frame @ state.coords, cfg, level=i)
        except ConvergenceError as exc:
            logger.warning(f"Frame {restart} did not converge: {exc}")
            failures.append(exc)
            continue
        logger.debug(f"Frame {restart}: max-min={state.value:.12g}, lambda={pair.eigenvalue:.12g}")
        pairs.append(replace(pair, minimax_value=state.value, frame=state.frame, iterations=pair.iterations + outer))
        incumbent = max(incumbent, state.value)
    if not pairs:
        raise ConvergenceError(
            f"no frame converged for level {i} at k={prob.k}",
            best=_best_failure(failures),
            diagnostics={"level": i, "dim": prob.k, "restarts": cfg.restarts},
        )
    best = _select(pairs, lambda p: p.minimax_value)
    logger.info(f"Level {i} at k={prob.k}: lambda={best.eigenvalue:.10g}, max-min={best.minimax_value:.10g}")
    return best


@dataclass
class ContinuationResult:
    """Per-k outcome of a continuation run; failed points carry an error message."""

    dims: list[int]
    pairs: list[Eigenpair | None]
    errors: list[str | None]

    @property
    def c_values(self) -> list[float]:
        return [p.c_value if p is not None else math.nan for p in self.pairs]

    @property
    def eigenvalues(self) -> list[float]:
        return [p.eigenvalue if p is not None else math.nan for p in self.pairs]

    def c_nondecreasing(self, slack: float = 1e-6) -> bool:
        """True when c over the converged points never drops by more than slack."""
        values = [p.c_value for p in self.pairs if p is not None]
        return all(b >= a - slack for a, b in zip(values, values[1:], strict=False))


def _check_nested(problems: Sequence[AssembledProblem]) -> None:
    for coarse, fine in zip(problems, problems[1:], strict=False):
        a, b = coarse.mesh, fine.mesh
        if (a.a, a.b, a.s) != (b.a, b.b, b.s) or b.k not in (a.k, 2 * a.k + 1):
            raise InputError(f"meshes k={a.k} and k={b.k} are not nested refinements")


def continuation(problems: Sequence[AssembledProblem], i: int, cfg: SolverConfig) -> ContinuationResult:
    """Solve level i on nested spaces, warm-starting each from the previous solution."""
    if not problems:
        raise InputError("continuation needs at least one problem")
    _check_nested(problems)
    result = ContinuationResult(dims=[], pairs=[], errors=[])
    previous: Eigenpair | None = None
    previous_prob: AssembledProblem | None = None
    for prob in problems:
        warm = None
        if previous is not None and previous.frame is not None and previous_prob is not None:
            warm = previous_prob.basis.embedding(prob.basis) @ previous.frame
        try:
            pair = solve_level(prob, i, cfg, initial_frame=warm)
        except OrliczSpectraError as exc:
            logger.warning(f"Continuation point k={prob.k} failed: {exc}")
            result.dims.append(prob.k)
            result.pairs.append(None)
            result.errors.append(str(exc))
            continue
        logger.info(f"Continuation k={prob.k}: c={pair.c_value:.10g}, lambda={pair.eigenvalue:.10g}")
        result.dims.append(prob.k)
        result.pairs.append(pair)
        result.errors.append(None)
        previous, previous_prob = pair, prob
    return result
