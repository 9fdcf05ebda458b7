"""Randomized property battery, eigenpair certificates and the oracle cross-check.

Every check records a margin that is nonnegative when the property holds, so
sub-tests can be merged and reported uniformly. Failures are reported, never
raised.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from orlicz_spectra.errors import OrliczSpectraError
from orlicz_spectra.operator import (
    AssembledProblem,
    grad_G,
    grad_Ms,
    modular_Ms,
    monotonicity_gap,
    potential_G,
    weak_residual,
)
from orlicz_spectra.orlicz import holder_pairing_check, lebesgue_measure, luxemburg_norm, modular
from orlicz_spectra.solver import Eigenpair, SolverConfig, normalize_to_manifold, solve_level
from orlicz_spectra.validation.oracle import dense_oracle_p2
from orlicz_spectra.validation.translation import lemma_b1_test, translation_test
from orlicz_spectra.young import YoungFunction, check_growth, complementary_identity_gap, conjugate, young_gap

logger = logging.getLogger(__name__)

MAX_DETAILS = 5
ROUNDING = 1e-10
GRADIENT_RTOL = 1e-5
MONOTONE_GRID = 2001


@dataclass
class SubtestResult:
    """Pass/fail tally of one property over a set of trials."""

    name: str
    anchor: str
    trials: int = 0
    failures: int = 0
    worst_margin: float = math.inf
    details: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def record(self, margin: float, detail: str | Callable[[], str] = "") -> None:
        """Count one trial; a negative or NaN margin is a failure."""
        self.trials += 1
        if not margin >= 0.0:
            self.failures += 1
            if len(self.details) < MAX_DETAILS:
                self.details.append(detail() if callable(detail) else detail)
        if math.isnan(margin) or margin < self.worst_margin:
            self.worst_margin = margin

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "trials": self.trials,
            "failures": self.failures,
            "worst_margin": self.worst_margin if math.isfinite(self.worst_margin) else None,
            "details": list(self.details),
        }


@dataclass
class BatteryReport:
    """Sub-test results in execution order."""

    seed: int
    subtests: list[SubtestResult] = field(default_factory=list)

    @property
    def total_trials(self) -> int:
        return sum(t.trials for t in self.subtests)

    @property
    def total_failures(self) -> int:
        return sum(t.failures for t in self.subtests)

    @property
    def ok(self) -> bool:
        return self.total_failures == 0

    def failed(self) -> list[SubtestResult]:
        return [t for t in self.subtests if not t.ok]

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "total_trials": self.total_trials,
            "total_failures": self.total_failures,
            "subtests": [t.to_dict() for t in self.subtests],
        }


def _random_state(prob: AssembledProblem, rng: np.random.Generator, radius: tuple[float, float]) -> np.ndarray:
    """Random coefficient vector with energy modular between the radius bounds' images."""
    u = normalize_to_manifold(prob, rng.standard_normal(prob.k))
    return u * rng.uniform(*radius)


def _young_checks(f: YoungFunction, dual: YoungFunction, trials: int, rng: np.random.Generator) -> list[SubtestResult]:
    gap = SubtestResult("young_inequality", "tau t <= M(t) + Mbar(tau)")
    t = rng.uniform(0.0, 100.0, trials)
    tau = rng.uniform(0.0, 100.0, trials)
    with np.errstate(over="ignore", invalid="ignore"):
        values = np.atleast_1d(young_gap(f, t, tau, dual))
        scale = 1.0 + f.primitive(t) + dual.primitive(tau) + t * tau
    for j in range(trials):
        gj = float(values[j])
        gap.record((gj + ROUNDING * scale[j]) / scale[j], lambda j=j, gj=gj: f"gap {gj:.3e} at t={t[j]:.6g}, tau={tau[j]:.6g}")

    equality = SubtestResult("young_equality", "equality in the Young inequality at tau = m(t)")
    t_eq = rng.uniform(0.0, 20.0, trials)
    m_eq = f.density(t_eq)
    with np.errstate(over="ignore", invalid="ignore"):
        eq_values = np.atleast_1d(young_gap(f, t_eq, m_eq, dual))
        identity = np.atleast_1d(complementary_identity_gap(f, t_eq, dual))
        scale_eq = 1.0 + f.primitive(t_eq) + m_eq * t_eq
    for j in range(trials):
        worst = max(abs(float(eq_values[j])), float(identity[j])) / scale_eq[j]
        equality.record(1e-6 - worst, lambda j=j: f"equality gap at t={t_eq[j]:.6g}")

    convexity = SubtestResult("convexity_bound", "m(t) t >= M(t)")
    for j in range(trials):
        mt = float(m_eq[j] * t_eq[j])
        convexity.record((mt - float(f.primitive(t_eq[j]))) / (1.0 + mt) + ROUNDING, lambda j=j: f"m(t)t < M(t) at t={t_eq[j]:.6g}")
    return [gap, equality, convexity]


def _density_monotonicity(f: YoungFunction, trials: int, rng: np.random.Generator) -> SubtestResult:
    result = SubtestResult("monotone_density", "(m(a) - m(b))(a - b) >= 0")
    grid = np.linspace(-50.0, 50.0, MONOTONE_GRID)
    with np.errstate(over="ignore", invalid="ignore"):
        m_grid = f.signed_density(grid)
    for j in range(grid.size - 1):
        rise = float(m_grid[j + 1] - m_grid[j])
        result.record(rise + ROUNDING * (1.0 + abs(float(m_grid[j]))), lambda j=j: f"m decreases between {grid[j]:.6g} and {grid[j + 1]:.6g}")
    a = rng.uniform(-50.0, 50.0, trials)
    b = rng.uniform(-50.0, 50.0, trials)
    with np.errstate(over="ignore", invalid="ignore"):
        products = (f.signed_density(a) - f.signed_density(b)) * (a - b)
    for j in range(trials):
        result.record(float(products[j]) + ROUNDING, lambda j=j: f"non-monotone pair a={a[j]:.6g}, b={b[j]:.6g}")
    return result


def _operator_monotonicity(prob: AssembledProblem, trials: int, rng: np.random.Generator) -> SubtestResult:
    result = SubtestResult("operator_monotonicity", "(grad_Ms(u) - grad_Ms(v)) . (u - v) >= 0")
    for _ in range(trials):
        u = _random_state(prob, rng, (0.25, 2.0))
        v = _random_state(prob, rng, (0.25, 2.0))
        scale = 1.0 + float(np.linalg.norm(grad_Ms(prob, u) - grad_Ms(prob, v)) * np.linalg.norm(u - v))
        gap = monotonicity_gap(prob, u, v)
        result.record(gap / scale + ROUNDING, f"monotonicity gap {gap:.3e}")
    return result


def _luxemburg_checks(
    prob: AssembledProblem, dual: YoungFunction, trials: int, rng: np.random.Generator
) -> list[SubtestResult]:
    f = prob.young
    mu = lebesgue_measure(prob.line_weights)
    norm_result = SubtestResult("luxemburg_norm", "homogeneity, triangle inequality and unit ball of the Luxemburg norm")
    pairing = SubtestResult("holder_pairing", "sum |u v| <= 2 |u|_M |v|_Mbar")
    for _ in range(trials):
        v = rng.standard_normal(len(mu)) * rng.uniform(0.1, 3.0)
        w = rng.standard_normal(len(mu)) * rng.uniform(0.1, 3.0)
        c = rng.uniform(-4.0, 4.0)
        nv = luxemburg_norm(f, v, mu)
        nw = luxemburg_norm(f, w, mu)
        homogeneity = 1e-8 * (1.0 + abs(c) * nv) - abs(luxemburg_norm(f, c * v, mu) - abs(c) * nv)
        triangle = (nv + nw) * (1.0 + 1e-8) - luxemburg_norm(f, v + w, mu)
        unit = 1.0 + 1e-8 - modular(f, v / nv, mu)
        margin = min(homogeneity, triangle, unit)
        norm_result.record(margin, f"norm properties fail (margin {margin:.3e}) at |v|={nv:.6g}")
        report = holder_pairing_check(f, v, w, mu, dual)
        pairing.record((report.rhs - report.lhs) / (1.0 + report.rhs) + ROUNDING, f"pairing {report.lhs:.6g} > {report.rhs:.6g}")
    return [norm_result, pairing]


def _gradient_checks(prob: AssembledProblem, trials: int, rng: np.random.Generator) -> SubtestResult:
    result = SubtestResult("gradient_consistency", "central differences of M_s and G match their gradients")
    for _ in range(trials):
        u = _random_state(prob, rng, (0.5, 1.5))
        e = rng.standard_normal(prob.k)
        e /= np.linalg.norm(e)
        eps = 1e-4 * float(np.linalg.norm(u))
        margins = []
        for value, grad in ((modular_Ms, grad_Ms), (potential_G, grad_G)):
            g = grad(prob, u)
            fd = (value(prob, u + eps * e) - value(prob, u - eps * e)) / (2.0 * eps)
            margins.append(GRADIENT_RTOL * (float(np.linalg.norm(g)) + 1e-12) - abs(fd - float(np.dot(g, e))))
        result.record(min(margins), f"finite differences disagree by {-min(margins):.3e} beyond tolerance")
    return result


def _conjugate_energy(prob: AssembledProblem, dual: YoungFunction, trials: int, rng: np.random.Generator) -> SubtestResult:
    result = SubtestResult("conjugate_energy", "sum w Mbar(m(D^s u)) <= grad_Ms(u) . u")
    for _ in range(trials):
        u = _random_state(prob, rng, (0.25, 2.0))
        z = prob.quotients @ u
        with np.errstate(over="ignore", invalid="ignore"):
            lhs = float(np.sum(prob.quad.weights * dual.primitive(prob.young.density(z))))
        rhs = float(np.dot(grad_Ms(prob, u), u))
        result.record((rhs - lhs) / (1.0 + abs(rhs)) + ROUNDING, f"conjugate energy {lhs:.6g} > {rhs:.6g}")
    return result


def _structure_checks(prob: AssembledProblem) -> list[SubtestResult]:
    invariants = SubtestResult("young_invariants", "m(0)=0, m nondecreasing and positive, M(t)/t ordered at 0 and infinity")
    violations = prob.young.invariant_violations()
    invariants.record(-1.0 if violations else 0.0, "; ".join(violations))
    growth = SubtestResult("growth_condition", "|g(t)| <= a1 + a2 m(a3 t), g odd, g(t) t > 0")
    report = check_growth(prob.growth, prob.young)
    margin = report.worst_margin if report.ok else min(-1.0, report.worst_margin)
    growth.record(margin / (1.0 + abs(margin)) if math.isfinite(margin) else margin, "; ".join(report.violations))
    return [invariants, growth]


def property_battery(prob: AssembledProblem, trials: int, seed: int) -> BatteryReport:
    """Run the randomized property sweeps on an assembled problem.

    Args:
        prob: Assembled problem whose Young function, growth and operator are checked
        trials: Random trials per sub-test; 0 yields an empty report
        seed: Seed of every random stream, so reports are reproducible

    Returns:
        BatteryReport with one entry per sub-test
    """
    report = BatteryReport(seed=seed)
    if trials <= 0:
        return report
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(7)]
    f = prob.young
    dual = conjugate(f)
    report.subtests.extend(_structure_checks(prob))
    report.subtests.extend(_young_checks(f, dual, trials, streams[0]))
    report.subtests.append(_density_monotonicity(f, trials, streams[1]))
    report.subtests.append(_operator_monotonicity(prob, trials, streams[2]))
    report.subtests.extend(_luxemburg_checks(prob, dual, trials, streams[3]))
    report.subtests.append(_gradient_checks(prob, min(trials, 100), streams[4]))
    report.subtests.append(_conjugate_energy(prob, dual, trials, streams[5]))
    logger.info(f"Property battery: {report.total_trials} trials, {report.total_failures} failures")
    return report


def translation_battery(prob: AssembledProblem, trials: int, seed: int) -> list[SubtestResult]:
    """Random (u, h) sweeps of both translation estimates on the problem's basis."""
    norm_result = SubtestResult("translation_norm", "|u(. + h) - u|_M <= 2^(s+1) A |h|^s |D^s u|_(M, nu)")
    modular_result = SubtestResult("translation_modular", "integral of M(|u(. + h) - u|) <= (4 / |S^0|) pair integral of M(2^(s+1) |h|^s D^s u)")
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(8)[7])
    for _ in range(trials):
        u = _random_state(prob, rng, (0.25, 2.0))
        h = float(rng.uniform(-0.49, 0.49))
        norm_report = translation_test(prob.basis, prob.young, u, h, prob.quad)
        slack = norm_report.rhs * 1e-3
        norm_result.record(
            (norm_report.rhs + slack - norm_report.lhs) / (1.0 + norm_report.rhs),
            f"h={h:.6g}: {norm_report.lhs:.6g} > {norm_report.rhs:.6g}",
        )
        modular_report = lemma_b1_test(prob.basis, prob.young, u, h, prob.quad)
        rhs = modular_report.rhs
        margin = 1.0 if math.isinf(rhs) else (rhs * (1.0 + 1e-3) - modular_report.lhs) / (1.0 + rhs)
        modular_result.record(margin, f"h={h:.6g}: {modular_report.lhs:.6g} > {rhs:.6g}")
    logger.info(f"Translation estimates: {2 * trials} trials, {norm_result.failures + modular_result.failures} failures")
    return [norm_result, modular_result]


def oracle_cross_check(prob: AssembledProblem, levels: int, cfg: SolverConfig) -> SubtestResult:
    """Compare solver eigenvalues with the dense linear oracle for levels 1..levels."""
    result = SubtestResult("oracle_agreement", "solver eigenvalues match the dense generalized eigensolver")
    count = min(levels, prob.k)
    if count < 1:
        return result
    oracle = dense_oracle_p2(prob, count)
    for i in range(1, count + 1):
        tol = 1e-6 if i == 1 else 1e-4
        expected = float(oracle.eigenvalues[i - 1])
        try:
            pair = solve_level(prob, i, cfg)
        except OrliczSpectraError as exc:
            result.record(-1.0, f"level {i}: {exc}")
            continue
        error = abs(pair.eigenvalue - expected) / expected
        result.record(1.0 - error / tol, f"level {i}: lambda {pair.eigenvalue:.12g} vs oracle {expected:.12g}")
    return result


@dataclass
class CertificateReport:
    """Discrete stationarity conclusions for one eigenpair."""

    modular_gap: float
    residual: float
    c_matches: bool
    positive: bool
    lower_bound: float
    manifold_tol: float
    kkt_tol: float

    @property
    def on_manifold(self) -> bool:
        return self.modular_gap <= self.manifold_tol

    @property
    def stationary(self) -> bool:
        return self.residual <= self.kkt_tol

    @property
    def ok(self) -> bool:
        return self.on_manifold and self.stationary and self.c_matches and self.positive and self.lower_bound >= 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "modular_gap": self.modular_gap,
            "residual": self.residual,
            "c_matches": self.c_matches,
            "positive": self.positive,
            "lower_bound_margin": self.lower_bound,
            "ok": self.ok,
        }


def eigenpair_certificate(
    prob: AssembledProblem,
    pair: Eigenpair,
    kkt_tol: float = 1e-8,
    manifold_tol: float = 1e-8,
) -> CertificateReport:
    """Recheck an eigenpair independently of the solver.

    Since m(t) t >= M(t), the multiplier satisfies lambda >= M_s(u) / (grad_G(u) . u);
    ``lower_bound`` is the relative margin of that bound.
    """
    u = pair.u
    mod = modular_Ms(prob, u)
    denominator = float(np.dot(grad_G(prob, u), u))
    bound = mod / denominator if denominator > 0.0 else math.inf
    return CertificateReport(
        modular_gap=abs(mod - 1.0),
        residual=weak_residual(prob, pair.eigenvalue, u),
        c_matches=pair.c_value == potential_G(prob, u),
        positive=pair.eigenvalue > 0.0,
        lower_bound=(pair.eigenvalue - bound) / abs(pair.eigenvalue) + 1e-12,
        manifold_tol=manifold_tol,
        kkt_tol=kkt_tol,
    )


def poincare_ratio(prob: AssembledProblem, samples: int = 64, seed: int = 0) -> float:
    """Largest sampled |u|_(M, dx) / |D^s u|_(M, nu) over random coefficient vectors."""
    rng = np.random.default_rng(seed)
    mu = lebesgue_measure(prob.line_weights)
    worst = 0.0
    for _ in range(samples):
        u = rng.standard_normal(prob.k)
        numerator = luxemburg_norm(prob.young, prob.line_values @ u, mu)
        denominator = luxemburg_norm(prob.young, prob.quotients @ u, prob.quad.measure)
        worst = max(worst, numerator / denominator)
    return worst

