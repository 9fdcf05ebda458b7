"""Task orchestration: solve, sweep and validate runs from a RunConfig."""

import itertools
import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

from orlicz_spectra.config import RunConfig
from orlicz_spectra.errors import ConfigError, ConvergenceError, LevelError, OrliczSpectraError
from orlicz_spectra.mesh import build_mesh
from orlicz_spectra.operator import AssembledProblem, assemble_problem
from orlicz_spectra.solver import Eigenpair, continuation, solve_level
from orlicz_spectra.validation.battery import (
    BatteryReport,
    CertificateReport,
    eigenpair_certificate,
    oracle_cross_check,
    poincare_ratio,
    property_battery,
    translation_battery,
)
from orlicz_spectra.young import YoungKind

logger = logging.getLogger(__name__)

MONOTONE_SLACK = 1e-6


def _error_kind(exc: OrliczSpectraError) -> str:
    if isinstance(exc, LevelError):
        return "level"
    if isinstance(exc, ConvergenceError):
        return "convergence"
    return "input"


@dataclass
class LevelOutcome:
    """Result of one requested level: a certified eigenpair or an error record."""

    level: int
    dim: int
    pair: Eigenpair | None = None
    certificate: CertificateReport | None = None
    error: str | None = None
    error_kind: str | None = None

    @property
    def ok(self) -> bool:
        return self.pair is not None

    def to_dict(self) -> dict[str, Any]:
        if self.pair is None:
            return {"i": self.level, "k": self.dim, "error": self.error, "error_kind": self.error_kind}
        data = self.pair.to_dict()
        if self.certificate is not None:
            data["certificate"] = self.certificate.to_dict()
        return data


@dataclass
class SolveResult:
    config: RunConfig
    outcomes: list[LevelOutcome] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(o.ok for o in self.outcomes)


@dataclass
class SweepRow:
    k: int
    s: float
    level: int
    pair: Eigenpair | None
    error: str | None = None

    def values(self) -> dict[str, Any]:
        pair = self.pair
        return {
            "k": self.k,
            "s": self.s,
            "i": self.level,
            "lambda": pair.eigenvalue if pair else None,
            "c_value": pair.c_value if pair else None,
            "residual": pair.residual if pair else None,
        }


@dataclass
class Verdict:
    """A monotonicity observation over one axis of the sweep."""

    name: str
    fixed: dict[str, Any]
    values: list[float]
    holds: bool

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "fixed": self.fixed, "values": self.values, "holds": self.holds}


@dataclass
class SweepResult:
    config: RunConfig
    rows: list[SweepRow] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)

    @property
    def errors(self) -> list[SweepRow]:
        return [r for r in self.rows if r.pair is None]

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass
class ValidationResult:
    config: RunConfig
    battery: BatteryReport
    observations: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.battery.ok


def _nondecreasing(values: list[float], slack: float = MONOTONE_SLACK) -> bool:
    return all(b >= a - slack for a, b in itertools.pairwise(values))


def _nested(ks: list[int]) -> bool:
    return all(b in (a, 2 * a + 1) for a, b in itertools.pairwise(ks))


class SpectrumRunner:
    """Builds assembled problems from a run configuration and drives the tasks."""

    def __init__(self, config: RunConfig, on_step: Callable[[str, int], None] | None = None) -> None:
        """Initialize runner.

        Args:
            config: Validated run configuration
            on_step: Called with a description and the number of solves just finished
        """
        self.config = config
        self.on_step = on_step
        self.young = config.young.build()
        self.growth = config.growth.build(self.young)
        self._problems: dict[tuple[int, float], AssembledProblem] = {}

    def problem(self, k: int | None = None, s: float | None = None) -> AssembledProblem:
        """Assembled problem for (k, s), defaulting to the configured mesh; cached."""
        k = self.config.mesh.k if k is None else k
        s = self.config.s if s is None else s
        key = (k, s)
        if key not in self._problems:
            mesh_cfg = self.config.mesh
            _, basis = build_mesh(self.config.domain.a, self.config.domain.b, k, s)
            self._problems[key] = assemble_problem(
                basis,
                self.young,
                self.growth,
                grading=mesh_cfg.grading,
                exterior_radius=mesh_cfg.exterior_radius,
                order=mesh_cfg.quad_order,
            )
        return self._problems[key]

    def total_steps(self) -> int | None:
        """Number of level solves the configured task performs, None when not counted."""
        if self.config.task == "solve":
            return len(self.config.levels)
        if self.config.task == "sweep":
            ks = len(self.config.sweep.k) or 1
            ss = len(self.config.sweep.s) or 1
            return ks * ss * len(self.config.levels)
        return None

    def _step(self, description: str, count: int = 1) -> None:
        if self.on_step is not None:
            self.on_step(description, count)

    def run(self) -> SolveResult | SweepResult | ValidationResult:
        """Dispatch on the configured task."""
        if self.config.task == "sweep":
            return self.sweep()
        if self.config.task == "validate":
            return self.validate()
        return self.solve()

    def solve(self) -> SolveResult:
        """Solve every configured level at the configured (k, s)."""
        prob = self.problem()
        result = SolveResult(config=self.config)
        for level in self.config.levels:
            try:
                pair = solve_level(prob, level, self.config.solver)
            except (LevelError, ConvergenceError) as exc:
                self._step(f"level {level} failed")
                logger.warning(f"Level {level} failed: {exc}")
                result.outcomes.append(
                    LevelOutcome(level=level, dim=prob.k, error=str(exc), error_kind=_error_kind(exc))
                )
                continue
            certificate = eigenpair_certificate(
                prob, pair, self.config.solver.kkt_tol, self.config.solver.manifold_tol
            )
            result.outcomes.append(LevelOutcome(level=level, dim=prob.k, pair=pair, certificate=certificate))
            self._step(f"level {level}")
        logger.info(f"Solved {sum(o.ok for o in result.outcomes)}/{len(result.outcomes)} levels at k={prob.k}")
        return result

    def sweep(self) -> SweepResult:
        """Solve over the k and s axes for every level and record monotonicity verdicts.

        Raises:
            ConfigError: If the sweep has fewer than two points
        """
        ks = list(self.config.sweep.k) or [self.config.mesh.k]
        ss = list(self.config.sweep.s) or [self.config.s]
        levels = list(self.config.levels)
        if len(ks) * len(ss) * len(levels) < 2:
            raise ConfigError("a sweep needs at least two points", key="sweep")
        result = SweepResult(config=self.config)
        for s in ss:
            for level in levels:
                result.rows.extend(self._sweep_k(ks, s, level))
        result.verdicts = self._verdicts(result.rows, ks, ss, levels)
        for verdict in result.verdicts:
            if not verdict.holds:
                logger.warning(f"Trend {verdict.name} does not hold at {verdict.fixed}")
        return result

    def _sweep_k(self, ks: list[int], s: float, level: int) -> list[SweepRow]:
        solver_cfg = self.config.solver
        if _nested(ks):
            problems = [self.problem(k, s) for k in ks]
            outcome = continuation(problems, level, solver_cfg)
            self._step(f"s={s:g}, i={level}", len(ks))
            return [
                SweepRow(k=k, s=s, level=level, pair=pair, error=error)
                for k, pair, error in zip(outcome.dims, outcome.pairs, outcome.errors, strict=True)
            ]
        rows = []
        for k in ks:
            logger.info(f"Sweep point k={k}, s={s:g}, i={level}")
            try:
                pair = solve_level(self.problem(k, s), level, solver_cfg)
            except OrliczSpectraError as exc:
                rows.append(SweepRow(k=k, s=s, level=level, pair=None, error=str(exc)))
                self._step(f"k={k}, s={s:g}, i={level} failed")
                continue
            rows.append(SweepRow(k=k, s=s, level=level, pair=pair))
            self._step(f"k={k}, s={s:g}, i={level}")
        return rows

    @staticmethod
    def _verdicts(rows: list[SweepRow], ks: list[int], ss: list[float], levels: list[int]) -> list[Verdict]:
        table = {(r.k, r.s, r.level): r.pair for r in rows if r.pair is not None}
        verdicts = []
        for s, level in itertools.product(ss, levels):
            c = [table[(k, s, level)].c_value for k in ks if (k, s, level) in table]
            if len(ks) > 1:
                verdicts.append(Verdict("c_nondecreasing_in_k", {"s": s, "i": level}, c, _nondecreasing(c)))
        for s, k in itertools.product(ss, ks):
            pairs = [table[(k, s, i)] for i in sorted(levels) if (k, s, i) in table]
            if len(levels) > 1:
                c = [p.c_value for p in pairs]
                lam = [p.eigenvalue for p in pairs]
                falling = _nondecreasing([-v for v in c])
                verdicts.append(Verdict("c_nonincreasing_in_i", {"s": s, "k": k}, c, falling))
                verdicts.append(Verdict("lambda_nondecreasing_in_i", {"s": s, "k": k}, lam, _nondecreasing(lam)))
        return verdicts

    def validate(self) -> ValidationResult:
        """Run the property battery, the translation estimates and, for p=2, the oracle cross-check."""
        prob = self.problem()
        validation = self.config.validation
        seed = self.config.solver.rng_seed
        battery = property_battery(prob, validation.trials, seed)
        result = ValidationResult(config=self.config, battery=battery)
        if validation.trials == 0:
            return result
        if validation.appendix_count > 0:
            battery.subtests.extend(translation_battery(prob, validation.appendix_count, seed))
        linear = self.young.kind == YoungKind.POWER and self.young.p == 2.0 and self.growth.is_linear
        if linear and validation.oracle_levels > 0:
            battery.subtests.append(oracle_cross_check(prob, validation.oracle_levels, self.config.solver))
        result.observations["poincare_ratio"] = poincare_ratio(prob, samples=64, seed=seed)
        logger.info(f"Validation: {battery.total_trials} trials, {battery.total_failures} failures")
        return result
