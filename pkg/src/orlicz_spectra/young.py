"""Young functions: evaluation, conjugation, doubling diagnostics and growth checks."""

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, partial
from typing import Any

import numpy as np
from scipy import integrate

from orlicz_spectra.errors import InputError

logger = logging.getLogger(__name__)

Density = Callable[[np.ndarray], np.ndarray]

QUAD_RTOL = 1e-10
INVERSE_RTOL = 1e-12


class YoungKind(str, Enum):
    """Young function families."""

    POWER = "power"
    EXP = "exp"
    EXP_DUAL = "exp_dual"
    CUSTOM = "custom"


def _right_inverse(density: Density, tau: np.ndarray, rtol: float = INVERSE_RTOL) -> np.ndarray:
    """Generalized right-continuous inverse ``sup{t >= 0 : m(t) <= tau}`` by bisection."""
    target = np.abs(np.asarray(tau, dtype=float))
    hi = np.ones_like(target)
    for _ in range(2100):
        short = density(hi) <= target
        if not short.any():
            break
        hi = np.where(short, 2.0 * hi, hi)
    lo = np.zeros_like(target)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        above = density(mid) > target
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if np.all(hi - lo <= rtol * hi):
            break
    return np.where(target == 0.0, 0.0, 0.5 * (lo + hi))


@dataclass(frozen=True)
class YoungFunction:
    """A Young function M with its density m, M(t) = int_0^|t| m."""

    kind: YoungKind
    p: float | None = None
    table: tuple[tuple[float, float], ...] | None = None
    density_fn: Density | None = field(default=None, compare=False, repr=False)
    source: "YoungFunction | None" = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.kind == YoungKind.POWER:
            if self.p is None or not math.isfinite(self.p) or self.p <= 1.0:
                raise InputError(f"power Young function needs finite p > 1, got {self.p}")
        elif self.kind == YoungKind.CUSTOM:
            if (self.table is None) == (self.density_fn is None):
                raise InputError("custom Young function needs exactly one of table or density_fn")

    # Constructors

    @classmethod
    def power(cls, p: float) -> "YoungFunction":
        return cls(YoungKind.POWER, p=float(p))

    @classmethod
    def exp(cls) -> "YoungFunction":
        """m(t) = e^t - 1, the non-doubling reference function."""
        return cls(YoungKind.EXP)

    @classmethod
    def exp_dual(cls) -> "YoungFunction":
        return cls(YoungKind.EXP_DUAL)

    @classmethod
    def from_table(cls, rows: Sequence[Sequence[float]]) -> "YoungFunction":
        """Build a custom function from ``[[t, m(t)], ...]`` nodes.

        The density is interpolated linearly and extrapolated linearly past the
        last node. A ``(0, 0)`` node is prepended when missing. Two nodes with
        the same t encode a jump of m there; m takes its left limit at the jump.

        Args:
            rows: Table nodes with nondecreasing t, at most two per t value

        Returns:
            Custom YoungFunction

        Raises:
            InputError: If the table cannot define a Young function
        """
        try:
            arr = np.asarray(rows, dtype=float)
        except (TypeError, ValueError) as e:
            raise InputError(f"table must be a list of [t, m] pairs: {e}") from e
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
            raise InputError("table must be a non-empty list of [t, m] pairs")
        if not np.all(np.isfinite(arr)):
            raise InputError("table entries must be finite")
        if arr[0, 0] > 0.0:
            arr = np.vstack([[0.0, 0.0], arr])
        ts, ms = arr[:, 0], arr[:, 1]
        if ts[0] != 0.0 or ms[0] != 0.0:
            raise InputError("table must start at t=0 with m(0)=0")
        widths = np.diff(ts)
        if arr.shape[0] < 2 or np.any(widths < 0.0):
            raise InputError("table t values must be nondecreasing")
        if np.any((widths[:-1] == 0.0) & (widths[1:] == 0.0)):
            raise InputError("table repeats a t value more than twice")
        if widths[-1] == 0.0:
            raise InputError("table must end on a segment of positive width")
        if np.any(ms[1:] <= 0.0):
            raise InputError("table has m(t) <= 0 for some t > 0 (flat zero segments are not allowed)")
        if ms[-1] <= ms[-2]:
            raise InputError("table must increase on its last segment so m(t) grows without bound")
        if np.any(np.diff(ms) < 0.0):
            logger.warning("Custom table density is not monotone; Young invariants will fail")
        return cls(YoungKind.CUSTOM, table=tuple((float(t), float(m)) for t, m in arr))

    @classmethod
    def from_density(cls, density: Density) -> "YoungFunction":
        """Build a custom function from a vectorized density callable."""
        return cls(YoungKind.CUSTOM, density_fn=density)

    # Evaluation

    @property
    def name(self) -> str:
        if self.kind == YoungKind.POWER:
            return f"power(p={self.p:g})"
        if self.kind == YoungKind.CUSTOM:
            return "custom(table)" if self.table is not None else "custom(density)"
        return self.kind.value

    @cached_property
    def _segments(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        arr = np.asarray(self.table, dtype=float)
        ts, ms = arr[:, 0], arr[:, 1]
        widths = np.diff(ts)
        slopes = np.divide(np.diff(ms), widths, out=np.zeros_like(widths), where=widths > 0.0)
        primitive = np.concatenate([[0.0], np.cumsum(0.5 * (ms[:-1] + ms[1:]) * widths)])
        return ts, ms, slopes, primitive

    def _locate(self, a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ts = self._segments[0]
        # left limit at jumps
        idx = np.clip(np.searchsorted(ts, a, side="left") - 1, 0, len(ts) - 2)
        return idx, a - ts[idx]

    def density(self, t: Any) -> np.ndarray:
        """m(|t|), vectorized."""
        a = np.abs(np.asarray(t, dtype=float))
        if self.kind == YoungKind.POWER:
            return a ** (self.p - 1.0)
        if self.kind == YoungKind.EXP:
            with np.errstate(over="ignore"):
                return np.expm1(a)
        if self.kind == YoungKind.EXP_DUAL:
            return np.log1p(a)
        if self.table is not None:
            _, ms, slopes, _ = self._segments
            idx, offset = self._locate(a)
            return ms[idx] + slopes[idx] * offset
        assert self.density_fn is not None
        return np.asarray(self.density_fn(a), dtype=float)

    def signed_density(self, t: Any) -> np.ndarray:
        """Odd extension m(|t|) sign(t)."""
        arr = np.asarray(t, dtype=float)
        return np.sign(arr) * self.density(arr)

    def primitive(self, t: Any) -> np.ndarray:
        """M(t), vectorized and even."""
        a = np.abs(np.asarray(t, dtype=float))
        if self.kind == YoungKind.POWER:
            return a**self.p / self.p
        if self.kind == YoungKind.EXP:
            with np.errstate(over="ignore", invalid="ignore"):
                return np.expm1(a) - a
        if self.kind == YoungKind.EXP_DUAL:
            return (1.0 + a) * np.log1p(a) - a
        if self.table is not None:
            _, ms, slopes, primitive = self._segments
            idx, offset = self._locate(a)
            return primitive[idx] + ms[idx] * offset + 0.5 * slopes[idx] * offset * offset
        return self._quad_primitive(a)

    def _quad_primitive(self, a: np.ndarray) -> np.ndarray:
        density = self.density
        flat = a.ravel()
        out = np.empty_like(flat)
        for i, upper in enumerate(flat):
            if upper == 0.0:
                out[i] = 0.0
                continue
            out[i], _ = integrate.quad(
                lambda s: float(density(s)), 0.0, float(upper),
                epsabs=0.0, epsrel=QUAD_RTOL, limit=200,
            )
        return out.reshape(a.shape)

    def invariant_violations(self, samples: int = 200) -> list[str]:
        """Sample the defining properties of a Young function on a log grid.

        Returns:
            Human-readable descriptions of every violated property
        """
        violations: list[str] = []
        grid = np.logspace(-6, 3, samples)
        m = self.density(grid)
        if float(self.density(0.0)) != 0.0:
            violations.append("m(0) != 0")
        if np.any(m <= 0.0):
            violations.append("m(t) <= 0 for some sampled t > 0")
        drops = np.flatnonzero(np.diff(m) < 0.0)
        if drops.size:
            violations.append(f"m decreases near t={grid[drops[0]]:.6g}")
        ratio = self.primitive(np.array([1e-4, 1e-2, 1e2, 1e4])) / np.array([1e-4, 1e-2, 1e2, 1e4])
        if not ratio[0] < ratio[1]:
            violations.append("M(t)/t does not decrease toward 0")
        if not ratio[2] < ratio[3]:
            violations.append("M(t)/t does not grow toward infinity")
        if self.kind != YoungKind.CUSTOM or self.table is not None:
            for t in (0.1, 1.0, 5.0):
                closed = float(self.primitive(t))
                nodes = sorted({x for x, _ in self.table or () if 0.0 < x < t}) or None
                quad, _ = integrate.quad(
                    lambda s: float(self.density(s)), 0.0, t, epsrel=QUAD_RTOL, limit=200, points=nodes
                )
                if abs(closed - quad) > 1e-8 * (1.0 + abs(closed)):
                    violations.append(f"M({t}) differs from the integral of m")
        return violations


def _checked(value: Any, name: str = "t") -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} must be finite")
    return arr


def _out(arr: np.ndarray) -> Any:
    return float(arr) if arr.ndim == 0 else arr


def eval_M(f: YoungFunction, t: float) -> float:
    """Evaluate M(|t|)."""
    return float(f.primitive(_checked(t)))


def eval_m_signed(f: YoungFunction, t: float) -> float:
    """Evaluate the odd extension of m; 0 at t=0."""
    return float(f.signed_density(_checked(t)))


def conjugate(f: YoungFunction) -> YoungFunction:
    """Return the complementary Young function M-bar.

    Closed forms are used for power and exponential kinds. Tables are inverted by
    swapping nodes of their nondecreasing envelope, and density callables get a
    bisection inverse.
    """
    if f.kind == YoungKind.POWER:
        assert f.p is not None
        return YoungFunction.power(f.p / (f.p - 1.0))
    if f.kind == YoungKind.EXP:
        return YoungFunction.exp_dual()
    if f.kind == YoungKind.EXP_DUAL:
        return YoungFunction.exp()
    if f.table is not None:
        ts, ms, _, _ = f._segments
        envelope = np.maximum.accumulate(ms)
        keep = np.concatenate([[True], np.diff(envelope) > 0.0])
        rows = tuple((float(m), float(t)) for m, t in zip(envelope[keep], ts[keep], strict=True))
        return YoungFunction(YoungKind.CUSTOM, table=rows)
    if f.source is not None:
        return f.source
    assert f.density_fn is not None
    return YoungFunction(
        YoungKind.CUSTOM,
        density_fn=partial(_right_inverse, f.density_fn),
        source=f,
    )


@dataclass
class Delta2Report:
    """Sampled doubling-condition verdict."""

    satisfied: bool
    witness_C: float | None
    grid: np.ndarray = field(repr=False)
    ratios: np.ndarray = field(repr=False)


def check_delta2(f: YoungFunction, t_max: float, samples: int = 64) -> Delta2Report:
    """Sample M(2t)/M(t) on a log grid of [1, t_max].

    The verdict is a heuristic: the ratio counts as unbounded when it is not
    finite or when its value at t_max exceeds 1e3 times its value at t=1.
    """
    if not t_max > 1.0:
        raise InputError(f"t_max must exceed 1, got {t_max}")
    if samples < 2:
        raise InputError("check_delta2 needs at least two samples")
    grid = np.logspace(0.0, math.log10(t_max), samples)
    with np.errstate(over="ignore", invalid="ignore"):
        ratios = f.primitive(2.0 * grid) / f.primitive(grid)
    bounded = bool(np.all(np.isfinite(ratios))) and ratios[-1] <= 1e3 * ratios[0]
    witness = float(np.max(ratios)) if bounded else None
    logger.debug(f"Delta2 check for {f.name}: bounded={bounded}, witness={witness}")
    return Delta2Report(satisfied=bounded, witness_C=witness, grid=grid, ratios=ratios)


def young_gap(f: YoungFunction, t: Any, tau: Any, dual: YoungFunction | None = None) -> Any:
    """Return M(t) + M-bar(tau) - tau t for t, tau >= 0 (vectorized).

    Args:
        f: Young function
        t: Nonnegative argument of M
        tau: Nonnegative argument of M-bar
        dual: Precomputed conjugate of f

    Returns:
        The Young inequality gap, nonnegative up to rounding
    """
    t_arr = _checked(t)
    tau_arr = _checked(tau, "tau")
    if np.any(t_arr < 0.0) or np.any(tau_arr < 0.0):
        raise InputError("young_gap takes nonnegative arguments")
    dual = dual if dual is not None else conjugate(f)
    gap = f.primitive(t_arr) + dual.primitive(tau_arr) - t_arr * tau_arr
    return _out(np.asarray(gap))


def complementary_identity_gap(f: YoungFunction, t: Any, dual: YoungFunction | None = None) -> Any:
    """Return |M-bar(m(t)) - (m(t) t - M(t))|, zero at the Young equality case."""
    t_arr = np.abs(_checked(t))
    dual = dual if dual is not None else conjugate(f)
    m = f.density(t_arr)
    gap = np.abs(dual.primitive(m) - (m * t_arr - f.primitive(t_arr)))
    return _out(np.asarray(gap))


class GrowthKind(str, Enum):
    """Right-hand side nonlinearities."""

    YOUNG = "young"
    POWER = "power"


@dataclass(frozen=True)
class GrowthFunction:
    """The pair (g, G) with growth constants |g(t)| <= a1 + a2 m(a3 t)."""

    kind: GrowthKind
    young: YoungFunction | None = None
    q: float | None = None
    a1: float = 0.0
    a2: float = 1.0
    a3: float = 1.0

    def __post_init__(self) -> None:
        if self.kind == GrowthKind.YOUNG and self.young is None:
            raise InputError("growth kind 'young' needs the paired Young function")
        if self.kind == GrowthKind.POWER and (self.q is None or not self.q > 1.0):
            raise InputError(f"power growth needs q > 1, got {self.q}")
        if self.a1 < 0.0 or self.a2 <= 0.0 or self.a3 <= 0.0:
            raise InputError("growth constants need a1 >= 0, a2 > 0, a3 > 0")

    @property
    def name(self) -> str:
        if self.kind == GrowthKind.POWER:
            return f"power(q={self.q:g})"
        return "young"

    @property
    def is_linear(self) -> bool:
        """True when g(t) = t."""
        if self.kind == GrowthKind.POWER:
            return self.q == 2.0
        assert self.young is not None
        return self.young.kind == YoungKind.POWER and self.young.p == 2.0

    def g(self, t: Any) -> np.ndarray:
        arr = np.asarray(t, dtype=float)
        if self.kind == GrowthKind.YOUNG:
            assert self.young is not None
            return self.young.signed_density(arr)
        assert self.q is not None
        return np.sign(arr) * np.abs(arr) ** (self.q - 1.0)

    def G(self, t: Any) -> np.ndarray:
        arr = np.asarray(t, dtype=float)
        if self.kind == GrowthKind.YOUNG:
            assert self.young is not None
            return self.young.primitive(arr)
        assert self.q is not None
        return np.abs(arr) ** self.q / self.q


@dataclass
class GrowthReport:
    """Sampled growth-condition verdict."""

    ok: bool
    worst_margin: float
    violations: list[str] = field(default_factory=list)


def check_growth(growth: GrowthFunction, young: YoungFunction, samples: int = 1001) -> GrowthReport:
    """Sample |g(t)| <= a1 + a2 m(a3 t), oddness and g(t)t > 0 on [0, 1e3]."""
    grid = np.unique(np.concatenate([np.linspace(0.0, 1e3, samples), np.logspace(-6, 3, samples // 4)]))
    g = growth.g(grid)
    with np.errstate(over="ignore", invalid="ignore"):
        bound = growth.a1 + growth.a2 * young.density(growth.a3 * grid)
    margins = bound - np.abs(g)
    slack = 1e-12 * (1.0 + np.abs(g))
    violations: list[str] = []
    bad = np.flatnonzero(margins < -slack)
    if bad.size:
        violations.append(f"growth bound fails at t={grid[bad[0]]:.6g}")
    if np.any(np.abs(growth.g(-grid) + g) > 1e-12 * (1.0 + np.abs(g))):
        violations.append("g is not odd")
    positive = grid[grid > 0.0]
    if np.any(growth.g(positive) * positive <= 0.0):
        violations.append("g(t) t <= 0 for some t != 0")
    finite = margins[np.isfinite(margins)]
    worst = float(np.min(finite)) if finite.size else math.inf
    return GrowthReport(ok=not violations, worst_margin=worst, violations=violations)


def young_from_config(record: Mapping[str, Any]) -> YoungFunction:
    """Build a Young function from ``{kind, p?, table?}``."""
    kind = record.get("kind")
    if kind == YoungKind.POWER.value:
        if record.get("p") is None:
            raise InputError("power Young function needs p")
        return YoungFunction.power(float(record["p"]))
    if kind == YoungKind.EXP.value:
        return YoungFunction.exp()
    if kind == YoungKind.EXP_DUAL.value:
        return YoungFunction.exp_dual()
    if kind == YoungKind.CUSTOM.value:
        table = record.get("table")
        if not table:
            raise InputError("custom Young function needs a table")
        return YoungFunction.from_table(table)
    raise InputError(f"unknown Young function kind: {kind!r}")


def growth_from_config(record: Mapping[str, Any], young: YoungFunction) -> GrowthFunction:
    """Build a growth function from ``{kind, q?, a1, a2, a3}``."""
    kind = record.get("kind", GrowthKind.YOUNG.value)
    constants = {
        "a1": float(record.get("a1", 0.0)),
        "a2": float(record.get("a2", 1.0)),
        "a3": float(record.get("a3", 1.0)),
    }
    if kind == GrowthKind.YOUNG.value:
        return GrowthFunction(GrowthKind.YOUNG, young=young, **constants)
    if kind == GrowthKind.POWER.value:
        q = record.get("q")
        if q is None:
            raise InputError("power growth needs q")
        return GrowthFunction(GrowthKind.POWER, q=float(q), **constants)
    raise InputError(f"unknown growth kind: {kind!r}")
