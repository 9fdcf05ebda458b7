"""Modulars and Luxemburg norms over discrete measures.

On a finite node set every Orlicz class, Orlicz space and its closure of
bounded functions coincide, so only the modular and the Luxemburg norm are
computed here.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
from scipy import optimize

from orlicz_spectra.errors import InputError
from orlicz_spectra.young import YoungFunction, conjugate

logger = logging.getLogger(__name__)

NORM_RTOL = 1e-10
PAIRING_SLACK = 1e-8


class MeasureTag(str, Enum):
    """Provenance of a discrete measure."""

    LEBESGUE_1D = "lebesgue_1d"
    PAIR_NU = "pair_nu"


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Positive quadrature weights standing in for dx or the pair measure."""

    weights: np.ndarray
    tag: MeasureTag = MeasureTag.LEBESGUE_1D

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=float)
        if weights.ndim != 1:
            raise InputError("measure weights must be a vector")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0.0):
            raise InputError("measure weights must be finite and strictly positive")
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return int(self.weights.size)

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weights)


@dataclass(frozen=True, eq=False)
class SampledField:
    """Values of a function at the nodes of a measure."""

    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def __len__(self) -> int:
        return int(self.values.size)


def _aligned(u: SampledField | np.ndarray, mu: DiscreteMeasure) -> np.ndarray:
    values = u.values if isinstance(u, SampledField) else np.asarray(u, dtype=float)
    if values.shape != mu.weights.shape:
        raise InputError(f"field has {values.size} values but measure has {len(mu)} nodes")
    return values


def modular(f: YoungFunction, u: SampledField | np.ndarray, mu: DiscreteMeasure) -> float:
    """Return sum_i w_i M(u_i), summed with correct rounding."""
    values = _aligned(u, mu)
    with np.errstate(over="ignore"):
        terms = mu.weights * f.primitive(values)
    if not np.all(np.isfinite(terms)):
        return math.inf
    return math.fsum(terms)


def luxemburg_norm(
    f: YoungFunction,
    u: SampledField | np.ndarray,
    mu: DiscreteMeasure,
    rtol: float = NORM_RTOL,
) -> float:
    """Return inf{k > 0 : modular(u/k) <= 1}.

    The bracket starts at k = 1 and is doubled or halved until the modular
    crosses 1; the root is then located by Brent's bracketing method.

    Args:
        f: Young function
        u: Field values aligned with the measure
        mu: Discrete measure
        rtol: Relative tolerance on k

    Returns:
        The Luxemburg norm, 0 for the zero field
    """
    values = _aligned(u, mu)
    if not np.any(values):
        return 0.0

    def excess(k: float) -> float:
        return modular(f, values / k, mu) - 1.0

    k_lo = k_hi = 1.0
    if excess(k_hi) > 0.0:
        while excess(k_hi) > 0.0:
            k_lo, k_hi = k_hi, 2.0 * k_hi
    else:
        while excess(k_lo) <= 0.0:
            k_lo, k_hi = 0.5 * k_lo, k_lo
    # Brent needs a finite modular at the lower end.
    while not math.isfinite(excess(k_lo)):
        mid = math.sqrt(k_lo * k_hi)
        if excess(mid) <= 0.0:
            k_hi = mid
        else:
            k_lo = mid
    rtol = max(rtol, 4.0 * np.finfo(float).eps)
    return float(optimize.brentq(excess, k_lo, k_hi, xtol=1e-3 * rtol * k_lo, rtol=rtol))


@dataclass
class PairingReport:
    """Hoelder pairing bound sum |uv| <= 2 |u|_M |v|_Mbar."""

    lhs: float
    rhs: float
    ok: bool


def holder_pairing_check(
    f: YoungFunction,
    u: SampledField | np.ndarray,
    v: SampledField | np.ndarray,
    mu: DiscreteMeasure,
    dual: YoungFunction | None = None,
) -> PairingReport:
    """Compare the pairing of u and v with twice the product of their norms."""
    u_values = _aligned(u, mu)
    v_values = _aligned(v, mu)
    dual = dual if dual is not None else conjugate(f)
    lhs = math.fsum(mu.weights * np.abs(u_values * v_values))
    rhs = 2.0 * luxemburg_norm(f, u_values, mu) * luxemburg_norm(dual, v_values, mu)
    return PairingReport(lhs=lhs, rhs=rhs, ok=lhs <= rhs + PAIRING_SLACK)


def lebesgue_measure(weights: Any) -> DiscreteMeasure:
    return DiscreteMeasure(np.asarray(weights, dtype=float), MeasureTag.LEBESGUE_1D)
