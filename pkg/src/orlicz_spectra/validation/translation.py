"""Translation estimates: the Orlicz modulus of continuity of u against its fractional energy.

Both inequalities checked here hold on the whole line for every |h| < 1/2.
The constants use the measure of the zero-dimensional sphere {-1, 1}.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from orlicz_spectra.errors import InputError
from orlicz_spectra.mesh import Basis, CoefficientVector, PairQuadrature, build_pair_quadrature, unit_gauss_rule
from orlicz_spectra.orlicz import DiscreteMeasure, lebesgue_measure, luxemburg_norm, modular
from orlicz_spectra.young import YoungFunction

logger = logging.getLogger(__name__)

# Measure of the unit sphere S^0 = {-1, 1} in one dimension.
SPHERE_MEASURE = 2.0
MODULAR_CONSTANT = 2.0 ** (1 + 1) / SPHERE_MEASURE
TRANSLATION_CONSTANT = max(1.0, MODULAR_CONSTANT)
INEQUALITY_SLACK = 1e-3
SUBDIVISIONS_PER_CELL = 8
GAUSS_ORDER = 4


@dataclass
class TranslationReport:
    """Norm of the translation difference against the bound C |h|^s |D^s u|."""

    h: float
    lhs: float
    rhs: float
    ratio: float
    ok: bool


@dataclass
class ModularTranslationReport:
    """Modular of the translation difference against the pair-measure modular."""

    h: float
    lhs: float
    rhs: float
    ok: bool


def _checked_shift(h: float) -> float:
    if not math.isfinite(h) or abs(h) >= 0.5:
        raise InputError(f"translation estimates need |h| < 1/2, got h={h}")
    return float(h)


def difference_rule(basis: Basis, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss rule on [a - |h|, b + |h|] split at the kinks of u and of u(. + h)."""
    mesh = basis.mesh
    lo, hi = mesh.a - abs(h), mesh.b + abs(h)
    breaks = np.unique(np.concatenate([[lo, hi], mesh.grid, mesh.grid - h]))
    breaks = breaks[(breaks >= lo) & (breaks <= hi)]
    xi, wi = unit_gauss_rule(GAUSS_ORDER)
    points, weights = [], []
    for left, right in zip(breaks[:-1], breaks[1:], strict=True):
        pieces = max(1, math.ceil(SUBDIVISIONS_PER_CELL * (right - left) / mesh.h))
        edges = np.linspace(left, right, pieces + 1)
        widths = np.diff(edges)
        points.append((edges[:-1, None] + widths[:, None] * xi[None, :]).ravel())
        weights.append((widths[:, None] * wi[None, :]).ravel())
    return np.concatenate(points), np.concatenate(weights)


def _difference(basis: Basis, u: CoefficientVector, h: float) -> tuple[np.ndarray, DiscreteMeasure]:
    points, weights = difference_rule(basis, h)
    values = basis.evaluate(u, points + h) - basis.evaluate(u, points)
    return values, lebesgue_measure(weights)


def _holder_values(basis: Basis, u: CoefficientVector, quad: PairQuadrature) -> np.ndarray:
    diff = basis.evaluate(u, quad.x) - basis.evaluate(u, quad.y)
    return diff / np.abs(quad.x - quad.y) ** basis.mesh.s


def translation_test(
    basis: Basis,
    f: YoungFunction,
    u: CoefficientVector,
    h: float,
    quad: PairQuadrature | None = None,
) -> TranslationReport:
    """Check |u(. + h) - u|_M <= 2^(s+1) A |h|^s |D^s u|_(M, nu) with A = max(1, 4 / |S^0|).

    Args:
        basis: Hat basis of u
        f: Young function of both norms
        u: Coefficients of u
        h: Shift with |h| < 1/2
        quad: Pair quadrature to reuse, built with defaults when omitted

    Raises:
        InputError: If |h| >= 1/2
    """
    h = _checked_shift(h)
    quad = quad if quad is not None else build_pair_quadrature(basis)
    values, measure = _difference(basis, u, h)
    lhs = luxemburg_norm(f, values, measure)
    energy = luxemburg_norm(f, _holder_values(basis, u, quad), quad.measure)
    rhs = 2.0 ** (basis.mesh.s + 1.0) * TRANSLATION_CONSTANT * abs(h) ** basis.mesh.s * energy
    ratio = lhs / rhs if rhs > 0.0 else 0.0
    return TranslationReport(h=h, lhs=lhs, rhs=rhs, ratio=ratio, ok=lhs <= rhs * (1.0 + INEQUALITY_SLACK))


def lemma_b1_test(
    basis: Basis,
    f: YoungFunction,
    u: CoefficientVector,
    h: float,
    quad: PairQuadrature | None = None,
) -> ModularTranslationReport:
    """Check the integral of M(|u(. + h) - u|) <= (4 / |S^0|) times the pair integral of M(2^(s+1) |h|^s D^s u).

    Raises:
        InputError: If |h| >= 1/2
    """
    h = _checked_shift(h)
    quad = quad if quad is not None else build_pair_quadrature(basis)
    values, measure = _difference(basis, u, h)
    lhs = modular(f, values, measure)
    scale = 2.0 ** (basis.mesh.s + 1.0) * abs(h) ** basis.mesh.s
    rhs = MODULAR_CONSTANT * modular(f, scale * _holder_values(basis, u, quad), quad.measure)
    return ModularTranslationReport(h=h, lhs=lhs, rhs=rhs, ok=lhs <= rhs * (1.0 + INEQUALITY_SLACK))
