"""Uniform 1D meshes, nested hat bases and quadrature for the pair measure dxdy/|x-y|."""

import logging
import math
from dataclasses import dataclass, replace
from enum import IntEnum
from functools import cached_property
from typing import Any

import numpy as np
from numpy.typing import NDArray
from scipy import sparse, special

from orlicz_spectra.errors import InputError
from orlicz_spectra.orlicz import DiscreteMeasure, MeasureTag, modular
from orlicz_spectra.young import YoungFunction

logger = logging.getLogger(__name__)

CoefficientVector = NDArray[np.float64]

# Pair cells closer than this fraction of b - a to the diagonal are dropped.
DIAGONAL_CUTOFF = 1e-8
EXTERIOR_FACTOR = 20.0
# The exterior tail runs from the strip edge out to this multiple of its radius.
TAIL_FACTOR = 1e8


class PairRegion(IntEnum):
    """Partition tags of pair-quadrature nodes."""

    NEAR_DIAGONAL = 0
    FAR = 1
    EXTERIOR_STRIP = 2
    EXTERIOR_TAIL = 3

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class Mesh:
    """Uniform partition of (a, b) with k interior nodes."""

    a: float
    b: float
    k: int
    s: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise InputError(f"domain needs finite a < b, got ({self.a}, {self.b})")
        if self.k < 1:
            raise InputError(f"mesh needs k >= 1 interior nodes, got {self.k}")
        if not 0.0 < self.s < 1.0:
            raise InputError(f"fractional order s must lie in (0, 1), got {self.s}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.k + 1)

    @cached_property
    def grid(self) -> np.ndarray:
        """Endpoints and interior nodes, k + 2 points."""
        return np.linspace(self.a, self.b, self.k + 2)

    @property
    def nodes(self) -> np.ndarray:
        return self.grid[1:-1]

    def refine(self) -> "Mesh":
        """Dyadic refinement k -> 2k + 1, which nests the hat spaces."""
        return Mesh(self.a, self.b, 2 * self.k + 1, self.s)


@dataclass(frozen=True)
class Basis:
    """Hat functions on a mesh, vanishing outside (a, b)."""

    mesh: Mesh

    @property
    def size(self) -> int:
        return self.mesh.k

    def values(self, x: Any) -> sparse.csr_matrix:
        """Sparse matrix of phi_j(x_i), shape (len(x), k)."""
        mesh = self.mesh
        points = np.asarray(x, dtype=float).ravel()
        inside = np.flatnonzero((points > mesh.a) & (points < mesh.b))
        xi = points[inside]
        cell = np.clip(np.floor((xi - mesh.a) / mesh.h).astype(np.int64), 0, mesh.k)
        falling = (mesh.grid[cell + 1] - xi) / mesh.h
        rising = (xi - mesh.grid[cell]) / mesh.h
        has_left = cell >= 1
        has_right = cell <= mesh.k - 1
        rows = np.concatenate([inside[has_left], inside[has_right]])
        cols = np.concatenate([cell[has_left] - 1, cell[has_right]])
        vals = np.concatenate([falling[has_left], rising[has_right]])
        return sparse.csr_matrix((vals, (rows, cols)), shape=(points.size, mesh.k))

    def evaluate(self, coeffs: CoefficientVector, x: Any) -> np.ndarray:
        """Piecewise-linear interpolant of the coefficients, zero outside (a, b)."""
        c = self._checked(coeffs)
        nodal = np.concatenate([[0.0], c, [0.0]])
        return np.interp(np.asarray(x, dtype=float), self.mesh.grid, nodal, left=0.0, right=0.0)

    def prolong(self, coeffs: CoefficientVector, target: "Basis") -> CoefficientVector:
        """Coefficients of the same function in a finer nested basis."""
        return self.evaluate(coeffs, target.mesh.nodes)

    def embedding(self, target: "Basis") -> np.ndarray:
        """Dense matrix mapping coarse coefficients to fine ones."""
        return self.values(target.mesh.nodes).toarray()

    def _checked(self, coeffs: CoefficientVector) -> np.ndarray:
        c = np.asarray(coeffs, dtype=float)
        if c.shape != (self.size,):
            raise InputError(f"coefficient vector has shape {c.shape}, basis size is {self.size}")
        return c


def build_mesh(a: float, b: float, k: int, s: float) -> tuple[Mesh, Basis]:
    """Build a uniform mesh with k interior nodes and its hat basis."""
    mesh = Mesh(float(a), float(b), int(k), float(s))
    return mesh, Basis(mesh)


def holder_quotient(u: CoefficientVector, basis: Basis, x: float, y: float) -> float:
    """Return (u(x) - u(y)) / |x - y|^s."""
    if not (math.isfinite(x) and math.isfinite(y)):
        raise InputError("Hoelder quotient needs finite points")
    if x == y:
        raise InputError("Hoelder quotient is undefined on the diagonal x = y")
    ux, uy = basis.evaluate(u, [x, y])
    return float((ux - uy) / abs(x - y) ** basis.mesh.s)


@dataclass(frozen=True, eq=False)
class PairQuadrature:
    """Nodes (x, y) and weights for integrals against dxdy/|x-y|."""

    x: np.ndarray
    y: np.ndarray
    weights: np.ndarray
    tags: np.ndarray
    order: int
    grading: float
    exterior_radius: float

    def __len__(self) -> int:
        return int(self.weights.size)

    @cached_property
    def measure(self) -> DiscreteMeasure:
        return DiscreteMeasure(self.weights, MeasureTag.PAIR_NU)

    def swapped(self) -> "PairQuadrature":
        return replace(self, x=self.y, y=self.x)

    def integrate(self, values: Any) -> float:
        return math.fsum(self.weights * np.asarray(values, dtype=float))

    def mask(self, region: PairRegion) -> np.ndarray:
        return self.tags == region

    def counts(self) -> dict[str, int]:
        return {region.label: int(np.count_nonzero(self.mask(region))) for region in PairRegion}


def unit_gauss_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule on [0, 1]."""
    xi, wi = special.roots_legendre(order)
    return 0.5 * (xi + 1.0), 0.5 * wi


def _graded_intervals(length: float, cutoff: float, grading: float) -> np.ndarray:
    """Intervals of (cutoff, length] shrinking geometrically toward 0, shape (n, 2)."""
    if length <= cutoff:
        return np.empty((0, 2))
    if grading <= 1.0:
        return np.array([[cutoff, length]])
    edges = [length]
    while edges[-1] / grading > cutoff:
        edges.append(edges[-1] / grading)
    edges.append(cutoff)
    return np.array([[edges[i + 1], edges[i]] for i in range(len(edges) - 1)])


def _composite(intervals: np.ndarray, xi: np.ndarray, wi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = intervals[:, 0:1], intervals[:, 1:2]
    return (lo + (hi - lo) * xi).ravel(), ((hi - lo) * wi).ravel()


def _diagonal_pattern(h: float, cutoff: float, grading: float, xi: np.ndarray, wi: np.ndarray):
    """Upper half of one diagonal cell in (r, x) coordinates, offsets from the cell start."""
    r, wr = _composite(_graded_intervals(h, cutoff, grading), xi, wi)
    span = h - r
    x_off = (span[:, None] * xi[None, :]).ravel()
    r_all = np.repeat(r, xi.size)
    w = ((wr * span / r)[:, None] * wi[None, :]).ravel()
    return x_off, r_all, w


def _adjacent_pattern(h: float, cutoff: float, grading: float, xi: np.ndarray, wi: np.ndarray):
    """Cell pair (c, c+1) with y > x, graded toward the shared corner."""
    near = _graded_intervals(h, cutoff, grading)
    intervals = np.vstack([near, [[h, 2.0 * h]]]) if near.size else np.array([[h, 2.0 * h]])
    r, wr = _composite(intervals, xi, wi)
    start = np.where(r <= h, h - r, 0.0)
    span = np.where(r <= h, r, 2.0 * h - r)
    x_off = (start[:, None] + span[:, None] * xi[None, :]).ravel()
    r_all = np.repeat(r, xi.size)
    w = ((wr * span / r)[:, None] * wi[None, :]).ravel()
    return x_off, r_all, w


def _exterior_x_rule(mesh: Mesh, cutoff: float, grading: float, xi: np.ndarray, wi: np.ndarray):
    """Rule on (a, b) graded toward both endpoints."""
    h = mesh.h
    boundary, wb = _composite(_graded_intervals(h, cutoff, grading), xi, wi)
    parts_x = [mesh.a + boundary, mesh.b - boundary]
    parts_w = [wb, wb]
    if mesh.k >= 2:
        starts = mesh.grid[1:-2]
        parts_x.append((starts[:, None] + h * xi[None, :]).ravel())
        parts_w.append(np.tile(h * wi, starts.size))
    return np.concatenate(parts_x), np.concatenate(parts_w)


def _radial_intervals(distance: float, radius: float) -> tuple[np.ndarray, int]:
    """Log-radius intervals for r in (d, d + R) and the tail beyond, plus the strip count."""
    strip_end = math.log((distance + radius) / distance)
    n_strip = max(1, math.ceil(strip_end))
    edges = list(np.linspace(0.0, strip_end, n_strip + 1))
    tail_end = strip_end + math.log(TAIL_FACTOR)
    length = 1.0
    while edges[-1] < tail_end:
        edges.append(min(edges[-1] + length, tail_end))
        length *= 2.0
    arr = np.asarray(edges)
    return np.column_stack([arr[:-1], arr[1:]]), n_strip


def _exterior_nodes(mesh: Mesh, radius: float, cutoff: float, grading: float, xi: np.ndarray, wi: np.ndarray):
    x_nodes, x_weights = _exterior_x_rule(mesh, cutoff, grading, xi, wi)
    xs, ys, ws, tags = [], [], [], []
    for x0, w0 in zip(x_nodes, x_weights, strict=True):
        for side in (1.0, -1.0):
            distance = mesh.b - x0 if side > 0 else x0 - mesh.a
            intervals, n_strip = _radial_intervals(distance, radius)
            tau, wt = _composite(intervals, xi, wi)
            edge = mesh.b if side > 0 else mesh.a
            ys.append(edge + side * distance * np.expm1(tau))
            xs.append(np.full(tau.size, x0))
            # dy/|x-y| = dtau
            ws.append(w0 * wt)
            region = np.full(tau.size, PairRegion.EXTERIOR_TAIL, dtype=np.int8)
            region[: n_strip * xi.size] = PairRegion.EXTERIOR_STRIP
            tags.append(region)
    return np.concatenate(xs), np.concatenate(ys), np.concatenate(ws), np.concatenate(tags)


def build_pair_quadrature(
    basis: Basis,
    grading: float = 2.0,
    exterior_radius: float | None = None,
    order: int = 5,
) -> PairQuadrature:
    """Build a symmetric quadrature for integrals over R^2 against dxdy/|x-y|.

    Only pairs with at least one point in (a, b) are covered, since functions of
    the basis vanish elsewhere.

    Args:
        basis: Hat basis whose cells the rule is aligned with
        grading: Geometric ratio of the cell layers toward the diagonal
        exterior_radius: Width R of the exterior strips, default 20 (b - a)
        order: Gauss-Legendre order per direction

    Returns:
        PairQuadrature with the kernel 1/|x-y| folded into the weights
    """
    mesh = basis.mesh
    radius = EXTERIOR_FACTOR * (mesh.b - mesh.a) if exterior_radius is None else float(exterior_radius)
    if not grading >= 1.0:
        raise InputError(f"grading must be >= 1, got {grading}")
    if not radius > 0.0:
        raise InputError(f"exterior radius must be positive, got {radius}")
    if order < 1:
        raise InputError(f"quadrature order must be >= 1, got {order}")

    xi, wi = unit_gauss_rule(order)
    h = mesh.h
    cutoff = DIAGONAL_CUTOFF * (mesh.b - mesh.a)
    starts = mesh.grid[:-1]
    xs, ys, ws, tags = [], [], [], []

    def add(x: np.ndarray, y: np.ndarray, w: np.ndarray, region: PairRegion | np.ndarray) -> None:
        xs.append(x)
        ys.append(y)
        ws.append(w)
        tags.append(np.broadcast_to(np.asarray(region, dtype=np.int8), x.shape))

    x_off, r, w = _diagonal_pattern(h, cutoff, grading, xi, wi)
    x = (starts[:, None] + x_off[None, :]).ravel()
    add(x, x + np.tile(r, starts.size), np.tile(w, starts.size), PairRegion.NEAR_DIAGONAL)

    x_off, r, w = _adjacent_pattern(h, cutoff, grading, xi, wi)
    x = (starts[:-1, None] + x_off[None, :]).ravel()
    add(x, x + np.tile(r, starts.size - 1), np.tile(w, starts.size - 1), PairRegion.NEAR_DIAGONAL)

    ci, cj = np.triu_indices(starts.size, 2)
    if ci.size:
        px = (h * xi)[:, None] + np.zeros(xi.size)[None, :]
        py = np.zeros(xi.size)[:, None] + (h * xi)[None, :]
        pw = (h * wi)[:, None] * (h * wi)[None, :]
        x = (starts[ci][:, None] + px.ravel()[None, :]).ravel()
        y = (starts[cj][:, None] + py.ravel()[None, :]).ravel()
        add(x, y, np.tile(pw.ravel(), ci.size) / (y - x), PairRegion.FAR)

    ex, ey, ew, etags = _exterior_nodes(mesh, radius, cutoff, grading, xi, wi)
    add(ex, ey, ew, etags)

    upper_x = np.concatenate(xs)
    upper_y = np.concatenate(ys)
    upper_w = np.concatenate(ws)
    upper_tags = np.concatenate(tags)
    quad = PairQuadrature(
        x=np.concatenate([upper_x, upper_y]),
        y=np.concatenate([upper_y, upper_x]),
        weights=np.concatenate([upper_w, upper_w]),
        tags=np.concatenate([upper_tags, upper_tags]),
        order=order,
        grading=float(grading),
        exterior_radius=radius,
    )
    if np.any(quad.x == quad.y) or np.any(quad.weights <= 0.0):
        raise InputError("pair quadrature degenerated; increase the diagonal cutoff or the order")
    logger.debug(f"Pair quadrature for k={mesh.k}: {len(quad)} nodes {quad.counts()}")
    return quad


def quotient_matrix(basis: Basis, quad: PairQuadrature) -> sparse.csr_matrix:
    """Sparse matrix of D^s phi_j at every pair node, shape (nodes, k)."""
    scale = np.abs(quad.x - quad.y) ** (-basis.mesh.s)
    diff = (basis.values(quad.x) - basis.values(quad.y)).tocsr()
    out = sparse.csr_matrix(sparse.diags(scale) @ diff)
    out.eliminate_zeros()
    return out


def exterior_tail_change(
    basis: Basis,
    young: YoungFunction,
    coeffs: CoefficientVector,
    radius: float,
    grading: float = 2.0,
    order: int = 5,
) -> float:
    """Relative change of the modular of D^s u when the exterior radius doubles."""
    values = []
    for r in (radius, 2.0 * radius):
        quad = build_pair_quadrature(basis, grading, r, order)
        quotients = quotient_matrix(basis, quad) @ np.asarray(coeffs, dtype=float)
        values.append(modular(young, quotients, quad.measure))
    return abs(values[1] - values[0]) / values[0]
