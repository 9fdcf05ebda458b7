"""Galerkin assembly of the energy modular M_s, the potential G and their gradients."""

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg, sparse

from orlicz_spectra.errors import InputError
from orlicz_spectra.mesh import (
    Basis,
    CoefficientVector,
    Mesh,
    PairQuadrature,
    build_pair_quadrature,
    quotient_matrix,
    unit_gauss_rule,
)
from orlicz_spectra.young import GrowthFunction, YoungFunction, YoungKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AssembledProblem:
    """Discrete eigenvalue problem on one Galerkin space.

    ``quotients`` holds D^s phi_j at every pair node and ``line_values`` holds
    phi_j at the Gauss nodes of (a, b); both are read-only after assembly.
    """

    basis: Basis
    quad: PairQuadrature
    young: YoungFunction
    growth: GrowthFunction
    quotients: sparse.csr_matrix
    line_points: np.ndarray
    line_weights: np.ndarray
    line_values: sparse.csr_matrix

    @property
    def mesh(self) -> Mesh:
        return self.basis.mesh

    @property
    def k(self) -> int:
        return self.basis.size

    @property
    def is_linear(self) -> bool:
        """True for M(t) = t^2/2 with g(t) = t, where the problem is the pencil (A, B)."""
        return self.young.kind == YoungKind.POWER and self.young.p == 2.0 and self.growth.is_linear

    @cached_property
    def quotients_t(self) -> sparse.csr_matrix:
        return self.quotients.T.tocsr()

    @cached_property
    def line_values_t(self) -> sparse.csr_matrix:
        return self.line_values.T.tocsr()

    @cached_property
    def stiffness(self) -> np.ndarray:
        """A_ij = sum of w D^s phi_i D^s phi_j, the p=2 energy matrix."""
        weighted = sparse.diags(self.quad.weights) @ self.quotients
        return np.asarray((self.quotients_t @ weighted).toarray())

    @cached_property
    def mass(self) -> np.ndarray:
        """B_ij = integral of phi_i phi_j over (a, b)."""
        weighted = sparse.diags(self.line_weights) @ self.line_values
        return np.asarray((self.line_values_t @ weighted).toarray())

    @cached_property
    def _stiffness_factor(self) -> tuple[np.ndarray, bool]:
        return linalg.cho_factor(self.stiffness)

    def precondition(self, v: np.ndarray) -> np.ndarray:
        """Apply the inverse of the p=2 stiffness matrix."""
        return np.asarray(linalg.cho_solve(self._stiffness_factor, v))

    @cached_property
    def surrogate_modes(self) -> tuple[np.ndarray, np.ndarray]:
        """Generalized eigenpairs of (stiffness, mass), ascending."""
        values, vectors = linalg.eigh(self.stiffness, self.mass)
        return values, vectors

    def coefficients(self, u: CoefficientVector) -> np.ndarray:
        c = np.asarray(u, dtype=float)
        if c.shape != (self.k,):
            raise InputError(f"coefficient vector has shape {c.shape}, problem dimension is {self.k}")
        return c


def assemble_problem(
    basis: Basis,
    young: YoungFunction,
    growth: GrowthFunction,
    grading: float = 2.0,
    exterior_radius: float | None = None,
    order: int = 5,
) -> AssembledProblem:
    """Build quadratures and basis caches for one Galerkin space.

    Args:
        basis: Hat basis of V_k
        young: Young function of the operator
        growth: Right-hand side nonlinearity
        grading: Diagonal grading ratio of the pair quadrature
        exterior_radius: Exterior strip width, default 20 (b - a)
        order: Gauss order of the pair rule; the line rule uses order + 1

    Returns:
        AssembledProblem ready for evaluation
    """
    mesh = basis.mesh
    quad = build_pair_quadrature(basis, grading, exterior_radius, order)
    quotients = quotient_matrix(basis, quad)
    if not np.all(np.isfinite(quotients.data)):
        raise InputError("Hoelder quotients of the basis are not finite at every pair node")

    xi, wi = unit_gauss_rule(order + 1)
    starts = mesh.grid[:-1]
    line_points = (starts[:, None] + mesh.h * xi[None, :]).ravel()
    line_weights = np.tile(mesh.h * wi, starts.size)
    line_values = basis.values(line_points)

    logger.info(
        f"Assembled k={mesh.k}, s={mesh.s:g}, {young.name}, growth {growth.name}: "
        f"{len(quad)} pair nodes"
    )
    return AssembledProblem(
        basis=basis,
        quad=quad,
        young=young,
        growth=growth,
        quotients=quotients,
        line_points=line_points,
        line_weights=line_weights,
        line_values=line_values,
    )


def holder_values(prob: AssembledProblem, u: CoefficientVector) -> np.ndarray:
    """D^s u at every pair node."""
    return np.asarray(prob.quotients @ prob.coefficients(u))


def modular_Ms(prob: AssembledProblem, u: CoefficientVector) -> float:
    """Energy modular: sum of w M(D^s u) over the pair quadrature."""
    with np.errstate(over="ignore", invalid="ignore"):
        return float(np.sum(prob.quad.weights * prob.young.primitive(holder_values(prob, u))))


def grad_Ms(prob: AssembledProblem, u: CoefficientVector) -> np.ndarray:
    """Galerkin image of the operator: sum of w m(D^s u) D^s phi_j."""
    z = holder_values(prob, u)
    return np.asarray(prob.quotients_t @ (prob.quad.weights * prob.young.signed_density(z)))


def potential_G(prob: AssembledProblem, u: CoefficientVector) -> float:
    values = prob.line_values @ prob.coefficients(u)
    return float(np.sum(prob.line_weights * prob.growth.G(values)))


def grad_G(prob: AssembledProblem, u: CoefficientVector) -> np.ndarray:
    values = prob.line_values @ prob.coefficients(u)
    return np.asarray(prob.line_values_t @ (prob.line_weights * prob.growth.g(values)))


def rayleigh_lambda(prob: AssembledProblem, u: CoefficientVector) -> float:
    """The multiplier (grad_Ms(u).u) / (grad_G(u).u)."""
    c = prob.coefficients(u)
    return float(np.dot(grad_Ms(prob, c), c) / np.dot(grad_G(prob, c), c))


def weak_residual(prob: AssembledProblem, lam: float, u: CoefficientVector) -> float:
    """max_j |grad_Ms(u)_j - lam grad_G(u)_j| / (1 + |grad_Ms(u)_j|)."""
    g_m = grad_Ms(prob, u)
    g_g = grad_G(prob, u)
    return float(np.max(np.abs(g_m - lam * g_g) / (1.0 + np.abs(g_m))))


def monotonicity_gap(prob: AssembledProblem, u: CoefficientVector, v: CoefficientVector) -> float:
    """(grad_Ms(u) - grad_Ms(v)) . (u - v), nonnegative for a monotone operator."""
    cu = prob.coefficients(u)
    cv = prob.coefficients(v)
    return float(np.dot(grad_Ms(prob, cu) - grad_Ms(prob, cv), cu - cv))
