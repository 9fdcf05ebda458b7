"""Dense generalized eigensolver for the linear case p = 2, g(t) = t."""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from orlicz_spectra.errors import InputError
from orlicz_spectra.operator import AssembledProblem
from orlicz_spectra.young import YoungKind

logger = logging.getLogger(__name__)

MAX_ORACLE_DIM = 256


@dataclass(frozen=True, eq=False)
class OracleSpectrum:
    """Ascending eigenvalues of A v = lambda B v with B-orthonormal eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    stiffness: np.ndarray
    mass: np.ndarray

    def residuals(self) -> np.ndarray:
        """|A v - lambda B v| / |A v| per pair."""
        av = self.stiffness @ self.eigenvectors
        bv = self.mass @ self.eigenvectors
        return np.linalg.norm(av - bv * self.eigenvalues, axis=0) / np.linalg.norm(av, axis=0)

    def orthonormality_error(self) -> float:
        gram = self.eigenvectors.T @ self.mass @ self.eigenvectors
        return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))


def dense_oracle_p2(prob: AssembledProblem, n_eigs: int | None = None) -> OracleSpectrum:
    """Solve the assembled linear problem with a dense symmetric eigensolver.

    With M(t) = t^2/2 the gradient of M_s is u -> A u and the gradient of G
    is u -> B u, so the stationarity system is the pencil (A, B).

    Args:
        prob: Problem with a power-2 Young function and linear growth
        n_eigs: Number of lowest eigenpairs to return, all by default

    Returns:
        OracleSpectrum of the lowest n_eigs pairs

    Raises:
        InputError: If the problem is not linear or too large for a dense solve
    """
    young = prob.young
    if young.kind != YoungKind.POWER or young.p != 2.0 or not prob.growth.is_linear:
        raise InputError(f"dense oracle needs power(p=2) with g(t)=t, got {young.name} with {prob.growth.name}")
    if prob.k > MAX_ORACLE_DIM:
        raise InputError(f"dense oracle is limited to k <= {MAX_ORACLE_DIM}, got {prob.k}")
    count = prob.k if n_eigs is None else n_eigs
    if not 1 <= count <= prob.k:
        raise InputError(f"n_eigs must lie in [1, {prob.k}], got {n_eigs}")

    a = 0.5 * (prob.stiffness + prob.stiffness.T)
    b = 0.5 * (prob.mass + prob.mass.T)
    values, vectors = linalg.eigh(a, b, subset_by_index=[0, count - 1])
    logger.debug(f"Oracle at k={prob.k}: lowest eigenvalue {values[0]:.12g}")
    return OracleSpectrum(eigenvalues=values, eigenvectors=vectors, stiffness=prob.stiffness, mass=prob.mass)
