"""Tests for meshes, hat bases and the pair quadrature."""

import math

import numpy as np
import pytest
from scipy import integrate

from orlicz_spectra.errors import InputError
from orlicz_spectra.mesh import (
    PairRegion,
    build_mesh,
    build_pair_quadrature,
    exterior_tail_change,
    holder_quotient,
    quotient_matrix,
)
from orlicz_spectra.young import YoungFunction


class TestMesh:
    """Tests for uniform meshes."""

    def test_single_node(self):
        """k = 1 on (-1, 1) has its node at 0."""
        mesh, basis = build_mesh(-1.0, 1.0, 1, 0.5)
        assert mesh.nodes.tolist() == [0.0]
        assert mesh.h == 1.0
        assert basis.size == 1

    def test_three_nodes(self):
        """k = 3 on (-1, 1) is the quarter partition."""
        mesh, _ = build_mesh(-1.0, 1.0, 3, 0.5)
        assert mesh.nodes.tolist() == [-0.5, 0.0, 0.5]

    @pytest.mark.parametrize("args", [(-1.0, 1.0, 0, 0.5), (-1.0, 1.0, 3, 0.0), (-1.0, 1.0, 3, 1.0), (1.0, -1.0, 3, 0.5)])
    def test_invalid(self, args):
        """k = 0, s outside (0, 1) and empty domains are rejected."""
        with pytest.raises(InputError):
            build_mesh(*args)

    def test_refine_nests(self):
        """Refinement keeps every coarse node."""
        mesh, _ = build_mesh(-1.0, 1.0, 7, 0.3)
        fine = mesh.refine()
        assert fine.k == 15
        assert set(mesh.nodes.tolist()) <= set(fine.nodes.tolist())


class TestBasis:
    """Tests for hat functions."""

    def test_partition_of_unity_inside(self):
        """Hat values sum to 1 away from the boundary cells."""
        _, basis = build_mesh(-1.0, 1.0, 7, 0.5)
        x = np.linspace(-0.74, 0.74, 33)
        sums = np.asarray(basis.values(x).sum(axis=1)).ravel()
        assert np.allclose(sums, 1.0)

    def test_vanishes_outside(self):
        """Every hat is zero outside (a, b)."""
        _, basis = build_mesh(-1.0, 1.0, 3, 0.5)
        values = basis.values([-3.0, -1.0, 1.0, 2.5])
        assert values.nnz == 0
        assert basis.evaluate(np.ones(3), [-3.0, 2.5]).tolist() == [0.0, 0.0]

    def test_evaluate_interpolates(self):
        """evaluate agrees with the sparse value matrix."""
        _, basis = build_mesh(-1.0, 1.0, 7, 0.5)
        c = np.arange(1.0, 8.0)
        x = np.linspace(-1.2, 1.2, 57)
        assert np.allclose(basis.values(x) @ c, basis.evaluate(c, x))

    def test_prolong_preserves_function(self, rng):
        """A prolonged function has the same values on the coarse grid."""
        _, coarse = build_mesh(-1.0, 1.0, 3, 0.5)
        _, fine = build_mesh(-1.0, 1.0, 7, 0.5)
        c = rng.standard_normal(3)
        fine_c = coarse.prolong(c, fine)
        x = np.linspace(-1.0, 1.0, 41)
        assert np.allclose(coarse.evaluate(c, x), fine.evaluate(fine_c, x))
        assert np.allclose(coarse.embedding(fine) @ c, fine_c)

    def test_wrong_shape(self):
        """Coefficient vectors must match the basis."""
        _, basis = build_mesh(-1.0, 1.0, 3, 0.5)
        with pytest.raises(InputError):
            basis.evaluate(np.ones(4), [0.0])


class TestHolderQuotient:
    """Tests for single Hoelder quotients."""

    def test_node_to_boundary(self):
        """(1 - 0) / 1^0.5 = 1."""
        _, basis = build_mesh(-1.0, 1.0, 1, 0.5)
        assert holder_quotient([1.0], basis, 0.0, 1.0) == 1.0

    def test_half_way(self):
        """(1 - 0.5) / 0.5^0.5 = 0.7071."""
        _, basis = build_mesh(-1.0, 1.0, 1, 0.5)
        assert holder_quotient([1.0], basis, 0.0, 0.5) == pytest.approx(0.5 / math.sqrt(0.5))

    def test_equal_values(self):
        """Points outside the support give 0."""
        _, basis = build_mesh(-1.0, 1.0, 1, 0.5)
        assert holder_quotient([1.0], basis, 2.0, 3.0) == 0.0

    def test_diagonal(self):
        """x = y is excluded."""
        _, basis = build_mesh(-1.0, 1.0, 1, 0.5)
        with pytest.raises(InputError):
            holder_quotient([1.0], basis, 0.3, 0.3)


class TestPairQuadrature:
    """Tests for the graded pair rule."""

    @pytest.fixture(scope="class")
    def basis(self):
        """Three hats on (-1, 1) with s = 0.5."""
        return build_mesh(-1.0, 1.0, 3, 0.5)[1]

    @pytest.fixture(scope="class")
    def quad(self, basis):
        """Default pair rule."""
        return build_pair_quadrature(basis)

    def test_symmetric(self, quad):
        """The rule is invariant under x <-> y."""
        swapped = quad.swapped()
        forward = sorted(zip(quad.x.tolist(), quad.y.tolist(), quad.weights.tolist()))
        backward = sorted(zip(swapped.x.tolist(), swapped.y.tolist(), swapped.weights.tolist()))
        assert forward == backward

    def test_all_regions_present(self, quad):
        """Every region contributes nodes."""
        counts = quad.counts()
        assert set(counts) == {"near_diagonal", "far", "exterior_strip", "exterior_tail"}
        assert all(n > 0 for n in counts.values()), f"empty region in {counts}"

    def test_no_diagonal_nodes(self, quad):
        """No node sits on x = y and every weight is positive."""
        assert np.all(quad.x != quad.y)
        assert np.all(quad.weights > 0.0)

    def test_interior_area(self, quad):
        """Integrating |x - y| over the interior pairs gives the area of (-1, 1)^2."""
        inside = quad.mask(PairRegion.NEAR_DIAGONAL) | quad.mask(PairRegion.FAR)
        area = math.fsum(quad.weights[inside] * np.abs(quad.x[inside] - quad.y[inside]))
        assert area == pytest.approx(4.0, rel=1e-6)

    def test_interior_first_moment(self, quad):
        """Integrating |x - y|^2 over the interior pairs gives 8/3."""
        inside = quad.mask(PairRegion.NEAR_DIAGONAL) | quad.mask(PairRegion.FAR)
        value = math.fsum(quad.weights[inside] * (quad.x[inside] - quad.y[inside]) ** 2)
        assert value == pytest.approx(8.0 / 3.0, rel=1e-6)

    def test_far_cell_mass(self):
        """The kernel mass of the cell [0, 1/2] x [-1, -1/2] matches adaptive quadrature."""
        _, basis = build_mesh(-1.0, 1.0, 3, 0.5)
        quad = build_pair_quadrature(basis, order=8)
        cell = (quad.x >= 0.0) & (quad.x <= 0.5) & (quad.y >= -1.0) & (quad.y <= -0.5)
        expected, _ = integrate.dblquad(lambda y, x: 1.0 / (x - y), 0.0, 0.5, -1.0, -0.5, epsabs=1e-13, epsrel=1e-12)
        assert math.fsum(quad.weights[cell]) == pytest.approx(expected, rel=1e-8)

    def test_bad_parameters(self, basis):
        """Grading below 1, non-positive radius and zero order are rejected."""
        with pytest.raises(InputError):
            build_pair_quadrature(basis, grading=0.5)
        with pytest.raises(InputError):
            build_pair_quadrature(basis, exterior_radius=0.0)
        with pytest.raises(InputError):
            build_pair_quadrature(basis, order=0)

    def test_quotient_matrix(self, basis, quad):
        """Rows of the quotient matrix are D^s phi_j at the pair nodes."""
        matrix = quotient_matrix(basis, quad)
        assert matrix.shape == (len(quad), 3)
        j = 1
        direct = (basis.evaluate(np.eye(3)[j], quad.x) - basis.evaluate(np.eye(3)[j], quad.y)) / np.abs(quad.x - quad.y) ** 0.5
        assert np.allclose(matrix[:, j].toarray().ravel(), direct)

    def test_exterior_tail_change(self):
        """Doubling the exterior radius barely changes the energy of a hat."""
        _, basis = build_mesh(-1.0, 1.0, 3, 0.5)
        change = exterior_tail_change(basis, YoungFunction.power(2.0), np.array([0.5, 1.0, 0.5]), radius=40.0)
        assert change <= 1e-6
