"""Tests for the dense oracle, translation estimates and the property battery."""

import numpy as np
import pytest
from scipy import linalg

from orlicz_spectra.errors import InputError
from orlicz_spectra.solver import solve_first
from orlicz_spectra.validation import (
    SubtestResult,
    dense_oracle_p2,
    eigenpair_certificate,
    lemma_b1_test,
    oracle_cross_check,
    poincare_ratio,
    property_battery,
    translation_battery,
    translation_test,
)
from orlicz_spectra.young import GrowthFunction, GrowthKind, YoungFunction


class TestDenseOracle:
    """Tests for the p = 2 generalized eigensolver."""

    def test_pencil_residuals(self, problem_k7):
        """Every returned pair solves A v = lambda B v with B-orthonormal vectors."""
        oracle = dense_oracle_p2(problem_k7)
        assert oracle.eigenvalues.shape == (7,)
        assert np.all(np.diff(oracle.eigenvalues) > 0.0)
        assert np.max(oracle.residuals()) <= 1e-10
        assert oracle.orthonormality_error() <= 1e-10

    def test_subset(self, problem_k7):
        """n_eigs selects the lowest pairs."""
        full = dense_oracle_p2(problem_k7)
        low = dense_oracle_p2(problem_k7, 3)
        assert np.allclose(low.eigenvalues, full.eigenvalues[:3], rtol=1e-12)

    def test_two_by_two_closed_form(self):
        """The solver agrees with the characteristic polynomial of a 2x2 pencil."""
        a = np.array([[4.0, 1.0], [1.0, 3.0]])
        b = np.array([[2.0, 0.5], [0.5, 1.0]])
        coeffs = [np.linalg.det(b), -(a[0, 0] * b[1, 1] + a[1, 1] * b[0, 0] - 2.0 * a[0, 1] * b[0, 1]), np.linalg.det(a)]
        expected = np.sort(np.roots(coeffs))
        assert np.allclose(linalg.eigh(a, b, eigvals_only=True), expected, rtol=1e-12)

    def test_even_odd_alternation(self, problem_k7):
        """On a symmetric interval the modes alternate between even and odd."""
        vectors = dense_oracle_p2(problem_k7, 3).eigenvectors
        assert np.allclose(vectors[:, 0], vectors[::-1, 0], atol=1e-8)
        assert np.allclose(vectors[:, 1], -vectors[::-1, 1], atol=1e-8)
        assert np.allclose(vectors[:, 2], vectors[::-1, 2], atol=1e-8)

    def test_rejects_nonlinear(self, problem_p3):
        """Only M(t) = t^2/2 with g(t) = t qualifies."""
        with pytest.raises(InputError):
            dense_oracle_p2(problem_p3)

    def test_rejects_bad_count(self, problem_k3):
        """n_eigs must lie in [1, k]."""
        with pytest.raises(InputError):
            dense_oracle_p2(problem_k3, 4)


class TestTranslation:
    """Tests for the translation estimates."""

    def test_zero_function(self, problem_k3):
        """u = 0 gives 0 <= 0."""
        report = translation_test(problem_k3.basis, problem_k3.young, np.zeros(3), 0.1, problem_k3.quad)
        assert report.lhs == 0.0
        assert report.rhs == 0.0
        assert report.ok
        modular = lemma_b1_test(problem_k3.basis, problem_k3.young, np.zeros(3), 0.1, problem_k3.quad)
        assert modular.lhs == 0.0
        assert modular.ok

    def test_small_shift(self, problem_k1):
        """A tiny shift makes the left side negligible."""
        report = translation_test(problem_k1.basis, problem_k1.young, np.ones(1), 1e-6, problem_k1.quad)
        assert report.ok
        assert report.lhs <= 1e-3 * report.rhs

    def test_single_hat_modular(self, problem_k1):
        """The modular estimate holds strictly for one hat at h = 1/4."""
        report = lemma_b1_test(problem_k1.basis, problem_k1.young, np.ones(1), 0.25, problem_k1.quad)
        assert report.ok
        assert report.lhs < report.rhs

    @pytest.mark.parametrize("h", [0.5, -0.5, float("nan")])
    def test_shift_range(self, problem_k1, h):
        """|h| must stay below 1/2."""
        with pytest.raises(InputError):
            translation_test(problem_k1.basis, problem_k1.young, np.ones(1), h)

    @pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
    @pytest.mark.parametrize("young", [YoungFunction.power(1.5), YoungFunction.power(3.0), YoungFunction.exp()])
    def test_random_sweep(self, problem_factory, s, young):
        """Both estimates hold for random functions and shifts."""
        prob = problem_factory(7, s=s, young=young, growth=GrowthFunction(GrowthKind.YOUNG, young=young))
        results = translation_battery(prob, trials=10, seed=3)
        for result in results:
            assert result.trials == 10
            assert result.ok, f"{result.name} failed for {young.name}, s={s}: {result.details}"


class TestSubtestResult:
    """Tests for sub-test bookkeeping."""

    def test_record(self):
        """Negative and NaN margins count as failures and keep the worst margin."""
        result = SubtestResult("demo", "x >= 0")
        result.record(0.5)
        result.record(-0.25, "negative")
        result.record(float("nan"), lambda: "nan")
        assert result.trials == 3
        assert result.failures == 2
        assert result.details == ["negative", "nan"]
        assert result.to_dict()["worst_margin"] is None

    def test_details_are_capped(self):
        """Only the first few failures are described."""
        result = SubtestResult("demo", "x >= 0")
        for j in range(20):
            result.record(-1.0, f"failure {j}")
        assert result.failures == 20
        assert len(result.details) == 5
        assert result.worst_margin == -1.0


class TestPropertyBattery:
    """Tests for the randomized battery."""

    def test_zero_trials(self, problem_k3):
        """trials = 0 gives an empty report."""
        report = property_battery(problem_k3, 0, seed=0)
        assert report.subtests == []
        assert report.total_trials == 0
        assert report.ok

    @pytest.mark.parametrize("name", ["problem_k7", "problem_p3", "problem_exp"])
    def test_no_failures(self, name, request):
        """Built-in functions pass every sub-test."""
        report = property_battery(request.getfixturevalue(name), 100, seed=7)
        failed = {t.name: t.details for t in report.failed()}
        assert report.ok, f"{name}: failures {failed}"
        names = {t.name for t in report.subtests}
        assert {"young_inequality", "monotone_density", "operator_monotonicity", "gradient_consistency"} <= names

    def test_reproducible(self, problem_k3):
        """The same seed yields the same report."""
        first = property_battery(problem_k3, 20, seed=11).to_dict()
        second = property_battery(problem_k3, 20, seed=11).to_dict()
        assert first == second

    def test_negative_control(self, problem_factory):
        """A planted dip in m is reported."""
        young = YoungFunction.from_table([[1.0, 2.0], [2.0, 1.0], [3.0, 3.0]])
        prob = problem_factory(3, young=young, growth=GrowthFunction(GrowthKind.YOUNG, young=young))
        report = property_battery(prob, 50, seed=0)
        failed = {t.name for t in report.failed()}
        assert "monotone_density" in failed
        assert "young_invariants" in failed
        assert report.total_failures >= 1

    @pytest.mark.slow
    def test_full_battery(self, problem_k7):
        """A thousand trials per sub-test pass for p = 2."""
        assert property_battery(problem_k7, 1000, seed=0).ok


class TestCertificates:
    """Tests for eigenpair certificates and the oracle cross-check."""

    def test_certificate_of_solution(self, problem_p3, solver_config):
        """A solver pair passes its certificate."""
        pair = solve_first(problem_p3, solver_config)
        certificate = eigenpair_certificate(problem_p3, pair)
        assert certificate.ok, f"certificate failed: {certificate.to_dict()}"
        assert certificate.lower_bound >= 0.0

    def test_certificate_of_perturbed_pair(self, problem_p3, solver_config):
        """Moving u off the manifold breaks the certificate."""
        from dataclasses import replace

        pair = solve_first(problem_p3, solver_config)
        bad = replace(pair, u=1.01 * pair.u)
        certificate = eigenpair_certificate(problem_p3, bad)
        assert not certificate.on_manifold
        assert not certificate.c_matches
        assert not certificate.ok

    def test_oracle_cross_check(self, problem_k7, solver_config):
        """Levels 1 and 2 agree with the oracle."""
        result = oracle_cross_check(problem_k7, 2, solver_config)
        assert result.trials == 2
        assert result.ok, f"oracle disagreement: {result.details}"

    def test_poincare_ratio(self, problem_k7):
        """The sampled ratio of the function norm to the energy norm is finite and positive."""
        ratio = poincare_ratio(problem_k7, samples=8, seed=0)
        assert 0.0 < ratio < np.inf
