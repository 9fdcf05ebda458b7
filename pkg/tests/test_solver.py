"""Tests for manifold normalization, KKT refinement and the minimax solver."""

import time

import numpy as np
import pytest

from orlicz_spectra.errors import ConvergenceError, InputError, LevelError
from orlicz_spectra.operator import modular_Ms, potential_G, weak_residual
from orlicz_spectra.solver import (
    Eigenpair,
    SolverConfig,
    continuation,
    kkt_refine,
    normalize_to_manifold,
    solve_first,
    solve_level,
)
from orlicz_spectra.validation.oracle import dense_oracle_p2
from orlicz_spectra.young import GrowthFunction, GrowthKind, YoungFunction


class TestSolverConfig:
    """Tests for solver settings."""

    @pytest.mark.parametrize(
        "kwargs",
        [{"kkt_tol": 0.0}, {"restarts": 0}, {"armijo": 1.0}, {"backtrack": 0.0}, {"sphere_samples": 0}],
    )
    def test_invalid(self, kwargs):
        """Out-of-range settings are rejected."""
        with pytest.raises(InputError):
            SolverConfig(**kwargs)

    def test_sphere_samples(self):
        """The default sample count grows with the level."""
        assert SolverConfig().samples_for(3) == 192
        assert SolverConfig(sphere_samples=10).samples_for(3) == 10


class TestNormalize:
    """Tests for scaling onto the constraint manifold."""

    @pytest.mark.parametrize("name", ["problem_k7", "problem_p3", "problem_exp"])
    def test_lands_on_manifold(self, name, request, rng):
        """The scaled vector has unit energy modular."""
        prob = request.getfixturevalue(name)
        for scale in (1e-3, 1.0, 1e3):
            u = normalize_to_manifold(prob, scale * rng.standard_normal(prob.k))
            assert abs(modular_Ms(prob, u) - 1.0) <= 1e-10, f"{name}: modular off at scale {scale}"

    def test_fixed_point(self, problem_exp, rng):
        """A vector already on the manifold is unchanged."""
        u = normalize_to_manifold(problem_exp, rng.standard_normal(7))
        assert np.allclose(normalize_to_manifold(problem_exp, u), u, rtol=1e-10, atol=0.0)

    def test_zero_vector(self, problem_k3):
        """The zero vector cannot be normalized."""
        with pytest.raises(InputError):
            normalize_to_manifold(problem_k3, np.zeros(3))


class TestKKTRefine:
    """Tests for the Newton polish."""

    def test_scalar_problem(self, problem_k1):
        """With one basis function the normalized start is already stationary."""
        pair = kkt_refine(problem_k1, np.array([0.3]), SolverConfig())
        assert pair.iterations == 0
        assert pair.residual <= 1e-8
        assert pair.u[0] > 0.0

    def test_oracle_fixed_point(self, problem_k7):
        """Starting at an oracle eigenvector converges at once with the oracle multiplier."""
        oracle = dense_oracle_p2(problem_k7, 2)
        pair = kkt_refine(problem_k7, oracle.eigenvectors[:, 1], SolverConfig(), level=2)
        assert pair.iterations <= 2
        assert pair.eigenvalue == pytest.approx(oracle.eigenvalues[1], rel=1e-8)

    def test_converges_from_perturbation(self, problem_p3, rng):
        """A nearby start for p = 3 converges to a certified stationary point."""
        first = solve_first(problem_p3, SolverConfig(restarts=2))
        pair = kkt_refine(problem_p3, first.u + 1e-3 * rng.standard_normal(7), SolverConfig())
        assert pair.residual <= 1e-8
        assert pair.eigenvalue == pytest.approx(first.eigenvalue, rel=1e-6)

    def test_iteration_limit(self, problem_exp, rng):
        """Hitting the Newton iteration limit reports the best iterate."""
        cfg = SolverConfig(newton_max_iter=1, kkt_tol=1e-300, manifold_tol=1e-300)
        with pytest.raises(ConvergenceError) as excinfo:
            kkt_refine(problem_exp, rng.standard_normal(7), cfg)
        assert excinfo.value.best is not None
        assert excinfo.value.diagnostics["dim"] == 7


class TestSolveFirst:
    """Tests for the first eigenpair."""

    def test_linear_case_matches_oracle(self, problem_k7, solver_config):
        """For p = 2 the first multiplier is the smallest generalized eigenvalue."""
        pair = solve_first(problem_k7, solver_config)
        oracle = dense_oracle_p2(problem_k7, 1)
        assert pair.eigenvalue == pytest.approx(oracle.eigenvalues[0], rel=1e-6)
        assert pair.c_value == pytest.approx(1.0 / oracle.eigenvalues[0], rel=1e-6)

    @pytest.mark.parametrize("name", ["problem_k7", "problem_p3", "problem_exp"])
    def test_stationarity(self, name, request, solver_config):
        """Converged pairs lie on the manifold, are stationary and report c = G(u)."""
        prob = request.getfixturevalue(name)
        pair = solve_first(prob, solver_config)
        assert abs(modular_Ms(prob, pair.u) - 1.0) <= 1e-8
        assert weak_residual(prob, pair.eigenvalue, pair.u) <= 1e-8
        assert pair.c_value == potential_G(prob, pair.u)
        assert pair.eigenvalue > 0.0

    def test_ground_state_is_even_and_positive(self, problem_k7, solver_config):
        """The first mode on a symmetric interval is even with nonnegative sign."""
        pair = solve_first(problem_k7, solver_config)
        assert np.allclose(pair.u, pair.u[::-1], atol=1e-6)
        assert np.all(pair.u > 0.0)

    def test_deterministic(self, problem_p3, solver_config):
        """A fixed seed reproduces the same pair bit for bit."""
        first = solve_first(problem_p3, solver_config)
        second = solve_first(problem_p3, solver_config)
        assert first.eigenvalue == second.eigenvalue
        assert np.array_equal(first.u, second.u)

    def test_to_dict(self, problem_k3, solver_config):
        """The record carries the level, dimension and plain-float coefficients."""
        data = solve_first(problem_k3, solver_config).to_dict()
        assert data["i"] == 1
        assert data["k"] == 3
        assert len(data["coefficients"]) == 3
        assert all(isinstance(c, float) for c in data["coefficients"])


class TestSolveLevel:
    """Tests for higher minimax levels."""

    def test_level_one_delegates(self, problem_k7, solver_config):
        """Level 1 agrees with solve_first."""
        a = solve_level(problem_k7, 1, solver_config)
        b = solve_first(problem_k7, solver_config)
        assert a.eigenvalue == pytest.approx(b.eigenvalue, rel=1e-6)
        assert a.c_value == pytest.approx(b.c_value, rel=1e-6)

    def test_level_exceeds_dimension(self, problem_k3, solver_config):
        """i = k + 1 has no admissible subspaces."""
        with pytest.raises(LevelError) as excinfo:
            solve_level(problem_k3, 4, solver_config)
        assert "level exceeds dimension" in str(excinfo.value)

    def test_level_zero(self, problem_k3, solver_config):
        """Levels start at 1."""
        with pytest.raises(InputError):
            solve_level(problem_k3, 0, solver_config)

    def test_second_level_matches_oracle(self, problem_k7, solver_config):
        """For p = 2 the second level is the second generalized eigenvalue."""
        pair = solve_level(problem_k7, 2, solver_config)
        oracle = dense_oracle_p2(problem_k7, 2)
        assert pair.eigenvalue == pytest.approx(oracle.eigenvalues[1], rel=1e-4)
        assert pair.minimax_value <= pair.c_value * (1.0 + 1e-8)

    def test_levels_are_ordered(self, problem_p3, solver_config):
        """c decreases and lambda increases from level 1 to level 2."""
        first = solve_level(problem_p3, 1, solver_config)
        second = solve_level(problem_p3, 2, solver_config)
        assert second.c_value <= first.c_value + 1e-6
        assert second.eigenvalue >= first.eigenvalue - 1e-6

    def test_exp_second_level(self, problem_exp, solver_config):
        """The non-doubling case still yields a certified second pair."""
        pair = solve_level(problem_exp, 2, solver_config)
        assert isinstance(pair, Eigenpair)
        assert pair.residual <= 1e-8
        assert abs(pair.modular - 1.0) <= 1e-8

    @pytest.mark.parametrize("i", [1, 2, 3])
    def test_random_frame_matches_oracle(self, problem_k7, rng, i):
        """From a random frame alone the maximin reaches the linear eigenvalue."""
        cfg = SolverConfig(restarts=1, sphere_samples=64)
        pair = solve_level(problem_k7, i, cfg, initial_frame=rng.standard_normal((7, i)))
        oracle = dense_oracle_p2(problem_k7, i)
        assert pair.eigenvalue == pytest.approx(oracle.eigenvalues[i - 1], rel=1e-4)

    @pytest.mark.parametrize("i", [1, 2])
    def test_power_growth(self, problem_q25, solver_config, i):
        """A nonlinear g with q != p yields certified pairs."""
        pair = solve_level(problem_q25, i, solver_config)
        assert weak_residual(problem_q25, pair.eigenvalue, pair.u) <= 1e-8
        assert abs(modular_Ms(problem_q25, pair.u) - 1.0) <= 1e-8
        assert pair.eigenvalue > 0.0

    @pytest.mark.slow
    def test_oracle_agreement_k31(self, problem_factory):
        """Levels 1 to 3 at k = 31 match the dense oracle for three s within one minute."""
        cfg = SolverConfig()
        start = time.perf_counter()
        for s in (0.3, 0.5, 0.7):
            prob = problem_factory(31, s=s)
            oracle = dense_oracle_p2(prob, 3)
            for i, rtol in ((1, 1e-6), (2, 1e-4), (3, 1e-4)):
                pair = solve_level(prob, i, cfg)
                assert pair.eigenvalue == pytest.approx(oracle.eigenvalues[i - 1], rel=rtol), f"level {i}, s={s}"
        assert time.perf_counter() - start <= 60.0

    @pytest.mark.slow
    def test_level_trends_k31(self, problem_factory):
        """Through level 4 at k = 31, c falls, lambda rises strictly and spreads by more than 2."""
        prob = problem_factory(31)
        pairs = [solve_level(prob, i, SolverConfig()) for i in (1, 2, 3, 4)]
        c = [p.c_value for p in pairs]
        lam = [p.eigenvalue for p in pairs]
        assert all(b <= a + 1e-6 for a, b in zip(c, c[1:], strict=False)), f"c values {c}"
        assert all(b > a for a, b in zip(lam, lam[1:], strict=False)), f"eigenvalues {lam}"
        assert lam[3] / lam[0] > 2.0

    @pytest.mark.slow
    def test_random_frames_k15(self, problem_factory, rng):
        """Random frames at k = 15 reach the linear levels 2 and 3."""
        prob = problem_factory(15)
        oracle = dense_oracle_p2(prob, 3)
        cfg = SolverConfig(restarts=1)
        for i in (2, 3):
            pair = solve_level(prob, i, cfg, initial_frame=rng.standard_normal((15, i)))
            assert pair.eigenvalue == pytest.approx(oracle.eigenvalues[i - 1], rel=1e-4), f"level {i}"

    @pytest.mark.slow
    @pytest.mark.parametrize("young", [YoungFunction.power(1.5), YoungFunction.power(3.0), YoungFunction.exp()])
    def test_certified_levels_k15(self, problem_factory, young):
        """Levels 1 and 2 at k = 15 satisfy the discrete eigenvalue equations."""
        prob = problem_factory(15, young=young, growth=GrowthFunction(GrowthKind.YOUNG, young=young))
        for i in (1, 2):
            pair = solve_level(prob, i, SolverConfig())
            assert abs(modular_Ms(prob, pair.u) - 1.0) <= 1e-8
            assert weak_residual(prob, pair.eigenvalue, pair.u) <= 1e-8
            assert pair.c_value == potential_G(prob, pair.u)


class TestContinuation:
    """Tests for nested warm starts."""

    def test_c_nondecreasing(self, problem_factory, solver_config):
        """c of level 1 does not drop under refinement."""
        problems = [problem_factory(k) for k in (3, 7, 15)]
        result = continuation(problems, 1, solver_config)
        assert result.dims == [3, 7, 15]
        assert all(p is not None for p in result.pairs)
        assert result.c_nondecreasing(), f"c values {result.c_values}"

    def test_level_error_is_recorded(self, problem_factory, solver_config):
        """A level above the coarse dimension fails there and succeeds after refinement."""
        problems = [problem_factory(k) for k in (1, 3)]
        result = continuation(problems, 2, solver_config)
        assert result.pairs[0] is None
        assert "level exceeds dimension" in result.errors[0]
        assert result.pairs[1] is not None

    def test_same_k_warm_start(self, problem_k7, solver_config):
        """Repeating a mesh reuses the converged pair within one iteration."""
        result = continuation([problem_k7, problem_k7], 1, solver_config)
        first, second = result.pairs
        assert second.iterations <= 1
        assert second.eigenvalue == pytest.approx(first.eigenvalue, rel=1e-10)

    def test_warm_start_nonlinear(self, problem_p3, solver_config):
        """A converged p = 3 pair passed back to solve_first is returned without restarts."""
        pair = solve_first(problem_p3, solver_config)
        again = solve_first(problem_p3, solver_config, initial=pair.u)
        assert again.iterations <= 1
        assert again.c_value == pytest.approx(pair.c_value, rel=1e-10)

    def test_rejects_unnested(self, problem_factory, solver_config):
        """Meshes must be successive dyadic refinements."""
        with pytest.raises(InputError):
            continuation([problem_factory(3), problem_factory(5)], 1, solver_config)

    @pytest.mark.slow
    def test_c_trend_k63(self, problem_factory):
        """c of level 1 is nondecreasing over k = 7, 15, 31, 63."""
        problems = [problem_factory(k) for k in (7, 15, 31, 63)]
        result = continuation(problems, 1, SolverConfig())
        assert result.c_nondecreasing(slack=1e-6), f"c values {result.c_values}"

    @pytest.mark.slow
    def test_eigenvalue_cauchy(self, problem_factory):
        """Successive differences of lambda_1 shrink over k = 15, 31, 63."""
        problems = [problem_factory(k) for k in (15, 31, 63)]
        lam = continuation(problems, 1, SolverConfig()).eigenvalues
        assert abs(lam[2] - lam[1]) < abs(lam[1] - lam[0]), f"eigenvalues {lam}"

    @pytest.mark.slow
    def test_eigenvalue_growth_k63(self, problem_factory):
        """The first five linear eigenvalues increase strictly and spread by more than 3."""
        oracle = dense_oracle_p2(problem_factory(63), 5)
        values = oracle.eigenvalues
        assert np.all(np.diff(values) > 0.0)
        assert values[4] / values[0] > 3.0
