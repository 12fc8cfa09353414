import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optsplit import (
    ComparisonError,
    Mdp,
    PolicyMatrix,
    Splitting,
    build_gating_models,
    check_regular,
    classic_splitting,
    compare_rates,
    direct_solve,
    preconditioned_system,
    rate_bound,
    scale_terminations,
    spectral_radius,
    splitting_from_options,
)
from optsplit.bench.generators import gen_random_mdp, scalar_problem
from optsplit.splitting import parse_method

from _instances import random_instance


def options_splitting(mdp, options, mu, c=1.0):
    return splitting_from_options(build_gating_models(mdp, scale_terminations(options, c), mu), mdp)


def two_state(gamma=0.5):
    return Mdp(np.array([[[0.0, 1.0]], [[0.0, 1.0]]]), np.array([[0.0], [1.0]]), gamma)


class TestFromOptions:
    def test_beta_one_is_richardson_form(self):
        mdp, options, mu = random_instance(7)
        base = [w.with_termination(np.ones_like(w.termination)) for w in options]
        s = splitting_from_options(build_gating_models(mdp, base, mu), mdp)
        np.testing.assert_array_equal(s.m, np.eye(mdp.n_states))

    def test_beta_zero(self):
        mdp, options, mu = random_instance(8)
        s = options_splitting(mdp, options, mu, c=0.0)
        np.testing.assert_allclose(s.m, s.a, atol=1e-15)
        assert np.all(s.n_mat == 0)

    def test_scalar(self):
        mdp, opts, mu = scalar_problem(0.9, 1.0, 0.5)
        s = options_splitting(mdp, opts, mu)
        assert s.m[0, 0] == pytest.approx(0.55)
        assert s.n_mat[0, 0] == pytest.approx(0.45)

    def test_inconsistent_triple_rejected(self):
        with pytest.raises(ValueError):
            Splitting(np.eye(2), np.eye(2), np.ones((2, 2)), "bad")

    def test_singular_m_rejected(self):
        with pytest.raises(np.linalg.LinAlgError, match="bad"):
            Splitting(np.eye(2), np.zeros((2, 2)), -np.eye(2), "bad")


class TestClassic:
    def test_gauss_seidel_two_state(self):
        mdp = two_state(0.5)
        s = classic_splitting(mdp, PolicyMatrix(np.ones((2, 1))), "gauss_seidel")
        np.testing.assert_allclose(s.m, [[1, 0], [0, 0.5]])
        np.testing.assert_allclose(s.n_mat, [[0, 0.5], [0, 0]])
        assert check_regular(s).rho == pytest.approx(0.0, abs=1e-15)

    def test_jacobi_zero_diagonal(self):
        p = np.array([[[0.0, 1.0]], [[1.0, 0.0]]])
        mdp = Mdp(p, np.ones((2, 1)), 0.9)
        s = classic_splitting(mdp, PolicyMatrix(np.ones((2, 1))), "jacobi")
        np.testing.assert_array_equal(s.m, np.eye(2))

    def test_richardson_matches_beta_one_bitwise(self):
        for i in range(10):
            mdp, options, mu = random_instance(i)
            ones = [w.with_termination(np.ones_like(w.termination)) for w in options]
            models = build_gating_models(mdp, ones, mu)
            opt = splitting_from_options(models, mdp)
            rich = classic_splitting(mdp, models.sigma, "richardson(1)")
            np.testing.assert_array_equal(opt.a, rich.a)
            np.testing.assert_array_equal(opt.m, rich.m)
            np.testing.assert_array_equal(opt.n_mat, rich.n_mat)

    def test_sor_one_is_gauss_seidel(self):
        mdp = gen_random_mdp(6, 2, 0.9, seed=3)
        pol = PolicyMatrix.uniform(6, 2)
        np.testing.assert_allclose(classic_splitting(mdp, pol, "sor(1)").m,
                                   classic_splitting(mdp, pol, "gauss-seidel").m)

    @pytest.mark.parametrize("method", ["sor(0)", "sor(2)", "richardson(0)", "richardson(-1)", "newton"])
    def test_bad_parameters(self, method):
        mdp = gen_random_mdp(3, 1, 0.9, seed=0)
        with pytest.raises(ValueError):
            classic_splitting(mdp, PolicyMatrix.uniform(3, 1), method)

    def test_parse_method(self):
        assert parse_method("sor(1.25)") == ("sor", 1.25)
        assert parse_method("Gauss-Seidel") == ("gauss_seidel", None)
        assert parse_method("options(0.5)") == ("options", 0.5)

    @pytest.mark.parametrize("seed", range(10))
    def test_gauss_seidel_regular_by_explicit_inverse(self, seed):
        mdp = gen_random_mdp(8, 3, 0.9, seed=seed)
        pol = PolicyMatrix.uniform(8, 3)
        s = classic_splitting(mdp, pol, "gauss_seidel")
        assert np.all(np.linalg.inv(s.m) >= -1e-10)
        assert np.all(s.n_mat >= -1e-10)
        assert check_regular(s).is_regular


class TestRegularity:
    @settings(max_examples=40, deadline=None)
    @given(i=st.integers(0, 10_000))
    def test_options_splitting_regular(self, i):
        mdp, options, mu = random_instance(i, sizes=(4, 16, 32))
        s = options_splitting(mdp, options, mu)
        report = check_regular(s)
        assert report.is_regular
        assert report.rho < 1
        assert np.max(np.abs(s.a - (s.m - s.n_mat))) <= 1e-12

    def test_report_locates_violation(self):
        a = np.array([[1.0, 0.5], [0.5, 1.0]])
        s = Splitting(a, np.eye(2), np.eye(2) - a, "neg")
        report = check_regular(s)
        assert not report.n_nonneg and not report.is_regular
        assert report.n_min == pytest.approx(-0.5)
        assert report.n_argmin in ((0, 1), (1, 0))


class TestPreconditioned:
    def test_beta_zero_rhs_is_solution(self):
        mdp, options, mu = random_instance(9)
        models = build_gating_models(mdp, scale_terminations(options, 0.0), mu)
        s = splitting_from_options(models, mdp)
        r = (models.sigma.probs * mdp.reward).sum(1)
        lhs, rhs = preconditioned_system(s, r)
        np.testing.assert_allclose(lhs, np.eye(mdp.n_states), atol=1e-12)
        np.testing.assert_allclose(rhs, direct_solve(mdp, models.sigma), atol=1e-10)

    def test_identity_preconditioner(self):
        mdp = gen_random_mdp(5, 2, 0.8, seed=1)
        s = classic_splitting(mdp, PolicyMatrix.uniform(5, 2), "richardson(1)")
        r = np.arange(5.0)
        lhs, rhs = preconditioned_system(s, r)
        np.testing.assert_allclose(lhs, s.a, atol=1e-15)
        np.testing.assert_allclose(rhs, r, atol=1e-15)

    def test_scalar(self):
        mdp, opts, mu = scalar_problem(0.9, 1.0, 0.5)
        lhs, rhs = preconditioned_system(options_splitting(mdp, opts, mu), [1.0])
        assert lhs[0, 0] == pytest.approx(0.1 / 0.55, abs=1e-12)
        assert rhs[0] == pytest.approx(1 / 0.55, abs=1e-12)

    def test_same_solution(self):
        mdp, options, mu = random_instance(10)
        s = options_splitting(mdp, options, mu, 0.4)
        r = np.random.default_rng(0).uniform(size=mdp.n_states)
        lhs, rhs = preconditioned_system(s, r)
        np.testing.assert_allclose(np.linalg.solve(lhs, rhs), np.linalg.solve(s.a, r), atol=1e-9)


class TestRateBound:
    def test_limits(self):
        mdp, options, mu = random_instance(11)
        assert rate_bound(options_splitting(mdp, options, mu, 0.0)) == pytest.approx((0, 0), abs=1e-12)
        ones = [w.with_termination(np.ones_like(w.termination)) for w in options]
        s = splitting_from_options(build_gating_models(mdp, ones, mu), mdp)
        assert rate_bound(s) == pytest.approx((mdp.gamma, mdp.gamma), abs=1e-9)

    def test_scalar_tight(self):
        mdp, opts, mu = scalar_problem(0.9, 1.0, 0.5)
        rho, bound = rate_bound(options_splitting(mdp, opts, mu))
        assert rho == pytest.approx(0.818182, abs=1e-6)
        assert bound == pytest.approx(0.818182, abs=1e-6)

    @settings(max_examples=40, deadline=None)
    @given(i=st.integers(0, 10_000), method=st.sampled_from(
        ["options", "jacobi", "gauss_seidel", "sor(1.3)", "richardson(0.8)"]))
    def test_norm_bounds_radius(self, i, method):
        mdp, options, mu = random_instance(i, sizes=(4, 12))
        if method == "options":
            s = options_splitting(mdp, options, mu)
        else:
            s = classic_splitting(mdp, PolicyMatrix.uniform(mdp.n_states, mdp.n_actions), method)
        rho, bound = rate_bound(s)
        assert rho <= bound + 1e-10


class TestCompare:
    def test_scalar(self):
        mdp, opts, mu = scalar_problem(0.9, 1.0, 1.0)
        ev = compare_rates(options_splitting(mdp, opts, mu, 1.0), options_splitting(mdp, opts, mu, 0.5))
        assert ev.rho_coarse == pytest.approx(0.9)
        assert ev.rho_fine == pytest.approx(0.818182, abs=1e-6)
        assert ev.ordered and ev.n_dominated

    def test_beta_zero_and_equal(self):
        mdp, options, mu = random_instance(12)
        s = options_splitting(mdp, options, mu)
        assert compare_rates(s, options_splitting(mdp, options, mu, 0.0)).rho_fine == pytest.approx(0, abs=1e-12)
        ev = compare_rates(s, options_splitting(mdp, options, mu))
        assert ev.rho_fine == ev.rho_coarse

    def test_different_systems(self):
        a, _, _ = random_instance(0, sizes=(6,))
        b = gen_random_mdp(6, a.n_actions, a.gamma, seed=999)
        pol = PolicyMatrix.uniform(6, a.n_actions)
        with pytest.raises(ComparisonError, match="different systems"):
            compare_rates(classic_splitting(a, pol, "jacobi"), classic_splitting(b, pol, "jacobi"))

    def test_hypothesis_violation(self):
        mdp, options, mu = random_instance(13)
        with pytest.raises(ComparisonError, match="hypothesis not met"):
            compare_rates(options_splitting(mdp, options, mu, 0.2), options_splitting(mdp, options, mu, 0.9))

    @settings(max_examples=40, deadline=None)
    @given(i=st.integers(0, 10_000), c=st.floats(0.0, 1.0))
    def test_monotone(self, i, c):
        mdp, options, mu = random_instance(i, sizes=(4, 16))
        ev = compare_rates(options_splitting(mdp, options, mu), options_splitting(mdp, options, mu, c))
        assert ev.ordered
        assert spectral_radius(np.zeros((1, 1))) <= ev.rho_fine <= ev.rho_coarse + 1e-9
