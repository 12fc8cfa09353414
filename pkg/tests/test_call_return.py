import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optsplit import (
    MetaPolicy,
    Mdp,
    build_gating_models,
    check_regular,
    direct_solve,
    induce_chain,
    iterate_splitting,
    option_models,
    option_recursion_residuals,
    option_reward_model,
    option_transition_model,
    splitting_identity,
)
from optsplit.bench.generators import scalar_problem, two_state_chain

from _instances import neumann, random_instance


def some_option(i):
    mdp, options, _ = random_instance(i)
    return mdp, options[i % len(options)]


class TestLimits:
    def test_beta_one(self):
        mdp, w = some_option(1)
        w = w.with_termination(np.ones(mdp.n_states))
        chain = induce_chain(mdp, w.policy)
        np.testing.assert_allclose(option_reward_model(mdp, w), chain.r_pi, atol=1e-15)
        np.testing.assert_allclose(option_transition_model(mdp, w), mdp.gamma * chain.p_pi, atol=1e-15)

    def test_beta_zero(self):
        mdp, w = some_option(2)
        w = w.with_termination(np.zeros(mdp.n_states))
        m = option_models(mdp, w)
        assert np.all(m.f_w == 0)
        np.testing.assert_allclose(m.b_w, direct_solve(mdp, w.policy), atol=1e-12)

    def test_scalar(self):
        mdp, (w,), _ = scalar_problem(0.9, 1.0, 0.5)
        m = option_models(mdp, w)
        assert m.b_w[0] == pytest.approx(1 / 0.55, abs=1e-12)
        assert m.f_w[0, 0] == pytest.approx(0.45 / 0.55, abs=1e-12)

    def test_two_state(self):
        mdp, (w,), _ = two_state_chain(0.5, beta=0.0)
        np.testing.assert_allclose(option_reward_model(mdp, w), [1.0, 2.0], atol=1e-15)

    def test_zero_reward(self):
        mdp, w = some_option(3)
        mdp = Mdp(mdp.transition, np.zeros_like(mdp.reward), mdp.gamma)
        assert np.all(option_reward_model(mdp, w) == 0)

    def test_against_series(self):
        mdp, w = some_option(4)
        m = option_models(mdp, w)
        np.testing.assert_allclose(m.b_w, neumann(mdp.gamma * m.p_w_sharp, m.r_w), atol=1e-10)


class TestSplitting:
    @settings(max_examples=40, deadline=None)
    @given(i=st.integers(0, 10_000))
    def test_identity_and_regularity(self, i):
        mdp, w = some_option(i)
        m = option_models(mdp, w)
        p_pi = induce_chain(mdp, w.policy).p_pi
        assert np.max(np.abs(m.p_w_sharp + m.p_w_bot - p_pi)) <= 1e-12
        s = splitting_identity(mdp, w)
        rep = check_regular(s)
        assert rep.is_regular and rep.rho < 1.0

    @settings(max_examples=40, deadline=None)
    @given(i=st.integers(0, 10_000))
    def test_recursions_hold(self, i):
        mdp, w = some_option(i)
        rb, rf = option_recursion_residuals(mdp, w, option_models(mdp, w))
        assert rb <= 1e-10 and rf <= 1e-10

    def test_single_option_matches_gating(self):
        for i in range(10):
            mdp, w = some_option(i)
            cr = option_models(mdp, w)
            g = build_gating_models(mdp, [w], MetaPolicy.uniform(mdp.n_states, 1))
            assert np.max(np.abs(cr.b_w - g.b)) <= 1e-12
            assert np.max(np.abs(cr.f_w - g.f)) <= 1e-12

    def test_fixed_point_is_option_value(self):
        mdp, w = some_option(5)
        s = splitting_identity(mdp, w)
        r = option_models(mdp, w).r_w
        report = iterate_splitting(s, r)
        assert report.converged
        np.testing.assert_allclose(report.v, direct_solve(mdp, w.policy), atol=1e-8)

    def test_bad_policy_shape(self):
        mdp, w = some_option(6)
        other, _ = some_option(7)
        if other.n_states == mdp.n_states and other.n_actions == mdp.n_actions:
            pytest.skip("shapes coincide")
        with pytest.raises(ValueError):
            option_models(other, w)
