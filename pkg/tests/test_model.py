import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from revreact.model import (
    Equilibrium,
    MassPair,
    ReactionParams,
    check_equilibrium_conservation,
    compute_equilibrium,
    equilibrium_residual,
    rescale_params,
    residual_scale,
    stoich_pow,
    undo_rescale,
)

SQRT3 = 1.7320508075688773  # from a 40-digit bisection of a^2 = 3


def test_params_validation():
    with pytest.raises(ValueError):
        ReactionParams(0.5, 1, 1)
    with pytest.raises(ValueError):
        ReactionParams(1, 1, 1, ell=0.0)
    with pytest.raises(ValueError):
        ReactionParams(1, 1, 1, d2=-1.0)
    with pytest.raises(ValueError):
        MassPair(0.0, 1.0)


def test_stoich_pow_matches_general_pow():
    x = np.linspace(0.0, 3.0, 7)
    for e in (1, 2, 3, 4, 2.5, 7):
        np.testing.assert_allclose(stoich_pow(x, e), x**e, rtol=1e-15)


class TestRescale:
    def test_identity_rates(self):
        rep = rescale_params(ReactionParams(1, 1, 1))
        assert rep.concentration_factor == 1.0
        assert rep.time_factor == 1.0
        assert rep.space_factor == 1.0
        assert rep.third_equation_factor == 1.0
        assert rep.rescaled.ell == rep.rescaled.k == 1.0

    def test_general_case_by_hand(self):
        # (k/ell)^(1/1) = 0.5 and (k/ell)^0 / k = 0.5
        rep = rescale_params(ReactionParams(1, 1, 1, ell=4.0, k=2.0))
        assert rep.concentration_factor == pytest.approx(0.5, rel=1e-15)
        assert rep.time_factor == pytest.approx(0.5, rel=1e-15)

    def test_degenerate_stoichiometry_keeps_rate_ratio(self):
        rep = rescale_params(ReactionParams(1, 2, 3, ell=8.0, k=1.0))
        assert rep.third_equation_factor == pytest.approx(2.0, rel=1e-15)
        assert rep.rescaled.ell == rep.rescaled.k == 1.0
        # the ratio survives on the unnormalised params instead
        assert ReactionParams(1, 2, 3, ell=8.0, k=1.0).rate_factor == pytest.approx(2.0)

    @given(
        ell=st.floats(0.1, 10.0),
        k=st.floats(0.1, 10.0),
        alpha=st.integers(1, 3),
        beta=st.integers(1, 3),
        gamma=st.integers(1, 3),
        d=st.floats(0.1, 5.0),
        measure=st.floats(0.5, 2.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_round_trip(self, ell, k, alpha, beta, gamma, d, measure):
        if alpha + beta == gamma:
            return
        p = ReactionParams(alpha, beta, gamma, ell, k, d, 2 * d, 3 * d)
        rep = rescale_params(p, measure)
        q = undo_rescale(rep)
        for name in ("ell", "k", "d1", "d2", "d3"):
            assert getattr(q, name) == pytest.approx(getattr(p, name), rel=1e-14)

    def test_undo_unavailable_for_degenerate_stoichiometry(self):
        rep = rescale_params(ReactionParams(1, 2, 3, ell=8.0, k=1.0))
        with pytest.raises(ValueError):
            undo_rescale(rep)


class TestEquilibrium:
    def test_symmetric_case_exact(self):
        eq = compute_equilibrium(ReactionParams(1, 1, 1), MassPair(2, 2))
        assert abs(eq.a_inf - 1) <= 1e-14
        assert abs(eq.b_inf - 1) <= 1e-14
        assert abs(eq.c_inf - 1) <= 1e-14

    def test_quadratic_case(self):
        # M1=3, M2=2 reduces to a^2 = 3 by eliminating b = a - 1, c = 3 - a
        eq = compute_equilibrium(ReactionParams(1, 1, 1), MassPair(3, 2))
        assert eq.a_inf == pytest.approx(SQRT3, abs=2e-14)
        assert eq.b_inf == pytest.approx(SQRT3 - 1, abs=2e-14)
        assert eq.c_inf == pytest.approx(3 - SQRT3, abs=2e-14)
        assert abs(eq.a_inf * eq.b_inf - eq.c_inf) < 1e-13

    def test_mixed_exponent_case(self):
        # root of (2-2c)^2 (1-c) = c on [0,1]; independent 200-step bisection
        # at 40-digit precision gives exactly c = 0.5 (check: 1 * 0.5 = 0.5)
        eq = compute_equilibrium(ReactionParams(2, 1, 1), MassPair(2, 1))
        assert eq.c_inf == pytest.approx(0.5, abs=1e-14)
        assert eq.a_inf == pytest.approx(1.0, abs=1e-14)
        assert eq.b_inf == pytest.approx(0.5, abs=1e-14)

    def test_requires_normalised_rates(self):
        with pytest.raises(ValueError):
            compute_equilibrium(ReactionParams(1, 1, 1, ell=2.0), MassPair(1, 1))

    @given(
        alpha=st.integers(1, 3),
        beta=st.integers(1, 3),
        gamma=st.integers(1, 3),
        m1=st.floats(0.5, 10.0),
        m2=st.floats(0.5, 10.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_residual_and_conservation(self, alpha, beta, gamma, m1, m2):
        p = ReactionParams(alpha, beta, gamma)
        m = MassPair(m1, m2)
        eq = compute_equilibrium(p, m)
        assert eq.a_inf > 0 and eq.b_inf > 0 and eq.c_inf > 0
        assert eq.residual <= 1e-12 * residual_scale(m, p)
        assert check_equilibrium_conservation(eq, p, m)

    def test_monotone_in_m1(self):
        p = ReactionParams(2, 1, 3)
        c_values = [
            compute_equilibrium(p, MassPair(m1, 4.0)).c_inf
            for m1 in np.linspace(0.5, 12.0, 24)
        ]
        assert all(b >= a - 1e-12 for a, b in zip(c_values, c_values[1:]))


def test_equilibrium_residual_examples():
    p = ReactionParams(1, 1, 1)
    assert equilibrium_residual(Equilibrium(1, 1, 1, 0), p) == 0.0
    assert equilibrium_residual(Equilibrium(SQRT3, SQRT3 - 1, 3 - SQRT3, 0), p) <= 1e-15
    assert equilibrium_residual(Equilibrium(1, 1, 2, 0), p) == 1.0


def test_residual_reevaluation_matches_solver():
    p = ReactionParams(3, 2, 2)
    m = MassPair(7.0, 5.0)
    eq = compute_equilibrium(p, m)
    assert equilibrium_residual(eq, p) == pytest.approx(eq.residual, abs=1e-16)
