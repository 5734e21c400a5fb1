"""Entropy, relative entropy, entropy dissipation and the Csiszar-Kullback gap.

All integrands are extended continuously to the vacuum: x(ln x - 1) -> 0,
x ln(x/y) - (x - y) -> y as x -> 0, and (a-b)ln(a/b) -> 0 when a = b.  No
epsilon floors are used anywhere; a state with exactly one of u^a v^b, w^g
zero in some cell has infinite reaction dissipation, and that infinity is
reported as a value, not raised as an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.special import xlogy

from .grid import Grid1D, fisher_information, integrate
from .model import Equilibrium, MassPair, ReactionParams, compute_equilibrium, stoich_pow

if TYPE_CHECKING:  # pragma: no cover
    from .solver import State


@dataclass(frozen=True)
class EntropyReport:
    """Entropy diagnostics of one state.

    D = fisher_u + fisher_v + fisher_w + reaction_term, each nonnegative;
    reaction_term (and hence D) may be math.inf.
    """

    E: float
    E_rel: float
    D: float
    fisher_u: float
    fisher_v: float
    fisher_w: float
    reaction_term: float


def _entropy_density(f: np.ndarray) -> np.ndarray:
    # x(ln x - 1), with value 0 at x = 0
    return xlogy(f, f) - f


def entropy(g: Grid1D, s: "State") -> float:
    """Boltzmann entropy integral(sum_x x(ln x - 1)) of a state."""
    total = _entropy_density(s.u) + _entropy_density(s.v) + _entropy_density(s.w)
    return g.dx * float(total.sum())


def q_gap(x: float, x_ref: float) -> float:
    """Relative entropy density x ln(x/x_ref) - (x - x_ref), x_ref > 0."""
    if x_ref <= 0:
        raise ValueError("reference value must be positive")
    if x == 0:
        return x_ref
    return x * math.log(x / x_ref) - (x - x_ref)


def _species_gap(f: np.ndarray, ref: float) -> np.ndarray:
    """x ln(x/ref) - (x - ref) elementwise, continuous at x = 0.

    Evaluated as ref * ((1+h) log1p(h) - h) with h = x/ref - 1: the naive
    form cancels catastrophically near x = ref, where the true value is
    ~ (x-ref)^2 / (2 ref).  The density is provably >= 0, so residual
    rounding (~1e-32) is clamped away.
    """
    h = f / ref - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = ref * ((1.0 + h) * np.log1p(h) - h)
    return np.maximum(np.where(f == 0.0, ref, raw), 0.0)


def relative_entropy(g: Grid1D, s: "State", e: Equilibrium) -> float:
    """Entropy gap of a state relative to the equilibrium; always >= 0."""
    if min(e.a_inf, e.b_inf, e.c_inf) <= 0:
        raise ValueError("equilibrium with a zero component")
    total = (
        _species_gap(s.u, e.a_inf)
        + _species_gap(s.v, e.b_inf)
        + _species_gap(s.w, e.c_inf)
    )
    return g.dx * float(total.sum())


def entropy_vs_average(g: Grid1D, f: np.ndarray) -> float:
    """integral(f ln(f / mean(f))); the spatial part of the relative entropy.

    Since integral(f - mean(f)) vanishes under the midpoint rule, this
    equals the integral of the stable gap density relative to the mean.
    """
    fbar = integrate(g, f)
    if fbar == 0.0:
        return 0.0
    return g.dx * float(_species_gap(f, fbar).sum())


def reaction_dissipation_density(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(a - b) ln(a/b) elementwise, 0 where a == b, +inf where exactly one is 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = (a - b) * (np.log(a) - np.log(b))
    return np.where(a == b, 0.0, raw)


def dissipation(
    g: Grid1D, p: ReactionParams, s: "State", e: Equilibrium | None = None
) -> EntropyReport:
    """Entropy dissipation of a state, split into its four contributions.

    The equilibrium for the relative-entropy column is computed from the
    state's own masses unless one is supplied.
    """
    p.require_normalised("dissipation")
    if e is None:
        m = MassPair(
            p.gamma * integrate(g, s.u) + p.alpha * integrate(g, s.w),
            p.gamma * integrate(g, s.v) + p.beta * integrate(g, s.w),
        )
        e = compute_equilibrium(p, m)
    fu = fisher_information(g, s.u, p.d1)
    fv = fisher_information(g, s.v, p.d2)
    fw = fisher_information(g, s.w, p.d3)
    a = stoich_pow(s.u, p.alpha) * stoich_pow(s.v, p.beta)
    b = stoich_pow(s.w, p.gamma)
    r = reaction_dissipation_density(a, b)
    reaction = p.rate_factor * g.dx * float(r.sum())
    return EntropyReport(
        E=entropy(g, s),
        E_rel=relative_entropy(g, s, e),
        D=fu + fv + fw + reaction,
        fisher_u=fu,
        fisher_v=fv,
        fisher_w=fw,
        reaction_term=reaction,
    )


def l1_distances(g: Grid1D, s: "State", e: Equilibrium) -> tuple[float, float, float]:
    """L1 distances of (u, v, w) to the equilibrium constants."""
    return (
        integrate(g, np.abs(s.u - e.a_inf)),
        integrate(g, np.abs(s.v - e.b_inf)),
        integrate(g, np.abs(s.w - e.c_inf)),
    )


def ck_gap(
    g: Grid1D, p: ReactionParams, s: "State", e: Equilibrium, rtol: float = 1e-10
) -> tuple[float, float]:
    """Relative entropy vs. the sum of squared L1 distances to equilibrium.

    The Csiszar-Kullback bound asserts lhs >= C * rhs over the conservation
    manifold, so the state must carry the same masses as the equilibrium.
    """
    m1_s = p.gamma * integrate(g, s.u) + p.alpha * integrate(g, s.w)
    m2_s = p.gamma * integrate(g, s.v) + p.beta * integrate(g, s.w)
    m1_e = p.gamma * e.a_inf + p.alpha * e.c_inf
    m2_e = p.gamma * e.b_inf + p.beta * e.c_inf
    if not (
        math.isclose(m1_s, m1_e, rel_tol=rtol) and math.isclose(m2_s, m2_e, rel_tol=rtol)
    ):
        raise ValueError(
            f"state masses ({m1_s}, {m2_s}) do not match the equilibrium's "
            f"({m1_e}, {m2_e})"
        )
    du, dv, dw = l1_distances(g, s, e)
    return relative_entropy(g, s, e), du * du + dv * dv + dw * dw
