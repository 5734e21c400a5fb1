"""Problem definition: reaction parameters, rescaling, masses, equilibrium.

The model is the reversible mass-action reaction  a*U + b*V <-> c*W  with
stoichiometric exponents (alpha, beta, gamma), forward/backward rates
(ell, k) and one diffusivity per species, posed on the normalised interval
[0,1] with no-flux boundaries.  Two weighted masses are conserved:

    M1 = integral(gamma*u + alpha*w),    M2 = integral(gamma*v + beta*w).

For given positive masses there is a unique positive constant state
(a_inf, b_inf, c_inf) that balances the reaction, a_inf^alpha * b_inf^beta
= c_inf^gamma, and carries those masses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def stoich_pow(x, e: float):
    """x**e, using repeated multiplication when e is a small integer.

    Keeps integer-exponent powers exact-ish and fast; falls back to the
    general pow for non-integer exponents.  Works on scalars and arrays.
    """
    n = int(e)
    if n == e and 1 <= n <= 4:
        out = x
        for _ in range(n - 1):
            out = out * x
        return out
    return x**e


@dataclass(frozen=True)
class ReactionParams:
    """Stoichiometry, reaction rates and diffusivities of the system."""

    alpha: float
    beta: float
    gamma: float
    ell: float = 1.0
    k: float = 1.0
    d1: float = 1.0
    d2: float = 1.0
    d3: float = 1.0

    def __post_init__(self):
        if not (self.alpha >= 1 and self.beta >= 1 and self.gamma >= 1):
            raise ValueError("stoichiometric exponents must be >= 1")
        for name in ("ell", "k", "d1", "d2", "d3"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")

    @property
    def is_normalised(self) -> bool:
        """True when the rate constants are already 1."""
        return self.ell == 1.0 and self.k == 1.0

    @property
    def rate_factor(self) -> float:
        """Residual multiplier on the normalised reaction rate.

        When alpha + beta == gamma the rates cannot be scaled away; the
        normalised rate u^alpha v^beta - w^gamma keeps the documented
        common factor (ell/k)^(1/gamma).  It is 1 in every other case
        (where the system is expected to be pre-normalised).
        """
        if self.alpha + self.beta == self.gamma:
            return (self.ell / self.k) ** (1.0 / self.gamma)
        return 1.0

    def require_normalised(self, where: str) -> None:
        """Raise unless rates are 1 or absorbed into rate_factor."""
        if self.alpha + self.beta != self.gamma and not self.is_normalised:
            raise ValueError(
                f"{where} expects normalised rates ell=k=1; "
                "apply rescale_params first"
            )


@dataclass(frozen=True)
class MassPair:
    """The two conserved weighted masses (domain measure 1)."""

    m1: float
    m2: float

    def __post_init__(self):
        if not (self.m1 > 0 and self.m2 > 0):
            raise ValueError("masses must be > 0")


@dataclass(frozen=True)
class Equilibrium:
    """Detailed-balance constant state and the defect of its balance law."""

    a_inf: float
    b_inf: float
    c_inf: float
    residual: float


@dataclass(frozen=True)
class RescaleReport:
    """Scale factors that normalise rates to ell = k = 1.

    The transformation maps a solution (u, v, w)(t, x) of the original
    system to (u, v, w)(t*time_factor, x*space_factor)/concentration_factor
    solving the normalised one; diffusivities pick up
    time_factor/space_factor**2.  When alpha + beta == gamma no such
    factors exist and the leftover (ell/k)^(1/gamma) is reported in
    third_equation_factor instead (1.0 otherwise).
    """

    time_factor: float
    space_factor: float
    concentration_factor: float
    third_equation_factor: float
    rescaled: ReactionParams


def rescale_params(p: ReactionParams, domain_measure: float = 1.0) -> RescaleReport:
    """Normalise reaction rates to 1 by rescaling time, space and concentration.

    For alpha + beta != gamma the factors are

        concentration_factor = (k/ell)^(1/(alpha+beta-gamma))
        time_factor          = (k/ell)^((1-gamma)/(alpha+beta-gamma)) / k
        space_factor         = domain_measure   (1-D domain)

    and the rescaled diffusivities are d_i * time_factor / space_factor**2.
    For alpha + beta == gamma only the residual third_equation_factor
    (ell/k)^(1/gamma) remains; it multiplies the normalised rate during
    time stepping (see solver.reaction_rate).
    """
    if not domain_measure > 0:
        raise ValueError("domain_measure must be > 0")
    space = domain_measure  # |Omega|^(1/N) with N = 1
    if p.alpha + p.beta == p.gamma:
        # Only the ratio ell/k matters here and it cannot be scaled away;
        # to keep it in play during time stepping, pass the original
        # parameters to the solver (rate_factor reapplies it).
        d_scale = 1.0 / space**2
        rescaled = ReactionParams(
            p.alpha, p.beta, p.gamma, 1.0, 1.0,
            p.d1 * d_scale, p.d2 * d_scale, p.d3 * d_scale,
        )
        return RescaleReport(
            time_factor=1.0,
            space_factor=space,
            concentration_factor=1.0,
            third_equation_factor=(p.ell / p.k) ** (1.0 / p.gamma),
            rescaled=rescaled,
        )
    expo = p.alpha + p.beta - p.gamma
    conc = (p.k / p.ell) ** (1.0 / expo)
    time = (p.k / p.ell) ** ((1.0 - p.gamma) / expo) / p.k
    d_scale = time / space**2
    rescaled = ReactionParams(
        p.alpha, p.beta, p.gamma, 1.0, 1.0,
        p.d1 * d_scale, p.d2 * d_scale, p.d3 * d_scale,
    )
    return RescaleReport(
        time_factor=time,
        space_factor=space,
        concentration_factor=conc,
        third_equation_factor=1.0,
        rescaled=rescaled,
    )


def _balance_defect(p: ReactionParams, m: MassPair, c: float) -> float:
    """(M1/g - c*a/g)^a (M2/g - c*b/g)^b - c^g; decreasing in c."""
    a = (m.m1 - p.alpha * c) / p.gamma
    b = (m.m2 - p.beta * c) / p.gamma
    return stoich_pow(a, p.alpha) * stoich_pow(b, p.beta) - stoich_pow(c, p.gamma)


def compute_equilibrium(
    p: ReactionParams, m: MassPair, tol: float = 1e-14, max_iter: int = 200
) -> Equilibrium:
    """Solve for the unique detailed-balance state with the given masses.

    c_inf is the root of (M1/g - c*a/g)^a (M2/g - c*b/g)^b = c^g on
    [0, min(M1/alpha, M2/beta)].  The left side is strictly decreasing and
    the right side strictly increasing, so plain bisection cannot fail.
    """
    p.require_normalised("compute_equilibrium")
    lo = 0.0
    hi = min(m.m1 / p.alpha, m.m2 / p.beta)
    # defect(0) > 0 and defect(hi) < 0 for positive masses
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        d = _balance_defect(p, m, mid)
        if d == 0.0:
            lo = hi = mid
            break
        if d > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    else:
        raise RuntimeError(
            "equilibrium bisection did not converge; this contradicts the "
            "monotone structure of the balance equation"
        )
    c = 0.5 * (lo + hi)
    a = (m.m1 - p.alpha * c) / p.gamma
    b = (m.m2 - p.beta * c) / p.gamma
    res = abs(stoich_pow(a, p.alpha) * stoich_pow(b, p.beta) - stoich_pow(c, p.gamma))
    return Equilibrium(a_inf=a, b_inf=b, c_inf=c, residual=res)


def equilibrium_residual(e: Equilibrium, p: ReactionParams) -> float:
    """Re-evaluate the balance defect |a^alpha b^beta - c^gamma|."""
    return abs(
        stoich_pow(e.a_inf, p.alpha) * stoich_pow(e.b_inf, p.beta)
        - stoich_pow(e.c_inf, p.gamma)
    )


def residual_scale(m: MassPair, p: ReactionParams) -> float:
    """Natural size of the balance defect, max(1, M1, M2)^max(a+b, g)."""
    return max(1.0, m.m1, m.m2) ** max(p.alpha + p.beta, p.gamma)


def undo_rescale(r: RescaleReport) -> ReactionParams:
    """Invert a rescale report, recovering the original parameters.

    Unavailable when alpha + beta == gamma: there the rates are determined
    only up to the common third_equation_factor.
    """
    p = r.rescaled
    if p.alpha + p.beta == p.gamma:
        raise ValueError(
            "rates are determined only up to a common factor when "
            "alpha + beta == gamma"
        )
    k = r.concentration_factor ** (1.0 - p.gamma) / r.time_factor
    ell = k / r.concentration_factor ** (p.alpha + p.beta - p.gamma)
    d_scale = r.time_factor / r.space_factor**2
    return ReactionParams(
        p.alpha, p.beta, p.gamma, ell, k,
        p.d1 / d_scale, p.d2 / d_scale, p.d3 / d_scale,
    )


def check_equilibrium_conservation(
    e: Equilibrium, p: ReactionParams, m: MassPair, rtol: float = 1e-12
) -> bool:
    """Both conservation identities hold to the given relative tolerance."""
    ok1 = math.isclose(p.gamma * e.a_inf + p.alpha * e.c_inf, m.m1, rel_tol=rtol)
    ok2 = math.isclose(p.gamma * e.b_inf + p.beta * e.c_inf, m.m2, rel_tol=rtol)
    return ok1 and ok2
