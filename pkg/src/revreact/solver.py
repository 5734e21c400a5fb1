"""IMEX time integration: explicit reaction, implicit (backward-Euler) diffusion.

Each step applies the pointwise reaction update

    u* = u - dt*alpha*R,   v* = v - dt*beta*R,   w* = w + dt*gamma*R,

with R the (normalised) mass-action rate, then solves one backward-Euler
tridiagonal system per species for the diffusion.  The same R appears in
all three updates, so the weighted masses gamma*int(u)+alpha*int(w) and
gamma*int(v)+beta*int(w) are conserved to rounding, and the no-flux
implicit diffusion conserves every cell sum exactly.

Positivity is enforced by step rejection followed by dt halving, never by
clipping: a step that produces a negative cell, or changes any cell by
more than the configured safety fraction, is discarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields as dataclass_fields

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .entropy import dissipation, l1_distances
from .grid import Grid1D, integrate, laplacian_neumann
from .model import Equilibrium, MassPair, ReactionParams, compute_equilibrium, stoich_pow

# floor, as a fraction of the state's sup, added to the denominator of the
# pointwise relative-change test so that cells at vacuum do not force
# rejections forever
_REL_CHANGE_FLOOR = 0.01


class StepUnderflowError(RuntimeError):
    """Adaptive dt fell below dt_min; the state resists the explicit reaction."""


@dataclass(frozen=True)
class State:
    """Concentrations at one instant; arrays share one grid."""

    t: float
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        if not (self.u.shape == self.v.shape == self.w.shape):
            raise ValueError("u, v, w must share one grid")

    @property
    def grid(self) -> Grid1D:
        return Grid1D(len(self.u))

    def min_concentration(self) -> float:
        return float(min(self.u.min(), self.v.min(), self.w.min()))


@dataclass(frozen=True)
class StepConfig:
    """Adaptive stepping controls."""

    dt_init: float = 1e-3
    dt_min: float = 1e-12
    safety: float = 0.2
    t_end: float = 10.0
    record_every: int = 20

    def __post_init__(self):
        if not (0 < self.dt_min <= self.dt_init):
            raise ValueError("need 0 < dt_min <= dt_init")
        if not (0 < self.safety <= 1):
            raise ValueError("need 0 < safety <= 1")
        if not self.t_end > 0:
            raise ValueError("t_end must be > 0")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass(frozen=True)
class DiagnosticsRow:
    """One recorded line of run diagnostics (also the CSV schema)."""

    t: float
    dt: float
    mass1: float
    mass2: float
    E: float
    E_rel: float
    D: float
    fisher_u: float
    fisher_v: float
    fisher_w: float
    reaction_term: float
    l1_u: float
    l1_v: float
    l1_w: float
    min_conc: float


CSV_COLUMNS = tuple(f.name for f in dataclass_fields(DiagnosticsRow))


@dataclass
class Trajectory:
    """Recorded snapshots and diagnostics of one run."""

    params: ReactionParams
    masses: MassPair
    equilibrium: Equilibrium
    states: list[State]
    rows: list[DiagnosticsRow]

    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.rows])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])


def reaction_rate(p: ReactionParams, u, v, w):
    """Normalised net forward rate R = u^alpha v^beta - w^gamma.

    R > 0 drives the forward reaction (u, v consumed, w produced).  When
    alpha + beta == gamma the leftover rate ratio multiplies R (see
    ReactionParams.rate_factor); otherwise the parameters are expected to
    be pre-normalised to ell = k = 1.
    """
    r = stoich_pow(u, p.alpha) * stoich_pow(v, p.beta) - stoich_pow(w, p.gamma)
    factor = p.rate_factor
    return r * factor if factor != 1.0 else r


class _DiffusionSolver:
    """Backward-Euler Neumann diffusion solves with cached factorizations.

    The update is solved in increment form, (I - dt*d*L) delta = dt*d*L f,
    x_new = f + delta: the right-hand side vanishes as the field
    homogenises, so solver rounding noise (eps * cond per cell for the
    direct form) decays together with the solution instead of putting a
    ~1e-13 floor under the distance to equilibrium.  The increment is
    projected to zero sum, which the exact solve satisfies; each species'
    cell sum is then conserved to one rounding of the final addition.

    Since delta may legitimately be negative, a cell sitting at vacuum can
    be pushed slightly negative by rounding; in that rare case the direct
    solve is used instead (substitution with an M-matrix Cholesky factor
    never produces negative cells from nonnegative data), with its sum
    defect absorbed into the largest cell.
    """

    def __init__(self, g: Grid1D):
        self.g = g
        self._factors: dict[tuple[float, float], np.ndarray] = {}

    def _factor(self, d: float, dt: float) -> np.ndarray:
        key = (dt, d)
        factor = self._factors.get(key)
        if factor is None:
            n = self.g.n_cells
            lam = dt * d / self.g.dx**2
            ab = np.zeros((2, n))
            ab[0, 1:] = -lam
            ab[1, :] = 1.0 + 2.0 * lam
            ab[1, 0] = 1.0 + lam
            ab[1, -1] = 1.0 + lam
            factor = cholesky_banded(ab)
            self._factors[key] = factor
        return factor

    def solve(self, f: np.ndarray, d: float, dt: float) -> np.ndarray:
        factor = self._factor(d, dt)
        rhs = dt * d * laplacian_neumann(self.g, f)
        delta = cho_solve_banded((factor, False), rhs)
        delta -= delta.mean()
        out = f + delta
        if out.min() >= 0.0:
            return out
        target = math.fsum(f)
        out = cho_solve_banded((factor, False), f)
        if target > 0.0:
            out[np.argmax(out)] += target - math.fsum(out)
        return out


def _weighted_sums(p: ReactionParams, s: State) -> tuple[float, float]:
    """Exact cell sums of gamma*u + alpha*w and gamma*v + beta*w."""
    su, sv, sw = math.fsum(s.u), math.fsum(s.v), math.fsum(s.w)
    return p.gamma * su + p.alpha * sw, p.gamma * sv + p.beta * sw


def step_imex(
    p: ReactionParams,
    s: State,
    dt: float,
    diffusion: _DiffusionSolver | None = None,
) -> State | None:
    """One IMEX step of size dt, or None if the step is rejected.

    Rejection happens when the explicit reaction update turns any cell
    negative, when the completed step leaves any cell negative, or when
    any pointwise relative change exceeds the default safety cap of 0.2
    (callers running adaptively pass their own cap through run()).
    """
    return _attempt_step(
        p, s, dt, diffusion or _DiffusionSolver(s.grid), safety=0.2,
        anchors=_weighted_sums(p, s),
    )


def _attempt_step(
    p: ReactionParams,
    s: State,
    dt: float,
    diffusion: _DiffusionSolver,
    safety: float,
    anchors: tuple[float, float],
) -> State | None:
    if dt <= 0:
        raise ValueError("dt must be > 0")
    r = reaction_rate(p, s.u, s.v, s.w)
    u1 = s.u - dt * p.alpha * r
    v1 = s.v - dt * p.beta * r
    w1 = s.w + dt * p.gamma * r
    # The reaction contributions to the weighted sums cancel algebraically,
    # but the three per-cell updates round independently; re-anchor u and v
    # to the conserved sums so rounding cannot random-walk over a long run.
    c1, c2 = anchors
    sw = math.fsum(w1)
    du = (c1 - p.alpha * sw) / p.gamma - math.fsum(u1)
    dv = (c2 - p.beta * sw) / p.gamma - math.fsum(v1)
    u1[np.argmax(u1)] += du
    v1[np.argmax(v1)] += dv
    if min(u1.min(), v1.min(), w1.min()) < 0.0:
        return None

    scale = max(s.u.max(), s.v.max(), s.w.max())
    u2 = diffusion.solve(u1, p.d1, dt)
    v2 = diffusion.solve(v1, p.d2, dt)
    w2 = diffusion.solve(w1, p.d3, dt)
    if min(u2.min(), v2.min(), w2.min()) < 0.0:
        return None
    if scale > 0.0:
        floor = _REL_CHANGE_FLOOR * scale
        change = max(
            np.max(np.abs(u2 - s.u) / (s.u + floor)),
            np.max(np.abs(v2 - s.v) / (s.v + floor)),
            np.max(np.abs(w2 - s.w) / (s.w + floor)),
        )
        if change > safety:
            return None
    return State(s.t + dt, u2, v2, w2)


def _diagnostics(
    g: Grid1D,
    p: ReactionParams,
    s: State,
    e: Equilibrium,
    dt: float,
) -> DiagnosticsRow:
    rep = dissipation(g, p, s, e)
    du, dv, dw = l1_distances(g, s, e)
    return DiagnosticsRow(
        t=s.t,
        dt=dt,
        mass1=p.gamma * integrate(g, s.u) + p.alpha * integrate(g, s.w),
        mass2=p.gamma * integrate(g, s.v) + p.beta * integrate(g, s.w),
        E=rep.E,
        E_rel=rep.E_rel,
        D=rep.D,
        fisher_u=rep.fisher_u,
        fisher_v=rep.fisher_v,
        fisher_w=rep.fisher_w,
        reaction_term=rep.reaction_term,
        l1_u=du,
        l1_v=dv,
        l1_w=dw,
        min_conc=s.min_concentration(),
    )


def run(p: ReactionParams, s0: State, cfg: StepConfig) -> Trajectory:
    """Integrate to cfg.t_end with adaptive dt, recording diagnostics.

    dt halves on every rejection and doubles (never above dt_init) after
    ten consecutive accepted steps.  Diagnostics are recorded at t = 0,
    every record_every-th accepted step, and at the final time.  Raises
    StepUnderflowError when halving reaches dt_min.
    """
    p.require_normalised("run")
    if s0.min_concentration() < 0:
        raise ValueError("initial state has negative cells")
    if s0.t != 0.0:
        raise ValueError("runs start at t = 0")
    g = s0.grid
    m = MassPair(
        p.gamma * integrate(g, s0.u) + p.alpha * integrate(g, s0.w),
        p.gamma * integrate(g, s0.v) + p.beta * integrate(g, s0.w),
    )
    eq = compute_equilibrium(p, m)
    diffusion = _DiffusionSolver(g)
    anchors = _weighted_sums(p, s0)

    states = [s0]
    rows = [_diagnostics(g, p, s0, eq, 0.0)]
    s = s0
    dt = cfg.dt_init
    last_dt = 0.0
    accepted = 0
    accepted_since_double = 0
    recorded_last = True

    while s.t < cfg.t_end - 1e-14 * cfg.t_end:
        dt_try = min(dt, cfg.t_end - s.t)
        nxt = _attempt_step(p, s, dt_try, diffusion, cfg.safety, anchors)
        if nxt is None:
            dt = 0.5 * dt_try
            accepted_since_double = 0
            if dt < cfg.dt_min:
                raise StepUnderflowError(
                    f"dt underflow at t={s.t:.6g}: dt={dt:.3e} < dt_min, "
                    f"min conc={s.min_concentration():.3e}, "
                    f"max conc={max(s.u.max(), s.v.max(), s.w.max()):.3e}"
                )
            continue
        s = nxt
        last_dt = dt_try
        accepted += 1
        accepted_since_double += 1
        if accepted_since_double >= 10:
            dt = min(2.0 * dt, cfg.dt_init)
            accepted_since_double = 0
        recorded_last = accepted % cfg.record_every == 0
        if recorded_last:
            states.append(s)
            rows.append(_diagnostics(g, p, s, eq, dt_try))
    if not recorded_last:
        states.append(s)
        rows.append(_diagnostics(g, p, s, eq, last_dt))
    return Trajectory(params=p, masses=m, equilibrium=eq, states=states, rows=rows)


def z_linf(p: ReactionParams, s: State) -> float:
    """Sup of the cross-diffusion invariant beta*gamma*u + alpha*gamma*v + 2*alpha*beta*w.

    With equal diffusivities this combination obeys a pure heat equation,
    so its sup never grows (parabolic maximum principle).
    """
    z = (
        p.beta * p.gamma * s.u
        + p.alpha * p.gamma * s.v
        + 2.0 * p.alpha * p.beta * s.w
    )
    return float(z.max())
