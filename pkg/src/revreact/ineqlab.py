"""Empirical verification of the functional inequalities behind relaxation.

Four inequalities are probed by sampling the conservation manifold:

* homogeneous states: squared distance to equilibrium is controlled by the
  squared reaction defect (scan_homogeneous_ratio);
* spatial states in square-root variables: distance to equilibrium is
  controlled by reaction defect plus spatial variance (estimate_k2_split);
* entropy dissipation dominates relative entropy, D >= K * E_rel
  (estimate_eed_constant, trajectory_eed_constant);
* relative entropy dominates squared L1 distance, the Csiszar-Kullback
  bound (verify_csiszar_kullback).

All constants reported here are empirical min/max ratios over samples,
not claims about the optimal constants, which are only known to exist.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .entropy import ck_gap, dissipation
from .grid import Grid1D, integrate
from .model import (
    Equilibrium,
    MassPair,
    ReactionParams,
    compute_equilibrium,
    stoich_pow,
)
from .solver import State, Trajectory

_EREL_CUTOFF = 1e-12  # below this a sample is "at equilibrium", uninformative


@dataclass(frozen=True)
class AdmissibleSample:
    """Strictly positive fields satisfying both conservation laws."""

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    masses: MassPair

    def state(self) -> State:
        return State(0.0, self.u, self.v, self.w)


@dataclass(frozen=True)
class RatioReport:
    """Extremal observed ratios of one inequality over a sample set."""

    n_samples: int
    min_ratio: float
    max_ratio: float
    argmin: Any
    argmax: Any
    constant_estimate: float
    zero_limit: float | None = None
    n_skipped: int = 0
    n_uncovered: int = 0


def _sqrt_equilibrium(e: Equilibrium) -> tuple[float, float, float]:
    return np.sqrt(e.a_inf), np.sqrt(e.b_inf), np.sqrt(e.c_inf)


def homogeneous_ratio(p: ReactionParams, e: Equilibrium, mu_c) -> np.ndarray:
    """Distance-to-defect ratio along the constrained perturbation family.

    Homogeneous nonnegative states (a^2, b^2, c^2) on the conservation
    manifold form a one-parameter family: writing a = A(1+mu_a) etc. around
    the square roots (A, B, C) of the equilibrium, the conservation laws
    force

        mu_a = sqrt(1 - (alpha C^2 / gamma A^2) mu_c (2 + mu_c)) - 1,

    and similarly for mu_b.  The returned ratio is

        ((a-A)^2 + (b-B)^2 + (c-C)^2) / (a^alpha b^beta - c^gamma)^2,

    whose supremum over the admissible mu_c range is the constant of the
    homogeneous distance bound.  mu_c = 0 is a removable 0/0.
    """
    A, B, C = _sqrt_equilibrium(e)
    mu_c = np.asarray(mu_c, dtype=float)
    shrink = mu_c * (2.0 + mu_c)
    mu_a = np.sqrt(np.maximum(1.0 - (p.alpha * C * C) / (p.gamma * A * A) * shrink, 0.0)) - 1.0
    mu_b = np.sqrt(np.maximum(1.0 - (p.beta * C * C) / (p.gamma * B * B) * shrink, 0.0)) - 1.0
    a = A * (1.0 + mu_a)
    b = B * (1.0 + mu_b)
    c = C * (1.0 + mu_c)
    num = (a - A) ** 2 + (b - B) ** 2 + (c - C) ** 2
    den = (stoich_pow(a, p.alpha) * stoich_pow(b, p.beta) - stoich_pow(c, p.gamma)) ** 2
    return num / den


def mu_c_max(p: ReactionParams, e: Equilibrium) -> float:
    """Upper end of the admissible perturbation range (lower end is -1)."""
    A, B, C = _sqrt_equilibrium(e)
    bound = min(
        (p.gamma * A * A) / (p.alpha * C * C),
        (p.gamma * B * B) / (p.beta * C * C),
    )
    return -1.0 + np.sqrt(1.0 + bound)


def scan_homogeneous_ratio(
    p: ReactionParams,
    m: MassPair,
    n_grid: int = 2001,
    exclusion: float = 1e-6,
) -> RatioReport:
    """Sweep the homogeneous perturbation family and bound its ratio.

    A symmetric deleted neighborhood of half-width `exclusion` removes the
    removable singularity at mu_c = 0; the limit there is recovered by
    one-sided Richardson extrapolation and reported as zero_limit.
    """
    if n_grid < 100:
        raise ValueError("n_grid must be >= 100")
    e = compute_equilibrium(p, m)
    hi = mu_c_max(p, e)
    grid = np.linspace(-1.0, hi, n_grid)
    grid = grid[np.abs(grid) >= exclusion]
    ratios = homogeneous_ratio(p, e, grid)
    i_min = int(np.argmin(ratios))
    i_max = int(np.argmax(ratios))
    h = max(1e-3, 2.0 * exclusion)
    r_h, r_h2 = homogeneous_ratio(p, e, np.array([h, 0.5 * h]))
    return RatioReport(
        n_samples=len(grid),
        min_ratio=float(ratios[i_min]),
        max_ratio=float(ratios[i_max]),
        argmin=float(grid[i_min]),
        argmax=float(grid[i_max]),
        constant_estimate=float(ratios[i_max]),
        zero_limit=float(2.0 * r_h2 - r_h),
    )


def _positive_shape(rng: np.random.Generator, n: int) -> np.ndarray:
    """Nonnegative piecewise-constant random shape with positive mean.

    Mixes plain uniform cells, uniform cells silenced on a random window
    (to reach the degenerate corners of the manifold) and heavy-tailed
    spikes.
    """
    kind = rng.integers(0, 3)
    shape = rng.uniform(0.0, 1.0, n)
    if kind == 1:
        i0, i1 = np.sort(rng.integers(0, n, 2))
        if i1 - i0 < n:  # keep at least one live cell
            shape[i0:i1] = 0.0
    elif kind == 2:
        shape = rng.exponential(1.0, n)
    if shape.sum() <= 0.0:
        shape[rng.integers(0, n)] = 1.0
    return shape


def default_floor(m: MassPair) -> float:
    """Strictly positive cell floor used by the sampler."""
    return 1e-6 * min(m.m1, m.m2)


def sample_admissible(
    p: ReactionParams,
    m: MassPair,
    g: Grid1D,
    seed,
    floor_delta: float | None = None,
) -> AdmissibleSample:
    """Draw one random strictly positive field triple with the given masses.

    w is a floored random shape scaled to a feasible mass, then u and v are
    floored random shapes rescaled to the means the conservation laws
    dictate.  Both laws hold to rounding by construction.
    """
    delta = default_floor(m) if floor_delta is None else floor_delta
    if delta <= 0:
        raise ValueError("floor_delta must be > 0")
    bound = min(m.m1 / p.alpha, m.m2 / p.beta) - p.gamma * delta
    if bound <= delta:
        raise ValueError(f"floor_delta={delta} leaves no room for w below {bound}")
    rng = np.random.default_rng(seed)
    n = g.n_cells

    w_mass = delta + rng.uniform(0.02, 0.95) * (bound - delta)
    shape = _positive_shape(rng, n)
    w = delta + shape * (w_mass - delta) / shape.mean()
    w_mass = integrate(g, w)

    mean_u = (m.m1 - p.alpha * w_mass) / p.gamma
    mean_v = (m.m2 - p.beta * w_mass) / p.gamma
    if mean_u <= delta or mean_v <= delta:
        raise ValueError("infeasible floor_delta for the drawn w mass")
    shape = _positive_shape(rng, n)
    u = delta + shape * (mean_u - delta) / shape.mean()
    shape = _positive_shape(rng, n)
    v = delta + shape * (mean_v - delta) / shape.mean()
    return AdmissibleSample(u=u, v=v, w=w, masses=m)


def _sample_summary(i: int, sample: AdmissibleSample) -> dict:
    return {
        "index": i,
        "mean_u": float(sample.u.mean()),
        "mean_v": float(sample.v.mean()),
        "mean_w": float(sample.w.mean()),
    }


def _map_indexed(fn: Callable[[int], Any], n: int, threads: int) -> list:
    """fn over range(n), results in index order regardless of scheduling."""
    if threads <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))


def _ratio_report(pairs: list[tuple[float, Any]], pick_constant) -> RatioReport:
    ratios = np.array([r for r, _ in pairs])
    i_min = int(np.argmin(ratios))
    i_max = int(np.argmax(ratios))
    return RatioReport(
        n_samples=len(pairs),
        min_ratio=float(ratios[i_min]),
        max_ratio=float(ratios[i_max]),
        argmin=pairs[i_min][1],
        argmax=pairs[i_max][1],
        constant_estimate=pick_constant(float(ratios[i_min]), float(ratios[i_max])),
    )


def estimate_k2_split(
    p: ReactionParams,
    m: MassPair,
    g: Grid1D,
    n_samples: int,
    k1: float,
    seed: int = 0,
    floor_delta: float | None = None,
    threads: int = 1,
) -> RatioReport:
    """Smallest variance coefficient K2 closing the square-root split bound.

    For each sample, with capital letters the square roots of the fields
    and (A, B, C) those of the equilibrium, the bound reads

        |U-A|^2 + |V-B|^2 + |W-C|^2
            <= k1 * |W^gamma - U^alpha V^beta|^2
               + K2 * (|U-Ubar|^2 + |V-Vbar|^2 + |W-Wbar|^2)

    (all squared L2 norms).  The report's constant_estimate is the max over
    samples of the required K2, clamped at zero.  Homogeneous samples have
    zero variance; those covered by the k1 term are counted in n_skipped,
    the rest in n_uncovered.
    """
    if k1 <= 0:
        raise ValueError("k1 must be > 0")
    e = compute_equilibrium(p, m)
    A, B, C = _sqrt_equilibrium(e)

    def one(i: int):
        sample = sample_admissible(p, m, g, [seed, i], floor_delta)
        U, V, W = np.sqrt(sample.u), np.sqrt(sample.v), np.sqrt(sample.w)
        lhs = (
            integrate(g, (U - A) ** 2)
            + integrate(g, (V - B) ** 2)
            + integrate(g, (W - C) ** 2)
        )
        defect = stoich_pow(W, p.gamma) - stoich_pow(U, p.alpha) * stoich_pow(V, p.beta)
        part1 = integrate(g, defect**2)
        part2 = (
            integrate(g, (U - integrate(g, U)) ** 2)
            + integrate(g, (V - integrate(g, V)) ** 2)
            + integrate(g, (W - integrate(g, W)) ** 2)
        )
        if part2 == 0.0:
            covered = lhs <= k1 * part1
            return ("skipped" if covered else "uncovered", i)
        return (max(0.0, (lhs - k1 * part1) / part2), _sample_summary(i, sample))

    results = _map_indexed(one, n_samples, threads)
    pairs = [r for r in results if not isinstance(r[0], str)]
    n_skipped = sum(1 for r in results if r[0] == "skipped")
    n_uncovered = sum(1 for r in results if r[0] == "uncovered")
    if not pairs:
        raise ValueError("no informative samples")
    rep = _ratio_report(pairs, pick_constant=lambda lo, hi: hi)
    return RatioReport(
        n_samples=rep.n_samples,
        min_ratio=rep.min_ratio,
        max_ratio=rep.max_ratio,
        argmin=rep.argmin,
        argmax=rep.argmax,
        constant_estimate=rep.constant_estimate,
        n_skipped=n_skipped,
        n_uncovered=n_uncovered,
    )


def estimate_eed_constant(
    p: ReactionParams,
    m: MassPair,
    g: Grid1D,
    n_samples: int,
    seed: int = 0,
    floor_delta: float | None = None,
    threads: int = 1,
) -> RatioReport:
    """Minimal observed D / E_rel over admissible samples.

    Positivity of the minimum is the empirical content of the entropy
    entropy-dissipation bound D >= K * E_rel on the conservation manifold.
    Samples with E_rel below cutoff are excluded; infinite-D samples count
    as +inf ratios (they can never achieve the min unless all are).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    e = compute_equilibrium(p, m)

    def one(i: int):
        sample = sample_admissible(p, m, g, [seed, i], floor_delta)
        rep = dissipation(g, p, sample.state(), e)
        if rep.E_rel < _EREL_CUTOFF:
            return None
        return (rep.D / rep.E_rel, _sample_summary(i, sample))

    results = [r for r in _map_indexed(one, n_samples, threads) if r is not None]
    if not results:
        raise ValueError("no informative samples")
    rep = _ratio_report(results, pick_constant=lambda lo, hi: lo)
    return RatioReport(
        n_samples=rep.n_samples,
        min_ratio=rep.min_ratio,
        max_ratio=rep.max_ratio,
        argmin=rep.argmin,
        argmax=rep.argmax,
        constant_estimate=rep.constant_estimate,
        n_skipped=n_samples - rep.n_samples,
    )


def trajectory_eed_constant(traj: Trajectory) -> RatioReport:
    """Minimal D / E_rel over the recorded rows of a trajectory."""
    pairs = [
        (row.D / row.E_rel, {"t": row.t})
        for row in traj.rows
        if row.E_rel >= _EREL_CUTOFF
    ]
    if len(pairs) < 2:
        raise ValueError("trajectory has fewer than 2 informative rows")
    rep = _ratio_report(pairs, pick_constant=lambda lo, hi: lo)
    return RatioReport(
        n_samples=rep.n_samples,
        min_ratio=rep.min_ratio,
        max_ratio=rep.max_ratio,
        argmin=rep.argmin,
        argmax=rep.argmax,
        constant_estimate=rep.constant_estimate,
        n_skipped=len(traj.rows) - len(pairs),
    )


def verify_csiszar_kullback(
    p: ReactionParams,
    m: MassPair,
    g: Grid1D,
    n_samples: int,
    seed: int = 0,
    floor_delta: float | None = None,
    threads: int = 1,
) -> RatioReport:
    """Minimal observed E_rel / (sum of squared L1 distances) over samples.

    Positivity of the minimum verifies the Csiszar-Kullback bound on the
    conservation manifold.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    e = compute_equilibrium(p, m)

    def one(i: int):
        sample = sample_admissible(p, m, g, [seed, i], floor_delta)
        lhs, rhs = ck_gap(g, p, sample.state(), e)
        if lhs < _EREL_CUTOFF or rhs == 0.0:
            return None
        return (lhs / rhs, _sample_summary(i, sample))

    results = [r for r in _map_indexed(one, n_samples, threads) if r is not None]
    if not results:
        raise ValueError("no informative samples")
    rep = _ratio_report(results, pick_constant=lambda lo, hi: lo)
    return RatioReport(
        n_samples=rep.n_samples,
        min_ratio=rep.min_ratio,
        max_ratio=rep.max_ratio,
        argmin=rep.argmin,
        argmax=rep.argmax,
        constant_estimate=rep.constant_estimate,
        n_skipped=n_samples - rep.n_samples,
    )


def duality_margin(d_a: float, d_b: float) -> float:
    """(b - a) / (a + b) for a = min, b = max of two diffusivities.

    Always in [0, 1): the closer to 0, the more room the pair leaves in the
    exponent-2 duality condition used by the existence theory.
    """
    if d_a <= 0 or d_b <= 0:
        raise ValueError("diffusivities must be > 0")
    a, b = min(d_a, d_b), max(d_a, d_b)
    return (b - a) / (a + b)


def elementary_inequality_gap(a, b):
    """(a-b)ln(a/b) - 4(sqrt(a)-sqrt(b))^2, nonnegative for a, b > 0.

    Naive evaluation loses the sign to rounding near a = b (the two sides
    agree to fourth order there), so the gap is computed in the factored
    form 2(s-t) * t * [(r+1)ln(r) - 2(r-1)] with s = sqrt(a), t = sqrt(b),
    r = s/t, and the bracket assembled from log1p(r-1) - (r-1), which
    keeps every factor's sign exact.
    """
    s = np.sqrt(np.asarray(a, dtype=float))
    t = np.sqrt(np.asarray(b, dtype=float))
    h = s / t - 1.0
    bracket = 2.0 * (np.log1p(h) - h) + h * np.log1p(h)
    return 2.0 * (s - t) * t * bracket
