"""Closest-distance statistics m_n and index-gap variants on orbits.

m_n is the minimum |x_i - x_j| over pairs of distinct iterates among the
first n orbit points. Variants restrict the index gap: "near" keeps
|i - j| <= alpha(n) with alpha(n) = (log n)^2, "far" keeps the complement,
"split" keeps i <= floor(n/3), j >= ceil(2n/3). Exact dyadic orbits give
exact distances; floating orbits carry a noise floor and readings within 2^6
of it are flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PrecisionFloorError, ResampleSignal, UnresolvedReturn
from .intervalmaps import (
    EPS64,
    GROWTH_CAP,
    GaussMap,
    KDoubling,
    MapSpec,
    MPInduced,
    OrbitBuffer,
    PiecewiseAffine,
    affine_orbit,
    doubling_orbit_exact,
    iterate,
    min_window_digits,
    mp_first_return,
    sample_initial,
)
from .rng import derive_seed, make_rng
from .tables import CurveRow

__all__ = [
    "ProximityResult",
    "ShortReturnEstimate",
    "alpha_of",
    "closest_pair",
    "closest_pair_bruteforce",
    "short_return_measure",
    "proximity_curve",
    "FLOOR_REJECT_FACTOR",
]

VARIANTS = ("all", "near", "far", "split")
FLOOR_REJECT_FACTOR = 2.0**6  # readings within 2^6 of the floor are rejected


@dataclass(frozen=True)
class ProximityResult:
    """Minimum distance with its witnessing pair (smallest (i, j) on ties)."""

    value: float
    witness_i: int
    witness_j: int
    variant: str
    below_floor: bool = False
    exact: Fraction | None = None


def alpha_of(n: int) -> int:
    """Index-gap threshold (log n)^2, rounded half-up, floored at 1."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return max(1, int(math.floor(math.log(n) ** 2 + 0.5)))


def _variant_minlen(variant: str) -> int:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    return 3 if variant == "split" else 2


def _orbit_values(orbit) -> tuple[list, float, int]:
    """(comparable values, noise_floor, n); integers for exact orbits."""
    if isinstance(orbit, OrbitBuffer):
        if orbit.precision == "exact_dyadic" and orbit.windows is not None:
            return list(orbit.windows), 0.0, len(orbit.windows)
        return orbit.points.tolist(), orbit.noise_floor, len(orbit.points)
    vals = [float(v) for v in orbit]
    return vals, 0.0, len(vals)


def _to_result(orbit, gap, i: int, j: int, variant: str, floor: float) -> ProximityResult:
    exact = None
    if isinstance(orbit, OrbitBuffer) and orbit.precision == "exact_dyadic":
        exact = Fraction(int(gap), orbit.base**orbit.window_bits)
        value = float(exact)
    else:
        value = float(gap)
    below = floor > 0.0 and value < FLOOR_REJECT_FACTOR * floor
    return ProximityResult(value, i, j, variant, below, exact)


def _near_scan(vals: list, alpha: int):
    """Min over pairs with index gap <= alpha, one pass per gap offset.

    Float orbits get a vectorized pass per offset; exact integer orbits run
    the same sweep in plain Python so distances stay exact.
    """
    n = len(vals)
    d_max = min(alpha, n - 1)
    best = None
    if isinstance(vals[0], int):
        for d in range(1, d_max + 1):
            for t in range(n - d):
                g = vals[t + d] - vals[t]
                if g < 0:
                    g = -g
                key = (g, t, t + d)
                if best is None or key < best:
                    best = key
        return best
    arr = np.asarray(vals, dtype=np.float64)
    for d in range(1, d_max + 1):
        diffs = np.abs(arr[d:] - arr[:-d])
        t = int(np.flatnonzero(diffs == diffs.min())[0])  # smallest index on ties
        key = (float(diffs[t]), t, t + d)
        if best is None or key < best:
            best = key
    return best


def _sorted_scan(vals: list, n: int, variant: str, alpha: int):
    """Outward scan in sorted order; stops when the value gap alone exceeds
    the best admissible distance found so far."""
    order = sorted(range(n), key=lambda t: (vals[t], t))
    sv = [vals[t] for t in order]
    lo_cut = n // 3
    hi_cut = math.ceil(2 * n / 3)

    def admissible(a: int, b: int) -> bool:
        i, j = (a, b) if a < b else (b, a)
        if variant == "all":
            return True
        if variant == "far":
            return j - i > alpha
        if variant == "split":
            return i <= lo_cut and j >= hi_cut
        return j - i <= alpha  # near

    best = None  # (gap, i, j)
    for t in range(n - 1):
        for u in range(t + 1, n):
            gap = sv[u] - sv[t]
            if best is not None and gap > best[0]:
                break
            a, b = order[t], order[u]
            if not admissible(a, b):
                continue
            i, j = (a, b) if a < b else (b, a)
            key = (gap, i, j)
            if best is None or key < best:
                best = key
    return best


def closest_pair(orbit, variant: str = "all", alpha: int | None = None) -> ProximityResult:
    """Minimum distance between two iterates under the variant's index rule.

    "all" is the minimum adjacent gap of the value-sorted orbit; constrained
    variants scan outward from each sorted position until the sorted-value
    gap alone exceeds the best admissible pair; "near" sweeps index offsets
    directly. Brute force remains the arbiter in tests.
    """
    vals, floor, n = _orbit_values(orbit)
    if n < _variant_minlen(variant):
        raise ValueError(f"variant {variant!r} needs at least {_variant_minlen(variant)} points")
    if alpha is None:
        alpha = alpha_of(n) if variant in ("near", "far") else 0
    if variant == "all":
        order = sorted(range(n), key=lambda t: (vals[t], t))
        best = None
        for t in range(n - 1):
            a, b = order[t], order[t + 1]
            gap = vals[b] - vals[a] if vals[b] >= vals[a] else vals[a] - vals[b]
            i, j = (a, b) if a < b else (b, a)
            key = (gap, i, j)
            if best is None or key < best:
                best = key
        gap, i, j = best  # type: ignore[misc]
        return _to_result(orbit, gap, i, j, variant, floor)
    if variant == "near":
        got = _near_scan(vals, alpha)
        if got is None:
            raise ValueError("no admissible pair for variant 'near'")
        gap, i, j = got
        return _to_result(orbit, gap, i, j, variant, floor)
    got = _sorted_scan(vals, n, variant, alpha)
    if got is None:
        raise ValueError(f"no admissible pair for variant {variant!r}")
    gap, i, j = got
    return _to_result(orbit, gap, i, j, variant, floor)


def closest_pair_bruteforce(orbit, variant: str = "all", alpha: int | None = None) -> ProximityResult:
    """O(n^2) oracle with the identical contract."""
    vals, floor, n = _orbit_values(orbit)
    if n < _variant_minlen(variant):
        raise ValueError(f"variant {variant!r} needs at least {_variant_minlen(variant)} points")
    if alpha is None:
        alpha = alpha_of(n) if variant in ("near", "far") else 0
    lo_cut = n // 3
    hi_cut = math.ceil(2 * n / 3)
    best = None
    for i in range(n - 1):
        for j in range(i + 1, n):
            if variant == "near" and j - i > alpha:
                continue
            if variant == "far" and j - i <= alpha:
                continue
            if variant == "split" and not (i <= lo_cut and j >= hi_cut):
                continue
            gap = abs(vals[i] - vals[j])
            key = (gap, i, j)
            if best is None or key < best:
                best = key
    if best is None:
        raise ValueError(f"no admissible pair for variant {variant!r}")
    gap, i, j = best
    return _to_result(orbit, gap, i, j, variant, floor)


# ---------------------------------------------------------------------------
# Short-return sets E_n(eps) = {x : |x - T^n x| <= eps}
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShortReturnEstimate:
    value: float
    stderr: float
    samples: int
    n_iter: int
    eps: float


def _short_return_kdoubling(k: int, n_iter: int, eps: float, samples: int,
                            seed: int) -> float:
    """Exact base-k evaluation: x and T^n x as integer windows, with the
    digit count W chosen so m * k^n stays inside int64."""
    W = min(int(50 / math.log2(k)), int(62 / math.log2(k)) - n_iter)
    mod = k**W
    if eps * mod < 1000.0:
        raise ValueError(
            f"eps={eps} too small to resolve at n_iter={n_iter} (window {k}^{W})"
        )
    rng = make_rng(seed)
    m = rng.integers(0, mod, size=samples, dtype=np.int64)
    shifted = (m * (k**n_iter)) % mod
    thresh = int(eps * mod)
    return float(np.mean(np.abs(m - shifted) <= thresh))


def short_return_measure(spec: MapSpec, n_iter: int, eps: float, samples: int,
                         seed: int = 0) -> ShortReturnEstimate:
    """Monte-Carlo mass of {x : |x - T^n x| <= eps} under the sampling
    measure, with a binomial standard error.

    Multiplication maps are evaluated in exact integer arithmetic; floating
    maps reject eps below the rejection threshold of the worst-case noise
    floor.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if n_iter < 1:
        raise ValueError("n_iter must be >= 1")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if eps >= 1.0:
        return ShortReturnEstimate(1.0, 0.0, samples, n_iter, eps)
    if isinstance(spec, KDoubling):
        p_hat = _short_return_kdoubling(spec.k, n_iter, eps, samples, seed)
    else:
        worst_floor = EPS64 * GROWTH_CAP
        if eps < FLOOR_REJECT_FACTOR * worst_floor:
            raise PrecisionFloorError(
                f"eps={eps} below the floating precision floor {FLOOR_REJECT_FACTOR * worst_floor}"
            )
        rng = make_rng(seed)
        x0 = np.array([sample_initial(spec, rng) for _ in range(samples)])
        x = x0.copy()
        for _ in range(n_iter):
            x = _vector_step(spec, x)
        good = np.isfinite(x)
        p_hat = float(np.mean(np.abs(x0[good] - x[good]) <= eps))
    stderr = math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / samples)
    return ShortReturnEstimate(p_hat, stderr, samples, n_iter, eps)


def _vector_step(spec: MapSpec, x: np.ndarray) -> np.ndarray:
    """Vectorized map application; points that leave the tractable domain
    become NaN and are dropped by the caller."""
    if isinstance(spec, KDoubling):
        y = x * spec.k
        return y - np.floor(y)
    if isinstance(spec, GaussMap):
        out = np.full_like(x, np.nan)
        ok = x > 0.0
        inv = 1.0 / np.where(ok, x, 1.0)
        out[ok] = (inv - np.floor(inv))[ok]
        return out
    if isinstance(spec, PiecewiseAffine):
        bp = np.asarray(spec.breakpoints)
        out = np.full_like(x, np.nan)
        ok = (x >= bp[-1]) & (x < 1.0)
        # branch j has bp[j] > x >= bp[j+1] (0-based): searchsorted on the
        # ascending reversed array
        asc = bp[::-1]
        idx = np.searchsorted(asc, x, side="right")  # count of asc entries <= x
        j0 = len(bp) - idx  # 0-based upper breakpoint position
        j0 = np.clip(j0, 1, len(bp) - 1)
        hi = bp[j0 - 1]
        lo = bp[j0]
        y = (x - lo) / (hi - lo)
        out[ok] = y[ok]
        return out
    if isinstance(spec, MPInduced):
        out = np.empty_like(x)
        for t in range(len(x)):
            try:
                out[t] = mp_first_return(spec.a, float(x[t]), spec.max_steps).fx
            except (ResampleSignal, UnresolvedReturn, ValueError):
                out[t] = np.nan
        return out
    raise TypeError(f"unknown map spec {type(spec).__name__}")


# ---------------------------------------------------------------------------
# Proximity curves
# ---------------------------------------------------------------------------


def _orbit_for_cell(spec: MapSpec, n: int, cell_seed: int, burn_in: int,
                    max_resamples: int = 32) -> OrbitBuffer:
    if isinstance(spec, KDoubling):
        return doubling_orbit_exact(spec.k, n, min_window_digits(spec.k, n), seed=cell_seed)
    if isinstance(spec, PiecewiseAffine):
        # forward float iteration of affine branches sheds mantissa bits;
        # the stationary itinerary reconstruction is the stable generator
        return affine_orbit(spec, n, seed=cell_seed)
    rng = make_rng(cell_seed)
    resampled = False
    for _ in range(max_resamples):
        x0 = sample_initial(spec, rng)
        try:
            orb = iterate(spec, x0, n, burn_in=burn_in, seed=cell_seed)
        except ResampleSignal:
            resampled = True
            continue
        if resampled:
            return OrbitBuffer(orb.points, orb.map, orb.seed, orb.precision,
                               noise_floor=orb.noise_floor, resampled=True)
        return orb
    raise ResampleSignal(f"exceeded {max_resamples} resampling attempts")


def proximity_curve(spec: MapSpec, n_grid, replicates: int, variant: str = "all",
                    seed: int = 0, burn_in: int | None = None) -> list[CurveRow]:
    """m_n across a grid of n with independent replicates.

    value = -log m_n / log n (the quantity with a dimension-law limit),
    aux = -log m_n. Zero distances (exact duplicates) and readings at the
    noise floor are flagged "floor" and excluded from fits downstream;
    resampled cells keep their value with flag "resampled".
    """
    n_grid = [int(x) for x in n_grid]
    if not n_grid or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be non-empty strictly increasing")
    if n_grid[0] < 2:
        raise ValueError("grid entries must be >= 2")
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    if burn_in is None:
        burn_in = 1000 if isinstance(spec, MPInduced) else 0
    rows = []
    for n in n_grid:
        for rep in range(replicates):
            cell_seed = derive_seed(seed, "proximity_curve", n, rep)
            orb = _orbit_for_cell(spec, n, cell_seed, burn_in)
            res = closest_pair(orb, variant)
            if res.value > 0.0:
                aux = -math.log(res.value)
                value = aux / math.log(n)
            else:
                aux = math.inf
                value = math.inf
            flag = "ok"
            if res.below_floor or not math.isfinite(value):
                flag = "floor"
            elif orb.resampled:
                flag = "resampled"
            rows.append(CurveRow(n=n, replicate=rep, seed=cell_seed, value=value,
                                 aux=aux, flag=flag))
    rows.sort(key=lambda r: (r.n, r.replicate))
    return rows
