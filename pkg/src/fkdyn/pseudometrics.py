"""Finite-horizon estimators for the matching pseudometrics.

The quantities, for a pair of orbit points x, z and horizon n:

* fbar_word(u, w)        edit distance 1 - |LCS(u, w)| / n on n-words;
* fbar_n_delta(x, z)     1 - (max fit of an (n, delta)-match) / n;
* rho_fk_estimate        least grid delta with fbar_{n,delta} < delta,
                         the horizon-n stand-in for the Feldman-Katok
                         pseudometric inf{delta : fbar_delta < delta};
* rho_b_estimate         average pointwise orbit distance (Besicovitch);
* rho_b_prime_estimate   least grid delta at which the density of times
                         with d(T^i x, T^i z) >= delta drops below delta.

True asymptotic values need limits over n; `fbar_delta_estimate` reports a
doubling-schedule trajectory with the max of the last three points as a
limsup proxy, and everything else is explicit about its horizon.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import matching
from .systems import (AGREEMENT_CAP, CIRCLE_DIAMETER, SHIFT_DIAMETER,
                      agreement_length, circle_distance)

DEFAULT_GRID_STEP = 1.0 / 64.0


class LengthMismatchError(ValueError):
    """Edit distance needs equal-length words."""


class IncompatibleSourcesError(ValueError):
    """Symbolic and geometric sources cannot be compared."""


class InvalidGridError(ValueError):
    """A delta grid must be nonempty, positive, strictly increasing."""


@dataclass(frozen=True)
class DeltaProfile:
    """fbar_{n,delta}(x, z) sampled on a delta grid; non-increasing."""

    n: int
    grid: tuple
    values: tuple


@dataclass(frozen=True)
class PseudometricEstimate:
    """A finite-horizon pseudometric value with its evaluation metadata.

    kind is one of 'fk', 'besicovitch', 'besicovitch_prime'.  For the two
    grid-valued kinds the value is a grid point, or the sentinel one step
    past the metric diameter when no grid point qualifies.
    """

    value: float
    horizon: int
    kind: str
    grid_step: float = None


@dataclass(frozen=True)
class FbarDeltaEstimate:
    """Doubling-schedule trajectory of fbar_{n,delta} with a limsup proxy."""

    delta: float
    schedule: tuple
    trajectory: tuple
    proxy: float


def _lcs_len(u, w, n):
    return matching.block_fit(u, w, n, 1).fit


def fbar_word(u, w) -> float:
    """Edit distance between equal-length words: 1 - |LCS| / n."""
    n, m = len(u), len(w)
    if n != m:
        raise LengthMismatchError(f"word lengths differ: {n} vs {m}")
    if n < 1:
        raise ValueError("words must be nonempty")
    return 1.0 - _lcs_len(u, w, n) / n


def _pair_mode(x, z):
    if x.is_symbolic != z.is_symbolic:
        raise IncompatibleSourcesError(
            f"cannot compare {x.kind} (symbolic={x.is_symbolic}) "
            f"with {z.kind} (symbolic={z.is_symbolic})")
    return "symbolic" if x.is_symbolic else "geometric"


def pair_diameter(x, z) -> float:
    """Diameter of the space the pair lives in (1 for subshifts, 1/2 circle)."""
    return SHIFT_DIAMETER if _pair_mode(x, z) == "symbolic" else CIRCLE_DIAMETER


def _fbar_evaluator(x, z, n, max_L=None):
    """Closure delta -> fbar_{n,delta}(x, z), caching symbolic fits by L.

    On subshifts fbar_{n,delta} depends on delta only through
    L = agreement_length(delta), so a whole delta grid costs at most one
    fit computation per distinct L.  Passing max_L (the deepest block the
    caller will probe) fetches the padded words once for the whole grid.
    """
    if n < 1:
        raise ValueError("horizon n must be >= 1")
    if _pair_mode(x, z) == "symbolic":
        fits = {}
        words = {}

        def padded(L):
            depth = max(L, max_L) if max_L is not None else L
            if depth not in words:
                words[depth] = (x.word(0, n + depth - 1), z.word(0, n + depth - 1))
            return words[depth]

        def fbar(delta):
            L = agreement_length(delta)
            if L not in fits:
                if L == 0:
                    fits[L] = 0.0
                else:
                    wx, wz = padded(L)
                    fits[L] = 1.0 - matching.block_fit(wx, wz, n, L).fit / n
            return fits[L]

        return fbar

    px = x.points(0, n)
    pz = z.points(0, n)

    def fbar(delta):
        return 1.0 - matching.geometric_fit(px, pz, n, delta).fit / n

    return fbar


def fbar_n_delta(x, z, n: int, delta: float) -> float:
    """fbar_{n,delta}(x, z) = 1 - max{|pi| : pi an (n,delta)-match} / n."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return _fbar_evaluator(x, z, n)(delta)


def delta_grid(grid_step: float, diameter: float):
    """Uniform grid step, 2*step, ... covering the diameter, plus sentinel.

    Returns (grid, sentinel); the sentinel is one step past the last grid
    point and always satisfies fbar < delta, serving as the 'no grid point
    qualified' value.
    """
    if not 0.0 < grid_step <= 1.0:
        raise ValueError("grid_step must lie in (0, 1]")
    grid = []
    j = 1
    while (j - 1) * grid_step < diameter:
        grid.append(j * grid_step)
        j += 1
    return grid, j * grid_step


def delta_profile(x, z, n: int, grid) -> DeltaProfile:
    """Tabulate fbar_{n,delta} on a strictly increasing positive grid."""
    grid = [float(d) for d in grid]
    if not grid:
        raise InvalidGridError("delta grid is empty")
    if grid[0] <= 0 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidGridError("delta grid must be positive and strictly increasing")
    max_L = agreement_length(grid[0]) if x.is_symbolic and z.is_symbolic else None
    fbar = _fbar_evaluator(x, z, n, max_L=max_L)
    return DeltaProfile(n, tuple(grid), tuple(fbar(d) for d in grid))


def _least_qualifying(grid, sentinel, qualifies):
    """First grid point satisfying an upward-closed predicate, by bisection."""
    lo, hi = 0, len(grid)
    while lo < hi:
        mid = (lo + hi) // 2
        if qualifies(grid[mid]):
            hi = mid
        else:
            lo = mid + 1
    return grid[lo] if lo < len(grid) else sentinel


def rho_fk_estimate(x, z, n: int, grid_step: float = DEFAULT_GRID_STEP) -> PseudometricEstimate:
    """Horizon-n Feldman-Katok estimate: least grid delta with fbar_{n,delta} < delta.

    The set of qualifying deltas is upward closed (fbar is non-increasing
    in delta), so bisection over the grid is exact.
    """
    grid, sentinel = delta_grid(grid_step, pair_diameter(x, z))
    max_L = agreement_length(grid[0]) if x.is_symbolic else None
    fbar = _fbar_evaluator(x, z, n, max_L=max_L)
    value = _least_qualifying(grid, sentinel, lambda d: fbar(d) < d)
    return PseudometricEstimate(value, n, "fk", grid_step)


def pointwise_distances(x, z, n: int) -> np.ndarray:
    """d(T^i x, T^i z) for i < n.

    Symbolic distances are 2**-(first disagreement offset), scanning at
    most AGREEMENT_CAP symbols ahead (deeper agreement counts as 0); the
    scan shrinks further when a finite source cannot supply the lookahead.
    """
    if n < 1:
        raise ValueError("horizon n must be >= 1")
    if _pair_mode(x, z) == "symbolic":
        lookahead = AGREEMENT_CAP
        for src in (x, z):
            if src.capacity is not None:
                lookahead = min(lookahead, src.capacity - n)
        lookahead = max(lookahead, 0)
        total = n + lookahead
        ax = np.asarray(x.word(0, total).symbols, dtype=np.int64)
        az = np.asarray(z.word(0, total).symbols, dtype=np.int64)
        neq = ax != az
        pos = np.where(neq, np.arange(total), 2 * total)
        first = np.minimum.accumulate(pos[::-1])[::-1][:n]
        k = first - np.arange(n)
        zero = (first >= total) | (k >= AGREEMENT_CAP)
        return np.where(zero, 0.0,
                        np.ldexp(1.0, -np.minimum(k, AGREEMENT_CAP).astype(np.int32)))
    return circle_distance(x.points(0, n), z.points(0, n))


def rho_b_estimate(x, z, n: int) -> PseudometricEstimate:
    """Horizon-n Besicovitch estimate: mean of the n pointwise distances.

    Summation uses math.fsum, which is exactly rounded and therefore
    independent of evaluation order and platform.
    """
    d = pointwise_distances(x, z, n)
    return PseudometricEstimate(math.fsum(d.tolist()) / n, n, "besicovitch")


def rho_b_prime_estimate(x, z, n: int, grid_step: float = DEFAULT_GRID_STEP) -> PseudometricEstimate:
    """Density form: least grid delta with |{i < n : d_i >= delta}| / n < delta."""
    d = pointwise_distances(x, z, n)
    grid, sentinel = delta_grid(grid_step, pair_diameter(x, z))
    value = _least_qualifying(grid, sentinel,
                              lambda delta: int((d >= delta).sum()) < delta * n)
    return PseudometricEstimate(value, n, "besicovitch_prime", grid_step)


def upper_density(indices, n: int) -> Fraction:
    """|S intersect [0, n)| / n, exact.

    Finite-window stand-in for the upper asymptotic density; take the max
    over a horizon schedule for the limsup.
    """
    if n < 1:
        raise ValueError("horizon n must be >= 1")
    count = sum(1 for i in indices if 0 <= i < n)
    return Fraction(count, n)


def lower_density(indices, n: int) -> Fraction:
    """Same window count as `upper_density`; take the min over a schedule."""
    return upper_density(indices, n)


def doubling_schedule(n0: int, n_max: int):
    """Horizons n0, 2*n0, 4*n0, ... not exceeding n_max."""
    if n0 < 1 or n_max < n0:
        raise ValueError("need 1 <= n0 <= n_max")
    out = []
    n = n0
    while n <= n_max:
        out.append(n)
        n *= 2
    return out


def fbar_delta_estimate(x, z, delta: float, n0: int, n_max: int) -> FbarDeltaEstimate:
    """fbar_delta limsup proxy: max of the last three doubling-schedule values."""
    schedule = doubling_schedule(n0, n_max)
    trajectory = tuple(fbar_n_delta(x, z, n, delta) for n in schedule)
    return FbarDeltaEstimate(delta, tuple(schedule), trajectory, max(trajectory[-3:]))
