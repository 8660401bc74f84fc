"""Maximal fit of order-preserving index matchings.

Given two index windows and a compatibility relation on index pairs, the
fit is the largest cardinality of a set of compatible pairs that is
strictly increasing in both coordinates (an order-preserving partial
bijection).  Three routes compute it:

* `max_fit_bruteforce` enumerates every increasing chain of compatible
  pairs (with an admissible upper-bound prune), guarded to tiny windows;
  it is the oracle the other routes are tested against.
* `max_fit_dp` is the longest-common-subsequence style dynamic program
  over an arbitrary relation, two rows at a time.
* `block_fit` specializes to the subshift block-equality relation and runs
  a bit-vector LCS kernel in the style of Crochemore, Iliopoulos, Pinzon
  and Reid (2001): one machine-word-free pass using Python's big integers.

Tie-breaking when a witness is requested: the traceback prefers the
diagonal (matched) move, then the domain-advance move.
"""

import math
from dataclasses import dataclass

import numpy as np

from .systems import Word, circle_distance

BRUTEFORCE_LIMIT = 14

# d < delta at the threshold is decided with a fixed exclusion band so the
# verdict never depends on platform rounding: distances within 1e-12 below
# delta count as not-close.
GEOMETRIC_TOLERANCE = 1e-12

# Full-table traceback is used for witnesses up to this many cells; larger
# products switch to divide-and-conquer reconstruction (two-row memory).
_WITNESS_CELL_LIMIT = 1 << 24


class OracleSizeError(ValueError):
    """Window too large for the exhaustive oracle."""


class InputLengthError(ValueError):
    """Words too short for the requested window and block length."""


@dataclass(frozen=True)
class MatchResult:
    """Fit value plus an optional witness.

    `matched_pairs`, when present, lists (i, j) index pairs strictly
    increasing in both coordinates, one per matched position; its length
    equals `fit`.  `n` is the window length (min of the two windows when
    they differ).
    """

    fit: int
    n: int
    matched_pairs: tuple = None


def max_fit_bruteforce(compat) -> int:
    """Exact maximum fit by exhaustive search over increasing pair chains.

    `compat` is a 2-D boolean relation (list of rows or array).  Refuses
    windows larger than BRUTEFORCE_LIMIT; this routine exists as an oracle,
    not for production use.
    """
    mat = [[bool(v) for v in row] for row in compat]
    n_x = len(mat)
    n_z = len(mat[0]) if mat else 0
    if any(len(row) != n_z for row in mat):
        raise ValueError("compat relation must be rectangular")
    if max(n_x, n_z, 0) > BRUTEFORCE_LIMIT:
        raise OracleSizeError(
            f"bruteforce oracle limited to {BRUTEFORCE_LIMIT}, got {n_x}x{n_z}")
    best = 0

    def explore(i0, j0, size):
        nonlocal best
        if size > best:
            best = size
        for i in range(i0, n_x):
            if size + min(n_x - i, n_z - j0) <= best:
                break  # no extension from here can beat the incumbent
            row = mat[i]
            for j in range(j0, n_z):
                if row[j]:
                    explore(i + 1, j + 1, size + 1)

    explore(0, 0, 0)
    return best


def _final_row(row_of, n_x, n_z):
    """Last row of the fit table; row_of(i) yields the bool compat row."""
    prev = np.zeros(n_z + 1, dtype=np.int32)
    cur = np.zeros(n_z + 1, dtype=np.int32)
    for i in range(n_x):
        cand = np.maximum(prev[1:], prev[:-1] + row_of(i))
        np.maximum.accumulate(cand, out=cand)
        cur[1:] = cand
        prev, cur = cur, prev
    return prev


def _pairs_table(row_of, n_x, n_z):
    """Witness via full table and tie-broken traceback."""
    rel = np.empty((n_x, n_z), dtype=bool)
    table = np.zeros((n_x + 1, n_z + 1), dtype=np.int32)
    for i in range(n_x):
        rel[i] = row_of(i)
        cand = np.maximum(table[i, 1:], table[i, :-1] + rel[i])
        np.maximum.accumulate(cand, out=cand)
        table[i + 1, 1:] = cand
    pairs = []
    i, j = n_x, n_z
    while i > 0 and j > 0:
        if rel[i - 1, j - 1] and table[i, j] == table[i - 1, j - 1] + 1:
            pairs.append((i - 1, j - 1))
            i -= 1
            j -= 1
        elif table[i, j] == table[i - 1, j]:
            i -= 1
        else:
            j -= 1
    pairs.reverse()
    return pairs


def _pairs_divide(row_of, n_x, n_z, x_off, z_off, out):
    """Witness by divide-and-conquer split on the middle row (linear memory)."""
    if n_x == 0 or n_z == 0:
        return
    if n_x == 1:
        row = row_of(x_off)[z_off:z_off + n_z]
        hits = np.flatnonzero(row)
        if hits.size:
            out.append((x_off, z_off + int(hits[0])))
        return
    mid = n_x // 2
    fwd = _final_row(lambda i: row_of(x_off + i)[z_off:z_off + n_z], mid, n_z)
    bwd = _final_row(lambda i: row_of(x_off + n_x - 1 - i)[z_off:z_off + n_z][::-1],
                     n_x - mid, n_z)
    split = int(np.argmax(fwd + bwd[::-1]))
    _pairs_divide(row_of, mid, split, x_off, z_off, out)
    _pairs_divide(row_of, n_x - mid, n_z - split, x_off + mid, z_off + split, out)


def _fit(row_of, n_x, n_z, want_pairs):
    if not want_pairs:
        fit = int(_final_row(row_of, n_x, n_z)[-1])
        return fit, None
    if n_x * n_z <= _WITNESS_CELL_LIMIT:
        pairs = _pairs_table(row_of, n_x, n_z)
    else:
        pairs = []
        _pairs_divide(row_of, n_x, n_z, 0, 0, pairs)
    return len(pairs), tuple(pairs)


def _row_supplier(compat, n_z):
    if callable(compat):
        return lambda i: np.fromiter((bool(compat(i, j)) for j in range(n_z)),
                                     dtype=bool, count=n_z)
    rel = np.asarray(compat, dtype=bool)
    return lambda i: rel[i]


def max_fit_dp(compat, n_x: int, n_z: int, want_pairs: bool = False) -> MatchResult:
    """Maximum fit over an arbitrary relation by dynamic programming.

    `compat` is either a predicate compat(i, j) -> bool or a 2-D boolean
    relation.  Recurrence: T(i,j) = max(T(i-1,j), T(i,j-1),
    T(i-1,j-1) + [compat(i-1,j-1)]).
    """
    if n_x < 0 or n_z < 0:
        raise ValueError("window lengths must be non-negative")
    fit, pairs = _fit(_row_supplier(compat, n_z), n_x, n_z, want_pairs)
    return MatchResult(fit, min(n_x, n_z), pairs)


def _as_symbols(word):
    if isinstance(word, Word):
        return np.asarray(word.symbols, dtype=np.int64), word.alphabet_size
    arr = np.asarray(list(word), dtype=np.int64)
    alphabet = int(arr.max()) + 1 if arr.size else 1
    return arr, alphabet


def _block_ranks(symbols, n, L, alphabet):
    """Integer rank of the L-block starting at each of the first n positions."""
    if L == 1:
        return symbols[:n].copy()
    if L * math.log2(max(alphabet, 2)) < 62:
        ranks = np.zeros(n, dtype=np.int64)
        for t in range(L):
            ranks = ranks * alphabet + symbols[t:t + n]
        return ranks
    # Alphabet too wide for packed integer ranks; intern block tuples.
    seen = {}
    ranks = np.empty(n, dtype=np.int64)
    for i in range(n):
        key = tuple(symbols[i:i + L])
        ranks[i] = seen.setdefault(key, len(seen))
    return ranks


def _lcs_bitparallel(ranks_x, ranks_z) -> int:
    """Bit-vector LCS length of two integer sequences.

    Positions of each rank in ranks_x become a bitmask; one pass over
    ranks_z updates the row state V with U = V & mask;
    V <- ((V + U) | (V - U)).  The LCS length is the number of cleared
    bits of V.  Python integers stand in for unbounded machine words.
    """
    m = len(ranks_x)
    if m == 0 or len(ranks_z) == 0:
        return 0
    buffers = {}
    for i, r in enumerate(ranks_x):
        buf = buffers.get(r)
        if buf is None:
            buf = buffers[r] = bytearray((m + 7) >> 3)
        buf[i >> 3] |= 1 << (i & 7)
    masks = {r: int.from_bytes(buf, "little") for r, buf in buffers.items()}
    full = (1 << m) - 1
    V = full
    get = masks.get
    for r in ranks_z:
        U = V & get(r, 0)
        V = ((V + U) | (V - U)) & full
    return m - V.bit_count()


def block_fit(x, z, n: int, L: int, want_pairs: bool = False) -> MatchResult:
    """Fit under the subshift relation compat(i, j) <=> x[i:i+L] == z[j:j+L].

    This is the delta-closeness relation of the shift metric with
    L = agreement_length(delta).  L = 0 makes every pair compatible.  The
    fit is computed by the bit-parallel kernel unless a witness is
    requested, in which case the generic dynamic program runs on the same
    block ranks; both paths return identical fit values.
    """
    if n < 0 or L < 0:
        raise ValueError("n and L must be non-negative")
    sx, ax = _as_symbols(x)
    sz, az = _as_symbols(z)
    need = n if L == 0 else n + L - 1
    if len(sx) < need or len(sz) < need:
        raise InputLengthError(
            f"need {need} symbols for n={n}, L={L}; got {len(sx)} and {len(sz)}")
    if L == 0:
        pairs = tuple((i, i) for i in range(n)) if want_pairs else None
        return MatchResult(n, n, pairs)
    alphabet = max(ax, az)
    rx = _block_ranks(sx, n, L, alphabet)
    rz = _block_ranks(sz, n, L, alphabet)
    if want_pairs:
        fit, pairs = _fit(lambda i: rz == rx[i], n, n, True)
        return MatchResult(fit, n, pairs)
    return MatchResult(_lcs_bitparallel(rx.tolist(), rz.tolist()), n, None)


def geometric_fit(points_x, points_z, n: int, delta: float,
                  want_pairs: bool = False, metric=circle_distance) -> MatchResult:
    """Fit under compat(i, j) <=> d(points_x[i], points_z[j]) < delta.

    `metric` must accept (array, scalar) and return elementwise distances;
    the default is the circle metric.  The threshold comparison excludes a
    1e-12 band below delta (see GEOMETRIC_TOLERANCE).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    px = np.asarray(points_x, dtype=float)
    pz = np.asarray(points_z, dtype=float)
    if len(px) < n or len(pz) < n:
        raise InputLengthError(f"need {n} points, got {len(px)} and {len(pz)}")
    thr = delta - GEOMETRIC_TOLERANCE
    zwin = pz[:n]
    fit, pairs = _fit(lambda i: metric(zwin, px[i]) < thr, n, n, want_pairs)
    return MatchResult(fit, n, pairs)
