"""Shared test oracles, kept deliberately naive and independent of the library."""

import itertools


def is_subsequence(sub, word):
    it = iter(word)
    return all(any(c == w for w in it) for c in sub)


def lcs_exhaustive(u, w):
    """LCS length by enumerating every subsequence of u (tiny words only)."""
    for k in range(min(len(u), len(w)), 0, -1):
        for picks in itertools.combinations(range(len(u)), k):
            if is_subsequence([u[i] for i in picks], w):
                return k
    return 0


def random_relation(rng, n_x, n_z, density):
    return [[rng.random() < density for _ in range(n_z)] for _ in range(n_x)]


def assert_valid_witness(result, compat):
    pairs = result.matched_pairs
    assert pairs is not None
    assert len(pairs) == result.fit
    for i, j in pairs:
        assert compat(i, j)
    for (a, b), (c, d) in zip(pairs, pairs[1:]):
        assert a < c and b < d
