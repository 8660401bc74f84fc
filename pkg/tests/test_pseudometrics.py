import math
import random
from fractions import Fraction

import numpy as np
import pytest

from fkdyn.pseudometrics import (DEFAULT_GRID_STEP, IncompatibleSourcesError,
                                 InvalidGridError, LengthMismatchError,
                                 delta_grid, delta_profile, doubling_schedule,
                                 fbar_delta_estimate, fbar_n_delta, fbar_word,
                                 lower_density, pair_diameter,
                                 pointwise_distances, rho_b_estimate,
                                 rho_b_prime_estimate, rho_fk_estimate,
                                 upper_density)
from fkdyn.systems import (GOLDEN, BernoulliSource, ExplicitSource,
                           PeriodicSource, RotationSource, SturmianSource,
                           Word, morse_source)

from helpers import lcs_exhaustive


def rand_word(rng, n, alphabet=2):
    return Word(tuple(rng.randint(0, alphabet - 1) for _ in range(n)), alphabet)


def test_fbar_word_identity_and_disjoint():
    u = Word((0, 1, 1, 0), 2)
    assert fbar_word(u, u) == 0.0
    v = Word((0, 0, 0), 3)
    w = Word((1, 2, 1), 3)
    assert fbar_word(v, w) == 1.0


def test_fbar_word_aba_bab_exact_third():
    aba = Word((0, 1, 0), 2)
    bab = Word((1, 0, 1), 2)
    assert fbar_word(aba, bab) == 1.0 - 2 / 3
    assert lcs_exhaustive(aba.symbols, bab.symbols) == 2


def test_fbar_word_matches_exhaustive_oracle():
    rng = random.Random(53)
    for _ in range(60):
        n = rng.randint(1, 7)
        u, w = rand_word(rng, n, 3), rand_word(rng, n, 3)
        assert fbar_word(u, w) == 1.0 - lcs_exhaustive(u.symbols, w.symbols) / n


def test_fbar_word_errors():
    with pytest.raises(LengthMismatchError):
        fbar_word(Word((0,), 2), Word((0, 1), 2))
    with pytest.raises(ValueError):
        fbar_word(Word((), 2), Word((), 2))


def test_fbar_word_symmetry_and_triangle():
    rng = random.Random(59)
    from fkdyn.matching import block_fit
    for _ in range(200):
        n = rng.randint(1, 32)
        u, v, w = (rand_word(rng, n) for _ in range(3))
        assert fbar_word(u, w) == fbar_word(w, u)
        # integer form of the triangle: k_uv + k_vw <= n + k_uw
        k_uw = block_fit(u, w, n, 1).fit
        k_uv = block_fit(u, v, n, 1).fit
        k_vw = block_fit(v, w, n, 1).fit
        assert k_uv + k_vw <= n + k_uw


def test_fbar_n_delta_identity_and_wide_delta():
    x = SturmianSource(GOLDEN)
    assert fbar_n_delta(x, x, 64, 0.25) == 0.0
    z = BernoulliSource(4, 0.5)
    y = BernoulliSource(5, 0.5)
    assert fbar_n_delta(z, y, 64, 1.5) == 0.0  # delta beyond the diameter


def test_fbar_n_delta_shifted_alternating_quarter():
    x = PeriodicSource((0, 1))
    assert fbar_n_delta(x, x.shifted(1), 4, 0.6) == 0.25


def test_fbar_n_delta_rejects_mixed_modes():
    with pytest.raises(IncompatibleSourcesError):
        fbar_n_delta(PeriodicSource((0, 1)), RotationSource(GOLDEN), 8, 0.5)


def test_delta_profile_identity_zeros():
    x = morse_source()
    prof = delta_profile(x, x, 32, [0.1, 0.2, 0.5])
    assert prof.values == (0.0, 0.0, 0.0)


def test_delta_profile_single_wide_point():
    x = BernoulliSource(1, 0.5)
    z = BernoulliSource(2, 0.5)
    assert delta_profile(x, z, 16, [2.0]).values == (0.0,)


def test_delta_profile_monotone_and_consistent():
    x = BernoulliSource(10, 0.5)
    z = BernoulliSource(11, 0.5)
    n = 512
    grid, _ = delta_grid(1 / 32, 1.0)
    prof = delta_profile(x, z, n, grid)
    assert all(a >= b for a, b in zip(prof.values, prof.values[1:]))
    for d, v in zip(prof.grid, prof.values):
        assert v == fbar_n_delta(x, z, n, d)
        assert 0.0 <= v <= 1.0
        assert (v * n) == int(round(v * n))  # lattice value, multiple of 1/n


def test_delta_profile_grid_validation():
    x = PeriodicSource((0,))
    for bad in ([], [0.2, 0.2], [0.3, 0.1], [-0.1, 0.5], [0.0, 0.5]):
        with pytest.raises(InvalidGridError):
            delta_profile(x, x, 8, bad)


def test_rho_fk_identity_is_first_grid_point():
    x = SturmianSource(GOLDEN)
    est = rho_fk_estimate(x, x, 128, 1 / 64)
    assert est.value == 1 / 64
    assert est.kind == "fk" and est.horizon == 128 and est.grid_step == 1 / 64


def test_rho_fk_alternating_shift_small():
    x = PeriodicSource((0, 1))
    est = rho_fk_estimate(x, x.shifted(1), 1024, 1 / 64)
    assert est.value <= 1 / 32


def test_rho_fk_bisection_equals_linear_scan():
    rng = random.Random(61)
    systems = [
        (BernoulliSource(20, 0.5), BernoulliSource(21, 0.5)),
        (SturmianSource(GOLDEN), SturmianSource(GOLDEN, 0.4)),
        (PeriodicSource((0, 1, 1)), PeriodicSource((0, 1, 1), origin=1)),
        (RotationSource(GOLDEN), RotationSource(GOLDEN, 0.3)),
    ]
    for x, z in systems:
        for n in (17, 64, 200):
            step = rng.choice([1 / 16, 1 / 32, 1 / 64])
            grid, sentinel = delta_grid(step, pair_diameter(x, z))
            est = rho_fk_estimate(x, z, n, step)
            linear = next((d for d in grid if fbar_n_delta(x, z, n, d) < d), sentinel)
            assert est.value == linear


def test_rho_fk_bernoulli_pair_in_expected_band():
    x = BernoulliSource(1, 0.5)
    z = BernoulliSource(2, 0.5)
    assert 0.2 <= rho_fk_estimate(x, z, 4096, 1 / 64).value <= 0.6


def test_rho_fk_value_on_grid_or_sentinel():
    x = BernoulliSource(30, 0.5)
    z = BernoulliSource(31, 0.5)
    step = 1 / 64
    grid, sentinel = delta_grid(step, 1.0)
    value = rho_fk_estimate(x, z, 256, step).value
    assert value in grid or value == sentinel


def test_rho_b_identity_zero():
    x = morse_source()
    assert rho_b_estimate(x, x, 200).value == 0.0


def test_rho_b_alternating_shift_is_one():
    x = PeriodicSource((0, 1))
    z = x.shifted(1)
    for n in (1, 7, 64, 333):
        est = rho_b_estimate(x, z, n)
        assert est.value == 1.0
        assert est.kind == "besicovitch" and est.grid_step is None


def test_rho_b_rotation_quarter_offset():
    x = RotationSource(GOLDEN, 0.0)
    z = RotationSource(GOLDEN, 0.25)
    for n in (3, 50):
        assert rho_b_estimate(x, z, n).value == pytest.approx(0.25, abs=1e-12)


def test_rho_b_prime_identity_and_alternating():
    x = PeriodicSource((0, 1))
    assert rho_b_prime_estimate(x, x, 64, 1 / 64).value == 1 / 64
    # the shifted pair disagrees at time zero everywhere: density 1 up to
    # the diameter, so the sentinel just past 1 is the answer
    assert rho_b_prime_estimate(x, x.shifted(1), 64, 1 / 64).value == 1.0 + 1 / 64


def test_rho_fk_dominated_by_rho_b_prime():
    rng = random.Random(67)
    pairs = [
        (BernoulliSource(40, 0.5), BernoulliSource(41, 0.5)),
        (SturmianSource(GOLDEN), SturmianSource(GOLDEN, 0.7)),
        (morse_source(), morse_source().shifted(5)),
        (RotationSource(GOLDEN), RotationSource(GOLDEN, 0.1)),
    ]
    for x, z in pairs:
        for _ in range(3):
            n = rng.randint(16, 400)
            step = rng.choice([1 / 16, 1 / 64])
            fk = rho_fk_estimate(x, z, n, step).value
            bp = rho_b_prime_estimate(x, z, n, step).value
            assert fk <= bp


def test_fbar_dominated_by_bad_time_density():
    rng = random.Random(71)
    x = BernoulliSource(50, 0.5)
    z = BernoulliSource(51, 0.5)
    for _ in range(20):
        n = rng.randint(8, 256)
        delta = rng.choice([0.05, 0.2, 0.5, 0.9])
        d = pointwise_distances(x, z, n)
        density = int((d >= delta).sum()) / n
        assert fbar_n_delta(x, z, n, delta) <= density + 1e-15


def test_pointwise_distances_symbolic_values():
    x = ExplicitSource((0, 1, 0, 1, 1, 0, 0, 0), 2)
    z = ExplicitSource((0, 1, 1, 1, 1, 0, 0, 1), 2)
    d = pointwise_distances(x, z, 4)
    # first disagreements at offsets 2,1,0 then full agreement to capacity
    assert d.tolist() == [0.25, 0.5, 1.0, 2.0 ** -4]


def test_pointwise_distances_identity_zero():
    x = BernoulliSource(8, 0.5)
    assert pointwise_distances(x, x, 100).tolist() == [0.0] * 100


def test_shift_stability_bound():
    # |fbar_{n,d}(Tx, z) - fbar_{n+1,d}(x, z)| <= 2/n
    rng = random.Random(73)
    x = SturmianSource(GOLDEN)
    z = SturmianSource(GOLDEN, 0.35)
    for _ in range(15):
        n = rng.randint(8, 200)
        delta = rng.choice([0.1, 0.3, 0.7])
        lhs = fbar_n_delta(x.shifted(1), z, n, delta)
        rhs = fbar_n_delta(x, z, n + 1, delta)
        assert abs(lhs - rhs) <= 2 / n + 1e-15


def test_fbar_word_equals_fbar_n_delta_on_explicit_sources():
    rng = random.Random(79)
    for _ in range(25):
        n = rng.randint(1, 40)
        u = rand_word(rng, n)
        w = rand_word(rng, n)
        # delta = 1.0 has agreement length 1: exactly symbol equality
        assert fbar_n_delta(ExplicitSource(u), ExplicitSource(w), n, 1.0) == fbar_word(u, w)


def test_densities():
    evens = range(0, 10, 2)
    assert upper_density(evens, 10) == Fraction(1, 2)
    assert upper_density([], 10) == 0
    assert upper_density(range(10), 10) == 1
    squares = [k * k for k in range(200)]
    assert upper_density(squares, 10_000) == Fraction(1, 100)
    assert lower_density(squares, 10_000) == Fraction(1, 100)
    assert isinstance(upper_density(evens, 10), Fraction)


def test_doubling_schedule():
    assert doubling_schedule(64, 512) == [64, 128, 256, 512]
    assert doubling_schedule(100, 500) == [100, 200, 400]
    with pytest.raises(ValueError):
        doubling_schedule(0, 10)


def test_fbar_delta_estimate_proxy():
    x = BernoulliSource(60, 0.5)
    z = BernoulliSource(61, 0.5)
    est = fbar_delta_estimate(x, z, 0.3, 32, 256)
    assert est.schedule == (32, 64, 128, 256)
    assert est.trajectory == tuple(fbar_n_delta(x, z, n, 0.3) for n in est.schedule)
    assert est.proxy == max(est.trajectory[-3:])


def test_degenerate_horizon_rejected():
    x = PeriodicSource((0, 1))
    for call in (lambda: fbar_n_delta(x, x, 0, 0.5),
                 lambda: rho_fk_estimate(x, x, 0),
                 lambda: rho_b_estimate(x, x, 0),
                 lambda: rho_b_prime_estimate(x, x, 0),
                 lambda: upper_density([1], 0)):
        with pytest.raises(ValueError):
            call()
