"""Sampling experiments that shadow the classification theory.

Universally quantified properties (all pairs FK-close, every open set
containing an FK-separated pair, ...) are not checkable from finite data,
so every probe here reports *evidence*: statistics over seed-determined
samples along a generic orbit, reproducible bit-for-bit from
(configuration, seed).

Measure-theoretic sampling is approximated by orbit sampling: offsets are
drawn uniformly from [0, 16 * n), which for uniquely ergodic systems is
justified by Birkhoff averaging along any orbit.
"""

import statistics
from dataclasses import dataclass

import numpy as np

from .pseudometrics import DEFAULT_GRID_STEP, fbar_word, pair_diameter, rho_fk_estimate
from .rng import integer_below, mix64, unit_interval
from .systems import (ExplicitSource, OrbitSource, RotationSource, Word,
                      agreement_length, circle_distance, independent_variant)

SENSITIVE_EVIDENCE = "SENSITIVE-EVIDENCE"
CONTINUITY_EVIDENCE = "CONTINUITY-EVIDENCE"

# Forced-prefix depths for ball candidates are drawn from [0, 32) without
# reference to delta_ball, so the qualifying sets at two radii are nested
# and fk_ball_sup is monotone in delta_ball by construction.
_BALL_DEPTH_RANGE = 32

_OFFSET_FACTOR = 16  # offsets live in [0, 16 * n); decorrelates windows


class InvalidBallError(ValueError):
    """Ball radius exceeds the metric diameter."""


@dataclass(frozen=True)
class HorizonStats:
    horizon: int
    maximum: float
    median: float
    minimum: float


@dataclass(frozen=True)
class ProbeReport:
    """Per-horizon pairwise FK statistics for one sampled pair set."""

    schedule: tuple
    per_horizon: tuple      # HorizonStats, one per schedule entry
    pair_count: int
    seed: int
    grid_step: float
    per_pair: tuple         # raw estimates, one tuple per horizon


@dataclass(frozen=True)
class PartitionWord:
    """An n-step itinerary through a finite partition, read as a word."""

    word: Word
    partition_id: str


@dataclass(frozen=True)
class ScanResult:
    eps_grid: tuple
    ball_grid: tuple
    verdicts: tuple         # (epsilon, verdict string) per epsilon
    ball_sups: tuple        # rows per center, columns per ball radius
    min_sup: float
    n: int
    seed: int
    grid_step: float


def _offset(seed, counter, n):
    return integer_below(seed, counter, _OFFSET_FACTOR * n)


def _splice(center: OrbitSource, tail: OrbitSource, prefix_len: int, length: int):
    """Point of the ambient shift agreeing with `center` on its first symbols."""
    head = center.word(0, prefix_len).symbols if prefix_len else ()
    rest = tail.word(prefix_len, length - prefix_len).symbols
    return ExplicitSource(head + rest, center.alphabet_size)


def _word_distance(u, w):
    """Shift-metric distance 2**-(first disagreement); 0 when equal throughout."""
    for k, (a, b) in enumerate(zip(u, w)):
        if a != b:
            return 2.0 ** -k
    return 0.0


def sample_pairs(system: OrbitSource, count: int, seed: int, strategy: str,
                 max_offset: int = None, ball_delta: float = None,
                 horizon: int = None):
    """Seed-determined pairs of points of one system.

    strategy:
      'shifted'      (T^a x, T^b x) along the generic orbit, offsets uniform
                     in [0, max_offset);
      'independent'  fresh points (seeds / intercepts / initial angles);
                     single-orbit systems fall back to shifted sampling;
      'ball'         (x, y) with d(x, y) <= ball_delta: symbolic sources get
                     a spliced second word sharing the first
                     agreement_length(ball_delta) symbols (requires
                     `horizon` to size the spliced word), rotations get a
                     nearby initial angle.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if strategy == "shifted":
        bound = max_offset if max_offset is not None else _OFFSET_FACTOR * 1024
        if bound < 1:
            raise ValueError("max_offset must be >= 1")
        return [(system.shifted(integer_below(seed, 2 * i, bound)),
                 system.shifted(integer_below(seed, 2 * i + 1, bound)))
                for i in range(count)]
    if strategy == "independent":
        return [(independent_variant(system, seed, 2 * i),
                 independent_variant(system, seed, 2 * i + 1))
                for i in range(count)]
    if strategy == "ball":
        if ball_delta is None:
            raise ValueError("ball strategy needs ball_delta")
        if ball_delta > pair_diameter(system, system):
            raise InvalidBallError(
                f"ball_delta {ball_delta} exceeds the metric diameter")
        if system.is_symbolic:
            if horizon is None:
                raise ValueError("symbolic ball sampling needs horizon")
            length = horizon + 64
            prefix = agreement_length(ball_delta)
            pairs = []
            for i in range(count):
                x = system.shifted(_offset(mix64(seed, 3 * i), 0, horizon))
                tail = system.shifted(_offset(mix64(seed, 3 * i + 1), 0, horizon))
                pairs.append((x, _splice(x, tail, prefix, length)))
            return pairs
        pairs = []
        for i in range(count):
            x = system.shifted(_offset(mix64(seed, 3 * i), 0, horizon or 1024))
            u = 2.0 * unit_interval(mix64(seed, 3 * i + 2), 0) - 1.0
            pairs.append((x, RotationSource(x.alpha, x.theta_at_origin + u * ball_delta)))
        return pairs
    raise ValueError(f"unknown strategy {strategy!r}")


def tlk_probe(system: OrbitSource, schedule, pair_count: int, seed: int,
              grid_step: float = DEFAULT_GRID_STEP) -> ProbeReport:
    """Evidence probe for the all-pairs-FK-vanishing property.

    Pairs mix the shifted and independent strategies half and half (seeds
    mix64(seed, 0) and mix64(seed, 1), shifted offsets in
    [0, 16 * max(schedule))); each horizon reports max/median/min of the
    pairwise FK estimates.  Vanishing maxima across the schedule are
    evidence for, stubbornly positive maxima evidence against.
    """
    schedule = [int(n) for n in schedule]
    if not schedule or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be nonempty and strictly increasing")
    n_max = schedule[-1]
    n_shifted = (pair_count + 1) // 2
    pairs = sample_pairs(system, n_shifted, mix64(seed, 0), "shifted",
                         max_offset=_OFFSET_FACTOR * n_max)
    if pair_count > n_shifted:
        pairs += sample_pairs(system, pair_count - n_shifted, mix64(seed, 1),
                              "independent")
    stats = []
    raw = []
    for n in schedule:
        vals = [rho_fk_estimate(x, z, n, grid_step).value for x, z in pairs]
        stats.append(HorizonStats(n, max(vals), statistics.median(vals), min(vals)))
        raw.append(tuple(vals))
    return ProbeReport(tuple(schedule), tuple(stats), pair_count, seed,
                       grid_step, tuple(raw))


def _ball_members(system, center, ball_delta, sample_count, n, grid_step, seed):
    """Center plus the pool candidates that landed inside the closed ball."""
    if system.is_symbolic:
        pad = max(64, agreement_length(grid_step) + 1)
        length = n + pad
        center_word = center.word(0, length).symbols
        members = [center]
        for i in range(sample_count):
            # Candidate 0 is pinned to the deepest prefix, so any ball of
            # radius >= 2**-(depth range) keeps at least one member.
            if i == 0:
                depth = _BALL_DEPTH_RANGE - 1
            else:
                depth = integer_below(mix64(seed, 2 * i), 0, _BALL_DEPTH_RANGE)
            tail = system.shifted(_offset(mix64(seed, 2 * i + 1), 0, n))
            cand = _splice(center, tail, depth, length)
            if _word_distance(center_word, cand.symbols) <= ball_delta:
                members.append(cand)
        return members
    theta_c = center.theta_at_origin
    members = [center]
    for i in range(sample_count):
        u = unit_interval(mix64(seed, 2 * i), 0) - 0.5
        if i == 0:
            u *= 2.0 ** -30  # pinned near the center, as in the symbolic case
        cand = RotationSource(center.alpha, theta_c + u)
        if float(circle_distance(theta_c, cand.theta0)) <= ball_delta:
            members.append(cand)
    return members


def fk_ball_sup(system: OrbitSource, center_seed: int, ball_delta: float,
                sample_count: int, n: int, grid_step: float = DEFAULT_GRID_STEP,
                seed: int = 0) -> float:
    """Max pairwise FK estimate over points sampled in one metric ball.

    The center is an orbit point at a center_seed-derived offset; a pool of
    `sample_count` candidates is drawn once (depths independent of
    ball_delta) and filtered to the closed ball, so enlarging ball_delta
    only ever adds members.  A degenerate ball (center only) returns
    grid_step, the diagonal FK estimate.
    """
    if sample_count < 2:
        raise ValueError("sample_count must be >= 2")
    if ball_delta > pair_diameter(system, system):
        raise InvalidBallError(f"ball_delta {ball_delta} exceeds the metric diameter")
    center = system.shifted(_offset(mix64(center_seed), 0, n))
    members = _ball_members(system, center, ball_delta, sample_count, n,
                            grid_step, seed)
    if len(members) < 2:
        return grid_step
    best = grid_step
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            best = max(best, rho_fk_estimate(members[i], members[j], n, grid_step).value)
    return best


def sensitivity_scan(system: OrbitSource, eps_grid, ball_grid, centers: int,
                     samples_per_ball: int, n: int, seed: int,
                     grid_step: float = DEFAULT_GRID_STEP) -> ScanResult:
    """FK-sensitivity versus FK-continuity evidence over sampled balls.

    For each epsilon: SENSITIVE-EVIDENCE when every sampled ball at every
    radius has fk_ball_sup > epsilon, CONTINUITY-EVIDENCE when some ball
    stays within epsilon.  Verdicts are sampling evidence, never proof;
    thresholds do not scale with n.
    """
    eps_grid = tuple(float(e) for e in eps_grid)
    ball_grid = tuple(float(b) for b in ball_grid)
    if not eps_grid or not ball_grid:
        raise ValueError("eps_grid and ball_grid must be nonempty")
    sups = tuple(
        tuple(fk_ball_sup(system, mix64(seed, 17, c), b, samples_per_ball, n,
                          grid_step, mix64(seed, 23, c))
              for b in ball_grid)
        for c in range(centers))
    min_sup = min(min(row) for row in sups)
    verdicts = tuple((eps, SENSITIVE_EVIDENCE if min_sup > eps else CONTINUITY_EVIDENCE)
                     for eps in eps_grid)
    return ScanResult(eps_grid, ball_grid, verdicts, sups, min_sup, n, seed, grid_step)


def partition_word(system: OrbitSource, offset: int, n: int, partition_spec) -> PartitionWord:
    """Length-n itinerary of T^offset(x) through the chosen partition.

    partition_spec: 'symbols' for the zero-coordinate partition of a
    subshift, or ('arcs', m) for the m-arc partition of the circle.
    """
    if partition_spec == "symbols":
        if not system.is_symbolic:
            raise ValueError("'symbols' partition needs a symbolic system")
        return PartitionWord(system.word(offset, n), "symbols")
    kind, arcs = partition_spec
    if kind != "arcs":
        raise ValueError(f"unknown partition spec {partition_spec!r}")
    if system.is_symbolic:
        raise ValueError("arc partitions apply to rotation systems")
    arcs = int(arcs)
    pts = system.points(offset, n)
    syms = np.minimum((pts * arcs).astype(np.int64), arcs - 1)
    return PartitionWord(Word(tuple(syms.tolist()), arcs), f"arcs:{arcs}")


def katok_check(system: OrbitSource, partition_spec, n: int, eps: float,
                sample_count: int, seed: int) -> float:
    """Sampling form of the loose-Kronecker word criterion.

    Draws `sample_count` partition words at seed-derived orbit offsets; for
    each candidate center w, measures the fraction of samples w' with
    fbar(w, w') < eps, and returns the best fraction.  The best sample
    stands in for the existential center; fractions near 1 support the
    criterion, fractions near 0 refute it at this scale.
    """
    if sample_count < 2:
        raise ValueError("sample_count must be >= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    words = [partition_word(system, _offset(mix64(seed, i), 0, n), n, partition_spec).word
             for i in range(sample_count)]
    close = np.eye(sample_count, dtype=bool)  # fbar(w, w) = 0 < eps
    for i in range(sample_count):
        for j in range(i + 1, sample_count):
            close[i, j] = close[j, i] = fbar_word(words[i], words[j]) < eps
    return max(int(row.sum()) for row in close) / sample_count
