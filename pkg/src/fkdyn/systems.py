"""Deterministic generators for symbolic and circle dynamical systems.

A source describes one point of a dynamical system together with the map
iterates: for subshifts the element at index k is the k-th symbol of the
point, and applying the map is an index advance; for circle rotations the
element at index k is a point of [0, 1).  All sources are pure: reading any
index range twice yields identical results.

The metric on subshifts is fixed to d(x, y) = 2**-min{k >= 0 : x_k != y_k}
(distance 1 when the leading symbols differ), so delta-closeness of two
orbit positions reduces to agreement of the next `agreement_length(delta)`
symbols.  The circle carries d(a, b) = min(|a - b|, 1 - |a - b|).
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rng import integer_below, mix64, unit_interval, values_at

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

SHIFT_DIAMETER = 1.0
CIRCLE_DIAMETER = 0.5

# Pointwise symbolic distances are cut off here: suffixes agreeing on the
# next AGREEMENT_CAP symbols count as distance 0 (2**-128 < 3e-39).
AGREEMENT_CAP = 128

_NEAR_RATIONAL_TOL = 1e-12
_NEAR_RATIONAL_MAX_DEN = 100


class InvalidRulesError(ValueError):
    """Substitution rules violate the fixed-point requirements."""


class NonExpandingError(ValueError):
    """Substitution rules cannot grow the seed symbol into longer words."""


@dataclass(frozen=True)
class Word:
    """A finite symbol sequence over the alphabet 0..alphabet_size-1."""

    symbols: tuple
    alphabet_size: int
    flags: tuple = ()

    def __post_init__(self):
        if self.alphabet_size < 1:
            raise ValueError("alphabet_size must be >= 1")
        for s in self.symbols:
            if not 0 <= s < self.alphabet_size:
                raise ValueError(f"symbol {s} outside alphabet of size {self.alphabet_size}")

    def __len__(self):
        return len(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def __iter__(self):
        return iter(self.symbols)


def agreement_length(delta: float) -> int:
    """Least L >= 0 with 2**-L < delta.

    Two orbit positions of a subshift are delta-close exactly when their
    next L symbols agree.  L = 0 means every pair is delta-close.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    L = 0
    while 2.0 ** -L >= delta:
        L += 1
    return L


def circle_distance(a, b):
    """Arc-length metric on the circle R/Z; accepts scalars or arrays."""
    gap = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    gap = gap % 1.0
    return np.minimum(gap, 1.0 - gap)


def _normalize_rules(rules) -> dict:
    out = {}
    for sym, image in rules.items():
        image = tuple(int(v) for v in image)
        if not image:
            raise InvalidRulesError(f"rule for symbol {sym} has empty image")
        out[int(sym)] = image
    alphabet = max(max(im) for im in out.values())
    alphabet = max(alphabet, max(out)) + 1
    for s in range(alphabet):
        if s not in out:
            raise InvalidRulesError(f"no rule for symbol {s}")
    return out


def _expand(word, rules):
    return [s for c in word for s in rules[c]]


def substitution_word(rules, seed: int, min_len: int) -> Word:
    """Prefix of the substitution fixed point, exactly `min_len` symbols.

    Applies the rules to the seed symbol until the word reaches `min_len`,
    then truncates.  The rule for the seed must start with the seed so the
    iteration converges to a one-sided fixed point.
    """
    if min_len < 1:
        raise ValueError("min_len must be >= 1")
    rules = _normalize_rules(rules)
    seed = int(seed)
    if rules[seed][0] != seed:
        raise InvalidRulesError(f"rule for seed {seed} does not start with {seed}")
    if len(rules[seed]) == 1:
        # The seed maps to itself alone, so iteration is stuck at one symbol.
        raise NonExpandingError("rules never grow the seed word")
    word = [seed]
    while len(word) < min_len:
        word = _expand(word, rules)
    alphabet = max(max(im) for im in rules.values()) + 1
    return Word(tuple(word[:min_len]), alphabet)


def _sturmian_symbols(alpha: float, beta: float, start: int, length: int) -> np.ndarray:
    k = np.arange(start, start + length, dtype=float)
    return (np.floor((k + 1.0) * alpha + beta) - np.floor(k * alpha + beta)).astype(np.int64)


def _near_rational(alpha: float) -> bool:
    approx = Fraction(alpha).limit_denominator(_NEAR_RATIONAL_MAX_DEN)
    return abs(alpha - float(approx)) < _NEAR_RATIONAL_TOL


def sturmian_word(alpha: float, beta: float, n: int) -> Word:
    """Mechanical word s_k = floor((k+1)a + b) - floor(ka + b), k < n.

    A rational alpha (within 1e-12 of p/q, q <= 100) does not raise but
    flags the word `near-rational-alpha`, since the coding is then
    eventually periodic and invalidates unique-ergodicity experiments.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    flags = ("near-rational-alpha",) if _near_rational(alpha) else ()
    return Word(tuple(_sturmian_symbols(alpha, beta, 0, n).tolist()), 2, flags)


def _bernoulli_symbols(seed: int, p: float, start: int, length: int) -> np.ndarray:
    threshold = np.uint64(int(p * (1 << 53)))
    draws = values_at(seed, start, length) >> np.uint64(11)
    return (draws < threshold).astype(np.int64)


def bernoulli_word(seed: int, p: float, n: int) -> Word:
    """n i.i.d. Bernoulli(p) bits from the splitmix64 counter stream."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    return Word(tuple(_bernoulli_symbols(seed, p, 0, n).tolist()), 2)


def rotation_orbit(alpha: float, theta0: float, n: int) -> np.ndarray:
    """Points theta0, theta0 + a, ..., theta0 + (n-1)a, reduced mod 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return RotationSource(alpha, theta0).points(0, n)


class OrbitSource:
    """One point of a deterministic dynamical system, indexable along its orbit."""

    kind = "abstract"
    is_symbolic = True

    @property
    def capacity(self):
        """Largest readable index + 1, or None when unbounded."""
        return None

    def shifted(self, steps: int) -> "OrbitSource":
        """The source advanced `steps` applications of the map."""
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


class SymbolicSource(OrbitSource):
    alphabet_size = 2

    def word(self, start: int, length: int) -> Word:
        raise NotImplementedError


class SubstitutionSource(SymbolicSource):
    """Fixed point of a primitive-style substitution, read as a subshift point."""

    kind = "substitution"

    def __init__(self, rules, seed_symbol: int = 0, origin: int = 0, name: str = None):
        self.rules = _normalize_rules(rules)
        self.seed_symbol = int(seed_symbol)
        self.origin = int(origin)
        self.name = name
        if self.rules[self.seed_symbol][0] != self.seed_symbol:
            raise InvalidRulesError(
                f"rule for seed {self.seed_symbol} does not start with {self.seed_symbol}")
        if len(self.rules[self.seed_symbol]) == 1:
            raise NonExpandingError("rules never grow the seed word")
        self.alphabet_size = max(max(im) for im in self.rules.values()) + 1
        self._cache = [self.seed_symbol]

    def _ensure(self, upto: int):
        while len(self._cache) < upto:
            self._cache = _expand(self._cache, self.rules)

    def word(self, start: int, length: int) -> Word:
        self._ensure(self.origin + start + length)
        lo = self.origin + start
        return Word(tuple(self._cache[lo:lo + length]), self.alphabet_size)

    def shifted(self, steps: int):
        out = SubstitutionSource(self.rules, self.seed_symbol, self.origin + steps, self.name)
        out._cache = self._cache  # share the grown prefix
        return out

    def describe(self) -> str:
        if self.name:
            body = self.name
        else:
            body = ",".join(f"{s}->" + "".join(map(str, im)) for s, im in sorted(self.rules.items()))
        return f"substitution:{body}+{self.origin}"


def morse_source() -> SubstitutionSource:
    return SubstitutionSource({0: (0, 1), 1: (1, 0)}, 0, name="morse")


def chacon_source() -> SubstitutionSource:
    return SubstitutionSource({0: (0, 0, 1, 0), 1: (1,)}, 0, name="chacon")


def fibonacci_source() -> SubstitutionSource:
    return SubstitutionSource({0: (0, 1), 1: (0,)}, 0, name="fibonacci")


class PeriodicSource(SymbolicSource):
    kind = "periodic"

    def __init__(self, period, origin: int = 0):
        self.period = tuple(int(v) for v in period)
        if not self.period:
            raise ValueError("period word must be nonempty")
        self.origin = int(origin)
        self.alphabet_size = max(self.period) + 1

    def word(self, start: int, length: int) -> Word:
        p = len(self.period)
        lo = self.origin + start
        syms = tuple(self.period[(lo + i) % p] for i in range(length))
        return Word(syms, self.alphabet_size)

    def shifted(self, steps: int):
        return PeriodicSource(self.period, self.origin + steps)

    def describe(self) -> str:
        return "periodic:" + "".join(map(str, self.period)) + f"+{self.origin}"


class ExplicitSource(SymbolicSource):
    """A literal finite word; reads past the end raise."""

    kind = "explicit"

    def __init__(self, symbols, alphabet_size: int = None, origin: int = 0):
        if isinstance(symbols, Word):
            self.symbols = symbols.symbols
            alphabet_size = symbols.alphabet_size if alphabet_size is None else alphabet_size
        else:
            self.symbols = tuple(int(v) for v in symbols)
        if alphabet_size is None:
            alphabet_size = (max(self.symbols) + 1) if self.symbols else 1
        self.alphabet_size = alphabet_size
        self.origin = int(origin)

    @property
    def capacity(self):
        return len(self.symbols) - self.origin

    def word(self, start: int, length: int) -> Word:
        lo = self.origin + start
        if lo + length > len(self.symbols):
            raise ValueError(
                f"explicit source holds {len(self.symbols)} symbols, "
                f"requested range ends at {lo + length}")
        return Word(self.symbols[lo:lo + length], self.alphabet_size)

    def shifted(self, steps: int):
        return ExplicitSource(self.symbols, self.alphabet_size, self.origin + steps)

    def describe(self) -> str:
        head = "".join(map(str, self.symbols[:16]))
        tail = "..." if len(self.symbols) > 16 else ""
        return f"explicit:{head}{tail}+{self.origin}"


class SturmianSource(SymbolicSource):
    kind = "sturmian"
    alphabet_size = 2

    def __init__(self, alpha: float, beta: float = 0.0, origin: int = 0):
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0.0 <= beta < 1.0:
            raise ValueError("beta must lie in [0, 1)")
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.origin = int(origin)
        self.near_rational = _near_rational(self.alpha)

    def word(self, start: int, length: int) -> Word:
        syms = _sturmian_symbols(self.alpha, self.beta, self.origin + start, length)
        flags = ("near-rational-alpha",) if self.near_rational else ()
        return Word(tuple(syms.tolist()), 2, flags)

    def shifted(self, steps: int):
        return SturmianSource(self.alpha, self.beta, self.origin + steps)

    def describe(self) -> str:
        return f"sturmian:alpha={self.alpha!r},beta={self.beta!r}+{self.origin}"


class BernoulliSource(SymbolicSource):
    kind = "bernoulli"
    alphabet_size = 2

    def __init__(self, seed: int, p: float = 0.5, origin: int = 0):
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        self.seed = int(seed)
        self.p = float(p)
        self.origin = int(origin)

    def word(self, start: int, length: int) -> Word:
        syms = _bernoulli_symbols(self.seed, self.p, self.origin + start, length)
        return Word(tuple(syms.tolist()), 2)

    def shifted(self, steps: int):
        return BernoulliSource(self.seed, self.p, self.origin + steps)

    def describe(self) -> str:
        return f"bernoulli:seed={self.seed},p={self.p!r}+{self.origin}"


class RotationSource(OrbitSource):
    """Circle rotation theta -> theta + alpha mod 1, started at theta0."""

    kind = "rotation"
    is_symbolic = False

    def __init__(self, alpha: float, theta0: float = 0.0, origin: int = 0):
        self.alpha = float(alpha)
        self.theta0 = float(theta0) % 1.0
        self.origin = int(origin)

    @property
    def theta_at_origin(self) -> float:
        """The current point: theta0 advanced by the accumulated shift."""
        return (self.theta0 + self.origin * self.alpha) % 1.0

    def points(self, start: int, length: int) -> np.ndarray:
        k = np.arange(self.origin + start, self.origin + start + length, dtype=float)
        return (self.theta0 + k * self.alpha) % 1.0

    def shifted(self, steps: int):
        return RotationSource(self.alpha, self.theta0, self.origin + steps)

    def describe(self) -> str:
        return f"rotation:alpha={self.alpha!r},theta0={self.theta0!r}+{self.origin}"


def orbit_word(source: OrbitSource, start: int, length: int) -> Word:
    """Symbols at orbit indices start .. start+length-1 of a symbolic source."""
    if not source.is_symbolic:
        raise TypeError("orbit_word requires a symbolic source")
    if start < 0 or length < 0:
        raise ValueError("start and length must be non-negative")
    return source.word(start, length)


def independent_variant(system: OrbitSource, seed: int, counter: int) -> OrbitSource:
    """A fresh point of the same system, for 'independent' pair sampling.

    Bernoulli gets a derived seed, Sturmian a random intercept, rotation a
    random initial point.  Single-orbit systems (substitution, periodic,
    explicit) have no independent second point, so they fall back to a
    seed-derived shift along the same orbit.
    """
    if isinstance(system, BernoulliSource):
        return BernoulliSource(mix64(system.seed, seed, counter), system.p)
    if isinstance(system, SturmianSource):
        return SturmianSource(system.alpha, unit_interval(mix64(seed, counter), 0))
    if isinstance(system, RotationSource):
        return RotationSource(system.alpha, unit_interval(mix64(seed, counter), 1))
    return system.shifted(integer_below(mix64(seed, counter), 2, 1 << 16))
