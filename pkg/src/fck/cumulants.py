"""Moment <-> cumulant calculus over the partition lattices.

Free cumulants invert the moment functional over non-crossing partitions;
their Boolean counterparts invert it over interval partitions.  Both
directions run as recursions with memoization keyed by sub-words: the
free recursion splits on the block containing the first letter, the
Boolean one on the first interval block.  Cyclic canonicalization is
never applied to cumulant arguments (only tracial oracles may apply it to
whole moments).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
import random

from .errors import IncompleteTableError, OracleError, SizeLimitError
from .partitions import Family, enumerate_partitions, join, one_block, is_interval

FREE = "free"
BOOLEAN = "boolean"

DEFAULT_WORD_CAP = 16


class MomentOracle:
    """Normalized expectation on words of abstract letters.

    Subclasses implement _moment for nonempty words; the empty word is 1
    and results are memoized.  Letters must be hashable; evaluation must
    be deterministic.
    """

    def __init__(self, backend):
        self.backend = backend
        self._cache = {}

    def moment(self, word):
        word = tuple(word)
        if not word:
            return self.backend.one
        try:
            return self._cache[word]
        except KeyError:
            pass
        try:
            value = self._moment(word)
        except OracleError:
            raise
        except Exception as exc:  # attach the offending sub-word
            raise OracleError(f"oracle failed on {word!r}: {exc}", word=word) from exc
        self._cache[word] = value
        return value

    def _moment(self, word):
        raise NotImplementedError


class DictOracle(MomentOracle):
    """Finite table of word moments; missing words are oracle failures."""

    def __init__(self, backend, table):
        super().__init__(backend)
        self.table = {tuple(k): backend.convert(v) for k, v in table.items()}

    def _moment(self, word):
        try:
            return self.table[word]
        except KeyError:
            raise OracleError(f"no moment recorded for word {word!r}", word=word)


class SequenceOracle(MomentOracle):
    """Single-letter oracle backed by a moment sequence m_1, m_2, ..."""

    def __init__(self, backend, moments, letter="x"):
        super().__init__(backend)
        self.moments = [backend.one] + [backend.convert(m) for m in moments]
        self.letter = letter

    def _moment(self, word):
        if any(l != self.letter for l in word):
            raise OracleError(f"unknown letter in {word!r}", word=word)
        if len(word) >= len(self.moments):
            raise OracleError(
                f"moment sequence too short for word of length {len(word)}", word=word
            )
        return self.moments[len(word)]


class CumulantCalculator:
    """Free and Boolean cumulants of words over one oracle, memoized."""

    def __init__(self, oracle, word_cap=DEFAULT_WORD_CAP):
        self.oracle = oracle
        self.backend = oracle.backend
        self.word_cap = word_cap
        self._free = {}
        self._bool = {}

    def cumulant(self, word, kind):
        if kind == FREE:
            return self.free_cumulant(word)
        if kind == BOOLEAN:
            return self.boolean_cumulant(word)
        raise ValueError(f"unknown cumulant kind {kind!r}")

    def _guard(self, word):
        word = tuple(word)
        if not 1 <= len(word) <= self.word_cap:
            raise SizeLimitError(
                f"word length {len(word)} outside 1..{self.word_cap}"
            )
        return word

    def free_cumulant(self, word):
        """Invert the non-crossing moment sum: subtract every proper
        first-block contribution from the full moment."""
        word = self._guard(word)
        n = len(word)
        if n == 1:
            return self.oracle.moment(word)
        try:
            return self._free[word]
        except KeyError:
            pass
        total = self.oracle.moment(word)
        rest = range(1, n)
        for size in range(0, n - 1):
            for chosen in combinations(rest, size):
                block = (0,) + chosen
                sub = tuple(word[i] for i in block)
                kappa = self.free_cumulant(sub)
                if kappa == 0:
                    continue
                term = kappa
                bounds = block + (n,)
                for a, b in zip(bounds, bounds[1:]):
                    gap = word[a + 1 : b]
                    if gap:
                        term = term * self.oracle.moment(gap)
                total -= term
        self._free[word] = total
        return total

    def boolean_cumulant(self, word):
        """Invert the interval moment sum via the first interval block."""
        word = self._guard(word)
        n = len(word)
        if n == 1:
            return self.oracle.moment(word)
        try:
            return self._bool[word]
        except KeyError:
            pass
        total = self.oracle.moment(word)
        for j in range(1, n):
            total -= self.boolean_cumulant(word[:j]) * self.oracle.moment(word[j:])
        self._bool[word] = total
        return total

    def partitioned_cumulant(self, word, partition, kind):
        """Product of cumulants over the blocks of a partition."""
        word = tuple(word)
        value = self.backend.one
        for block in partition.blocks:
            sub = tuple(word[i - 1] for i in block)
            value = value * self.cumulant(sub, kind)
        return value


@dataclass
class CumulantTable:
    """Explicit block-cumulant entries keyed by argument words."""

    kind: str
    backend: object
    entries: dict = field(default_factory=dict)

    def entry(self, word):
        try:
            return self.entries[tuple(word)]
        except KeyError:
            raise IncompleteTableError(
                f"cumulant table has no entry for block word {tuple(word)!r}"
            )


def cumulants_from_moments(oracle, word, kind, word_cap=DEFAULT_WORD_CAP):
    """kappa_n(word) or beta_n(word) for a single word."""
    return CumulantCalculator(oracle, word_cap).cumulant(word, kind)


def build_cumulant_table(oracle, word, kind, word_cap=DEFAULT_WORD_CAP):
    """Table of all block entries the lattice sum over `word` can request."""
    calc = CumulantCalculator(oracle, word_cap)
    word = tuple(word)
    n = len(word)
    table = CumulantTable(kind, oracle.backend)
    if kind == BOOLEAN:
        subs = [word[a:b] for a in range(n) for b in range(a + 1, n + 1)]
    else:
        subs = []
        for size in range(1, n + 1):
            for chosen in combinations(range(n), size):
                subs.append(tuple(word[i] for i in chosen))
    for sub in subs:
        table.entries[sub] = calc.cumulant(sub, kind)
    return table


def moments_from_cumulants(table, word):
    """Lattice sum of block-cumulant products: NC(n) for free, Int(n) for Boolean."""
    word = tuple(word)
    n = len(word)
    family = Family.NONCROSSING if table.kind == FREE else Family.INTERVAL
    total = table.backend.zero
    for part in enumerate_partitions(n, family):
        term = table.backend.one
        for block in part.blocks:
            term = term * table.entry(tuple(word[i - 1] for i in block))
        total += term
    return total


# -- Boolean cumulants with products as entries ------------------------------


class ProductLetterOracle(MomentOracle):
    """Oracle whose letters are groups of base letters, spliced on evaluation."""

    def __init__(self, base):
        super().__init__(base.backend)
        self.base = base

    def _moment(self, word):
        flat = tuple(l for group in word for l in group)
        return self.base.moment(flat)


def grouped_boolean_cumulant(oracle, args, grouping, word_cap=DEFAULT_WORD_CAP):
    """Boolean cumulant whose entries are the products along an interval grouping,
    computed as the lattice sum over interval partitions joining the grouping
    to the one-block partition."""
    args = tuple(args)
    n = len(args)
    if grouping.n != n or not is_interval(grouping):
        raise OracleError(
            f"grouping {grouping} is not an interval partition of the {n} arguments"
        )
    calc = CumulantCalculator(oracle, word_cap)
    top = one_block(n)
    total = oracle.backend.zero
    for part in enumerate_partitions(n, Family.INTERVAL):
        if join(part, grouping) == top:
            total += calc.partitioned_cumulant(args, part, BOOLEAN)
    return total


def grouped_boolean_direct(oracle, args, grouping, word_cap=DEFAULT_WORD_CAP):
    """The same grouped Boolean cumulant, evaluated on the product letters."""
    args = tuple(args)
    groups = tuple(tuple(args[i - 1] for i in block) for block in grouping.blocks)
    product_oracle = ProductLetterOracle(oracle)
    return CumulantCalculator(product_oracle, word_cap).boolean_cumulant(groups)


# -- alternating products of two free families --------------------------------

BOCU1 = "bocu1"
REFORMULATED = "reformulated"


def _joint_engine(x_moments, y_moments, backend, order):
    from .freeprod import FreeProduct  # local import: freeprod builds on this module

    return FreeProduct.from_moment_sequences(x_moments, y_moments, backend, order)


def _alternating_word(x, y, count_x):
    """x y x ... y x with count_x x's and count_x - 1 y's."""
    word = []
    for i in range(count_x):
        word.append(x)
        if i < count_x - 1:
            word.append(y)
    return tuple(word)


def alternating_moment_mixed(x_moments, y_moments, n, path, backend, word_cap=DEFAULT_WORD_CAP):
    """Moment of the alternating product x y x y ... (n pairs) of two free
    elements, assembled from Boolean cumulants and lower moments of y.

    `path` selects one of the two equivalent summation orders: "bocu1"
    sums over the increasing cut positions of the outer y-block, while
    "reformulated" sums over the gap compositions.  Both must agree with
    the free-product engine's direct value.
    """
    if n < 1:
        raise SizeLimitError("alternating moment needs n >= 1")
    engine = _joint_engine(x_moments, y_moments, backend, order=2 * n + 2)
    calc = CumulantCalculator(engine.oracle(), word_cap)
    X, Y = engine.left_unit(), engine.right_unit()
    y_mom = engine.right_moment

    def beta_alt(count_x):
        return calc.boolean_cumulant(_alternating_word(X, Y, count_x))

    total = backend.zero
    if path == BOCU1:
        for k in range(0, n):
            for cuts in combinations(range(1, n), k):
                js = (0,) + cuts + (n,)
                term = y_mom(k + 1)
                for a, b in zip(js, js[1:]):
                    term = term * beta_alt(b - a)
                total += term
        return total
    if path == REFORMULATED:
        def compositions(total_sum, parts):
            if parts == 1:
                yield (total_sum,)
                return
            for head in range(total_sum + 1):
                for rest in compositions(total_sum - head, parts - 1):
                    yield (head,) + rest

        for k in range(1, n + 1):
            for comp in compositions(n - k, k):
                term = y_mom(k)
                for i in comp:
                    term = term * beta_alt(i + 1)
                total += term
        return total
    raise ValueError(f"unknown path {path!r}")


def odd_alternating_boolean(x_moments, y_moments, n, backend, word_cap=DEFAULT_WORD_CAP):
    """Odd Boolean cumulant of x y x ... y x (n+1 x's) two ways.

    Returns (left, right): `left` inverts the joint oracle directly;
    `right` is the nested sum over increasing index chains, whose inner
    factors alternate starting and ending with y.  The two must be equal.
    """
    engine = _joint_engine(x_moments, y_moments, backend, order=2 * n + 2)
    calc = CumulantCalculator(engine.oracle(), word_cap)
    X, Y = engine.left_unit(), engine.right_unit()

    left = calc.boolean_cumulant(_alternating_word(X, Y, n + 1))

    def beta_alt_y(count_y):
        word = []
        for i in range(count_y):
            word.append(Y)
            if i < count_y - 1:
                word.append(X)
        return calc.boolean_cumulant(tuple(word))

    def beta_x(k):
        return calc.boolean_cumulant((X,) * k)

    right = backend.zero
    for k in range(2, n + 2):
        for middle in combinations(range(2, n + 1), k - 2):
            js = (1,) + middle + (n + 1,)
            term = beta_x(k)
            for a, b in zip(js, js[1:]):
                term = term * beta_alt_y(b - a)
            right += term
    return left, right


# -- deterministic random oracles for property sweeps -------------------------


def seeded_rational(rng, max_abs=9):
    """The documented integer-to-rational scheme: numerator in
    [-max_abs, max_abs], denominator in [1, max_abs], both uniform."""
    return Fraction(rng.randint(-max_abs, max_abs), rng.randint(1, max_abs))


def seeded_dict_oracle(backend, seed, word, kind=FREE):
    """Oracle filled with deterministic pseudo-random rational moments for
    every block sub-word the `kind` lattice sum over `word` can request."""
    rng = random.Random(seed)
    word = tuple(word)
    n = len(word)
    if kind == BOOLEAN:
        subs = [word[a:b] for a in range(n) for b in range(a + 1, n + 1)]
    else:
        subs = []
        for size in range(1, n + 1):
            for chosen in combinations(range(n), size):
                subs.append(tuple(word[i] for i in chosen))
    table = {}
    for sub in sorted(set(subs)):
        table[sub] = seeded_rational(rng)
    return DictOracle(backend, table)


def seeded_moment_sequence(seed, length, positive_mean=True, max_abs=9):
    """Deterministic rational moment sequence for marginal-law sweeps."""
    rng = random.Random(seed)
    moments = [seeded_rational(rng, max_abs) for _ in range(length)]
    if positive_mean and moments and moments[0] == 0:
        moments[0] = Fraction(1, 2)
    return moments
