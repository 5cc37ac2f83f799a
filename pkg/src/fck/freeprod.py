"""Joint moments of two free elements from their marginal laws.

Words are sequences of tagged letters, each letter a function of one of
the two generators.  Expectations are computed by recursing on the block
of the first letter: only blocks whose letters share one tag contribute,
the block weight is a marginal cumulant of the block's functions, and the
gaps factorize.  Memoization covers whole words (cyclically canonicalized
-- the state is a trace), marginal cumulants of ordered argument tuples,
and marginal moments of products (collapsed to multisets, since a single
generator's algebra is commutative).

Rational letters never reach the recursion: the certified entry point
replaces them by truncated expansions first and returns the exact value
of the replaced word together with an operator-norm bound on the
replacement error.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .cumulants import CumulantCalculator, MomentOracle
from .distributions import Expectation, SpectralDistribution
from .errors import BackendError, CapabilityError, DomainError, SizeLimitError
from .funcdesc import (
    INV,
    INV1M,
    POLY,
    PSI,
    XINV1MSQ,
    FunctionDescriptor,
    geometric_truncation,
    poly_mul,
    poly_norm_bound,
    reciprocal_truncation,
)
from .partitions import Family, enumerate_partitions

LEFT = "L"
RIGHT = "R"

DEFAULT_WORD_CAP = 26
DEFAULT_BLOCK_CAP = 20


@dataclass(frozen=True)
class Letter:
    side: str
    fn: FunctionDescriptor

    def __post_init__(self):
        if self.side not in (LEFT, RIGHT):
            raise DomainError(f"letter side must be {LEFT!r} or {RIGHT!r}")


def left(fn=None):
    return Letter(LEFT, fn or FunctionDescriptor.identity())


def right(fn=None):
    return Letter(RIGHT, fn or FunctionDescriptor.identity())


class FreeProduct:
    """Evaluation engine for words in two free generators."""

    def __init__(self, left_law, right_law, word_cap=DEFAULT_WORD_CAP):
        if left_law.backend is not right_law.backend:
            raise BackendError("marginal laws must share one scalar backend")
        self.backend = left_law.backend
        self.laws = {LEFT: left_law, RIGHT: right_law}
        self.word_cap = word_cap
        self._phi_cache = {}
        self._kappa_cache = {LEFT: {}, RIGHT: {}}
        self._fold_cache = {LEFT: {}, RIGHT: {}}
        self._master = {LEFT: None, RIGHT: None}

    @staticmethod
    def from_moment_sequences(x_moments, y_moments, backend, order):
        def seq(source):
            if isinstance(source, SpectralDistribution):
                return source
            if callable(source):
                return SpectralDistribution(
                    backend, [source(k) for k in range(1, order + 1)]
                )
            return SpectralDistribution(backend, list(source)[:order])

        return FreeProduct(seq(x_moments), seq(y_moments))

    # -- letters and marginals -------------------------------------------

    def law(self, side):
        return self.laws[side]

    def left_unit(self):
        return left()

    def right_unit(self):
        return right()

    def left_moment(self, k):
        return self.laws[LEFT].moment(k)

    def right_moment(self, k):
        return self.laws[RIGHT].moment(k)

    def oracle(self):
        return _JointOracle(self)

    def calculator(self):
        return CumulantCalculator(self.oracle(), word_cap=self.word_cap)

    # -- public evaluation -------------------------------------------------

    def joint_moment(self, word):
        """Expectation of a word of polynomial letters."""
        factor, fused = self._fuse(word)
        if factor == 0:
            return self.backend.zero
        if len(fused) > self.word_cap:
            raise SizeLimitError(
                f"fused word length {len(fused)} exceeds cap {self.word_cap}"
            )
        return factor * self._phi(self._canonical(fused))

    def mixed_free_cumulant(self, word):
        return self.calculator().free_cumulant(tuple(word))

    def joint_moment_certified(self, word, degree=80):
        """Expectation of a word that may contain rational letters.

        Each rational letter is replaced by its truncated expansion of the
        given degree; the returned error bound is
        prod(norm_i + rem_i) - prod(norm_i) over the letters, where norm_i
        dominates both the letter and its replacement and rem_i the
        replacement error, all in operator norm.
        """
        poly_letters = []
        norms = []
        rems = []
        for letter in word:
            coeffs, func_norm, rem = self._polynomialize(letter, degree)
            poly_letters.append(Letter(letter.side, FunctionDescriptor.poly(coeffs)))
            norms.append(func_norm + rem)
            rems.append(rem)
        value = self.joint_moment(poly_letters)
        clean = self.backend.one
        padded = self.backend.one
        for g, r in zip(norms, rems):
            clean = clean * g
            padded = padded * (g + r)
        return Expectation(value, padded - clean)

    def _polynomialize(self, letter, degree):
        fn = letter.fn
        law = self.laws[letter.side]
        if fn.kind == POLY:
            if law.support is None:
                raise CapabilityError(
                    f"law {law.label or letter.side} lacks a spectral interval"
                )
            hi = self.backend.convert(law.support.hi)
            return fn.coeffs, poly_norm_bound(fn.coeffs, hi, self.backend), self.backend.zero
        if law.support is None:
            raise CapabilityError(
                f"rational letter {fn.kind} needs a spectral interval on its law"
            )
        lo, hi = law.support.lo, law.support.hi
        b = self.backend
        if fn.kind in (PSI, INV1M, XINV1MSQ):
            rho = b.convert(hi)
            if not rho < b.one:
                raise CapabilityError(
                    f"{fn.kind} letter needs spectrum in [0, rho], rho < 1;"
                    f" law has hi = {hi}"
                )
            coeffs, rem = geometric_truncation(fn, degree, hi, b)
            one = b.one
            if fn.kind == PSI:
                func_norm = rho / (one - rho)
            elif fn.kind == INV1M:
                func_norm = one / (one - rho)
            else:
                func_norm = rho / (one - rho) ** 2
            return coeffs, func_norm, rem
        if fn.kind == INV:
            coeffs, rem = reciprocal_truncation(degree, lo, hi, b)
            return coeffs, b.one / b.convert(lo), rem
        raise CapabilityError(f"cannot expand letter kind {fn.kind}")

    # -- fusion and canonical form ----------------------------------------

    def _fuse(self, word):
        """Merge adjacent same-side letters, pull out scalar factors.

        Returns (scalar_factor, tuple of (side, coeffs)).  Only polynomial
        letters are accepted here; rational letters go through
        joint_moment_certified.
        """
        factor = self.backend.one
        fused = []
        for letter in word:
            if letter.fn.kind != POLY:
                raise CapabilityError(
                    f"letter {letter.fn.kind} must be expanded before evaluation;"
                    " use joint_moment_certified"
                )
            coeffs = tuple(self.backend.convert(c) for c in letter.fn.coeffs)
            item = (letter.side, coeffs)
            fused.append(item)
        changed = True
        while changed:
            changed = False
            out = []
            for item in fused:
                if out and out[-1][0] == item[0]:
                    out[-1] = (item[0], poly_mul(out[-1][1], item[1]))
                    changed = True
                else:
                    out.append(item)
            # extract constants
            kept = []
            for side, coeffs in out:
                if len(coeffs) == 1:
                    factor = factor * coeffs[0]
                    changed = True
                    if factor == 0:
                        return self.backend.zero, ()
                else:
                    kept.append((side, coeffs))
            fused = kept
        return factor, tuple(fused)

    @staticmethod
    def _canonical(word):
        """Representative of the cyclic class: cyclically fuse, then take the
        least rotation.  Valid because the state is a trace."""
        word = list(word)
        while len(word) >= 2 and word[0][0] == word[-1][0]:
            side, last = word.pop()
            word[0] = (side, poly_mul(last, word[0][1]))
        if len(word) <= 1:
            return tuple(word)
        rotations = [tuple(word[i:] + word[:i]) for i in range(len(word))]
        return min(rotations)

    # -- recursion ----------------------------------------------------------

    def _phi(self, word):
        if not word:
            return self.backend.one
        if len(word) == 1:
            side, coeffs = word[0]
            return self._product_phi(side, (coeffs,))
        try:
            return self._phi_cache[word]
        except KeyError:
            pass
        side0 = word[0][0]
        positions = [i for i, (s, _) in enumerate(word) if s == side0]
        if len(positions) > DEFAULT_BLOCK_CAP:
            raise SizeLimitError(
                f"{len(positions)} same-tag letters exceed the block cap"
            )
        n = len(word)
        total = self.backend.zero
        others = positions[1:]
        for size in range(len(others) + 1):
            for chosen in combinations(others, size):
                block = (0,) + chosen
                args = tuple(word[i][1] for i in block)
                kappa = self._kappa(side0, args)
                if kappa == 0:
                    continue
                term = kappa
                bounds = block + (n,)
                for a, b in zip(bounds, bounds[1:]):
                    gap = word[a + 1 : b]
                    if gap:
                        term = term * self._phi(self._canonical(gap))
                        if term == 0:
                            break
                total += term
        self._phi_cache[word] = total
        return total

    def _kappa(self, side, args):
        """Marginal free cumulant of an ordered tuple of polynomial functions."""
        if len(args) == 1:
            return self._product_phi(side, args)
        cache = self._kappa_cache[side]
        try:
            return cache[args]
        except KeyError:
            pass
        n = len(args)
        total = self._product_phi(side, args)
        for size in range(0, n - 1):
            for chosen in combinations(range(1, n), size):
                block = (0,) + chosen
                sub = tuple(args[i] for i in block)
                kappa = self._kappa(side, sub)
                if kappa == 0:
                    continue
                term = kappa
                bounds = block + (n,)
                for a, b in zip(bounds, bounds[1:]):
                    gap = args[a + 1 : b]
                    if gap:
                        term = term * self._product_phi(side, gap)
                total -= term
        cache[args] = total
        return total

    def _product_phi(self, side, fns):
        """Marginal moment of a product of polynomial functions (a multiset)."""
        key = tuple(sorted(fns, key=lambda c: (-len(c), c)))
        cache = self._fold_cache[side]
        try:
            return cache[key][0]
        except KeyError:
            pass
        total_degree = sum(len(c) - 1 for c in key)
        law = self.laws[side]
        master = self._master[side]
        if master is None or len(master) <= total_degree:
            depth = max(total_degree, 2 * len(master or ()) if master else 0)
            master = law.moments_to(depth)
            self._master[side] = master
            cache.clear()
        vec = master
        prefix = ()
        for coeffs in key:
            prefix = prefix + (coeffs,)
            hit = cache.get(prefix)
            if hit is not None:
                vec = hit
                continue
            deg = len(coeffs) - 1
            out_len = len(vec) - deg
            nxt = []
            for s in range(out_len):
                acc = self.backend.zero
                for k, c in enumerate(coeffs):
                    if c != 0:
                        acc += c * vec[s + k]
                nxt.append(acc)
            vec = nxt
            cache[prefix] = vec
        return vec[0]


class _JointOracle(MomentOracle):
    def __init__(self, engine):
        super().__init__(engine.backend)
        self.engine = engine

    def _moment(self, word):
        return self.engine.joint_moment(word)


# -- independent oracles used by the test batteries ---------------------------


def joint_moment_by_centering(engine, word):
    """Definition-driven evaluation: expand every letter into its centered
    part plus its mean; the fully centered alternating term vanishes."""
    backend = engine.backend
    factor, fused = engine._fuse(word)
    if factor == 0:
        return backend.zero

    def rec(w):
        if not w:
            return backend.one
        if len(w) == 1:
            side, coeffs = w[0]
            return engine._product_phi(side, (coeffs,))
        means = [engine._product_phi(side, (coeffs,)) for side, coeffs in w]
        total = backend.zero
        idx = range(len(w))
        for rsize in range(1, len(w) + 1):
            for taken in combinations(idx, rsize):
                coeff = backend.one
                for i in taken:
                    coeff = coeff * means[i]
                if coeff == 0:
                    continue
                rest = []
                for i in idx:
                    if i not in taken:
                        side, coeffs = w[i]
                        centered = (coeffs[0] - means[i],) + coeffs[1:]
                        rest.append(
                            Letter(side, FunctionDescriptor.poly(centered))
                        )
                sub_factor, sub_fused = engine._fuse(rest)
                if sub_factor == 0:
                    continue
                total += coeff * sub_factor * rec(sub_fused)
        return total

    return factor * rec(fused)


def joint_moment_by_nc_sum(engine, word):
    """Exhaustive lattice sum over non-crossing partitions with
    tag-monochromatic blocks."""
    backend = engine.backend
    factor, fused = engine._fuse(word)
    if factor == 0:
        return backend.zero
    n = len(fused)
    if n == 0:
        return factor
    total = backend.zero
    for part in enumerate_partitions(n, Family.NONCROSSING, max_n=12):
        term = backend.one
        for block in part.blocks:
            sides = {fused[i - 1][0] for i in block}
            if len(sides) != 1:
                term = backend.zero
                break
            args = tuple(fused[i - 1][1] for i in block)
            term = term * engine._kappa(sides.pop(), args)
            if term == 0:
                break
        total += term
    return factor * total


# -- freeness verdicts ---------------------------------------------------------


@dataclass(frozen=True)
class CumulantRow:
    tags: tuple
    value: object
    ok: bool


@dataclass(frozen=True)
class FreenessReport:
    rows: tuple
    verdict: str

    @property
    def free(self):
        return self.verdict == "FREE"

    def failures(self):
        return [row for row in self.rows if not row.ok]


def freeness_report(oracle, families, max_order, tol=None):
    """Table of all non-constant mixed free cumulants up to max_order.

    `families` maps a display name to the letter it contributes.  The
    verdict is FREE when every mixed cumulant is zero (exactly on the
    exact backend, within `tol` otherwise).
    """
    backend = oracle.backend
    calc = CumulantCalculator(oracle)
    names = sorted(families)
    rows = []
    all_ok = True
    for order in range(2, max_order + 1):
        for pattern in product(names, repeat=order):
            if len(set(pattern)) < 2:
                continue
            word = tuple(families[name] for name in pattern)
            value = calc.free_cumulant(word)
            ok = value == 0 if backend.exact else backend.is_zero(value, tol)
            all_ok = all_ok and ok
            rows.append(CumulantRow(tags=pattern, value=value, ok=ok))
    return FreenessReport(tuple(rows), "FREE" if all_ok else "NOT FREE")


# -- word grammar ---------------------------------------------------------------

_NAMED = {"psi": PSI, "inv1m": INV1M, "inv": INV, "xinv1msq": XINV1MSQ}


def parse_word(text):
    """Words like "U^2 V U V^3" or "inv1m(U) V psi(U)"; U is the left
    generator, V the right one."""
    letters = []
    for token in text.split():
        power = 1
        if "^" in token:
            token, raw = token.split("^", 1)
            power = int(raw)
            if power < 1:
                raise DomainError(f"letter power must be >= 1 in {token!r}")
        if token.endswith(")") and "(" in token:
            name, arg = token[:-1].split("(", 1)
            if name not in _NAMED:
                raise DomainError(f"unknown function {name!r} in word")
            side = _side_of(arg)
            fn = FunctionDescriptor(_NAMED[name])
            if power != 1:
                raise DomainError("powers of named rational letters are not supported")
            letters.append(Letter(side, fn))
        else:
            side = _side_of(token)
            letters.append(Letter(side, FunctionDescriptor.monomial(power)))
    if not letters:
        raise DomainError("empty word")
    return letters


def _side_of(tag):
    tag = tag.strip().upper()
    if tag == "U":
        return LEFT
    if tag == "V":
        return RIGHT
    raise DomainError(f"unknown generator tag {tag!r} (expected U or V)")
