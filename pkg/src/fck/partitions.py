"""Set partitions of {1..n}: the full, non-crossing and interval families.

Partitions are immutable and canonical: blocks sorted by least element,
elements ascending inside each block.  Enumeration follows restricted-
growth-string order; the non-crossing and interval enumerators prune the
same search tree, so they emit exactly the partitions the brute-force
family tests accept, in the same order.  Order comparison and join live
in the full partition lattice under reversed refinement.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import DimensionError, DomainError, SizeLimitError

DEFAULT_MAX_N = 14


class Family(Enum):
    ALL = "all"
    NONCROSSING = "nc"
    INTERVAL = "int"


@dataclass(frozen=True)
class Partition:
    """A partition of {1..n} into disjoint nonempty blocks covering {1..n}."""

    n: int
    blocks: tuple

    @staticmethod
    def of(n, blocks):
        """Canonicalize and validate a block collection."""
        canon = tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))
        p = Partition(n, canon)
        p.validate()
        return p

    def validate(self):
        seen = set()
        for block in self.blocks:
            if not block:
                raise DomainError("empty block in partition")
            for el in block:
                if not (1 <= el <= self.n) or el in seen:
                    raise DomainError(f"element {el} invalid or repeated in partition of [{self.n}]")
                seen.add(el)
        if len(seen) != self.n:
            missing = sorted(set(range(1, self.n + 1)) - seen)
            raise DomainError(f"partition of [{self.n}] misses elements {missing}")

    @property
    def size(self):
        """Number of blocks."""
        return len(self.blocks)

    def block_index(self):
        """Map element -> index of its block in canonical order."""
        idx = {}
        for b, block in enumerate(self.blocks):
            for el in block:
                idx[el] = b
        return idx

    def __str__(self):
        return "{" + "|".join(",".join(str(e) for e in b) for b in self.blocks) + "}"


def one_block(n):
    return Partition.of(n, [range(1, n + 1)])


def singletons(n):
    return Partition.of(n, [[i] for i in range(1, n + 1)])


def is_noncrossing(p):
    """Four-point test: no i1 < j1 < i2 < j2 with i1,i2 and j1,j2 in two distinct blocks."""
    idx = p.block_index()
    n = p.n
    for j1 in range(1, n + 1):
        for i2 in range(j1 + 1, n + 1):
            if idx[i2] == idx[j1]:
                continue
            # does block of i2 reach before j1 and block of j1 reach after i2?
            b_i = p.blocks[idx[i2]]
            b_j = p.blocks[idx[j1]]
            if b_i[0] < j1 and b_j[-1] > i2:
                # need an element of b_i before j1 and of b_j after i2
                if any(e < j1 for e in b_i) and any(e > i2 for e in b_j):
                    return False
    return True


def is_interval(p):
    """Three-point test: every block is a contiguous range."""
    for block in p.blocks:
        if block[-1] - block[0] != len(block) - 1:
            return False
    return True


def leq(p, q):
    """Reversed refinement: p <= q iff every block of p lies inside a block of q."""
    if p.n != q.n:
        raise DimensionError(f"partitions of [{p.n}] and [{q.n}] are not comparable")
    qidx = q.block_index()
    for block in p.blocks:
        b0 = qidx[block[0]]
        if any(qidx[el] != b0 for el in block[1:]):
            return False
    return True


def join(p, q):
    """Least upper bound of p and q in the full partition lattice.

    Computed as connected components of the union of the two block-membership
    relations.  For two interval partitions the result is again an interval
    partition, so this also serves as their join inside Int(n).
    """
    if p.n != q.n:
        raise DimensionError(f"cannot join partitions of [{p.n}] and [{q.n}]")
    parent = list(range(p.n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for part in (p, q):
        for block in part.blocks:
            for el in block[1:]:
                union(block[0], el)
    comps = {}
    for el in range(1, p.n + 1):
        comps.setdefault(find(el), []).append(el)
    return Partition.of(p.n, comps.values())


def _check_n(n, max_n):
    if not 1 <= n <= max_n:
        raise SizeLimitError(f"ground-set size {n} outside supported range 1..{max_n}")


def _rgs_partitions(n, family):
    """Yield partitions in restricted-growth-string order, pruning to the family.

    A partial string never recovers once it violates the non-crossing or
    interval condition, so pruning is equivalent to filtering the full
    enumeration while preserving its order.
    """
    assign = [0] * n          # block id per position (0-based)
    last = [0] * (n + 1)      # last position currently in block b
    first = [0] * (n + 1)     # first position of block b

    def rec(i, nblocks):
        if i == n:
            blocks = [[] for _ in range(nblocks)]
            for pos, b in enumerate(assign):
                blocks[b].append(pos + 1)
            yield Partition(n, tuple(tuple(b) for b in blocks))
            return
        for b in range(nblocks + 1):
            if b < nblocks:
                if family is Family.INTERVAL and assign[i - 1] != b:
                    continue
                if family is Family.NONCROSSING:
                    j = last[b]
                    crossing = any(
                        assign[x] != b and first[assign[x]] < j
                        for x in range(j + 1, i)
                    )
                    if crossing:
                        continue
                prev_last = last[b]
                assign[i] = b
                last[b] = i
                yield from rec(i + 1, nblocks)
                last[b] = prev_last
            else:
                assign[i] = b
                first[b] = i
                last[b] = i
                yield from rec(i + 1, nblocks + 1)

    assign[0] = 0
    first[0] = 0
    last[0] = 0
    yield from rec(1, 1)


def enumerate_partitions(n, family=Family.ALL, max_n=DEFAULT_MAX_N):
    """All partitions of {1..n} in the requested family, RGS order."""
    if isinstance(family, str):
        family = Family(family)
    _check_n(n, max_n)
    return list(_rgs_partitions(n, family))


def iter_partitions(n, family=Family.ALL, max_n=DEFAULT_MAX_N):
    """Generator variant of enumerate_partitions."""
    if isinstance(family, str):
        family = Family(family)
    _check_n(n, max_n)
    return _rgs_partitions(n, family)


def count_partitions(n, family=Family.ALL, max_n=DEFAULT_MAX_N):
    if isinstance(family, str):
        family = Family(family)
    _check_n(n, max_n)
    return sum(1 for _ in _rgs_partitions(n, family))
