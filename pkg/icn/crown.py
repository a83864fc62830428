"""The crown poset, membership in IC_n and the interval machinery built on it.

The crown on [n] (n even) is the cycle 1 < 2 > 3 < 4 > ... < n > 1: odd points
are minimal, even points maximal, and the only comparabilities are between
cyclic neighbours. All "+1" below is cyclic, so n + 1 is read as 1.
"""

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

from .core import (
    DimensionError,
    DomainError,
    PartialInjection,
    compose,
    cyclic_add,
    cyclic_sub,
    from_pairs,
    inverse,
)


class HypothesisViolatedError(ValueError):
    """Image-side interval data requested while {1, n} lies in Dom or Im."""


class NotMemberError(ValueError):
    """A map outside IC_n was passed where membership is required."""

    def __init__(self, report: "MembershipReport", a: PartialInjection):
        self.report = report
        self.element = a
        super().__init__(
            f"{a} is not in IC_{a.n}: condition ({report.violated}) fails at {report.witness}"
        )


@dataclass(frozen=True)
class CrownPoset:
    n: int

    def __post_init__(self) -> None:
        if self.n < 2 or self.n % 2:
            raise DomainError(f"the crown needs an even size >= 2, got {self.n}")

    def _check(self, x: int) -> None:
        if not 1 <= x <= self.n:
            raise DomainError(f"point {x} outside [1, {self.n}]")

    def covers(self, x: int, y: int) -> bool:
        """True iff x < y is a cover: x odd and y one of its cyclic neighbours."""
        self._check(x)
        self._check(y)
        if x % 2 == 0 or y % 2 == 1:
            return False
        return y in (cyclic_add(x, 1, self.n), cyclic_sub(x, 1, self.n))

    def comparable(self, x: int, y: int) -> bool:
        return self.covers(x, y) or self.covers(y, x)

    def cover_pairs(self) -> list[tuple[int, int]]:
        """All (lower, upper) pairs."""
        return [(x, y) for x in range(1, self.n + 1, 2)
                for y in sorted({cyclic_sub(x, 1, self.n), cyclic_add(x, 1, self.n)})]


@dataclass(frozen=True)
class MembershipReport:
    """Verdict of the three-condition membership test.

    ``violated`` is "1", "2" or "3" naming the first failing condition, and
    ``witness`` the smallest point at which it fails.
    """

    member: bool
    violated: Optional[str] = None
    witness: Optional[int] = None

    def to_json(self) -> dict:
        return {"member": self.member, "violated": self.violated, "witness": self.witness}


@dataclass(frozen=True)
class IntervalDecomposition:
    """Maximal intervals of Dom a, with image blocks when they are defined.

    Intervals list their points in cyclic order, so a block merged across
    n and 1 reads (..., n, 1, ...). ``sigma[s - 1]`` is the 1-based number of
    the block whose image is the s-th from the left.
    """

    intervals: tuple[tuple[int, ...], ...]
    images: tuple[tuple[int, ...], ...] = ()
    t: tuple[int, ...] = ()
    q: tuple[int, ...] = ()
    sigma: tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return len(self.intervals)


def _check_poset(p: CrownPoset, a: PartialInjection) -> None:
    if p.n != a.n:
        raise DimensionError(f"map on [{a.n}] tested against the crown on [{p.n}]")


# ---------------------------------------------------------------------------
# Order preservation and membership
# ---------------------------------------------------------------------------

def is_order_preserving(p: CrownPoset, a: PartialInjection) -> bool:
    """x < y implies xa < ya for all x, y in Dom a."""
    _check_poset(p, a)
    for x, y in p.cover_pairs():
        ax, ay = a(x), a(y)
        if ax and ay and not p.covers(ax, ay):
            return False
    return True


def is_member_definition(p: CrownPoset, a: PartialInjection) -> bool:
    return is_order_preserving(p, a) and is_order_preserving(p, inverse(a))


def _adjacent_images(u: int, v: int, n: int) -> bool:
    return abs(u - v) == 1 or {u, v} == {1, n}


def is_member_prop1(p: CrownPoset, a: PartialInjection) -> MembershipReport:
    """Membership through the local successor and parity conditions.

    (1) x, x+1 in Dom a forces xa, (x+1)a to be neighbours;
    (2) the same for a^-1 on Im a;
    (3) a point whose image has the other parity has no successor in Dom a.
    """
    _check_poset(p, a)
    n = a.n
    for x in range(1, n + 1):
        nxt = cyclic_add(x, 1, n)
        if a(x) and a(nxt) and not _adjacent_images(a(x), a(nxt), n):
            return MembershipReport(False, "1", x)

    inv = inverse(a)
    for y in range(1, n + 1):
        nxt = cyclic_add(y, 1, n)
        if inv(y) and inv(nxt) and not _adjacent_images(inv(y), inv(nxt), n):
            return MembershipReport(False, "2", y)

    for x, y in a.pairs():
        if (x - y) % 2 and a(cyclic_add(x, 1, n)):
            return MembershipReport(False, "3", x)

    return MembershipReport(True)


def is_member(a: PartialInjection) -> bool:
    return is_member_prop1(CrownPoset(a.n), a).member


def require_member(a: PartialInjection) -> None:
    """Raise NotMemberError with the report when a is outside IC_n."""
    report = is_member_prop1(CrownPoset(a.n), a)
    if not report.member:
        raise NotMemberError(report, a)


# ---------------------------------------------------------------------------
# Parity classes
# ---------------------------------------------------------------------------

def chi(a: PartialInjection) -> frozenset[int]:
    """Domain points whose image has the other parity."""
    return frozenset(x for x, y in a.pairs() if (x - y) % 2)


def classify(a: PartialInjection) -> str:
    """'P' for parity-preserving members, 'Pbar' for parity-mixing ones."""
    require_member(a)
    return "Pbar" if chi(a) else "P"


def odds(n: int) -> frozenset[int]:
    return frozenset(range(1, n + 1, 2))


def evens(n: int) -> frozenset[int]:
    return frozenset(range(2, n + 1, 2))


def u_set(n: int, dual: bool = False) -> list[PartialInjection]:
    """All maps with Dom = evens and Im = odds (swapped when ``dual``).

    The points of either class are pairwise incomparable, so every bijection
    between them lies in IC_n.
    """
    source, target = (odds(n), evens(n)) if dual else (evens(n), odds(n))
    src = sorted(source)
    return [from_pairs(zip(src, perm), n) for perm in itertools.permutations(sorted(target))]


def rank_at_least(elements: Iterable[PartialInjection], k: int) -> list[PartialInjection]:
    """The members of rank >= k."""
    return [a for a in elements if a.rank >= k]


# ---------------------------------------------------------------------------
# Maximal intervals
# ---------------------------------------------------------------------------

def raw_intervals(points: Iterable[int]) -> list[tuple[int, ...]]:
    """Runs of consecutive integers, no cyclic merge."""
    runs: list[list[int]] = []
    for x in sorted(points):
        if runs and runs[-1][-1] == x - 1:
            runs[-1].append(x)
        else:
            runs.append([x])
    return [tuple(r) for r in runs]


def cyclic_intervals(points: Iterable[int], n: int) -> list[tuple[int, ...]]:
    """Runs of consecutive points with the runs through n and 1 merged."""
    runs = raw_intervals(points)
    if len(runs) > 1 and runs[0][0] == 1 and runs[-1][-1] == n:
        merged = runs[-1] + runs[0]
        runs = runs[1:-1] + [merged]
    return runs


def maximal_intervals(a: PartialInjection, with_images: bool = True) -> IntervalDecomposition:
    """Decompose Dom a into maximal intervals.

    Args:
        a: A member of IC_n
        with_images: Also compute the image blocks, their endpoints and the
            ordering permutation; needs {1, n} outside Dom a and outside Im a

    Raises:
        HypothesisViolatedError: Image-side data requested with {1, n}
            contained in Dom a or Im a
    """
    n = a.n
    intervals = tuple(cyclic_intervals(a.domain, n))
    if not with_images:
        return IntervalDecomposition(intervals)

    dom, img = a.domain, a.image
    if {1, n} <= dom or {1, n} <= img:
        raise HypothesisViolatedError(
            f"image blocks of {a} need {{1, {n}}} outside both Dom and Im"
        )
    images = tuple(tuple(a(x) for x in block) for block in intervals)
    t = tuple(min(j) for j in images)
    q = tuple(max(j) for j in images)
    sigma = tuple(r + 1 for r in sorted(range(len(intervals)), key=lambda r: t[r]))
    return IntervalDecomposition(intervals, images, t, q, sigma)


def interval_signature(a: PartialInjection) -> Counter:
    """Multiset of interval shapes that survives rank-preserving products.

    A full domain counts as one cyclic block. Blocks of size >= 2 keep their
    endpoint parities; a singleton only keeps its size.
    """
    n = a.n
    if a.rank == n:
        return Counter([("cycle", n)])
    shapes = Counter()
    for block in cyclic_intervals(a.domain, n):
        if len(block) == 1:
            shapes[(1,)] += 1
        else:
            shapes[(len(block),) + tuple(sorted((block[0] % 2, block[-1] % 2)))] += 1
    return shapes


def check_remark1(a: PartialInjection, b1: PartialInjection, b2: PartialInjection) -> bool:
    """Either b1 a b2 drops rank or its domain has the same interval shapes as Dom a."""
    c = compose(compose(b1, a), b2)
    if c.rank < a.rank:
        return True
    return interval_signature(c) == interval_signature(a)


# ---------------------------------------------------------------------------
# Orientation
# ---------------------------------------------------------------------------

def _cyclic_descents(seq: list[int]) -> int:
    k = len(seq)
    return sum(1 for i in range(k) if seq[i] > seq[(i + 1) % k])


def is_orientation_preserving(a: PartialInjection) -> bool:
    """Images read in increasing domain order have at most one cyclic descent."""
    return _cyclic_descents([y for _, y in a.pairs()]) <= 1


def is_orientation_reversing(a: PartialInjection) -> bool:
    return _cyclic_descents([y for _, y in a.pairs()][::-1]) <= 1


# ---------------------------------------------------------------------------
# Gap property of parity-preserving maps
# ---------------------------------------------------------------------------

def has_domain_gap_successors(a: PartialInjection) -> bool:
    """Every non-domain point is followed by a domain point, and the boundary
    pair {1, n} lies in neither Dom a nor Im a."""
    n = a.n
    dom, img = a.domain, a.image
    if {1, n} <= dom or {1, n} <= img:
        return False
    return all(cyclic_add(x, 1, n) in dom for x in range(1, n + 1) if x not in dom)


def has_image_gap_successors(a: PartialInjection) -> bool:
    """Every non-image point is followed by an image point."""
    n = a.n
    img = a.image
    return all(cyclic_add(y, 1, n) in img for y in range(1, n + 1) if y not in img)
