"""Partial injective transformations on [n].

Elements are written on the right of their argument and products are read
left to right: x(ab) = (xa)b. Every formula in this package composes that
way, so ``compose(a, b)`` applies ``a`` first.

Points are 1-based. An undefined slot holds 0 in memory and ``null`` in JSON.
"""

import itertools
import sys
from dataclasses import dataclass
from datetime import datetime
from math import comb, factorial
from typing import Iterable, Iterator

ENUMERATION_CAP = 8

UNDEFINED = 0


class CrownError(ValueError):
    """Base class for invalid input to the library."""


class DimensionError(CrownError):
    """Operands carry different ground-set sizes."""


class DomainError(CrownError):
    """A point, index or map lies outside its admissible range."""


class CapExceededError(CrownError):
    """An exhaustive enumeration was requested above its configured cap."""


def log_error(msg: str) -> None:
    """Log timestamped error to stderr."""
    timestamp = datetime.now().isoformat()
    print(f"[{timestamp}] {msg}", file=sys.stderr, flush=True)


@dataclass(frozen=True, slots=True)
class PartialInjection:
    """A one-to-one map from a subset of [n] into [n].

    ``images[x - 1]`` is the image of x, or 0 when x is outside the domain.
    """

    n: int
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"ground set size must be positive, got {self.n}")
        if len(self.images) != self.n:
            raise DomainError(f"expected {self.n} slots, got {len(self.images)}")
        seen = set()
        for y in self.images:
            if y == UNDEFINED:
                continue
            if not 1 <= y <= self.n:
                raise DomainError(f"image {y} outside [1, {self.n}]")
            if y in seen:
                raise DomainError(f"image {y} assigned twice")
            seen.add(y)

    @classmethod
    def _trusted(cls, n: int, images: tuple[int, ...]) -> "PartialInjection":
        """Skip validation for slots produced by composition or inversion."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "images", images)
        return obj

    def __call__(self, x: int) -> int:
        """Image of x, 0 when undefined."""
        return self.images[x - 1]

    def __mul__(self, other: "PartialInjection") -> "PartialInjection":
        return compose(self, other)

    def __str__(self) -> str:
        return "[" + ",".join(str(y) if y else "-" for y in self.images) + "]"

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(x for x, y in enumerate(self.images, start=1) if y)

    @property
    def image(self) -> frozenset[int]:
        return frozenset(y for y in self.images if y)

    @property
    def rank(self) -> int:
        return sum(1 for y in self.images if y)

    def pairs(self) -> Iterator[tuple[int, int]]:
        """Defined (x, xa) pairs in increasing x."""
        for x, y in enumerate(self.images, start=1):
            if y:
                yield x, y


# ---------------------------------------------------------------------------
# Cyclic arithmetic on [n]
# ---------------------------------------------------------------------------

def wrap(x: int, n: int) -> int:
    """Representative of x modulo n inside [1, n]."""
    return (x - 1) % n + 1


def cyclic_add(i: int, j: int, n: int) -> int:
    """i + j with n + 1 read as 1."""
    return wrap(i + j, n)


def cyclic_sub(i: int, j: int, n: int) -> int:
    """i - j with 0 read as n."""
    return wrap(i - j, n)


def cyclic_arc(start: int, stop: int, n: int) -> list[int]:
    """Points strictly between start and stop walking forward around the cycle."""
    arc = []
    x = cyclic_add(start, 1, n)
    while x != stop:
        arc.append(x)
        x = cyclic_add(x, 1, n)
    return arc


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def from_pairs(pairs: dict[int, int] | Iterable[tuple[int, int]], n: int) -> PartialInjection:
    """Build a map from (point, image) pairs."""
    items = pairs.items() if isinstance(pairs, dict) else pairs
    slots = [UNDEFINED] * n
    for x, y in items:
        if not 1 <= x <= n:
            raise DomainError(f"point {x} outside [1, {n}]")
        if slots[x - 1]:
            raise DomainError(f"point {x} assigned twice")
        slots[x - 1] = y
    return PartialInjection(n, tuple(slots))


def from_function(f, points: Iterable[int], n: int) -> PartialInjection:
    """Map each point to ``wrap(f(x), n)``; used by the closed-form constructors."""
    return from_pairs(((x, wrap(f(x), n)) for x in points), n)


def identity_on(points: Iterable[int], n: int) -> PartialInjection:
    """id restricted to the given points."""
    return from_pairs(((x, x) for x in points), n)


def identity(n: int) -> PartialInjection:
    return PartialInjection(n, tuple(range(1, n + 1)))


def empty(n: int) -> PartialInjection:
    return PartialInjection(n, (UNDEFINED,) * n)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def _check_same_n(a: PartialInjection, b: PartialInjection) -> None:
    if a.n != b.n:
        raise DimensionError(f"cannot combine maps on [{a.n}] and [{b.n}]")


def compose(a: PartialInjection, b: PartialInjection) -> PartialInjection:
    """Left-to-right product: x(ab) = (xa)b.

    Args:
        a: Applied first
        b: Applied second

    Returns:
        The product, defined exactly where xa is defined and lies in Dom b
    """
    _check_same_n(a, b)
    bi = b.images
    return PartialInjection._trusted(a.n, tuple(bi[y - 1] if y else UNDEFINED for y in a.images))


def compose_all(maps: Iterable[PartialInjection], n: int) -> PartialInjection:
    """Product of a sequence of maps, id for an empty sequence."""
    result = identity(n)
    for m in maps:
        result = compose(result, m)
    return result


def inverse(a: PartialInjection) -> PartialInjection:
    slots = [UNDEFINED] * a.n
    for x, y in a.pairs():
        slots[y - 1] = x
    return PartialInjection._trusted(a.n, tuple(slots))


def rank(a: PartialInjection) -> int:
    return a.rank


def power(a: PartialInjection, k: int) -> PartialInjection:
    """a^k for k >= 0, with a^0 = id."""
    if k < 0:
        raise DomainError(f"negative exponent {k}; use inverse() first")
    result = identity(a.n)
    for _ in range(k):
        result = compose(result, a)
    return result


def restrict(a: PartialInjection, points: Iterable[int]) -> PartialInjection:
    """id|_X followed by a."""
    return compose(identity_on(points, a.n), a)


def is_identity(a: PartialInjection) -> bool:
    return all(y == x for x, y in enumerate(a.images, start=1))


def is_empty(a: PartialInjection) -> bool:
    return a.rank == 0


# ---------------------------------------------------------------------------
# Encodings
# ---------------------------------------------------------------------------

def encode(a: PartialInjection) -> bytes:
    """Fixed-width canonical key: n, then the n slots with 0 for undefined."""
    return bytes((a.n, *a.images))


def decode(data: bytes) -> PartialInjection:
    if not data:
        raise DomainError("empty encoding")
    n = data[0]
    return PartialInjection(n, tuple(data[1:]))


def sort_key(a: PartialInjection) -> tuple:
    """Deterministic order used wherever sets of maps are listed."""
    return (a.n, a.images)


def to_json(a: PartialInjection) -> dict:
    return {"n": a.n, "map": [y if y else None for y in a.images]}


def from_json(obj: dict | list, n: int | None = None) -> PartialInjection:
    """Parse ``{"n": int, "map": [int|null]}`` or a bare slot list.

    Args:
        obj: Parsed JSON value
        n: Expected ground-set size, checked when given

    Returns:
        The parsed map

    Raises:
        DomainError: On malformed input
        DimensionError: When the size disagrees with ``n``
    """
    if isinstance(obj, dict):
        if "map" not in obj:
            raise DomainError("map object needs a 'map' field")
        slots = obj["map"]
        size = obj.get("n", len(slots) if isinstance(slots, list) else None)
    elif isinstance(obj, list):
        slots = obj
        size = len(obj)
    else:
        raise DomainError(f"expected a JSON object or array, got {type(obj).__name__}")

    if not isinstance(slots, list) or not isinstance(size, int) or isinstance(size, bool):
        raise DomainError("malformed map")
    if len(slots) != size:
        raise DomainError(f"map has {len(slots)} slots but n = {size}")
    if n is not None and size != n:
        raise DimensionError(f"map is on [{size}] but n = {n}")

    values = []
    for y in slots:
        if y is None:
            values.append(UNDEFINED)
        elif isinstance(y, int) and not isinstance(y, bool) and y >= 1:
            values.append(y)
        else:
            raise DomainError(f"invalid slot value {y!r}")
    return PartialInjection(size, tuple(values))


# ---------------------------------------------------------------------------
# Exhaustive enumeration
# ---------------------------------------------------------------------------

def count_partial_injections(n: int) -> int:
    """Sum over k of C(n,k)^2 k!."""
    return sum(comb(n, k) ** 2 * factorial(k) for k in range(n + 1))


def enumerate_all_partial_injections(n: int, cap: int = ENUMERATION_CAP) -> Iterator[PartialInjection]:
    """Every partial injection on [n] exactly once.

    Ordered by rank, then domain in lexicographic order, then images in
    lexicographic order.

    Raises:
        CapExceededError: When n is above ``cap``
    """
    if n > cap:
        raise CapExceededError(
            f"refusing to enumerate {count_partial_injections(n)} partial injections "
            f"for n={n} (cap {cap})"
        )
    points = range(1, n + 1)
    for k in range(n + 1):
        for dom in itertools.combinations(points, k):
            for img in itertools.permutations(points, k):
                slots = [UNDEFINED] * n
                for x, y in zip(dom, img):
                    slots[x - 1] = y
                yield PartialInjection(n, tuple(slots))
