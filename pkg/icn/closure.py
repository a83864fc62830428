"""Closure of generator sets and the generation checks built on it.

``close`` grows the subsemigroup generated by a set of maps breadth-first:
each round multiplies every new element on the right by every generator.
The first discovery of an element records its parent and generator, so
reading parents back gives a shortest word.
"""

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Hashable, Mapping, Optional, Sequence

import pandas as pd

from .core import (
    CapExceededError,
    DomainError,
    PartialInjection,
    enumerate_all_partial_injections,
    log_error,
    sort_key,
    to_json,
)
from .crown import (
    chi,
    cyclic_intervals,
    evens,
    is_member,
    is_orientation_preserving,
    is_orientation_reversing,
    odds,
)
from .generators import generator_catalog

BRUTE_FORCE_CAP = 8
CLOSURE_CAP = 10

_CHUNK_SIZE = 2048


@dataclass
class ClosureResult:
    # None for the closure of no generators without a given n
    n: Optional[int]
    labels: list[Hashable]
    elements: dict[tuple[int, ...], PartialInjection]
    # images -> (parent images or None for a generator, generator position)
    parents: dict[tuple[int, ...], tuple[Optional[tuple[int, ...]], int]]
    stats: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.elements)

    def contains(self, a: PartialInjection) -> bool:
        return a.n == self.n and a.images in self.elements

    def word_indices(self, a: PartialInjection) -> list[int]:
        """Generator positions of a shortest word for a."""
        if not self.contains(a):
            raise DomainError(f"{a} is not in this closure")
        out = []
        key: Optional[tuple[int, ...]] = a.images
        while key is not None:
            parent, gen = self.parents[key]
            out.append(gen)
            key = parent
        return out[::-1]

    def sorted_elements(self) -> list[PartialInjection]:
        return sorted(self.elements.values(), key=sort_key)

    @property
    def census(self) -> dict[int, int]:
        """Element count per rank."""
        frame = self.census_frame()
        return dict(zip(frame["rank"].tolist(), frame["count"].tolist()))

    def census_frame(self) -> pd.DataFrame:
        return rank_census(self.elements.values())


def rank_census(elements) -> pd.DataFrame:
    ranks = pd.Series([a.rank for a in elements], dtype="int64", name="rank")
    counts = ranks.value_counts().sort_index()
    return pd.DataFrame({"rank": counts.index.astype(int), "count": counts.values.astype(int)})


def _normalize_gens(gens, n: Optional[int] = None) -> tuple[list[Hashable], list[PartialInjection], Optional[int]]:
    if isinstance(gens, Mapping):
        labels, maps = list(gens.keys()), list(gens.values())
    else:
        maps = list(gens)
        labels = list(range(len(maps)))
    if n is None and maps:
        n = maps[0].n
    for g in maps:
        if g.n != n:
            raise DomainError(f"generators on [{g.n}] and [{n}] mixed")
    return labels, maps, n


def _products(chunk: list[tuple[int, ...]], gen_images: list[tuple[int, ...]], known) -> list:
    """Right products of a frontier chunk, in (element, generator) order."""
    out = []
    for x in chunk:
        for idx, g in enumerate(gen_images):
            y = tuple(g[v - 1] if v else 0 for v in x)
            if y not in known:
                out.append((y, x, idx))
    return out


def close(
    gens: Mapping[Any, PartialInjection] | Sequence[PartialInjection],
    threads: int = 1,
    cap: int = CLOSURE_CAP,
    n: Optional[int] = None,
) -> ClosureResult:
    """Every finite product of the generators.

    Args:
        gens: Generators, either labelled or as a plain sequence (labelled by position)
        threads: Worker threads for expanding a frontier; results are merged
            in frontier order, so the output does not depend on it
        cap: Largest n accepted
        n: Size of the underlying set; taken from the generators when
            omitted, and left as None for an empty generator set

    Raises:
        CapExceededError: n above ``cap``
        DomainError: generators on different sets, or not on [n]
    """
    labels, maps, n = _normalize_gens(gens, n)
    if not maps:
        return ClosureResult(n, labels, {}, {}, {"frontier_sizes": [], "products": 0, "seconds": 0.0})
    if n > cap:
        raise CapExceededError(f"closure requested for n={n} (cap {cap})")
    gen_images = [g.images for g in maps]

    elements: dict[tuple[int, ...], PartialInjection] = {}
    parents: dict[tuple[int, ...], tuple] = {}
    frontier: list[tuple[int, ...]] = []
    for idx, g in enumerate(maps):
        if g.images not in elements:
            elements[g.images] = g
            parents[g.images] = (None, idx)
            frontier.append(g.images)

    started = time.perf_counter()
    frontier_sizes = []
    products = 0
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while frontier:
            frontier_sizes.append(len(frontier))
            products += len(frontier) * len(gen_images)
            frontier.sort()
            chunks = [frontier[i:i + _CHUNK_SIZE] for i in range(0, len(frontier), _CHUNK_SIZE)]
            if pool is not None:
                batches = list(pool.map(lambda c: _products(c, gen_images, elements), chunks))
            else:
                batches = [_products(c, gen_images, elements) for c in chunks]

            frontier = []
            for batch in batches:
                for y, x, idx in batch:
                    if y in elements:
                        continue
                    elements[y] = PartialInjection._trusted(n, y)
                    parents[y] = (x, idx)
                    frontier.append(y)
    finally:
        if pool is not None:
            pool.shutdown()

    stats = {
        "frontier_sizes": frontier_sizes,
        "products": products,
        "seconds": round(time.perf_counter() - started, 3),
    }
    return ClosureResult(n, labels, elements, parents, stats)


def brute_force_icn(n: int, cap: int = BRUTE_FORCE_CAP) -> set[PartialInjection]:
    """IC_n by filtering every partial injection through the membership test."""
    if n > cap:
        raise CapExceededError(f"brute force requested for n={n} (cap {cap})")
    return {a for a in enumerate_all_partial_injections(n, cap=cap) if is_member(a)}


# ---------------------------------------------------------------------------
# Generation checks
# ---------------------------------------------------------------------------

@dataclass
class GenerationReport:
    n: int
    generated: int
    expected: int
    missing: list[PartialInjection] = field(default_factory=list)
    extra: list[PartialInjection] = field(default_factory=list)

    @property
    def equal(self) -> bool:
        return not self.missing and not self.extra

    def to_json(self, limit: int = 20) -> dict:
        return {
            "n": self.n,
            "generated": self.generated,
            "expected": self.expected,
            "equal": self.equal,
            "missing": [to_json(a) for a in self.missing[:limit]],
            "extra": [to_json(a) for a in self.extra[:limit]],
        }


def verify_generating(n: int, threads: int = 1) -> GenerationReport:
    """Compare close(G(n)) with the brute-force IC_n."""
    if n > BRUTE_FORCE_CAP:
        raise CapExceededError(f"generation check needs brute force; n={n} above {BRUTE_FORCE_CAP}")
    closure = close(generator_catalog(n).g, threads=threads)
    oracle = {a.images: a for a in brute_force_icn(n)}
    missing = sorted((a for k, a in oracle.items() if k not in closure.elements), key=sort_key)
    extra = sorted((a for k, a in closure.elements.items() if k not in oracle), key=sort_key)
    report = GenerationReport(n, len(closure), len(oracle), missing, extra)
    if not report.equal:
        log_error(f"G({n}) generates {report.generated} maps, IC_{n} has {report.expected}")
    return report


@dataclass(frozen=True)
class RedundancyEntry:
    symbol: str
    proper: bool
    closure_size: int
    witness: Optional[PartialInjection]

    def to_json(self) -> dict:
        return {
            "symbol": self.symbol,
            "proper": self.proper,
            "closure_size": self.closure_size,
            "witness": to_json(self.witness) if self.witness is not None else None,
        }


def irredundancy(n: int, threads: int = 1) -> list[RedundancyEntry]:
    """For each g in G(n), whether close(G \\ {g}) misses something, and what.

    The witness is g itself when g is not regenerated, otherwise the
    smallest missing map.
    """
    gens = generator_catalog(n).g
    full = close(gens, threads=threads)
    entries = []
    for sym, g in gens.items():
        rest = {s: h for s, h in gens.items() if s != sym}
        sub = close(rest, threads=threads, n=n)
        size = len(sub)
        if not sub.contains(g):
            witness = g
        else:
            gone = [a for k, a in full.elements.items() if k not in sub.elements]
            witness = min(gone, key=sort_key) if gone else None
        entries.append(RedundancyEntry(str(sym), size < len(full), size, witness))
    return entries


def rank_search_small(n: int = 2) -> int:
    """Smallest size of a subset of IC_n that generates it, by exhaustive subset search."""
    if n != 2:
        raise DomainError(f"exhaustive subset search is only run for n=2, got {n}")
    universe = sorted(brute_force_icn(n), key=sort_key)
    target = {a.images for a in universe}
    for size in range(1, len(universe) + 1):
        for subset in itertools.combinations(universe, size):
            if set(close(list(subset)).elements) == target:
                return size
    raise DomainError(f"IC_{n} is not generated by its own elements")


# ---------------------------------------------------------------------------
# Lower-bound conditions for arbitrary generating sets
# ---------------------------------------------------------------------------

@dataclass
class ConditionResult:
    name: str
    passed: bool
    count: int
    bound: int
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "count": self.count,
                "bound": self.bound, "detail": self.detail}


@dataclass
class Prg3Report:
    n: int
    generates: Optional[bool]
    conditions: list[ConditionResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def to_json(self) -> dict:
        return {"n": self.n, "generates": self.generates, "passed": self.passed,
                "conditions": [c.to_json() for c in self.conditions]}

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame([{k: v for k, v in c.to_json().items() if k != "detail"}
                             for c in self.conditions])


def _in_u(a: PartialInjection, dual: bool = False) -> bool:
    src, dst = (odds(a.n), evens(a.n)) if dual else (evens(a.n), odds(a.n))
    return a.domain == src and a.image == dst


def _endpoint_parity(block: tuple[int, ...]) -> str:
    return "odd" if block[0] % 2 else "even"


def prg3_conditions(
    gens: Mapping[Any, PartialInjection] | Sequence[PartialInjection],
    verify: bool = True,
    threads: int = 1,
) -> Prg3Report:
    """Check the per-rank counts every generating set of IC_n must meet.

    (a) two permutations, one orientation-reversing
    (b) two rank n-1 maps, missing points of both parities
    (c) rank n-2: each odd a in [3, n/2-1] with each endpoint parity appears as
        an interval size, and at least 2 floor(n/4) - 2 such maps
    (d) rank n-3 outside U and its dual: each even r in [n/2, n-4] appears as
        the size of a parity-mixing interval in both directions, and at least
        2 floor(n/4) such maps
    (e) a map of U and a map of its dual

    Only a report; nothing is raised when a condition fails.
    """
    _, maps, n = _normalize_gens(gens)
    if not maps:
        raise DomainError("the conditions need at least one generator to fix n")
    m = n // 4

    generates: Optional[bool] = None
    if verify and n <= BRUTE_FORCE_CAP:
        closure = close(maps, threads=threads)
        generates = len(closure) == len(brute_force_icn(n)) and all(is_member(g) for g in maps)

    conditions = []

    perms = [g for g in maps if g.rank == n]
    reversing = [g for g in perms if is_orientation_reversing(g) and not is_orientation_preserving(g)]
    conditions.append(ConditionResult(
        "a", len(perms) >= 2 and bool(reversing), len(perms), 2,
        {"reversing": len(reversing)},
    ))

    near = [g for g in maps if g.rank == n - 1]
    missing_parities = sorted({"odd" if (set(range(1, n + 1)) - g.domain).pop() % 2 else "even"
                               for g in near})
    conditions.append(ConditionResult(
        "b", len(near) >= 2 and len(missing_parities) == 2, len(near), 2,
        {"missing_parities": missing_parities},
    ))

    rank2 = [g for g in maps if g.rank == n - 2]
    wanted = {(a, p) for a in range(3, n // 2, 2) for p in ("odd", "even")}
    seen = set()
    for g in rank2:
        for block in cyclic_intervals(g.domain, n):
            seen.add((len(block), _endpoint_parity(block)))
    uncovered = sorted(wanted - seen)
    bound_c = max(2 * m - 2, 0)
    conditions.append(ConditionResult(
        "c", not uncovered and len(rank2) >= bound_c, len(rank2), bound_c,
        {
            "uncovered": [list(p) for p in uncovered],
            "set_identity_holds": m - 1 == len(range(3, n // 2, 2)),
        },
    ))

    rank3 = [g for g in maps if g.rank == n - 3 and not _in_u(g) and not _in_u(g, dual=True)]
    wanted_d = {(r, d) for r in range(n // 2 + (n // 2) % 2, n - 3, 2)
                for d in ("even-to-odd", "odd-to-even")}
    seen_d = set()
    for g in rank3:
        directions = {"even-to-odd" if x % 2 == 0 else "odd-to-even" for x in chi(g)}
        for block in cyclic_intervals(g.domain, n):
            seen_d.update((len(block), d) for d in directions)
    uncovered_d = sorted(wanted_d - seen_d)
    conditions.append(ConditionResult(
        "d", not uncovered_d and len(rank3) >= 2 * m, len(rank3), 2 * m,
        {
            "uncovered": [list(p) for p in uncovered_d],
            "set_identity_holds": 2 * m == len(range(n // 2 + (n // 2) % 2, n - 3, 2)),
        },
    ))

    in_u = sum(1 for g in maps if _in_u(g))
    in_dual = sum(1 for g in maps if _in_u(g, dual=True))
    conditions.append(ConditionResult(
        "e", in_u >= 1 and in_dual >= 1, in_u + in_dual, 2,
        {"U": in_u, "U_dual": in_dual},
    ))

    return Prg3Report(n, generates, conditions)
