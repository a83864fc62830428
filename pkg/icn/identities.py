"""Checks that the displayed product formulas hold as stated for a given n.

Each instance compares a constructor (left side) with the product of the
constructors named on the right side. A failing instance becomes a
deviation record; when n is small enough a shortest word found by closure
search is attached as its replacement.
"""

from dataclasses import dataclass
from typing import Iterator, Optional

import pandas as pd

from .core import PartialInjection, compose_all, cyclic_add, inverse, power, to_json
from .generators import (
    _check_n,
    alpha_ij_minus,
    alpha_ij_plus,
    alpha_shift,
    delta_e,
    delta_o,
    epsilon,
    eval_word,
    format_word,
    gamma_fix,
    gamma_ij,
    gamma_ij_minus,
    gamma_ij_plus,
    gamma_reflect,
    sigma1,
    sigma2,
)
from .factorize import (
    ORACLE_CAP,
    NotGeneratedError,
    alpha_minus_valid,
    alpha_plus_valid,
    factorize_bfs,
    reduce_to_A,
)


@dataclass(frozen=True)
class IdentityResult:
    family: str
    indices: tuple[int, ...]
    expected: PartialInjection
    actual: PartialInjection

    @property
    def holds(self) -> bool:
        return self.expected == self.actual

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "indices": list(self.indices),
            "holds": self.holds,
            "expected": to_json(self.expected),
            "actual": to_json(self.actual),
        }


def _s1(t: int, n: int) -> PartialInjection:
    return power(sigma1(n), t % (n // 2))


def _gamma_table(n: int) -> Iterator[tuple[str, tuple[int, ...], PartialInjection, list]]:
    """Every case of the gamma_{i,j} reduction tables, as (case, indices, lhs, rhs factors)."""
    m2 = 2 * (n // 4)
    s1, s2, eps, g = sigma1(n), sigma2(n), epsilon, gamma_ij

    yield "gamma(2,n)", (2, n), g(2, n, n), [eps(2, n), eps(n, n), s2]
    yield "gamma(n-2,n)", (n - 2, n), g(n - 2, n, n), [eps(n - 2, n), eps(n, n)]
    for i in range(m2 + 2, n - 3, 2):
        yield "gamma(i,n)", (i, n), g(i, n, n), [_s1((n - i) // 2, n), g(n - i, n, n), s1, s2]
    for i in range(2, n - 1, 2):
        for j in range(i + 2, n - 1, 2):
            yield "gamma(i,j) even", (i, j), g(i, j, n), [
                _s1((n - j) // 2, n), g(n + i - j, n, n), _s1(j // 2, n)]
    yield "gamma(1,3)", (1, 3), g(1, 3, n), [eps(1, n), eps(3, n)]
    yield "gamma(1,n-1)", (1, n - 1), g(1, n - 1, n), [eps(1, n), eps(n - 1, n), s2, _s1(n // 2 - 1, n)]
    for j in range(5, n - 2, 2):
        yield "gamma(1,j)", (1, j), g(1, j, n), [s2, g(n - j + 2, 1, n), s2]
    for i in range(3, n, 2):
        for j in range(i + 2, n, 2):
            yield "gamma(i,j) odd", (i, j), g(i, j, n), [
                _s1((n - j + 1) // 2, n), g(n - j + i + 1, 1, n), _s1((j - 1) // 2, n)]

    yield "gamma(n,2)", (n, 2), g(n, 2, n), [eps(2, n), eps(n, n)]
    yield "gamma(n,n-2)", (n, n - 2), g(n, n - 2, n), [eps(n - 2, n), eps(n, n), s2, _s1(n // 2 - 2, n)]
    for j in range(4, n - 3, 2):
        yield "gamma(n,j)", (n, j), g(n, j, n), [_s1((n - j) // 2, n), g(n - j, n, n), _s1(j // 2, n)]
    for j in range(2, n - 1, 2):
        for i in range(j + 2, n - 1, 2):
            yield "gamma(i,j) even, j<i", (i, j), g(i, j, n), [
                _s1((n - j) // 2, n), g(i - j, n, n), _s1(j // 2, n)]
    yield "gamma(3,1)", (3, 1), g(3, 1, n), [eps(1, n), eps(3, n), s2, s1]
    yield "gamma(n-1,1)", (n - 1, 1), g(n - 1, 1, n), [eps(1, n), eps(n - 1, n)]
    for i in range(m2 + 3, n - 2, 2):
        yield "gamma(i,1)", (i, 1), g(i, 1, n), [_s1((n - i + 1) // 2, n), g(n - i + 2, 1, n), s2]
    for j in range(3, n, 2):
        for i in range(j + 2, n, 2):
            yield "gamma(i,j) odd, j<i", (i, j), g(i, j, n), [
                _s1((n - j + 1) // 2, n), g(i - j + 1, 1, n), _s1((j - 1) // 2, n)]


def _instances(n: int) -> Iterator[tuple[str, tuple[int, ...], PartialInjection, list]]:
    s1, s2 = sigma1(n), sigma2(n)
    points = range(1, n + 1)

    for i in range(2, n):
        if i % 2 == 0:
            rhs = [_s1((n - i) // 2, n), epsilon(n, n), _s1(i // 2, n)]
        else:
            rhs = [_s1((n - i + 1) // 2, n), epsilon(1, n), _s1((i - 1) // 2, n)]
        yield "epsilon", (i,), epsilon(i, n), rhs

    for i in points:
        yield "gamma_fix", (i,), gamma_fix(i, n), [epsilon(i, n), s2, _s1(i - 1, n)]

    for i in points:
        for k in points:
            if k == i or (k - i) % 2:
                continue
            shift = (k - i) // 2 if k > i else (n + k - i) // 2
            yield "alpha_shift", (i, k), alpha_shift(i, k, n), [epsilon(i, n), _s1(shift, n)]
            yield "gamma_reflect", (i, k), gamma_reflect(i, k, n), [
                alpha_shift(i, cyclic_add(n - k, 2, n), n), s2]

    yield from _gamma_table(n)

    for i in points:
        for j in points:
            if (i - j) % 2 == 0:
                continue
            if cyclic_add(i, -1, n) != j:
                yield "gamma_minus", (i, j), gamma_ij_minus(i, j, n), [
                    epsilon(i, n), gamma_ij(cyclic_add(i, -1, n), j, n)]
            if cyclic_add(j, 1, n) != i:
                yield "gamma_plus", (i, j), gamma_ij_plus(i, j, n), [
                    epsilon(j, n), gamma_ij(i, cyclic_add(j, 1, n), n)]

    for i in points:
        for j in points:
            if i == j:
                continue
            if alpha_minus_valid(i, j, n):
                if i < j and (i - j) % 2:
                    rhs = [gamma_ij(i + 1, j, n), gamma_ij(i, j - 1, n)]
                elif i < j:
                    rhs = [epsilon(i + 1, n), gamma_ij(i, j, n), gamma_ij(i, j - 2, n)]
                else:
                    rhs = [alpha_ij_plus(j, i, n), _s1(n // 2 - 1, n)]
                yield "alpha_minus", (i, j), alpha_ij_minus(i, j, n), rhs
            if alpha_plus_valid(i, j, n):
                if i < j and (i - j) % 2:
                    rhs = [gamma_ij(i, j + 1, n), gamma_ij(i + 1, j + 2, n)]
                elif i < j:
                    rhs = [epsilon(j + 1, n), gamma_ij(i, j, n), gamma_ij(i, j + 2, n)]
                else:
                    rhs = [alpha_ij_minus(j, i, n), s1]
                yield "alpha_plus", (i, j), alpha_ij_plus(i, j, n), rhs

    half = n // 2
    for i in range(n // 4 + 1, half):
        yield "delta_o conjugate", (i,), delta_o(i, n), [gamma_ij(3, 1, n), delta_o(half - i, n), gamma_ij(2, n, n)]
        yield "delta_e conjugate", (i,), delta_e(i, n), [gamma_ij(2, n, n), delta_e(half - i, n), gamma_ij(3, 1, n)]
    for i in range(1, half):
        yield "delta inverse", (i,), delta_e(i, n), [inverse(delta_o(i, n))]


def _reduction_instances(n: int) -> Iterator[tuple[str, tuple[int, ...], PartialInjection]]:
    """Every derived element against the evaluation of its reduced word."""
    points = range(1, n + 1)
    for i in points:
        for j in points:
            if i != j and (i - j) % 2 == 0:
                yield "gamma", (i, j), gamma_ij(i, j, n)
            if (i - j) % 2:
                if cyclic_add(i, -1, n) != j:
                    yield "gamma_minus", (i, j), gamma_ij_minus(i, j, n)
                if cyclic_add(j, 1, n) != i:
                    yield "gamma_plus", (i, j), gamma_ij_plus(i, j, n)
            if i != j and alpha_minus_valid(i, j, n):
                yield "alpha_minus", (i, j), alpha_ij_minus(i, j, n)
            if i != j and alpha_plus_valid(i, j, n):
                yield "alpha_plus", (i, j), alpha_ij_plus(i, j, n)
    for i in range(1, n // 2):
        yield "delta_o", (i,), delta_o(i, n)
        yield "delta_e", (i,), delta_e(i, n)


def identity_suite(n: int) -> list[IdentityResult]:
    """Evaluate every displayed formula instance, then every reduction word."""
    _check_n(n)
    results = [
        IdentityResult(family, indices, lhs, compose_all(rhs, n))
        for family, indices, lhs, rhs in _instances(n)
    ]
    for family, indices, lhs in _reduction_instances(n):
        word = reduce_to_A(family, *indices, n=n)
        results.append(IdentityResult(f"reduce {family}", indices, lhs, eval_word(word, n)))
    return results


@dataclass(frozen=True)
class Deviation:
    identity: str
    n: int
    indices: tuple[int, ...]
    expected: PartialInjection
    actual: PartialInjection
    replacement: Optional[str]

    def to_json(self) -> dict:
        return {
            "identity": self.identity,
            "n": self.n,
            "indices": list(self.indices),
            "expected": to_json(self.expected),
            "actual": to_json(self.actual),
            "replacement": self.replacement,
        }


def deviations(results: list[IdentityResult]) -> list[Deviation]:
    """Failing instances, each with a verified shortest G-word when n allows it."""
    out = []
    for r in results:
        if r.holds:
            continue
        n = r.expected.n
        replacement = None
        if n <= ORACLE_CAP:
            try:
                word = factorize_bfs(r.expected)
            except NotGeneratedError:
                word = None
            if word is not None and eval_word(word, n) == r.expected:
                replacement = format_word(word)
        out.append(Deviation(r.family, n, r.indices, r.expected, r.actual, replacement))
    return out


def summary_frame(results: list[IdentityResult]) -> pd.DataFrame:
    """Per family: instances checked and instances holding."""
    frame = pd.DataFrame([{"family": r.family, "holds": r.holds} for r in results])
    if frame.empty:
        return pd.DataFrame(columns=["family", "checked", "holding"])
    return (
        frame.groupby("family", sort=True)["holds"]
        .agg(checked="size", holding="sum")
        .reset_index()
        .astype({"checked": int, "holding": int})
    )


def suite_passes(devs: list[Deviation]) -> bool:
    """True when every failing instance has a verified replacement."""
    return all(d.replacement is not None for d in devs)
