"""Named elements of IC_n, the generating set G = A u B, and words over G.

Constructors return plain PartialInjection values. Only the members of G are
word letters; the derived families (gamma_{i,j}, their +/- variants, the
alpha_{i,j} shifts and high-index deltas) are reached through the reduction
words in ``icn.factorize``.

Text form of a word: whitespace-separated tokens

    S1 S2 E1 EN GN(i) G1(i) DO(i) DE(i) H1 H2 ID

each with an optional ``^k`` power. ``ID`` is the identity and exists only
for n = 2, where the generating set is {id, (1->2), (2->1)}.
"""

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Optional

from .core import (
    DomainError,
    PartialInjection,
    compose,
    cyclic_add,
    cyclic_arc,
    from_function,
    from_pairs,
    identity,
    identity_on,
    power,
    wrap,
)

# ---------------------------------------------------------------------------
# Argument checks
# ---------------------------------------------------------------------------


def _check_n(n: int, minimum: int = 4) -> None:
    if n % 2 or n < minimum:
        raise DomainError(f"n must be even and >= {minimum}, got {n}")


def _check_point(i: int, n: int) -> None:
    if not 1 <= i <= n:
        raise DomainError(f"index {i} outside [1, {n}]")


def _check_same_parity(i: int, j: int) -> None:
    if (i - j) % 2:
        raise DomainError(f"indices {i} and {j} must have the same parity")


def _check_other_parity(i: int, j: int) -> None:
    if (i - j) % 2 == 0:
        raise DomainError(f"indices {i} and {j} must have different parity")


def _check_distinct(points: list[int]) -> None:
    if len(set(points)) != len(points):
        raise DomainError(f"undefined points {points} collide")


# ---------------------------------------------------------------------------
# Rank n and n - 1
# ---------------------------------------------------------------------------


def sigma1(n: int) -> PartialInjection:
    """Rotation x -> x + 2."""
    _check_n(n)
    return from_function(lambda x: x + 2, range(1, n + 1), n)


def sigma2(n: int) -> PartialInjection:
    """Reflection fixing 1: x -> 2 - x."""
    _check_n(n)
    return from_function(lambda x: 2 - x, range(1, n + 1), n)


def reflection(p: int, n: int) -> PartialInjection:
    """sigma1^p sigma2, the reflection x -> (2 - 2p) - x."""
    _check_n(n)
    return from_function(lambda x: 2 - 2 * p - x, range(1, n + 1), n)


def _off(i: int, n: int) -> list[int]:
    return [x for x in range(1, n + 1) if x != i]


def epsilon(i: int, n: int) -> PartialInjection:
    """Partial identity missing i."""
    _check_point(i, n)
    return identity_on(_off(i, n), n)


def gamma_fix(i: int, n: int) -> PartialInjection:
    """Reflection x -> 2i - x with i removed."""
    _check_point(i, n)
    return from_function(lambda x: 2 * i - x, _off(i, n), n)


def alpha_shift(i: int, k: int, n: int) -> PartialInjection:
    """Shift x -> x + (k - i) with i removed, so k is missing from the image."""
    _check_point(i, n)
    _check_point(k, n)
    _check_same_parity(i, k)
    return from_function(lambda x: x + k - i, _off(i, n), n)


def gamma_reflect(i: int, k: int, n: int) -> PartialInjection:
    """Reflection x -> (k + i) - x with i removed, so k is missing from the image."""
    _check_point(i, n)
    _check_point(k, n)
    _check_same_parity(i, k)
    return from_function(lambda x: k + i - x, _off(i, n), n)


# ---------------------------------------------------------------------------
# Rank n - 2
# ---------------------------------------------------------------------------


def _arc_map(n: int, undefined: list[int], moved: dict) -> PartialInjection:
    """Fix every point that is neither undefined nor moved."""
    _check_distinct(undefined)
    pairs = {x: x for x in range(1, n + 1) if x not in undefined}
    pairs.update(moved)
    return from_pairs(pairs, n)


def gamma_ij(i: int, j: int, n: int) -> PartialInjection:
    """Reverse the open arc from i forward to j, fix the opposite arc.

    For i < j this is x -> i + j - x on i+1..j-1. For j < i the reversed arc
    runs through n and 1 and the block j+1..i-1 stays fixed.
    """
    _check_point(i, n)
    _check_point(j, n)
    _check_same_parity(i, j)
    if i == j:
        raise DomainError("gamma_{i,j} needs i != j")
    moved = {x: wrap(i + j - x, n) for x in cyclic_arc(i, j, n)}
    return _arc_map(n, [i, j], moved)


def gamma_ij_minus(i: int, j: int, n: int) -> PartialInjection:
    """Undefined at i-1, i, j; the arc from i to j reversed onto i..j-2."""
    _check_point(i, n)
    _check_point(j, n)
    _check_other_parity(i, j)
    before = cyclic_add(i, -1, n)
    moved = {x: wrap(i + j - 1 - x, n) for x in cyclic_arc(i, j, n)}
    return _arc_map(n, [before, i, j], moved)


def gamma_ij_plus(i: int, j: int, n: int) -> PartialInjection:
    """Undefined at i, j, j+1; the arc from i to j reversed onto i+2..j."""
    _check_point(i, n)
    _check_point(j, n)
    _check_other_parity(i, j)
    after = cyclic_add(j, 1, n)
    moved = {x: wrap(i + j + 1 - x, n) for x in cyclic_arc(i, j, n)}
    return _arc_map(n, [i, j, after], moved)


def alpha_ij_minus(i: int, j: int, n: int) -> PartialInjection:
    """Undefined at i, i+1, i+2, j; the arc from i+2 to j moves back by 2."""
    _check_point(i, n)
    _check_point(j, n)
    start = cyclic_add(i, 2, n)
    moved = {x: cyclic_add(x, -2, n) for x in cyclic_arc(start, j, n)}
    return _arc_map(n, [i, cyclic_add(i, 1, n), start, j], moved)


def alpha_ij_plus(i: int, j: int, n: int) -> PartialInjection:
    """Undefined at i, j, j+1, j+2; the arc from i to j moves forward by 2."""
    _check_point(i, n)
    _check_point(j, n)
    moved = {x: cyclic_add(x, 2, n) for x in cyclic_arc(i, j, n)}
    return _arc_map(n, [i, j, cyclic_add(j, 1, n), cyclic_add(j, 2, n)], moved)


# ---------------------------------------------------------------------------
# Parity mixing: rank n - 3 and n / 2
# ---------------------------------------------------------------------------


def _check_delta(i: int, n: int) -> None:
    _check_n(n)
    if not 1 <= i <= n // 2 - 1:
        raise DomainError(f"delta index {i} outside [1, {n // 2 - 1}]")


def delta_o(i: int, n: int) -> PartialInjection:
    """2 -> 1, 4..n-2i+1 shifted up by 2i-2, n-2i+3..n sent onto 3..2i."""
    _check_delta(i, n)
    pairs = {2: 1}
    pairs.update({x: x + 2 * i - 2 for x in range(4, n - 2 * i + 2)})
    pairs.update({x: x + 2 * i - n for x in range(n - 2 * i + 3, n + 1)})
    return from_pairs(pairs, n)


def delta_e(i: int, n: int) -> PartialInjection:
    """1 -> 2, 3..2i sent onto n-2i+3..n, 2i+2..n-1 shifted down by 2i-2."""
    _check_delta(i, n)
    pairs = {1: 2}
    pairs.update({x: x + n - 2 * i for x in range(3, 2 * i + 1)})
    pairs.update({x: x - 2 * i + 2 for x in range(2 * i + 2, n)})
    return from_pairs(pairs, n)


def eta1(n: int) -> PartialInjection:
    """Odd x -> x + 1."""
    _check_n(n, minimum=2)
    return from_pairs(((x, x + 1) for x in range(1, n, 2)), n)


def eta2(n: int) -> PartialInjection:
    """Even x -> x - 1."""
    _check_n(n, minimum=2)
    return from_pairs(((x, x - 1) for x in range(2, n + 1, 2)), n)


# ---------------------------------------------------------------------------
# Generator symbols and the catalog
# ---------------------------------------------------------------------------

_INDEXED_TAGS = ("GN", "G1", "DO", "DE")
_PLAIN_TAGS = ("S1", "S2", "E1", "EN", "H1", "H2", "ID")


@dataclass(frozen=True, order=True)
class GeneratorSymbol:
    """One member of G: S1/S2 rotations, E1/EN deletions, GN(i) = gamma_{i,n},
    G1(i) = gamma_{i,1}, DO(i)/DE(i) deltas, H1/H2 etas, ID at n = 2."""

    tag: str
    index: Optional[int] = None

    def __post_init__(self) -> None:
        if self.tag in _INDEXED_TAGS:
            if self.index is None:
                raise DomainError(f"{self.tag} needs an index")
        elif self.tag in _PLAIN_TAGS:
            if self.index is not None:
                raise DomainError(f"{self.tag} takes no index")
        else:
            raise DomainError(f"unknown generator {self.tag!r}")

    def __str__(self) -> str:
        return f"{self.tag}({self.index})" if self.index is not None else self.tag


def _quarter(n: int) -> int:
    return n // 4


def validate_symbol(sym: GeneratorSymbol, n: int) -> None:
    """Raise DomainError unless sym names a member of G(n)."""
    if n == 2:
        if sym.tag not in ("ID", "H1", "H2"):
            raise DomainError(f"{sym} is not a generator for n=2")
        return
    _check_n(n)
    m = _quarter(n)
    i = sym.index
    if sym.tag == "ID":
        raise DomainError("ID is a generator only for n=2")
    if sym.tag == "GN" and not (i % 2 == 0 and 4 <= i <= 2 * m):
        raise DomainError(f"GN({i}) needs even 4 <= i <= {2 * m}")
    if sym.tag == "G1" and not (i % 2 == 1 and 5 <= i <= 2 * m + 1):
        raise DomainError(f"G1({i}) needs odd 5 <= i <= {2 * m + 1}")
    if sym.tag in ("DO", "DE") and not 1 <= i <= m:
        raise DomainError(f"{sym.tag}({i}) needs 1 <= i <= {m}")


@lru_cache(maxsize=None)
def symbol_element(sym: GeneratorSymbol, n: int) -> PartialInjection:
    validate_symbol(sym, n)
    match sym.tag:
        case "ID":
            return identity(n)
        case "S1":
            return sigma1(n)
        case "S2":
            return sigma2(n)
        case "E1":
            return epsilon(1, n)
        case "EN":
            return epsilon(n, n)
        case "GN":
            return gamma_ij(sym.index, n, n)
        case "G1":
            return gamma_ij(sym.index, 1, n)
        case "DO":
            return delta_o(sym.index, n)
        case "DE":
            return delta_e(sym.index, n)
        case "H1":
            return eta1(n)
        case "H2":
            return eta2(n)
    raise DomainError(f"unknown generator {sym}")


class Catalog(NamedTuple):
    a: dict[GeneratorSymbol, PartialInjection]
    b: dict[GeneratorSymbol, PartialInjection]

    @property
    def g(self) -> dict[GeneratorSymbol, PartialInjection]:
        return {**self.a, **self.b}


def catalog_symbols(n: int) -> tuple[list[GeneratorSymbol], list[GeneratorSymbol]]:
    """Symbols of A and of B in their fixed listing order."""
    if n == 2:
        return [GeneratorSymbol("ID")], [GeneratorSymbol("H1"), GeneratorSymbol("H2")]
    _check_n(n)
    m = _quarter(n)
    a = [GeneratorSymbol("S1"), GeneratorSymbol("S2"), GeneratorSymbol("E1"), GeneratorSymbol("EN")]
    a += [GeneratorSymbol("GN", i) for i in range(4, 2 * m + 1, 2)]
    a += [GeneratorSymbol("G1", i) for i in range(5, 2 * m + 2, 2)]
    b = []
    for i in range(1, m + 1):
        b += [GeneratorSymbol("DO", i), GeneratorSymbol("DE", i)]
    b += [GeneratorSymbol("H1"), GeneratorSymbol("H2")]
    return a, b


def generator_catalog(n: int) -> Catalog:
    """The generating set G = A u B of IC_n, |G| = 4(floor(n/4) + 1) for n >= 4."""
    a_syms, b_syms = catalog_symbols(n)
    return Catalog(
        {s: symbol_element(s, n) for s in a_syms},
        {s: symbol_element(s, n) for s in b_syms},
    )


def catalog_sizes(n: int) -> dict[str, int]:
    cat = generator_catalog(n)
    return {"A": len(cat.a), "B": len(cat.b), "G": len(cat.g)}


def expected_rank(n: int) -> int:
    """Size of a minimal generating set of IC_n."""
    return 3 if n == 2 else 4 * (n // 4 + 1)


# ---------------------------------------------------------------------------
# Words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Word:
    """A product of generator powers, read left to right."""

    letters: tuple[tuple[GeneratorSymbol, int], ...] = ()

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __len__(self) -> int:
        return sum(k for _, k in self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __str__(self) -> str:
        return format_word(self)

    def symbols(self) -> set[GeneratorSymbol]:
        return {s for s, _ in self.letters}


EMPTY_WORD = Word()


def letter(tag: str, index: Optional[int] = None, k: int = 1) -> Word:
    if k < 1:
        raise DomainError(f"letter power must be positive, got {k}")
    return Word(((GeneratorSymbol(tag, index), k),))


def concat(words: Iterable[Word]) -> Word:
    result = EMPTY_WORD
    for w in words:
        result = result + w
    return result


def s1_power(t: int, n: int) -> Word:
    """sigma1^t, reduced modulo n/2; empty when it is the identity."""
    t %= n // 2
    return letter("S1", k=t) if t else EMPTY_WORD


def simplify(word: Word, n: int) -> Word:
    """Merge adjacent equal letters of finite order and drop identity powers.

    S1 powers reduce modulo n/2, S2 modulo 2, and E1, EN, ID are idempotent.
    """
    orders = {"S1": n // 2, "S2": 2}
    out: list[list] = []
    for sym, k in word.letters:
        if out and out[-1][0] == sym and sym.tag in ("S1", "S2", "E1", "EN", "ID"):
            out[-1][1] += k
        else:
            out.append([sym, k])
        if sym.tag in orders:
            out[-1][1] %= orders[sym.tag]
            if out[-1][1] == 0:
                out.pop()
        elif sym.tag in ("E1", "EN", "ID"):
            out[-1][1] = 1
    return Word(tuple((s, k) for s, k in out))


_TOKEN = re.compile(r"^(S1|S2|E1|EN|H1|H2|ID|GN|G1|DO|DE)(?:\((\d+)\))?(?:\^(\d+))?$")


def parse_token(token: str) -> tuple[GeneratorSymbol, int]:
    m = _TOKEN.match(token.strip())
    if not m:
        raise DomainError(f"cannot parse generator token {token!r}")
    tag, index, k = m.groups()
    sym = GeneratorSymbol(tag, int(index) if index is not None else None)
    k = int(k) if k is not None else 1
    if k < 1:
        raise DomainError(f"power in {token!r} must be positive")
    return sym, k


def parse_word(text: str, n: Optional[int] = None) -> Word:
    """Parse the text form; checks every symbol against G(n) when n is given."""
    word = Word(tuple(parse_token(t) for t in text.split()))
    if n is not None:
        for sym, _ in word.letters:
            validate_symbol(sym, n)
    return word


def word_tokens(word: Word) -> list[str]:
    return [f"{s}^{k}" if k > 1 else str(s) for s, k in word.letters]


def word_from_tokens(tokens: list[str], n: Optional[int] = None) -> Word:
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        raise DomainError("a word in JSON form is an array of token strings")
    return parse_word(" ".join(tokens), n)


def format_word(word: Word) -> str:
    return " ".join(word_tokens(word))


def eval_word(word: Word, n: int) -> PartialInjection:
    """Left-to-right product of the letters; the empty word is id."""
    result = identity(n)
    for sym, k in word.letters:
        result = compose(result, power(symbol_element(sym, n), k))
    return result


_INVERSE_TAG = {"DO": "DE", "DE": "DO", "H1": "H2", "H2": "H1"}


def word_inverse(word: Word, n: int) -> Word:
    """A word for the inverse: letters reversed, each replaced by its inverse.

    S2, E1, EN, GN, G1 and ID are their own inverses; DO(i) and DE(i) swap,
    as do H1 and H2; sigma1^-k is sigma1^(n/2 - k).
    """
    out = []
    for sym, k in reversed(word.letters):
        validate_symbol(sym, n)
        if sym.tag == "S1":
            out.append(s1_power(-k, n))
        else:
            out.append(Word(((GeneratorSymbol(_INVERSE_TAG.get(sym.tag, sym.tag), sym.index), k),)))
    return concat(out)
