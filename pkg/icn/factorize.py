"""Constructive factorization of IC_n over the generating set G.

Dispatch:
    rank n          rotation or reflection word over {S1, S2}
    rank n - 1      eps_i, gamma_i, alpha_i^(k) or gamma_i^(k), with eps_i
                    expanded through rotations of E1 / EN
    parity-mixing   delta reductions, each removing one point of chi, or
                    a single eta when chi is the whole (one-parity) domain
    otherwise       normalize by rotations, restrict with epsilons, then
                    align the image blocks left to right: a rotation or
                    reflection seeds the first block, gamma moves gather
                    gaps and bring the next block forward, alpha^- shifts it
                    by two and a last gamma fixes its orientation

Every derived element used along the way (gamma_{i,j}, its +/- variants,
alpha_{i,j}^+/-, deltas above floor(n/4)) is turned into a G-word by
``reduce_to_A``. Words are checked by evaluation before they are returned.
"""

from bisect import bisect_left
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Optional

from .closure import close
from .core import (
    DomainError,
    PartialInjection,
    compose,
    cyclic_add,
    identity,
    identity_on,
    inverse,
    log_error,
    power,
    to_json,
)
from .crown import chi, maximal_intervals, require_member
from .generators import (
    EMPTY_WORD,
    GeneratorSymbol,
    Word,
    alpha_ij_minus,
    alpha_ij_plus,
    alpha_shift,
    concat,
    delta_e,
    delta_o,
    epsilon,
    eta1,
    eta2,
    eval_word,
    format_word,
    gamma_fix,
    gamma_ij,
    gamma_ij_minus,
    gamma_ij_plus,
    gamma_reflect,
    generator_catalog,
    letter,
    parse_word,
    reflection,
    s1_power,
    sigma1,
    simplify,
    word_inverse,
    word_tokens,
)

# Oracle closures are only computed up to this size.
ORACLE_CAP = 10


class NotGeneratedError(ValueError):
    """The target is not in the subsemigroup generated by the given set."""


class FactorizationError(RuntimeError):
    """A constructive step produced a wrong word or made no progress."""

    def __init__(self, msg: str, trace: Optional["FactorizationTrace"] = None):
        super().__init__(msg)
        self.trace = trace


@dataclass(frozen=True)
class FactorizationStep:
    """One rule application: ``value`` evaluates the word up to and including ``word``."""

    rule: str
    word: Word
    value: PartialInjection

    def to_json(self) -> dict:
        return {"rule": self.rule, "word": format_word(self.word), "value": to_json(self.value)}


@dataclass
class FactorizationTrace:
    input: PartialInjection
    word: Word = EMPTY_WORD
    steps: list[FactorizationStep] = field(default_factory=list)
    oracle_word: Optional[Word] = None
    # |chi| of the reduced element before each delta step and after the last one
    chi_sizes: list[int] = field(default_factory=list)
    # Dom of the aligned map after each alignment move
    beta_domains: list[tuple[int, ...]] = field(default_factory=list)
    # alignment measure before each move and after the last one
    measures: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def text(self) -> str:
        return format_word(self.word)

    def to_json(self) -> dict:
        return {
            "input": to_json(self.input),
            "word": self.text,
            "tokens": word_tokens(self.word),
            "steps": [s.to_json() for s in self.steps],
            "oracle_word": format_word(self.oracle_word) if self.oracle_word is not None else None,
            "chi_sizes": self.chi_sizes,
            "beta_domains": [list(d) for d in self.beta_domains],
            "measures": [list(m) for m in self.measures],
        }


class _TraceBuilder:
    """Accumulates steps so that every recorded value is a word-prefix evaluation."""

    def __init__(self, a: PartialInjection):
        self.n = a.n
        self.trace = FactorizationTrace(a)
        self.value = identity(a.n)

    def push(self, rule: str, word: Word) -> None:
        word = simplify(word, self.n) if self.n > 2 else word
        if not word:
            return
        self.value = compose(self.value, eval_word(word, self.n))
        self.trace.word = self.trace.word + word
        self.trace.steps.append(FactorizationStep(rule, word, self.value))

    def finish(self) -> FactorizationTrace:
        trace = self.trace
        if eval_word(trace.word, self.n) != trace.input:
            raise FactorizationError(
                f"word {trace.text!r} does not evaluate to {trace.input}", trace
            )
        return trace


# ---------------------------------------------------------------------------
# Deviation registry
# ---------------------------------------------------------------------------

_deviations: list[dict] = []


def recorded_deviations() -> list[dict]:
    """Reduction formulas that failed evaluation and were replaced by oracle words."""
    return list(_deviations)


def clear_deviations() -> None:
    _deviations.clear()


def _checked(word: Word, expected: PartialInjection, family: str, indices: tuple) -> Word:
    """Return word if it evaluates to expected, else an oracle replacement."""
    n = expected.n
    word = simplify(word, n) if n > 2 else word
    actual = eval_word(word, n)
    if actual == expected:
        return word
    log_error(f"reduction {family}{indices} at n={n} evaluates to {actual}, expected {expected}")
    replacement = None
    if n <= ORACLE_CAP:
        replacement = factorize_bfs(expected)
    _deviations.append({
        "identity": family,
        "n": n,
        "indices": list(indices),
        "expected": to_json(expected),
        "actual": to_json(actual),
        "replacement": format_word(replacement) if replacement is not None else None,
    })
    if replacement is None:
        raise FactorizationError(f"no verified word for {family}{indices} at n={n}")
    return replacement


# ---------------------------------------------------------------------------
# Rank n and n - 1
# ---------------------------------------------------------------------------

def _word_s2() -> Word:
    return letter("S2")


@lru_cache(maxsize=None)
def epsilon_word(i: int, n: int) -> Word:
    """eps_i via rotations of E1 (odd i) or EN (even i)."""
    if i == 1:
        return letter("E1")
    if i == n:
        return letter("EN")
    if i % 2 == 0:
        word = s1_power((n - i) // 2, n) + letter("EN") + s1_power(i // 2, n)
    else:
        word = s1_power((n - i + 1) // 2, n) + letter("E1") + s1_power((i - 1) // 2, n)
    return _checked(word, epsilon(i, n), "epsilon", (i,))


@lru_cache(maxsize=None)
def gamma_fix_word(i: int, n: int) -> Word:
    """gamma_i = eps_i sigma2 sigma1^(i-1)."""
    word = epsilon_word(i, n) + _word_s2() + s1_power(i - 1, n)
    return _checked(word, gamma_fix(i, n), "gamma_fix", (i,))


@lru_cache(maxsize=None)
def alpha_shift_word(i: int, k: int, n: int) -> Word:
    if k >= i:
        word = epsilon_word(i, n) + s1_power((k - i) // 2, n)
    else:
        word = epsilon_word(i, n) + s1_power((n + k - i) // 2, n)
    return _checked(word, alpha_shift(i, k, n), "alpha_shift", (i, k))


@lru_cache(maxsize=None)
def gamma_reflect_word(i: int, k: int, n: int) -> Word:
    """gamma_i^(k) = alpha_i^(n-k+2) sigma2."""
    m = cyclic_add(n - k, 2, n)
    word = alpha_shift_word(i, m, n) + _word_s2()
    return _checked(word, gamma_reflect(i, k, n), "gamma_reflect", (i, k))


def factorize_rank_n(a: PartialInjection) -> Word:
    """sigma1^p or sigma1^p sigma2, with sigma1^(n/2) = id dropped."""
    n = a.n
    if a.rank != n:
        raise DomainError(f"expected a permutation, got rank {a.rank}")
    require_member(a)
    if a(2) == cyclic_add(a(1), 1, n):
        word = s1_power((a(1) - 1) // 2, n)
    else:
        word = s1_power((1 - a(1)) // 2, n) + _word_s2()
    if eval_word(word, n) != a:
        raise FactorizationError(f"rank-n word {format_word(word)!r} misses {a}")
    return word


def factorize_rank_n1(a: PartialInjection) -> Word:
    """Word for a map missing exactly one point of its domain and one of its image."""
    n = a.n
    if a.rank != n - 1:
        raise DomainError(f"expected rank {n - 1}, got {a.rank}")
    require_member(a)
    (i,) = set(range(1, n + 1)) - a.domain
    (k,) = set(range(1, n + 1)) - a.image
    x = cyclic_add(i, 1, n)
    shift = a(cyclic_add(x, 1, n)) == cyclic_add(a(x), 1, n)
    if shift:
        word = epsilon_word(i, n) if i == k else alpha_shift_word(i, k, n)
    else:
        word = gamma_fix_word(i, n) if i == k else gamma_reflect_word(i, k, n)
    if eval_word(word, n) != a:
        raise FactorizationError(f"rank-(n-1) word {format_word(word)!r} misses {a}")
    return word


def _rank_n1_rule(a: PartialInjection) -> str:
    n = a.n
    (i,) = set(range(1, n + 1)) - a.domain
    (k,) = set(range(1, n + 1)) - a.image
    x = cyclic_add(i, 1, n)
    shift = a(cyclic_add(x, 1, n)) == cyclic_add(a(x), 1, n)
    if shift:
        return "epsilon" if i == k else "alpha-shift"
    return "gamma-fix" if i == k else "gamma-reflect"


# ---------------------------------------------------------------------------
# Reductions of the derived families
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def gamma_ij_word(i: int, j: int, n: int) -> Word:
    """G-word for gamma_{i,j}, by the reduction tables for i < j and j < i."""
    if (i - j) % 2 or i == j:
        raise DomainError(f"gamma_{{{i},{j}}} needs distinct indices of equal parity")
    m2 = 2 * (n // 4)
    eps = epsilon_word
    s1 = s1_power

    if i < j and i % 2 == 0:
        if (i, j) == (2, n):
            word = eps(2, n) + eps(n, n) + _word_s2()
        elif (i, j) == (n - 2, n):
            word = eps(n - 2, n) + eps(n, n)
        elif j == n and 4 <= i <= m2:
            word = letter("GN", i)
        elif j == n:
            word = s1((n - i) // 2, n) + gamma_ij_word(n - i, n, n) + letter("S1") + _word_s2()
        else:
            word = s1((n - j) // 2, n) + gamma_ij_word(n + i - j, n, n) + s1(j // 2, n)
    elif i < j:
        if (i, j) == (1, 3):
            word = eps(1, n) + eps(3, n)
        elif (i, j) == (1, n - 1):
            word = eps(1, n) + eps(n - 1, n) + _word_s2() + s1(n // 2 - 1, n)
        elif i == 1:
            word = _word_s2() + gamma_ij_word(n - j + 2, 1, n) + _word_s2()
        else:
            word = s1((n - j + 1) // 2, n) + gamma_ij_word(n - j + i + 1, 1, n) + s1((j - 1) // 2, n)
    elif i % 2 == 0:
        if (i, j) == (n, 2):
            word = eps(2, n) + eps(n, n)
        elif (i, j) == (n, n - 2):
            word = eps(n - 2, n) + eps(n, n) + _word_s2() + s1(n // 2 - 2, n)
        elif i == n:
            word = s1((n - j) // 2, n) + gamma_ij_word(n - j, n, n) + s1(j // 2, n)
        else:
            word = s1((n - j) // 2, n) + gamma_ij_word(i - j, n, n) + s1(j // 2, n)
    else:
        if (i, j) == (3, 1):
            word = eps(1, n) + eps(3, n) + _word_s2() + letter("S1")
        elif (i, j) == (n - 1, 1):
            word = eps(1, n) + eps(n - 1, n)
        elif j == 1 and 5 <= i <= m2 + 1:
            word = letter("G1", i)
        elif j == 1:
            word = s1((n - i + 1) // 2, n) + gamma_ij_word(n - i + 2, 1, n) + _word_s2()
        else:
            word = s1((n - j + 1) // 2, n) + gamma_ij_word(i - j + 1, 1, n) + s1((j - 1) // 2, n)

    return _checked(word, gamma_ij(i, j, n), "gamma", (i, j))


@lru_cache(maxsize=None)
def gamma_minus_word(i: int, j: int, n: int) -> Word:
    """gamma^-_{i,j} = eps_i gamma_{i-1,j}."""
    word = epsilon_word(i, n) + gamma_ij_word(cyclic_add(i, -1, n), j, n)
    return _checked(word, gamma_ij_minus(i, j, n), "gamma_minus", (i, j))


@lru_cache(maxsize=None)
def gamma_plus_word(i: int, j: int, n: int) -> Word:
    """gamma^+_{i,j} = eps_j gamma_{i,j+1}."""
    word = epsilon_word(j, n) + gamma_ij_word(i, cyclic_add(j, 1, n), n)
    return _checked(word, gamma_ij_plus(i, j, n), "gamma_plus", (i, j))


def alpha_minus_valid(i: int, j: int, n: int) -> bool:
    """Index pairs covered by the alpha^- formulas."""
    if i < j:
        return j >= i + 3
    return j < i <= n - 2


def alpha_plus_valid(i: int, j: int, n: int) -> bool:
    """Index pairs covered by the alpha^+ formulas."""
    if i < j:
        return j + 2 <= n
    return i >= j + 3


@lru_cache(maxsize=None)
def alpha_minus_word(i: int, j: int, n: int) -> Word:
    if not alpha_minus_valid(i, j, n):
        raise DomainError(f"alpha^-_{{{i},{j}}} outside the reduction ranges for n={n}")
    if i < j and (i - j) % 2:
        word = gamma_ij_word(i + 1, j, n) + gamma_ij_word(i, j - 1, n)
    elif i < j:
        word = epsilon_word(i + 1, n) + gamma_ij_word(i, j, n) + gamma_ij_word(i, j - 2, n)
    else:
        word = alpha_plus_word(j, i, n) + s1_power(n // 2 - 1, n)
    return _checked(word, alpha_ij_minus(i, j, n), "alpha_minus", (i, j))


@lru_cache(maxsize=None)
def alpha_plus_word(i: int, j: int, n: int) -> Word:
    if not alpha_plus_valid(i, j, n):
        raise DomainError(f"alpha^+_{{{i},{j}}} outside the reduction ranges for n={n}")
    if i < j and (i - j) % 2:
        word = gamma_ij_word(i, j + 1, n) + gamma_ij_word(i + 1, j + 2, n)
    elif i < j:
        word = epsilon_word(j + 1, n) + gamma_ij_word(i, j, n) + gamma_ij_word(i, j + 2, n)
    else:
        word = alpha_minus_word(j, i, n) + letter("S1")
    return _checked(word, alpha_ij_plus(i, j, n), "alpha_plus", (i, j))


@lru_cache(maxsize=None)
def delta_word(kind: str, i: int, n: int) -> Word:
    """DO(i) / DE(i) when i <= floor(n/4), else conjugated down to n/2 - i."""
    if kind not in ("o", "e"):
        raise DomainError(f"delta kind must be 'o' or 'e', got {kind!r}")
    tag = "DO" if kind == "o" else "DE"
    element = delta_o(i, n) if kind == "o" else delta_e(i, n)
    if i <= n // 4:
        return letter(tag, i)
    inner = letter(tag, n // 2 - i)
    if kind == "o":
        word = gamma_ij_word(3, 1, n) + inner + gamma_ij_word(2, n, n)
    else:
        word = gamma_ij_word(2, n, n) + inner + gamma_ij_word(3, 1, n)
    return _checked(word, element, f"delta_{kind}", (i,))


_REDUCERS: dict[str, Callable[..., Word]] = {
    "epsilon": epsilon_word,
    "gamma_fix": gamma_fix_word,
    "alpha_shift": alpha_shift_word,
    "gamma_reflect": gamma_reflect_word,
    "gamma": gamma_ij_word,
    "gamma_minus": gamma_minus_word,
    "gamma_plus": gamma_plus_word,
    "alpha_minus": alpha_minus_word,
    "alpha_plus": alpha_plus_word,
    "delta_o": lambda i, n: delta_word("o", i, n),
    "delta_e": lambda i, n: delta_word("e", i, n),
}


def reduce_to_A(family: str, *indices: int, n: int) -> Word:
    """G-word for a named derived element, e.g. ``reduce_to_A("gamma", 3, 1, n=8)``."""
    if family not in _REDUCERS:
        raise DomainError(f"unknown family {family!r}; expected one of {sorted(_REDUCERS)}")
    return _REDUCERS[family](*indices, n)


# ---------------------------------------------------------------------------
# Alignment of parity-preserving maps
# ---------------------------------------------------------------------------

ALIGNMENT_RULES = (
    "seed-rotation",
    "seed-reflection",
    "double-gap",
    "double-gap-parity",
    "same-parity",
    "gamma-plus",
    "gamma-minus",
    "gap-free",
    "shift",
    "shift-odd",
    "final-reversal",
)


@dataclass(frozen=True)
class AlignmentMove:
    """A right factor that keeps Dom beta, with its G-word."""

    rule: str
    element: PartialInjection
    word: Word


@dataclass(frozen=True)
class _Arc:
    """The part of the cycle not yet aligned, read forward from the gap after
    the last aligned block to the gap before the first one.

    Points are addressed by their offset from ``start``. ``gaps`` holds the
    offsets outside Im beta, so it starts at 0 and ends at size - 1. Slot t
    (1-based) is the stretch between gaps[t - 1] and gaps[t]: either empty
    (two adjacent gaps) or exactly one image block.
    """

    n: int
    start: int
    size: int
    gaps: tuple[int, ...]

    @property
    def slots(self) -> int:
        return len(self.gaps) - 1

    def point(self, offset: int) -> int:
        return cyclic_add(self.start, offset, self.n)

    def offset(self, y: int) -> int:
        return (y - self.start) % self.n

    def empty(self, t: int) -> bool:
        return self.gaps[t] - self.gaps[t - 1] == 1

    def odd(self, t: int) -> bool:
        """An empty slot or a block of even length."""
        return (self.gaps[t] - self.gaps[t - 1]) % 2 == 1

    def lead(self) -> int:
        """Number of empty slots before the first block."""
        e = 0
        while e < self.slots and self.gaps[e + 1] == e + 1:
            e += 1
        return e

    def slot_of(self, lo: int, hi: int) -> int:
        t = bisect_left(self.gaps, lo)
        if not 0 < t <= self.slots or self.gaps[t] != hi + 1:
            raise FactorizationError(f"offsets {lo}..{hi} are not one slot of {self.gaps}")
        return t

    def reversal(self, rule: str, a: int, b: int) -> AlignmentMove:
        """gamma between the gaps at offsets a < b, reversing a+1..b-1."""
        if (b - a) % 2:
            raise FactorizationError(f"{rule}: offsets {a} and {b} have different parity")
        i, j = self.point(a), self.point(b)
        return AlignmentMove(rule, gamma_ij(i, j, self.n), reduce_to_A("gamma", i, j, n=self.n))

    def slot_reversal(self, rule: str, first: int, last: int) -> AlignmentMove:
        """Reverse slots first..last."""
        return self.reversal(rule, self.gaps[first - 1], self.gaps[last])


def _aligned_count(beta: PartialInjection, target: PartialInjection, dec) -> int:
    """Leading image blocks of target (left to right) that beta already matches,
    gaps between them included."""
    if not dec.sigma:
        return 0
    inv_b, inv_t = inverse(beta), inverse(target)
    first = dec.t[dec.sigma[0] - 1]
    s = 0
    for r in dec.sigma:
        if any(inv_b(y) != inv_t(y) for y in range(first, dec.q[r - 1] + 1)):
            break
        s += 1
    return s


def _unaligned_arc(beta: PartialInjection, dec, s: int) -> _Arc:
    n = beta.n
    start = cyclic_add(dec.q[dec.sigma[s - 1] - 1], 1, n)
    stop = cyclic_add(dec.t[dec.sigma[0] - 1], -1, n)
    size = (stop - start) % n + 1
    image = beta.image
    gaps = tuple(i for i in range(size) if cyclic_add(start, i, n) not in image)
    if not gaps or gaps[0] != 0 or gaps[-1] != size - 1:
        raise FactorizationError(f"unaligned arc of {beta} is not bounded by gaps")
    return _Arc(n, start, size, gaps)


def _seed_move(beta: PartialInjection, target: PartialInjection, block: tuple[int, ...]) -> AlignmentMove:
    """Rotation or reflection carrying the first block onto its target image."""
    n = target.n
    l, r = block[0], block[-1]
    d = (target(l) - beta(l)) % n
    if d % 2 == 0:
        rot = power(sigma1(n), d // 2)
        if rot(beta(r)) == target(r):
            return AlignmentMove("seed-rotation", rot, s1_power(d // 2, n))
    c = (2 - target(l) - beta(l)) % n
    if c % 2 == 0:
        refl = reflection(c // 2, n)
        if refl(beta(l)) == target(l) and refl(beta(r)) == target(r):
            return AlignmentMove("seed-reflection", refl, s1_power(c // 2, n) + _word_s2())
    raise FactorizationError(f"no rotation or reflection moves block {block} of {beta} onto {target}")


def _odd_partner(arc: _Arc, t: int, first: int) -> tuple[int, int]:
    """Slots lo..hi around slot t whose weights sum to two: t and the nearest
    other odd slot at or after ``first``, smallest index first."""
    for u in range(t - 1, first - 1, -1):
        if arc.odd(u):
            return u, t
    for u in range(t + 1, arc.slots + 1):
        if arc.odd(u):
            return t, u
    raise FactorizationError(f"slot {t} has no odd partner in {arc.gaps}")


def _gather(arc: _Arc, e: int) -> tuple[int, AlignmentMove]:
    """Bring one more empty slot to the front, or set one up to come next.

    A double gap (empty slot t) whose right gap has the parity of the last
    leading gap is pulled forward by a single reversal. Otherwise the first
    double gap is reversed together with its nearest odd partner, which flips
    its parity relative to the front.
    """
    doubles = [t for t in range(e + 2, arc.slots + 1) if arc.empty(t)]
    for t in doubles:
        if (arc.gaps[t] - arc.gaps[e]) % 2 == 0:
            return 0, arc.slot_reversal("double-gap", e + 1, t)
    if not doubles:
        raise FactorizationError(f"no double gap left to gather in {arc.gaps}")
    lo, hi = _odd_partner(arc, doubles[0], e + 1)
    return 1, arc.slot_reversal("double-gap-parity", lo, hi)


def _alpha_minus_move(i: int, j: int, n: int) -> AlignmentMove:
    element = alpha_ij_minus(i, j, n)
    if alpha_minus_valid(i, j, n):
        return AlignmentMove("shift", element, reduce_to_A("alpha_minus", i, j, n=n))
    # conjugate by a rotation into the indices the reduction covers
    for r in range(1, n // 2):
        i2, j2 = cyclic_add(i, -2 * r, n), cyclic_add(j, -2 * r, n)
        if alpha_minus_valid(i2, j2, n):
            word = s1_power(-r, n) + reduce_to_A("alpha_minus", i2, j2, n=n) + s1_power(r, n)
            if eval_word(word, n) != element:
                raise FactorizationError(f"rotated alpha^-_{{{i},{j}}} word misses the element")
            return AlignmentMove("shift", element, simplify(word, n))
    raise FactorizationError(f"alpha^-_{{{i},{j}}} has no rotation into the reduction ranges at n={n}")


def _place(arc: _Arc, beta: PartialInjection, target: PartialInjection,
           block: tuple[int, ...], e: int, want: int) -> tuple[tuple[int, ...], AlignmentMove]:
    """Next move for a block once the front holds enough gaps.

    Returns (order, shift, mismatch) and the move.
    """
    n = target.n
    offsets = [arc.offset(beta(x)) for x in block]
    lo, hi = min(offsets), max(offsets)
    slot = arc.slot_of(lo, hi)

    if slot == e + 1:
        m = lo - want
        mismatch = int(any(beta(x) != target(x) for x in block))
        if m >= 2:
            return (0, m, mismatch), _alpha_minus_move(arc.point(lo - 3), arc.point(hi + 1), n)
        if m == 1:
            return (0, m, mismatch), arc.reversal("shift-odd", want - 1, hi + 1)
        if mismatch:
            return (0, 0, mismatch), arc.reversal("final-reversal", want - 1, hi + 1)
        raise FactorizationError(f"block {block} is in place but was not counted as aligned")

    g_e, g_x = arc.gaps[e], arc.gaps[slot]
    i, j = arc.point(g_e), arc.point(g_x)
    if (g_x - g_e) % 2 == 0:
        return (1, 0, 0), arc.reversal("same-parity", g_e, g_x)
    if slot < arc.slots and arc.empty(slot + 1):
        return (1, 0, 0), AlignmentMove(
            "gamma-plus", gamma_ij_plus(i, j, n), reduce_to_A("gamma_plus", i, j, n=n))
    if e >= want:
        return (1, 0, 0), AlignmentMove(
            "gamma-minus", gamma_ij_minus(i, j, n), reduce_to_A("gamma_minus", i, j, n=n))
    if not arc.odd(slot):
        raise FactorizationError(f"odd-length block {block} cannot reach the front of {arc.gaps}")
    first, last = _odd_partner(arc, slot, e + 1)
    return (2, 0, 0), arc.slot_reversal("gap-free", first, last)


def _next_move(beta: PartialInjection, target: PartialInjection,
               dec) -> tuple[tuple[int, ...], Optional[AlignmentMove]]:
    """The measure of beta and the move the case analysis picks for it.

    The measure is (unaligned blocks, gaps still to gather, gather parity,
    order, shift, orientation mismatch); every move lowers it
    lexicographically. None is returned once beta equals target.
    """
    k = dec.k
    s = _aligned_count(beta, target, dec)
    if s == k:
        return (0, 0, 0, 0, 0, 0), None
    block = dec.intervals[dec.sigma[s] - 1]
    if s == 0:
        return (k, 0, 0, 0, 0, 0), _seed_move(beta, target, block)

    arc = _unaligned_arc(beta, dec, s)
    want = arc.offset(dec.t[dec.sigma[s] - 1])
    e = arc.lead()
    deficit = want - 1 - e
    if deficit > 0:
        flag, move = _gather(arc, e)
        return (k - s, deficit, flag, 0, 0, 0), move
    rest, move = _place(arc, beta, target, block, e, want)
    return (k - s, 0, 0) + rest, move


def _align(builder: _TraceBuilder, beta: PartialInjection, target: PartialInjection) -> None:
    """Right-multiply beta = id|Dom(target) into target, one image block at a time.

    Raises:
        FactorizationError: with the trace so far, when no rule applies or
            the measure fails to drop
    """
    trace = builder.trace
    dec = maximal_intervals(target)
    while True:
        try:
            measure, move = _next_move(beta, target, dec)
        except FactorizationError as e:
            raise FactorizationError(f"aligning {beta} to {target}: {e}", trace) from None
        if trace.measures and measure >= trace.measures[-1]:
            raise FactorizationError(
                f"measure {measure} after {trace.measures[-1]} does not decrease", trace)
        trace.measures.append(measure)
        if move is None:
            return
        moved = compose(beta, move.element)
        if moved.rank != beta.rank:
            raise FactorizationError(f"{move.rule} dropped the rank of {beta}", trace)
        builder.push(move.rule, move.word)
        beta = moved
        trace.beta_domains.append(tuple(sorted(beta.domain)))


# ---------------------------------------------------------------------------
# Parity-preserving maps
# ---------------------------------------------------------------------------

def _normalizing_shifts(a: PartialInjection) -> tuple[int, int]:
    """(u, v) with {1, n} outside both Dom and Im of sigma1^u a sigma1^v."""
    n = a.n

    def shift_for(points: frozenset[int]) -> int:
        if not {1, n} <= points:
            return 0
        gap = min(x for x in range(1, n + 1) if x not in points)
        return (gap if gap % 2 == 0 else gap - 1) // 2

    u = shift_for(a.domain)
    e = 2 * shift_for(a.image)
    v = (n - e) // 2 % (n // 2) if e else 0
    return u, v


def _p_steps(builder: _TraceBuilder, a: PartialInjection) -> None:
    n = a.n
    if a.rank == n:
        rule = "rotation" if a(2) == cyclic_add(a(1), 1, n) else "reflection"
        builder.push(rule, factorize_rank_n(a))
        return
    if a.rank == n - 1:
        builder.push(_rank_n1_rule(a), factorize_rank_n1(a))
        return

    u, v = _normalizing_shifts(a)
    rot = sigma1(n)
    target = compose(compose(power(rot, u), a), power(rot, v))
    builder.push("unshift-domain", s1_power(-u, n))

    missing = [x for x in range(1, n + 1) if x not in target.domain]
    builder.push("restrict", concat(epsilon_word(x, n) for x in missing))

    _align(builder, identity_on(target.domain, n), target)
    builder.push("unshift-image", s1_power(-v, n))


def factorize_p(a: PartialInjection) -> FactorizationTrace:
    """Factor a parity-preserving member of IC_n over A.

    Raises:
        NotMemberError: a is not in IC_n
        DomainError: a moves some point to the other parity
        FactorizationError: the produced word does not evaluate to a
    """
    require_member(a)
    if chi(a):
        raise DomainError(f"{a} is not parity-preserving")
    builder = _TraceBuilder(a)
    _p_steps(builder, a)
    return builder.finish()


# ---------------------------------------------------------------------------
# Parity-mixing maps
# ---------------------------------------------------------------------------

def _reduction_pair(a: PartialInjection) -> Optional[tuple[int, int]]:
    """Smallest i in chi(a) with a same-parity j outside Dom a, then smallest j."""
    n = a.n
    dom = a.domain
    for i in sorted(chi(a)):
        for j in range(1, n + 1):
            if j not in dom and (j - i) % 2 == 0:
                return i, j
    return None


def _reducer(i: int, j: int, n: int) -> tuple[str, PartialInjection, Word]:
    """The left factor removing i from chi, and a word for its inverse."""
    k = ((j - i) % n) // 2
    if i % 2:
        t = (i - 1) // 2
        rho = compose(delta_o(k, n), power(sigma1(n), t))
        return "delta-odd", rho, s1_power(-t, n) + delta_word("e", k, n)
    t = (i - 2) // 2
    m = n // 2 - k
    rho = compose(delta_e(m, n), power(sigma1(n), t))
    return "delta-even", rho, s1_power(-t, n) + delta_word("o", m, n)


def factorize_pbar(a: PartialInjection) -> FactorizationTrace:
    """Factor a parity-mixing member of IC_n.

    Left factors rho = delta^o_k sigma1^t (odd points) or delta^e_m sigma1^t
    (even points) remove one point of chi at a time without changing the
    rank; the word is rho_1^-1 ... rho_T^-1 followed by the word for the
    reduced map. When chi is the whole domain and the domain has one parity,
    a = eta1 (eta2 a) or a = eta2 (eta1 a) instead.
    """
    require_member(a)
    if not chi(a):
        raise DomainError(f"{a} is parity-preserving")
    n = a.n
    builder = _TraceBuilder(a)
    beta = a
    builder.trace.chi_sizes.append(len(chi(beta)))

    while chi(beta):
        c = chi(beta)
        dom = beta.domain
        if c == dom and (all(x % 2 for x in dom) or all(x % 2 == 0 for x in dom)):
            odd = all(x % 2 for x in dom)
            outer, inner = ("H1", eta2(n)) if odd else ("H2", eta1(n))
            builder.push("eta", letter(outer))
            beta = compose(inner, beta)
            # a is the eta letter itself
            if beta == identity_on(inner.domain, n):
                return builder.finish()
            break
        pair = _reduction_pair(beta)
        if pair is None:
            raise FactorizationError(f"no reducible point in chi of {beta}", builder.trace)
        rule, rho, inverse_word = _reducer(*pair, n)
        reduced = compose(rho, beta)
        if reduced.rank != beta.rank or len(chi(reduced)) != len(c) - 1:
            raise FactorizationError(f"{rule} at {pair} did not remove one point of chi", builder.trace)
        builder.push(rule, inverse_word)
        beta = reduced
        builder.trace.chi_sizes.append(len(chi(beta)))

    _p_steps(builder, beta)
    return builder.finish()


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

_BASE_WORDS = {
    (1, 2): "ID",
    (2, 0): "H1",
    (0, 1): "H2",
    (1, 0): "H1 H2",
    (0, 2): "H2 H1",
    (0, 0): "H1 H1",
}


def _factorize_base(a: PartialInjection) -> FactorizationTrace:
    builder = _TraceBuilder(a)
    builder.push("base", parse_word(_BASE_WORDS[a.images], 2))
    return builder.finish()


def factorize(a: PartialInjection, with_oracle: bool = False) -> FactorizationTrace:
    """Factor any member of IC_n over G(n).

    Args:
        a: The element
        with_oracle: Also compute a shortest word by closure search and
            check that it evaluates to a

    Raises:
        NotMemberError: a is not in IC_n
        FactorizationError: a word failed its evaluation check
    """
    require_member(a)
    if a.n == 2:
        trace = _factorize_base(a)
    elif chi(a):
        trace = factorize_pbar(a)
    else:
        trace = factorize_p(a)

    allowed = set(generator_catalog(a.n).g)
    stray = trace.word.symbols() - allowed
    if stray:
        raise FactorizationError(f"letters {sorted(map(str, stray))} are not generators", trace)

    if with_oracle:
        trace.oracle_word = factorize_bfs(a)
        if eval_word(trace.oracle_word, a.n) != a:
            raise FactorizationError("oracle word does not evaluate to its input", trace)
    return trace


@lru_cache(maxsize=8)
def _catalog_closure(n: int):
    return close(generator_catalog(n).g)


def factorize_bfs(
    a: PartialInjection,
    gens: Optional[Mapping[GeneratorSymbol, PartialInjection]] = None,
) -> Word:
    """Shortest word for a over gens (default G(n)), read off the closure tree.

    Raises:
        NotGeneratedError: a is not in the closure of gens
    """
    result = _catalog_closure(a.n) if gens is None else close(gens)
    if not result.contains(a):
        raise NotGeneratedError(f"{a} is not generated")
    symbols = list(result.labels)
    merged: list[list] = []
    for idx in result.word_indices(a):
        sym = symbols[idx]
        if merged and merged[-1][0] == sym:
            merged[-1][1] += 1
        else:
            merged.append([sym, 1])
    return Word(tuple((s, k) for s, k in merged))


def inverse_word_check(word: Word, n: int) -> bool:
    """True when the inverse word evaluates to the inverse element."""
    return eval_word(word_inverse(word, n), n) == inverse(eval_word(word, n))
