"""Tests for the factorize module."""

import random

import pytest
from hypothesis import given, settings

from icn.core import DomainError, PartialInjection, from_pairs, identity, identity_on, power, sort_key
from icn.crown import NotMemberError, chi
from icn.factorize import (
    ALIGNMENT_RULES,
    NotGeneratedError,
    alpha_shift_word,
    clear_deviations,
    delta_word,
    factorize,
    factorize_bfs,
    factorize_p,
    factorize_pbar,
    inverse_word_check,
    recorded_deviations,
    reduce_to_A,
)
from icn.generators import (
    GeneratorSymbol,
    Word,
    alpha_shift,
    alpha_ij_minus,
    concat,
    delta_o,
    epsilon,
    eta1,
    eta2,
    eval_word,
    format_word,
    gamma_fix,
    gamma_ij,
    generator_catalog,
    parse_word,
    reflection,
    sigma1,
    sigma2,
)
from tests.strategies import members

OTHER_RULES = {
    "rotation", "reflection", "epsilon", "alpha-shift", "gamma-fix", "gamma-reflect",
    "unshift-domain", "restrict", "unshift-image", "delta-odd", "delta-even", "eta", "base",
}


def _check_trace(trace) -> None:
    """Shared invariants of every factorization."""
    n = trace.input.n
    assert eval_word(trace.word, n) == trace.input
    assert trace.word.symbols() <= set(generator_catalog(n).g)
    # each recorded value is the evaluation of the word read so far
    for idx, step in enumerate(trace.steps):
        prefix = concat(s.word for s in trace.steps[: idx + 1])
        assert step.value == eval_word(prefix, n)
    sizes = trace.chi_sizes
    assert all(b == a - 1 for a, b in zip(sizes, sizes[1:]))
    assert len(set(trace.beta_domains)) <= 1
    assert all(s.rule in OTHER_RULES or s.rule in ALIGNMENT_RULES for s in trace.steps)
    # the alignment measure drops at every move
    assert all(b < a for a, b in zip(trace.measures, trace.measures[1:]))
    if trace.measures:
        assert trace.measures[-1] == (0,) * 6


class TestPermutationsAndNearPermutations:
    """Tests for rank n and rank n - 1 words."""

    def test_identity_is_empty_word(self):
        """Test that id factors as the empty word."""
        trace = factorize(identity(6))
        assert trace.text == ""
        assert trace.steps == []

    @pytest.mark.parametrize("a,expected", [
        (power(sigma1(6), 2), "S1^2"),
        (sigma2(6), "S2"),
        (reflection(1, 6), "S1 S2"),
    ])
    def test_rank_n(self, a, expected):
        """Test rotation and reflection words."""
        assert factorize(a).text == expected

    @pytest.mark.parametrize("a,expected,rule", [
        (epsilon(4, 8), "S1^2 EN S1^2", "epsilon"),
        (epsilon(1, 6), "E1", "epsilon"),
        (gamma_fix(1, 6), "E1 S2", "gamma-fix"),
        (alpha_shift(1, 3, 6), "E1 S1", "alpha-shift"),
    ])
    def test_rank_n_minus_1(self, a, expected, rule):
        """Test the four shapes of a single missing point."""
        trace = factorize(a)
        assert trace.text == expected
        assert trace.steps[0].rule == rule


class TestSmallN:
    """Tests for the fixed words of IC_2."""

    @pytest.mark.parametrize("images,expected", [
        ((1, 2), "ID"),
        ((2, 0), "H1"),
        ((0, 1), "H2"),
        ((1, 0), "H1 H2"),
        ((0, 2), "H2 H1"),
        ((0, 0), "H1 H1"),
    ])
    def test_base_words(self, images, expected):
        """Test every member of IC_2."""
        trace = factorize(PartialInjection(2, images))
        assert trace.text == expected

    def test_all_of_ic2(self, icn2):
        """Test that every member factors."""
        for a in icn2:
            _check_trace(factorize(a))


class TestParityMixing:
    """Tests for delta reductions and the eta branch."""

    def test_eta_letters(self):
        """Test that the etas are their own one-letter words."""
        assert factorize(eta2(8)).text == "H2"
        assert factorize(eta1(8)).text == "H1"
        assert factorize(eta2(8)).chi_sizes == [4]

    def test_single_delta_step(self):
        """Test delta^o_1 on [8]: one reduction, then a parity-preserving word."""
        trace = factorize(delta_o(1, 8))
        assert trace.steps[0].rule == "delta-even"
        assert format_word(trace.steps[0].word) == "DO(1)"
        assert trace.chi_sizes == [1, 0]
        _check_trace(trace)

    def test_pbar_refuses_parity_preserving(self):
        """Test that factorize_pbar needs a non-empty chi."""
        with pytest.raises(DomainError):
            factorize_pbar(sigma1(6))

    def test_p_refuses_parity_mixing(self):
        """Test that factorize_p needs an empty chi."""
        with pytest.raises(DomainError):
            factorize_p(delta_o(1, 6))


class TestRoundTrip:
    """Tests that every member factors with the trace invariants intact."""

    def test_all_of_ic4(self, icn4):
        """Test every member of IC_4."""
        for a in icn4:
            _check_trace(factorize(a))

    def test_all_of_ic6(self, icn6):
        """Test every member of IC_6."""
        for a in icn6:
            _check_trace(factorize(a))

    def test_parity_mixing_chi_reaches_zero(self, icn6):
        """Test that delta reductions end at an empty chi."""
        for a in icn6:
            trace = factorize(a)
            if chi(a) and len(trace.chi_sizes) > 1:
                assert trace.chi_sizes[0] == len(chi(a))
                assert trace.chi_sizes[-1] == 0

    @settings(max_examples=60, deadline=None)
    @given(members(8))
    def test_random_members_of_ic8(self, a):
        """Test products of generators on [8]."""
        _check_trace(factorize(a))

    @pytest.mark.slow
    def test_seeded_sample_of_ic8(self, icn8):
        """Test 10000 members drawn from the brute-force IC_8."""
        pool = sorted(icn8, key=sort_key)
        for a in random.Random(8).sample(pool, 10_000):
            _check_trace(factorize(a))

    def test_restriction_at_n12(self):
        """Test a two-gap partial identity on [12]."""
        a = identity_on([x for x in range(1, 13) if x not in (4, 8)], 12)
        _check_trace(factorize(a))

    def test_with_oracle(self, icn4):
        """Test that the closure word also evaluates to the input."""
        for a in sorted(icn4, key=lambda m: m.images)[:40]:
            trace = factorize(a, with_oracle=True)
            assert eval_word(trace.oracle_word, 4) == a

    def test_non_member_rejected(self, order_preserving_non_member):
        """Test that non-members raise with the membership report."""
        with pytest.raises(NotMemberError) as excinfo:
            factorize(order_preserving_non_member)
        assert excinfo.value.report.violated == "2"

    def test_trace_json(self):
        """Test the machine-readable trace."""
        data = factorize(epsilon(4, 8)).to_json()
        assert data["word"] == "S1^2 EN S1^2"
        assert data["tokens"] == ["S1^2", "EN", "S1^2"]
        assert data["input"] == {"n": 8, "map": [1, 2, 3, None, 5, 6, 7, 8]}
        assert data["oracle_word"] is None

    def test_trace_json_measures(self):
        """Test that the alignment measures are written out as lists."""
        data = factorize(from_pairs({1: 1, 3: 5, 5: 3}, 8)).to_json()
        assert data["measures"] == [[1, 0, 0, 1, 0, 0], [0, 0, 0, 0, 0, 0]]


class TestAlignment:
    """Tests for the block-by-block alignment of parity-preserving maps."""

    @pytest.mark.parametrize("pairs,rules", [
        ({1: 3, 2: 2, 3: 1, 5: 5}, ["restrict", "seed-reflection", "shift"]),
        ({1: 1, 3: 5, 4: 4, 5: 3}, ["restrict", "final-reversal"]),
        ({1: 1, 3: 5, 5: 3}, ["restrict", "same-parity"]),
        ({1: 1, 3: 5, 4: 6}, ["restrict", "double-gap", "double-gap"]),
    ])
    def test_rule_sequences(self, pairs, rules):
        """Test which case of the alignment each map goes through."""
        trace = factorize(from_pairs(pairs, 8))
        assert [s.rule for s in trace.steps] == rules
        _check_trace(trace)

    def test_seed_then_shift(self):
        """Test a reflected first block followed by a shift by two."""
        trace = factorize(from_pairs({1: 3, 2: 2, 3: 1, 5: 5}, 8))
        seed, shift = trace.steps[1:]
        assert format_word(seed.word) == "S1^3 S2"
        assert eval_word(seed.word, 8) == reflection(3, 8)
        assert eval_word(shift.word, 8) == alpha_ij_minus(4, 8, 8)
        assert trace.measures == [(2, 0, 0, 0, 0, 0), (1, 0, 0, 0, 2, 1), (0, 0, 0, 0, 0, 0)]

    def test_final_reversal(self):
        """Test that a block in place but reversed is turned by one gamma."""
        trace = factorize(from_pairs({1: 1, 3: 5, 4: 4, 5: 3}, 8))
        assert eval_word(trace.steps[-1].word, 8) == gamma_ij(2, 6, 8)
        assert trace.measures == [(1, 0, 0, 0, 0, 1), (0, 0, 0, 0, 0, 0)]

    def test_gathering_double_gaps(self):
        """Test that the gaps in front of a block are gathered one at a time."""
        trace = factorize(from_pairs({1: 1, 3: 5, 4: 6}, 8))
        first, second = trace.steps[1:]
        assert eval_word(first.word, 8) == gamma_ij(2, 6, 8)
        assert eval_word(second.word, 8) == gamma_ij(3, 7, 8)
        assert trace.measures == [(1, 2, 0, 0, 0, 0), (1, 1, 0, 0, 0, 0), (0, 0, 0, 0, 0, 0)]
        assert trace.beta_domains == [(1, 3, 4), (1, 3, 4)]

    def test_empty_map(self):
        """Test that the empty map is a restriction with nothing to align."""
        trace = factorize(PartialInjection(8, (0,) * 8))
        assert [s.rule for s in trace.steps] == ["restrict"]
        assert trace.measures == [(0, 0, 0, 0, 0, 0)]
        _check_trace(trace)

    def test_rules_used_on_ic6(self, icn6):
        """Test that IC_6 only needs the named cases."""
        used = {s.rule for a in icn6 for s in factorize(a).steps}
        assert used & set(ALIGNMENT_RULES)
        assert used <= OTHER_RULES | set(ALIGNMENT_RULES)


class TestReductions:
    """Tests for words of the derived families."""

    @pytest.mark.parametrize("family,indices,n,expected", [
        ("gamma", (4, 8), 8, "GN(4)"),
        ("gamma", (5, 1), 8, "G1(5)"),
        ("epsilon", (1,), 6, "E1"),
        ("epsilon", (8,), 8, "EN"),
        ("delta_o", (1,), 8, "DO(1)"),
        ("delta_e", (2,), 8, "DE(2)"),
    ])
    def test_catalog_letters(self, family, indices, n, expected):
        """Test that catalog members reduce to themselves."""
        assert format_word(reduce_to_A(family, *indices, n=n)) == expected

    def test_gamma_2_n(self):
        """Test gamma_{2,n} = eps_2 eps_n sigma2."""
        word = reduce_to_A("gamma", 2, 6, n=6)
        assert eval_word(word, 6) == gamma_ij(2, 6, 6)
        assert word.letters[-1] == (GeneratorSymbol("S2"), 1)

    @pytest.mark.parametrize("n", [6, 8])
    def test_all_gammas_evaluate(self, n):
        """Test every gamma_{i,j} word by evaluation."""
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i != j and (i - j) % 2 == 0:
                    assert eval_word(reduce_to_A("gamma", i, j, n=n), n) == gamma_ij(i, j, n)

    @pytest.mark.parametrize("family,indices", [
        ("gamma", (1, 2)),
        ("gamma", (3, 3)),
        ("alpha_minus", (1, 2)),
        ("zeta", (1,)),
    ])
    def test_rejects(self, family, indices):
        """Test unknown families and indices outside the formulas."""
        with pytest.raises(DomainError):
            reduce_to_A(family, *indices, n=8)

    def test_delta_kind_checked(self):
        """Test that only odd and even deltas exist."""
        with pytest.raises(DomainError):
            delta_word("x", 1, 8)

    def test_registry_collects_only_failures(self):
        """Test that correct formulas leave no deviation records."""
        clear_deviations()
        reduce_to_A("epsilon", 3, n=10)
        assert recorded_deviations() == []

    @pytest.mark.parametrize("i,k,n", [(2, 4, 6), (3, 1, 8), (4, 2, 10)])
    def test_alpha_shift_words_are_simplified(self, i, k, n):
        """Test that rotation powers next to each other are merged."""
        word = alpha_shift_word(i, k, n)
        tags = [sym.tag for sym, _ in word.letters]
        assert all(a != b for a, b in zip(tags, tags[1:])), format_word(word)
        assert eval_word(word, n) == alpha_shift(i, k, n)

    def test_alpha_shift_2_4_6(self):
        """Test the merged word for alpha_2^(4) on [6]."""
        assert format_word(alpha_shift_word(2, 4, 6)) == "S1^2 EN S1^2"


class TestOracle:
    """Tests for the shortest-word search and inverse words."""

    def test_shortest_word(self):
        """Test the closure word of sigma2."""
        assert format_word(factorize_bfs(sigma2(6))) == "S2"

    def test_powers_merged(self):
        """Test that repeated letters come back as one power."""
        word = factorize_bfs(power(sigma1(8), 2))
        assert format_word(word) == "S1^2"

    def test_not_generated(self):
        """Test a map outside the closure of a subset."""
        gens = {GeneratorSymbol("S1"): sigma1(6)}
        with pytest.raises(NotGeneratedError):
            factorize_bfs(sigma2(6), gens)

    def test_inverse_word_check(self):
        """Test inverse words of mixed letters."""
        assert inverse_word_check(parse_word("DO(1) S1 GN(4) H1", 8), 8)
        assert inverse_word_check(Word(), 8)
