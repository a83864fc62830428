"""Tests for the closure module."""

import os

import pytest

from icn.closure import (
    brute_force_icn,
    close,
    irredundancy,
    prg3_conditions,
    rank_census,
    rank_search_small,
    verify_generating,
)
from icn.core import CapExceededError, DomainError, compose_all, identity, power
from icn.crown import is_member, u_set
from icn.generators import GeneratorSymbol, generator_catalog, sigma1, sigma2


def _images(elements) -> set:
    return {a.images for a in elements}


class TestClose:
    """Tests for the semigroup closure."""

    def test_cyclic_group(self):
        """Test the closure of one rotation."""
        result = close([sigma1(8)])
        assert _images(result.elements.values()) == _images(power(sigma1(8), k) for k in range(4))
        assert len(result) == 4

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_catalog_generates_icn(self, n, icn2, icn4, icn6):
        """Test close(G(n)) against the brute-force IC_n."""
        oracle = {2: icn2, 4: icn4, 6: icn6}[n]
        result = close(generator_catalog(n).g)
        assert set(result.elements) == _images(oracle)

    @pytest.mark.parametrize("n", [
        6,
        pytest.param(8, marks=pytest.mark.slow),
    ])
    def test_threads_do_not_change_result(self, n):
        """Test that parallel frontier expansion gives identical output."""
        gens = generator_catalog(n).g
        one = close(gens, threads=1)
        for threads in (2, os.cpu_count() or 1):
            many = close(gens, threads=threads)
            assert list(one.elements) == list(many.elements)
            assert one.parents == many.parents
            assert one.stats["frontier_sizes"] == many.stats["frontier_sizes"]

    def test_word_indices_rebuild_elements(self):
        """Test that the parent tree spells a word for every element."""
        gens = generator_catalog(4).g
        result = close(gens)
        maps = list(gens.values())
        for a in result.elements.values():
            word = result.word_indices(a)
            assert compose_all((maps[i] for i in word), 4) == a

    def test_closure_is_idempotent(self):
        """Test that closing a closed set adds nothing."""
        first = close(generator_catalog(4).g)
        again = close(list(first.elements.values()))
        assert set(again.elements) == set(first.elements)

    def test_labels(self):
        """Test that labels follow the generator mapping."""
        result = close(generator_catalog(4).g)
        assert result.labels[0] == GeneratorSymbol("S1")
        assert close([sigma1(4)]).labels == [0]

    def test_contains_and_missing_word(self):
        """Test membership of the closure and words for absent maps."""
        result = close([sigma1(6)])
        assert result.contains(identity(6))
        assert not result.contains(sigma2(6))
        with pytest.raises(DomainError):
            result.word_indices(sigma2(6))

    @pytest.mark.parametrize("gens", [[], {}])
    def test_empty_generator_set(self, gens):
        """Test that no generators close to the empty set."""
        result = close(gens)
        assert len(result) == 0
        assert result.n is None
        assert result.census == {}
        assert result.stats["frontier_sizes"] == []

    def test_empty_generator_set_with_n(self):
        """Test that an explicit n is kept on the empty closure."""
        result = close([], n=6)
        assert result.n == 6
        assert not result.contains(identity(6))

    def test_rejects_mixed(self):
        """Test generator list checks."""
        with pytest.raises(DomainError):
            close([sigma1(4), sigma1(6)])
        with pytest.raises(DomainError):
            close([sigma1(4)], n=6)

    def test_cap(self):
        """Test the closure size cap."""
        with pytest.raises(CapExceededError):
            close([sigma1(12)])

    def test_census(self, icn4):
        """Test the rank census of IC_4."""
        result = close(generator_catalog(4).g)
        census = result.census
        assert census[4] == 4
        assert sum(census.values()) == len(icn4)
        frame = rank_census(icn4)
        assert list(frame.columns) == ["rank", "count"]
        assert frame["count"].sum() == len(icn4)

    @pytest.mark.slow
    def test_census_n8(self, catalog8):
        """Test that G(8) generates exactly the eight permutations of IC_8."""
        assert close(catalog8.g).census[8] == 8


class TestBruteForce:
    """Tests for IC_n by filtering."""

    def test_ic2(self, icn2):
        """Test |IC_2| = 6."""
        assert len(icn2) == 6

    def test_cap(self):
        """Test that the brute force refuses large n."""
        with pytest.raises(CapExceededError):
            brute_force_icn(10)

    def test_contains_u(self, icn6):
        """Test that U lies in IC_6."""
        assert set(u_set(6)) <= icn6


class TestGenerationChecks:
    """Tests for generation, irredundancy and the minimal rank at n = 2."""

    @pytest.mark.parametrize("n", [
        4,
        6,
        pytest.param(8, marks=pytest.mark.slow),
    ])
    def test_verify_generating(self, n):
        """Test that the generation report finds no difference."""
        report = verify_generating(n)
        assert report.equal
        assert report.generated == report.expected
        assert report.to_json()["equal"] is True

    def test_irredundant_at_4(self):
        """Test that removing any generator of G(4) loses something."""
        entries = irredundancy(4)
        assert len(entries) == 8
        assert all(e.proper for e in entries)
        by_symbol = {e.symbol: e for e in entries}
        assert by_symbol["S2"].witness == sigma2(4)
        assert by_symbol["H2"].witness in u_set(4) + u_set(4, dual=True)

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [6, 8])
    def test_irredundant(self, n):
        """Test that every generator of G(n) is needed."""
        entries = irredundancy(n)
        assert [e.symbol for e in entries] == [str(s) for s in generator_catalog(n).g]
        assert all(e.proper for e in entries)
        assert all(e.witness is not None for e in entries)

    def test_minimal_rank_n2(self):
        """Test that IC_2 needs exactly three generators."""
        assert rank_search_small(2) == 3

    def test_minimal_rank_only_n2(self):
        """Test that the subset search is refused elsewhere."""
        with pytest.raises(DomainError):
            rank_search_small(4)


class TestLowerBoundConditions:
    """Tests for the per-rank counts of generating sets."""

    @pytest.mark.parametrize("n", [4, 6])
    def test_catalog_meets_bounds(self, n):
        """Test G(n) against all five conditions, with generation verified."""
        report = prg3_conditions(generator_catalog(n).g)
        assert report.generates is True
        assert report.passed
        assert [c.name for c in report.conditions] == ["a", "b", "c", "d", "e"]

    def test_catalog_meets_bounds_n8(self, catalog8):
        """Test G(8) against the five conditions."""
        report = prg3_conditions(catalog8.g, verify=False)
        assert report.generates is None
        assert report.passed
        c = {cond.name: cond for cond in report.conditions}
        assert c["c"].count == 2
        assert c["d"].count == 4
        assert c["a"].detail["reversing"] == 1

    def test_missing_eta(self, catalog8):
        """Test that dropping H1 fails the U-dual condition only."""
        gens = {s: g for s, g in catalog8.g.items() if s != GeneratorSymbol("H1")}
        report = prg3_conditions(gens, verify=False)
        failed = [c.name for c in report.conditions if not c.passed]
        assert failed == ["e"]
        assert report.to_json()["passed"] is False

    def test_missing_reflection(self):
        """Test that rotations alone fail the permutation condition."""
        gens = {s: g for s, g in generator_catalog(6).g.items() if s != GeneratorSymbol("S2")}
        report = prg3_conditions(gens)
        assert report.generates is False
        assert not report.conditions[0].passed

    def test_frame(self):
        """Test the tabular form."""
        frame = prg3_conditions(generator_catalog(4).g, verify=False).frame()
        assert list(frame["name"]) == ["a", "b", "c", "d", "e"]
        assert "detail" not in frame.columns

    def test_all_generators_are_members(self, catalog8):
        """Test membership of the catalog used above."""
        assert all(is_member(g) for g in catalog8.g.values())
