"""Partial automorphisms of the crown poset: membership, generators, factorization and closure."""
