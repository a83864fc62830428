"""Tests package for crown-automorphisms."""
