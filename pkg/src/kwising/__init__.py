"""Exact Ising partition functions on graphs embedded in orientable surfaces."""
