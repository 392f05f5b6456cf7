import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from kwising.generators import (
    CorpusConfig,
    grid_graph,
    random_corpus,
    random_planar_graph,
    random_rotation_system,
    torus_lattice,
)


@pytest.mark.parametrize("N", [1, 2, 3, 5])
def test_torus_lattice(N):
    m = torus_lattice(N)
    assert (m.n_vertices, m.n_edges, m.genus) == (N * N, 2 * N * N, 1)
    assert all(m.degree(v) == 4 for v in range(m.n_vertices))


def test_torus_lattice_weights():
    m = torus_lattice(2, "3/10")
    assert m.weight_variables() == []
    with pytest.raises(ValueError):
        torus_lattice(0)


def test_grid():
    m = grid_graph(3, 4)
    assert (m.n_vertices, m.n_edges, m.genus) == (12, 17, 0)
    assert m.coords is not None


@given(st.integers(0, 10 ** 6))
def test_random_planar_is_planar(seed):
    rng = random.Random(seed)
    m = random_planar_graph(rng, rng.randint(3, 8), rng.randint(2, 12))
    assert m.genus == 0


@given(st.integers(0, 10 ** 6))
def test_random_rotation_system_connected(seed):
    rng = random.Random(seed)
    V = rng.randint(1, 6)
    m = random_rotation_system(rng, V, rng.randint(V - 1, 9))
    assert len(m.components()) == 1 and m.n_vertices == V


def test_corpus_composition():
    corpus = random_corpus()
    assert len(corpus) == 52
    assert Counter(m.genus for m in corpus) == {0: 16, 1: 16, 2: 12, 3: 8}
    assert all(m.n_edges <= 8 and len(m.components()) == 1 for m in corpus)


def test_corpus_is_reproducible():
    cfg = CorpusConfig(seed=5, genus_counts=(2, 2))
    a, b = random_corpus(cfg), random_corpus(cfg)
    assert [m.rotations for m in a] == [m.rotations for m in b]
