import random
from pathlib import Path

import pytest
from hypothesis import settings

from kwising.combmap import CombMap
from kwising.generators import random_rotation_system

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

MAPS = Path(__file__).resolve().parent.parent / "maps"


def fig8_planar():
    return CombMap([[0, 1, 2, 3]])


def fig8_torus():
    return CombMap([[0, 2, 1, 3]])


def genus2_rose():
    # rotation a b a' b' c d c' d'
    return CombMap([[0, 2, 1, 3, 4, 6, 5, 7]])


def triangle(weights=None):
    # vertices 0,1,2; edges 01, 12, 20
    return CombMap([[0, 5], [2, 1], [4, 3]], weights)


def k4(weight="x"):
    # planar K4: centre 0 joined to 1,2,3 on the outer triangle
    rot = [[0, 2, 4], [1, 10, 6], [3, 7, 8], [5, 9, 11]]
    return CombMap(rot, [weight] * 6)


def path_graph(n):
    rot = [[] for _ in range(n)]
    for k in range(n - 1):
        rot[k].append(2 * k)
        rot[k + 1].insert(0, 2 * k + 1)
    return CombMap(rot)


def small_random_map(seed, max_edges=6):
    rng = random.Random(seed)
    E = rng.randint(1, max_edges)
    V = rng.randint(1, E + 1)
    return random_rotation_system(rng, V, E)


@pytest.fixture
def maps_dir():
    return MAPS
