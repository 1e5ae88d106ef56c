import random

import pytest

from profilematch import Instance


def make_instance(edges, na, nb, bounds):
    """Instance from a {(a, b): utility-tuple} dict, edges sorted."""
    keys = sorted(edges)
    return Instance(na, nb, bounds, keys, [list(edges[k]) for k in keys])


def random_instance(rng: random.Random, max_side=4, max_r=3, max_u=2,
                    min_side=1) -> Instance:
    """Small random instance; at least one edge, bounds at least 1."""
    na = rng.randint(min_side, max_side)
    nb = rng.randint(min_side, max_side)
    r = rng.randint(1, max_r)
    bounds = tuple(rng.randint(1, max_u) for _ in range(r))
    density = rng.uniform(0.2, 1.0)
    edges, utils = [], []
    for a in range(na):
        for b in range(nb):
            if rng.random() < density:
                edges.append((a, b))
                utils.append([rng.randint(0, u) for u in bounds])
    if not edges:
        edges, utils = [(0, 0)], [[rng.randint(0, u) for u in bounds]]
    return Instance(na, nb, bounds, edges, utils)


@pytest.fixture
def rng():
    return random.Random(0)
