"""Shared corpus generators: seeded random small edge-indexed graphs."""

import random

from eigraph.core import EIGraph


def random_eigraph(seed, max_vertices=8, max_index=9):
    """Connected random graph: spanning tree plus a few extras (loops and
    parallel edges allowed), indices uniform in [1, max_index]."""
    rng = random.Random(seed)
    nv = rng.randint(1, max_vertices)
    verts = ["v%d" % i for i in range(nv)]
    edges = []
    eid = 0
    for i in range(1, nv):
        j = rng.randrange(i)
        edges.append(("e%d" % eid, verts[j], verts[i], rng.randint(1, max_index), rng.randint(1, max_index)))
        eid += 1
    for _ in range(rng.randint(0 if nv > 1 else 1, 3)):
        a = rng.choice(verts)
        b = rng.choice(verts)
        edges.append(("e%d" % eid, a, b, rng.randint(1, max_index), rng.randint(1, max_index)))
        eid += 1
    return EIGraph.from_edges(verts, edges)


def corpus(count, start_seed=0, **kw):
    return [random_eigraph(s, **kw) for s in range(start_seed, start_seed + count)]
