import pytest

from conftest import corpus, random_eigraph
from eigraph import covers
from eigraph.core import (
    EIGraph,
    SizeExceeded,
    check_iso,
    degree_profile,
    dumps,
    from_obj,
    isomorphic,
    loads,
    single_loop,
    to_obj,
    validate,
)
from eigraph.rigidity import g24_family, make_triangle


def test_validate_loop24():
    assert validate(single_loop(2, 4)).ok


def test_validate_zero_index():
    g = EIGraph.from_edges(["u", "v"], [("e", "u", "v", 0, 3)])
    rep = validate(g)
    assert any("index must be >= 1" in v for v in rep.violations)


def test_validate_disconnected():
    g = EIGraph.from_edges(["u", "v", "x", "y"], [("e", "u", "v", 1, 1), ("f", "x", "y", 1, 1)])
    rep = validate(g)
    assert any("connected" in v for v in rep.violations)


def test_degree_profile_loop24():
    assert degree_profile(single_loop(2, 4)) == {"v0": 6}


def test_degree_profile_g24_family():
    for k in (0, 2, 4):
        g, _ = g24_family(k)
        prof = degree_profile(g)
        assert sorted(prof.values()) == [2, 2 ** k + 3]


def test_degree_profile_matches_ball_degree():
    # the profile value is the degree of any universal-cover vertex above v
    tri = make_triangle(11, 13, 17).graph()
    prof = degree_profile(tri)
    for v in tri.vertices:
        ball = covers.universal_ball(tri, v, 2)
        assert ball.ball_degree(ball.base) == prof[v]
    assert sorted(prof.values()) == [13, 15, 19]


def test_interchange_round_trip():
    for g in corpus(20):
        assert from_obj(to_obj(g)) == g
        assert loads(dumps(g)) == g


def test_interchange_decimal_strings():
    g = single_loop(2, 2 ** 80)
    obj = to_obj(g)
    assert obj["edges"][0]["idx_at_to"] == str(2 ** 80)
    assert from_obj(obj).index("l0!") == 2 ** 80


def test_isomorphic_relabelled():
    g = random_eigraph(7)
    obj = to_obj(g)
    obj["vertices"] = ["X" + v for v in obj["vertices"]]
    for rec in obj["edges"]:
        rec["from"], rec["to"] = "X" + rec["from"], "X" + rec["to"]
        rec["id"] = "Y" + rec["id"]
    h = from_obj(obj)
    w = isomorphic(g, h)
    assert w is not None
    assert not check_iso(g, h, w)


def test_isomorphic_loop_swap():
    # the unordered pair {2,4} can be matched after swapping the directed pair
    g = single_loop(2, 4)
    h = single_loop(4, 2)
    assert isomorphic(g, h) is not None


def test_isomorphic_triangle_permutations():
    tri = make_triangle(11, 13, 17).graph()
    # exhaustive search over all vertex bijections: a transposition breaks
    # the coherent orientation, a rotation preserves it
    assert isomorphic(tri, make_triangle(13, 11, 17).graph()) is None
    assert isomorphic(tri, make_triangle(13, 17, 11).graph()) is not None


def test_isomorphic_size_cap():
    big = EIGraph.from_edges(
        ["v%d" % i for i in range(13)],
        [("e%d" % i, "v%d" % i, "v%d" % (i + 1), 1, 1) for i in range(12)],
    )
    with pytest.raises(SizeExceeded):
        isomorphic(big, big)


def test_isomorphic_is_equivalence_on_corpus():
    graphs = corpus(12)
    for g in graphs:
        w = isomorphic(g, g)
        assert w is not None  # reflexive
    g, h = graphs[0], graphs[1]
    w = isomorphic(g, h)
    if w is not None:
        # symmetric: the inverse maps witness h -> g
        from eigraph.core import IsoWitness

        inv = IsoWitness({b: a for a, b in w.vmap.items()}, {b: a for a, b in w.emap.items()})
        assert not check_iso(h, g, inv)


def test_geometric_view():
    from eigraph.core import geometric_view

    g = single_loop(2, 4)
    (view,) = geometric_view(g)
    assert view.is_loop and view.indices == (2, 4) and view.inverse == "l0!"


def test_degree_profile_positive_on_corpus():
    for g in corpus(30):
        if g.edges:
            assert all(d >= 1 for d in degree_profile(g).values())


def test_isomorphic_transitive():
    g = random_eigraph(11)

    def relabel(h, tag):
        obj = to_obj(h)
        obj["vertices"] = [tag + v for v in obj["vertices"]]
        for rec in obj["edges"]:
            rec["from"], rec["to"] = tag + rec["from"], tag + rec["to"]
            rec["id"] = tag + rec["id"]
        return from_obj(obj)

    h, k = relabel(g, "A"), relabel(g, "B")
    w1, w2 = isomorphic(g, h), isomorphic(h, k)
    assert w1 is not None and w2 is not None
    from eigraph.core import IsoWitness

    composed = IsoWitness(
        {a: w2.vmap[b] for a, b in w1.vmap.items()},
        {a: w2.emap[b] for a, b in w1.emap.items()},
    )
    assert not check_iso(g, k, composed)


def test_degree_profile_iso_invariant():
    for g in corpus(10):
        obj = to_obj(g)
        obj["vertices"] = ["z" + v for v in obj["vertices"]]
        for rec in obj["edges"]:
            rec["from"], rec["to"] = "z" + rec["from"], "z" + rec["to"]
        h = from_obj(obj)
        w = isomorphic(g, h)
        assert w is not None
        pg, ph = degree_profile(g), degree_profile(h)
        assert all(pg[v] == ph[w.vmap[v]] for v in g.vertices)
