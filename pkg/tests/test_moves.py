import pytest

from conftest import corpus
from eigraph import covers
from eigraph.core import EIGraph, isomorphic, single_loop
from eigraph.modular import invariant_primes
from eigraph.moves import (
    INTO_RESULT,
    INTO_SOURCE,
    ISOMORPHISM,
    NonDivisibleIndex,
    NotCollapsible,
    IndexTooSmall,
    PartitionMismatch,
    SlidePreconditionFailed,
    canonical_expand_spec,
    collapse,
    essentialize,
    expand,
    general_blow_up,
    is_minimal,
    minimalize,
    slide,
    standard_blow_up,
    subdivide,
)
from eigraph.rigidity import g24_family


def spoked(n):
    """Two hubs joined by a (1, n) edge, with spokes a, c at the origin hub
    and b, d at the terminus hub."""
    return EIGraph.from_edges(
        ["x", "y", "pa", "pb", "pc", "pd"],
        [
            ("e", "x", "y", 1, n),
            ("a", "x", "pa", 3, 1),
            ("c", "x", "pc", 5, 1),
            ("b", "y", "pb", 7, 1),
            ("d", "y", "pd", 2, 1),
        ],
    )


def test_collapse_multiplies_origin_side():
    g = spoked(6)
    h, rec = collapse(g, "e")
    assert rec.arrow == INTO_RESULT
    assert h.index("a") == 18 and h.index("c") == 30  # multiplied by i(e!) = 6
    assert h.index("b") == 7 and h.index("d") == 2  # untouched
    assert "x" not in h.vertices and h.origin("a") == "y"


def test_collapse_trivial_is_isomorphism():
    g = spoked(1)
    h, rec = collapse(g, "e")
    assert rec.arrow == ISOMORPHISM
    assert h.index("a") == 3 and h.index("c") == 5


def test_collapse_preconditions():
    g = single_loop(1, 4)
    with pytest.raises(NotCollapsible):
        collapse(g, "l0")  # loop
    h = EIGraph.from_edges(["u", "v"], [("e", "u", "v", 2, 3)])
    with pytest.raises(NotCollapsible):
        collapse(h, "e")  # index != 1


def test_g24_chain_collapses():
    # the middle graph of each rung collapses both ways: trivially back, and
    # across the (1,2) edge one rung up the ladder
    a0, _ = g24_family(0)
    a1, _ = g24_family(1)
    _, seq1 = g24_family(1)
    b0 = seq1.steps[1][1]  # the three-vertex middle graph
    down, rec = collapse(b0, "x1")  # (1,1) edge
    assert rec.arrow == ISOMORPHISM
    assert isomorphic(down, a0) is not None
    up, rec = collapse(b0, "l0")  # index-1 direction of the (1,2) edge
    assert rec.arrow == INTO_RESULT
    assert isomorphic(up, a1) is not None


def test_expand_loop24_gives_ladder_start():
    g = single_loop(2, 4)
    h, rec = expand(g, "v0", 2, ["l0", "l0!"])
    a0, _ = g24_family(0)
    assert isomorphic(h, a0) is not None
    assert rec.arrow == INTO_SOURCE


def test_expand_divisor_one_is_isomorphism():
    g = spoked(3)
    h, rec = expand(g, "x", 1, ["a"])
    assert rec.arrow == ISOMORPHISM
    back, rec2 = collapse(h, rec.params["new_edge"] + "!")
    assert back == g and rec2.arrow == ISOMORPHISM


def test_expand_rejects_nondivisible():
    g = spoked(3)
    with pytest.raises(NonDivisibleIndex):
        expand(g, "x", 2, ["a"])  # index 3 not divisible by 2


def test_expand_collapse_exact_round_trip():
    for g in corpus(30):
        for v in g.vertices:
            movable = [f for f in g.out_edges(v) if g.index(f) % 2 == 0]
            if not movable:
                continue
            h, rec = expand(g, v, 2, movable[:1])
            back, _ = collapse(h, rec.params["new_edge"] + "!")
            assert back == g
            break


def test_collapse_expand_round_trip_on_corpus():
    seen = 0
    for g in corpus(60):
        for e in g.edges:
            if g.index(e) == 1 and not g.is_loop(e):
                vertex, divisor, moved, new_v, new_e = canonical_expand_spec(g, e)
                h, _ = collapse(g, e)
                restored, _ = expand(h, vertex, divisor, moved, new_vertex=new_v, new_edge=new_e)
                assert isomorphic(restored, g) is not None
                seen += 1
                break
    assert seen >= 10


def test_slide_figure():
    # f with index k at alpha(e), e = (1,n): afterwards f sits at omega(e)
    # with index k*n
    g = EIGraph.from_edges(
        ["u", "v", "x"], [("e", "u", "v", 1, 3), ("f", "u", "x", 5, 7)]
    )
    h, rec = slide(g, "f", "e")
    assert h.origin("f") == "v" and h.index("f") == 15
    assert rec.arrow == INTO_RESULT


def test_slide_trivial():
    g = EIGraph.from_edges(["u", "v", "x"], [("e", "u", "v", 1, 1), ("f", "u", "x", 5, 7)])
    h, rec = slide(g, "f", "e")
    assert h.index("f") == 5 and h.origin("f") == "v"
    assert rec.arrow == ISOMORPHISM


def test_slide_sum_bookkeeping():
    for g in corpus(40):
        done = False
        for e in g.edges:
            if g.index(e) != 1 or done:
                continue
            for f in g.out_edges(g.origin(e)):
                if f in (e, g.inverse(e)):
                    continue
                h, _ = slide(g, f, e)
                assert h.index_sum() == g.index_sum() + g.index(f) * (g.index(g.inverse(e)) - 1)
                done = True
                break


def test_slide_is_expand_then_collapse():
    g = EIGraph.from_edges(["u", "v", "x"], [("e", "u", "v", 1, 3), ("f", "u", "x", 5, 7)])
    slid, _ = slide(g, "f", "e")
    # the divisor-1 expansion moves f and the near end of e onto a midpoint
    # (an isomorphism); collapsing e across then lands the slid graph
    w, rec = expand(g, "u", 1, ["f", "e"], new_vertex="t", new_edge="d")
    assert rec.arrow == ISOMORPHISM
    out, _ = collapse(w, "e")
    assert isomorphic(out, slid) is not None


def test_slide_preconditions():
    g = EIGraph.from_edges(["u", "v"], [("e", "u", "v", 1, 3)])
    with pytest.raises(SlidePreconditionFailed):
        slide(g, "e", "e")
    g2 = EIGraph.from_edges(["u", "v", "x"], [("e", "u", "v", 2, 3), ("f", "u", "x", 5, 7)])
    with pytest.raises(SlidePreconditionFailed):
        slide(g2, "f", "e")


def test_standard_blow_up_23():
    g = EIGraph.from_edges(["u", "v"], [("e", "u", "v", 2, 3)])
    h, rec = standard_blow_up(g, "e")
    pairs = sorted((h.index(a), h.index(b)) for a, b in h.geometric_edges())
    assert pairs == [(1, 1), (1, 2)]
    assert covers.check(rec.witness).ok
    assert rec.arrow == INTO_SOURCE


def test_standard_blow_up_22_boundary():
    g = EIGraph.from_edges(["u", "v"], [("e", "u", "v", 2, 2)])
    h, _ = standard_blow_up(g, "e")
    pairs = sorted((h.index(a), h.index(b)) for a, b in h.geometric_edges())
    assert pairs == [(1, 1), (1, 1)]


def test_blow_up_preserves_index_sum():
    checked = 0
    for g in corpus(100):
        for e, ebar in g.geometric_edges():
            if g.index(e) >= 2 and g.index(ebar) >= 2:
                h, rec = standard_blow_up(g, e)
                assert h.index_sum() == g.index_sum()
                assert h.n_vertices() == g.n_vertices()
                assert covers.check(rec.witness).ok
                checked += 1
                break
    assert checked >= 30


def test_standard_blow_up_rejects_small():
    g = EIGraph.from_edges(["u", "v"], [("e", "u", "v", 1, 3)])
    with pytest.raises(IndexTooSmall):
        standard_blow_up(g, "e")


def test_general_blow_up():
    g = single_loop(4, 4)
    h, rec = general_blow_up(g, "l0", [(1, 1), (1, 1), (2, 2)])
    assert h.index_sum() == g.index_sum()
    assert covers.check(rec.witness).ok
    with pytest.raises(PartitionMismatch):
        general_blow_up(g, "l0", [(1, 1), (1, 1), (3, 2)])
    with pytest.raises(PartitionMismatch):
        # three positive parts cannot sum to 2 on the short side
        general_blow_up(EIGraph.from_edges(["u", "v"], [("e", "u", "v", 11, 2)]), "e", [(1, 1), (1, 1), (9, 0)])


def test_general_blow_up_single_part_identity():
    g = single_loop(3, 5)
    h, _ = general_blow_up(g, "l0", [(3, 5)])
    assert isomorphic(h, g) is not None


def test_subdivide_loop24():
    g = single_loop(2, 4)
    h, rec = subdivide(g, "l0")
    # bigon: the old endpoint keeps the 2 and 4 ends, the midpoint gets 1s
    mid = rec.params["new_vertex"]
    assert sorted(h.index(e) for e in h.out_edges("v0")) == [2, 4]
    assert sorted(h.index(e) for e in h.out_edges(mid)) == [1, 1]
    assert not any(h.is_loop(e) for e in h.edges)
    back, _ = collapse(h, rec.params["new_edge"] + "!")
    assert back == g


def test_subdivide_trivial_edge():
    g = EIGraph.from_edges(["u", "v"], [("e", "u", "v", 1, 1)])
    h, _ = subdivide(g, "e")
    pairs = sorted((h.index(a), h.index(b)) for a, b in h.geometric_edges())
    assert pairs == [(1, 1), (1, 1)]


def test_subdivide_preserves_essential_degrees():
    g = single_loop(2, 4)
    h, _ = subdivide(g, "l0")
    b1 = covers.universal_ball(g, "v0", 2)
    base = h.origin("l0")
    b2 = covers.universal_ball(h, base, 3)
    assert covers.recognize_regular(b1) == covers.recognize_regular(b2) == 6


def _contracted_shape(ball, contracted, cap):
    # quotient the ball by the lifts of the contracted directed edges, then
    # encode as an unlabeled rooted tree truncated at the cap
    tree = ball.tree
    parent = {v: v for v in tree.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    adj = {}
    for f, _ in tree.geometric_edges():
        if ball.emap[f] in contracted:
            parent[find(tree.origin(f))] = find(tree.terminus(f))
    for f, _ in tree.geometric_edges():
        if ball.emap[f] in contracted:
            continue
        a, b = find(tree.origin(f)), find(tree.terminus(f))
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)

    def enc(v, par, d):
        if d == cap:
            return "*"
        return "(" + "".join(sorted(enc(w, v, d + 1) for w in adj.get(v, []) if w != par)) + ")"

    return enc(find(ball.base), None, 0)


def _plain_shape(ball, cap):
    tree = ball.tree

    def enc(v, par, d):
        if d == cap:
            return "*"
        kids = sorted(enc(tree.terminus(f), v, d + 1) for f in tree.out_edges(v) if tree.terminus(f) != par)
        return "(" + "".join(kids) + ")"

    return enc(ball.base, None, 0)


def test_trivial_collapse_contracts_cover():
    # collapsing a (1,1) edge contracts each lifted copy of {e, e!} in the
    # universal cover: the quotiented source ball is the target ball.
    # A quotient path of length L crosses at most L+1 contracted lifts, so
    # a source radius of 2L+1 determines the quotient out to radius L.
    instances = [
        ([("e", "x", "y", 1, 1), ("a", "x", "x", 2, 3), ("b", "y", "y", 1, 4)], "y"),
        ([("e", "x", "y", 1, 1), ("a", "x", "z", 2, 3), ("b", "y", "z", 2, 2)], "y"),
    ]
    for edges, base in instances:
        verts = sorted({u for _, u, v, _, _ in edges} | {v for _, u, v, _, _ in edges})
        g = EIGraph.from_edges(verts, edges)
        h, rec = collapse(g, "e")
        assert rec.arrow == ISOMORPHISM
        src = covers.universal_ball(g, base, 5)
        dst = covers.universal_ball(h, base, 2)
        assert _contracted_shape(src, {"e", "e!"}, 2) == _plain_shape(dst, 2)


def test_minimalize_removes_hair():
    for g in corpus(20):
        verts = list(g.vertices) + ["hair"]
        edges = [(e, g.origin(e), g.terminus(e), g.index(e), g.index(e + "!")) for e, _ in g.geometric_edges()]
        edges.append(("hf", "hair", g.vertices[0], 1, 5))
        hairy = EIGraph.from_edges(verts, edges)
        red, seq = minimalize(hairy)
        if is_minimal(g):
            assert isomorphic(red, g) is not None
            assert len(seq) == 1


def test_minimalize_confluent_hair_order():
    g = EIGraph.from_edges(
        ["a", "b", "c"], [("e", "a", "b", 1, 5), ("f", "c", "b", 1, 7), ("l", "b", "b", 2, 3)]
    )
    # both hair-removal orders end at the same loop
    h1, _ = collapse(g, "e")
    h1, _ = collapse(h1, "f")
    h2, _ = collapse(g, "f")
    h2, _ = collapse(h2, "e")
    assert isomorphic(h1, h2) is not None
    red, _ = minimalize(g)
    assert isomorphic(red, h1) is not None


def test_minimalize_degenerate_single_edge():
    g = EIGraph.from_edges(["u", "v"], [("e", "u", "v", 1, 1)])
    red, seq = minimalize(g)
    assert seq.degenerate
    assert red.n_vertices() == 1 and not red.edges


def test_essentialize_ladder_middle():
    # un-subdividing the middle graph of rung k climbs to rung k+1
    _, seq = g24_family(2)
    b1 = seq.steps[3][1]  # middle graph of the second rung
    a2, _ = g24_family(2)
    ess, _ = essentialize(b1)
    assert isomorphic(ess, a2) is not None


def test_essentialize_idempotent():
    for g in corpus(40):
        e1, _ = essentialize(g)
        e2, seq = essentialize(e1)
        assert e2 == e1 and len(seq) == 0


def test_prime_set_invariance_under_minimal_collapse():
    # minimal-to-minimal collapses do not change the set of invariant primes
    checked = 0
    for g in corpus(200):
        if not is_minimal(g):
            continue
        for e in g.edges:
            if g.index(e) == 1 and not g.is_loop(e):
                h, _ = collapse(g, e)
                if is_minimal(h):
                    assert invariant_primes(h) == invariant_primes(g)
                    checked += 1
                break
    assert checked >= 5
