from fractions import Fraction

import pytest

from eigraph import commation as cm
from eigraph.core import EIGraph, degree_profile, single_loop
from eigraph.covers import is_graph_cover, universal_ball, recognize_regular
from eigraph.modular import delta_of_path, ev_to_fraction, invariant_primes
from eigraph.moves import expand
from eigraph.rigidity import (
    INF,
    BadDegrees,
    BadPrimes,
    HypothesisFailed,
    SubgroupLabel,
    ZERO_LABEL,
    admissible,
    classify_quotients,
    cycle_cover_quotient,
    dec,
    g24_family,
    g24_loop,
    lift_rule,
    make_triangle,
    recolor_collapse,
    triangle_obstruction,
)

SPEC = make_triangle(11, 13, 17)


def test_make_triangle_shape():
    tri = SPEC.graph()
    assert degree_profile(tri) == {"v1": 13, "v2": 15, "v3": 19}
    assert SPEC.n == 2 * 11 * 13 * 17
    assert invariant_primes(tri) == frozenset({2, 11, 13, 17})
    assert ev_to_fraction(delta_of_path(tri, ["e1", "e2", "e3"])) == Fraction(8, 11 * 13 * 17)


def test_make_triangle_rejects_bad_primes():
    with pytest.raises(BadPrimes):
        make_triangle(11, 13, 15)
    with pytest.raises(BadPrimes):
        make_triangle(2, 13, 17)
    with pytest.raises(BadPrimes):
        make_triangle(11, 11, 17)


def test_lift_rule():
    lab = SubgroupLabel((3, 0, 2, INF))
    count, lifted = lift_rule(lab, 1, 11)  # q-coordinate is 0
    assert count == 1 and lifted == lab
    count, lifted = lift_rule(lab, 0, 2)  # 2-coordinate is 3
    assert count == 2 and lifted.coord(0) == 2
    count, lifted = lift_rule(lab, 3, 17)  # infinite coordinate
    assert count == 17 and lifted.coord(3) is INF


def test_dec_infinity():
    assert dec(INF) is INF
    assert dec(5) == 4


def test_cycle_cover_quotients_admissible():
    for m in (1, 2, 3):
        lq = cycle_cover_quotient(SPEC, m)
        assert admissible(lq).ok
        assert is_graph_cover(lq.projection())


def test_admissible_rejects_bad_labels():
    lq = cycle_cover_quotient(SPEC, 1)
    # an infinite 2-coordinate at one vertex, zero next door
    lq.vlabels["c0"] = SubgroupLabel((INF, 0, 0, 0))
    rep = admissible(lq)
    assert not rep.ok
    assert any(clause.startswith("combinatorics") for clause, _, _ in rep.violations)


def test_admissible_cycle_clause():
    lq = cycle_cover_quotient(SPEC, 1)
    # a finite nonzero prime label on a monotone cycle
    lq.vlabels["c0"] = SubgroupLabel((0, 1, 0, 0))
    rep = admissible(lq)
    assert not rep.ok
    assert any(clause == "cycle" for clause, _, _ in rep.violations)


def test_classify_small_budgets():
    res3 = classify_quotients(SPEC, 3)
    assert [lq.graph.n_vertices() for lq in res3] == [3]
    res6 = classify_quotients(SPEC, 6)
    assert [lq.graph.n_vertices() for lq in res6] == [3, 6]


def test_classify_twelve_past_cascade_bound():
    # at budget 12 the nonzero-prime sector opens up (the cascade bound for
    # p = 11 is exactly 12) and the backward-sourcing branch is live; the
    # answer is still just the cycle covers
    res = classify_quotients(SPEC, 12)
    assert [lq.graph.n_vertices() for lq in res] == [3, 6, 9, 12]
    assert all(lab == ZERO_LABEL for lq in res for lab in lq.vlabels.values())


def test_classify_nine():
    res = classify_quotients(SPEC, 9)
    assert [lq.graph.n_vertices() for lq in res] == [3, 6, 9]
    for lq in res:
        assert all(lab == ZERO_LABEL for lab in lq.vlabels.values())
        assert admissible(lq).ok
        assert is_graph_cover(lq.projection())
        # underlying graph is a single cycle
        assert all(len(lq.graph.out_edges(v)) == 2 for v in lq.graph.vertices)


def test_obstruction_holds_for_valid_primes():
    spec = make_triangle(11, 13, 19)
    proof = triangle_obstruction(spec, 2, max_vertices=12)
    assert proof.ok
    assert proof.ratio == Fraction(8, 27) and proof.contradiction
    assert proof.min_parts == {11: 3, 13: 3, 19: 3}
    assert proof.search_found == 0
    assert any("(2/3)^3" in line or "impossible" in line for line in proof.chain)


def test_obstruction_hypothesis_17():
    # 17 = 16 + 1 is a sum of two powers of two, so the N = 2 hypothesis
    # genuinely fails for (11, 13, 17)
    with pytest.raises(HypothesisFailed):
        triangle_obstruction(SPEC, 2)


def test_obstruction_hypothesis_smooth_bound():
    # with N = 17 all three primes are N-smooth themselves
    with pytest.raises(HypothesisFailed):
        triangle_obstruction(SPEC, 17)


def test_recolor_identity():
    ball = universal_ball(SPEC.graph(), "v1", 3)
    out = recolor_collapse(ball, SPEC)
    assert out is not None
    deep = [x for x in ball.interior() if ball.depth[x] <= ball.radius - 2]
    assert out.tree.n_vertices() == len(deep)  # every component is a singleton


def test_recolor_expanded_vertex():
    g, _ = expand(SPEC.graph(), "v1", 1, ["e3!"])
    ball = universal_ball(g, "v2", 4)
    out = recolor_collapse(ball, SPEC)
    assert out is not None
    assert out.tree.n_vertices() < ball.tree.n_vertices()


def test_recolor_rejects_corrupted():
    q, r, s = 11, 13, 17
    verts, edges = ["c"], []
    for i in range(2):
        verts.append("a%d" % i)
        edges.append(("e%d" % i, "c", "a%d" % i, 1, 1))
    verts.append("b")
    edges.append(("eb", "c", "b", 1, 1))
    for i in range(2):
        for j in range(q):
            verts.append("a%dx%d" % (i, j))
            edges.append(("f%dx%d" % (i, j), "a%d" % i, "a%dx%d" % (i, j), 1, 1))
    for j in range(s + 1):
        verts.append("bx%d" % j)
        edges.append(("fb%d" % j, "b", "bx%d" % j, 1, 1))
    g = EIGraph.from_edges(verts, edges)
    from eigraph.covers import TreeBall

    depth = {v: (0 if v == "c" else (1 if "x" not in v else 2)) for v in verts}
    ball = TreeBall(g, "c", 2, SPEC.graph(), {}, {}, depth)
    assert recolor_collapse(ball, SPEC) is None


def test_recolor_rejects_bad_degrees():
    ball = universal_ball(single_loop(2, 4), "v0", 2)
    with pytest.raises(BadDegrees):
        recolor_collapse(ball, SPEC)


def test_g24_family_degrees():
    for k in (0, 3):
        g, seq = g24_family(k)
        prof = degree_profile(g)
        base = max(prof, key=lambda v: (prof[v], v))
        ball = universal_ball(g, base, 2)
        assert recognize_regular(ball) == 2 ** k + 3


def test_g24_family_chain_replays():
    g, seq = g24_family(4)
    cur = seq.start
    assert cur == g24_loop()
    for rec, expected in seq.steps:
        cur, newrec = cm.apply_move(cur, rec.kind, rec.params)
        assert cur == expected
        assert newrec.arrow == rec.arrow
    assert cur == g
