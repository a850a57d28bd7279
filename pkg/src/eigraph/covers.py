"""Covering maps of edge-indexed graphs.

A covering map p : (A,i) -> (B,j) is a surjective graph morphism such that
for every vertex v of A and every edge e of B starting at p(v), the indices
of the lifts of e at v sum to j(e).  Graph covers are the special case where
p is bijective on every vertex star and preserves indices edgewise.

The universal cover of a connected (A,i) is the unique tree with trivial
indexing covering it: above any vertex there are exactly i(e) lifts of each
outgoing edge e.  It is only ever materialized as a finite-radius ball with
an explicit boundary, which is enough for every local check in this package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .core import EIGraph, inverse_id

BALL_BUDGET = 10 ** 6


class TreeInput(Exception):
    """Cyclic covers need a cycle to unroll."""


class BallTooLarge(Exception):
    pass


class CoveringMap:
    """Vertex/edge maps between two edge-indexed graphs, immutable by convention."""

    __slots__ = ("domain", "codomain", "vmap", "emap")

    def __init__(self, domain: EIGraph, codomain: EIGraph, vmap: Dict[str, str], emap: Dict[str, str]):
        self.domain = domain
        self.codomain = codomain
        self.vmap = dict(vmap)
        self.emap = dict(emap)

    def v(self, x: str) -> str:
        return self.vmap[x]

    def e(self, x: str) -> str:
        return self.emap[x]

    def to_obj(self):
        from . import core

        return {
            "domain": core.to_obj(self.domain),
            "codomain": core.to_obj(self.codomain),
            "vmap": dict(sorted(self.vmap.items())),
            "emap": dict(sorted(self.emap.items())),
        }

    @classmethod
    def from_obj(cls, obj):
        from . import core

        return cls(
            core.from_obj(obj["domain"]),
            core.from_obj(obj["codomain"]),
            dict(obj["vmap"]),
            dict(obj["emap"]),
        )


def identity_cover(g: EIGraph) -> CoveringMap:
    return CoveringMap(g, g, {v: v for v in g.vertices}, {e: e for e in g.edges})


@dataclass
class VerificationReport:
    violations: List[Tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, where: str, what: str):
        self.violations.append((where, what))


def check(p: CoveringMap) -> VerificationReport:
    """Verify the graph-morphism and index-sum conditions, listing violations."""
    rep = VerificationReport()
    A, B = p.domain, p.codomain
    for x in A.vertices:
        if p.vmap.get(x) not in B.vertices:
            rep.add("vertex %s" % x, "unmapped or mapped outside codomain")
    for e in A.edges:
        img = p.emap.get(e)
        if img is None or not B.has_edge(img):
            rep.add("edge %s" % e, "unmapped or mapped outside codomain")
            continue
        if B.origin(img) != p.vmap.get(A.origin(e)):
            rep.add("edge %s" % e, "does not commute with origin")
        if p.emap.get(inverse_id(e)) != inverse_id(img):
            rep.add("edge %s" % e, "does not commute with inversion")
    if rep.violations:
        return rep
    if set(p.vmap.values()) != set(B.vertices):
        rep.add("vertex map", "not surjective")
    if set(p.emap.values()) != set(B.edges):
        rep.add("edge map", "not surjective")
    # index-sum condition at every (vertex of A, edge of B) pair
    for x in A.vertices:
        v = p.vmap[x]
        for e in B.edges:
            if B.origin(e) != v:
                continue
            s = sum(A.index(f) for f in A.out_edges(x) if p.emap[f] == e)
            if s != B.index(e):
                rep.add("(%s, %s)" % (x, e), "lift indices sum to %d, expected %d" % (s, B.index(e)))
    return rep


def compose(outer: CoveringMap, inner: CoveringMap) -> CoveringMap:
    """outer o inner : inner.domain -> outer.codomain."""
    if inner.codomain != outer.domain:
        raise ValueError("covering maps do not compose")
    return CoveringMap(
        inner.domain,
        outer.codomain,
        {x: outer.vmap[inner.vmap[x]] for x in inner.vmap},
        {x: outer.emap[inner.emap[x]] for x in inner.emap},
    )


def is_graph_cover(p: CoveringMap) -> bool:
    """True iff p is bijective on each vertex star and preserves indices edgewise."""
    if not check(p).ok:
        return False
    A, B = p.domain, p.codomain
    for e in A.edges:
        if A.index(e) != B.index(p.emap[e]):
            return False
    for x in A.vertices:
        star = [p.emap[f] for f in A.out_edges(x)]
        if sorted(star) != sorted(B.out_edges(p.vmap[x])):
            return False
    return True


# -- finite cyclic covers ----------------------------------------------------


def spanning_tree(g: EIGraph) -> List[str]:
    """Geometric edge ids of the lexicographic BFS spanning tree."""
    root = g.vertices[0]
    seen = {root}
    tree = []
    frontier = [root]
    while frontier:
        nxt = []
        for v in sorted(frontier):
            for e in g.out_edges(v):
                w = g.terminus(e)
                if w not in seen:
                    seen.add(w)
                    tree.append(e[:-1] if e.endswith("!") else e)
                    nxt.append(w)
        frontier = nxt
    return sorted(tree)


def voltage_cover(g: EIGraph, k: int, voltages: Dict[str, int]) -> Tuple[EIGraph, CoveringMap]:
    """k-sheeted cover from a Z/k voltage assignment on geometric edges.

    Tree edges conventionally carry voltage 0; the caller must supply
    voltages whose values generate Z/k, otherwise the cover is disconnected
    and a ValueError is raised.
    """
    assert k >= 1
    verts = ["%s@%d" % (v, s) for v in g.vertices for s in range(k)]
    edges = []
    for e, ebar in g.geometric_edges():
        vol = voltages.get(e, 0) % k
        u, v = g.origin(e), g.terminus(e)
        for s in range(k):
            edges.append(
                ("%s@%d" % (e, s), "%s@%d" % (u, s), "%s@%d" % (v, (s + vol) % k), g.index(e), g.index(ebar))
            )
    cover = EIGraph.from_edges(verts, edges)
    if not cover.is_connected():
        raise ValueError("voltage assignment does not generate Z/%d" % k)
    vmap = {"%s@%d" % (v, s): v for v in g.vertices for s in range(k)}
    emap = {}
    for e, ebar in g.geometric_edges():
        for s in range(k):
            emap["%s@%d" % (e, s)] = e
            emap["%s@%d" % (e, s) + "!"] = ebar
    return cover, CoveringMap(cover, g, vmap, emap)


def cyclic_cover(g: EIGraph, k: int, designated: Optional[str] = None) -> Tuple[EIGraph, CoveringMap]:
    """Connected k-sheeted graph cover with lifted indices.

    The spanning tree gets voltage 0, one designated non-tree geometric edge
    gets voltage 1, and all other edges voltage 0; connectivity is then
    automatic for every k.
    """
    if g.betti() < 1:
        raise TreeInput("underlying graph is a tree; no cyclic cover exists")
    tree = set(spanning_tree(g))
    nontree = [e for e, _ in g.geometric_edges() if e not in tree]
    if designated is None:
        designated = nontree[0]
    if designated not in nontree:
        raise ValueError("designated edge %r is not a non-tree geometric edge" % designated)
    return voltage_cover(g, k, {designated: 1})


# -- universal-cover balls ----------------------------------------------------


class TreeBall:
    """Radius-r ball of the universal cover, with projection to the base graph.

    The underlying tree has all indices 1.  The lift-count condition holds
    exactly at every vertex of depth < radius; boundary vertices are exempt.
    """

    __slots__ = ("tree", "base", "radius", "graph", "vmap", "emap", "depth")

    def __init__(self, tree, base, radius, graph, vmap, emap, depth):
        self.tree: EIGraph = tree
        self.base: str = base
        self.radius: int = radius
        self.graph: EIGraph = graph
        self.vmap: Dict[str, str] = vmap
        self.emap: Dict[str, str] = emap
        self.depth: Dict[str, int] = depth

    def ball_degree(self, x: str) -> int:
        return len(self.tree.out_edges(x))

    def interior(self) -> List[str]:
        return [x for x in self.tree.vertices if self.depth[x] < self.radius]

    def check_interior(self) -> List[str]:
        """Violations of the exact lift-count condition at interior vertices."""
        bad = []
        for x in self.interior():
            v = self.vmap[x]
            for e in self.graph.out_edges(v):
                lifts = [f for f in self.tree.out_edges(x) if self.emap[f] == e]
                if len(lifts) != self.graph.index(e):
                    bad.append("vertex %s: %d lifts of %s, expected %d" % (x, len(lifts), e, self.graph.index(e)))
        return bad


def universal_ball(g: EIGraph, base: str, radius: int, budget: int = BALL_BUDGET) -> TreeBall:
    """Breadth-first construction of the universal-cover ball around base.

    Lift vertex ids are formed deterministically as parent/edge.counter so
    rebuilding the same ball yields identical ids.
    """
    assert radius >= 0 and base in g.vertices
    root = "b"
    verts = [root]
    vmap = {root: base}
    depth = {root: 0}
    edges = []  # geometric tuples
    emap = {}
    frontier = [(root, None)]  # (ball vertex, edge of g by which it was entered, as seen from the vertex)
    for d in range(radius):
        nxt = []
        for x, entry in frontier:
            v = vmap[x]
            for e in g.out_edges(v):
                need = g.index(e) - (1 if entry == e else 0)
                for t in range(need):
                    y = "%s/%s.%d" % (x, e, t)
                    gid = "E%s" % y
                    verts.append(y)
                    vmap[y] = g.terminus(e)
                    depth[y] = d + 1
                    edges.append((gid, x, y, 1, 1))
                    emap[gid] = e
                    emap[gid + "!"] = inverse_id(e)
                    nxt.append((y, inverse_id(e)))
                    if len(verts) > budget:
                        raise BallTooLarge("ball exceeded %d vertices" % budget)
        frontier = nxt
    tree = EIGraph.from_edges(verts, edges)
    return TreeBall(tree, root, radius, g, vmap, emap, depth)


def is_degenerate_ball(ball: TreeBall) -> bool:
    """No essential (degree != 2) vertex in the interior."""
    return all(ball.ball_degree(x) == 2 for x in ball.interior())


def recognize_regular(ball: TreeBall) -> Optional[int]:
    """Degree n of the regular tree the ball belongs to, after suppressing
    degree-2 vertices; None if degrees are mixed, too small, or degenerate.
    """
    assert ball.radius >= 2, "recognition needs a ball of radius >= 2"
    degrees = set()
    for x in ball.interior():
        d = ball.ball_degree(x)
        if d == 2:
            continue  # subdivision point
        if d < 2:
            return None  # leaf in the universal cover: not a regular tree
        degrees.add(d)
    if not degrees:
        return None  # degenerate: no essential vertex seen
    if len(degrees) != 1:
        return None
    n = degrees.pop()
    return n if n >= 3 else None
