"""Commation certificates: data model, synthesizers, and verifier.

A commation is a chain of groups joined by injective continuous proper
homomorphisms with closed cocompact image (copci), pointing either way.
Nodes here are presented combinatorially: deck groups of edge-indexed
graphs, automorphism groups of regular trees, and two named groups (the
(2,4)-loop group and the Bass-Kulkarni lattice used for unimodular
shortcuts).  Arrows carry machine-checkable witnesses:

* a move sequence all of whose steps map into their result (collapses,
  slides) certifies pi1(start) -> pi1(end);
* a covering map (possibly a composite of a finite cyclic cover and edge
  blow-ups) certifies pi1(domain) -> pi1(codomain);
* a regular-tree embedding certifies pi1(C) -> Aut(T_n): a move trace
  from C to a graph whose universal cover is recognized as the n-regular
  tree by the ball oracle;
* an isomorphism witness, or an explicitly flagged axiom (the
  Bass-Kulkarni lattice theorem, or the procyclic-grouping identification
  behind the (2,4)-loop degree ladder).

Degrees of regular trees are always taken from the ball oracle; the
closed-form degree count (sum of indices minus vertex count plus one)
is recorded alongside for comparison but never trusted: under the
directed-edge summation convention used throughout, it overshoots the
oracle by |V| - 1 on multi-vertex graphs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import core
from .core import EIGraph, IsoWitness, check_iso, inverse_id, isomorphic
from .covers import CoveringMap, check as cover_check, compose, identity_cover, recognize_regular, spanning_tree, universal_ball, voltage_cover
from .moves import (
    INTO_RESULT,
    ISOMORPHISM,
    MoveSequence,
    apply_move,
    collapse,
    general_blow_up,
    is_elementary,
    slide,
    standard_blow_up,
)
from .modular import is_unimodular
from .rigidity import g24_family, g24_loop

LR, RL = "LR", "RL"  # left-into-right / right-into-left
ARROW_CHAR = {LR: "↗", RL: "↖"}

K_MAX = 64  # cap on cover sheet counts in plan searches
I0_MAX = 40
# a radius-2 ball of the n-regular tree has 1 + n^2 vertices; degrees beyond
# this cap cannot be certified by the ball oracle within its budget
ORACLE_DEGREE_CAP = 999

G24_NAME = "G_{2,4}"
BK_NAME = "bass-kulkarni-lattice"


class Elementary(Exception):
    pass


class EqualizationFailed(Exception):
    pass


class UnsupportedInput(Exception):
    """The synthesizer's move vocabulary cannot certify this input."""


# -- nodes ---------------------------------------------------------------------


@dataclass(frozen=True)
class EigNode:
    graph: EIGraph

    kind = "eig"

    def to_obj(self):
        return {"kind": "eig", "graph": core.to_obj(self.graph)}


@dataclass(frozen=True)
class RegularTreeNode:
    degree: int

    kind = "regular_tree"

    def to_obj(self):
        return {"kind": "regular_tree", "degree": str(self.degree)}


@dataclass(frozen=True)
class NamedNode:
    name: str
    axiom: Optional[str] = None

    kind = "named"

    def to_obj(self):
        obj = {"kind": "named", "name": self.name}
        if self.axiom:
            obj["axiom"] = self.axiom
        return obj


def node_from_obj(obj):
    kind = obj["kind"]
    if kind == "eig":
        return EigNode(core.from_obj(obj["graph"]))
    if kind == "regular_tree":
        return RegularTreeNode(int(str(obj["degree"])))
    if kind == "named":
        return NamedNode(obj["name"], obj.get("axiom"))
    raise ValueError("unknown node kind %r" % kind)


# -- arrows and witnesses -------------------------------------------------------


@dataclass
class Arrow:
    """One copci arrow; direction LR draws as a north-east arrow."""

    direction: str
    witness_kind: str  # moves | cover | iso | regular_embed | g24_family | axiom
    witness: Dict

    def to_obj(self):
        return {"dir": self.direction, "witness_kind": self.witness_kind, "witness": self.witness}


def moves_witness(seq: MoveSequence) -> Dict:
    return {"moves": seq.to_obj()}


def cover_witness(cmap: CoveringMap) -> Dict:
    return {"map": cmap.to_obj()}


def iso_witness(w: IsoWitness) -> Dict:
    return {"iso": w.to_obj()}


def regular_embed_witness(seq: MoveSequence, degree: int) -> Dict:
    return {"moves": seq.to_obj(), "degree": str(degree)}


def g24_witness(k: int) -> Dict:
    _, seq = g24_family(k)
    return {
        "k": str(k),
        "family": seq.to_obj(),
        "degree": str(2 ** k + 3),
        "axiom": "procyclic-grouping",
    }


def axiom_witness(name: str, note: str) -> Dict:
    return {"name": name, "note": note}


@dataclass
class Commation:
    nodes: List
    arrows: List[Arrow]
    predicted_degrees: Dict[str, str] = field(default_factory=dict)
    oracle_degrees: Dict[str, str] = field(default_factory=dict)
    plan: Dict = field(default_factory=dict)

    def __len__(self):
        return len(self.arrows)

    def direction_word(self) -> str:
        return "".join(ARROW_CHAR[a.direction] for a in self.arrows)

    def to_obj(self):
        return {
            "format": "eigraph-commation/1",
            "nodes": [n.to_obj() for n in self.nodes],
            "arrows": [a.to_obj() for a in self.arrows],
            "predicted_degrees": self.predicted_degrees,
            "oracle_degrees": self.oracle_degrees,
            "plan": self.plan,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True, indent=2)

    @classmethod
    def from_obj(cls, obj):
        return cls(
            nodes=[node_from_obj(n) for n in obj["nodes"]],
            arrows=[Arrow(a["dir"], a["witness_kind"], a["witness"]) for a in obj["arrows"]],
            predicted_degrees=dict(obj.get("predicted_degrees", {})),
            oracle_degrees=dict(obj.get("oracle_degrees", {})),
            plan=obj.get("plan", {}),
        )

    @classmethod
    def loads(cls, text: str):
        return cls.from_obj(json.loads(text))


# -- verification ----------------------------------------------------------------


@dataclass
class VerificationReport:
    violations: List[str] = field(default_factory=list)
    axioms: List[str] = field(default_factory=list)
    length: int = 0
    word: str = ""
    compressed_length: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def oracle_degree(g: EIGraph, radius: int = 2) -> Optional[int]:
    """Regular-tree degree of the universal cover, by ball recognition."""
    ball = universal_ball(g, g.vertices[0], radius)
    return recognize_regular(ball)


def formula_degree(g: EIGraph) -> int:
    """The closed-form count: directed index sum minus |V| plus 1.

    Recorded for comparison only; see the module docstring.
    """
    return g.index_sum() - g.n_vertices() + 1


def _replay_moves(obj: Dict, errors: List[str], where: str) -> Optional[Tuple[EIGraph, EIGraph, List[str]]]:
    """Replay a serialized move sequence; returns (start, end, arrows)."""
    try:
        start = core.from_obj(obj["start"])
        cur = start
        arrows = []
        for rec in obj["steps"]:
            cur, newrec = apply_move(cur, rec["kind"], rec["params"])
            arrows.append(newrec.arrow)
            if newrec.arrow != rec.get("arrow"):
                errors.append("%s: recorded arrow %r disagrees with replay %r" % (where, rec.get("arrow"), newrec.arrow))
        end = core.from_obj(obj["end"])
        if cur != end:
            errors.append("%s: replayed end graph differs from recorded end" % where)
            return None
        return start, end, arrows
    except Exception as exc:  # noqa: BLE001 - verification failures become report entries
        errors.append("%s: replay failed: %s" % (where, exc))
        return None


def _eig_graph(node) -> Optional[EIGraph]:
    if isinstance(node, EigNode):
        return node.graph
    if isinstance(node, NamedNode) and node.name == G24_NAME:
        return g24_loop()
    return None


def verify(c: Commation) -> VerificationReport:
    """Check every arrow's witness and the node/witness endpoint coherence."""
    rep = VerificationReport()
    rep.length = len(c.arrows)
    rep.word = c.direction_word()
    if len(c.nodes) != len(c.arrows) + 1:
        rep.violations.append("node/arrow count mismatch")
        return rep
    for i, node in enumerate(c.nodes):
        if isinstance(node, RegularTreeNode) and node.degree < 3:
            rep.violations.append("node %d: regular trees need degree >= 3" % i)
    trivial = 0
    for i, arrow in enumerate(c.arrows):
        left, right = c.nodes[i], c.nodes[i + 1]
        where = "arrow %d" % i
        if arrow.direction not in (LR, RL):
            rep.violations.append("%s: bad direction %r" % (where, arrow.direction))
            continue
        src_node, dst_node = (left, right) if arrow.direction == LR else (right, left)
        kind = arrow.witness_kind
        w = arrow.witness
        if kind == "moves":
            res = _replay_moves(w["moves"], rep.violations, where)
            if res is None:
                continue
            start, end, arrows = res
            if not all(a in (INTO_RESULT, ISOMORPHISM) for a in arrows):
                rep.violations.append("%s: a step does not map into its result" % where)
            sg, dg = _eig_graph(src_node), _eig_graph(dst_node)
            if sg != start or dg != end:
                rep.violations.append("%s: witness endpoints do not match the nodes" % where)
            if not w["moves"]["steps"]:
                trivial += 1
        elif kind == "cover":
            try:
                cmap = CoveringMap.from_obj(w["map"])
            except Exception as exc:  # noqa: BLE001
                rep.violations.append("%s: unreadable covering map: %s" % (where, exc))
                continue
            crep = cover_check(cmap)
            for loc, what in crep.violations:
                rep.violations.append("%s: cover invalid at %s: %s" % (where, loc, what))
            if cmap.domain != _eig_graph(src_node) or cmap.codomain != _eig_graph(dst_node):
                rep.violations.append("%s: covering map endpoints do not match the nodes" % where)
            if cmap.domain == cmap.codomain and all(k == v for k, v in cmap.vmap.items()):
                trivial += 1
        elif kind == "iso":
            sg, dg = _eig_graph(left), _eig_graph(right)
            if sg is None or dg is None:
                rep.violations.append("%s: iso witness needs graph-backed nodes" % where)
                continue
            bad = check_iso(sg, dg, IsoWitness.from_obj(w["iso"]))
            for b in bad:
                rep.violations.append("%s: iso invalid: %s" % (where, b))
            trivial += 1
        elif kind == "regular_embed":
            res = _replay_moves(w["moves"], rep.violations, where)
            if res is None:
                continue
            start, end, arrows = res
            if not all(a in (INTO_RESULT, ISOMORPHISM) for a in arrows):
                rep.violations.append("%s: a step does not map into its result" % where)
            if _eig_graph(src_node) != start:
                rep.violations.append("%s: embedding source does not match the node" % where)
            if not isinstance(dst_node, RegularTreeNode):
                rep.violations.append("%s: embedding target must be a regular tree node" % where)
                continue
            n = oracle_degree(end)
            if n is None or n != int(str(w["degree"])) or n != dst_node.degree:
                rep.violations.append(
                    "%s: oracle degree %s does not certify T_%d" % (where, n, dst_node.degree)
                )
        elif kind == "g24_family":
            if not (isinstance(src_node, NamedNode) and src_node.name == G24_NAME):
                rep.violations.append("%s: degree-ladder witness needs the named node" % where)
                continue
            res = _replay_moves(w["family"], rep.violations, where)
            if res is None:
                continue
            start, end, _ = res
            if start != g24_loop():
                rep.violations.append("%s: family chain does not start at the (2,4)-loop" % where)
            k = int(str(w["k"]))
            n = oracle_degree(end)
            if n is None or n != 2 ** k + 3 or n != int(str(w["degree"])):
                rep.violations.append("%s: ladder degree %s is not 2^%d + 3" % (where, n, k))
            if isinstance(dst_node, RegularTreeNode) and dst_node.degree != n:
                rep.violations.append("%s: ladder degree %s does not match node T_%d" % (where, n, dst_node.degree))
            rep.axioms.append(w.get("axiom", "procyclic-grouping"))
        elif kind == "axiom":
            rep.axioms.append(w.get("name", "axiom"))
        else:
            rep.violations.append("%s: unknown witness kind %r" % (where, kind))
    rep.compressed_length = rep.length - trivial
    # certified regular-tree degrees must agree with the recorded oracle values
    for key, val in c.oracle_degrees.items():
        for node in c.nodes:
            if isinstance(node, RegularTreeNode) and key == "middle" and node.degree != int(str(val)):
                rep.violations.append("recorded oracle degree %s disagrees with node T_%d" % (val, node.degree))
    return rep


# -- synthesis helpers ------------------------------------------------------------


def phase1_collapse(g: EIGraph) -> MoveSequence:
    """Collapse index-1 non-loop edges (lexicographic, restarting) until none remain."""
    seq = MoveSequence(start=g)
    cur = g
    while True:
        cand = None
        for e in cur.edges:
            if cur.index(e) == 1 and not cur.is_loop(e):
                cand = e
                break
        if cand is None:
            return seq
        cur, rec = collapse(cur, cand)
        seq.steps.append((rec, cur))


def _is_heavy_pair(g: EIGraph, e: str) -> bool:
    return g.index(e) >= 2 and g.index(inverse_id(e)) >= 2


def _nonseparating(g: EIGraph, gid: str) -> bool:
    if g.origin(gid) == g.terminus(gid):
        return True
    keep = [x for x, _ in g.geometric_edges() if x != gid]
    if not keep and g.n_vertices() > 1:
        return False
    sub_edges = [(x, g.origin(x), g.terminus(x), g.index(x), g.index(x + "!")) for x in keep]
    h = EIGraph.from_edges(g.vertices, sub_edges)
    return h.is_connected()


@dataclass
class _Leg:
    """One cover-and-blow-up leg: everything needed for arrows 2 and 3."""

    base: EIGraph  # B: no index-1 non-loop edges
    cover_map: CoveringMap  # C -> B, the composite witness
    blown: EIGraph  # C
    tree: List[str]  # trivially indexed spanning tree (geometric ids) of C
    f0: Optional[str]  # directed (1, 2) edge outside the tree, if built
    candidates: List[str]  # directed index-1 non-tree slide candidates


def _build_leg(B: EIGraph, k: int, need_f0: bool, blow_loops: bool = True) -> _Leg:
    """k-sheeted cyclic cover of B followed by blow-ups of all heavy edges.

    Light loops (an index-1 direction) ride along untouched; the blow-ups
    leave a trivially indexed spanning tree, a (1,2) edge f0 outside it when
    requested, and a pool of index-1 non-tree edges to slide across f0.
    With blow_loops false only non-loop edges are blown, matching the
    single-vertex flattening procedure exactly.
    """
    if k == 1:
        C, p = B, identity_cover(B)
    else:
        tree = set(spanning_tree(B))
        heavy_nontree = [
            gid for gid, _ in B.geometric_edges() if gid not in tree and _is_heavy_pair(B, gid)
        ]
        if not heavy_nontree:
            raise UnsupportedInput("no heavy non-tree edge to carry the cover voltage")
        C, p = voltage_cover(B, k, {heavy_nontree[0]: 1})
    # choose e0: a non-separating geometric edge with an index >= 3 whose
    # other direction is >= 2, to be blown into (2,1) + rest, yielding f0
    e0_dir = None
    if need_f0:
        for gid, gbar in C.geometric_edges():
            a, b = C.index(gid), C.index(gbar)
            if C.is_loop(gid) and min(a, b) == 1 and max(a, b) == 2:
                e0_dir = "light"  # a (1,2) loop serves as f0 directly
                f0 = gid if C.index(gid) == 1 else gbar
                break
        else:
            f0 = None
            for gid, gbar in C.geometric_edges():
                for d in (gid, gbar):
                    if C.index(d) >= 3 and C.index(inverse_id(d)) >= 2 and _nonseparating(C, gid):
                        e0_dir = d
                        break
                if e0_dir:
                    break
            if e0_dir is None:
                raise UnsupportedInput("no (1,2) source available for slide adjustments")
    else:
        f0 = None

    cur, cmap = C, p
    f0_edge = f0 if e0_dir == "light" else None
    for gid, gbar in C.geometric_edges():
        if C.is_loop(gid) and (not blow_loops or min(C.index(gid), C.index(gbar)) == 1):
            continue  # loops ride along (light ones always)
        if e0_dir not in (None, "light") and gid == (e0_dir[:-1] if e0_dir.endswith("!") else e0_dir):
            a, b = cur.index(e0_dir), cur.index(inverse_id(e0_dir))
            cur, rec = general_blow_up(cur, e0_dir, [(2, 1), (a - 2, b - 1)])
            cmap = compose(cmap, rec.witness)
            f0_edge = "%s~p0!" % (e0_dir[:-1] if e0_dir.endswith("!") else e0_dir)
            continue
        if _is_heavy_pair(C, gid):
            if need_f0:
                # split off as many (1,1) parts as the indices allow: the
                # leftovers beyond the spanning tree feed the slide pool
                a, b = cur.index(gid), cur.index(gbar)
                t = min(a, b) - 1
                parts = [(1, 1)] * t + [(a - t, b - t)]
                cur, rec = general_blow_up(cur, gid, parts)
            else:
                cur, rec = standard_blow_up(cur, gid)
            cmap = compose(cmap, rec.witness)
    # trivially indexed spanning tree among (1,1) geometric edges
    trivial = [
        gid
        for gid, gbar in cur.geometric_edges()
        if cur.index(gid) == 1 and cur.index(gbar) == 1 and not cur.is_loop(gid)
    ]
    tree = _spanning_subtree(cur, trivial)
    if tree is None:
        raise UnsupportedInput("no trivially indexed spanning tree after blow-ups")
    tset = set(tree)
    cands = []
    for d in cur.edges:
        gid = d[:-1] if d.endswith("!") else d
        if gid in tset or cur.index(d) != 1:
            continue
        if f0_edge is not None and gid == (f0_edge[:-1] if f0_edge.endswith("!") else f0_edge):
            continue
        cands.append(d)
    # one candidate per geometric edge is enough ((1,1) pairs offer both ends)
    seen = set()
    uniq = []
    for d in sorted(cands):
        gid = d[:-1] if d.endswith("!") else d
        if gid not in seen:
            seen.add(gid)
            uniq.append(d)
    return _Leg(base=B, cover_map=cmap, blown=cur, tree=tree, f0=f0_edge, candidates=uniq)


def _spanning_subtree(g: EIGraph, allowed_geoms: List[str]) -> Optional[List[str]]:
    """BFS spanning tree using only the allowed geometric edges."""
    allowed = set(allowed_geoms)
    root = g.vertices[0]
    seen = {root}
    tree = []
    frontier = [root]
    while frontier:
        nxt = []
        for v in sorted(frontier):
            for e in g.out_edges(v):
                gid = e[:-1] if e.endswith("!") else e
                if gid not in allowed:
                    continue
                w = g.terminus(e)
                if w not in seen:
                    seen.add(w)
                    tree.append(gid)
                    nxt.append(w)
        frontier = nxt
    if len(seen) != g.n_vertices():
        return None
    return sorted(tree)


def _tree_adjacency(g: EIGraph, tree: List[str]):
    tset = set(tree)
    adj: Dict[str, List[str]] = {v: [] for v in g.vertices}
    for e in g.edges:
        gid = e[:-1] if e.endswith("!") else e
        if gid in tset:
            adj[g.origin(e)].append(e)
    return adj


def _tree_route(g: EIGraph, tree: List[str], src: str, dst: str) -> List[str]:
    """Directed tree edges from src to dst."""
    adj = _tree_adjacency(g, tree)
    prev = {src: None}
    queue = [src]
    while queue:
        v = queue.pop(0)
        if v == dst:
            break
        for e in sorted(adj[v]):
            w = g.terminus(e)
            if w not in prev:
                prev[w] = e
                queue.append(w)
    route = []
    v = dst
    while prev[v] is not None:
        route.append(prev[v])
        v = g.origin(prev[v])
    return list(reversed(route))


def _flatten_moves(leg: _Leg, slides: List[Tuple[str, int]]) -> MoveSequence:
    """Arrow-3 move trace: slide each chosen edge across f0 the requested
    number of times (walking along the tree as needed), then collapse the
    trivially indexed spanning tree down to a single vertex."""
    seq = MoveSequence(start=leg.blown)
    cur = leg.blown
    for f, count in slides:
        assert leg.f0 is not None
        for _ in range(count):
            target = cur.origin(leg.f0)
            route = _tree_route(cur, leg.tree, cur.origin(f), target)
            for t in route:
                cur, rec = slide(cur, f, t)
                seq.steps.append((rec, cur))
            cur, rec = slide(cur, f, leg.f0)
            seq.steps.append((rec, cur))
    for gid in list(leg.tree):
        cur, rec = collapse(cur, gid if cur.index(gid) == 1 else gid + "!")
        seq.steps.append((rec, cur))
    assert cur.n_vertices() == 1
    return seq


def _rep_slides(adj: int, n_candidates: int) -> Optional[List[int]]:
    """Write adj as a sum of at most n_candidates terms 2^c - 1 (c >= 1).

    Preferred plan: adj distinct edges slid once each, so the degree sum
    rises by exactly one per slide.  When candidates are scarce, an edge
    slid c times contributes 1 + 2 + ... + 2^(c-1) = 2^c - 1 instead."""
    if adj == 0:
        return []
    if n_candidates == 0:
        return None
    if adj <= n_candidates:
        return [1] * adj
    best = None
    for terms in range(1, n_candidates + 1):
        combo = _rep_greedy(adj, terms)
        if combo is not None:
            best = combo
            break
    return best


def _rep_greedy(adj: int, terms: int) -> Optional[List[int]]:
    # exact search with at most `terms` values 2^c - 1; adj is desk-scale
    if terms == 0:
        return [] if adj == 0 else None
    c = 1
    while 2 ** (c + 1) - 1 <= adj:
        c += 1
    while c >= 1:
        rest = _rep_greedy(adj - (2 ** c - 1), terms - 1)
        if rest is not None:
            return [c] + rest
        c -= 1
    return None


def _leg_cache(B: EIGraph):
    cache: Dict[Tuple[int, bool], object] = {}

    def get(k: int, need_f0: bool) -> Optional[_Leg]:
        key = (k, need_f0)
        if key not in cache:
            try:
                cache[key] = _build_leg(B, k, need_f0)
            except UnsupportedInput as exc:
                cache[key] = exc
        leg = cache[key]
        return None if isinstance(leg, Exception) else leg

    return get


def _m_directed(B: EIGraph) -> int:
    return B.index_sum() - 2 * B.n_vertices()


def _main_route(B: EIGraph, n: int, legs) -> Optional[Tuple[_Leg, int, List[Tuple[str, int]]]]:
    """Find (leg, sheets, slides) reaching oracle degree n from B."""
    m = _m_directed(B)
    if m < 1:
        return None
    for k in range(1, min(K_MAX, max(1, (n - 2) // m)) + 1):
        adj = n - 2 - k * m
        if adj < 0:
            break
        leg = legs(k, adj > 0)
        if leg is None:
            continue
        counts = _rep_slides(adj, len(leg.candidates))
        if counts is None:
            continue
        slides = list(zip(leg.candidates, counts))
        return leg, k, slides
    return None


def _light_route(B: EIGraph, n: int) -> Optional[Tuple[CoveringMap, MoveSequence, int]]:
    """Single-vertex graphs whose loops all have an index-1 direction: unroll
    one loop in a k-cover and collapse the resulting cycle, checking the
    oracle degree against n by exact simulation."""
    if B.n_vertices() != 1:
        return None
    if any(_is_heavy_pair(B, gid) for gid, _ in B.geometric_edges()):
        return None
    for k in range(1, 13):
        if k == 1:
            C, p = B, identity_cover(B)
        else:
            gid0 = B.geometric_edges()[0][0]
            C, p = voltage_cover(B, k, {gid0: 1})
        seq = MoveSequence(start=C)
        cur = C
        while True:
            cand = None
            for e in cur.edges:
                if cur.index(e) == 1 and not cur.is_loop(e):
                    cand = e
                    break
            if cand is None:
                break
            cur, rec = collapse(cur, cand)
            seq.steps.append((rec, cur))
        if cur.n_vertices() == 1 and cur.index_sum() == n:
            return p, seq, k
    return None


# -- the three synthesizers -------------------------------------------------------


def flatten_to_single_vertex(g: EIGraph) -> Tuple[EIGraph, MoveSequence]:
    """Collapses, then standard blow-ups of all non-loop edges, then collapse
    of a trivially indexed maximal tree: a single-vertex graph results."""
    seq = phase1_collapse(g)
    cur = seq.end
    for gid, _ in list(cur.geometric_edges()):
        if not cur.is_loop(gid):
            cur, rec = standard_blow_up(cur, gid)
            seq.steps.append((rec, cur))
    trivial = [
        gid
        for gid, gbar in cur.geometric_edges()
        if cur.index(gid) == 1 and cur.index(gbar) == 1 and not cur.is_loop(gid)
    ]
    tree = _spanning_subtree(cur, trivial)
    assert tree is not None, "blow-ups always leave a trivially indexed spanning tree"
    for gid in tree:
        cur, rec = collapse(cur, gid)
        seq.steps.append((rec, cur))
    assert cur.n_vertices() == 1
    return cur, seq


def to_regular(g: EIGraph) -> Commation:
    """The three-arrow certificate onto the automorphism group of a regular
    tree: collapse, blow up (one composite covering map), flatten."""
    if is_elementary(g):
        raise Elementary("input is elementary (0- or 2-ended)")
    p1 = phase1_collapse(g)
    B = p1.end
    n_planned = B.index_sum() - 2 * (B.n_vertices() - 1)
    if n_planned > ORACLE_DEGREE_CAP:
        raise UnsupportedInput("degree %d exceeds the ball-oracle budget" % n_planned)
    leg = _build_leg(B, 1, need_f0=False, blow_loops=False)
    flat = _flatten_moves(leg, [])
    n = oracle_degree(flat.end)
    assert n is not None and n >= 3
    assert n == flat.end.index_sum()
    nodes = [EigNode(g), EigNode(B), EigNode(leg.blown), RegularTreeNode(n)]
    arrows = [
        Arrow(LR, "moves", moves_witness(p1)),
        Arrow(RL, "cover", cover_witness(leg.cover_map)),
        Arrow(LR, "regular_embed", regular_embed_witness(flat, n)),
    ]
    return Commation(
        nodes=nodes,
        arrows=arrows,
        predicted_degrees={"formula": str(formula_degree(leg.blown)), "oracle": str(n)},
        oracle_degrees={"middle": str(n)},
        plan={"pipeline": "collapse/blow-up/flatten"},
    )


def radius_commation(g: EIGraph) -> Commation:
    """A certificate of length at most four ending at the (2,4)-loop group,
    whose degree ladder 2^k + 3 meets the synthesized regular tree."""
    if is_elementary(g):
        raise Elementary("input is elementary (0- or 2-ended)")
    iso = None
    if g.n_vertices() <= core.ISO_SEARCH_CAP:
        iso = isomorphic(g, g24_loop())
    if iso is not None:
        return Commation(
            nodes=[EigNode(g), NamedNode(G24_NAME)],
            arrows=[Arrow(RL, "iso", iso_witness(iso))],
            predicted_degrees={},
            oracle_degrees={"defining": "6"},
            plan={"pipeline": "defining-graph isomorphism"},
        )
    if is_unimodular(g):
        return _unimodular_radius(g)
    p1 = phase1_collapse(g)
    B = p1.end
    m = _m_directed(B)
    legs = _leg_cache(B)
    for i0 in range(I0_MAX + 1):
        n = 2 ** i0 + 3
        if n > ORACLE_DEGREE_CAP:
            raise UnsupportedInput(
                "any reachable ladder degree exceeds the ball-oracle budget (m = %d)" % m
            )
        if n - 2 < m:
            continue
        route = _main_route(B, n, legs)
        if route is not None:
            leg, k, slides = route
            flat = _flatten_moves(leg, slides)
            got = oracle_degree(flat.end)
            assert got == n, "oracle %s disagrees with planned degree %d" % (got, n)
            nodes = [EigNode(g), EigNode(B), EigNode(leg.blown), RegularTreeNode(n), NamedNode(G24_NAME)]
            arrows = [
                Arrow(LR, "moves", moves_witness(p1)),
                Arrow(RL, "cover", cover_witness(leg.cover_map)),
                Arrow(LR, "regular_embed", regular_embed_witness(flat, n)),
                Arrow(RL, "g24_family", g24_witness(i0)),
            ]
            plan = {
                "pipeline": "main",
                "m_directed": str(m),
                "closed_form_excess": str(B.index_sum() - B.n_vertices()),
                "i0": str(i0),
                "sheets": str(k),
                "f0": leg.f0 or "",
                "slides": [[f, c] for f, c in slides],
                "equation": "sheets * m_directed + slides = 2^i0 + 1",
            }
            return Commation(
                nodes=nodes,
                arrows=arrows,
                predicted_degrees={"formula": str(formula_degree(leg.blown)), "oracle": str(n)},
                oracle_degrees={"middle": str(n), "ladder": str(n)},
                plan=plan,
            )
        light = _light_route(B, n)
        if light is not None:
            p, seq, k = light
            got = oracle_degree(seq.end)
            assert got == n
            nodes = [EigNode(g), EigNode(B), EigNode(p.domain), RegularTreeNode(n), NamedNode(G24_NAME)]
            arrows = [
                Arrow(LR, "moves", moves_witness(p1)),
                Arrow(RL, "cover", cover_witness(p)),
                Arrow(LR, "regular_embed", regular_embed_witness(seq, n)),
                Arrow(RL, "g24_family", g24_witness(i0)),
            ]
            return Commation(
                nodes=nodes,
                arrows=arrows,
                predicted_degrees={"oracle": str(n)},
                oracle_degrees={"middle": str(n), "ladder": str(n)},
                plan={"pipeline": "light-unroll", "sheets": str(k), "i0": str(i0)},
            )
    raise UnsupportedInput("no plan reaches a degree of the form 2^k + 3 within budget")


def _unimodular_radius(g: EIGraph) -> Commation:
    """Unimodular inputs route through the lattice axiom: the input contains
    a cocompact free lattice, which also acts on the 4-regular tree, met by
    the degree ladder at k = 0."""
    nodes = [
        EigNode(g),
        EigNode(g),
        NamedNode(BK_NAME, axiom="bass-kulkarni"),
        RegularTreeNode(4),
        NamedNode(G24_NAME),
    ]
    arrows = [
        Arrow(LR, "moves", moves_witness(MoveSequence(start=g))),
        Arrow(RL, "axiom", axiom_witness("bass-kulkarni", "a unimodular tree group contains a cocompact free lattice")),
        Arrow(LR, "axiom", axiom_witness("free-lattice-regular-action", "a rank >= 2 free group acts geometrically on the 4-regular tree")),
        Arrow(RL, "g24_family", g24_witness(0)),
    ]
    return Commation(
        nodes=nodes,
        arrows=arrows,
        predicted_degrees={"oracle": "4"},
        oracle_degrees={"middle": "4"},
        plan={"pipeline": "unimodular-shortcut"},
    )


def diameter_commation(g: EIGraph, h: EIGraph, n_cap: Optional[int] = None, jobs: int = 1) -> Commation:
    """A certificate of length at most six joining two inputs through a
    common regular tree, equalizing the two oracle degrees by sheet counts
    and slide adjustments.

    Candidate degrees are independent pure evaluations; with jobs > 1 they
    are probed in parallel batches, the smallest feasible degree winning
    regardless of completion order.
    """
    for x in (g, h):
        if is_elementary(x):
            raise Elementary("input is elementary (0- or 2-ended)")
    uni_g, uni_h = is_unimodular(g), is_unimodular(h)
    if uni_g and uni_h:
        return Commation(
            nodes=[EigNode(g), NamedNode(BK_NAME, axiom="bass-kulkarni"), EigNode(h)],
            arrows=[
                Arrow(RL, "axiom", axiom_witness("bass-kulkarni", "common cocompact free lattice")),
                Arrow(LR, "axiom", axiom_witness("bass-kulkarni", "common cocompact free lattice")),
            ],
            plan={"pipeline": "unimodular-bridge"},
        )
    if uni_g or uni_h:
        return _one_sided_unimodular(g, h) if uni_h else _flip(_one_sided_unimodular(h, g))
    p1g, p1h = phase1_collapse(g), phase1_collapse(h)
    Bg, Bh = p1g.end, p1h.end
    mg, mh = _m_directed(Bg), _m_directed(Bh)
    legs_g, legs_h = _leg_cache(Bg), _leg_cache(Bh)
    cap = n_cap or (4 * max(1, mg) * max(1, mh) + 16)
    cap = min(cap, ORACLE_DEGREE_CAP)

    def probe(n):
        left = _main_route(Bg, n, legs_g) or ("light", _light_route(Bg, n))
        if left == ("light", None):
            return None
        right = _main_route(Bh, n, legs_h) or ("light", _light_route(Bh, n))
        if right == ("light", None):
            return None
        return left, right

    hit = None
    candidates = range(3, cap + 1)
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            batch = jobs * 4
            for lo in range(3, cap + 1, batch):
                ns = [n for n in range(lo, min(lo + batch, cap + 1))]
                for n, res in zip(ns, pool.map(probe, ns)):
                    if res is not None:
                        hit = (n, res)
                        break
                if hit:
                    break
    else:
        for n in candidates:
            res = probe(n)
            if res is not None:
                hit = (n, res)
                break
    if hit is None:
        raise EqualizationFailed("no common degree within the search budget (cap %d)" % cap)
    n, (left, right) = hit
    larrows, lnodes, lplan = _branch(p1g, left, n, mirrored=False)
    rarrows, rnodes, rplan = _branch(p1h, right, n, mirrored=True)
    nodes = [EigNode(g)] + lnodes + [RegularTreeNode(n)] + rnodes + [EigNode(h)]
    arrows = larrows + rarrows
    return Commation(
        nodes=nodes,
        arrows=arrows,
        predicted_degrees={"oracle": str(n)},
        oracle_degrees={"middle": str(n)},
        plan={"pipeline": "diameter", "left": lplan, "right": rplan, "degree": str(n)},
    )


def _branch(p1: MoveSequence, route, n: int, mirrored: bool):
    """Arrows and inner nodes for one diameter branch (toward the middle)."""
    if isinstance(route, tuple) and route and route[0] == "light":
        p, seq, k = route[1]
        blown = p.domain
        plan = {"pipeline": "light-unroll", "sheets": str(k)}
        cmap = p
        flat = seq
    else:
        leg, k, slides = route
        blown = leg.blown
        plan = {"pipeline": "main", "sheets": str(k), "slides": [[f, c] for f, c in slides]}
        cmap = leg.cover_map
        flat = _flatten_moves(leg, slides)
    got = oracle_degree(flat.end)
    assert got == n
    if not mirrored:
        nodes = [EigNode(p1.end), EigNode(blown)]
        arrows = [
            Arrow(LR, "moves", moves_witness(p1)),
            Arrow(RL, "cover", cover_witness(cmap)),
            Arrow(LR, "regular_embed", regular_embed_witness(flat, n)),
        ]
    else:
        nodes = [EigNode(blown), EigNode(p1.end)]
        arrows = [
            Arrow(RL, "regular_embed", regular_embed_witness(flat, n)),
            Arrow(LR, "cover", cover_witness(cmap)),
            Arrow(RL, "moves", moves_witness(p1)),
        ]
    return arrows, nodes, plan


def _one_sided_unimodular(g: EIGraph, h_unimodular: EIGraph) -> Commation:
    """Non-unimodular g meets unimodular h through a regular tree plus the
    lattice axiom: g -> ... -> Aut(T_n) <- lattice -> h."""
    cert = to_regular(g)
    n = cert.nodes[-1].degree
    nodes = cert.nodes + [NamedNode(BK_NAME, axiom="bass-kulkarni"), EigNode(h_unimodular)]
    arrows = cert.arrows + [
        Arrow(RL, "axiom", axiom_witness("bass-kulkarni", "Aut(T_%d) contains a cocompact free lattice" % n)),
        Arrow(LR, "axiom", axiom_witness("bass-kulkarni", "the lattice embeds cocompactly into the unimodular side")),
    ]
    return Commation(
        nodes=nodes,
        arrows=arrows,
        predicted_degrees=cert.predicted_degrees,
        oracle_degrees=cert.oracle_degrees,
        plan={"pipeline": "one-sided-unimodular", "degree": str(n)},
    )


def _flip(c: Commation) -> Commation:
    flip = {LR: RL, RL: LR}
    return Commation(
        nodes=list(reversed(c.nodes)),
        arrows=[Arrow(flip[a.direction], a.witness_kind, a.witness) for a in reversed(c.arrows)],
        predicted_degrees=c.predicted_degrees,
        oracle_degrees=c.oracle_degrees,
        plan=dict(c.plan, flipped=True),
    )
