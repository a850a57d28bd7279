"""Edge-indexed graphs.

A graph is given by a vertex set, a set of directed edges, a fixed-point-free
involution e -> e! pairing each directed edge with its inverse, and an origin
map.  An edge-indexed graph attaches a positive integer i(e) to every directed
edge; i(e) plays the role of a local index [vertex group : edge group] of a
quotient graph of groups, but no group elements are ever materialized here.

Conventions used throughout the package:

* vertex and edge ids are opaque strings; every deterministic choice breaks
  ties by lexicographic id order;
* a geometric edge is the unordered pair {e, e!}; the interchange format
  names geometric edges and we derive the directed pair by suffixing ``!``;
* indices are ordinary Python ints (arbitrary precision).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

ISO_SEARCH_CAP = 12  # exhaustive isomorphism search bound (vertices)


class SizeExceeded(Exception):
    """Raised when an exhaustive search is asked to handle too large a graph."""


def inverse_id(e: str) -> str:
    """Directed-edge id of the inverse: e <-> e + '!'."""
    return e[:-1] if e.endswith("!") else e + "!"


class EIGraph:
    """A finite edge-indexed graph, immutable by convention.

    Instances are values: all operations in this package build new graphs
    and never mutate an existing one, so graphs can be shared freely.
    """

    __slots__ = ("_vertices", "_origin", "_index", "_edges", "_out", "_hash")

    def __init__(self, vertices: Iterable[str], origin: Dict[str, str], index: Dict[str, int]):
        self._vertices = tuple(sorted(vertices))
        self._origin = dict(origin)
        self._index = {e: int(i) for e, i in index.items()}
        self._hash = None
        if set(self._origin) != set(self._index):
            raise ValueError("origin and index must be defined on the same edge set")
        self._edges = tuple(sorted(self._origin))
        out: Dict[str, list] = {v: [] for v in self._vertices}
        for e in self._edges:
            out.setdefault(self._origin[e], []).append(e)
        self._out = {v: tuple(es) for v, es in out.items()}

    # -- construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, vertices: Iterable[str], edges: Iterable[Tuple[str, str, str, int, int]]) -> "EIGraph":
        """Build from geometric edge tuples (id, from, to, idx_at_from, idx_at_to)."""
        vertices = list(vertices)
        vset = set(vertices)
        origin: Dict[str, str] = {}
        index: Dict[str, int] = {}
        for eid, u, v, iu, iv in edges:
            if eid.endswith("!"):
                raise ValueError("geometric edge ids must not end with '!': %r" % eid)
            if eid in index:
                raise ValueError("duplicate edge id %r" % eid)
            if u not in vset or v not in vset:
                raise ValueError("edge %r has endpoint outside the vertex set" % eid)
            origin[eid] = u
            origin[eid + "!"] = v
            index[eid] = int(iu)
            index[eid + "!"] = int(iv)
        return cls(vertices, origin, index)

    # -- basic accessors ---------------------------------------------------

    @property
    def vertices(self) -> Tuple[str, ...]:
        return self._vertices

    @property
    def edges(self) -> Tuple[str, ...]:
        """All directed edge ids, sorted."""
        return self._edges

    def origin(self, e: str) -> str:
        return self._origin[e]

    def terminus(self, e: str) -> str:
        return self._origin[inverse_id(e)]

    def inverse(self, e: str) -> str:
        return inverse_id(e)

    def index(self, e: str) -> int:
        return self._index[e]

    def is_loop(self, e: str) -> bool:
        return self.origin(e) == self.terminus(e)

    def has_edge(self, e: str) -> bool:
        return e in self._origin

    def out_edges(self, v: str) -> Tuple[str, ...]:
        return self._out.get(v, ())

    def geometric_edges(self) -> Tuple[Tuple[str, str], ...]:
        """Geometric edges as (e, e!) pairs keyed by the bare id."""
        return tuple((e, e + "!") for e in self._edges if not e.endswith("!"))

    def n_vertices(self) -> int:
        return len(self._vertices)

    def n_geometric(self) -> int:
        return len(self._origin) // 2

    def betti(self) -> int:
        """First Betti number of the underlying connected graph."""
        return self.n_geometric() - self.n_vertices() + 1

    def index_sum(self) -> int:
        """Sum of i(e) over all directed edges."""
        return sum(self._index.values())

    def as_tuple(self):
        return (
            self._vertices,
            tuple(sorted(self._origin.items())),
            tuple(sorted(self._index.items())),
        )

    def __eq__(self, other):
        return isinstance(other, EIGraph) and self.as_tuple() == other.as_tuple()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.as_tuple())
        return self._hash

    def __repr__(self):
        return "EIGraph(V=%d, E=%d)" % (len(self._vertices), self.n_geometric())

    # -- derived structure -------------------------------------------------

    def neighbors(self, v: str) -> Tuple[str, ...]:
        return tuple(sorted({self.terminus(e) for e in self.out_edges(v)}))

    def is_connected(self) -> bool:
        if not self._vertices:
            return False
        seen = {self._vertices[0]}
        stack = [self._vertices[0]]
        while stack:
            v = stack.pop()
            for e in self.out_edges(v):
                w = self.terminus(e)
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self._vertices)


@dataclass(frozen=True)
class GeometricEdge:
    """Convenience view of an unordered pair {e, e!} with its two indices."""

    id: str
    edge: str
    inverse: str
    indices: Tuple[int, int]
    is_loop: bool


def geometric_view(g: EIGraph) -> Tuple[GeometricEdge, ...]:
    return tuple(
        GeometricEdge(e, e, ebar, (g.index(e), g.index(ebar)), g.is_loop(e))
        for e, ebar in g.geometric_edges()
    )


@dataclass
class ValidationReport:
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(g: EIGraph) -> ValidationReport:
    """Check the defining invariants; an empty report means the graph is valid."""
    report = ValidationReport()
    for e in g.edges:
        ebar = inverse_id(e)
        if not g.has_edge(ebar):
            report.violations.append("edge %r has no inverse" % e)
            continue
        if ebar == e:
            report.violations.append("involution has fixed point at %r" % e)
        if g.origin(e) not in g.vertices:
            report.violations.append("edge %r has origin outside vertex set" % e)
    for e in g.edges:
        if g.index(e) < 1:
            report.violations.append("index must be >= 1 on edge %r" % e)
    if not g.vertices:
        report.violations.append("graph must have at least one vertex")
    elif not g.is_connected():
        report.violations.append("graph must be connected")
    return report


def degree_profile(g: EIGraph) -> Dict[str, int]:
    """For each vertex v, the sum of i(e) over edges starting at v.

    This is the degree of any universal-cover vertex lying above v.
    """
    prof = {v: 0 for v in g.vertices}
    for e in g.edges:
        prof[g.origin(e)] += g.index(e)
    return prof


@dataclass
class IsoWitness:
    """An index-preserving graph isomorphism: vertex and directed-edge bijections."""

    vmap: Dict[str, str]
    emap: Dict[str, str]

    def to_obj(self):
        return {"vmap": dict(sorted(self.vmap.items())), "emap": dict(sorted(self.emap.items()))}

    @classmethod
    def from_obj(cls, obj):
        return cls(vmap=dict(obj["vmap"]), emap=dict(obj["emap"]))


def identity_iso(g: EIGraph) -> IsoWitness:
    return IsoWitness({v: v for v in g.vertices}, {e: e for e in g.edges})


def check_iso(g: EIGraph, h: EIGraph, w: IsoWitness) -> List[str]:
    """Violations of w being an index-preserving isomorphism g -> h."""
    bad = []
    if sorted(w.vmap) != sorted(g.vertices) or sorted(w.vmap.values()) != sorted(h.vertices):
        bad.append("vertex map is not a bijection onto the target vertices")
        return bad
    if sorted(w.emap) != sorted(g.edges) or sorted(w.emap.values()) != sorted(h.edges):
        bad.append("edge map is not a bijection onto the target edges")
        return bad
    for e in g.edges:
        fe = w.emap[e]
        if h.origin(fe) != w.vmap[g.origin(e)]:
            bad.append("edge map does not commute with origin at %r" % e)
        if w.emap[inverse_id(e)] != inverse_id(fe):
            bad.append("edge map does not commute with inversion at %r" % e)
        if h.index(fe) != g.index(e):
            bad.append("index not preserved at %r" % e)
    return bad


def _geometric_key(g: EIGraph, e: str):
    # canonical description of the geometric edge {e, e!} for matching
    u, v = g.origin(e), g.terminus(e)
    a, b = g.index(e), g.index(inverse_id(e))
    return min((u, v, a, b), (v, u, b, a))


def isomorphic(g: EIGraph, h: EIGraph) -> Optional[IsoWitness]:
    """Exhaustive index-preserving isomorphism search.

    Returns the first witness in lexicographic order of vertex assignments,
    or None.  Raises SizeExceeded above the exhaustive-search cap.
    """
    if g.n_vertices() > ISO_SEARCH_CAP or h.n_vertices() > ISO_SEARCH_CAP:
        raise SizeExceeded("isomorphism search capped at %d vertices" % ISO_SEARCH_CAP)
    if g.n_vertices() != h.n_vertices() or len(g.edges) != len(h.edges):
        return None
    gprof, hprof = degree_profile(g), degree_profile(h)
    if sorted(gprof.values()) != sorted(hprof.values()):
        return None

    def out_signature(graph, v):
        return tuple(sorted(graph.index(e) for e in graph.out_edges(v)))

    gsig = {v: out_signature(g, v) for v in g.vertices}
    hsig = {v: out_signature(h, v) for v in h.vertices}
    gverts = list(g.vertices)

    def extend(i, vmap, used):
        if i == len(gverts):
            emap = _match_edges(g, h, vmap)
            if emap is not None:
                return IsoWitness(dict(vmap), emap)
            return None
        v = gverts[i]
        for w in h.vertices:
            if w in used or hsig[w] != gsig[v] or hprof[w] != gprof[v]:
                continue
            vmap[v] = w
            used.add(w)
            found = extend(i + 1, vmap, used)
            if found is not None:
                return found
            del vmap[v]
            used.discard(w)
        return None

    return extend(0, {}, set())


def _match_edges(g: EIGraph, h: EIGraph, vmap) -> Optional[Dict[str, str]]:
    """Pair up geometric edges compatibly with vmap; lex-least assignment."""
    buckets: Dict[tuple, List[str]] = {}
    for e, _ in h.geometric_edges():
        buckets.setdefault(_geometric_key(h, e), []).append(e)
    for b in buckets.values():
        b.sort(reverse=True)
    emap: Dict[str, str] = {}
    for e, ebar in g.geometric_edges():
        u, v = vmap[g.origin(e)], vmap[g.terminus(e)]
        a, b = g.index(e), g.index(ebar)
        key = min((u, v, a, b), (v, u, b, a))
        cands = buckets.get(key)
        if not cands:
            return None
        f = cands.pop()
        # orient f to match e
        if h.origin(f) == u and h.index(f) == a and h.origin(inverse_id(f)) == v and h.index(inverse_id(f)) == b:
            emap[e], emap[ebar] = f, inverse_id(f)
        elif h.origin(inverse_id(f)) == u and h.index(inverse_id(f)) == a and h.origin(f) == v and h.index(f) == b:
            emap[e], emap[ebar] = inverse_id(f), f
        else:
            return None
    return emap


# -- interchange format ----------------------------------------------------
#
# {"vertices": [...], "edges": [{"id", "from", "to", "idx_at_from",
# "idx_at_to"}, ...]} with indices as decimal strings.  Loops and parallel
# edges are allowed; each entry expands to the directed pair id / id!.


def to_obj(g: EIGraph) -> dict:
    edges = []
    for e, ebar in g.geometric_edges():
        edges.append(
            {
                "id": e,
                "from": g.origin(e),
                "to": g.terminus(e),
                "idx_at_from": str(g.index(e)),
                "idx_at_to": str(g.index(ebar)),
            }
        )
    return {"vertices": list(g.vertices), "edges": edges}


def from_obj(obj: dict) -> EIGraph:
    edges = []
    for rec in obj["edges"]:
        edges.append(
            (
                str(rec["id"]),
                str(rec["from"]),
                str(rec["to"]),
                int(str(rec["idx_at_from"])),
                int(str(rec["idx_at_to"])),
            )
        )
    return EIGraph.from_edges([str(v) for v in obj["vertices"]], edges)


def dumps(g: EIGraph) -> str:
    return json.dumps(to_obj(g), sort_keys=True, indent=2)


def loads(text: str) -> EIGraph:
    return from_obj(json.loads(text))


def fresh_id(prefix: str, taken) -> str:
    """Smallest prefixN not colliding with the taken ids (N = 0, 1, ...)."""
    k = 0
    while "%s%d" % (prefix, k) in taken:
        k += 1
    return "%s%d" % (prefix, k)


# -- small standard graphs ---------------------------------------------------


def single_loop(a: int, b: int) -> EIGraph:
    """One vertex with a single loop indexed (a, b)."""
    return EIGraph.from_edges(["v0"], [("l0", "v0", "v0", a, b)])
