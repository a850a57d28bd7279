r"""Deformation moves on edge-indexed graphs.

Collapsing a non-loop edge e with i(e) = 1 identifies its endpoints,
deletes {e, e!}, and multiplies the index of every other edge leaving
the absorbed vertex by i(e!):

      a \           / b          na \      / b
         *---1:n---*       =>        *----*
      c /           \ d          nc /      \ d

Expanding is the inverse operation; sliding an edge f across e (i(e) = 1)
reattaches f at the far endpoint with index i(f) * i(e!) and equals an
expansion followed by a collapse.  Blow-ups split a geometric edge into
parallel edges whose index pairs sum to the original; the identification
map is a covering map, verified by the covers module.

Every move returns the new graph together with a MoveRecord that stores
enough parameters to replay the move, the direction of the induced
group homomorphism, and (for blow-ups) the covering-map witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .core import EIGraph, degree_profile, fresh_id, inverse_id
from .covers import CoveringMap

# arrow direction of the induced homomorphism between deck groups
INTO_RESULT = "into_result"  # pi1(source) -> pi1(result), injective copci
INTO_SOURCE = "into_source"  # pi1(result) -> pi1(source)
ISOMORPHISM = "isomorphism"


class MoveError(Exception):
    pass


class NotCollapsible(MoveError):
    pass


class NonDivisibleIndex(MoveError):
    pass


class SlidePreconditionFailed(MoveError):
    pass


class IndexTooSmall(MoveError):
    pass


class PartitionMismatch(MoveError):
    pass


@dataclass
class MoveRecord:
    kind: str  # collapse | expand | slide | standard_blow_up | general_blow_up | subdivide
    params: Dict
    arrow: str
    witness: Optional[object] = None  # CoveringMap for blow-ups

    def to_obj(self):
        obj = {"kind": self.kind, "params": _params_obj(self.params), "arrow": self.arrow}
        if isinstance(self.witness, CoveringMap):
            obj["witness"] = {"kind": "cover", "map": self.witness.to_obj()}
        return obj


def _params_obj(params):
    out = {}
    for k, v in sorted(params.items()):
        if isinstance(v, (list, tuple)):
            out[k] = [list(x) if isinstance(x, (list, tuple)) else x for x in v]
        else:
            out[k] = v
    return out


@dataclass
class MoveSequence:
    """A chain of moves; each step's source is the previous step's result."""

    start: EIGraph
    steps: List[Tuple[MoveRecord, EIGraph]] = field(default_factory=list)
    degenerate: bool = False

    @property
    def end(self) -> EIGraph:
        return self.steps[-1][1] if self.steps else self.start

    def __len__(self):
        return len(self.steps)

    def extend(self, other: "MoveSequence"):
        assert other.start == self.end
        self.steps.extend(other.steps)

    def records(self) -> List[MoveRecord]:
        return [r for r, _ in self.steps]

    def all_into_result(self) -> bool:
        return all(r.arrow in (INTO_RESULT, ISOMORPHISM) for r, _ in self.steps)

    def all_iso(self) -> bool:
        return all(r.arrow == ISOMORPHISM for r, _ in self.steps)

    def to_obj(self):
        from . import core

        return {
            "start": core.to_obj(self.start),
            "steps": [r.to_obj() for r, _ in self.steps],
            "end": core.to_obj(self.end),
        }


def apply_move(g: EIGraph, kind: str, params: Dict) -> Tuple[EIGraph, MoveRecord]:
    """Replay a recorded move; used by the certificate verifier."""
    if kind == "collapse":
        return collapse(g, params["edge"])
    if kind == "expand":
        return expand(
            g,
            params["vertex"],
            int(params["divisor"]),
            params["moved"],
            new_vertex=params.get("new_vertex"),
            new_edge=params.get("new_edge"),
        )
    if kind == "slide":
        return slide(g, params["edge"], params["across"])
    if kind == "standard_blow_up":
        return standard_blow_up(g, params["edge"], new_edge=params.get("new_edge"))
    if kind == "general_blow_up":
        return general_blow_up(g, params["edge"], [tuple(int(x) for x in p) for p in params["parts"]])
    if kind == "subdivide":
        return subdivide(g, params["edge"], new_vertex=params.get("new_vertex"), new_edge=params.get("new_edge"))
    raise MoveError("unknown move kind %r" % kind)


# -- collapse / expand ---------------------------------------------------------


def collapse(g: EIGraph, e: str) -> Tuple[EIGraph, MoveRecord]:
    """Collapse the non-loop edge e with i(e) = 1; its origin is absorbed
    into its terminus.  Indices of other edges leaving the origin are
    multiplied by i(e!)."""
    if not g.has_edge(e):
        raise NotCollapsible("no such edge %r" % e)
    if g.is_loop(e):
        raise NotCollapsible("cannot collapse a loop")
    if g.index(e) != 1:
        raise NotCollapsible("collapse needs i(e) = 1, got %d" % g.index(e))
    ebar = inverse_id(e)
    a, b = g.origin(e), g.terminus(e)  # a is absorbed into b
    mult = g.index(ebar)
    verts = [v for v in g.vertices if v != a]
    origin = {}
    index = {}
    for f in g.edges:
        if f in (e, ebar):
            continue
        origin[f] = b if g.origin(f) == a else g.origin(f)
        index[f] = g.index(f) * mult if g.origin(f) == a else g.index(f)
    rec = MoveRecord(
        kind="collapse",
        params={"edge": e},
        arrow=ISOMORPHISM if mult == 1 else INTO_RESULT,
    )
    return EIGraph(verts, origin, index), rec


def expand(
    g: EIGraph,
    vertex: str,
    divisor: int,
    moved: Sequence[str],
    new_vertex: Optional[str] = None,
    new_edge: Optional[str] = None,
) -> Tuple[EIGraph, MoveRecord]:
    """Inverse of a collapse: split `vertex`, sending the `moved` outgoing
    edge ends to a fresh vertex w joined by a new edge indexed (divisor, 1),
    and divide each moved index by `divisor`.

    Collapsing the new edge from the w side restores g exactly.
    """
    moved = sorted(set(moved))
    n = int(divisor)
    if n < 1:
        raise NonDivisibleIndex("divisor must be >= 1")
    if vertex not in g.vertices:
        raise MoveError("no such vertex %r" % vertex)
    for f in moved:
        if not g.has_edge(f) or g.origin(f) != vertex:
            raise MoveError("moved edge %r does not start at %r" % (f, vertex))
        if g.index(f) % n != 0:
            raise NonDivisibleIndex("index of %r is not divisible by %d" % (f, n))
    w = new_vertex or fresh_id("w", g.vertices)
    d = new_edge or fresh_id("x", [x.rstrip("!") for x in g.edges])
    if w in g.vertices or g.has_edge(d) or g.has_edge(d + "!"):
        raise MoveError("fresh ids collide with existing ones")
    verts = list(g.vertices) + [w]
    origin = dict()
    index = dict()
    for f in g.edges:
        if f in moved:
            origin[f] = w
            index[f] = g.index(f) // n
        else:
            origin[f] = g.origin(f)
            index[f] = g.index(f)
    origin[d], index[d] = vertex, n
    origin[d + "!"], index[d + "!"] = w, 1
    rec = MoveRecord(
        kind="expand",
        params={"vertex": vertex, "divisor": n, "moved": list(moved), "new_vertex": w, "new_edge": d},
        arrow=ISOMORPHISM if n == 1 else INTO_SOURCE,
    )
    return EIGraph(verts, origin, index), rec


def slide(g: EIGraph, f: str, across: str) -> Tuple[EIGraph, MoveRecord]:
    """Slide the edge f across `across` (which must have index 1 and share
    its origin with f): f is reattached at the far endpoint with index
    i(f) * i(across!)."""
    e = across
    if not (g.has_edge(f) and g.has_edge(e)):
        raise SlidePreconditionFailed("missing edge")
    if f in (e, inverse_id(e)):
        raise SlidePreconditionFailed("cannot slide an edge across itself")
    if g.origin(e) != g.origin(f):
        raise SlidePreconditionFailed("edges do not share their origin")
    if g.index(e) != 1:
        raise SlidePreconditionFailed("slide needs i(across) = 1")
    mult = g.index(inverse_id(e))
    origin = {x: g.origin(x) for x in g.edges}
    index = {x: g.index(x) for x in g.edges}
    origin[f] = g.terminus(e)
    index[f] = g.index(f) * mult
    rec = MoveRecord(
        kind="slide",
        params={"edge": f, "across": e},
        arrow=ISOMORPHISM if mult == 1 else INTO_RESULT,
    )
    return EIGraph(g.vertices, origin, index), rec


# -- blow-ups ------------------------------------------------------------------


def standard_blow_up(g: EIGraph, e: str, new_edge: Optional[str] = None) -> Tuple[EIGraph, MoveRecord]:
    """Add a trivially indexed parallel copy of {e, e!} and lower the original
    indices by one; requires both indices >= 2.  The natural projection is a
    covering map and is attached as the witness."""
    ebar = inverse_id(e)
    if not g.has_edge(e):
        raise MoveError("no such edge %r" % e)
    if g.index(e) < 2 or g.index(ebar) < 2:
        raise IndexTooSmall("standard blow-up needs both indices >= 2")
    d = new_edge or fresh_id("p", [x.rstrip("!") for x in g.edges])
    origin = {x: g.origin(x) for x in g.edges}
    index = {x: g.index(x) for x in g.edges}
    index[e] -= 1
    index[ebar] -= 1
    origin[d], index[d] = g.origin(e), 1
    origin[d + "!"], index[d + "!"] = g.terminus(e), 1
    result = EIGraph(g.vertices, origin, index)
    emap = {x: x for x in g.edges}
    emap[d], emap[d + "!"] = e, ebar
    witness = CoveringMap(result, g, {v: v for v in g.vertices}, emap)
    rec = MoveRecord(
        kind="standard_blow_up",
        params={"edge": e, "new_edge": d},
        arrow=INTO_SOURCE,
        witness=witness,
    )
    return result, rec


def general_blow_up(g: EIGraph, e: str, parts: Sequence[Tuple[int, int]]) -> Tuple[EIGraph, MoveRecord]:
    """Replace {e, e!} by len(parts) parallel geometric edges with the given
    index pairs; the pairs must be positive and sum to (i(e), i(e!))."""
    ebar = inverse_id(e)
    if not g.has_edge(e):
        raise MoveError("no such edge %r" % e)
    parts = [(int(a), int(b)) for a, b in parts]
    if not parts or any(a < 1 or b < 1 for a, b in parts):
        raise PartitionMismatch("parts must be pairs of positive integers")
    if sum(a for a, _ in parts) != g.index(e) or sum(b for _, b in parts) != g.index(ebar):
        raise PartitionMismatch("part sums do not match the edge indices")
    base = e[:-1] if e.endswith("!") else e
    origin = {x: g.origin(x) for x in g.edges if x not in (e, ebar)}
    index = {x: g.index(x) for x in g.edges if x not in (e, ebar)}
    emap = {x: x for x in origin}
    for t, (a, b) in enumerate(parts):
        gid = "%s~p%d" % (base, t)
        if gid in origin or gid + "!" in origin:
            raise MoveError("blow-up id %r collides with an existing edge" % gid)
        origin[gid], index[gid] = g.origin(e), a
        origin[gid + "!"], index[gid + "!"] = g.terminus(e), b
        emap[gid], emap[gid + "!"] = e, ebar
    result = EIGraph(g.vertices, origin, index)
    witness = CoveringMap(result, g, {v: v for v in g.vertices}, emap)
    rec = MoveRecord(
        kind="general_blow_up",
        params={"edge": e, "parts": [list(p) for p in parts]},
        arrow=INTO_SOURCE,
        witness=witness,
    )
    return result, rec


def subdivide(
    g: EIGraph, e: str, new_vertex: Optional[str] = None, new_edge: Optional[str] = None
) -> Tuple[EIGraph, MoveRecord]:
    """Insert a midpoint on {e, e!}: pieces carry (i(e), 1) and (1, i(e!)).

    Realized as the expansion of the terminus moving e!, so collapsing the
    (1, i(e!)) piece at the midpoint restores g exactly; on a loop the result
    is a bigon.
    """
    ebar = inverse_id(e)
    result, rec = expand(
        g,
        g.terminus(e),
        g.index(ebar),
        [ebar],
        new_vertex=new_vertex,
        new_edge=new_edge,
    )
    rec = MoveRecord(
        kind="subdivide",
        params={
            "edge": e,
            "new_vertex": rec.params["new_vertex"],
            "new_edge": rec.params["new_edge"],
        },
        arrow=rec.arrow,
    )
    return result, rec


# -- reductions ----------------------------------------------------------------


def _hair_vertex(g: EIGraph) -> Optional[str]:
    # vertex with a single outgoing edge, of index 1 (necessarily non-loop)
    for v in g.vertices:
        out = g.out_edges(v)
        if len(out) == 1 and g.index(out[0]) == 1 and not g.is_loop(out[0]):
            return v
    return None


def _inessential_collapse_edge(g: EIGraph) -> Optional[str]:
    # an inessential vertex has exactly two outgoing edges of index 1 that
    # are not mutually inverse; collapsing one of them un-subdivides it.
    # A vertex whose two index-1 edges are both loop directions offers no
    # legal collapse and is left alone.
    for v in g.vertices:
        ones = [x for x in g.out_edges(v) if g.index(x) == 1]
        if len(ones) != 2 or ones[1] == inverse_id(ones[0]):
            continue
        for e in ones:
            if not g.is_loop(e):
                return e
    return None


def minimalize(g: EIGraph) -> Tuple[EIGraph, MoveSequence]:
    """Collapse away vertices with a single outgoing edge of index 1 until
    none remain.  A graph that reduces to a single edgeless vertex is
    returned as such with the sequence flagged degenerate."""
    seq = MoveSequence(start=g)
    cur = g
    while True:
        v = _hair_vertex(cur)
        if v is None:
            break
        e = cur.out_edges(v)[0]
        cur, rec = collapse(cur, e)
        seq.steps.append((rec, cur))
    if not cur.edges:
        seq.degenerate = True
    return cur, seq


def essentialize(g: EIGraph) -> Tuple[EIGraph, MoveSequence]:
    """Minimalize, then collapse inessential vertices (exactly two outgoing
    index-1 edges that are not mutually inverse) until the graph is essential."""
    cur, seq = minimalize(g)
    while True:
        e = _inessential_collapse_edge(cur)
        if e is None:
            break
        cur, rec = collapse(cur, e)
        seq.steps.append((rec, cur))
        cur2, sub = minimalize(cur)
        seq.steps.extend(sub.steps)
        seq.degenerate = seq.degenerate or sub.degenerate
        cur = cur2
    if not cur.edges:
        seq.degenerate = True
    return cur, seq


def is_minimal(g: EIGraph) -> bool:
    return _hair_vertex(g) is None


def is_essential(g: EIGraph) -> bool:
    return is_minimal(g) and _inessential_collapse_edge(g) is None


def is_elementary(g: EIGraph) -> bool:
    """True iff the universal cover is a point or a line (the deck group is
    compact or 2-ended): after minimalizing, no vertex has degree >= 3."""
    m, _ = minimalize(g)
    if not m.edges:
        return True
    return max(degree_profile(m).values()) <= 2


def canonical_expand_spec(g: EIGraph, e: str):
    """The expansion data whose application to collapse(g, e) restores g.

    Returns (vertex, divisor, moved, new_vertex, new_edge) in the collapsed
    graph's terms; `moved` ids keep their collapsed indices times divisor.
    """
    ebar = inverse_id(e)
    a, b = g.origin(e), g.terminus(e)
    moved = [f for f in g.out_edges(a) if f not in (e, ebar)]
    return b, g.index(ebar), moved, a, e if not e.endswith("!") else ebar
