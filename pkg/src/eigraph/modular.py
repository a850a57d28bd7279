"""The modular homomorphism of an edge-indexed graph.

Along a combinatorial path e_1 e_2 ... e_n the value

    Delta(e_1 ... e_n) = prod_t i(e_t) / i(e_t!)

is invariant under homotopy rel endpoints, so the fundamental cycles of any
spanning tree generate the image of Delta on the fundamental group.  The
graph (and any group acting with this quotient) is unimodular when that
image is trivial; a tree-underlying graph is always unimodular.

Values are kept as prime-exponent vectors so that quantities like 8/(q r s)
compare exactly; floats never appear.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence

from .core import EIGraph, inverse_id
from .covers import spanning_tree
from .moves import is_minimal
from . import sieve


class NotAPath(Exception):
    pass


class NotMinimal(Exception):
    pass


# exponent vectors: dict prime -> nonzero integer exponent

ExponentVector = Dict[int, int]


def ev_one() -> ExponentVector:
    return {}


def ev_mul(a: ExponentVector, b: ExponentVector) -> ExponentVector:
    out = dict(a)
    for p, k in b.items():
        out[p] = out.get(p, 0) + k
        if out[p] == 0:
            del out[p]
    return out


def ev_inv(a: ExponentVector) -> ExponentVector:
    return {p: -k for p, k in a.items()}


def ev_of_ratio(num: int, den: int) -> ExponentVector:
    return ev_mul(sieve.factorint(num), ev_inv(sieve.factorint(den)))


def ev_is_one(a: ExponentVector) -> bool:
    return not a


def ev_to_fraction(a: ExponentVector) -> Fraction:
    out = Fraction(1)
    for p, k in a.items():
        out *= Fraction(p) ** k
    return out


def delta_of_path(g: EIGraph, path: Sequence[str]) -> ExponentVector:
    """Delta of a composable edge path, as a prime-exponent vector."""
    for e in path:
        if not g.has_edge(e):
            raise NotAPath("no such edge %r" % e)
    for s, t in zip(path, path[1:]):
        if g.terminus(s) != g.origin(t):
            raise NotAPath("edges %r and %r do not compose" % (s, t))
    out = ev_one()
    for e in path:
        out = ev_mul(out, ev_of_ratio(g.index(e), g.index(inverse_id(e))))
    return out


@dataclass
class ModularData:
    """Generators of the image of Delta: one per non-tree geometric edge."""

    base: str
    tree: List[str]  # geometric ids of the spanning tree
    generators: Dict[str, ExponentVector]  # non-tree geometric id -> Delta of its fundamental cycle

    @property
    def unimodular(self) -> bool:
        return all(ev_is_one(v) for v in self.generators.values())

    def generator_fractions(self) -> Dict[str, Fraction]:
        return {k: ev_to_fraction(v) for k, v in self.generators.items()}


def _tree_paths(g: EIGraph, tree: List[str], base: str) -> Dict[str, List[str]]:
    """Directed tree path from base to every vertex."""
    tset = set(tree)
    adj: Dict[str, List[str]] = {v: [] for v in g.vertices}
    for e in g.edges:
        gid = e[:-1] if e.endswith("!") else e
        if gid in tset:
            adj[g.origin(e)].append(e)
    paths = {base: []}
    frontier = [base]
    while frontier:
        nxt = []
        for v in frontier:
            for e in sorted(adj[v]):
                w = g.terminus(e)
                if w not in paths:
                    paths[w] = paths[v] + [e]
                    nxt.append(w)
        frontier = nxt
    return paths


def modular_data(g: EIGraph, base: str = None) -> ModularData:
    base = base or g.vertices[0]
    tree = spanning_tree(g)
    paths = _tree_paths(g, tree, base)
    gens: Dict[str, ExponentVector] = {}
    tset = set(tree)
    for e, ebar in g.geometric_edges():
        if e in tset:
            continue
        # fundamental cycle: base -> alpha(e), e, omega(e) -> base
        fwd = delta_of_path(g, paths[g.origin(e)]) if paths[g.origin(e)] else ev_one()
        back = delta_of_path(g, paths[g.terminus(e)]) if paths[g.terminus(e)] else ev_one()
        val = ev_mul(ev_mul(fwd, ev_of_ratio(g.index(e), g.index(ebar))), ev_inv(back))
        gens[e] = val
    return ModularData(base=base, tree=tree, generators=gens)


def is_unimodular(g: EIGraph) -> bool:
    """Trivial modular homomorphism; immediate for tree-underlying graphs."""
    if g.betti() == 0:
        return True
    return modular_data(g).unimodular


def invariant_primes(g: EIGraph) -> frozenset:
    """Primes dividing some index of a minimal edge-indexed graph.

    The caller must minimalize first: the set is only a deformation
    invariant for minimal graphs.
    """
    if not is_minimal(g):
        raise NotMinimal("invariant primes are defined for minimal graphs; minimalize first")
    out = set()
    for e in g.edges:
        out.update(sieve.factorint(g.index(e)))
    return frozenset(out)


def degree_form_check(g: EIGraph, N: int) -> bool:
    """Every universal-cover degree is a sum of at most K N-smooth numbers,
    K being the maximal number of outgoing edges at a vertex."""
    from .core import degree_profile

    assert is_minimal(g)
    K = max(len(g.out_edges(v)) for v in g.vertices)
    return all(sieve.in_s(d, K, N) for d in degree_profile(g).values() if d >= 1)


def unimodular_degree_bound(b1: int) -> int:
    """Maximal vertex degree of a finite graph with first Betti number b1 and
    minimum degree >= 2 (an Euler-characteristic count): 2 * b1.

    This bounds the degrees of minimal trees of unimodular groups via their
    free cocompact lattices.
    """
    assert b1 >= 2, "bound applies to non-elementary (rank >= 2) graphs"
    return 2 * b1
