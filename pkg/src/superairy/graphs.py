"""Graph-sum oracle: trivalent graphs with rooted spanning trees and their coloured weights.

Graphs are explicit: vertices 0..V-1, a root leaf attached to `root`, ordered leaves attached
to `leaves[k]`, internal edges (u, w, in_tree) with u <= w. Weights are computed by peeling off
the root vertex, which yields one of the cases I (a leaf sits next to the root), I' (both
remaining edges return to one component) or II (two components).
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Dict, List, Sequence, Tuple

from .graded import move_to_front_sign
from .structure import SQASTensors

HALF = Fraction(1, 2)

Edge = Tuple[int, int, bool]


class UnsupportedStructure(ValueError):
    pass


@dataclass(frozen=True)
class DecoratedGraph:
    n_vertices: int
    root: int
    leaves: Tuple[int, ...]
    edges: Tuple[Edge, ...]
    automorphisms: int = 1

    @property
    def genus(self) -> int:
        return len(self.edges) - self.n_vertices + 1

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    def key(self):
        return (self.n_vertices, self.root, self.leaves, self.edges)

    def relabel(self, perm: Sequence[int]) -> "DecoratedGraph":
        return DecoratedGraph(self.n_vertices, perm[self.root], tuple(perm[v] for v in self.leaves),
                              _sorted_edges((perm[u], perm[w], t) for u, w, t in self.edges),
                              self.automorphisms)


def _sorted_edges(edges) -> Tuple[Edge, ...]:
    return tuple(sorted((min(u, w), max(u, w), bool(t)) for u, w, t in edges))


def canonical_form(G: DecoratedGraph) -> Tuple[tuple, int]:
    """(canonical key, |Aut|). Automorphisms are vertex permutations fixing root, leaves, edges and T."""
    V = G.n_vertices
    ident = (G.leaves, G.edges)
    best = None
    aut = 0
    for perm in permutations(range(V)):
        if perm[G.root] == 0:
            H = G.relabel(perm)
            k = (H.leaves, H.edges)
            if best is None or k < best:
                best = k
        if perm[G.root] == G.root and (G.relabel(perm).leaves, G.relabel(perm).edges) == ident:
            aut += 1
    return (V, 0) + best, aut


def is_valid(G: DecoratedGraph, g: int, n: int) -> bool:
    """Membership in the set of graphs with genus g, n non-root leaves, spanning tree conditions."""
    V = G.n_vertices
    if V != 2 * g - 1 + n or len(G.leaves) != n:
        return False
    deg = [0] * V
    deg[G.root] += 1
    for v in G.leaves:
        deg[v] += 1
    adj = defaultdict(list)
    tree_adj = defaultdict(list)
    for u, w, t in G.edges:
        deg[u] += 1
        deg[w] += 1
        if t:
            if u == w:
                return False
            tree_adj[u].append(w)
            tree_adj[w].append(u)
        adj[u].append(w)
        adj[w].append(u)
    if any(d != 3 for d in deg):
        return False
    if sum(1 for e in G.edges if e[2]) != V - 1:
        return False
    parent = {G.root: None}
    depth = {G.root: 0}
    stack = [G.root]
    while stack:
        u = stack.pop()
        for w in tree_adj[u]:
            if w not in parent:
                parent[w] = u
                depth[w] = depth[u] + 1
                stack.append(w)
    if len(parent) != V:
        return False

    def ancestor(a, b):
        while b is not None:
            if b == a:
                return True
            b = parent[b]
        return False

    for u, w, t in G.edges:
        if not t and not (ancestor(u, w) or ancestor(w, u)):
            return False
    return G.genus == g


# -- peeling off the root vertex -------------------------------------------------------------

@dataclass(frozen=True)
class _Piece:
    graph: DecoratedGraph
    root_src: object                 # ("edge", idx) or ("leaf", k) in the parent's E'
    leaf_src: Tuple[object, ...]
    edge_src: Tuple[int, ...]        # parent edge index for each sub-edge


def _subgraph(G: DecoratedGraph, verts: List[int], root_v: int, root_src, leaf_list, edge_ids):
    """leaf_list: [(vertex, src)], edge_ids: parent edges inside verts."""
    ren = {v: k for k, v in enumerate(sorted(verts))}
    edges = []
    for e in edge_ids:
        u, w, t = G.edges[e]
        edges.append(((min(ren[u], ren[w]), max(ren[u], ren[w]), t), e))
    edges.sort()
    sub = DecoratedGraph(len(verts), ren[root_v], tuple(ren[v] for v, _ in leaf_list),
                         tuple(e for e, _ in edges))
    return _Piece(sub, root_src, tuple(s for _, s in leaf_list), tuple(e for _, e in edges))


def decompose(G: DecoratedGraph):
    """Returns ("A", (k1, k2)), ("D",), ("I", k, piece), ("I'", piece) or ("II", positions1, piece1, piece2)."""
    v0 = G.root
    inc_leaves = [k for k, v in enumerate(G.leaves) if v == v0]
    inc_edges = [e for e, (u, w, _) in enumerate(G.edges) if v0 in (u, w)]
    if G.n_vertices == 1:
        if len(inc_leaves) == 2:
            return ("A", tuple(inc_leaves))
        return ("D",)
    others = [v for v in range(G.n_vertices) if v != v0]
    rest_edges = [e for e in range(len(G.edges)) if e not in inc_edges]

    def far(e):
        u, w, _ = G.edges[e]
        return w if u == v0 else u

    def component(start):
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for e in rest_edges:
                u, w, _ = G.edges[e]
                if x in (u, w):
                    y = w if u == x else u
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
        return seen

    if len(inc_leaves) == 1:
        k = inc_leaves[0]
        (e,) = inc_edges
        leaf_list = [(v, ("leaf", j)) for j, v in enumerate(G.leaves) if j != k]
        piece = _subgraph(G, others, far(e), ("edge", e), leaf_list, rest_edges)
        return ("I", k, piece)
    e_a, e_b = inc_edges
    comp = component(far(e_a))
    if far(e_b) in comp:
        e1, e2 = (e_a, e_b) if G.edges[e_a][2] else (e_b, e_a)
        leaf_list = [(far(e2), ("edge", e2))] + [(v, ("leaf", j)) for j, v in enumerate(G.leaves)]
        piece = _subgraph(G, others, far(e1), ("edge", e1), leaf_list, rest_edges)
        return ("I'", piece)
    comp_b = component(far(e_b))
    pieces = []
    for e, cm in ((e_a, comp), (e_b, comp_b)):
        leaf_list = [(v, ("leaf", j)) for j, v in enumerate(G.leaves) if v in cm]
        edges = [x for x in rest_edges if G.edges[x][0] in cm]
        pieces.append(_subgraph(G, sorted(cm), far(e), ("edge", e), leaf_list, edges))
    # put the piece holding the first leaf (if any) first; the choice does not affect weights
    pos = [tuple(s[1] for s in p.leaf_src) for p in pieces]
    if (not pos[0] and pos[1]) or (pos[0] and pos[1] and pos[1][0] < pos[0][0]):
        pieces.reverse()
        pos.reverse()
    return ("II", pos[0], pieces[0], pieces[1])


# -- enumeration ----------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _enumerate(g: int, n: int) -> Tuple[DecoratedGraph, ...]:
    if g < 0 or n < 0:
        return ()
    if 2 * g + n - 2 < 0:
        return ()
    if (g, n) == (0, 2):
        return (DecoratedGraph(1, 0, (0, 0), ()),)
    if (g, n) == (1, 0):
        return (DecoratedGraph(1, 0, (), ((0, 0, False),)),)
    found: Dict[tuple, DecoratedGraph] = {}

    def add(G):
        key, aut = canonical_form(G)
        if key not in found:
            _, root, leaves, edges = key
            found[key] = DecoratedGraph(G.n_vertices, root, leaves, edges, aut)

    def attach(sub: DecoratedGraph):
        # shift sub's vertices by one; the new root vertex is 0
        return [v + 1 for v in range(sub.n_vertices)]

    # case I
    for k in range(n):
        for S in _enumerate(g, n - 1):
            sh = attach(S)
            leaves = [sh[v] for v in S.leaves]
            leaves.insert(k, 0)
            edges = [(sh[u], sh[w], t) for u, w, t in S.edges] + [(0, sh[S.root], True)]
            add(DecoratedGraph(S.n_vertices + 1, 0, tuple(leaves), _sorted_edges(edges)))
    # case I'
    if g >= 1:
        for S in _enumerate(g - 1, n + 1):
            sh = attach(S)
            leaves = [sh[v] for v in S.leaves[1:]]
            edges = [(sh[u], sh[w], t) for u, w, t in S.edges]
            edges += [(0, sh[S.root], True), (0, sh[S.leaves[0]], False)]
            add(DecoratedGraph(S.n_vertices + 1, 0, tuple(leaves), _sorted_edges(edges)))
    # case II
    for r in range(n + 1):
        for pos1 in combinations(range(n), r):
            pos2 = [k for k in range(n) if k not in pos1]
            for g1 in range(g + 1):
                if 2 * g1 + r - 2 < 0 or 2 * (g - g1) + (n - r) - 2 < 0:
                    continue
                for S1 in _enumerate(g1, r):
                    for S2 in _enumerate(g - g1, n - r):
                        o2 = S1.n_vertices + 1
                        leaves = [0] * n
                        for k, v in zip(pos1, S1.leaves):
                            leaves[k] = v + 1
                        for k, v in zip(pos2, S2.leaves):
                            leaves[k] = v + o2
                        edges = [(u + 1, w + 1, t) for u, w, t in S1.edges]
                        edges += [(u + o2, w + o2, t) for u, w, t in S2.edges]
                        edges += [(0, S1.root + 1, True), (0, S2.root + o2, True)]
                        add(DecoratedGraph(S1.n_vertices + S2.n_vertices + 1, 0, tuple(leaves),
                                           _sorted_edges(edges)))
    return tuple(found[k] for k in sorted(found))


def enumerate_graphs(g: int, n_plus_1: int) -> List[DecoratedGraph]:
    """One representative per isomorphism class of genus-g graphs with n_plus_1 leaves (root included)."""
    if g < 0 or n_plus_1 < 0:
        raise ValueError("g and n+1 must be nonnegative")
    n = n_plus_1 - 1
    if n < 0 or 2 * g + n - 2 < 0:
        return []
    return list(_enumerate(g, n))


def brute_force_graphs(g: int, n_plus_1: int) -> Dict[tuple, int]:
    """Canonical key -> number of labelled realisations, by exhaustive stub matching.

    Test oracle only: every labelled structure is generated, so |Aut| = V! / count.
    """
    n = n_plus_1 - 1
    if n < 0 or 2 * g + n - 2 < 0:
        return {}
    V = 2 * g - 1 + n
    labelled = set()
    for root in range(V):
        for leaves in product(range(V), repeat=n):
            stubs = [3] * V
            stubs[root] -= 1
            for v in leaves:
                stubs[v] -= 1
            if min(stubs) < 0:
                continue
            for edges in _multigraphs(stubs):
                nonloop = [k for k, (u, w) in enumerate(edges) if u != w]
                for tree in combinations(nonloop, V - 1):
                    es = _sorted_edges((u, w, k in tree) for k, (u, w) in enumerate(edges))
                    G = DecoratedGraph(V, root, tuple(leaves), es)
                    if G.key() in labelled:
                        continue
                    if is_valid(G, g, n):
                        labelled.add(G.key())
    counts: Dict[tuple, int] = defaultdict(int)
    for V_, root, leaves, edges in labelled:
        key, _ = canonical_form(DecoratedGraph(V_, root, leaves, edges))
        counts[key] += 1
    return dict(counts)


def _multigraphs(stubs: List[int], min_partner=None):
    u = next((v for v, s in enumerate(stubs) if s), None)
    if u is None:
        yield []
        return
    lo = u if min_partner is None or min_partner[0] != u else min_partner[1]
    for w in range(lo, len(stubs)):
        need = 2 if w == u else 1
        if stubs[w] < need or (w != u and stubs[u] < 1):
            continue
        stubs[u] -= 1
        stubs[w] -= 1
        for rest in _multigraphs(stubs, (u, w) if stubs[u] else None):
            yield [(u, w)] + rest
        stubs[u] += 1
        stubs[w] += 1


# -- weights ------------------------------------------------------------------------------

def _require_no_extra(t: SQASTensors):
    if t.basis.has_extra_fermion:
        raise UnsupportedStructure("graph sums are defined only without the extra fermionic variable")


def _unshuffle_sign(pos1: Sequence[int], cols: Sequence[int], p) -> int:
    """Koszul sign of moving the entries at positions pos1 (in order) in front of the others."""
    s = set(pos1)
    inv = 0
    odd_rest = 0
    for k, a in enumerate(cols):
        if k in s:
            if p[a]:
                inv += odd_rest
        elif p[a]:
            odd_rest += 1
    return -1 if inv & 1 else 1


def graph_weight(G: DecoratedGraph, colouring: Dict[object, int], t: SQASTensors):
    """Weight of one coloured graph. colouring maps ("root",), ("leaf", k) and ("edge", e) to indices.

    Each I' step contributes an extra 1/2 (see graph_sum).
    """
    _require_no_extra(t)
    p = t.basis.parities
    root_c = colouring[("root",)]
    leaf_c = [colouring[("leaf", k)] for k in range(G.n_leaves)]
    d = decompose(G)
    if d[0] == "A":
        k1, k2 = d[1]
        return t.A.get((root_c, leaf_c[k1], leaf_c[k2]))
    if d[0] == "D":
        return t.D.get(root_c, Fraction(0))

    def sub_col(piece: _Piece):
        def src(s):
            if s[0] == "leaf":
                return colouring[("leaf", s[1])]
            return colouring[("edge", s[1])]
        col = {("root",): src(piece.root_src)}
        for k, s in enumerate(piece.leaf_src):
            col[("leaf", k)] = src(s)
        for k, e in enumerate(piece.edge_src):
            if ("edge", e) in colouring:
                col[("edge", k)] = colouring[("edge", e)]
        return col

    if d[0] == "I":
        k, piece = d[1], d[2]
        b = colouring[("edge", piece.root_src[1])]
        sgn = move_to_front_sign(leaf_c, k, p)
        return sgn * t.B.get((root_c, leaf_c[k], b)) * graph_weight(piece.graph, sub_col(piece), t)
    if d[0] == "I'":
        piece = d[1]
        c = colouring[("edge", piece.root_src[1])]
        b = colouring[("edge", piece.leaf_src[0][1])]
        return HALF * t.C.get((root_c, b, c)) * graph_weight(piece.graph, sub_col(piece), t)
    pos1, P1, P2 = d[1], d[2], d[3]
    b = colouring[("edge", P1.root_src[1])]
    c = colouring[("edge", P2.root_src[1])]
    sgn = _unshuffle_sign(pos1, leaf_c, p)
    return (sgn * t.C.get((root_c, b, c)) * graph_weight(P1.graph, sub_col(P1), t)
            * graph_weight(P2.graph, sub_col(P2), t))


def colourings(G: DecoratedGraph, indices: Sequence[int], root: int, leaves: Sequence[int]):
    """All colourings with fixed root and leaf colours; internal non-loop edges range over indices."""
    free = [e for e, (u, w, _) in enumerate(G.edges) if u != w]
    for vals in product(indices, repeat=len(free)):
        col = {("root",): root}
        for k, a in enumerate(leaves):
            col[("leaf", k)] = a
        for e, a in zip(free, vals):
            col[("edge", e)] = a
        yield col


class GraphSum:
    """All coloured weights of all graphs for a structure, as sparse maps over (root, leaves...)."""

    def __init__(self, t: SQASTensors):
        _require_no_extra(t)
        self.t = t
        self.p = t.basis.parities
        v = t.view()
        self._A = {(i, a, b): c for (i, a, b), c in t.A.items_full()}
        self._Bup = v["Bup"]
        self._Cpair = defaultdict(list)
        for i, rows in v["C"].items():
            for b, c, val in rows:
                self._Cpair[(b, c)].append((i, val))
        self._W: Dict[tuple, Dict[tuple, object]] = {}
        self._F: Dict[Tuple[int, int], Dict[tuple, object]] = {}

    def weights(self, G: DecoratedGraph) -> Dict[tuple, object]:
        """Colour-summed weight of G as {(root colour,) + leaf colours: value}."""
        key = G.key()
        if key in self._W:
            return self._W[key]
        p = self.p
        d = decompose(G)
        out: Dict[tuple, object] = defaultdict(int)
        if d[0] == "A":
            k1, k2 = d[1]
            for (i, a, b), c in self._A.items():
                cols = [None, None]
                cols[k1], cols[k2] = a, b
                out[(i,) + tuple(cols)] += c
        elif d[0] == "D":
            for i, c in self.t.D.items():
                out[(i,)] += c
        elif d[0] == "I":
            k, piece = d[1], d[2]
            for tup, w in self.weights(piece.graph).items():
                b, rest = tup[0], tup[1:]
                for i, a, c in self._Bup.get(b, ()):
                    leaves = rest[:k] + (a,) + rest[k:]
                    out[(i,) + leaves] += move_to_front_sign(leaves, k, p) * c * w
        elif d[0] == "I'":
            piece = d[1]
            for tup, w in self.weights(piece.graph).items():
                c_, b, rest = tup[0], tup[1], tup[2:]
                for i, c in self._Cpair.get((b, c_), ()):
                    out[(i,) + rest] += HALF * c * w
        else:
            pos1, P1, P2 = d[1], d[2], d[3]
            n = G.n_leaves
            pos2 = [k for k in range(n) if k not in pos1]
            W2 = self.weights(P2.graph)
            for t1, w1 in self.weights(P1.graph).items():
                b, f1 = t1[0], t1[1:]
                for t2, w2 in W2.items():
                    c_, f2 = t2[0], t2[1:]
                    rows = self._Cpair.get((b, c_))
                    if not rows:
                        continue
                    leaves = [None] * n
                    for k, a in zip(pos1, f1):
                        leaves[k] = a
                    for k, a in zip(pos2, f2):
                        leaves[k] = a
                    leaves = tuple(leaves)
                    sgn = _unshuffle_sign(pos1, leaves, p)
                    for i, c in rows:
                        out[(i,) + leaves] += sgn * c * w1 * w2
        res = {k: v for k, v in out.items() if v}
        self._W[key] = res
        return res

    def table(self, g: int, n_plus_1: int) -> Dict[tuple, object]:
        """F_{g,n+1} for every ordering of (root, leaves) with a nonzero value."""
        if (g, n_plus_1) in self._F:
            return self._F[(g, n_plus_1)]
        acc: Dict[tuple, object] = defaultdict(int)
        for G in enumerate_graphs(g, n_plus_1):
            for tup, w in self.weights(G).items():
                acc[tup] += w * Fraction(1, G.automorphisms)
        res = {k: v for k, v in acc.items() if v}
        self._F[(g, n_plus_1)] = res
        return res


_SUMS: Dict[int, GraphSum] = {}


def graph_sum(g: int, root: int, leaves: Sequence[int], t: SQASTensors):
    """F_{g,n+1}[root, leaves] as a sum of coloured graph weights over automorphism counts."""
    _require_no_extra(t)
    gs = _SUMS.get(id(t))
    if gs is None or gs.t is not t:
        gs = GraphSum(t)
        _SUMS[id(t)] = gs
    return gs.table(g, len(leaves) + 1).get((root,) + tuple(leaves), Fraction(0))


def compare_with_recursion(t: SQASTensors, table, max_chi: int) -> List[Tuple[int, tuple, object, object]]:
    """Mismatches (g, indices, graph value, recursion value) for all 2g+n-2 <= max_chi (n = non-root leaves)."""
    gs = GraphSum(t)
    bad = []
    for chi in range(max_chi + 1):
        for g in range(chi // 2 + 2):
            n = chi + 2 - 2 * g
            if n < 0:
                continue
            F = gs.table(g, n + 1)
            seen = set()
            for tup, v in F.items():
                seen.add(tup)
                r = table.get(g, tup)
                if r != v:
                    bad.append((g, tup, v, r))
            for gg, idx, v in table.items(chi + 1):
                if gg != g or len(idx) != n + 1 or idx in seen:
                    continue
                bad.append((g, idx, Fraction(0), v))
    return bad
