"""Finite directed multigraphs, the contracting forest and the contracted graph.

Edges are identified by id, never by endpoint pair, so parallel edges and
self-loops are first-class.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple


class GraphInputError(ValueError):
    """Raised for malformed graph input (dangling endpoints, duplicate ids, bad JSON)."""


class HypothesisError(ValueError):
    """Raised when a graph does not meet the standing hypotheses of the theory."""


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    tgt: str


@dataclass(frozen=True)
class DirectedMultigraph:
    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    # lookup tables; derived in __post_init__
    src: Mapping[str, str] = field(init=False, repr=False, compare=False)
    tgt: Mapping[str, str] = field(init=False, repr=False, compare=False)
    in_edges: Mapping[str, Tuple[str, ...]] = field(init=False, repr=False, compare=False)
    out_edges: Mapping[str, Tuple[str, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(set(self.vertices)) != len(self.vertices):
            dup = [v for v, c in Counter(self.vertices).items() if c > 1]
            raise GraphInputError(f"duplicate vertex ids: {dup}")
        vset = set(self.vertices)
        src: Dict[str, str] = {}
        tgt: Dict[str, str] = {}
        ins: Dict[str, List[str]] = {v: [] for v in self.vertices}
        outs: Dict[str, List[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            if e.id in src:
                raise GraphInputError(f"duplicate edge id: {e.id!r}")
            for end in (e.src, e.tgt):
                if end not in vset:
                    raise GraphInputError(f"edge {e.id!r} has undeclared endpoint {end!r}")
            src[e.id] = e.src
            tgt[e.id] = e.tgt
            outs[e.src].append(e.id)
            ins[e.tgt].append(e.id)
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "tgt", tgt)
        object.__setattr__(self, "in_edges", {v: tuple(x) for v, x in ins.items()})
        object.__setattr__(self, "out_edges", {v: tuple(x) for v, x in outs.items()})

    @classmethod
    def build(cls, vertices: Iterable[str], edges: Iterable[Tuple[str, str, str]]) -> "DirectedMultigraph":
        return cls(tuple(vertices), tuple(Edge(i, s, t) for i, s, t in edges))

    @property
    def edge_ids(self) -> Tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    def multiplicity(self, u: str, v: str) -> int:
        return sum(1 for e in self.out_edges[u] if self.tgt[e] == v)

    def relabel(self, vertex_map: Mapping[str, str], edge_map: Optional[Mapping[str, str]] = None,
                order: Optional[Sequence[str]] = None) -> "DirectedMultigraph":
        """Copy of the graph with renamed vertices/edges, optionally reordered."""
        em = edge_map or {}
        edges = [Edge(em.get(e.id, e.id), vertex_map[e.src], vertex_map[e.tgt]) for e in self.edges]
        verts = [vertex_map[v] for v in self.vertices]
        if order is not None:
            verts = list(order)
        return DirectedMultigraph(tuple(verts), tuple(edges))

    def to_json(self) -> Dict[str, Any]:
        return {
            "vertices": list(self.vertices),
            "edges": [{"id": e.id, "src": e.src, "tgt": e.tgt} for e in self.edges],
        }

    @classmethod
    def from_json(cls, data: Any) -> "DirectedMultigraph":
        if not isinstance(data, dict) or "vertices" not in data or "edges" not in data:
            raise GraphInputError("graph JSON must be an object with 'vertices' and 'edges'")
        try:
            verts = [str(v) for v in data["vertices"]]
            edges = [Edge(str(e["id"]), str(e["src"]), str(e["tgt"])) for e in data["edges"]]
        except (KeyError, TypeError) as exc:
            raise GraphInputError(f"malformed edge record: {exc}") from exc
        return cls(tuple(verts), tuple(edges))


def load_graph(text: str) -> DirectedMultigraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphInputError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return DirectedMultigraph.from_json(data)


@dataclass(frozen=True)
class ValidationReport:
    strongly_connected: bool
    is_cycle: bool
    nu: int
    standing_hypotheses_met: bool

    def to_json(self) -> Dict[str, Any]:
        return {
            "strongly_connected": self.strongly_connected,
            "is_cycle": self.is_cycle,
            "nu": self.nu,
            "standing_hypotheses_met": self.standing_hypotheses_met,
        }


def _reachable(g: DirectedMultigraph, start: str, forward: bool = True) -> set:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        nbrs = (g.tgt[e] for e in g.out_edges[v]) if forward else (g.src[e] for e in g.in_edges[v])
        for w in nbrs:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def is_strongly_connected(g: DirectedMultigraph) -> bool:
    if not g.vertices:
        return False
    v0 = g.vertices[0]
    n = len(g.vertices)
    return len(_reachable(g, v0, True)) == n and len(_reachable(g, v0, False)) == n


def single_incoming_edges(g: DirectedMultigraph) -> Tuple[str, ...]:
    """Edges that are the unique incoming edge of their target, in edge order."""
    return tuple(e.id for e in g.edges if len(g.in_edges[e.tgt]) == 1)


def validate_graph(g: DirectedMultigraph) -> ValidationReport:
    sc = is_strongly_connected(g)
    # a strongly connected graph is a cycle iff every vertex has in- and out-degree one
    cycle = sc and bool(g.edges) and all(
        len(g.in_edges[v]) == 1 and len(g.out_edges[v]) == 1 for v in g.vertices
    )
    nu = len(g.edges) - len(single_incoming_edges(g))
    return ValidationReport(sc, cycle, nu, sc and not cycle and nu > 1)


@dataclass(frozen=True)
class ContractionData:
    graph: DirectedMultigraph
    single_incoming_edges: Tuple[str, ...]
    roots: Tuple[str, ...]
    tree_of: Mapping[str, str]
    root_path: Mapping[str, Tuple[str, ...]]
    leaf_levels: Mapping[str, Tuple[int, ...]]
    contracted: DirectedMultigraph
    # edge -> ("edge", e) for kept edges, ("idem", R) for tree edges
    lambda_edge: Mapping[str, Tuple[str, str]]

    @property
    def kept_edges(self) -> Tuple[str, ...]:
        return self.contracted.edge_ids

    def tree_vertices(self, root: str) -> Tuple[str, ...]:
        return tuple(v for v in self.graph.vertices if self.tree_of[v] == root)

    def tree_edges(self, root: str) -> Tuple[str, ...]:
        return tuple(f for f in self.single_incoming_edges if self.tree_of[self.graph.tgt[f]] == root)

    def to_json(self) -> Dict[str, Any]:
        out = self.contracted.to_json()
        out["roots"] = list(self.roots)
        out["tree_edges"] = list(self.single_incoming_edges)
        out["tree_of"] = {v: self.tree_of[v] for v in self.graph.vertices}
        out["leaf_levels"] = {r: list(self.leaf_levels[r]) for r in self.roots}
        return out


def contracting_forest(g: DirectedMultigraph) -> ContractionData:
    report = validate_graph(g)
    if not report.standing_hypotheses_met:
        raise HypothesisError(
            "graph must be strongly connected, not a cycle, with more than one edge outside "
            f"the contracting forest (got {report.to_json()})"
        )
    tree_set = set(single_incoming_edges(g))
    roots = tuple(v for v in g.vertices if len(g.in_edges[v]) >= 2)
    root_set = set(roots)

    tree_of: Dict[str, str] = {}
    root_path: Dict[str, Tuple[str, ...]] = {}
    for v in g.vertices:
        path: List[str] = []
        w = v
        seen = {w}
        while w not in root_set:
            (f,) = g.in_edges[w]
            path.append(f)
            w = g.src[f]
            if w in seen:
                raise AssertionError(f"single-incoming edges contain a cycle through {w!r}")
            seen.add(w)
        tree_of[v] = w
        root_path[v] = tuple(reversed(path))

    # every vertex sits in exactly one tree and every tree edge stays inside its tree
    for f in tree_set:
        assert tree_of[g.src[f]] == tree_of[g.tgt[f]]
    assert set(tree_of.values()) == root_set

    leaf_levels: Dict[str, Tuple[int, ...]] = {}
    for r in roots:
        members = [v for v in g.vertices if tree_of[v] == r]
        if len(members) == 1:
            leaf_levels[r] = ()
            continue
        leaves = [v for v in members if not any(e in tree_set for e in g.out_edges[v])]
        leaf_levels[r] = tuple(sorted(len(root_path[v]) for v in leaves))

    kept = [e for e in g.edges if e.id not in tree_set]
    contracted = DirectedMultigraph(roots, tuple(Edge(e.id, tree_of[e.src], e.tgt) for e in kept))
    lam = {e.id: (("idem", tree_of[e.tgt]) if e.id in tree_set else ("edge", e.id)) for e in g.edges}
    return ContractionData(
        graph=g,
        single_incoming_edges=tuple(e.id for e in g.edges if e.id in tree_set),
        roots=roots,
        tree_of=tree_of,
        root_path=root_path,
        leaf_levels=leaf_levels,
        contracted=contracted,
        lambda_edge=lam,
    )


def _profile(g: DirectedMultigraph, v: str, weights: Optional[Mapping[str, Any]]) -> tuple:
    loops = g.multiplicity(v, v)
    w = weights[v] if weights is not None else None
    return (repr(w), len(g.in_edges[v]), len(g.out_edges[v]), loops)


def iter_isomorphisms(
    g1: DirectedMultigraph,
    g2: DirectedMultigraph,
    weights1: Optional[Mapping[str, Any]] = None,
    weights2: Optional[Mapping[str, Any]] = None,
) -> Iterator[Dict[str, str]]:
    """Yield vertex bijections preserving weights and edge multiplicities.

    Bijections come out in lexicographic order of the images of ``g1.vertices``
    (images ordered by their position in ``g2.vertices``).
    """
    if len(g1.vertices) != len(g2.vertices) or len(g1.edges) != len(g2.edges):
        return
    prof1 = {v: _profile(g1, v, weights1) for v in g1.vertices}
    prof2 = {v: _profile(g2, v, weights2) for v in g2.vertices}
    if sorted(prof1.values()) != sorted(prof2.values()):
        return
    order = list(g1.vertices)
    mapping: Dict[str, str] = {}
    used: set = set()

    def extend(i: int) -> Iterator[Dict[str, str]]:
        if i == len(order):
            yield dict(mapping)
            return
        v = order[i]
        for w in g2.vertices:
            if w in used or prof2[w] != prof1[v]:
                continue
            ok = True
            for u in order[:i]:
                mu = mapping[u]
                if g1.multiplicity(u, v) != g2.multiplicity(mu, w) or g1.multiplicity(v, u) != g2.multiplicity(w, mu):
                    ok = False
                    break
            if not ok:
                continue
            mapping[v] = w
            used.add(w)
            yield from extend(i + 1)
            del mapping[v]
            used.discard(w)

    yield from extend(0)


def is_isomorphic(
    g1: DirectedMultigraph,
    g2: DirectedMultigraph,
    weights1: Optional[Mapping[str, Any]] = None,
    weights2: Optional[Mapping[str, Any]] = None,
) -> Optional[Dict[str, str]]:
    """First weight-preserving isomorphism g1 -> g2, or None.

    If only ``weights1`` is given it is used for both graphs (same labelling).
    """
    if weights1 is not None and weights2 is None:
        weights2 = weights1
    return next(iter_isomorphisms(g1, g2, weights1, weights2), None)


def canonical_form(g: DirectedMultigraph, weights: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
    """Relabelling-independent description of a (weighted) multigraph.

    Minimises the multiplicity matrix over all vertex orders compatible with the
    sorted vertex profiles; intended for the small contracted graphs.
    """
    prof = {v: _profile(g, v, weights) for v in g.vertices}
    classes: Dict[tuple, List[str]] = {}
    for v in g.vertices:
        classes.setdefault(prof[v], []).append(v)
    keys = sorted(classes)
    best = None
    for perms in itertools.product(*(itertools.permutations(classes[k]) for k in keys)):
        order = [v for p in perms for v in p]
        mat = tuple(tuple(g.multiplicity(u, v) for v in order) for u in order)
        if best is None or mat < best[0]:
            best = (mat, order)
    mat, order = best if best is not None else ((), [])
    out: Dict[str, Any] = {"size": len(order), "multiplicities": [list(r) for r in mat]}
    if weights is not None:
        out["weights"] = [weights[v] for v in order]
    return out
