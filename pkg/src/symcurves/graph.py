"""Genus-weighted dual graphs: data model, stability, canonical forms, I/O.

A dual graph is a connected multigraph (loops and parallel edges allowed)
whose vertices carry a nonnegative integer weight.  Weight 0 is a rational
component, weight 1 an elliptic tail, weights >= 2 are higher-genus
components awaiting reduction.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Iterator

GENERAL_CODE_CAP = 12


class GraphError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(GraphError):
    """Malformed textual input; carries a position when one is known."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class StructureError(GraphError):
    """Input violates a structural invariant (e.g. disconnected)."""


class DomainError(GraphError):
    """Operation called outside its domain (e.g. genus too small)."""


class CapacityError(GraphError):
    """A configured work cap was exceeded."""


@dataclass(frozen=True)
class VertexRecord:
    id: int
    weight: int


class DualGraph:
    """Immutable genus-weighted multigraph.

    Edges are stored as a sorted tuple of unordered id pairs; loops appear
    as (v, v) and parallel edges as repeated pairs.
    """

    __slots__ = ("_weights", "_edges", "_adj", "_hash")

    def __init__(self, vertices: Iterable, edges: Iterable):
        weights: dict[int, int] = {}
        for v in vertices:
            if isinstance(v, VertexRecord):
                vid, w = v.id, v.weight
            else:
                vid, w = v
            if not isinstance(vid, int) or not isinstance(w, int):
                raise StructureError("vertex ids and weights must be integers")
            if w < 0:
                raise StructureError(f"negative weight at vertex {vid}")
            if vid in weights:
                raise StructureError(f"duplicate vertex id {vid}")
            weights[vid] = w
        if not weights:
            raise StructureError("graph needs at least one vertex")
        norm_edges = []
        for e in edges:
            a, b = e
            if a not in weights or b not in weights:
                raise StructureError(f"edge ({a},{b}) references unknown vertex")
            norm_edges.append((a, b) if a <= b else (b, a))
        self._weights = dict(sorted(weights.items()))
        self._edges = tuple(sorted(norm_edges))
        adj: dict[int, list[int]] = {v: [] for v in self._weights}
        for a, b in self._edges:
            adj[a].append(b)
            if a != b:
                adj[b].append(a)
        self._adj = {v: tuple(sorted(ns)) for v, ns in adj.items()}
        self._hash = hash((tuple(self._weights.items()), self._edges))
        if not self._connected():
            raise StructureError("graph must be connected")

    def _connected(self) -> bool:
        start = next(iter(self._weights))
        seen = {start}
        todo = deque([start])
        while todo:
            v = todo.popleft()
            for u in self._adj[v]:
                if u not in seen:
                    seen.add(u)
                    todo.append(u)
        return len(seen) == len(self._weights)

    # -- basic accessors --------------------------------------------------

    @property
    def vertex_ids(self) -> tuple[int, ...]:
        return tuple(self._weights)

    @property
    def vertices(self) -> tuple[VertexRecord, ...]:
        return tuple(VertexRecord(v, w) for v, w in self._weights.items())

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self._edges

    def weight(self, v: int) -> int:
        return self._weights[v]

    def degree(self, v: int) -> int:
        """Edge-end count at v; a loop contributes two ends."""
        d = 0
        for a, b in self._edges:
            if a == v:
                d += 1
            if b == v:
                d += 1
        return d

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def edge_multiplicity(self, a: int, b: int) -> int:
        key = (a, b) if a <= b else (b, a)
        return sum(1 for e in self._edges if e == key)

    @property
    def is_tree(self) -> bool:
        return len(self._edges) == len(self._weights) - 1

    def has_loops(self) -> bool:
        return any(a == b for a, b in self._edges)

    def fresh_id(self) -> int:
        return max(self._weights) + 1

    def replace(self, vertices=None, edges=None) -> "DualGraph":
        return DualGraph(
            vertices if vertices is not None else self._weights.items(),
            edges if edges is not None else self._edges,
        )

    def induced(self, keep: Iterable[int]) -> "DualGraph":
        keep = set(keep)
        return DualGraph(
            [(v, w) for v, w in self._weights.items() if v in keep],
            [e for e in self._edges if e[0] in keep and e[1] in keep],
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, DualGraph):
            return NotImplemented
        return self._weights == other._weights and self._edges == other._edges

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"DualGraph({list(self._weights.items())}, {list(self._edges)})"


# -- genus and stability ---------------------------------------------------


def genus(g: DualGraph) -> int:
    """Sum of vertex weights plus the cyclomatic number |E| - |V| + 1."""
    return sum(g.weight(v) for v in g.vertex_ids) + len(g.edges) - len(g.vertex_ids) + 1


def is_stable(g: DualGraph) -> bool:
    """Every rational vertex needs three edge-ends, every elliptic one."""
    if genus(g) < 2:
        return False
    for v in g.vertex_ids:
        w = g.weight(v)
        d = g.degree(v)
        if w == 0 and d < 3:
            return False
        if w == 1 and d < 1:
            return False
    return True


def stabilize(g: DualGraph) -> DualGraph:
    """Contract rational vertices with fewer than three edge-ends.

    Valence-2 rational vertices are smoothed into a single edge, valence-1
    ones deleted, repeatedly until a fixed point.  Genus is preserved.
    """
    if genus(g) < 2:
        raise DomainError(f"stabilize requires genus >= 2, got {genus(g)}")
    weights = dict((v, g.weight(v)) for v in g.vertex_ids)
    edges = list(g.edges)

    def deg(v):
        return sum((a == v) + (b == v) for a, b in edges)

    changed = True
    while changed:
        changed = False
        for v in sorted(weights):
            if weights[v] != 0:
                continue
            d = deg(v)
            if d >= 3:
                continue
            incident = [e for e in edges if v in e]
            if any(a == b for a, b in incident):
                raise StructureError("cannot stabilize isolated loop component")
            if d == 2:
                (a1, b1), (a2, b2) = incident
                u = a1 if b1 == v else b1
                w = a2 if b2 == v else b2
                edges.remove(incident[0])
                edges.remove(incident[1])
                edges.append((u, w) if u <= w else (w, u))
                del weights[v]
                changed = True
                break
            if d <= 1:
                for e in incident:
                    edges.remove(e)
                del weights[v]
                changed = True
                break
    out = DualGraph(weights.items(), edges)
    assert genus(out) == genus(g)
    return out


# -- canonical codes -------------------------------------------------------


def _tree_adjacency(g: DualGraph) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {v: [] for v in g.vertex_ids}
    for a, b in g.edges:
        adj[a].append(b)
        adj[b].append(a)
    return adj


def tree_centers(g: DualGraph) -> list[int]:
    """Middle vertex (or two adjacent ones) of every longest geodesic."""
    adj = _tree_adjacency(g)
    n = len(adj)
    if n <= 2:
        return sorted(adj)
    deg = {v: len(ns) for v, ns in adj.items()}
    layer = [v for v, d in deg.items() if d <= 1]
    remaining = n
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            deg[v] = 0
            for u in adj[v]:
                if deg[u] > 1:
                    deg[u] -= 1
                    if deg[u] == 1:
                        nxt.append(u)
        layer = nxt
    return sorted(layer)


def _rooted_tree_code(g: DualGraph, root: int, parent: int | None) -> bytes:
    children = [u for u in g.neighbors(root) if u != parent]
    codes = sorted(_rooted_tree_code(g, c, root) for c in children)
    return b"(" + str(g.weight(root)).encode() + b":" + b"".join(codes) + b")"


def _tree_code(g: DualGraph, root) -> bytes:
    if root is None:
        centers = tree_centers(g)
        if len(centers) == 1:
            return b"V" + _rooted_tree_code(g, centers[0], None)
        u, w = centers
        halves = sorted([_rooted_tree_code(g, u, w), _rooted_tree_code(g, w, u)])
        return b"E" + halves[0] + halves[1]
    if isinstance(root, tuple):
        u, w = root
        if g.edge_multiplicity(u, w) == 0:
            raise StructureError(f"({u},{w}) is not an edge")
        halves = sorted([_rooted_tree_code(g, u, w), _rooted_tree_code(g, w, u)])
        return b"E" + halves[0] + halves[1]
    return b"V" + _rooted_tree_code(g, root, None)


def _refine_colors(g: DualGraph, init: dict[int, tuple]) -> dict[int, int]:
    """Iterated neighborhood refinement; returns stable integer colors."""
    mult: dict[tuple[int, int], int] = Counter()
    loops: dict[int, int] = Counter()
    for a, b in g.edges:
        if a == b:
            loops[a] += 1
        else:
            mult[(a, b)] += 1
            mult[(b, a)] += 1
    order = {sig: i for i, sig in enumerate(sorted(set(init.values())))}
    colors = {v: order[init[v]] for v in g.vertex_ids}
    while True:
        sigs = {}
        for v in g.vertex_ids:
            around = sorted((m, colors[u]) for (x, u), m in mult.items() if x == v)
            sigs[v] = (colors[v], loops[v], tuple(around))
        order = {sig: i for i, sig in enumerate(sorted(set(sigs.values())))}
        new = {v: order[sigs[v]] for v in g.vertex_ids}
        if new == colors:
            return colors
        colors = new


def _general_code(g: DualGraph, root: int | None) -> bytes:
    n = len(g.vertex_ids)
    if n > GENERAL_CODE_CAP:
        raise CapacityError(
            f"general canonical code capped at {GENERAL_CODE_CAP} vertices, got {n}"
        )
    ids = list(g.vertex_ids)
    init = {v: (0 if root == v else 1, g.weight(v)) for v in ids}
    colors = _refine_colors(g, init)
    mult = {}
    for a, b in g.edges:
        key = (a, b)
        mult[key] = mult.get(key, 0) + 1

    def entry(a, b):
        if a > b:
            a, b = b, a
        return mult.get((a, b), 0)

    # Vertices are placed cell-by-cell in refined-color order; within the
    # admissible candidates the adjacency rows are minimized lexicographically.
    best: list | None = None

    def search(placed: list[int], rows: list[tuple]):
        nonlocal best
        d = len(placed)
        if best is not None and rows > best[:d]:
            return
        if d == n:
            if best is None or rows < best:
                best = list(rows)
            return
        remaining = [v for v in ids if v not in placed]
        target = min(colors[v] for v in remaining)
        cands = [v for v in remaining if colors[v] == target]
        seen_rows = set()
        for v in cands:
            row = (g.weight(v), entry(v, v)) + tuple(entry(v, p) for p in placed)
            if row in seen_rows:
                continue
            seen_rows.add(row)
            search(placed + [v], rows + [row])

    search([], [])
    assert best is not None
    return repr((n, best)).encode()


def canonical_code(g: DualGraph, root=None, mode: str = "auto") -> bytes:
    """Canonical byte code: equal codes iff isomorphic (weights respected).

    Trees use a rooted/unrooted subtree encoding anchored at the geodesic
    middle; small general graphs use a minimal adjacency encoding over
    weight-preserving orderings.  ``root`` may be a vertex id or an edge
    pair and pins the isomorphism at that anchor.
    """
    if mode == "tree" or (mode == "auto" and g.is_tree):
        if not g.is_tree:
            raise StructureError("tree-mode canonical code requires an acyclic graph")
        return _tree_code(g, root)
    if isinstance(root, tuple):
        raise StructureError("general-mode codes support only vertex roots")
    return _general_code(g, root)


# -- text formats ----------------------------------------------------------


def parse(text: str) -> DualGraph:
    """Parse the JSON graph format into a DualGraph."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from exc
    if not isinstance(data, dict) or set(data) != {"vertices", "edges"}:
        raise ParseError('expected an object with exactly "vertices" and "edges"')
    vertices = []
    for item in data["vertices"]:
        if not isinstance(item, dict) or set(item) != {"id", "weight"}:
            raise ParseError(f"bad vertex entry {item!r}")
        vertices.append((item["id"], item["weight"]))
    edges = []
    for item in data["edges"]:
        if not isinstance(item, list) or len(item) != 2:
            raise ParseError(f"bad edge entry {item!r}")
        edges.append(tuple(item))
    try:
        return DualGraph(vertices, edges)
    except StructureError as exc:
        raise ParseError(str(exc)) from exc


def serialize(g: DualGraph) -> str:
    """Inverse of parse; vertices sorted by id, edges sorted as pairs."""
    data = {
        "vertices": [{"id": v, "weight": g.weight(v)} for v in g.vertex_ids],
        "edges": [[a, b] for a, b in g.edges],
    }
    return json.dumps(data, separators=(",", ":"))


def to_dot(g: DualGraph) -> str:
    """Graphviz output: rational vertices hollow, elliptic filled."""
    lines = ["graph dual {"]
    for v in g.vertex_ids:
        w = g.weight(v)
        if w == 0:
            attrs = "shape=circle"
        elif w == 1:
            attrs = "shape=circle, style=filled"
        else:
            attrs = f'shape=circle, label="{w}"'
        lines.append(f"  v{v} [{attrs}];")
    for a, b in g.edges:
        lines.append(f"  v{a} -- v{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
