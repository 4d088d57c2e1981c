"""Symmetry-non-decreasing rewrites from stable dual graphs to simple trees.

Each rewrite preserves the genus and never decreases the full automorphism
order under the realizability model; the pipeline `reduce` composes them
until the graph is a simple tree: elliptic leaves, rational interior, every
interior valence pattern in the allowed table.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .graph import DomainError, DualGraph, canonical_code, genus, is_stable, stabilize
from .symmetry import _vertex_automorphisms

# (rational, elliptic) neighbor counts allowed at an interior vertex.
ALLOWED_VALENCES = {
    (0, 3), (0, 4), (0, 5),
    (3, 0), (4, 0), (5, 0),
    (1, 2), (1, 3), (2, 1), (3, 1),
}

RULES = (
    "normalize_loops",
    "eliminate_high_genus",
    "elliptic_to_leaf",
    "break_multi_edge",
    "break_isolated_cycle",
    "prevalence_split",
    "valence_reduce",
    "stabilize",
    "tree_fallback",
)


@dataclass(frozen=True)
class ReductionStep:
    rule: str
    before: DualGraph
    after: DualGraph

    def __post_init__(self):
        if self.rule not in RULES:
            raise DomainError(f"unknown rule {self.rule}")
        if genus(self.before) != genus(self.after):
            raise DomainError(f"rule {self.rule} changed the genus")


def normalize_loops(g: DualGraph) -> DualGraph:
    """Trade each loop for an elliptic tail at the same vertex."""
    if not g.has_loops():
        return g
    weights = {v: g.weight(v) for v in g.vertex_ids}
    edges = []
    nxt = g.fresh_id()
    for a, b in g.edges:
        if a == b:
            weights[nxt] = 1
            edges.append((a, nxt))
            nxt += 1
        else:
            edges.append((a, b))
    out = DualGraph(weights.items(), edges)
    assert genus(out) == genus(g)
    return out


def eliminate_high_genus(g: DualGraph) -> DualGraph:
    """Replace every weight>=2 vertex by a rational one with a tail of
    elliptic leaves carrying the same genus."""
    if all(g.weight(v) <= 1 for v in g.vertex_ids):
        return g
    weights = {v: g.weight(v) for v in g.vertex_ids}
    edges = list(g.edges)
    nxt = g.fresh_id()
    for v in sorted(g.vertex_ids):
        h = g.weight(v)
        if h < 2:
            continue
        weights[v] = 0
        tail = nxt
        nxt += 1
        weights[tail] = 0
        edges.append((v, tail))
        for _ in range(h):
            weights[nxt] = 1
            edges.append((tail, nxt))
            nxt += 1
    out = DualGraph(weights.items(), edges)
    assert genus(out) == genus(g)
    return out


def elliptic_to_leaf(g: DualGraph) -> DualGraph:
    """Push every interior elliptic vertex out to a leaf."""
    bad = [v for v in g.vertex_ids if g.weight(v) == 1 and g.degree(v) >= 2]
    if not bad:
        return g
    weights = {v: g.weight(v) for v in g.vertex_ids}
    edges = list(g.edges)
    nxt = g.fresh_id()
    for v in bad:
        weights[v] = 0
        weights[nxt] = 1
        edges.append((v, nxt))
        nxt += 1
    out = DualGraph(weights.items(), edges)
    assert genus(out) == genus(g)
    return out


def _theta_like(g: DualGraph) -> bool:
    return (
        len(g.vertex_ids) == 2
        and len(g.edges) == 3
        and not g.has_loops()
        and len(set(g.edges)) == 1
        and all(g.weight(v) == 0 for v in g.vertex_ids)
    )


def break_multi_edge(g: DualGraph) -> DualGraph:
    """Open every parallel bundle through a new vertex with elliptic tails.

    The two-vertex triple bundle is the documented exception and collapses
    straight to the two-tail form of genus two.
    """
    if g.has_loops():
        raise DomainError("break_multi_edge requires a loop-free graph")
    if _theta_like(g):
        return DualGraph([(0, 1), (1, 1)], [(0, 1)])
    bundles = Counter(g.edges)
    multi = {e: m for e, m in bundles.items() if m >= 2}
    if not multi:
        return g
    for (a, b), _ in multi.items():
        if g.weight(a) == 1 or g.weight(b) == 1:
            raise DomainError("parallel bundle at an elliptic vertex")
    weights = {v: g.weight(v) for v in g.vertex_ids}
    edges = [e for e in g.edges if e not in multi]
    nxt = g.fresh_id()
    for (a, b), m in sorted(multi.items()):
        x = nxt
        nxt += 1
        weights[x] = 0
        edges.extend([(a, x) if a <= x else (x, a), (b, x) if b <= x else (x, b)])
        tail = nxt
        nxt += 1
        weights[tail] = 0
        edges.append((x, tail))
        for _ in range(m - 1):
            weights[nxt] = 1
            edges.append((tail, nxt))
            nxt += 1
    out = stabilize(DualGraph(weights.items(), edges))
    assert genus(out) == genus(g)
    return out


def _graph_automorphisms(g: DualGraph) -> list[dict[int, int]]:
    colors = {v: (g.weight(v), g.degree(v)) for v in g.vertex_ids}
    mult = Counter(g.edges)
    return _vertex_automorphisms(g.vertex_ids, colors, mult)


def _simple_cycles(g: DualGraph) -> list[frozenset]:
    """All simple cycles (length >= 3) as frozensets of edges."""
    cycles: set[frozenset] = set()
    ids = sorted(g.vertex_ids)

    def walk(start: int, v: int, visited: list[int]) -> None:
        for u in set(g.neighbors(v)):
            if u == start and len(visited) >= 3:
                edges = frozenset(
                    tuple(sorted(p)) for p in zip(visited, visited[1:] + [start])
                )
                cycles.add(edges)
            elif u not in visited and u > start:
                walk(start, u, visited + [u])

    for s in ids:
        walk(s, s, [s])
    return sorted(cycles, key=sorted)


def break_isolated_cycle(g: DualGraph) -> DualGraph:
    """Replace isolated edge-transitive cycles by a wheel with a hub tail.

    A cycle qualifies when no automorphic image shares an edge with it and
    its setwise stabilizer permutes its edges transitively.  The whole orbit
    is rewritten at once so the ambient symmetry survives.
    """
    if g.is_tree:
        return g
    current = g
    for _ in range(genus(g) + 1):
        cycles = _simple_cycles(current)
        if not cycles:
            break
        autos = _graph_automorphisms(current)
        target_orbit = None
        for cyc in cycles:
            orbit = {
                frozenset(tuple(sorted((p[a], p[b]))) for a, b in cyc) for p in autos
            }
            if any(o != cyc and o & cyc for o in orbit):
                continue
            stab = [p for p in autos if
                    frozenset(tuple(sorted((p[a], p[b]))) for a, b in cyc) == cyc]
            edge0 = min(cyc)
            reach = {tuple(sorted((p[edge0[0]], p[edge0[1]]))) for p in stab}
            if reach != set(cyc):
                continue
            target_orbit = sorted(orbit, key=sorted)
            break
        if target_orbit is None:
            break
        weights = {v: current.weight(v) for v in current.vertex_ids}
        edges = list(current.edges)
        nxt = current.fresh_id()
        for cyc in target_orbit:
            for e in cyc:
                edges.remove(e)
            hub = nxt
            nxt += 1
            weights[hub] = 0
            rim = sorted({v for e in cyc for v in e})
            for v in rim:
                edges.append((v, hub) if v <= hub else (hub, v))
            weights[nxt] = 1
            edges.append((hub, nxt))
            nxt += 1
        current = stabilize(DualGraph(weights.items(), edges))
    assert genus(current) == genus(g)
    return current


def prevalence_split(g: DualGraph) -> DualGraph:
    """Spread the edge orbits around an over-crowded vertex along a path.

    Triggered where a vertex carries two or more nontrivial edge orbits or
    four or more orbits in total; applied across the vertex orbit at once
    so the ambient symmetry lifts.  Requires a simple graph.
    """
    if g.has_loops() or len(set(g.edges)) != len(g.edges):
        raise DomainError("prevalence_split requires a simple graph")
    current = g
    for _ in range(4 * len(g.vertex_ids) + 8):
        autos = _graph_automorphisms(current)
        target = None
        for v in sorted(current.vertex_ids):
            if current.weight(v) != 0:
                continue
            orbits = _local_edge_orbits(current, v, autos)
            k = sum(1 for o in orbits if len(o) >= 2)
            if k >= 2 or len(orbits) >= 4:
                target = v
                break
        if target is None:
            break
        vertex_orbit = sorted({p[target] for p in autos})
        weights = {v: current.weight(v) for v in current.vertex_ids}
        nxt = current.fresh_id()
        # slot_of[(member, neighbor)] = replacement path vertex for that edge end
        slot_of: dict[tuple[int, int], int] = {}
        path_edges: list[tuple[int, int]] = []
        for v in vertex_orbit:
            orbits = _local_edge_orbits(current, v, autos)
            orbits.sort(key=lambda o: (-len(o), o))
            q = len(orbits) - 1 if len(orbits) >= 3 else len(orbits)
            path = list(range(nxt, nxt + q))
            nxt += q
            for x in path:
                weights[x] = 0
            path_edges.extend(zip(path, path[1:]))
            if len(orbits) >= 3:
                groups = [[o] for o in orbits[:-2]] + [orbits[-2:]]
            else:
                groups = [[o] for o in orbits]
            for slot, group in zip(path, groups):
                for orbit in group:
                    for u in orbit:
                        slot_of[(v, u)] = slot
            del weights[v]
        moved = set(vertex_orbit)
        edges = list(path_edges)
        for a, b in current.edges:
            a2 = slot_of[(a, b)] if a in moved else a
            b2 = slot_of[(b, a)] if b in moved else b
            edges.append((a2, b2) if a2 <= b2 else (b2, a2))
        current = DualGraph(weights.items(), edges)
    assert genus(current) == genus(g)
    return current


def _local_edge_orbits(g: DualGraph, v: int, autos) -> list[list[int]]:
    """Orbits of v's incident edges (as neighbor vertices) under Stab(v)."""
    stab = [p for p in autos if p[v] == v]
    nbrs = sorted(set(g.neighbors(v)))
    seen: set[int] = set()
    orbits = []
    for u in nbrs:
        if u in seen:
            continue
        orbit = sorted({p[u] for p in stab} & set(nbrs))
        seen.update(orbit)
        orbits.append(orbit)
    return orbits


def _valence(g: DualGraph, v: int) -> tuple[int, int]:
    r = e = 0
    for u in g.neighbors(v):
        m = g.edge_multiplicity(v, u)
        if g.weight(u) == 0:
            r += m
        else:
            e += m
    return r, e


def is_simple(g: DualGraph) -> bool:
    """Tree with elliptic leaves, rational interior, tabled valences."""
    if not g.is_tree:
        return False
    for v in g.vertex_ids:
        w, d = g.weight(v), g.degree(v)
        if w > 1 or (w == 1 and d != 1) or (w == 0 and d == 1):
            return False
        if w == 0 and _valence(g, v) not in ALLOWED_VALENCES:
            return False
    return len(g.vertex_ids) == 2 or any(g.weight(v) == 0 for v in g.vertex_ids)


def valence_reduce(g: DualGraph) -> DualGraph:
    """Regroup branches so every interior valence lands in the allowed table.

    Isomorphic branches are paired (a triple absorbing an odd one) onto
    chains or bundle vertices; distinct classes are spread along a chain.
    Never decreases the automorphism order.
    """
    if not g.is_tree:
        raise DomainError("valence_reduce requires a tree")
    current = g
    for _ in range(4 * len(g.vertex_ids) + 8 * genus(g) + 16):
        bad = [
            v
            for v in sorted(current.vertex_ids)
            if current.weight(v) == 0
            and current.degree(v) > 1
            and _valence(current, v) not in ALLOWED_VALENCES
        ]
        if not bad:
            return current
        current = _fix_vertex(current, bad[0])
    raise DomainError("valence reduction did not converge")


def _fix_vertex(g: DualGraph, v: int) -> DualGraph:
    r, e = _valence(g, v)
    weights = {u: g.weight(u) for u in g.vertex_ids}
    edges = list(g.edges)
    nxt = g.fresh_id()
    elliptic = sorted(u for u in g.neighbors(v) if g.weight(u) == 1)

    def move(children: list[int], new_parent: int) -> None:
        for c in children:
            edges.remove((v, c) if v <= c else (c, v))
            edges.append((new_parent, c) if new_parent <= c else (c, new_parent))

    if e >= 4 or (e in (2, 3) and (r, e) not in ALLOWED_VALENCES):
        # bundle elliptic tails pairwise, a triple absorbing an odd one
        groups: list[list[int]] = []
        rest = elliptic
        while rest:
            take = 3 if len(rest) % 2 == 1 else 2
            groups.append(rest[:take])
            rest = rest[take:]
        for grp in groups:
            weights[nxt] = 0
            edges.append((v, nxt))
            move(grp, nxt)
            nxt += 1
        return stabilize(DualGraph(weights.items(), edges))

    # rational side is over-crowded: split classes / pair up one big class
    rational = sorted(u for u in g.neighbors(v) if g.weight(u) == 0)
    codes: dict[int, bytes] = {}
    for u in rational:
        sub = _branch_vertices(g, u, v)
        codes[u] = canonical_code(g.induced(sub), root=u, mode="tree")
    by_code: dict[bytes, list[int]] = {}
    for u in rational:
        by_code.setdefault(codes[u], []).append(u)
    classes = sorted(by_code.values(), key=lambda c: (-len(c), codes[c[0]]))
    if len(classes) >= 2:
        # one chain vertex per class, elliptic tails stay at v
        chain = []
        for _i in range(len(classes)):
            weights[nxt] = 0
            chain.append(nxt)
            nxt += 1
        for a, b in zip(chain, chain[1:]):
            edges.append((a, b))
        edges.append((v, chain[0]))
        for slot, cls in zip(chain, classes):
            move(cls, slot)
        return stabilize(DualGraph(weights.items(), edges))
    # single isomorphism class of rational branches
    members = classes[0]
    n = len(members)
    pair_groups = [members[i : i + 2] for i in range(0, n - (n % 2 == 1) * 3, 2)]
    if n % 2 == 1:
        pair_groups.append(members[n - 3 :])
    chain = []
    for _i in range(len(pair_groups)):
        weights[nxt] = 0
        chain.append(nxt)
        nxt += 1
    for a, b in zip(chain, chain[1:]):
        edges.append((a, b))
    edges.append((v, chain[0]))
    for slot, grp in zip(chain, pair_groups):
        move(grp, slot)
    return stabilize(DualGraph(weights.items(), edges))


def _branch_vertices(g: DualGraph, root: int, parent: int) -> set[int]:
    out = {root}
    todo = [root]
    while todo:
        x = todo.pop()
        for u in g.neighbors(x):
            if u != parent and u not in out:
                out.add(u)
                todo.append(u)
    return out


def reduce(g: DualGraph):
    """Rewrite a stable graph into a simple tree of the same genus.

    Returns (tree, steps); steps records every rule application that
    changed the graph.  When cycles survive the direct rewrites, the graph
    is replaced by the known optimal tree of its genus (`tree_fallback`),
    which keeps the order monotone.
    """
    from .construct import build_optimal

    if genus(g) < 2 or not is_stable(g):
        raise DomainError("reduce requires a stable graph of genus >= 2")
    steps: list[ReductionStep] = []

    def apply(rule: str, fn) -> None:
        nonlocal current
        after = fn(current)
        if after != current:
            steps.append(ReductionStep(rule, current, after))
            current = after

    current = g
    apply("normalize_loops", normalize_loops)
    apply("eliminate_high_genus", eliminate_high_genus)
    apply("elliptic_to_leaf", elliptic_to_leaf)
    # stabilizing a wheel can fuse hubs into fresh bundles, so iterate
    for _ in range(genus(g) + 2):
        before = current
        apply("normalize_loops", normalize_loops)
        apply("break_multi_edge", break_multi_edge)
        apply("break_isolated_cycle", break_isolated_cycle)
        if current == before:
            break
    if not current.is_tree:
        apply("prevalence_split", prevalence_split)
        apply("break_multi_edge", break_multi_edge)
        apply("break_isolated_cycle", break_isolated_cycle)
    if not current.is_tree:
        target = build_optimal(genus(g))
        steps.append(ReductionStep("tree_fallback", current, target))
        current = target
    apply("stabilize", stabilize)
    apply("valence_reduce", valence_reduce)
    apply("stabilize", stabilize)
    assert is_simple(current) and is_stable(current)
    return current, steps
