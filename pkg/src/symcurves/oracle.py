"""Brute-force ground truth: exhaustive enumeration and independent orders.

Everything here is desk-scale by design.  The enumerations are complete up
to isomorphism within their caps; the duplicate order implementations share
nothing with the production recursion beyond the admissibility rules they
both encode, so agreement is meaningful evidence.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product

from .graph import (
    CapacityError,
    DomainError,
    DualGraph,
    canonical_code,
    genus,
    is_stable,
)
from .symmetry import aut_order, gaut_tree

EXHAUSTIVE_CAP = 8
GENERAL_GENUS_CAP = 4


@dataclass(frozen=True)
class EnumerationSpec:
    genus: int
    mode: str = "simple_trees"  # or "general_graphs"
    max_vertices: int = 10
    cap: int = EXHAUSTIVE_CAP


def enumerate_graphs(spec: EnumerationSpec):
    """Stream one canonical representative per isomorphism class."""
    if spec.mode == "simple_trees":
        if spec.genus > spec.cap:
            raise CapacityError(f"tree enumeration capped at genus {spec.cap}")
        yield from enumerate_trees(spec.genus)
    elif spec.mode == "general_graphs":
        if spec.genus > GENERAL_GENUS_CAP:
            raise CapacityError(
                f"general enumeration capped at genus {GENERAL_GENUS_CAP}"
            )
        yield from enumerate_general(spec.genus, spec.max_vertices)
    else:
        raise DomainError(f"unknown enumeration mode {spec.mode!r}")


# -- stable trees --------------------------------------------------------


def _unlabeled_trees(n: int) -> list[list[tuple[int, int]]]:
    """Edge lists of all unlabeled trees on n vertices (ids 0..n-1),
    decoded from every Pruefer sequence and deduplicated."""
    import heapq

    if n == 1:
        return [[]]
    if n == 2:
        return [[(0, 1)]]
    seen: dict[bytes, list[tuple[int, int]]] = {}
    for seq in product(range(n), repeat=n - 2):
        degree = [1] * n
        for v in seq:
            degree[v] += 1
        heap = [v for v in range(n) if degree[v] == 1]
        heapq.heapify(heap)
        edges = []
        for v in seq:
            u = heapq.heappop(heap)
            edges.append((min(u, v), max(u, v)))
            degree[v] -= 1
            if degree[v] == 1:
                heapq.heappush(heap, v)
        u, w = heapq.heappop(heap), heapq.heappop(heap)
        edges.append((min(u, w), max(u, w)))
        g = DualGraph([(i, 0) for i in range(n)], edges)
        code = canonical_code(g, mode="tree")
        if code not in seen:
            seen[code] = edges
    return list(seen.values())


def enumerate_trees(g: int) -> list[DualGraph]:
    """All stable trees of genus g: g elliptic leaves on a rational
    interior whose vertices keep at least three edge-ends."""
    if g < 2:
        raise DomainError("tree enumeration needs genus >= 2")
    out: dict[bytes, DualGraph] = {}
    if g == 2:
        t = DualGraph([(0, 1), (1, 1)], [(0, 1)])
        return [t]
    # one interior skeleton of i vertices, then distribute g leaves
    for i in range(1, g - 1):
        for skeleton in _unlabeled_trees(i):
            deg = [0] * i
            for a, b in skeleton:
                deg[a] += 1
                deg[b] += 1
            minimum = [max(0, 3 - d) for d in deg]
            spare = g - sum(minimum)
            if spare < 0:
                continue
            for extra in _compositions(spare, i):
                leaves = [m + e for m, e in zip(minimum, extra)]
                vertices = [(v, 0) for v in range(i)]
                edges = list(skeleton)
                nxt = i
                for v in range(i):
                    for _ in range(leaves[v]):
                        vertices.append((nxt, 1))
                        edges.append((v, nxt))
                        nxt += 1
                t = DualGraph(vertices, edges)
                code = canonical_code(t, mode="tree")
                if code not in out:
                    out[code] = t
    return [out[c] for c in sorted(out)]


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


# -- stable general multigraphs -------------------------------------------


def _rational_cores(n: int, n_edges: int, leaf_budget: int) -> list[tuple[tuple[int, int], ...]]:
    """Connected multigraphs (loops allowed) on n rational vertices with
    the given edge count, up to isomorphism.

    Grown one edge per level with canonical deduplication; partial graphs
    whose stability deficit cannot be paid by the remaining edges plus the
    available leaves are pruned.
    """
    slots = list(combinations_with_replacement(range(n), 2))

    def deficiency(edges) -> int:
        deg = [0] * n
        for a, b in edges:
            deg[a] += 2 if a == b else 1
            if a != b:
                deg[b] += 1
        return sum(max(0, 3 - d) for d in deg)

    reps: dict[int, list] = {0: [tuple()]}
    for level in range(1, n_edges + 1):
        remaining = n_edges - level
        nxt: dict[bytes, tuple] = {}
        for prev in reps[level - 1]:
            for slot in slots:
                edges = tuple(sorted(list(prev) + [slot]))
                if deficiency(edges) > leaf_budget + 2 * remaining:
                    continue
                key = _multiset_key(n, edges)
                if key not in nxt:
                    nxt[key] = edges
        reps[level] = list(nxt.values())
    out = []
    for edges in reps[n_edges]:
        if len(_components(n, edges)) == 1:
            out.append(edges)
    return out


def _multiset_key(n: int, edges) -> bytes:
    """Isomorphism key for a possibly disconnected rational multigraph."""
    comps = _components(n, edges)
    parts = []
    for comp in comps:
        remap = {v: i for i, v in enumerate(sorted(comp))}
        sub_edges = [
            (remap[a], remap[b]) for a, b in edges if a in comp and b in comp
        ]
        sub = DualGraph([(i, 0) for i in range(len(comp))], sub_edges)
        parts.append(canonical_code(sub, mode="general"))
    return b"|".join(sorted(parts))


def _components(n: int, edges):
    adj = {v: set() for v in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    comps = []
    left = set(range(n))
    while left:
        v = left.pop()
        comp = {v}
        todo = [v]
        while todo:
            x = todo.pop()
            for u in adj[x]:
                if u not in comp:
                    comp.add(u)
                    todo.append(u)
        left -= comp
        comps.append(comp)
    return comps


def enumerate_general(g: int, max_vertices: int = 10) -> list[DualGraph]:
    """All stable weight-{0,1} multigraphs with elliptic leaves, genus g."""
    if g < 2:
        raise DomainError("general enumeration needs genus >= 2")
    out: dict[bytes, DualGraph] = {}
    for t in enumerate_trees(g):
        if len(t.vertex_ids) <= max_vertices:
            out[canonical_code(t, mode="general")] = t
    for cyclomatic in range(1, g + 1):
        n_leaves = g - cyclomatic
        max_rational = min(2 * cyclomatic + n_leaves - 2, max_vertices - n_leaves)
        for n in range(1, max_rational + 1):
            n_edges = n - 1 + cyclomatic
            for core in _rational_cores(n, n_edges, n_leaves):
                deg = [0] * n
                for a, b in core:
                    if a == b:
                        deg[a] += 2
                    else:
                        deg[a] += 1
                        deg[b] += 1
                minimum = [max(0, 3 - d) for d in deg]
                spare = n_leaves - sum(minimum)
                if spare < 0:
                    continue
                for extra in _compositions(spare, n):
                    leaves = [m + e for m, e in zip(minimum, extra)]
                    vertices = [(v, 0) for v in range(n)]
                    edges = list(core)
                    nxt = n
                    for v in range(n):
                        for _ in range(leaves[v]):
                            vertices.append((nxt, 1))
                            edges.append((v, nxt))
                            nxt += 1
                    graph = DualGraph(vertices, edges)
                    if not is_stable(graph):
                        continue
                    code = canonical_code(graph, mode="general")
                    if code not in out:
                        out[code] = graph
    return [out[c] for c in sorted(out)]


# -- maxima ----------------------------------------------------------------


def brute_max(g: int, cap: int = EXHAUSTIVE_CAP, jobs: int = 1):
    """(max order, optimal trees) over every stable tree of genus g."""
    if g > cap:
        raise CapacityError(f"exhaustive search capped at genus {cap}")
    trees = enumerate_trees(g)
    if jobs > 1:
        orders = _parallel_orders(trees, jobs)
    else:
        orders = [aut_order(t) for t in trees]
    best = max(orders)
    winners = [t for t, o in zip(trees, orders) if o == best]
    winners.sort(key=lambda t: canonical_code(t, mode="tree"))
    return best, winners


def _parallel_orders(trees, jobs: int) -> list[int]:
    from concurrent.futures import ProcessPoolExecutor

    from .graph import serialize

    payload = [serialize(t) for t in trees]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_order_of_serialized, payload, chunksize=8))


def _order_of_serialized(text: str) -> int:
    from .graph import parse

    return aut_order(parse(text))


# -- independent order implementations --------------------------------------


def _shape(t: DualGraph, v: int, parent: int | None):
    subs = sorted(
        (_shape(t, u, v) for u in t.neighbors(v) if u != parent),
        key=repr,
    )
    return (t.weight(v), tuple(subs))


def _eccentricity_centers(t: DualGraph) -> list[int]:
    ids = list(t.vertex_ids)
    dist = {}
    for s in ids:
        d = {s: 0}
        todo = [s]
        while todo:
            x = todo.pop(0)
            for u in t.neighbors(x):
                if u not in d:
                    d[u] = d[x] + 1
                    todo.append(u)
        dist[s] = max(d.values())
    emin = min(dist.values())
    return sorted(v for v in ids if dist[v] == emin)


def _assignment_best(t: DualGraph, v: int, parent: int | None, pinned: int) -> int:
    children = [u for u in t.neighbors(v) if u != parent]
    shapes: dict = {}
    for c in children:
        shapes.setdefault(repr(_shape(t, c, v)), []).append(c)
    total = len(children)
    best = 1
    for members in shapes.values():
        m = len(members)
        others = total - m
        if m >= 2 and others + pinned <= 2:
            best = max(best, m)
            if pinned == 0 and others == 0 and m >= 3:
                best = max(best, 2 * m)
    for c in children:
        best *= _assignment_best(t, c, v, 1)
    return best


def gaut_assignment_search(t: DualGraph) -> int:
    """Independent geometric order for trees via explicit assignments.

    Re-derives subtree isomorphism by structural shapes and the admissible
    local symmetries by direct enumeration; shares no code with gaut_tree.
    """
    if not t.is_tree:
        raise DomainError("assignment search requires a tree")
    centers = _eccentricity_centers(t)
    if len(centers) == 1:
        return _assignment_best(t, centers[0], None, 0)
    u, w = centers
    halves = _assignment_best(t, u, w, 1) * _assignment_best(t, w, u, 1)
    return halves * (2 if _shape(t, u, w) == _shape(t, w, u) else 1)


def tree_automorphisms(t: DualGraph, cap: int = 6000) -> list[dict[int, int]]:
    """Every weight-preserving automorphism of a tree, by backtracking."""
    ids = sorted(t.vertex_ids)
    colors = {v: (t.weight(v), t.degree(v)) for v in ids}
    out: list[dict[int, int]] = []

    def extend(i, mapping):
        if i == len(ids):
            out.append(dict(mapping))
            if len(out) > cap:
                raise CapacityError("tree automorphism group above cap")
            return
        v = ids[i]
        used = set(mapping.values())
        for w in ids:
            if w in used or colors[v] != colors[w]:
                continue
            ok = True
            for u in t.neighbors(v):
                if u in mapping and mapping[u] not in t.neighbors(w):
                    ok = False
                    break
            if not ok:
                continue
            mapping[v] = w
            extend(i + 1, mapping)
            del mapping[v]

    extend(0, {})
    return out


def gaut_exhaustive(t: DualGraph, cap: int = 2000) -> int:
    """Third, fully explicit order: largest admissible subgroup of the tree
    automorphism group, found by closing generator sets element by element."""
    if not t.is_tree:
        raise DomainError("exhaustive search requires a tree")
    autos = tree_automorphisms(t, cap=cap)
    ids = sorted(t.vertex_ids)
    perms = [tuple(a[v] for v in ids) for a in autos]
    index = {p: i for i, p in enumerate(perms)}
    pos = {v: i for i, v in enumerate(ids)}
    identity = tuple(ids)
    id_i = index[identity]
    nbrs = {v: sorted(t.neighbors(v)) for v in ids}

    def admissible(group: frozenset) -> bool:
        for v in ids:
            stab = [perms[i] for i in group if perms[i][pos[v]] == v]
            local = {tuple(p[pos[u]] for u in nbrs[v]) for p in stab}
            orbits = _orbits_of(local, nbrs[v])
            nontrivial = [o for o in orbits if len(o) > 1]
            if not nontrivial:
                continue
            if len(nontrivial) > 1:
                return False
            orbit = nontrivial[0]
            fixed = len(nbrs[v]) - len(orbit)
            if len(local) == len(orbit):
                if fixed > 2:
                    return False
                if not _regular_cyclic(local, nbrs[v], orbit):
                    return False
            elif len(local) == 2 * len(orbit) and len(orbit) >= 3:
                if fixed > 0:
                    return False
                if any(perms[i][pos[v]] != v for i in group):
                    return False
                if not _contains_full_cycle(local, nbrs[v], orbit):
                    return False
            else:
                return False
        return True

    table: dict[tuple[int, int], int] = {}

    def mul(i, j):
        got = table.get((i, j))
        if got is None:
            got = index[tuple(perms[i][pos[x]] for x in perms[j])]
            table[(i, j)] = got
        return got

    def closure(seed: frozenset) -> frozenset:
        items = set(seed)
        frontier = list(seed)
        while frontier:
            nxt = []
            for a in frontier:
                for bb in list(items):
                    for c in (mul(a, bb), mul(bb, a)):
                        if c not in items:
                            items.add(c)
                            nxt.append(c)
            frontier = nxt
        return frozenset(items)

    best = 1
    seen = {frozenset([id_i])}
    queue = [frozenset([id_i])]
    while queue:
        group = queue.pop()
        if admissible(group):
            best = max(best, len(group))
        for gi in range(len(perms)):
            if gi in group:
                continue
            extended = closure(group | {gi})
            if extended in seen:
                continue
            seen.add(extended)
            queue.append(extended)
    return best


def _orbits_of(local: set, points: list[int]) -> list[set]:
    parent = {p: p for p in points}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    ppos = {p: i for i, p in enumerate(points)}
    for perm in local:
        for p in points:
            ra, rb = find(p), find(perm[ppos[p]])
            if ra != rb:
                parent[ra] = rb
    groups: dict[int, set] = {}
    for p in points:
        groups.setdefault(find(p), set()).add(p)
    return list(groups.values())


def _regular_cyclic(local: set, points: list[int], orbit: set) -> bool:
    if len(local) != len(orbit):
        return False
    ppos = {p: i for i, p in enumerate(points)}
    long_cycle = False
    for perm in local:
        moved = {p for p in points if perm[ppos[p]] != p}
        if not moved:
            continue
        if orbit - moved:
            return False
        start = next(iter(orbit))
        seen = {start}
        cur = perm[ppos[start]]
        while cur != start:
            seen.add(cur)
            cur = perm[ppos[cur]]
        if len(seen) == len(orbit):
            long_cycle = True
    return long_cycle


def _contains_full_cycle(local: set, points: list[int], orbit: set) -> bool:
    ppos = {p: i for i, p in enumerate(points)}
    m = len(orbit)
    for perm in local:
        if any(perm[ppos[p]] == p for p in orbit):
            continue
        start = next(iter(orbit))
        seen = {start}
        cur = perm[ppos[start]]
        while cur != start and len(seen) <= m:
            seen.add(cur)
            cur = perm[ppos[cur]]
        if cur == start and len(seen) == m:
            return True
    return False
