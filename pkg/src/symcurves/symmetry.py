"""Geometric-realizability model: exact orders of geometric automorphism groups.

Not every dual-graph automorphism is induced by a curve automorphism.  At a
rational vertex the attached branches sit on a projective line, so a
stabilizer can permute at most one class of isomorphic attachments:
cyclically when the remaining attachments fit on the two fixed points of the
rotation, dihedrally only when the vertex carries a single class and nothing
else.  The model is definitional; richer Moebius configurations
(equianharmonic quadruples, simultaneous rotation of concentric classes) are
deliberately not modelled.
"""

from __future__ import annotations

import sys
from collections import Counter, deque
from dataclasses import dataclass
from itertools import permutations, product

from .graph import (
    CapacityError,
    DomainError,
    DualGraph,
    canonical_code,
    tree_centers,
)

SMALL_GRAPH_VERTEX_CAP = 12
_CORE_ELEMENT_CAP = 20000
_SUBGROUP_WORK_CAP = 400000


@dataclass(frozen=True)
class LocalStructure:
    """Branch-class multiplicities at one rational vertex, plus pinning."""

    class_multiplicities: tuple[int, ...]
    pinned: int


@dataclass(frozen=True)
class OrbitPartition:
    vertex_orbits: tuple[frozenset, ...]
    edge_orbits: tuple[frozenset, ...]

    def orbit_of(self, v: int) -> frozenset:
        for orbit in self.vertex_orbits:
            if v in orbit:
                return orbit
        raise KeyError(v)


def local_order(ls: LocalStructure) -> int:
    """Largest admissible symmetry order at one rational vertex.

    One class of ``m`` isomorphic attachments may be rotated cyclically
    provided everything else fits on the remaining fixed points of the
    rotation (two, minus the pinned direction); the dihedral order ``2m``
    requires a lone class of at least three and no pinning.
    """
    return _local_order(tuple(sorted(ls.class_multiplicities)), ls.pinned)


def _local_order(classes: tuple[int, ...], pinned_slots: int) -> int:
    total = sum(classes)
    best = 1
    for m in set(classes):
        t = total - m
        if m >= 2 and t + pinned_slots <= 2:
            best = max(best, m)
            if pinned_slots == 0 and t == 0 and m >= 3:
                best = max(best, 2 * m)
    return best


# -- trees ---------------------------------------------------------------


def _check_tree_domain(t: DualGraph) -> None:
    if not t.is_tree:
        raise DomainError("operation requires a tree")
    _check_weights(t)


def _check_weights(g: DualGraph) -> None:
    for v in g.vertex_ids:
        w = g.weight(v)
        if w > 1:
            raise DomainError(f"vertex {v} has weight {w}; weights must be 0 or 1")
        if w == 1 and g.degree(v) > 1:
            raise DomainError(f"elliptic vertex {v} is not a leaf")


def _rooted(t: DualGraph, v: int, parent: int | None) -> tuple[int, bytes]:
    """(group order, subtree code) of the subtree at v, its top edge pinned."""
    sub = [_rooted(t, u, v) for u in t.neighbors(v) if u != parent]
    classes = Counter(code for _, code in sub)
    order = _local_order(tuple(sorted(classes.values())), 1)
    for o, _ in sub:
        order *= o
    code = b"(%d:" % t.weight(v) + b"".join(sorted(c for _, c in sub)) + b")"
    return order, code


def gaut_rooted(t: DualGraph, root: int) -> int:
    """Order of the geometric automorphism group fixing the root direction."""
    _check_tree_domain(t)
    if root not in t.vertex_ids:
        raise DomainError(f"unknown root {root}")
    return _rooted(t, root, None)[0]


def gaut_tree(t: DualGraph) -> int:
    """Order of the geometric automorphism group of an unrooted tree.

    Anchored at the middle of the longest geodesics, which every
    automorphism preserves.
    """
    _check_tree_domain(t)
    centers = tree_centers(t)
    if len(centers) == 1:
        c = centers[0]
        branches = [_rooted(t, u, c) for u in t.neighbors(c)]
        classes = Counter(code for _, code in branches)
        order = _local_order(tuple(sorted(classes.values())), 0)
        for o, _ in branches:
            order *= o
        return order
    u, w = centers
    ou, cu = _rooted(t, u, w)
    ow, cw = _rooted(t, w, u)
    return ou * ow * (2 if cu == cw else 1)


def aut_order(g: DualGraph) -> int:
    """Full automorphism order: 6 per elliptic tail times the graph part."""
    leaves = sum(1 for v in g.vertex_ids if g.weight(v) == 1)
    part = gaut_tree(g) if g.is_tree else gaut_small_graph(g)
    return 6**leaves * part


# -- orbits and the fixed subtree -----------------------------------------


class _DSU:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def _subtree_codes(t: DualGraph, v: int, parent: int | None, codes: dict) -> bytes:
    subs = sorted(_subtree_codes(t, u, v, codes) for u in t.neighbors(v) if u != parent)
    code = b"(%d:" % t.weight(v) + b"".join(subs) + b")"
    codes[(v, parent)] = code
    return code


def _ordered_subtree(t: DualGraph, v: int, parent: int | None, codes: dict) -> list[int]:
    out = [v]
    children = sorted(
        (u for u in t.neighbors(v) if u != parent),
        key=lambda u: (codes[(u, v)], u),
    )
    for c in children:
        out.extend(_ordered_subtree(t, c, v, codes))
    return out


def _merge_aligned(t: DualGraph, members: list[tuple[int, int | None]], dsu, codes) -> None:
    """Union corresponding vertices of isomorphic subtrees positionally."""
    seqs = [_ordered_subtree(t, m, p, codes) for m, p in members]
    base = seqs[0]
    for other in seqs[1:]:
        for a, b in zip(base, other):
            dsu.union(a, b)


def _collect_orbits(t: DualGraph, v: int, parent: int | None, pinned: int, dsu, codes) -> None:
    children = [u for u in t.neighbors(v) if u != parent]
    by_code: dict[bytes, list[int]] = {}
    for c in children:
        by_code.setdefault(codes[(c, v)], []).append(c)
    total = len(children)
    best, chosen = 1, None
    for code, members in sorted(by_code.items()):
        m = len(members)
        rest = total - m
        if m >= 2 and rest + pinned <= 2:
            order = 2 * m if (pinned == 0 and rest == 0 and m >= 3) else m
            if order > best:
                best, chosen = order, code
    if chosen is not None:
        _merge_aligned(t, [(c, v) for c in by_code[chosen]], dsu, codes)
    for c in children:
        _collect_orbits(t, c, v, 1, dsu, codes)


def geometric_orbits(t: DualGraph) -> OrbitPartition:
    """Vertex and edge orbits under the order-maximizing symmetry choice.

    Ties between equally good rotating classes break toward the smallest
    subtree code, so the partition is deterministic.
    """
    _check_tree_domain(t)
    dsu = _DSU(t.vertex_ids)
    codes: dict = {}
    centers = tree_centers(t)
    if len(centers) == 1:
        c = centers[0]
        _subtree_codes(t, c, None, codes)
        _collect_orbits(t, c, None, 0, dsu, codes)
    else:
        u, w = centers
        cu = _subtree_codes(t, u, w, codes)
        cw = _subtree_codes(t, w, u, codes)
        if cu == cw:
            _merge_aligned(t, [(u, w), (w, u)], dsu, codes)
        _collect_orbits(t, u, w, 1, dsu, codes)
        _collect_orbits(t, w, u, 1, dsu, codes)
    groups: dict[int, set] = {}
    for v in t.vertex_ids:
        groups.setdefault(dsu.find(v), set()).add(v)
    vertex_orbits = tuple(sorted((frozenset(s) for s in groups.values()), key=sorted))
    parent_of = _parents(t, centers)
    edge_groups: dict = {}
    for a, b in t.edges:
        if len(centers) == 2 and {a, b} == set(centers):
            edge_groups.setdefault("center", set()).add((a, b))
            continue
        child = a if parent_of.get(a) == b else b
        edge_groups.setdefault(dsu.find(child), set()).add((a, b))
    edge_orbits = tuple(sorted((frozenset(s) for s in edge_groups.values()), key=sorted))
    return OrbitPartition(vertex_orbits, edge_orbits)


def _parents(t: DualGraph, roots: list[int]) -> dict[int, int]:
    parent: dict[int, int] = {}
    seen = set(roots)
    todo = deque(roots)
    while todo:
        v = todo.popleft()
        for u in t.neighbors(v):
            if u not in seen:
                seen.add(u)
                parent[u] = v
                todo.append(u)
    return parent


def fixed_subtree(t: DualGraph) -> DualGraph | None:
    """Subgraph on the vertices fixed by every geometric automorphism.

    None when no vertex is fixed (symmetric virtual root); otherwise the
    fixed vertices always induce a connected subtree containing the center.
    """
    orbits = geometric_orbits(t)
    fixed = sorted(v for orbit in orbits.vertex_orbits if len(orbit) == 1 for v in orbit)
    if not fixed:
        return None
    return t.induced(fixed)


# -- general small graphs ---------------------------------------------------
#
# Strategy: split the graph at its bridges.  Hanging branches behave exactly
# like tree branches (their symmetries act independently), while each
# 2-edge-connected core is small enough to search directly: enumerate its
# decorated half-edge automorphisms and take the largest subgroup whose
# vertex stabilizers act admissibly (one rotated class, at most two fixed
# attachment points, dihedral only at an invariant vertex carrying nothing
# else).


@dataclass(frozen=True)
class _Hang:
    code: bytes
    order: int


def _bridges(g: DualGraph) -> set[tuple[int, int]]:
    mult = Counter(g.edges)
    adj: dict[int, set[int]] = {v: set() for v in g.vertex_ids}
    for (a, b), _m in mult.items():
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    out: set[tuple[int, int]] = set()
    counter = [0]

    def dfs(v: int, parent: int | None) -> None:
        index[v] = low[v] = counter[0]
        counter[0] += 1
        for u in sorted(adj[v]):
            if u == parent:
                continue
            if u not in index:
                dfs(u, v)
                low[v] = min(low[v], low[u])
                if low[u] > index[v] and mult[(min(u, v), max(u, v))] == 1:
                    out.add((min(u, v), max(u, v)))
            else:
                low[v] = min(low[v], index[u])

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * len(g.vertex_ids) + 100))
    try:
        dfs(g.vertex_ids[0], None)
    finally:
        sys.setrecursionlimit(old)
    return out


def _split_at_bridges(g: DualGraph):
    """(comps, comp_of, btree) with btree[c] = [(bridge, near_v, far_comp)]."""
    bridges = _bridges(g)
    adj: dict[int, list[int]] = {v: [] for v in g.vertex_ids}
    for a, b in g.edges:
        if (a, b) in bridges:
            continue
        adj[a].append(b)
        adj[b].append(a)
    comps: list[frozenset] = []
    comp_of: dict[int, int] = {}
    for v in g.vertex_ids:
        if v in comp_of:
            continue
        comp = {v}
        todo = deque([v])
        while todo:
            x = todo.popleft()
            for u in adj[x]:
                if u not in comp:
                    comp.add(u)
                    todo.append(u)
        for u in comp:
            comp_of[u] = len(comps)
        comps.append(frozenset(comp))
    btree: dict[int, list] = {i: [] for i in range(len(comps))}
    for a, b in bridges:
        ca, cb = comp_of[a], comp_of[b]
        btree[ca].append(((a, b), a, cb))
        btree[cb].append(((a, b), b, ca))
    return comps, comp_of, btree


def _btree_centers(btree: dict[int, list]) -> list[int]:
    n = len(btree)
    if n <= 2:
        return sorted(btree)
    deg = {c: len(es) for c, es in btree.items()}
    layer = [c for c, d in deg.items() if d <= 1]
    remaining = n
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for c in layer:
            deg[c] = 0
            for _, _, far in btree[c]:
                if deg[far] > 1:
                    deg[far] -= 1
                    if deg[far] == 1:
                        nxt.append(far)
        layer = nxt
    return sorted(layer)


def _core_subgraph(g: DualGraph, comp: frozenset) -> tuple[list[tuple[int, int]], dict[int, list[int]]]:
    """Non-bridge edges inside comp, and the half-edge table.

    Returns (core_edges, ends_at_vertex) where half-edge 2k and 2k+1 are the
    two sides of core_edges[k].
    """
    bridges = _bridges(g)
    core_edges = [
        (a, b)
        for a, b in g.edges
        if a in comp and b in comp and (a, b) not in bridges
    ]
    at_vertex: dict[int, list[int]] = {v: [] for v in sorted(comp)}
    for k, (a, b) in enumerate(core_edges):
        at_vertex[a].append(2 * k)
        at_vertex[b].append(2 * k + 1)
    return core_edges, at_vertex


def _vertex_automorphisms(ids, colors, mult) -> list[dict[int, int]]:
    """All colour- and multiplicity-preserving vertex permutations."""
    ids = sorted(ids)
    out: list[dict[int, int]] = []

    def m(a, b):
        return mult.get((a, b) if a <= b else (b, a), 0)

    def extend(i: int, mapping: dict[int, int]) -> None:
        if i == len(ids):
            out.append(dict(mapping))
            return
        v = ids[i]
        used = set(mapping.values())
        for w in ids:
            if w in used or colors[v] != colors[w] or m(v, v) != m(w, w):
                continue
            if any(m(v, u) != m(w, mapping[u]) for u in mapping):
                continue
            mapping[v] = w
            extend(i + 1, mapping)
            del mapping[v]

    extend(0, {})
    return out


def _core_elements(core_edges, at_vertex, colors):
    """Half-edge automorphisms of a decorated core as end-permutations.

    Each element is (vmap, eperm): the vertex permutation and the induced
    permutation of half-edge indices.  Loops allow an extra end flip.
    """
    mult = Counter(core_edges)
    bundles: dict[tuple[int, int], list[int]] = {}
    for k, e in enumerate(core_edges):
        bundles.setdefault(e, []).append(k)
    vperms = _vertex_automorphisms(at_vertex.keys(), colors, mult)
    n_ends = 2 * len(core_edges)
    elements = []
    bundle_keys = sorted(bundles)

    def end_of(k: int, vertex: int) -> int:
        a, b = core_edges[k]
        return 2 * k if vertex == a else 2 * k + 1

    def assign(vmap, bi, eperm):
        if bi == len(bundle_keys):
            elements.append((tuple(vmap[v] for v in sorted(vmap)), tuple(eperm)))
            if len(elements) > _CORE_ELEMENT_CAP:
                raise CapacityError("core symmetry group too large to enumerate")
            return
        a, b = bundle_keys[bi]
        ta, tb = vmap[a], vmap[b]
        key = (ta, tb) if ta <= tb else (tb, ta)
        src = bundles[(a, b)]
        dst = bundles.get(key, [])
        if len(src) != len(dst):
            return
        if a == b:
            for img in permutations(dst):
                for flips in product((False, True), repeat=len(src)):
                    ep = list(eperm)
                    for k, k2, flip in zip(src, img, flips):
                        if flip:
                            ep[2 * k], ep[2 * k + 1] = 2 * k2 + 1, 2 * k2
                        else:
                            ep[2 * k], ep[2 * k + 1] = 2 * k2, 2 * k2 + 1
                    assign(vmap, bi + 1, ep)
        else:
            for img in permutations(dst):
                ep = list(eperm)
                for k, k2 in zip(src, img):
                    ep[end_of(k, a)] = end_of(k2, ta)
                    ep[end_of(k, b)] = end_of(k2, tb)
                assign(vmap, bi + 1, ep)

    for vmap in vperms:
        assign(vmap, 0, [None] * n_ends)
    return elements


def _perm_orbits(perms: list[tuple[int, ...]], points: list[int]) -> list[set[int]]:
    dsu = _DSU(points)
    pos = {p: i for i, p in enumerate(points)}
    for perm in perms:
        for p in points:
            dsu.union(p, perm[pos[p]])
    groups: dict[int, set[int]] = {}
    for p in points:
        groups.setdefault(dsu.find(p), set()).add(p)
    return list(groups.values())


def _restricted(element_eperm, ends: list[int]) -> tuple[int, ...]:
    return tuple(element_eperm[e] for e in ends)


def _is_regular_cycle(perms: set[tuple[int, ...]], ends: list[int], orbit: set[int]) -> bool:
    """True when the restriction group is cyclic and regular on its orbit."""
    if len(perms) != len(orbit):
        return False
    pos = {e: i for i, e in enumerate(ends)}
    has_long_cycle = False
    for p in perms:
        moved = {e for e in ends if p[pos[e]] != e}
        if not moved:
            continue
        if moved - orbit:
            return False
        start = next(iter(orbit))
        seen = {start}
        cur = p[pos[start]]
        while cur != start:
            seen.add(cur)
            cur = p[pos[cur]]
        if len(seen) == len(orbit):
            has_long_cycle = True
        # regularity: no non-identity element may fix a point of the orbit
        if orbit - moved:
            return False
    return has_long_cycle or len(orbit) == 1


def _max_admissible_core(core_edges, at_vertex, hang, pinned, weights) -> int:
    """Largest model order |H| * hanging factors over admissible subgroups."""
    colors = {
        v: (
            weights[v],
            v == pinned,
            tuple(sorted(h.code for h in hang.get(v, ()))),
        )
        for v in at_vertex
    }
    elements = _core_elements(core_edges, at_vertex, colors)
    vertex_list = sorted(at_vertex)
    vidx = {v: i for i, v in enumerate(vertex_list)}
    n_ends = 2 * len(core_edges)
    identity = (tuple(vertex_list), tuple(range(n_ends)))
    elem_index = {e: i for i, e in enumerate(elements)}
    if identity not in elem_index:
        elements.append(identity)
        elem_index[identity] = len(elements) - 1
    n = len(elements)
    id_i = elem_index[identity]

    table: dict[tuple[int, int], int] = {}

    def mul(i: int, j: int) -> int:
        got = table.get((i, j))
        if got is None:
            vi, ei = elements[i]
            vj, ej = elements[j]
            vm = tuple(vi[vidx[x]] for x in vj)
            em = tuple(ei[x] for x in ej)
            got = elem_index[(vm, em)]
            table[(i, j)] = got
        return got

    def closure(seed: frozenset, cap: int) -> frozenset | None:
        items = set(seed)
        frontier = list(seed)
        while frontier:
            nxt = []
            for a in frontier:
                for b in list(items):
                    for c in (mul(a, b), mul(b, a)):
                        if c not in items:
                            items.add(c)
                            nxt.append(c)
                            if len(items) > cap:
                                return None
            frontier = nxt
        return frozenset(items)

    # Any admissible group has small vertex stabilizers: non-identity
    # stabilizer elements fix at most two ends at a vertex, so once three or
    # more ends of a vertex are pinned by earlier choices the kernel there
    # is trivial.  Chains of subgroups leading to an admissible group stay
    # below this bound, which prunes the lattice walk hard.
    start = max(vertex_list, key=lambda v: len(at_vertex[v]))
    size_cap = len(vertex_list) * 2 * max(1, len(at_vertex[start]))
    rank = {start: 0}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for a, b in core_edges:
                for x, y in ((a, b), (b, a)):
                    if x == v and y not in rank:
                        rank[y] = len(rank)
                        nxt.append(y)
        frontier = nxt
    for v in vertex_list:
        if v == start:
            continue
        shared = sum(
            1
            for a, b in core_edges
            if (a == v and b != v and rank[b] < rank[v])
            or (b == v and a != v and rank[a] < rank[v])
        )
        if shared < 3:
            size_cap *= 2 * max(1, len(at_vertex[v]))
    size_cap = min(size_cap, n)

    def stab_restrictions(H: frozenset, v: int) -> set[tuple[int, ...]]:
        ends = at_vertex[v]
        return {
            _restricted(elements[i][1], ends)
            for i in H
            if elements[i][0][vidx[v]] == v
        }

    def admissible(H: frozenset) -> bool:
        for v in vertex_list:
            ends = at_vertex[v]
            restricted = stab_restrictions(H, v)
            orbits = _perm_orbits(list(restricted), ends)
            nontrivial = [o for o in orbits if len(o) > 1]
            if not nontrivial:
                continue
            if len(nontrivial) > 1:
                return False
            orbit = nontrivial[0]
            fixed_core = len(ends) - len(orbit)
            slots = fixed_core + len(hang.get(v, ())) + (1 if v == pinned else 0)
            if len(restricted) == len(orbit):
                if slots > 2 or not _is_regular_cycle(restricted, ends, orbit):
                    return False
            elif len(restricted) == 2 * len(orbit) and len(orbit) >= 3:
                if slots > 0:
                    return False
                if any(elements[i][0][vidx[v]] != v for i in H):
                    return False
                if not _has_full_rotation(restricted, ends, orbit):
                    return False
            else:
                return False
        return True

    def value(H: frozenset) -> int:
        total = len(H)
        for v in vertex_list:
            total *= _hang_factor(v, at_vertex, hang, pinned, H, elements, vidx)
        return total

    triv = frozenset([id_i])
    best = value(triv)
    if n <= size_cap:
        full = frozenset(range(n))
        if admissible(full):
            return max(best, value(full))
    seen = {triv}
    queue = deque([triv])
    gen_reps = []
    seen_cyc = set()
    for i in range(n):
        cyc = closure(frozenset([id_i, i]), size_cap)
        if cyc is None or cyc in seen_cyc:
            continue
        seen_cyc.add(cyc)
        gen_reps.append(i)
    work = 0
    while queue:
        H = queue.popleft()
        if admissible(H):
            best = max(best, value(H))
        for gi in gen_reps:
            if gi in H:
                continue
            work += 1
            if work > _SUBGROUP_WORK_CAP:
                raise CapacityError("core subgroup search exceeded work cap")
            H2 = closure(H | {gi}, size_cap)
            if H2 is None or H2 in seen:
                continue
            seen.add(H2)
            queue.append(H2)
    return best


def _has_full_rotation(restricted: set, ends: list[int], orbit: set[int]) -> bool:
    """Does some element act as a fixed-point-free |orbit|-cycle on the orbit?"""
    pos = {e: i for i, e in enumerate(ends)}
    m = len(orbit)
    for p in restricted:
        if any(p[pos[e]] == e for e in orbit):
            continue
        start = next(iter(orbit))
        seen = {start}
        cur = p[pos[start]]
        while cur != start and len(seen) <= m:
            seen.add(cur)
            cur = p[pos[cur]]
        if cur == start and len(seen) == m:
            return True
    return False


def _hang_factor(v, at_vertex, hang, pinned, group, elements, vidx) -> int:
    """Contribution of the branches hanging at core vertex v under group H."""
    branches = hang.get(v, ())
    base = 1
    for h in branches:
        base *= h.order
    ends = at_vertex[v]
    for i in group:
        vmap, ep = elements[i]
        if vmap[vidx[v]] != v:
            continue
        if any(ep[e] != e for e in ends):
            # core stabilizer already rotates here: branches stay pinned
            return base
    classes = Counter(h.code for h in branches)
    pinned_slots = len(ends) + (1 if v == pinned else 0)
    return _local_order(tuple(sorted(classes.values())), pinned_slots) * base


def _piece(g: DualGraph, comps, btree, comp_i: int, in_bridge, attach: int):
    """Total model order and rooted code of one side of a bridge."""
    hang: dict[int, list[_Hang]] = {}
    side_vertices = set(comps[comp_i])
    for bridge, near, far in btree[comp_i]:
        if in_bridge is not None and bridge == in_bridge:
            continue
        far_attach = bridge[0] if bridge[1] == near else bridge[1]
        order, code, far_vertices = _piece(g, comps, btree, far, bridge, far_attach)
        hang.setdefault(near, []).append(_Hang(code, order))
        side_vertices |= far_vertices
    order = _comp_order(g, comps[comp_i], hang, attach)
    sub = g.induced(side_vertices)
    code = canonical_code(sub, root=attach, mode="general")
    return order, code, side_vertices


def _comp_order(g: DualGraph, comp: frozenset, hang: dict[int, list[_Hang]], pinned) -> int:
    core_edges, at_vertex = _core_subgraph(g, comp)
    if not core_edges:
        (v,) = comp
        branches = hang.get(v, [])
        classes = Counter(h.code for h in branches)
        order = _local_order(tuple(sorted(classes.values())), 1 if pinned is not None else 0)
        for h in branches:
            order *= h.order
        return order
    weights = {v: g.weight(v) for v in comp}
    hang_t = {v: tuple(hs) for v, hs in hang.items()}
    return _max_admissible_core(core_edges, at_vertex, hang_t, pinned, weights)


def gaut_small_graph(g: DualGraph) -> int:
    """Geometric automorphism order of a small general graph.

    Splits at bridges; hanging branches contribute independently, and each
    2-edge-connected core is searched exhaustively for its largest
    admissible symmetry group.  Agrees with gaut_tree on trees.
    """
    _check_weights(g)
    if len(g.vertex_ids) > SMALL_GRAPH_VERTEX_CAP:
        raise CapacityError(
            f"general-mode order capped at {SMALL_GRAPH_VERTEX_CAP} vertices"
        )
    comps, comp_of, btree = _split_at_bridges(g)
    centers = _btree_centers(btree)
    if len(centers) == 1:
        c = centers[0]
        hang: dict[int, list[_Hang]] = {}
        for bridge, near, far in btree[c]:
            far_attach = bridge[0] if bridge[1] == near else bridge[1]
            order, code, _ = _piece(g, comps, btree, far, bridge, far_attach)
            hang.setdefault(near, []).append(_Hang(code, order))
        return _comp_order(g, comps[c], hang, None)
    cu, cw = centers
    bridge = next(br for br, _, far in btree[cu] if far == cw)
    u = bridge[0] if comp_of[bridge[0]] == cu else bridge[1]
    w = bridge[1] if u == bridge[0] else bridge[0]
    ou, codeu, _ = _piece(g, comps, btree, cu, bridge, u)
    ow, codew, _ = _piece(g, comps, btree, cw, bridge, w)
    return ou * ow * (2 if codeu == codew else 1)
