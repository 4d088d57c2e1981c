"""Perfect trees, strict optimality, neutral moves, and optimum enumeration.

An optimal tree splits into its fixed subtree plus perfect pieces rooted on
it.  Strictness pins down the shape completely: pieces sit at the leaves of
the fixed subtree, interior fixed vertices are plain valence-three joints,
and consecutive leaf counts drop by a factor of four (one sanctioned 8/3
exception).  Neutral moves shuttle a binary block between a type-2 and a
type-3 piece, or split four binary trees around a fresh joint, without
changing the order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import (
    CapacityError,
    DomainError,
    DualGraph,
    canonical_code,
    genus,
    stabilize,
    tree_centers,
)
from .symmetry import aut_order, fixed_subtree, gaut_tree
from .construct import build_optimal, max_aut_order
from .reductions import is_simple, valence_reduce

EXHAUSTIVE_CAP = 8


@dataclass(frozen=True)
class PerfectType:
    kind: int  # 1..5
    scale: int  # leaf counts: 1, 2^(scale+1), 3*2^scale, 4*2^scale, 5*2^scale

    @property
    def leaf_count(self) -> int:
        if self.kind == 1:
            return 1
        if self.kind == 2:
            return 2 ** (self.scale + 1)
        return self.kind * 2**self.scale


@dataclass(frozen=True)
class StrictPart:
    type: PerfectType
    leaves: int
    root: int | None  # None for a virtual-rooted whole tree


@dataclass(frozen=True)
class StrictDecomposition:
    fixed_vertices: tuple[int, ...]
    parts: tuple[StrictPart, ...]


def _binary_depth(t: DualGraph, v: int, parent: int | None) -> int | None:
    """Depth of a perfect binary subtree rooted at v, else None."""
    children = [u for u in t.neighbors(v) if u != parent]
    if not children:
        return 0 if t.weight(v) == 1 else None
    if t.weight(v) != 0 or len(children) != 2:
        return None
    depths = [_binary_depth(t, c, v) for c in children]
    if None in depths or depths[0] != depths[1]:
        return None
    return depths[0] + 1


def perfect_type(t: DualGraph, root: int | None = None) -> PerfectType | None:
    """Recognize the perfect tree rooted at `root` (whole tree if omitted)."""
    if not t.is_tree:
        raise DomainError("perfect_type requires a tree")
    if root is None:
        if len(t.vertex_ids) == 1:
            return PerfectType(1, 0)
        centers = tree_centers(t)
        if len(centers) == 2:
            u, w = centers
            du = _binary_depth(t, u, w)
            dw = _binary_depth(t, w, u)
            if du is not None and du == dw:
                return PerfectType(2, du)
            return None
        root = centers[0]
    return _perfect_rooted(t, root, None)


def _perfect_rooted(t: DualGraph, root: int, parent: int | None) -> PerfectType | None:
    children = [u for u in t.neighbors(root) if u != parent]
    if not children:
        return PerfectType(1, 0) if parent is not None or len(t.vertex_ids) == 1 else None
    if t.weight(root) != 0:
        return None
    depths = [_binary_depth(t, c, root) for c in children]
    if None in depths or len(set(depths)) != 1:
        return None
    d = depths[0]
    if len(children) == 2:
        return PerfectType(2, d)
    if len(children) in (3, 4, 5):
        return PerfectType(len(children), d)
    return None


def _g0_leaf_parts(t: DualGraph, fixed: set[int]):
    """(leaf of the fixed subtree, hanging bush vertices) pairs."""
    parts = []
    for v in sorted(fixed):
        g0_deg = sum(1 for u in t.neighbors(v) if u in fixed)
        moving = [u for u in t.neighbors(v) if u not in fixed]
        is_leaf = g0_deg <= 1 if len(fixed) > 1 else True
        parts.append((v, g0_deg, moving, is_leaf))
    return parts


def _bush(t: DualGraph, root: int, fixed: set[int]) -> set[int]:
    out = {root}
    todo = [u for u in t.neighbors(root) if u not in fixed]
    while todo:
        x = todo.pop()
        if x in out:
            continue
        out.add(x)
        for u in t.neighbors(x):
            if u != root and u not in fixed:
                todo.append(u)
    return out


def strict_decomposition(t: DualGraph) -> StrictDecomposition | None:
    """The strict-optimal decomposition, or None when a clause fails."""
    if not t.is_tree:
        raise DomainError("strict_decomposition requires a tree")
    g0 = fixed_subtree(t)
    if g0 is None:
        # symmetric virtual root: strict iff the whole tree is a perfect
        # binary tree folded over its middle edge
        pt = perfect_type(t)
        if pt is not None and pt.kind == 2:
            return StrictDecomposition((), (StrictPart(pt, pt.leaf_count, None),))
        if len(t.vertex_ids) == 2:
            return StrictDecomposition((), (StrictPart(PerfectType(2, 0), 2, None),))
        return None
    fixed = set(g0.vertex_ids)
    if len(fixed) == 1:
        (c,) = fixed
        pt = _perfect_rooted(t, c, None)
        if pt is not None and pt.kind in (2, 3, 5):
            return StrictDecomposition((c,), (StrictPart(pt, pt.leaf_count, c),))
        return None
    info = _g0_leaf_parts(t, fixed)
    parts: list[StrictPart] = []
    for v, g0_deg, moving, is_leaf in info:
        if not is_leaf:
            # interior fixed vertices carry nothing and are plain joints
            if moving or g0_deg != 3:
                return None
            continue
        bush = _bush(t, v, fixed - {v})
        if len(bush) == 1:
            pt = PerfectType(1, 0) if t.weight(v) == 1 else None
        else:
            sub = t.induced(bush)
            pt = _perfect_rooted(sub, v, None)
        if pt is None or pt.kind in (4, 5):
            return None
        parts.append(StrictPart(pt, pt.leaf_count, v))
    parts.sort(key=lambda p: -p.leaves)
    counts = [p.leaves for p in parts]
    if len(set(counts)) != len(counts):
        return None
    for big, small in zip(parts, parts[1:]):
        if big.leaves >= 4 * small.leaves:
            continue
        sanctioned = (
            big.type.kind == 2
            and small.type.kind == 3
            and big.leaves == 8 * 2**small.type.scale
            and small.leaves == 3 * 2**small.type.scale
        )
        if not sanctioned:
            return None
    return StrictDecomposition(tuple(sorted(fixed)), tuple(parts))


def is_strict_optimal(t: DualGraph) -> bool:
    return strict_decomposition(t) is not None


# -- neutral moves -------------------------------------------------------


def _parts_of(t: DualGraph):
    """Perfect pieces rooted at the leaves of the fixed subtree.

    Returns (fixed set, [(root, PerfectType, bush)]); pieces that fail to be
    perfect are reported with type None.
    """
    g0 = fixed_subtree(t)
    if g0 is None:
        return set(), []
    fixed = set(g0.vertex_ids)
    out = []
    for v, g0_deg, moving, is_leaf in _g0_leaf_parts(t, fixed):
        if not (moving or len(fixed) == 1):
            continue
        bush = _bush(t, v, fixed - {v})
        if len(bush) == 1:
            pt = PerfectType(1, 0) if t.weight(v) == 1 else None
        else:
            sub = t.induced(bush)
            pt = _perfect_rooted(sub, v, None)
        out.append((v, pt, bush))
    return fixed, out


def _rebuild(t: DualGraph, drop_edges, add_edges, add_vertices) -> DualGraph:
    weights = {v: t.weight(v) for v in t.vertex_ids}
    for v, w in add_vertices:
        weights[v] = w
    edges = list(t.edges)
    for e in drop_edges:
        edges.remove(tuple(sorted(e)))
    for a, b in add_edges:
        edges.append((a, b) if a <= b else (b, a))
    return stabilize(DualGraph(weights.items(), edges))


def _binary_children(t: DualGraph, root: int, parent) -> list[int]:
    return [u for u in t.neighbors(root) if u != parent]


def neutral_moves(t: DualGraph) -> list[DualGraph]:
    """All single type-I or type-II moves on an optimal tree.

    Type I needs a type-2 piece with 2^(s+2) leaves next to a type-3 piece
    with 3*2^s leaves: one binary block of 2^s leaves moves onto the fixed
    subtree and the rest of the type-3 piece joins the type-2 root.  Type II
    splits four binary trees around a fresh joint.  Results are stabilized
    and deduplicated; each has the same automorphism order as the input.
    """
    if not t.is_tree:
        raise DomainError("neutral moves require a tree")
    if aut_order(t) != max_aut_order(genus(t)):
        raise DomainError("neutral moves are defined on optimal trees only")
    out: dict[bytes, DualGraph] = {}
    for res in _type_one_moves(t, forward=True):
        out.setdefault(canonical_code(res, mode="tree"), res)
    for res in _type_two_moves(t):
        out.setdefault(canonical_code(res, mode="tree"), res)
    return [out[c] for c in sorted(out)]


def neutral_closure_moves(t: DualGraph) -> list[DualGraph]:
    """Forward and inverse moves, for closure enumeration."""
    out: dict[bytes, DualGraph] = {}
    for gen in (
        _type_one_moves(t, forward=True),
        _type_one_moves(t, forward=False),
        _type_two_moves(t),
        _type_two_inverse(t),
    ):
        for res in gen:
            out.setdefault(canonical_code(res, mode="tree"), res)
    return [out[c] for c in sorted(out)]


def _placements(t: DualGraph, fixed: set[int], moving: set[int]):
    """Attachment spots on the fixed subtree: its vertices, and midpoints
    of internal edges that stay fixed after the move."""
    spots = [("vertex", v) for v in sorted(fixed - moving)]
    for a, b in t.edges:
        if a in fixed and b in fixed and not ({a, b} & moving):
            spots.append(("split", (a, b)))
    return spots


def _type_one_moves(t: DualGraph, forward: bool):
    fixed, parts = _parts_of(t)
    if not parts:
        return
    for i, (ri, pi, bushi) in enumerate(parts):
        for j, (rj, pj, bushj) in enumerate(parts):
            if i == j or pi is None or pj is None:
                continue
            if forward:
                # type 2 with 2^(s+2) leaves + type 3 with 3*2^s leaves
                if pi.kind != 2 or pj.kind != 3:
                    continue
                s = pj.scale
                if pi.leaf_count != 2 ** (s + 2):
                    continue
                yield from _do_type_one(t, fixed, ri, rj, bushj, s)
            else:
                # inverse: type 3 with 3*2^(s+1) + piece with 2^s leaves
                if pi.kind != 3 or pj.kind not in (1, 2):
                    continue
                s = pi.scale - 1
                if s < 0 or pj.leaf_count != 2**s:
                    continue
                yield from _undo_type_one(t, fixed, ri, rj, bushj)


def _do_type_one(t: DualGraph, fixed, r2, r3, bush3, s):
    """Move one binary block off the type-3 piece at r3 and hand the rest
    to the type-2 root r2; try every legal spot for the freed block."""
    blocks = [u for u in t.neighbors(r3) if u in bush3]
    if len(blocks) != 3:
        return
    m = min(blocks)
    g0_anchor = [u for u in t.neighbors(r3) if u not in bush3]
    for kind, spot in _placements(t, fixed, {r3}):
        drop = [(r3, m)]
        add_edges = []
        add_vertices = []
        if g0_anchor and r2 not in t.neighbors(r3):
            drop.append((r3, g0_anchor[0]))
            add_edges.append((r3, r2))
        if kind == "vertex":
            add_edges.append((m, spot))
        else:
            a, b = spot
            mid = t.fresh_id() + 1
            add_vertices.append((mid, 0))
            drop.append((a, b))
            add_edges.extend([(a, mid), (b, mid), (m, mid)])
        try:
            res = _rebuild(t, drop, add_edges, add_vertices)
        except Exception:
            continue
        if genus(res) == genus(t) and is_simple(res):
            yield res


def _undo_type_one(t: DualGraph, fixed, r3big, rsmall, bush_small):
    """Pull one binary block out of a type-3 piece and fuse it with a
    2^s-leaf piece into a fresh type-3 root."""
    blocks = [u for u in t.neighbors(r3big) if u not in fixed or u == r3big]
    blocks = [u for u in t.neighbors(r3big) if _in_bush(t, u, r3big, fixed)]
    if len(blocks) != 3:
        return
    b = min(blocks)
    small_anchor = [u for u in t.neighbors(rsmall) if u in fixed and u != rsmall]
    drop = [(r3big, b)]
    add_edges = [(b, rsmall)]
    # rsmall keeps its place on the fixed subtree; b becomes the new root
    # of a type-3 piece whose third block is the old small piece
    try:
        res = _rebuild(t, drop, add_edges, [])
    except Exception:
        return
    if genus(res) == genus(t) and is_simple(res):
        yield res


def _in_bush(t: DualGraph, u: int, root: int, fixed: set[int]) -> bool:
    return u not in fixed


def _type_two_moves(t: DualGraph):
    pt = perfect_type(t)
    centers = tree_centers(t)
    if pt is None or pt.kind != 4 or len(centers) != 1:
        return
    root = centers[0]
    kids = sorted(t.neighbors(root))
    if len(kids) != 4:
        return
    x = t.fresh_id()
    drop = [(root, kids[2]), (root, kids[3])]
    add = [(root, x), (x, kids[2]), (x, kids[3])]
    res = _rebuild(t, drop, add, [(x, 0)])
    if genus(res) == genus(t) and is_simple(res):
        yield res


def _type_two_inverse(t: DualGraph):
    """Merge a virtual-rooted binary tree back into four trees at one root."""
    pt = perfect_type(t)
    centers = tree_centers(t)
    if pt is None or pt.kind != 2 or len(centers) != 2 or pt.scale < 1:
        return
    u, w = centers
    kids_w = [x for x in t.neighbors(w) if x != u]
    drop = [(w, x) for x in kids_w] + [(u, w)]
    add = [(u, x) for x in kids_w]
    weights = {v: t.weight(v) for v in t.vertex_ids if v != w}
    edges = [e for e in t.edges if w not in e]
    for a, b in add:
        edges.append((a, b) if a <= b else (b, a))
    res = stabilize(DualGraph(weights.items(), edges))
    if genus(res) == genus(t) and is_simple(res):
        yield res


# -- enumeration of all optima ---------------------------------------------


@dataclass(frozen=True)
class OptimaEnumeration:
    genus: int
    trees: tuple[DualGraph, ...]
    exhaustive: bool


def enumerate_optimal(g: int, cap: int = EXHAUSTIVE_CAP) -> OptimaEnumeration:
    """All maximally symmetric trees of genus g.

    Exhaustive (complete) up to the cap; above it, the closure of the
    constructed optimum under forward and inverse neutral moves, which is
    complete only heuristically.
    """
    if g < 2:
        raise DomainError("enumeration needs genus >= 2")
    if g <= cap:
        from .oracle import brute_max

        _, winners = brute_max(g, cap=cap)
        return OptimaEnumeration(g, tuple(winners), True)
    target = max_aut_order(g)
    start = build_optimal(g)
    seen = {canonical_code(start, mode="tree"): start}
    frontier = [start]
    while frontier:
        nxt = []
        for t in frontier:
            for res in neutral_closure_moves(t):
                if aut_order(res) != target:
                    continue
                code = canonical_code(res, mode="tree")
                if code not in seen:
                    seen[code] = res
                    nxt.append(res)
        frontier = nxt
    trees = tuple(seen[c] for c in sorted(seen))
    return OptimaEnumeration(g, trees, False)


def reaches_strict(t: DualGraph, max_steps: int = 64) -> bool:
    """Can t reach a strict-optimal tree through order-preserving steps?"""
    target = aut_order(t)
    seen = {canonical_code(t, mode="tree")}
    frontier = [t]
    for _ in range(max_steps):
        if any(is_strict_optimal(x) for x in frontier):
            return True
        nxt = []
        for x in frontier:
            candidates = list(neutral_closure_moves(x))
            try:
                candidates.append(stabilize(valence_reduce(x)))
            except Exception:
                pass
            for res in candidates:
                if aut_order(res) != target:
                    continue
                code = canonical_code(res, mode="tree")
                if code not in seen:
                    seen.add(code)
                    nxt.append(res)
        if not nxt:
            return False
        frontier = nxt
    return False
