"""Closed-form maximal orders and builders for the optimal trees.

The maximal automorphism order of genus g is read off the binary expansion
of g: scanning from the high bit, each group of two bits starting with a one
(intermediate zeros skipped) contributes a perfect subtree, and a trailing
unpaired one contributes a lonely tail.  Genera of the shapes 3*2^n and
5*2^n beat the generic formula through an unpinned dihedral hub and are
dispatched specially, as is genus two.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .graph import DomainError, DualGraph, genus, stabilize


@dataclass(frozen=True)
class BinaryPairing:
    """Bit-group decomposition of g: groups are ('11'|'10', low exponent)."""

    g: int
    groups: tuple[tuple[str, int], ...]
    lonely: bool

    @property
    def k(self) -> int:
        return sum(1 for kind, _ in self.groups if kind == "11")

    @property
    def l(self) -> int:
        return sum(1 for kind, _ in self.groups if kind == "10")

    @property
    def N(self) -> int:
        return self.g - 1 if self.lonely else self.g

    def part_sizes(self) -> tuple[int, ...]:
        """Leaf count of the perfect subtree each group contributes."""
        sizes = []
        for kind, p in self.groups:
            sizes.append(3 * 2**p if kind == "11" else 2 ** (p + 1))
        if self.lonely:
            sizes.append(1)
        return tuple(sizes)


def binary_pairing(g: int) -> BinaryPairing:
    """Greedy left-to-right pairing of the binary digits of g."""
    if g < 2:
        raise DomainError(f"binary pairing needs g >= 2, got {g}")
    bits = bin(g)[2:]
    groups: list[tuple[str, int]] = []
    lonely = False
    i = 0
    while i < len(bits):
        if bits[i] == "0":
            i += 1
            continue
        if i + 1 < len(bits):
            groups.append((bits[i] + bits[i + 1], len(bits) - 2 - i))
            i += 2
        else:
            lonely = True
            i += 1
    return BinaryPairing(g, tuple(groups), lonely)


class Family(enum.Enum):
    G2 = "g2"
    THREE = "three"
    FOUR = "four"
    FIVE = "five"


@dataclass(frozen=True)
class GenusCase:
    family: Family
    n: int
    remainder: int  # the appendage genus (a or b); 0 for G2 and FIVE

    def __str__(self) -> str:
        if self.family is Family.G2:
            return "g=2"
        if self.family is Family.FIVE:
            return f"g=5*2^{self.n}"
        sym = "a" if self.family is Family.THREE else "b"
        base = 3 if self.family is Family.THREE else 4
        return f"g={base}*2^{self.n}+{sym}, {sym}={self.remainder}"


def classify_genus(g: int) -> GenusCase:
    """Construction family from the leading binary digits of g."""
    if g < 2:
        raise DomainError(f"genus must be >= 2, got {g}")
    if g == 2:
        return GenusCase(Family.G2, 0, 0)
    bits = bin(g)[2:]
    if bits[1] == "1":
        n = len(bits) - 2
        return GenusCase(Family.THREE, n, g - 3 * 2**n)
    if bits[:3] == "101" and set(bits[3:]) <= {"0"}:
        return GenusCase(Family.FIVE, len(bits) - 3, 0)
    n = len(bits) - 3
    return GenusCase(Family.FOUR, n, g - 4 * 2**n)


def _is_power_times(g: int, base: int) -> bool:
    while g % 2 == 0:
        g //= 2
    return g == base


def max_aut_order(g: int) -> int:
    """Exact maximal automorphism order of a stable curve of genus g."""
    if g < 2:
        raise DomainError(f"genus must be >= 2, got {g}")
    if g == 2:
        return 72
    if _is_power_times(g, 3):
        return 6**g * 2 ** (g - 3) * 6
    if _is_power_times(g, 5):
        return 6**g * 2 ** (g - 5) * 10
    p = binary_pairing(g)
    return 6**g * 2 ** (p.N - 3 * p.k - p.l) * 3**p.k


def order_factors(g: int) -> tuple[int, int, int]:
    """(a, b, c) with max order = 6^g * 2^a * 3^b * 5^c."""
    if g == 2:
        return (1, 0, 0)  # 72 = 6^2 * 2
    if _is_power_times(g, 3):
        return (g - 2, 1, 0)
    if _is_power_times(g, 5):
        return (g - 4, 0, 1)
    p = binary_pairing(g)
    return (p.N - 3 * p.k - p.l, p.k, 0)


def moduli_dimension(g: int) -> int:
    """Dimension of the family of maximally symmetric curves of genus g."""
    p = binary_pairing(g)
    return max(0, p.k + p.l + (g - p.N) - 3)


# -- builders ----------------------------------------------------------------


class _Builder:
    def __init__(self):
        self.weights: dict[int, int] = {}
        self.edges: list[tuple[int, int]] = []
        self.next_id = 0

    def vertex(self, weight: int) -> int:
        v = self.next_id
        self.next_id += 1
        self.weights[v] = weight
        return v

    def edge(self, a: int, b: int) -> None:
        self.edges.append((a, b) if a <= b else (b, a))

    def binary(self, leaves_log2: int) -> int:
        """Root of a perfect binary tree with 2**leaves_log2 elliptic leaves."""
        if leaves_log2 == 0:
            return self.vertex(1)
        root = self.vertex(0)
        for _ in range(2):
            child = self.binary(leaves_log2 - 1)
            self.edge(root, child)
        return root

    def bouquet(self, count: int, leaves_log2: int) -> int:
        """Root carrying `count` equal perfect binary trees."""
        root = self.vertex(0)
        for _ in range(count):
            child = self.binary(leaves_log2)
            self.edge(root, child)
        return root

    def part(self, size: int) -> int:
        """Root of the perfect subtree with the given leaf count."""
        if size == 1:
            return self.vertex(1)
        if size & (size - 1) == 0:  # 2^q, q >= 1
            return self.bouquet(2, size.bit_length() - 2)
        assert size % 3 == 0 and (size // 3) & (size // 3 - 1) == 0
        return self.bouquet(3, (size // 3).bit_length() - 1)

    def graph(self) -> DualGraph:
        return DualGraph(self.weights.items(), self.edges)


def build_optimal(g: int) -> DualGraph:
    """A maximally symmetric stable dual graph of genus g.

    Genus one is the single elliptic vertex (legal only as an appendage);
    2, 3*2^n and 5*2^n take their special shapes; every other genus hangs
    one perfect subtree per bit group on a rigid valence-three spine.
    """
    if g < 1:
        raise DomainError(f"genus must be >= 1, got {g}")
    b = _Builder()
    if g == 1:
        b.vertex(1)
        return b.graph()
    if g == 2:
        e1, e2 = b.vertex(1), b.vertex(1)
        b.edge(e1, e2)
        return b.graph()
    if _is_power_times(g, 3):
        b.bouquet(3, (g // 3).bit_length() - 1)
        return b.graph()
    if _is_power_times(g, 5):
        b.bouquet(5, (g // 5).bit_length() - 1)
        return b.graph()
    sizes = binary_pairing(g).part_sizes()
    roots = [b.part(s) for s in sizes]
    if len(roots) == 1:
        out = stabilize(b.graph())
    elif len(roots) == 2:
        b.edge(roots[0], roots[1])
        out = stabilize(b.graph())
    else:
        spine = [b.vertex(0) for _ in range(len(roots) - 2)]
        for a, bb in zip(spine, spine[1:]):
            b.edge(a, bb)
        b.edge(spine[0], roots[0])
        b.edge(spine[0], roots[1])
        for s, r in zip(spine[1:], roots[2:-1]):
            b.edge(s, r)
        b.edge(spine[-1], roots[-1])
        out = stabilize(b.graph())
    assert genus(out) == g
    return out
