"""Immutable simple graphs with bitset adjacency.

Vertices are dense integers 0..n-1; the adjacency of each vertex is a Python
int used as a bitset, so complete/anti-complete queries, common-neighbourhood
lookups and induced-subgraph extraction are word-parallel. Graphs are
hashable value objects: every operation returns a new Graph.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class TrivialityKind(enum.Enum):
    COMPLETE = "complete"
    ANTICOMPLETE = "anticomplete"
    NONTRIVIAL = "nontrivial"


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> Iterator[int]:
    """Yield set bit positions in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """Finite undirected graph, no loops or multi-edges."""

    __slots__ = ("n", "adj", "_hash")

    def __init__(self, n: int, adj: tuple[int, ...]):
        self.n = n
        self.adj = adj
        self._hash = hash((n, adj))

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edges()})"

    # -- queries ----------------------------------------------------------

    def vertices(self) -> range:
        return range(self.n)

    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbours(self, v: int) -> int:
        """Neighbourhood of v as a bitmask."""
        return self.adj[v]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.adj[u]) if u < v]

    def edge_count(self) -> int:
        return sum(self.adj[v].bit_count() for v in range(self.n)) // 2

    def max_degree(self) -> int:
        return max((a.bit_count() for a in self.adj), default=0)

    def is_clique_mask(self, mask: int) -> bool:
        for v in bits(mask):
            if mask & ~self.adj[v] & ~(1 << v):
                return False
        return True

    def is_independent_mask(self, mask: int) -> bool:
        for v in bits(mask):
            if self.adj[v] & mask:
                return False
        return True


def make_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a graph from an edge list; duplicate edges collapse.

    Raises ValueError for out-of-range ids or self-loop pairs.
    """
    if n < 0:
        raise ValueError("vertex count must be non-negative")
    adj = [0] * n
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u},{v}) out of range for n={n}")
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return Graph(n, tuple(adj))


def from_adj_masks(n: int, adj: Sequence[int]) -> Graph:
    return Graph(n, tuple(adj))


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    """Subgraph induced by the given vertices plus the old->new id map.

    New ids follow ascending old-id order, so extraction is deterministic.
    """
    vs = sorted(set(vertices))
    for v in vs:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} not in graph")
    remap = {v: i for i, v in enumerate(vs)}
    adj = [0] * len(vs)
    for old, new in remap.items():
        for w in bits(g.adj[old]):
            if w in remap:
                adj[new] |= 1 << remap[w]
    return Graph(len(vs), tuple(adj)), remap


def subgraph_complement(g: Graph, inside: Iterable[int]) -> Graph:
    """Toggle every pair inside the given set; other pairs unchanged."""
    mask = mask_of(inside)
    adj = list(g.adj)
    for v in bits(mask):
        adj[v] ^= mask & ~(1 << v)
    return Graph(g.n, tuple(adj))


def bipartite_complement(g: Graph, side_a: Iterable[int], side_b: Iterable[int]) -> Graph:
    """Toggle every pair with one end in side_a and the other in side_b."""
    a, b = mask_of(side_a), mask_of(side_b)
    if a & b:
        raise ValueError("bipartite complementation sides must be disjoint")
    adj = list(g.adj)
    for v in bits(a):
        adj[v] ^= b
    for v in bits(b):
        adj[v] ^= a
    return Graph(g.n, tuple(adj))


def complement(g: Graph) -> Graph:
    return subgraph_complement(g, range(g.n))


@dataclass(frozen=True)
class Relation:
    """How two disjoint vertex sets relate to each other."""

    kind: TrivialityKind
    x_kinds: dict[int, TrivialityKind]
    y_kinds: dict[int, TrivialityKind]
    is_matching: bool
    is_perfect_matching: bool


def _vertex_kind(g: Graph, v: int, other: int) -> TrivialityKind:
    hits = g.adj[v] & other
    if hits == other and other:
        return TrivialityKind.COMPLETE
    if hits == 0:
        return TrivialityKind.ANTICOMPLETE
    return TrivialityKind.NONTRIVIAL


def set_relation_kind(g: Graph, x_mask: int, y_mask: int) -> TrivialityKind:
    """Complete iff all cross pairs are edges, anti-complete iff none.

    If either side is empty there are no pairs; that counts as anti-complete
    (an empty edge set), matching the empty-matching convention.
    """
    if not x_mask or not y_mask:
        return TrivialityKind.ANTICOMPLETE
    complete = anti = True
    for v in bits(x_mask):
        hits = g.adj[v] & y_mask
        if hits != y_mask:
            complete = False
        if hits:
            anti = False
        if not complete and not anti:
            return TrivialityKind.NONTRIVIAL
    return TrivialityKind.COMPLETE if complete else TrivialityKind.ANTICOMPLETE


def relation_between(g: Graph, xs: Iterable[int], ys: Iterable[int]) -> Relation:
    """Full relation record between disjoint sets X and Y.

    Matching: every vertex of either side has at most one cross neighbour;
    an empty edge set is a matching. Perfect matching additionally needs
    |X| = |Y| with all cross degrees exactly 1.
    """
    x_mask, y_mask = mask_of(xs), mask_of(ys)
    if x_mask & y_mask:
        raise ValueError("sets must be disjoint")
    x_kinds = {v: _vertex_kind(g, v, y_mask) for v in bits(x_mask)}
    y_kinds = {v: _vertex_kind(g, v, x_mask) for v in bits(y_mask)}
    x_degs = [(g.adj[v] & y_mask).bit_count() for v in bits(x_mask)]
    y_degs = [(g.adj[v] & x_mask).bit_count() for v in bits(y_mask)]
    matching = all(d <= 1 for d in x_degs) and all(d <= 1 for d in y_degs)
    perfect = (
        matching
        and x_mask.bit_count() == y_mask.bit_count()
        and all(d == 1 for d in x_degs)
        and all(d == 1 for d in y_degs)
    )
    return Relation(set_relation_kind(g, x_mask, y_mask), x_kinds, y_kinds, matching, perfect)


def false_twin_classes(g: Graph) -> list[list[int]]:
    """Partition vertices into classes of equal open neighbourhood.

    Classes are listed by smallest member, members ascending. Two adjacent
    vertices never share a class (their neighbourhoods differ at each other).
    """
    by_nbhd: dict[int, list[int]] = {}
    for v in range(g.n):
        by_nbhd.setdefault(g.adj[v], []).append(v)
    return sorted(by_nbhd.values(), key=lambda c: c[0])


def components(g: Graph) -> list[list[int]]:
    """Connected components, ordered by smallest member id."""
    seen = 0
    out = []
    for v in range(g.n):
        if seen >> v & 1:
            continue
        comp = 1 << v
        frontier = 1 << v
        while frontier:
            nxt = 0
            for u in bits(frontier):
                nxt |= g.adj[u]
            frontier = nxt & ~comp
            comp |= frontier
        seen |= comp
        out.append(list(bits(comp)))
    return out


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(components(g)) == 1


def bipartition(g: Graph) -> tuple[int, int] | None:
    """A 2-colouring as (mask0, mask1), or None if an odd cycle exists.

    Isolated vertices land on side 0; per-component colouring starts at the
    smallest vertex, so the output is deterministic.
    """
    colour = [-1] * g.n
    for start in range(g.n):
        if colour[start] != -1:
            continue
        colour[start] = 0
        stack = [start]
        while stack:
            u = stack.pop()
            for w in bits(g.adj[u]):
                if colour[w] == -1:
                    colour[w] = 1 - colour[u]
                    stack.append(w)
                elif colour[w] == colour[u]:
                    return None
    side0 = mask_of(v for v in range(g.n) if colour[v] == 0)
    return side0, g.full_mask() & ~side0


def graph_key(g: Graph) -> tuple:
    """Order-independent identity of a labelled graph (used for hashing)."""
    return (g.n, g.adj)


def disjoint_union(a: Graph, b: Graph) -> Graph:
    adj = list(a.adj) + [m << a.n for m in b.adj]
    return Graph(a.n + b.n, tuple(adj))


# -- text and graph6 interchange -------------------------------------------


def to_text(g: Graph) -> str:
    """`n m` header plus one `u v` line per edge, 0-based."""
    es = g.edges()
    lines = [f"{g.n} {len(es)}"]
    lines.extend(f"{u} {v}" for u, v in es)
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Graph:
    toks = text.split()
    if len(toks) < 2:
        raise ValueError("graph text needs an `n m` header")
    n, m = int(toks[0]), int(toks[1])
    nums = toks[2:]
    if len(nums) != 2 * m:
        raise ValueError(f"expected {m} edges, found {len(nums) // 2}")
    edges = [(int(nums[2 * i]), int(nums[2 * i + 1])) for i in range(m)]
    return make_graph(n, edges)


def to_graph6(g: Graph) -> str:
    if g.n > 62:
        raise ValueError("only short-form graph6 (n <= 62) is supported")
    out = [chr(g.n + 63)]
    acc = 0
    nbits = 0
    for col in range(1, g.n):
        for row in range(col):
            acc = acc << 1 | (g.adj[row] >> col & 1)
            nbits += 1
            if nbits == 6:
                out.append(chr(acc + 63))
                acc = nbits = 0
    if nbits:
        out.append(chr((acc << (6 - nbits)) + 63))
    return "".join(out)


def from_graph6(s: str) -> Graph:
    s = s.strip()
    if not s:
        raise ValueError("empty graph6 string")
    n = ord(s[0]) - 63
    if not 0 <= n <= 62:
        raise ValueError("only short-form graph6 (n <= 62) is supported")
    need = (n * (n - 1) // 2 + 5) // 6
    if len(s) - 1 != need:
        raise ValueError(f"graph6 string length mismatch for n={n}")
    stream = []
    for ch in s[1:]:
        code = ord(ch) - 63
        if not 0 <= code < 64:
            raise ValueError(f"bad graph6 character {ch!r}")
        stream.extend((code >> k) & 1 for k in range(5, -1, -1))
    edges = []
    idx = 0
    for col in range(1, n):
        for row in range(col):
            if stream[idx]:
                edges.append((row, col))
            idx += 1
    return make_graph(n, edges)
