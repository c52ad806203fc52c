"""k-partite decompositions and their clique-width expressions.

A k-decomposition of a graph with a fixed k-partition splits every part in
two so that each primed part is trivial (complete or anti-complete) to each
double-primed part. Recursing to single vertices ("totally decomposable")
certifies clique-width at most 2k via a label-doubling expression.

Split search is exact: fix one of the 2^(k(k-1)) complete/anti flag
matrices; the triviality constraints then say that certain vertex pairs
cannot straddle the cut in a given orientation, which is a monotone
implication digraph. Proper closed vertex sets of that digraph are exactly
the valid primed sides, and one exists iff the digraph is not strongly
connected, so a sink component decides each flag matrix in O(n^2).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .graphs import Graph, TrivialityKind, bits, mask_of, set_relation_kind
from .kexpr import Create, Join, KExpression, Relabel, Union, substitute_labels
from .patterns import find_induced_embedding, pattern


class PartitionError(ValueError):
    pass


class PreconditionViolation(ValueError):
    """A structural precondition failed; carries a concrete witness."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class KPartition:
    """Fixed partition of V(G) into k independent sets (parts may be empty)."""

    graph: Graph
    parts: tuple[int, ...]  # bitmasks

    def __post_init__(self):
        union = 0
        for p in self.parts:
            if union & p:
                raise PartitionError("parts overlap")
            union |= p
            if not self.graph.is_independent_mask(p):
                raise PartitionError("a part is not an independent set")
        if union != self.graph.full_mask():
            raise PartitionError("parts do not cover the vertex set")

    @property
    def k(self) -> int:
        return len(self.parts)


def partition_of(g: Graph, *parts) -> KPartition:
    return KPartition(g, tuple(mask_of(p) for p in parts))


@dataclass(frozen=True)
class DecompositionSplit:
    primed: tuple[int, ...]
    double_primed: tuple[int, ...]
    rel: tuple[tuple[TrivialityKind, ...], ...]  # rel[i][j]: V_i' vs V_j''

    def primed_mask(self) -> int:
        m = 0
        for p in self.primed:
            m |= p
        return m

    def double_mask(self) -> int:
        m = 0
        for p in self.double_primed:
            m |= p
        return m


@dataclass
class DecompositionTree:
    """Binary tree over host-graph vertex ids; leaves are single vertices."""

    vertices: int  # bitmask
    parts: tuple[int, ...]
    split: DecompositionSplit | None = None
    left: "DecompositionTree | None" = None
    right: "DecompositionTree | None" = None

    def is_leaf(self) -> bool:
        return self.split is None

    def leaf_vertex(self) -> int:
        return self.vertices.bit_length() - 1

    def leaf_part(self) -> int:
        for idx, p in enumerate(self.parts):
            if p:
                return idx
        raise ValueError("leaf with no part")


def _split_rel(g: Graph, primed, double) -> tuple[tuple[TrivialityKind, ...], ...]:
    return tuple(
        tuple(set_relation_kind(g, pi, dj) for dj in double) for pi in primed
    )


def _sink_component(arcs: dict[int, list[int]], vertices: list[int]) -> list[list[int]]:
    """Strongly connected components that have no outgoing arcs."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comp_of: dict[int, int] = {}
    comps: list[list[int]] = []
    counter = [0]

    for root in vertices:
        if root in index:
            continue
        work = [(root, iter(arcs.get(root, ())))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(arcs.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp_of[w] = len(comps)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)

    sinks = []
    for idx, comp in enumerate(comps):
        if all(comp_of[w] == idx for v in comp for w in arcs.get(v, ())):
            sinks.append(sorted(comp))
    return sinks


def find_k_decomposition(g: Graph, partition: KPartition) -> DecompositionSplit | None:
    """Some k-decomposition split honouring the fixed partition, or None.

    Deterministic: flag matrices are scanned in a fixed order and the primed
    side is the candidate containing the smallest vertex id overall.
    """
    return _find_split_masks(g, partition.parts)


def _find_split_masks(g: Graph, parts: tuple[int, ...]) -> DecompositionSplit | None:
    """Split search over an arbitrary sub-universe (the union of the parts)."""
    k = len(parts)
    all_vs = [v for p in parts for v in bits(p)]
    if len(all_vs) < 2:
        return None
    part_of = {}
    for idx, p in enumerate(parts):
        for v in bits(p):
            part_of[v] = idx

    cross = [(i, j) for i in range(k) for j in range(k) if i != j]
    best: tuple[int, DecompositionSplit] | None = None
    for combo in product((True, False), repeat=len(cross)):
        alpha = dict(zip(cross, combo))
        arcs: dict[int, list[int]] = {v: [] for v in all_vs}
        for u in all_vs:
            i = part_of[u]
            for w in all_vs:
                if w <= u:
                    continue
                j = part_of[w]
                if i == j:
                    continue
                e = g.has_edge(u, w)
                if e != alpha[(i, j)]:
                    arcs[u].append(w)
                if e != alpha[(j, i)]:
                    arcs[w].append(u)
        full = set(all_vs)
        for sink in _sink_component(arcs, all_vs):
            if len(sink) == len(full):
                continue
            s0 = set(sink)
            primed = tuple(mask_of(v for v in bits(p) if v in s0) for p in parts)
            double = tuple(mask_of(v for v in bits(p) if v not in s0) for p in parts)
            split = DecompositionSplit(primed, double, _split_rel(g, primed, double))
            key = min(sink)
            if best is None or key < best[0]:
                best = (key, split)
        if best is not None:
            return best[1]
    return None


def _decompose_rec(g: Graph, parts: tuple[int, ...]) -> DecompositionTree | None:
    total = 0
    for p in parts:
        total |= p
    node = DecompositionTree(total, parts)
    if total.bit_count() == 1:
        return node
    split = _find_split_masks(g, parts)
    if split is None:
        return None
    node.split = split
    node.left = _decompose_rec(g, split.primed)
    node.right = _decompose_rec(g, split.double_primed)
    if node.left is None or node.right is None:
        return None
    return node


def canonical_totally_decompose(g: Graph, partition: KPartition) -> DecompositionTree | None:
    """Recursive 2-decomposition down to single vertices, or None.

    The verdict coincides with (P7,S123)-freeness for bipartite inputs; any
    split works there because freeness is hereditary, so no backtracking.
    """
    if partition.k != 2:
        raise PartitionError("canonical decomposition expects a bipartition")
    if g.n == 0:
        return None
    return _decompose_rec(g, partition.parts)


def cross_triple_witness(g: Graph, parts: tuple[int, int, int]) -> tuple[str, tuple] | None:
    """A K3 or 3P1 with one vertex per part, if any exists."""
    v1m, v2m, v3m = parts
    for a in bits(v1m):
        for b in bits(v2m):
            ab = g.has_edge(a, b)
            hits = g.adj[a] & g.adj[b] & v3m if ab else ~g.adj[a] & ~g.adj[b] & v3m
            for c in bits(hits & v3m):
                if ab:
                    return "K3", (a, b, c)
                return "3P1", (a, b, c)
    return None


def check_tripartite_preconditions(g: Graph, parts: tuple[int, int, int]) -> None:
    """Raise PreconditionViolation unless the 3-partite conditions hold.

    Needed: each of the three pairwise bipartite graphs is (P7,S123)-free,
    and no cross-part triple induces K3 or 3P1. These are hereditary, so a
    single check at the root covers the whole recursion.
    """
    if len(parts) != 3:
        raise PartitionError("expected a 3-partition")
    v1m, v2m, v3m = parts
    trip = cross_triple_witness(g, (v1m, v2m, v3m))
    if trip is not None:
        kind, verts = trip
        raise PreconditionViolation(f"cross-part triple induces {kind}", (kind, verts))
    from .graphs import induced_subgraph

    for a, b in ((v1m, v2m), (v1m, v3m), (v2m, v3m)):
        sub, remap = induced_subgraph(g, list(bits(a | b)))
        back = {nw: old for old, nw in remap.items()}
        for name in ("P7", "S123"):
            emb = find_induced_embedding(sub, pattern(name))
            if emb is not None:
                raise PreconditionViolation(
                    f"pairwise bipartite graph contains {name}",
                    (name, tuple(back[x] for x in emb)),
                )


def _two_decompose_pair(g: Graph, am: int, bm: int) -> tuple[int, int, int, int] | None:
    """2-decomposition of G[am|bm] wrt (am, bm): (a', a'', b', b'')."""
    split = _find_split_masks(g, (am, bm))
    if split is None:
        return None
    return split.primed[0], split.double_primed[0], split.primed[1], split.double_primed[1]


def tripartite_total_decompose(g: Graph, partition: KPartition) -> DecompositionTree:
    """Constructive total 3-decomposition under the pairwise conditions.

    Follows the inductive argument: with an empty part the graph is a
    (P7,S123)-free bipartite graph, so canonical decomposition finishes it.
    Otherwise 2-decompose G[V1 u V2], normalise so V1' and V2'' are
    non-empty, grow them to maximality, and classify V3 by the single
    complete/anti-complete flag between V1' and V2''. Claim failures carry
    concrete K3/3P1 witnesses: they mean the preconditions were violated.
    """
    if partition.k != 3:
        raise PartitionError("expected a 3-partition")
    return tripartite_decompose_masks(g, partition.parts)


def tripartite_decompose_masks(g: Graph, parts: tuple[int, int, int]) -> DecompositionTree:
    """Same as tripartite_total_decompose but on a sub-universe of g."""
    for p in parts:
        if not g.is_independent_mask(p):
            raise PartitionError("a part is not an independent set")
    check_tripartite_preconditions(g, parts)
    return _tripartite_rec(g, parts)


def _tripartite_rec(g: Graph, parts: tuple[int, ...]) -> DecompositionTree:
    total = parts[0] | parts[1] | parts[2]
    if total == 0:
        raise PartitionError("cannot decompose the empty graph")
    node = DecompositionTree(total, parts)
    if total.bit_count() == 1:
        return node
    nonempty = [idx for idx, p in enumerate(parts) if p]

    if len(nonempty) == 1:
        # independent set: peel the smallest vertex
        p = parts[nonempty[0]]
        lowest = p & -p
        primed = tuple(lowest if idx == nonempty[0] else 0 for idx in range(3))
        double = tuple(p ^ lowest if idx == nonempty[0] else 0 for idx in range(3))
        split = DecompositionSplit(primed, double, _split_rel(g, primed, double))
    elif len(nonempty) == 2:
        a, b = nonempty
        found = _two_decompose_pair(g, parts[a], parts[b])
        if found is None:
            raise PreconditionViolation(
                "no 2-decomposition on a supposedly (P7,S123)-free bipartite graph"
            )
        ap, app, bp, bpp = found
        primed = tuple(ap if i == a else bp if i == b else 0 for i in range(3))
        double = tuple(app if i == a else bpp if i == b else 0 for i in range(3))
        split = DecompositionSplit(primed, double, _split_rel(g, primed, double))
    else:
        split = _tripartite_split(g, parts)

    node.split = split
    node.left = _tripartite_rec(g, split.primed)
    node.right = _tripartite_rec(g, split.double_primed)
    return node


def _tripartite_split(g: Graph, parts: tuple[int, ...]) -> DecompositionSplit:
    v1m, v2m, v3m = parts
    found = _two_decompose_pair(g, v1m, v2m)
    if found is None:
        raise PreconditionViolation(
            "no 2-decomposition on a supposedly (P7,S123)-free bipartite graph"
        )
    a1, a1d, a2, a2d = found  # V1', V1'', V2', V2''
    if not a1 or not a2d:
        # both result graphs are non-empty, so swapping primes fixes it
        a1, a1d, a2, a2d = a1d, a1, a2d, a2
    if not a1 or not a2d:
        raise PreconditionViolation("2-decomposition with an empty side")

    complete_flag = set_relation_kind(g, a1, a2d) == TrivialityKind.COMPLETE

    def matches_flag(v: int, against: int) -> bool:
        hits = g.adj[v] & against
        return hits == against if complete_flag else hits == 0

    # grow V1' and V2'' while the split property survives (ascending ids)
    changed = True
    while changed:
        changed = False
        for v in bits(a1d):
            if matches_flag(v, a2d):
                a1d &= ~(1 << v)
                a1 |= 1 << v
                changed = True
        for w in bits(a2):
            if matches_flag(w, a1):
                a2 &= ~(1 << w)
                a2d |= 1 << w
                changed = True

    v3p = 0
    v3pp = 0
    for z in bits(v3m):
        nb1 = g.adj[z] & a1
        nb2 = g.adj[z] & a2d
        if complete_flag:
            if nb1 and nb2:
                x = (nb1 & -nb1).bit_length() - 1
                y = (nb2 & -nb2).bit_length() - 1
                raise PreconditionViolation("cross-part triple induces K3", ("K3", (x, y, z)))
            if nb2 == 0:
                v3p |= 1 << z
            else:
                v3pp |= 1 << z
        else:
            if nb1 != a1 and nb2 != a2d:
                x = (a1 & ~g.adj[z]) & -(a1 & ~g.adj[z])
                y = (a2d & ~g.adj[z]) & -(a2d & ~g.adj[z])
                raise PreconditionViolation(
                    "cross-part triple induces 3P1",
                    ("3P1", (x.bit_length() - 1, y.bit_length() - 1, z)),
                )
            if nb2 == a2d:
                v3p |= 1 << z
            else:
                v3pp |= 1 << z

    _check_tail_claims(g, a1, a1d, a2, a2d, v3p, v3pp, complete_flag)
    primed = (a1, a2, v3p)
    double = (a1d, a2d, v3pp)
    return DecompositionSplit(primed, double, _split_rel(g, primed, double))


def _check_tail_claims(g, a1, a1d, a2, a2d, v3p, v3pp, complete_flag):
    """The four derived triviality claims; failures yield explicit witnesses."""
    if complete_flag:
        for v in bits(a1d):
            missing = v3p & ~g.adj[v]
            if missing:
                z = (missing & -missing).bit_length() - 1
                non = a2d & ~g.adj[v]
                w = (non & -non).bit_length() - 1 if non else None
                raise PreconditionViolation(
                    "cross-part triple induces 3P1", ("3P1", (v, w, z))
                )
        for w in bits(a2):
            missing = v3pp & ~g.adj[w]
            if missing:
                z = (missing & -missing).bit_length() - 1
                non = a1 & ~g.adj[w]
                v = (non & -non).bit_length() - 1 if non else None
                raise PreconditionViolation(
                    "cross-part triple induces 3P1", ("3P1", (v, w, z))
                )
    else:
        for v in bits(a1d):
            hit = v3p & g.adj[v]
            if hit:
                z = (hit & -hit).bit_length() - 1
                nb = a2d & g.adj[v]
                w = (nb & -nb).bit_length() - 1 if nb else None
                raise PreconditionViolation(
                    "cross-part triple induces K3", ("K3", (v, w, z))
                )
        for w in bits(a2):
            hit = v3pp & g.adj[w]
            if hit:
                z = (hit & -hit).bit_length() - 1
                nb = a1 & g.adj[w]
                v = (nb & -nb).bit_length() - 1 if nb else None
                raise PreconditionViolation(
                    "cross-part triple induces K3", ("K3", (v, w, z))
                )


def expression_from_tree(tree: DecompositionTree, k: int) -> KExpression:
    """Width <= 2k expression: part i keeps label i+1 throughout.

    At each split the right child is rebuilt with labels shifted by k (a
    label swap, so internal labels stay within 1..2k), joined to the left by
    the recorded complete flags, and folded back.
    """
    swap = {}
    for i in range(1, k + 1):
        swap[i] = k + i
        swap[k + i] = i

    def build(node: DecompositionTree) -> KExpression:
        if node.is_leaf():
            return Create(node.leaf_part() + 1, node.leaf_vertex())
        e1 = build(node.left)
        e2 = substitute_labels(build(node.right), swap)
        e: KExpression = Union(e1, e2)
        split = node.split
        for i in range(k):
            for j in range(k):
                if (
                    split.rel[i][j] == TrivialityKind.COMPLETE
                    and split.primed[i]
                    and split.double_primed[j]
                ):
                    e = Join(i + 1, k + j + 1, e)
        for j in range(k):
            if split.double_primed[j]:
                e = Relabel(k + j + 1, j + 1, e)
        return e

    if tree is None:
        raise ValueError("no tree to build from")
    _assert_complete(tree)
    return build(tree)


def _assert_complete(tree: DecompositionTree) -> None:
    stack = [tree]
    while stack:
        node = stack.pop()
        if node.is_leaf():
            if node.vertices.bit_count() != 1:
                raise ValueError("leaf spanning several vertices: tree incomplete")
            continue
        if node.left is None or node.right is None:
            raise ValueError("tree incomplete: missing child under a split")
        stack.extend((node.left, node.right))


def format_tree(tree: DecompositionTree) -> str:
    """Stable nested-parentheses serialization with part contents and flags."""

    def fmt_parts(masks) -> str:
        return "[" + ";".join(",".join(map(str, bits(p))) for p in masks) + "]"

    def walk(node: DecompositionTree) -> str:
        if node.is_leaf():
            return f"(leaf {node.leaf_vertex()} p{node.leaf_part() + 1})"
        rel = "/".join(
            "".join("C" if x == TrivialityKind.COMPLETE else "A" for x in row)
            for row in node.split.rel
        )
        return (
            f"(split {fmt_parts(node.split.primed)} {fmt_parts(node.split.double_primed)} "
            f"{rel} {walk(node.left)} {walk(node.right)})"
        )

    return walk(tree)
