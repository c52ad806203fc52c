"""Basic graphs: recognition and the nine-label expression.

A basic graph carries vertex-disjoint triangles T^1 < ... < T^p totally
ordered by the orientation of the perfect matchings between them, W-blocks
of triangle-free vertices interleaved with the triangles by that order, a
3-partition V_1,V_2,V_3 aligning every block, and per-triangle independent
sets U^T whose vertices clone one triangle vertex's outside neighbourhood.
Between an earlier and a later block, class k is complete to class k+1
(mod 3) and anti-complete otherwise; consecutive W-blocks may choose either
on the complete diagonal. Such graphs admit a 9-expression built one
triangle-and-block slice at a time.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..decomp import PreconditionViolation, tripartite_decompose_masks, expression_from_tree
from ..graphs import Graph, TrivialityKind, bits, is_connected, mask_of, set_relation_kind
from ..kexpr import (
    Create,
    Join,
    KExpression,
    Relabel,
    Union,
    substitute_labels,
)
from ..patterns import find_induced_embedding, is_free, pattern
from .certificate import ClaimViolation


@dataclass
class BasicStructure:
    graph: Graph
    v_classes: tuple[int, int, int]  # masks
    triangles: tuple[tuple[int, int, int], ...]  # ordered; entry j sits in V_{j+1}
    w_blocks: tuple[int, ...]  # masks, one per triangle
    u_sets: tuple[tuple[int, ...], ...]  # per triangle, sorted
    u_host: tuple[int, ...]  # class index 0..2 of the cloned vertex, -1 if empty

    @property
    def p(self) -> int:
        return len(self.triangles)

    def u_union(self) -> int:
        return mask_of(v for us in self.u_sets for v in us)


def all_triangles(g: Graph) -> list[tuple[int, int, int]]:
    out = []
    for u in range(g.n):
        for v in bits(g.adj[u]):
            if v <= u:
                continue
            for w in bits(g.adj[u] & g.adj[v]):
                if w > v:
                    out.append((u, v, w))
    return out


def check_basic_preconditions(g: Graph) -> None:
    verdict = is_free(g, ["diamond", "P1+2P2", "K4"])
    if not verdict.free:
        raise PreconditionViolation(
            f"graph contains an induced {verdict.violated}",
            (verdict.violated, verdict.embedding),
        )
    if not is_connected(g):
        raise PreconditionViolation("graph is disconnected")
    if find_induced_embedding(g, pattern("K3")) is None:
        raise PreconditionViolation("graph is triangle-free")


def recognize_basic(g: Graph) -> tuple[BasicStructure | None, str | None]:
    """Recover the basic structure of g, or (None, violated property).

    Preconditions ((diamond, P1+2P2, K4)-free, connected, has a triangle)
    raise; property failures report which property broke instead.
    """
    check_basic_preconditions(g)
    tris = all_triangles(g)
    seen = 0
    for t in tris:
        m = mask_of(t)
        if seen & m:
            return None, "two triangles share a vertex"
        seen |= m

    u_by_tri = []
    for t in tris:
        tm = mask_of(t)
        u = mask_of(
            v for v in range(g.n) if not tm >> v & 1 and not (g.adj[v] & tm)
        )
        u_by_tri.append(u)
    script_u = 0
    for u in u_by_tri:
        script_u |= u
    if script_u & seen:
        return None, "no triangle may contain a vertex of the U union (i)"

    # V-classes from the lexicographically least triangle
    v1, v2, v3 = tris[0]
    attach = {v1: [], v2: [], v3: []}
    t1m = mask_of(tris[0])
    for x in range(g.n):
        if t1m >> x & 1 or script_u >> x & 1:
            continue
        hits = g.adj[x] & t1m
        if hits.bit_count() != 1:
            return None, "vertex with several neighbours on the base triangle"
        attach[hits.bit_length() - 1].append(x)
    classes = [
        mask_of(attach[v1]) | 1 << v2,
        mask_of(attach[v2]) | 1 << v3,
        mask_of(attach[v3]) | 1 << v1,
    ]
    for cm in classes:
        if not g.is_independent_mask(cm):
            return None, "a V-class is not independent (iii)"
    if (classes[0] | classes[1] | classes[2] | script_u) != g.full_mask():
        return None, "classes and U do not cover the graph"

    def class_of(v: int) -> int:
        for idx, cm in enumerate(classes):
            if cm >> v & 1:
                return idx
        return -1

    indexed = []
    for t in tris:
        slot = [-1, -1, -1]
        for v in t:
            c = class_of(v)
            if c < 0 or slot[c] != -1:
                return None, "a triangle misses some class (iv)"
            slot[c] = v
        indexed.append(tuple(slot))

    # orient every pair by the matching pattern, then order by wins
    before = {t: set() for t in indexed}
    for a in range(len(indexed)):
        for b in range(a + 1, len(indexed)):
            ta, tb = indexed[a], indexed[b]
            fwd = all(g.has_edge(ta[k], tb[(k + 1) % 3]) for k in range(3))
            bwd = all(g.has_edge(tb[k], ta[(k + 1) % 3]) for k in range(3))
            cross = sum(
                1 for x in ta for y in tb if g.has_edge(x, y)
            )
            if cross != 3 or fwd == bwd:
                return None, "triangle pair is not a cyclic perfect matching (vii)"
            if fwd:
                before[tb].add(ta)
            else:
                before[ta].add(tb)
    ordered = sorted(indexed, key=lambda t: (len(before[t]), t))
    for idx, t in enumerate(ordered):
        if len(before[t]) != idx:
            return None, "triangle order is not total"
    for a in range(len(ordered)):
        for b in range(a + 1, len(ordered)):
            for c in range(b + 1, len(ordered)):
                if ordered[a] not in before[ordered[c]] or ordered[b] not in before[ordered[c]]:
                    return None, "triangle order is not transitive"
    p = len(ordered)

    # W vertices: in no triangle, not in U; one neighbour per triangle
    w_of = {}
    for x in range(g.n):
        if seen >> x & 1 or script_u >> x & 1:
            continue
        cx = class_of(x)
        later = 0
        smaller = set()
        for j, t in enumerate(ordered):
            hits = g.adj[x] & mask_of(t)
            if hits.bit_count() != 1:
                return None, "W vertex without exactly one neighbour in a triangle"
            nb = hits.bit_length() - 1
            if nb == t[(cx + 1) % 3]:
                later += 1  # x < T^j
            elif nb == t[(cx - 1) % 3]:
                smaller.add(j)
            else:
                return None, "W vertex attached to its own class in a triangle"
        if sorted(smaller) != list(range(len(smaller))):
            return None, "W vertex order is not an interval"
        if not smaller:
            return None, "W vertex precedes the base triangle"
        w_of[x] = len(smaller)
    w_blocks = [0] * p
    for x, i in w_of.items():
        w_blocks[i - 1] |= 1 << x

    struct = BasicStructure(
        g,
        tuple(classes),
        tuple(ordered),
        tuple(w_blocks),
        tuple(
            tuple(bits(u_by_tri[tris.index(tuple(sorted(t)))])) for t in ordered
        ),
        (-1,) * p,
    )
    reason = _check_block_relations(struct)
    if reason:
        return None, reason
    hosts, reason = _check_u_sets(struct)
    if reason:
        return None, reason
    struct.u_host = tuple(hosts)
    reason = _check_w_block_contents(struct)
    if reason:
        return None, reason
    return struct, None


def _check_block_relations(b: BasicStructure) -> str | None:
    """Properties (vi)-(xi): complete/anti pattern between ordered blocks."""
    g = b.graph
    blocks: list[tuple[str, int, int]] = []
    for i, t in enumerate(b.triangles):
        blocks.append(("T", i, mask_of(t)))
        blocks.append(("W", i, b.w_blocks[i]))
    for ai in range(len(blocks)):
        for bi in range(ai + 1, len(blocks)):
            kind_a, ia, ma = blocks[ai]
            kind_b, ib, mb = blocks[bi]
            for k in range(3):
                for l in range(3):
                    xa = ma & b.v_classes[k]
                    xb = mb & b.v_classes[l]
                    if not xa or not xb:
                        continue
                    rel = set_relation_kind(g, xa, xb)
                    diag = (k + 1) % 3 == l
                    if kind_a == "W" and kind_b == "W" and ib == ia + 1 and diag:
                        if rel == TrivialityKind.NONTRIVIAL:
                            return "consecutive W-blocks not trivial on the diagonal (ix)"
                        continue
                    want = TrivialityKind.COMPLETE if diag else TrivialityKind.ANTICOMPLETE
                    if rel != want:
                        return (
                            f"blocks {kind_a}{ia + 1},{kind_b}{ib + 1} classes "
                            f"{k + 1},{l + 1} are not {want.value} (vi-xi)"
                        )
    return None


def _check_u_sets(b: BasicStructure) -> tuple[list[int], str | None]:
    g = b.graph
    hosts = []
    for idx, t in enumerate(b.triangles):
        us = b.u_sets[idx]
        if not us:
            hosts.append(-1)
            continue
        um = mask_of(us)
        if not g.is_independent_mask(um):
            return hosts, "a U^T set is not independent (ii)"
        tm = mask_of(t)
        host = -1
        for j in range(3):
            x = t[j]
            want = g.adj[x] & ~tm
            if all(g.adj[u] == want for u in us):
                host = j
                break
        if host < 0:
            return hosts, "U^T vertices do not clone a triangle vertex (ii)"
        hosts.append(host)
    return hosts, None


def _check_w_block_contents(b: BasicStructure) -> str | None:
    from ..graphs import induced_subgraph
    from ..decomp import cross_triple_witness

    g = b.graph
    for i, wm in enumerate(b.w_blocks):
        if not wm:
            continue
        sub, remap = induced_subgraph(g, list(bits(wm)))
        if not is_free(sub, ["P1+2P2"]).free:
            return f"W-block {i + 1} contains P1+2P2 (v)"
        parts = tuple(mask_of(remap[v] for v in bits(wm & b.v_classes[k])) for k in range(3))
        hit = cross_triple_witness(sub, parts)
        if hit is not None and hit[0] == "3P1":
            return f"W-block {i + 1} has a cross-class 3P1 (v)"
    return None


def basic_expression(b: BasicStructure) -> KExpression:
    """The slice-by-slice 9-label construction.

    Loop per triangle: build T^i with labels 4/5/6 and its U clones on the
    host's label, join to the settled graph (1&5, 2&6, 3&4), join to the
    previous W-block still parked on 7/8/9 (4&9, 5&7, 6&8), fold into
    1/2/3, then build the W-block via the 3-partite machinery on labels
    4..9, join it the same way plus the conditional diagonal against the
    parked block, unpark the old block and park the new one on 7/8/9.
    """
    g = b.graph
    shift = {1: 4, 2: 5, 3: 6, 4: 7, 5: 8, 6: 9}
    acc: KExpression | None = None
    prev_w = 0

    for i, tri in enumerate(b.triangles):
        x1, x2, x3 = tri
        block: KExpression = Union(Union(Create(4, x1), Create(5, x2)), Create(6, x3))
        block = Join(4, 6, Join(5, 6, Join(4, 5, block)))
        for u in b.u_sets[i]:
            block = Union(block, Create(4 + b.u_host[i], u))
        if acc is None:
            acc = block
        else:
            acc = Union(acc, block)
            acc = Join(3, 4, Join(2, 6, Join(1, 5, acc)))
            if prev_w:
                acc = Join(6, 8, Join(5, 7, Join(4, 9, acc)))
        acc = Relabel(6, 3, Relabel(5, 2, Relabel(4, 1, acc)))

        wm = b.w_blocks[i]
        if wm:
            parts = tuple(wm & b.v_classes[k] for k in range(3))
            tree = tripartite_decompose_masks(g, parts)
            w_expr = substitute_labels(expression_from_tree(tree, 3), shift)
            acc = Union(acc, w_expr)
            acc = Join(3, 4, Join(2, 6, Join(1, 5, acc)))
            if prev_w:
                pairs = ((4, 9, 0, 2), (5, 7, 1, 0), (6, 8, 2, 1))
                for la, lb, k_new, k_old in pairs:
                    xa = wm & b.v_classes[k_new]
                    xb = prev_w & b.v_classes[k_old]
                    if xa and xb and set_relation_kind(g, xb, xa) == TrivialityKind.COMPLETE:
                        acc = Join(la, lb, acc)
        if prev_w:
            acc = Relabel(9, 3, Relabel(8, 2, Relabel(7, 1, acc)))
        if wm:
            acc = Relabel(6, 9, Relabel(5, 8, Relabel(4, 7, acc)))
        prev_w = wm

    if acc is None:
        raise ClaimViolation("basic structure with no triangles")
    return acc
