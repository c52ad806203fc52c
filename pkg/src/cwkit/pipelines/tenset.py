"""Ten-set reduction for (K3,S123)-free graphs.

The input partitions into ten independent sets V_1..V_5, W_1..W_5 (indices
mod 5) obeying seven pentagonal conditions. The reducer peels "pieces" off
the graph: phase 1 pieces are the doubly-non-trivial cores
V_i' | V_{i+1}'' | W_{i-2}', which separate cleanly because every crossing
edge has an endpoint complete to the other endpoint's cell, and whose
components are 3-partite graphs handled by the total-decomposition builder
(width <= 6). Phase 2 pieces are the starred splits, which are S123-free
bipartite and get cited. Each peel strictly shrinks the rest, so recursion
bottoms out at the empty graph.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..decomp import (
    PreconditionViolation,
    cross_triple_witness,
    expression_from_tree,
    tripartite_decompose_masks,
)
from ..graphs import (
    Graph,
    TrivialityKind,
    bits,
    components,
    induced_subgraph,
    mask_of,
    set_relation_kind,
)
from ..patterns import find_induced_embedding, is_free, pattern
from .certificate import (
    CITE_S123_BIPARTITE,
    BipartiteComplement,
    CertBuilder,
    CertNode,
    ClaimViolation,
)


@dataclass(frozen=True)
class TenSetPartition:
    """Masks for V_1..V_5 and W_1..W_5 (stored 0-indexed)."""

    v_sets: tuple[int, int, int, int, int]
    w_sets: tuple[int, int, int, int, int]

    def restrict(self, keep_sorted: list[int]) -> "TenSetPartition":
        remap = {v: i for i, v in enumerate(keep_sorted)}
        keep = set(keep_sorted)
        return TenSetPartition(
            tuple(mask_of(remap[v] for v in bits(m) if v in keep) for m in self.v_sets),
            tuple(mask_of(remap[v] for v in bits(m) if v in keep) for m in self.w_sets),
        )


def _nontrivial(g: Graph, v: int, target: int) -> bool:
    hits = g.adj[v] & target
    return bool(target) and hits != 0 and hits != target


@dataclass(frozen=True)
class ConditionVerdict:
    ok: bool
    condition: str | None = None
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_ten_set_conditions(g: Graph, p: TenSetPartition) -> ConditionVerdict:
    """Evaluate the seven conditions literally; first failure wins."""
    vs, ws = p.v_sets, p.w_sets
    union = 0
    for m in vs + ws:
        if union & m:
            return ConditionVerdict(False, "partition", ("overlap",))
        union |= m
    if union != g.full_mask():
        return ConditionVerdict(False, "partition", ("cover",))
    for name, sets in (("V", vs), ("W", ws)):
        for i, m in enumerate(sets):
            if not g.is_independent_mask(m):
                return ConditionVerdict(False, "independence", (f"{name}{i + 1}",))

    for i in range(5):
        anti = vs[(i - 2) % 5] | vs[(i + 2) % 5] | ws[(i - 1) % 5] | ws[(i + 1) % 5]
        for v in bits(vs[i]):
            if g.adj[v] & anti:
                w = g.adj[v] & anti
                return ConditionVerdict(False, "i", (v, (w & -w).bit_length() - 1))
    for i in range(5):
        for nb in ((i - 1) % 5, (i + 1) % 5):
            if ws[i] and ws[nb]:
                for v in bits(ws[i]):
                    if g.adj[v] & ws[nb] != ws[nb]:
                        miss = ws[nb] & ~g.adj[v]
                        return ConditionVerdict(False, "ii", (v, (miss & -miss).bit_length() - 1))
    for i in range(5):
        for v in bits(vs[i]):
            if _nontrivial(g, v, vs[(i + 1) % 5]) and _nontrivial(g, v, vs[(i - 1) % 5]):
                return ConditionVerdict(False, "iii", (v,))
    for i in range(5):
        for v in bits(vs[i]):
            if _nontrivial(g, v, ws[i]):
                return ConditionVerdict(False, "iv", (v,))
    for i in range(5):
        for off in (2, 3):
            j = (i + off) % 5
            if set_relation_kind(g, ws[i], ws[j]) == TrivialityKind.NONTRIVIAL:
                return ConditionVerdict(False, "v", (i + 1, j + 1))
    p7 = pattern("P7")
    for i in range(5):
        for j in range(5):
            for other in ((vs[j] if j != i else 0), ws[j]):
                if not other:
                    continue
                sub, remap = induced_subgraph(g, list(bits(vs[i] | other)))
                emb = find_induced_embedding(sub, p7)
                if emb is not None:
                    back = {nw: old for old, nw in remap.items()}
                    return ConditionVerdict(False, "vi", tuple(back[x] for x in emb))
    for i in range(5):
        hit = cross_triple_witness(g, (vs[i], vs[(i + 1) % 5], ws[(i + 3) % 5]))
        if hit is not None and hit[0] == "3P1":
            return ConditionVerdict(False, "vii", hit[1])
    return ConditionVerdict(True)


# -- cell machinery -----------------------------------------------------------


def _phase1_cells(g: Graph, p: TenSetPartition):
    """Primed sets and the cell partition they induce."""
    vs, ws = p.v_sets, p.w_sets
    v_p, v_pp, w_p = [0] * 5, [0] * 5, [0] * 5
    for i in range(5):
        for w in bits(ws[i]):
            if _nontrivial(g, w, vs[(i - 2) % 5]) and _nontrivial(g, w, vs[(i + 2) % 5]):
                w_p[i] |= 1 << w
        for v in bits(vs[i]):
            left = _nontrivial(g, v, vs[(i - 1) % 5])
            right = _nontrivial(g, v, vs[(i + 1) % 5])
            if right and _nontrivial(g, v, ws[(i - 2) % 5]):
                v_p[i] |= 1 << v
            if left and _nontrivial(g, v, ws[(i + 2) % 5]):
                v_pp[i] |= 1 << v
    for i in range(5):
        if v_p[i] & v_pp[i]:
            raise ClaimViolation("primed-sets-overlap", i + 1)
    cells = []
    for i in range(5):
        cells.append(v_p[i])
        cells.append(v_pp[i])
        cells.append(vs[i] & ~v_p[i] & ~v_pp[i])
        cells.append(w_p[i])
        cells.append(ws[i] & ~w_p[i])
    return v_p, v_pp, w_p, [c for c in cells if c]


def _phase2_cells(g: Graph, p: TenSetPartition):
    vs, ws = p.v_sets, p.w_sets
    v_star, w_star = [0] * 5, [0] * 5
    for i in range(5):
        for v in bits(vs[i]):
            if _nontrivial(g, v, vs[(i + 1) % 5]) or _nontrivial(g, v, ws[(i + 2) % 5]):
                v_star[i] |= 1 << v
        for w in bits(ws[i]):
            if _nontrivial(g, w, vs[(i + 2) % 5]):
                w_star[i] |= 1 << w
    v_sstar = [vs[i] & ~v_star[i] for i in range(5)]
    w_sstar = [ws[i] & ~w_star[i] for i in range(5)]
    cells = [m for m in v_star + v_sstar + w_star + w_sstar if m]
    return v_star, v_sstar, w_star, w_sstar, cells


def _separate_piece(b: CertBuilder, piece: int, cells: list[int]) -> None:
    """Remove all edges between the piece and the rest.

    Every crossing edge has an endpoint complete to the other endpoint's
    cell, so per (piece-cell, outside-cell) pair two complementations
    suffice: outside vertices complete to the piece cell, then piece
    vertices (still) complete to the remaining outside cell.
    """
    piece_cells = [c & piece for c in cells if c & piece]
    outside_cells = [c & ~piece for c in cells if c & ~piece]
    for a in piece_cells:
        for c in outside_cells:
            g = b.graph
            b_full = mask_of(v for v in bits(c) if g.adj[v] & a == a)
            if b_full:
                b.apply(BipartiteComplement(tuple(bits(a)), tuple(bits(b_full))))
            g = b.graph
            rest_c = c & ~b_full
            a_full = mask_of(v for v in bits(a) if rest_c and g.adj[v] & rest_c == rest_c)
            if a_full and rest_c:
                b.apply(BipartiteComplement(tuple(bits(a_full)), tuple(bits(rest_c))))
    g = b.graph
    for v in bits(piece):
        if g.adj[v] & ~piece:
            other = g.adj[v] & ~piece
            raise ClaimViolation(
                "piece-separation-incomplete", (v, (other & -other).bit_length() - 1)
            )


def ten_set_reduce(g: Graph, p: TenSetPartition) -> CertNode:
    verdict = is_free(g, ["K3", "S123"])
    if not verdict.free:
        raise PreconditionViolation(
            f"graph contains an induced {verdict.violated}",
            (verdict.violated, verdict.embedding),
        )
    cond = check_ten_set_conditions(g, p)
    if not cond:
        raise PreconditionViolation(
            f"ten-set condition {cond.condition} fails", (cond.condition, cond.witness)
        )
    if g.n == 0:
        raise PreconditionViolation("empty graph")
    return _tenset_node(g, p)


def _tenset_node(g: Graph, p: TenSetPartition) -> CertNode:
    b = CertBuilder(g)
    vs, ws = p.v_sets, p.w_sets

    v_p, v_pp, w_p, cells = _phase1_cells(g, p)
    for i in range(5):
        piece = v_p[i] | v_pp[(i + 1) % 5] | w_p[(i - 2) % 5]
        if not piece:
            continue
        piece_parts = (v_p[i], v_pp[(i + 1) % 5], w_p[(i - 2) % 5])
        _separate_piece(b, piece, cells)
        return _close_after_separation(b, p, piece, piece_parts, phase=1)

    v_star, v_sstar, w_star, w_sstar, cells = _phase2_cells(g, p)
    for i in range(5):
        piece = (
            w_star[i]
            | v_sstar[(i + 2) % 5]
            | v_star[(i + 1) % 5]
            | w_sstar[(i - 2) % 5]
        )
        if not piece:
            continue
        sides = (
            w_star[i] | v_star[(i + 1) % 5],
            v_sstar[(i + 2) % 5] | w_sstar[(i - 2) % 5],
        )
        _separate_piece(b, piece, cells)
        return _close_after_separation(b, p, piece, sides, phase=2)

    raise ClaimViolation("no-piece-on-a-non-empty-graph", g.n)


def _close_after_separation(
    b: CertBuilder, p: TenSetPartition, piece: int, parts, phase: int
) -> CertNode:
    comps = components(b.graph)
    children = []
    for comp in comps:
        comp_mask = mask_of(comp)
        sub, remap = induced_subgraph(b.graph, comp)
        if comp_mask & piece:
            if comp_mask & ~piece:
                raise ClaimViolation("piece-component-crosses-the-rest")
            children.append(_piece_leaf(sub, remap, parts, phase))
        else:
            children.append(_tenset_node(sub, p.restrict(comp)))
    if len(children) == 1:
        # single component: splice the separation steps, no split node needed
        only = children[0]
        only.steps = b.node.steps + only.steps
        only.hash_before = b.node.hash_before
        only.n = b.node.n
        return only
    return b.close_split(children)


def _piece_leaf(sub: Graph, remap: dict[int, int], parts, phase: int) -> CertNode:
    leaf = CertBuilder(sub)
    if phase == 1:
        sub_parts = tuple(mask_of(remap[v] for v in bits(m) if v in remap) for m in parts)
        try:
            tree = tripartite_decompose_masks(sub, sub_parts)
        except PreconditionViolation as exc:
            raise ClaimViolation("phase1-piece-not-decomposable", exc.witness) from exc
        expr = expression_from_tree(tree, 3)
        return leaf.close_base(expr, 6)
    side_a = mask_of(remap[v] for v in bits(parts[0]) if v in remap)
    side_b = mask_of(remap[v] for v in bits(parts[1]) if v in remap)
    if not sub.is_independent_mask(side_a) or not sub.is_independent_mask(side_b):
        raise ClaimViolation("starred-piece-sides-not-independent")
    return leaf.close_cite(CITE_S123_BIPARTITE, 5)