"""Reductions for (K3,H)-free graphs, H in {P1+P5, S122, P1+P2+P3, P1+2P2}.

C5-free inputs fall to the odd-cycle reducer. Otherwise the graph organises
around an induced C5 into sets U (no cycle neighbours), W_i (exactly v_i)
and V_i (exactly v_{i-1} and v_{i+1}); the H-specific claims empty U, force
the pentagonal structure, and after deleting the cycle the ten-set reducer
finishes. The P1+P2+P3 case carries extra machinery: singleton sets are
deleted, W_i-W_{i+2} matchings are split off as width-2 pieces, and a
cross 3P1 triggers a six-complementation collapse to an edgeless graph.
Claim checks are assertions: a failure contradicts the theory on an input
that passed the freeness precondition, so it aborts with a witness.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..decomp import PreconditionViolation
from ..graphs import (
    Graph,
    TrivialityKind,
    bits,
    components,
    induced_subgraph,
    is_connected,
    mask_of,
    set_relation_kind,
)
from ..kexpr import Create, expr_for_max_degree_2, expr_independent
from ..patterns import find_induced_embedding, is_free, pattern
from .certificate import (
    CITE_DIAMOND_P2P3,
    BipartiteComplement,
    CertBuilder,
    CertNode,
    ClaimViolation,
    DeleteVertices,
)
from .oddcycle import reduce_k3_c5_s123_free
from .tenset import TenSetPartition, _tenset_node, check_ten_set_conditions

SUPPORTED_H = ("P1+P5", "S122", "P1+P2+P3", "P1+2P2")


@dataclass(frozen=True)
class C5Partition:
    cycle: tuple[int, int, int, int, int]  # in cycle order
    u_set: int
    w_sets: tuple[int, int, int, int, int]  # W_i: unique neighbour cycle[i]
    v_sets: tuple[int, int, int, int, int]  # V_i: neighbours cycle[i-1], cycle[i+1]


def partition_around_c5(g: Graph, cycle: tuple[int, ...], checked: bool = False) -> C5Partition:
    """Classify every vertex outside an induced C5 by its cycle neighbours."""
    if len(cycle) != 5:
        raise PreconditionViolation("need exactly five cycle vertices")
    for i in range(5):
        for j in range(i + 1, 5):
            want = (j - i) % 5 in (1, 4)
            if g.has_edge(cycle[i], cycle[j]) != want:
                raise PreconditionViolation("vertices do not induce a C5", cycle)
    if not checked:
        verdict = is_free(g, ["K3"])
        if not verdict.free:
            raise PreconditionViolation("graph contains a triangle", verdict.embedding)
    cyc_mask = mask_of(cycle)
    pos = {v: i for i, v in enumerate(cycle)}
    u_set = 0
    w_sets = [0] * 5
    v_sets = [0] * 5
    for x in range(g.n):
        if cyc_mask >> x & 1:
            continue
        hits = sorted(pos[v] for v in bits(g.adj[x] & cyc_mask))
        if not hits:
            u_set |= 1 << x
        elif len(hits) == 1:
            w_sets[hits[0]] |= 1 << x
        elif len(hits) == 2 and (hits[1] - hits[0]) % 5 in (2, 3):
            centre = (hits[0] + 1) % 5 if (hits[1] - hits[0]) % 5 == 2 else (hits[1] + 1) % 5
            v_sets[centre] |= 1 << x
        else:
            raise PreconditionViolation(
                "vertex adjacent to two consecutive cycle vertices", (x, hits)
            )
    return C5Partition(tuple(cycle), u_set, tuple(w_sets), tuple(v_sets))


def triangle_free_reduce(g: Graph, h_name: str) -> CertNode:
    if h_name not in SUPPORTED_H:
        raise ValueError(f"unsupported companion pattern {h_name!r}")
    verdict = is_free(g, ["K3", h_name])
    if not verdict.free:
        raise PreconditionViolation(
            f"graph contains an induced {verdict.violated}",
            (verdict.violated, verdict.embedding),
        )
    if g.n == 0:
        raise PreconditionViolation("empty graph")
    return _t4_node(g, h_name)


def _t4_node(g: Graph, h: str) -> CertNode:
    b = CertBuilder(g)
    if not is_connected(g):
        return b.close_split([_t4_node(c, h) for c in b.components_graphs()])
    c5 = find_induced_embedding(g, pattern("C5"), cap=8)
    if c5 is None:
        return reduce_k3_c5_s123_free(g)
    part = partition_around_c5(g, c5, checked=True)

    if h in ("S122", "P1+2P2"):
        if part.u_set:
            u = (part.u_set & -part.u_set).bit_length() - 1
            raise ClaimViolation("cycle-far-vertices-must-be-absent", u)
    elif h == "P1+P5":
        handled = _u_handling_p1p5(b, part, h)
        if handled is not None:
            return handled
    else:
        handled = _u_handling_p1p2p3(b, part)
        if handled is not None:
            return handled

    if h == "P1+P2+P3":
        return _p1p2p3_body(b, part)
    return _pentagon_finish(b, part, h)


# -- U handling ---------------------------------------------------------------


def _u_handling_p1p5(b: CertBuilder, part: C5Partition, h: str) -> CertNode | None:
    g = b.graph
    um = part.u_set
    if not um:
        return None
    u0 = (um & -um).bit_length() - 1
    common = g.adj[u0] & ~um
    for u in bits(um):
        if g.adj[u] & um:
            other = g.adj[u] & um
            raise ClaimViolation(
                "far-set-not-independent", (u, (other & -other).bit_length() - 1)
            )
        if g.adj[u] & ~um != common:
            raise ClaimViolation("far-set-neighbourhoods-differ", (u0, u))
    b.apply(BipartiteComplement(tuple(bits(um)), tuple(bits(common))))
    return b.close_split([_leaf_or_recurse_p1p5(c, h) for c in b.components_graphs()])


def _leaf_or_recurse_p1p5(comp: Graph, h: str) -> CertNode:
    if comp.n == 1:
        return CertBuilder(comp).close_base(Create(1, 0), 1)
    return _t4_node(comp, h)


def _u_handling_p1p2p3(b: CertBuilder, part: C5Partition) -> CertNode | None:
    g = b.graph
    um = part.u_set
    if not um:
        return None
    for u in bits(um):
        if g.adj[u] & um:
            other = g.adj[u] & um
            raise ClaimViolation(
                "far-set-not-independent", (u, (other & -other).bit_length() - 1)
            )
    for u in bits(um):
        for i in range(5):
            group = part.v_sets[i] | part.w_sets[(i + 1) % 5]
            if (g.adj[u] & group).bit_count() > 1:
                raise ClaimViolation("far-vertex-with-two-group-neighbours", (u, i + 1))
    u0 = (um & -um).bit_length() - 1
    doomed = sorted([u0] + list(bits(g.adj[u0])))
    b.apply(DeleteVertices(tuple(doomed)))
    verdict = is_free(b.graph, ["K3", "P2+P3"])
    if not verdict.free:
        raise ClaimViolation("residue-not-p2p3-free", verdict.embedding)
    return b.close_cite(CITE_DIAMOND_P2P3)


# -- shared pentagon claims ----------------------------------------------------


def _pentagon_claims(g: Graph, part: C5Partition, matchings_removed: bool) -> None:
    vs, ws = part.v_sets, part.w_sets
    for i in range(5):
        for nb in ((i - 1) % 5, (i + 1) % 5):
            if ws[i] and ws[nb]:
                rel = set_relation_kind(g, ws[i], ws[nb])
                if rel != TrivialityKind.COMPLETE:
                    raise ClaimViolation("near-blocks-not-complete", (i + 1, nb + 1))
    for i in range(5):
        for v in bits(vs[i]):
            ln = g.adj[v] & vs[(i - 1) % 5]
            rn = g.adj[v] & vs[(i + 1) % 5]
            lt = ln == 0 or ln == vs[(i - 1) % 5]
            rt = rn == 0 or rn == vs[(i + 1) % 5]
            if not (lt or rt):
                raise ClaimViolation("mid-vertex-nontrivial-both-sides", v)
            wn = g.adj[v] & ws[i]
            if wn != 0 and wn != ws[i]:
                raise ClaimViolation("mid-vertex-nontrivial-to-own-block", v)
    for i in range(5):
        for off in (2, 3):
            j = (i + off) % 5
            rel = set_relation_kind(g, ws[i], ws[j])
            want_anti = matchings_removed
            if rel == TrivialityKind.NONTRIVIAL:
                raise ClaimViolation("far-blocks-not-trivial", (i + 1, j + 1))
            if want_anti and rel == TrivialityKind.COMPLETE:
                raise ClaimViolation("far-blocks-still-joined", (i + 1, j + 1))


def _pentagon_finish(b: CertBuilder, part: C5Partition, h: str) -> CertNode:
    """Common tail: claims, delete the cycle, hand over to the ten-set node."""
    g = b.graph
    _pentagon_claims(g, part, matchings_removed=False)
    return _delete_cycle_and_reduce(b, part)


def _delete_cycle_and_reduce(b: CertBuilder, part: C5Partition) -> CertNode:
    g = b.graph
    rest = g.full_mask() & ~mask_of(part.cycle) & ~part.u_set
    if rest == 0:
        # nothing around the pentagon: the graph is the C5 itself
        return b.close_base(expr_for_max_degree_2(g), 4)
    b.apply(DeleteVertices(part.cycle))
    keep = sorted(bits(rest))
    p = TenSetPartition(part.v_sets, part.w_sets).restrict(keep)
    cond = check_ten_set_conditions(b.graph, p)
    if not cond:
        raise ClaimViolation(f"pentagonal-condition-{cond.condition}", cond.witness)
    tail = _tenset_node(b.graph, p)
    tail.steps = b.node.steps + tail.steps
    tail.hash_before = b.node.hash_before
    tail.n = b.node.n
    return tail


# -- the P1+P2+P3 specific body -------------------------------------------------


def _p1p2p3_body(b: CertBuilder, part: C5Partition) -> CertNode:
    cap = 10 * max(b.graph.n, 1)
    for _ in range(cap):
        g = b.graph
        vs, ws = part.v_sets, part.w_sets

        small = 0
        for m in vs + ws:
            if m.bit_count() == 1:
                small |= m
        if small:
            b.apply(DeleteVertices(tuple(bits(small))))
            part = _shift_partition(part, small, g.n)
            continue

        hit = _matching_pair(g, part)
        if hit is not None:
            return _split_matching(b, part, *hit)

        trip = _cross_3p1(g, part)
        if trip is not None:
            return _edgeless_collapse(b, part, *trip)

        _pentagon_claims(g, part, matchings_removed=True)
        return _delete_cycle_and_reduce(b, part)
    raise ClaimViolation("reduction-loop-exceeded-its-cap", cap)


def _shift_partition(part: C5Partition, removed: int, old_n: int) -> C5Partition:
    keep = [v for v in range(old_n) if not removed >> v & 1]
    remap = {v: i for i, v in enumerate(keep)}

    def shift_mask(m: int) -> int:
        return mask_of(remap[v] for v in bits(m) if v in remap)

    return C5Partition(
        tuple(remap[v] for v in part.cycle),
        shift_mask(part.u_set),
        tuple(shift_mask(m) for m in part.w_sets),
        tuple(shift_mask(m) for m in part.v_sets),
    )


def _matching_pair(g: Graph, part: C5Partition):
    ws = part.w_sets
    for i in range(5):
        j = (i + 2) % 5
        crossing = [(u, v) for u in bits(ws[i]) for v in bits(g.adj[u] & ws[j])]
        if not crossing:
            continue
        for u in bits(ws[i]):
            if (g.adj[u] & ws[j]).bit_count() > 1:
                raise ClaimViolation("far-block-edges-not-a-matching", (u, i + 1, j + 1))
        for v in bits(ws[j]):
            if (g.adj[v] & ws[i]).bit_count() > 1:
                raise ClaimViolation("far-block-edges-not-a-matching", (v, j + 1, i + 1))
        side_i = mask_of(u for u, _ in crossing)
        side_j = mask_of(v for _, v in crossing)
        return i, j, side_i, side_j
    return None


def _split_matching(b: CertBuilder, part: C5Partition, i, j, side_i, side_j) -> CertNode:
    g = b.graph
    piece = side_i | side_j
    for x in range(g.n):
        if piece >> x & 1:
            continue
        for side in (side_i, side_j):
            hits = g.adj[x] & side
            if hits != 0 and hits != side:
                raise ClaimViolation("matched-pair-not-trivial-outside", (x, i + 1, j + 1))
    z1 = mask_of(
        x for x in range(g.n) if not piece >> x & 1 and g.adj[x] & side_i == side_i
    )
    z2 = mask_of(
        x for x in range(g.n) if not piece >> x & 1 and g.adj[x] & side_j == side_j
    )
    if z1:
        b.apply(BipartiteComplement(tuple(bits(side_i)), tuple(bits(z1))))
    if z2:
        b.apply(BipartiteComplement(tuple(bits(side_j)), tuple(bits(z2))))
    g = b.graph
    for x in bits(piece):
        if g.adj[x] & ~piece:
            raise ClaimViolation("matching-separation-incomplete", x)
    children = []
    for comp in components(g):
        sub, _ = induced_subgraph(g, comp)
        comp_mask = mask_of(comp)
        if comp_mask & piece:
            if sub.n != 2 or sub.edge_count() != 1:
                raise ClaimViolation("matching-component-is-not-an-edge", comp)
            leaf = CertBuilder(sub)
            children.append(leaf.close_base(expr_for_max_degree_2(sub), 2))
        else:
            children.append(_t4_node(sub, "P1+P2+P3"))
    if len(children) == 1:
        only = children[0]
        only.steps = b.node.steps + only.steps
        only.hash_before = b.node.hash_before
        only.n = b.node.n
        return only
    return b.close_split(children)


def _cross_3p1(g: Graph, part: C5Partition):
    vs, ws = part.v_sets, part.w_sets
    for i in range(5):
        for v in bits(vs[i]):
            for w in bits(vs[(i + 1) % 5] & ~g.adj[v]):
                third = ws[(i + 3) % 5] & ~g.adj[v] & ~g.adj[w]
                if third:
                    x = (third & -third).bit_length() - 1
                    return i, v, w, x
    return None


def _edgeless_collapse(b: CertBuilder, part: C5Partition, i, v, w, x) -> CertNode:
    """A cross 3P1 forces everything into three sets; six complementations
    plus the cycle deletion leave an edgeless graph."""
    g = b.graph
    vs, ws = part.v_sets, part.w_sets
    for jdx in range(5):
        if jdx not in (i, (i + 1) % 5) and vs[jdx]:
            raise ClaimViolation("threeway-collapse-extra-mid-set", jdx + 1)
        if jdx != (i + 3) % 5 and ws[jdx]:
            raise ClaimViolation("threeway-collapse-extra-block", jdx + 1)
    groups = []
    for (a, c), home in (((w, x), vs[i]), ((v, x), vs[(i + 1) % 5]), ((v, w), ws[(i + 3) % 5])):
        lo = hi = 0
        for y in bits(home):
            hits = (g.adj[y] >> a & 1) + (g.adj[y] >> c & 1)
            if hits == 0:
                lo |= 1 << y
            elif hits == 2:
                hi |= 1 << y
            else:
                raise ClaimViolation("threeway-collapse-mixed-vertex", y)
        groups.append((lo, hi))
    (v1p, v1pp), (v2p, v2pp), (w4p, w4pp) = groups
    b.apply(DeleteVertices(part.cycle))
    shift = _shift_after(part.cycle, b.node.steps[-1][0].vertices, g.n)
    v1p, v1pp, v2p, v2pp, w4p, w4pp = (
        shift(v1p),
        shift(v1pp),
        shift(v2p),
        shift(v2pp),
        shift(w4p),
        shift(w4pp),
    )
    pairs = ((v1p, v2pp), (v1p, w4pp), (v2p, v1pp), (v2p, w4pp), (w4p, v1pp), (w4p, v2pp))
    for a_mask, b_mask in pairs:
        if a_mask and b_mask:
            b.apply(BipartiteComplement(tuple(bits(a_mask)), tuple(bits(b_mask))))
    if b.graph.edge_count() != 0:
        raise ClaimViolation("threeway-collapse-left-edges")
    return b.close_base(expr_independent(range(b.graph.n)), 1)


def _shift_after(cycle, deleted, old_n):
    keep = [u for u in range(old_n) if u not in set(deleted)]
    remap = {u: idx for idx, u in enumerate(keep)}

    def shift(m: int) -> int:
        return mask_of(remap[u] for u in bits(m) if u in remap)

    return shift
