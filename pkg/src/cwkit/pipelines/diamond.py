"""Certified reduction for (diamond, P1+2P2)-free graphs.

Orchestration: disconnected graphs split into components that must be
(diamond,2P2)-free; triangle-free graphs go through the C5 machinery with
companion pattern P1+2P2; graphs with a K4 fall to the maximum-clique case
analysis; everything else satisfies a chain of claims that certify the
graph is basic, closed by the nine-label expression. Claim checks abort
with a witness: on an input that passed the freeness precondition they
would contradict the theory.
"""

from __future__ import annotations

from ..decomp import PreconditionViolation, cross_triple_witness
from ..graphs import (
    Graph,
    bits,
    components,
    induced_subgraph,
    is_connected,
    mask_of,
    set_relation_kind,
    TrivialityKind,
)
from ..kexpr import expr_clique, expr_independent, expr_star
from ..patterns import find_induced_embedding, is_free, pattern
from .basic import BasicStructure, all_triangles, basic_expression, recognize_basic
from .certificate import (
    BipartiteComplement,
    CertBuilder,
    CertNode,
    Certificate,
    ClaimViolation,
    DeleteVertices,
    SubgraphComplement,
    make_certificate,
)
from .oddcycle import leaf_for_component
from .trianglefree import _t4_node


def diamond_reduce(g: Graph) -> Certificate:
    verdict = is_free(g, ["diamond", "P1+2P2"])
    if not verdict.free:
        raise PreconditionViolation(
            f"graph contains an induced {verdict.violated}",
            (verdict.violated, verdict.embedding),
        )
    if g.n == 0:
        raise PreconditionViolation("empty graph")
    return make_certificate(_diamond_node(g))


def _diamond_node(g: Graph) -> CertNode:
    b = CertBuilder(g)
    if not is_connected(g):
        return b.close_split([leaf_for_component(c) for c in b.components_graphs()])
    if find_induced_embedding(g, pattern("K3")) is None:
        return _t4_node(g, "P1+2P2")
    if find_induced_embedding(g, pattern("K4")) is not None:
        return _k4_node(b)
    return _triangle_orchestration(b)


# -- the K4 case ---------------------------------------------------------------


def _maximum_clique(g: Graph) -> int:
    """In a diamond-free graph every edge extends to a unique maximal clique."""
    best = 0
    best_size = 0
    for u in range(g.n):
        for v in bits(g.adj[u]):
            if v <= u:
                continue
            clique = (g.adj[u] & g.adj[v]) | 1 << u | 1 << v
            if clique.bit_count() > best_size:
                if not g.is_clique_mask(clique):
                    raise ClaimViolation("edge-with-non-clique-core", (u, v))
                best, best_size = clique, clique.bit_count()
    return best


def _k4_node(b: CertBuilder) -> CertNode:
    g = b.graph
    k_mask = _maximum_clique(g)
    if k_mask.bit_count() < 4:
        raise ClaimViolation("k4-vanished", k_mask)
    if k_mask == g.full_mask():
        return b.close_base(expr_clique(range(g.n)), 2)
    for x in range(g.n):
        if not k_mask >> x & 1 and (g.adj[x] & k_mask).bit_count() > 1:
            raise ClaimViolation("outside-vertex-with-two-clique-neighbours", x)

    by_out = sorted(bits(k_mask), key=lambda v: (-(g.adj[v] & ~k_mask).bit_count(), v))
    anchors = by_out[:4]
    v_sets = [mask_of(x for x in bits(g.adj[anchors[i]]) if not k_mask >> x & 1) for i in range(4)]
    outside = g.full_mask() & ~k_mask
    u_mask = outside & ~(v_sets[0] | v_sets[1] | v_sets[2] | v_sets[3])

    for i in range(4):
        for j in range(i + 1, 4):
            scope = list(bits(u_mask | v_sets[i] | v_sets[j]))
            sub, _ = induced_subgraph(g, scope)
            if not is_free(sub, ["P1+P2"]).free:
                raise ClaimViolation("anchored-scope-contains-p1p2", (i, j))

    # each V_i is an independent set or a small clique
    for i in range(4):
        vm = v_sets[i]
        if g.is_independent_mask(vm):
            continue
        if g.is_clique_mask(vm):
            if vm.bit_count() >= 3:
                return _big_side_clique(b, k_mask, anchors[i], vm)
            continue
        raise ClaimViolation("attachment-set-neither-clique-nor-independent", i)

    if u_mask.bit_count() <= 2:
        return _small_far_set(b, k_mask, anchors, v_sets, u_mask)

    out_degrees = [(g.adj[v] & ~k_mask).bit_count() for v in bits(k_mask)]
    if all(d <= 1 for d in out_degrees):
        return _pendant_case(b, k_mask, v_sets)
    carriers = [v for v in bits(k_mask) if g.adj[v] & ~k_mask]
    if len(carriers) == 1:
        return _single_carrier(b, carriers[0])
    return _dense_case(b, k_mask, anchors, v_sets, u_mask)


def _big_side_clique(b: CertBuilder, k_mask: int, anchor: int, vm: int) -> CertNode:
    # a clique attachment of size >= 3 empties everything else: V(G) = K u V_1
    g = b.graph
    stray = g.full_mask() & ~k_mask & ~vm
    if stray:
        raise ClaimViolation(
            "big-clique-attachment-with-outside-vertices", tuple(bits(stray))[:3]
        )
    b.apply(DeleteVertices((anchor,)))
    if is_connected(b.graph):
        raise ClaimViolation("anchor-deletion-did-not-disconnect")
    return b.close_split([leaf_for_component(c) for c in b.components_graphs()])


def _small_far_set(b: CertBuilder, k_mask, anchors, v_sets, u_mask) -> CertNode:
    g = b.graph
    doomed = set(bits(u_mask))
    for vm in v_sets:
        if vm and not g.is_independent_mask(vm):
            doomed.update(bits(vm))
    if doomed:
        b.apply(DeleteVertices(tuple(sorted(doomed))))
        shift = _shifter(sorted(doomed), g.n)
        k_mask = shift(k_mask)
        anchors = [shift(1 << a).bit_length() - 1 for a in anchors]
        v_sets = [shift(m) for m in v_sets]
    g = b.graph
    for i in range(4):
        for j in range(i + 1, 4):
            if not v_sets[i] or not v_sets[j]:
                continue
            rel = set_relation_kind(g, v_sets[i], v_sets[j])
            if rel == TrivialityKind.NONTRIVIAL:
                raise ClaimViolation("attachment-sets-not-trivial", (i, j))
            if rel == TrivialityKind.COMPLETE:
                b.apply(
                    BipartiteComplement(tuple(bits(v_sets[i])), tuple(bits(v_sets[j])))
                )
                g = b.graph
    b.apply(DeleteVertices(tuple(sorted(anchors))))
    return _split_into_plain_leaves(b)


def _split_into_plain_leaves(b: CertBuilder) -> CertNode:
    children = []
    for comp in b.components_graphs():
        leaf = CertBuilder(comp)
        if comp.is_clique_mask(comp.full_mask()):
            children.append(leaf.close_base(expr_clique(range(comp.n)), 2 if comp.n > 1 else 1))
        elif comp.edge_count() == 0:
            children.append(leaf.close_base(expr_independent(range(comp.n)), 1))
        elif _is_star(comp):
            centre = max(range(comp.n), key=comp.degree)
            leaves = [v for v in range(comp.n) if v != centre]
            children.append(leaf.close_base(expr_star(centre, leaves), 2))
        else:
            raise ClaimViolation("residual-component-not-star-or-clique", comp.n)
    if len(children) == 1:
        only = children[0]
        only.steps = b.node.steps + only.steps
        only.hash_before = b.node.hash_before
        only.n = b.node.n
        return only
    return b.close_split(children)


def _is_star(g: Graph) -> bool:
    degs = sorted((g.degree(v) for v in range(g.n)), reverse=True)
    return g.n >= 2 and degs[0] == g.n - 1 and all(d == 1 for d in degs[1:])


def _pendant_case(b: CertBuilder, k_mask, v_sets) -> CertNode:
    g = b.graph
    if v_sets[0]:
        b.apply(DeleteVertices(tuple(bits(v_sets[0]))))
        shift = _shifter(list(bits(v_sets[0])), g.n)
        k_mask = shift(k_mask)
    b.apply(SubgraphComplement(tuple(bits(k_mask))))
    children = []
    for comp in b.components_graphs():
        leaf = CertBuilder(comp)
        if comp.n == 1:
            children.append(leaf.close_base(expr_independent([0]), 1))
        elif is_free(comp, ["diamond", "P2+P3"]).free:
            from .certificate import CITE_DIAMOND_P2P3

            children.append(leaf.close_cite(CITE_DIAMOND_P2P3))
        elif comp.n <= 8:
            from ..kexpr import exact_cliquewidth

            k, expr = exact_cliquewidth(comp)
            children.append(leaf.close_base(expr, k))
        else:
            raise ClaimViolation("pendant-residue-outside-the-cited-class", comp.n)
    if len(children) == 1:
        only = children[0]
        only.steps = b.node.steps + only.steps
        only.hash_before = b.node.hash_before
        only.n = b.node.n
        return only
    return b.close_split(children)


def _single_carrier(b: CertBuilder, carrier: int) -> CertNode:
    b.apply(DeleteVertices((carrier,)))
    if is_connected(b.graph):
        raise ClaimViolation("carrier-deletion-did-not-disconnect")
    return b.close_split([leaf_for_component(c) for c in b.components_graphs()])


def _dense_case(b: CertBuilder, k_mask, anchors, v_sets, u_mask) -> CertNode:
    g = b.graph
    pool = [v for v in bits(v_sets[0])][:2] + [next(iter(bits(v_sets[1])), None)]
    pool = [v for v in pool if v is not None]
    xy = None
    for a in range(len(pool)):
        for c in range(a + 1, len(pool)):
            if not g.has_edge(pool[a], pool[c]):
                xy = (pool[a], pool[c])
                break
        if xy:
            break
    if xy is None:
        raise ClaimViolation("attachment-triple-pairwise-adjacent", tuple(pool))
    x, y = xy

    u1 = u2 = 0
    for u in bits(u_mask):
        hits = (g.adj[u] >> x & 1) + (g.adj[u] >> y & 1)
        if hits == 2:
            u1 |= 1 << u
        elif hits == 0:
            u2 |= 1 << u
        else:
            raise ClaimViolation("far-vertex-mixed-on-the-anchor-pair", u)
    if not g.is_independent_mask(u1) or not g.is_independent_mask(u2):
        raise ClaimViolation("far-sides-not-independent")
    if u1 and u2 and set_relation_kind(g, u1, u2) != TrivialityKind.COMPLETE:
        raise ClaimViolation("far-set-not-complete-bipartite")
    if u1.bit_count() < u2.bit_count():
        u1, u2 = u2, u1
    if u2.bit_count() == 1:
        b.apply(DeleteVertices(tuple(bits(u2))))
        shift = _shifter(list(bits(u2)), g.n)
        k_mask, u1, u2 = shift(k_mask), shift(u1), 0
        anchors = [shift(1 << a).bit_length() - 1 for a in anchors]
        v_sets = [shift(m) for m in v_sets]
        g = b.graph

    doomed = set()
    for vm in v_sets:
        if vm and not g.is_independent_mask(vm):
            doomed.update(bits(vm))
    if doomed:
        b.apply(DeleteVertices(tuple(sorted(doomed))))
        shift = _shifter(sorted(doomed), g.n)
        k_mask, u1, u2 = shift(k_mask), shift(u1), shift(u2)
        anchors = [shift(1 << a).bit_length() - 1 for a in anchors]
        v_sets = [shift(m) for m in v_sets]
        g = b.graph

    for i in range(4):
        for j in range(i + 1, 4):
            if not v_sets[i] or not v_sets[j]:
                continue
            rel = set_relation_kind(g, v_sets[i], v_sets[j])
            if rel == TrivialityKind.NONTRIVIAL:
                raise ClaimViolation("attachment-sets-not-trivial", (i, j))
            if rel == TrivialityKind.COMPLETE:
                b.apply(BipartiteComplement(tuple(bits(v_sets[i])), tuple(bits(v_sets[j]))))
                g = b.graph
    for i in range(4):
        for um in (u1, u2):
            if not v_sets[i] or not um:
                continue
            rel = set_relation_kind(g, v_sets[i], um)
            if rel == TrivialityKind.NONTRIVIAL:
                raise ClaimViolation("attachment-set-not-trivial-to-far-side", i)
            if rel == TrivialityKind.COMPLETE:
                b.apply(BipartiteComplement(tuple(bits(v_sets[i])), tuple(bits(um))))
                g = b.graph
    if u1 and u2:
        b.apply(BipartiteComplement(tuple(bits(u1)), tuple(bits(u2))))
    b.apply(SubgraphComplement(tuple(bits(k_mask))))
    return _split_into_plain_leaves(b)


def _shifter(deleted: list[int], old_n: int):
    keep = [v for v in range(old_n) if v not in set(deleted)]
    remap = {v: i for i, v in enumerate(keep)}

    def shift(m: int) -> int:
        return mask_of(remap[v] for v in bits(m) if v in remap)

    return shift


# -- the basic-graph orchestration ----------------------------------------------


def _triangle_orchestration(b: CertBuilder) -> CertNode:
    g = b.graph
    tris = all_triangles(g)

    tri_masks = [mask_of(t) for t in tris]
    seen = 0
    for m in tri_masks:
        if seen & m:
            raise ClaimViolation("triangles-share-a-vertex")
        seen |= m

    attach = []
    for t in tris:
        tm = mask_of(t)
        sets = []
        for v in t:
            sets.append(
                mask_of(
                    x
                    for x in bits(g.adj[v])
                    if not tm >> x & 1 and (g.adj[x] & tm) == 1 << v
                )
            )
        u_t = mask_of(
            x for x in range(g.n) if not tm >> x & 1 and not g.adj[x] & tm
        )
        attach.append((sets, u_t))
        for x in range(g.n):
            if not tm >> x & 1 and (g.adj[x] & tm).bit_count() > 1:
                raise ClaimViolation("vertex-with-two-triangle-neighbours", (x, t))

    # small attachment sets collapse the graph by one neighbourhood deletion
    for t, (sets, _) in zip(tris, attach):
        for i, vm in enumerate(sets):
            if vm.bit_count() <= 2:
                return _small_attachment(b, t[i])

    for t, (sets, _) in zip(tris, attach):
        for vm in sets:
            if not g.is_independent_mask(vm):
                raise ClaimViolation("attachment-set-not-independent", t)

    for t, (sets, u_t) in zip(tris, attach):
        if not u_t:
            continue
        handled = _far_set_checks(b, t, sets, u_t)
        if handled is not None:
            return handled

    for t, (sets, u_t) in zip(tris, attach):
        hit = cross_triple_witness(g, tuple(sets))
        if hit is not None and hit[0] == "3P1":
            return _nine_complement_collapse(b, t, sets, u_t, hit[1])

    if len(tris) < 3:
        doomed = sorted(v for t in tris for v in t)
        b.apply(DeleteVertices(tuple(doomed)))
        verdict = is_free(b.graph, ["K3"])
        if not verdict.free:
            raise ClaimViolation("triangle-survived-deletion", verdict.embedding)
        return _chain_into(b, _t4_node(b.graph, "P1+2P2"))

    structure, reason = recognize_basic(g)
    if structure is None:
        raise ClaimViolation(f"not-basic: {reason}")
    return b.close_base(basic_expression(structure), 9)


def _chain_into(b: CertBuilder, node: CertNode) -> CertNode:
    node.steps = b.node.steps + node.steps
    node.hash_before = b.node.hash_before
    node.n = b.node.n
    return node


def _small_attachment(b: CertBuilder, v: int) -> CertNode:
    g = b.graph
    doomed = sorted(bits(g.adj[v]))
    b.apply(DeleteVertices(tuple(doomed)))
    if b.graph.n <= 8:
        from ..kexpr import exact_cliquewidth

        k, expr = exact_cliquewidth(b.graph)
        return b.close_base(expr, k)
    if is_connected(b.graph):
        raise ClaimViolation("neighbourhood-deletion-did-not-disconnect", v)
    return b.close_split([leaf_for_component(c) for c in b.components_graphs()])


def _far_set_checks(b: CertBuilder, t, sets, u_t) -> CertNode | None:
    g = b.graph
    if not g.is_independent_mask(u_t):
        u1 = u2 = 0
        probe = sets[0]
        x = (probe & -probe).bit_length() - 1
        y_mask = probe & ~(1 << x)
        y = (y_mask & -y_mask).bit_length() - 1
        for u in bits(u_t):
            hits = (g.adj[u] >> x & 1) + (g.adj[u] >> y & 1)
            if hits == 2:
                u1 |= 1 << u
            elif hits == 0:
                u2 |= 1 << u
            else:
                raise ClaimViolation("far-vertex-mixed-on-attachment-pair", u)
        if not u1 or not u2:
            raise ClaimViolation("far-set-adjacency-without-two-sides", t)
        a = (u1 & -u1).bit_length() - 1
        c = (u2 & -u2).bit_length() - 1
        doomed = sorted(list(t) + [a, c])
        b.apply(DeleteVertices(tuple(doomed)))
        verdict = is_free(b.graph, ["K3"])
        if not verdict.free:
            raise ClaimViolation("triangle-survived-far-deletion", verdict.embedding)
        return _chain_into(b, _t4_node(b.graph, "P1+2P2"))

    complete_to = []
    for i in range(3):
        if not sets[i]:
            continue
        rel = set_relation_kind(g, u_t, sets[i])
        if rel == TrivialityKind.NONTRIVIAL:
            raise ClaimViolation("far-set-not-trivial-to-attachment", (t, i))
        if rel == TrivialityKind.COMPLETE:
            complete_to.append(i)
    if len(complete_to) >= 2:
        u = (u_t & -u_t).bit_length() - 1
        doomed = sorted(list(t) + [u])
        b.apply(DeleteVertices(tuple(doomed)))
        verdict = is_free(b.graph, ["K3"])
        if not verdict.free:
            raise ClaimViolation("triangle-survived-far-deletion", verdict.embedding)
        return _chain_into(b, _t4_node(b.graph, "P1+2P2"))
    if len(complete_to) == 0:
        raise ClaimViolation("far-set-disconnected-from-its-triangle", t)
    return None


def _nine_complement_collapse(b: CertBuilder, t, sets, u_t, triple) -> CertNode:
    g = b.graph
    if u_t:
        raise ClaimViolation("cross-3p1-with-far-vertices", t)
    x, y, z = triple
    anchor_pairs = ((y, z), (x, z), (x, y))
    lows, highs = [], []
    for i in range(3):
        a, c = anchor_pairs[i]
        lo = hi = 0
        for q in bits(sets[i]):
            if q in (x, y, z):
                lo |= 1 << q
                continue
            hits = (g.adj[q] >> a & 1) + (g.adj[q] >> c & 1)
            if hits == 0:
                lo |= 1 << q
            elif hits == 2:
                hi |= 1 << q
            else:
                raise ClaimViolation("collapse-vertex-mixed-on-the-3p1", q)
        lows.append(lo)
        highs.append(hi)
    b.apply(DeleteVertices(tuple(sorted(t))))
    shift = _shifter(sorted(t), g.n)
    lows = [shift(m) for m in lows]
    highs = [shift(m) for m in highs]
    for i in range(3):
        for j in range(3):
            if i != j and lows[i] and highs[j]:
                b.apply(BipartiteComplement(tuple(bits(lows[i])), tuple(bits(highs[j]))))
    for i in range(3):
        for j in range(i + 1, 3):
            if highs[i] and highs[j]:
                b.apply(BipartiteComplement(tuple(bits(highs[i])), tuple(bits(highs[j]))))
    if b.graph.edge_count() != 0:
        raise ClaimViolation("collapse-left-edges")
    return b.close_base(expr_independent(range(b.graph.n)), 1)
