"""Reduction for (K3, C5, S123)-free graphs.

Bipartite inputs cite the bounded S123-free bipartite class. Otherwise the
graph has a shortest odd induced cycle of length >= 7; every other vertex
must be a false twin of a cycle vertex, so one twin-removal step leaves the
bare cycle, closed by a width-4 expression for maximum degree 2.
"""

from __future__ import annotations

from collections import deque

from ..decomp import PreconditionViolation
from ..graphs import Graph, bipartition, bits, components, false_twin_classes, induced_subgraph, is_connected, mask_of
from ..kexpr import expr_for_max_degree_2
from ..patterns import is_free
from .certificate import (
    CITE_S123_BIPARTITE,
    CertBuilder,
    CertNode,
    ClaimViolation,
    RemoveFalseTwins,
)


def shortest_odd_cycle_length(g: Graph) -> int | None:
    """Length of a shortest odd cycle via parity BFS from every vertex."""
    best = None
    for root in range(g.n):
        dist = [-1] * g.n
        dist[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in bits(g.adj[u]):
                if dist[w] == -1:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        for u in range(g.n):
            if dist[u] == -1:
                continue
            for w in bits(g.adj[u]):
                if w < u or dist[w] == -1:
                    continue
                if dist[u] == dist[w]:
                    length = dist[u] + dist[w] + 1
                    if best is None or length < best:
                        best = length
    return best


def find_induced_cycle(g: Graph, length: int) -> tuple[int, ...] | None:
    """Deterministic induced cycle of the exact length, in cycle order.

    Anchored at the smallest cycle vertex, candidates explored ascending,
    reflection normalised so the second vertex is the smaller neighbour.
    """

    def search(anchor: int) -> tuple[int, ...] | None:
        path = [anchor]

        def extend(used: int) -> bool:
            touches_anchor = len(path) in (1, length - 1)  # consecutive or closing
            for v in bits(g.adj[path[-1]] & ~used):
                if v <= anchor:
                    continue
                if g.has_edge(v, anchor) != touches_anchor:
                    continue
                if any(g.has_edge(v, path[i]) for i in range(1, len(path) - 1)):
                    continue
                path.append(v)
                if len(path) == length or extend(used | 1 << v):
                    return True
                path.pop()
            return False

        return tuple(path) if extend(1 << anchor) else None

    for anchor in range(g.n):
        hit = search(anchor)
        if hit:
            return hit if hit[1] < hit[-1] else (hit[0],) + tuple(reversed(hit[1:]))
    return None


def reduce_k3_c5_s123_free(g: Graph) -> CertNode:
    verdict = is_free(g, ["K3", "C5", "S123"])
    if not verdict.free:
        raise PreconditionViolation(
            f"graph contains an induced {verdict.violated}",
            (verdict.violated, verdict.embedding),
        )
    if g.n == 0:
        raise PreconditionViolation("empty graph")
    return _node(g)


def _node(g: Graph) -> CertNode:
    b = CertBuilder(g)
    if bipartition(g) is not None:
        return b.close_cite(CITE_S123_BIPARTITE, 5)
    if not is_connected(g):
        return b.close_split([_node(c) for c in b.components_graphs()])

    length = shortest_odd_cycle_length(g)
    if length is None or length in (3, 5):
        raise ClaimViolation("odd-cycle-length", length)
    cycle = find_induced_cycle(g, length)
    if cycle is None:
        raise ClaimViolation("shortest-odd-cycle-not-induced", length)
    cyc_mask = mask_of(cycle)
    pos = {v: i for i, v in enumerate(cycle)}

    for x in range(g.n):
        if cyc_mask >> x & 1:
            continue
        hits = g.adj[x] & cyc_mask
        if hits == 0:
            raise ClaimViolation("outside-vertex-with-no-cycle-neighbour", x)
        spots = sorted(pos[v] for v in bits(hits))
        if len(spots) != 2:
            raise ClaimViolation("outside-vertex-degree-on-cycle", (x, spots))
        gap = (spots[1] - spots[0]) % length
        if gap not in (2, length - 2):
            raise ClaimViolation("outside-vertex-not-at-distance-two", (x, spots))
        centre = cycle[(spots[0] + 1) % length] if gap == 2 else cycle[(spots[1] + 1) % length]
        if g.adj[x] != g.adj[centre]:
            raise ClaimViolation("outside-vertex-not-a-false-twin", (x, centre))

    classes = false_twin_classes(g)
    if any(len(c) > 1 for c in classes):
        b.apply(RemoveFalseTwins(tuple(tuple(c) for c in classes)))
    if b.graph.max_degree() > 2:
        raise ClaimViolation("reduced-graph-not-a-cycle")
    return b.close_base(expr_for_max_degree_2(b.graph), 4)


def leaf_for_component(g: Graph) -> CertNode:
    """Close one split component: explicit when small or clique, cited else.

    Components arising from the diamond-family pipelines must be
    (diamond,2P2)-free; failing every option contradicts the theory.
    """
    from ..kexpr import exact_cliquewidth, expr_clique
    from .certificate import CITE_DIAMOND_P2P3

    b = CertBuilder(g)
    if g.is_clique_mask(g.full_mask()):
        return b.close_base(expr_clique(range(g.n)), 2 if g.n > 1 else 1)
    if g.n <= 8:
        k, expr = exact_cliquewidth(g)
        return b.close_base(expr, k)
    if is_free(g, ["diamond", "P2+P3"]).free:
        return b.close_cite(CITE_DIAMOND_P2P3)
    raise ClaimViolation("component-outside-the-cited-class")
