"""Desk-scale exact clique-width via state-space search.

A state is (vertex set, partition into label classes) with the invariant
that every internal edge of the induced subgraph is already built. Safe
joins can always be performed greedily (their safety depends only on the
labelling, never on which edges exist yet), so edges never need tracking:

  * seed states are single vertices;
  * a relabel merges two classes;
  * a union combines two disjoint states, optionally fusing class pairs
    across the children (label names collide under the k-name budget);
    fused pairs must have no cross edges, and any resulting class pair
    with a cross-child edge must be fully adjacent so one join builds it.

Iterative deepening over k with a transposition table gives the least k;
parent records rebuild an explicit witness expression. Hard n <= 8 cap.
"""

from __future__ import annotations

from collections import deque

from ..graphs import Graph, bits
from .expr import Create, Join, KExpression, Relabel, Union, label_universe, substitute_labels

HARD_CAP = 8


def _matchings(p1: tuple, p2: tuple, compatible, need: int):
    """Partial injective matchings of p1-parts to p2-parts of size >= need."""

    def rec(idx: int, used: int, acc: tuple):
        remaining = len(p1) - idx
        if len(acc) + remaining < need:
            return
        if idx == len(p1):
            yield acc
            return
        yield from rec(idx + 1, used, acc)
        for jdx in range(len(p2)):
            if used >> jdx & 1 or not compatible(idx, jdx):
                continue
            yield from rec(idx + 1, used | 1 << jdx, acc + ((idx, jdx),))

    yield from rec(0, 0, ())


def _search(g: Graph, k: int):
    """Reachability for a fixed k; returns the parent map and goal state."""
    adj = g.adj
    full = g.full_mask()

    def canon(parts):
        return tuple(sorted(parts))

    parents: dict[tuple, tuple] = {}
    by_mask: dict[int, list[tuple]] = {}
    queue: deque[tuple] = deque()

    def push(state, record) -> bool:
        if state in parents:
            return False
        parents[state] = record
        by_mask.setdefault(state[0], []).append(state)
        queue.append(state)
        return state[0] == full

    for v in range(g.n):
        if push((1 << v, (1 << v,)), ("create", v)):
            return parents, (1 << v, (1 << v,))

    def all_adjacent(c: int, d: int) -> bool:
        for v in bits(c):
            if adj[v] & d != d:
                return False
        return True

    def cross_edge(c: int, d: int, m1: int, m2: int) -> bool:
        for v in bits(c & m1):
            if adj[v] & d & m2:
                return True
        for v in bits(c & m2):
            if adj[v] & d & m1:
                return True
        return False

    while queue:
        state = queue.popleft()
        mask, parts = state
        if len(parts) > 1:
            for a in range(len(parts)):
                for b in range(a + 1, len(parts)):
                    merged = parts[:a] + parts[a + 1 : b] + parts[b + 1 :] + (parts[a] | parts[b],)
                    new = (mask, canon(merged))
                    if push(new, ("merge", state, parts[a], parts[b])):
                        return parents, new
        for other_mask, others in list(by_mask.items()):
            if mask & other_mask:
                continue
            for other in list(others):
                if other not in parents:  # pragma: no cover - defensive
                    continue
                p1, p2 = parts, other[1]

                def edge_free(i: int, j: int) -> bool:
                    a, b = p1[i], p2[j]
                    return all(not (adj[v] & b) for v in bits(a))

                need = len(p1) + len(p2) - k
                for mu in _matchings(p1, p2, edge_free, max(0, need)):
                    matched1 = {i for i, _ in mu}
                    matched2 = {j for _, j in mu}
                    groups = [p1[i] | p2[j] for i, j in mu]
                    groups += [p1[i] for i in range(len(p1)) if i not in matched1]
                    groups += [p2[j] for j in range(len(p2)) if j not in matched2]
                    if len(groups) > k:
                        continue
                    ok = True
                    joins = []
                    for x in range(len(groups)):
                        for y in range(x + 1, len(groups)):
                            c, d = groups[x], groups[y]
                            if cross_edge(c, d, mask, other_mask):
                                if all_adjacent(c, d):
                                    joins.append((c, d))
                                else:
                                    ok = False
                                    break
                        if not ok:
                            break
                    if not ok:
                        continue
                    new = (mask | other_mask, canon(tuple(groups)))
                    mu_parts = tuple((p1[i], p2[j]) for i, j in mu)
                    if push(new, ("union", state, other, mu_parts, tuple(joins))):
                        return parents, new
    return parents, None


def _rebuild(parents: dict, state: tuple, k: int) -> tuple[KExpression, dict[int, int]]:
    """Expression plus part-mask -> label-name map for a reached state."""
    record = parents[state]
    kind = record[0]
    if kind == "create":
        v = record[1]
        return Create(1, v), {1 << v: 1}
    if kind == "merge":
        prev, a, b = record[1], record[2], record[3]
        e, names = _rebuild(parents, prev, k)
        la, lb = names.pop(a), names.pop(b)
        names[a | b] = lb
        return Relabel(la, lb, e), names
    _, s1, s2, mu, joins = record
    e1, n1 = _rebuild(parents, s1, k)
    e2, n2 = _rebuild(parents, s2, k)
    sigma: dict[int, int] = {}
    taken = set(n1.values())
    for a, b in mu:
        sigma[n2[b]] = n1[a]
    pool = iter(l for l in range(1, k + 1) if l not in taken)
    final_names: dict[int, int] = dict(n1)
    for a, b in mu:
        del final_names[a]
        final_names[a | b] = n1[a]
    for part, lbl in n2.items():
        if lbl not in sigma:
            fresh = next(pool)
            sigma[lbl] = fresh
            final_names[part] = fresh
    spare = iter(l for l in range(1, k + 1) if l not in set(sigma.values()))
    for lbl in sorted(label_universe(e2)):
        if lbl not in sigma:
            sigma[lbl] = next(spare)
    e = Union(e1, substitute_labels(e2, sigma))
    lookup = dict(final_names)
    for c, d in joins:
        e = Join(lookup[c], lookup[d], e)
    return e, final_names


def exact_cliquewidth(g: Graph, max_k: int | None = None) -> tuple[int, KExpression] | None:
    """Least k with a k-expression for g, plus a witness; None past max_k."""
    if g.n > HARD_CAP:
        raise ValueError(f"oracle is capped at {HARD_CAP} vertices, got {g.n}")
    if g.n == 0:
        return 0, None
    top = max_k if max_k is not None else g.n
    for k in range(1, top + 1):
        parents, goal = _search(g, k)
        if goal is not None:
            expr, _ = _rebuild(parents, goal, k)
            return k, expr
    return None
