"""Colouring: dynamic programming on expressions plus an exact oracle.

The DP state for a subexpression is the set of achievable signatures. A
signature records, per colour class of a proper colouring of the evaluated
subgraph, which labels the class touches (a bitmask over the expression's
label universe), as a sorted multiset. Join(i,j) kills every signature with
a class touching both i and j; relabel folds bit i into bit j; union merges
the two signature sets over all ways of identifying colour classes.
"""

from __future__ import annotations

from functools import lru_cache

from ..graphs import Graph, bits
from .expr import Create, Join, KExpression, Relabel, Union, evaluate

DEFAULT_WIDTH_CAP = 10
DEFAULT_ORACLE_CAP = 16


def _merge_signatures(sig1: tuple, sig2: tuple, k: int) -> set[tuple]:
    """All ways to pair up colour classes of two disjoint sides.

    Each side-2 class either takes a fresh colour or fuses with exactly one
    not-yet-fused side-1 class: a union colour class restricts to at most one
    class per side, so double fusion would fabricate unreachable signatures.
    """
    out: set[tuple] = set()

    def rec(idx: int, slots: tuple):
        if len(slots) - (len(sig2) - idx) > k:
            return  # already too many colours even if the rest all fuse
        if idx == len(sig2):
            if len(slots) <= k:
                out.add(tuple(sorted(s for s, _ in slots)))
            return
        cls = sig2[idx]
        rec(idx + 1, slots + ((cls, False),))
        tried = set()
        for pos, (mask, is_open) in enumerate(slots):
            if not is_open or mask in tried:
                continue
            tried.add(mask)
            fused = slots[:pos] + ((mask | cls, False),) + slots[pos + 1 :]
            rec(idx + 1, fused)

    rec(0, tuple((m, True) for m in sig1))
    return out


def colour_via_expression(e: KExpression, k: int, width_cap: int = DEFAULT_WIDTH_CAP) -> bool:
    """Exact k-colourability of the graph evaluated from e."""
    if k < 0:
        raise ValueError("colour count must be non-negative")
    lg = evaluate(e)
    if lg.width > width_cap:
        raise ValueError(f"expression width {lg.width} exceeds cap {width_cap}")
    if not lg.ids:
        return True
    if k == 0:
        return False
    label_index: dict[int, int] = {}

    def bit(l: int) -> int:
        if l not in label_index:
            label_index[l] = len(label_index)
        return 1 << label_index[l]

    def walk(node: KExpression) -> set[tuple]:
        if isinstance(node, Create):
            return {(bit(node.label),)}
        if isinstance(node, Union):
            lhs, rhs = walk(node.left), walk(node.right)
            out: set[tuple] = set()
            for s1 in lhs:
                for s2 in rhs:
                    out |= _merge_signatures(s1, s2, k)
            return out
        if isinstance(node, Join):
            bad = bit(node.i) | bit(node.j)
            return {s for s in walk(node.child) if all(cls & bad != bad for cls in s)}
        if isinstance(node, Relabel):
            bi, bj = bit(node.i), bit(node.j)
            out = set()
            for s in walk(node.child):
                out.add(tuple(sorted((cls & ~bi) | bj if cls & bi else cls for cls in s)))
            return out
        raise TypeError(f"not an expression node: {node!r}")

    return bool(walk(e))


def chromatic_via_expression(e: KExpression, width_cap: int = DEFAULT_WIDTH_CAP) -> int:
    lg = evaluate(e)
    n = len(lg.ids)
    if n == 0:
        return 0
    for k in range(1, n + 1):
        if colour_via_expression(e, k, width_cap=width_cap):
            return k
    raise AssertionError("a graph is always colourable with n colours")


def chromatic_oracle(g: Graph, cap: int = DEFAULT_ORACLE_CAP) -> int:
    """Exact chromatic number without any expression.

    Subset DP: chi(S) = 1 + min over maximal independent sets I of G[S]
    containing the smallest vertex of S. Exponential but exact; the default
    cap keeps it a verification oracle.
    """
    if g.n > cap:
        raise ValueError(f"graph on {g.n} vertices exceeds oracle cap {cap}")
    if g.n == 0:
        return 0
    adj = g.adj
    full = g.full_mask()

    @lru_cache(maxsize=None)
    def chi(mask: int) -> int:
        if mask == 0:
            return 0
        low = mask & -mask
        v = low.bit_length() - 1
        best = mask.bit_count()  # colour everything separately

        def grow(ind: int, cand: int):
            nonlocal best
            if best == 1:
                return
            if cand == 0:
                rest = chi(mask & ~ind)
                if rest + 1 < best:
                    best = rest + 1
                return
            w_low = cand & -cand
            w = w_low.bit_length() - 1
            grow(ind | w_low, cand & ~w_low & ~adj[w])
            # skipping w is only sound if some later pick excludes it,
            # otherwise the set would not be maximal
            if adj[w] & cand:
                grow(ind, cand & ~w_low)

        grow(low, mask & ~low & ~adj[v] & full)
        return best

    return chi(full)
