"""Clique-width expression IR.

Four node kinds build a labelled graph bottom-up: create a labelled vertex,
disjoint union, join two label classes, rename a label. The width of an
expression is the number of distinct labels mentioned anywhere in it. The
evaluated object keeps the external vertex ids from the Create leaves, so
validation against a host graph is exact, not up to isomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ..graphs import Graph, make_graph


class KExpression:
    __slots__ = ()

    def __str__(self) -> str:
        return format_expr(self)


@dataclass(frozen=True)
class Create(KExpression):
    label: int
    vid: int


@dataclass(frozen=True)
class Union(KExpression):
    left: KExpression
    right: KExpression


@dataclass(frozen=True)
class Join(KExpression):
    i: int
    j: int
    child: KExpression

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("join needs two distinct labels")


@dataclass(frozen=True)
class Relabel(KExpression):
    i: int
    j: int
    child: KExpression


class LabelledGraph:
    """Evaluation result: external ids, edge set, final labels."""

    def __init__(self, ids: tuple[int, ...], edges: frozenset, labels: dict[int, int], width: int):
        self.ids = ids
        self.edges = edges
        self.labels = labels
        self.width = width

    def label_classes(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for v in self.ids:
            out.setdefault(self.labels[v], []).append(v)
        return {l: tuple(vs) for l, vs in out.items()}

    def to_graph(self) -> Graph:
        if self.ids != tuple(range(len(self.ids))):
            raise ValueError("external ids are not dense 0..n-1")
        return make_graph(len(self.ids), list(self.edges))


def evaluate(e: KExpression) -> LabelledGraph:
    """Build the labelled graph; errors on duplicate external ids."""
    labels_seen: set[int] = set()

    def walk(node: KExpression) -> tuple[dict[int, set[int]], set]:
        if isinstance(node, Create):
            labels_seen.add(node.label)
            return {node.label: {node.vid}}, set()
        if isinstance(node, Union):
            cls_l, edg_l = walk(node.left)
            cls_r, edg_r = walk(node.right)
            left_ids = set().union(*cls_l.values())
            right_ids = set().union(*cls_r.values())
            if left_ids & right_ids:
                raise ValueError(f"duplicate external ids {sorted(left_ids & right_ids)}")
            for l, vs in cls_r.items():
                cls_l.setdefault(l, set()).update(vs)
            edg_l |= edg_r
            return cls_l, edg_l
        if isinstance(node, Join):
            labels_seen.update((node.i, node.j))
            cls, edg = walk(node.child)
            for u in cls.get(node.i, ()):
                for v in cls.get(node.j, ()):
                    edg.add((u, v) if u < v else (v, u))
            return cls, edg
        if isinstance(node, Relabel):
            labels_seen.update((node.i, node.j))
            cls, edg = walk(node.child)
            if node.i in cls:
                moved = cls.pop(node.i)
                cls.setdefault(node.j, set()).update(moved)
            return cls, edg
        raise TypeError(f"not an expression node: {node!r}")

    cls, edges = walk(e)
    labels = {v: l for l, vs in cls.items() for v in vs}
    ids = tuple(sorted(labels))
    return LabelledGraph(ids, frozenset(edges), labels, len(labels_seen))


def width(e: KExpression) -> int:
    return evaluate(e).width


def label_universe(e: KExpression) -> set[int]:
    out: set[int] = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Create):
            out.add(node.label)
        elif isinstance(node, Union):
            stack.extend((node.left, node.right))
        else:
            out.update((node.i, node.j))
            stack.append(node.child)
    return out


def external_ids(e: KExpression) -> list[int]:
    out = []
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Create):
            out.append(node.vid)
        elif isinstance(node, Union):
            stack.extend((node.left, node.right))
        else:
            stack.append(node.child)
    return sorted(out)


def validate_against(e: KExpression, g: Graph) -> bool:
    """Exact match of the evaluated graph with g on vertex ids and edges."""
    try:
        lg = evaluate(e)
    except ValueError:
        return False
    if lg.ids != tuple(range(g.n)):
        return False
    return lg.edges == frozenset(g.edges())


def substitute_labels(e: KExpression, mapping: dict[int, int]) -> KExpression:
    """Structural label rewrite; must be injective on the label universe."""
    uni = label_universe(e)
    img = [mapping.get(l, l) for l in uni]
    if len(set(img)) != len(img):
        raise ValueError("label substitution is not injective on this expression")

    def sub(l: int) -> int:
        return mapping.get(l, l)

    def walk(node: KExpression) -> KExpression:
        if isinstance(node, Create):
            return Create(sub(node.label), node.vid)
        if isinstance(node, Union):
            return Union(walk(node.left), walk(node.right))
        if isinstance(node, Join):
            return Join(sub(node.i), sub(node.j), walk(node.child))
        return Relabel(sub(node.i), sub(node.j), walk(node.child))

    return walk(e)


def remap_ids(e: KExpression, mapping: dict[int, int]) -> KExpression:
    """Rewrite external vertex ids through an injective map."""
    if len(set(mapping.values())) != len(mapping):
        raise ValueError("id remap is not injective")

    def walk(node: KExpression) -> KExpression:
        if isinstance(node, Create):
            return Create(node.label, mapping.get(node.vid, node.vid))
        if isinstance(node, Union):
            return Union(walk(node.left), walk(node.right))
        if isinstance(node, Join):
            return Join(node.i, node.j, walk(node.child))
        return Relabel(node.i, node.j, walk(node.child))

    return walk(e)


def union_all(parts: list[KExpression]) -> KExpression:
    if not parts:
        raise ValueError("cannot union zero expressions")
    acc = parts[0]
    for p in parts[1:]:
        acc = Union(acc, p)
    return acc


# -- text grammar ------------------------------------------------------------
#   (v <label> <id>)  (+ <e> <e>)  (eta <i> <j> <e>)  (rho <i> <j> <e>)


def format_expr(e: KExpression) -> str:
    if isinstance(e, Create):
        return f"(v {e.label} {e.vid})"
    if isinstance(e, Union):
        return f"(+ {format_expr(e.left)} {format_expr(e.right)})"
    if isinstance(e, Join):
        return f"(eta {e.i} {e.j} {format_expr(e.child)})"
    return f"(rho {e.i} {e.j} {format_expr(e.child)})"


def parse_expr(text: str) -> KExpression:
    toks = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def expect(tok: str):
        nonlocal pos
        if pos >= len(toks) or toks[pos] != tok:
            raise ValueError(f"expected {tok!r} at token {pos}")
        pos += 1

    def number() -> int:
        nonlocal pos
        if pos >= len(toks):
            raise ValueError("unexpected end of expression")
        try:
            val = int(toks[pos])
        except ValueError:
            raise ValueError(f"expected a number, got {toks[pos]!r}") from None
        pos += 1
        return val

    def node() -> KExpression:
        nonlocal pos
        expect("(")
        if pos >= len(toks):
            raise ValueError("unexpected end of expression")
        head = toks[pos]
        pos += 1
        if head == "v":
            label, vid = number(), number()
            out: KExpression = Create(label, vid)
        elif head == "+":
            left = node()
            right = node()
            out = Union(left, right)
        elif head == "eta":
            i, j = number(), number()
            out = Join(i, j, node())
        elif head == "rho":
            i, j = number(), number()
            out = Relabel(i, j, node())
        else:
            raise ValueError(f"unknown operator {head!r}")
        expect(")")
        return out

    result = node()
    if pos != len(toks):
        raise ValueError("trailing tokens after expression")
    return result


# -- stock constructions -----------------------------------------------------


def expr_independent(ids: Iterable[int], label: int = 1) -> KExpression:
    return union_all([Create(label, v) for v in sorted(ids)])


def expr_clique(ids: Iterable[int]) -> KExpression:
    """Width-2 expression for a clique: grow with label 2, fold into 1."""
    vs = sorted(ids)
    acc: KExpression = Create(1, vs[0])
    for v in vs[1:]:
        acc = Relabel(2, 1, Join(1, 2, Union(acc, Create(2, v))))
    return acc


def expr_star(centre: int, leaves: Iterable[int]) -> KExpression:
    ls = sorted(leaves)
    if not ls:
        return Create(1, centre)
    acc: KExpression = Create(1, centre)
    for v in ls:
        acc = Union(acc, Create(2, v))
    return Join(1, 2, acc)


def _expr_path(vs: list[int]) -> KExpression:
    # frontier keeps label 1, retired vertices move to 3; the last vertex
    # never retires, so P2 costs two labels and longer paths three
    acc: KExpression = Create(1, vs[0])
    for idx, v in enumerate(vs[1:], start=1):
        acc = Join(1, 2, Union(acc, Create(2, v)))
        if idx < len(vs) - 1:
            acc = Relabel(2, 1, Relabel(1, 3, acc))
        else:
            acc = Relabel(2, 1, acc)
    return acc


def _expr_cycle(vs: list[int]) -> KExpression:
    # vs in cycle order; vs[0] parks on label 4 until the closing join
    acc: KExpression = Join(4, 1, Union(Create(4, vs[0]), Create(1, vs[1])))
    for v in vs[2:]:
        acc = Relabel(2, 1, Relabel(1, 3, Join(1, 2, Union(acc, Create(2, v)))))
    return Join(1, 4, acc)


def expr_for_max_degree_2(g: Graph) -> KExpression:
    """Expression of width <= 4 for any graph with maximum degree <= 2.

    Components are paths (width <= 3) or cycles (width <= 4); the cycle
    traversal starts at the smallest vertex toward its smaller neighbour's
    opposite, so output is deterministic.
    """
    if g.max_degree() > 2:
        raise ValueError("graph has a vertex of degree 3 or more")
    from ..graphs import bits, components

    parts: list[KExpression] = []
    for comp in components(g):
        sub = comp
        if len(sub) == 1:
            parts.append(Create(1, sub[0]))
            continue
        degs = {v: (g.adj[v] & _mask(sub)).bit_count() for v in sub}
        ends = [v for v in sub if degs[v] == 1]
        if ends:  # path component: walk from the smallest endpoint
            start = min(ends)
        else:  # cycle component
            start = min(sub)
        order = [start]
        seen = {start}
        cur = start
        while len(order) < len(sub):
            nxts = [w for w in bits(g.adj[cur]) if w in degs and w not in seen]
            if not nxts:
                break
            cur = min(nxts)
            order.append(cur)
            seen.add(cur)
        if ends:
            parts.append(_expr_path(order) if len(order) > 1 else Create(1, order[0]))
        else:
            parts.append(_expr_cycle(order))
    return union_all(parts)


def _mask(vs: Iterable[int]) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


# -- boundedness-preserving extensions ---------------------------------------


def add_false_twin(e: KExpression, of_vertex: int, new_id: int) -> KExpression:
    """Duplicate a vertex under its creation label: same width, false twin."""
    if new_id in external_ids(e):
        raise ValueError(f"id {new_id} already present")
    found = False

    def walk(node: KExpression) -> KExpression:
        nonlocal found
        if isinstance(node, Create):
            if node.vid == of_vertex:
                found = True
                return Union(node, Create(node.label, new_id))
            return node
        if isinstance(node, Union):
            return Union(walk(node.left), walk(node.right))
        if isinstance(node, Join):
            return Join(node.i, node.j, walk(node.child))
        return Relabel(node.i, node.j, walk(node.child))

    out = walk(e)
    if not found:
        raise ValueError(f"vertex {of_vertex} not created in this expression")
    return out


def add_vertex(e: KExpression, new_id: int, neighbourhood: Iterable[int]) -> KExpression:
    """Attach a new vertex with an exact neighbourhood.

    Every label i splits into an in-neighbourhood copy (keeps i) and an
    out-of-neighbourhood copy; joins and relabels are replayed on both
    copies, then the new vertex arrives under a fresh label joined to all
    in-copies. Width grows from k to at most 2k+1; an empty neighbourhood
    skips the split entirely (width k+1).
    """
    nb = set(neighbourhood)
    have = set(external_ids(e))
    if new_id in have:
        raise ValueError(f"id {new_id} already present")
    if not nb <= have:
        raise ValueError(f"neighbourhood not a subset of existing vertices: {sorted(nb - have)}")
    uni = sorted(label_universe(e))
    fresh = max(uni, default=0) + 1
    if not nb:
        return Union(e, Create(fresh, new_id))
    out_of = {l: fresh + 1 + idx for idx, l in enumerate(uni)}

    def walk(node: KExpression) -> KExpression:
        if isinstance(node, Create):
            return node if node.vid in nb else Create(out_of[node.label], node.vid)
        if isinstance(node, Union):
            return Union(walk(node.left), walk(node.right))
        if isinstance(node, Join):
            c = walk(node.child)
            i, j = node.i, node.j
            for a, b in ((i, j), (i, out_of[j]), (out_of[i], j), (out_of[i], out_of[j])):
                c = Join(a, b, c)
            return c
        c = walk(node.child)
        return Relabel(out_of[node.i], out_of[node.j], Relabel(node.i, node.j, c))

    split = walk(e)
    joined: KExpression = Union(split, Create(fresh, new_id))
    for l in uni:
        joined = Join(fresh, l, joined)
    return joined
