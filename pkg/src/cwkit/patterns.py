"""Forbidden-pattern catalogue and induced-subgraph detection.

Pattern vertex ids are chosen so that high-degree / edge-bearing vertices
come first: the embedding search walks pattern vertices in id order with
ascending host candidates, which both prunes well and makes the first hit
the lexicographically least embedding.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from .graphs import Graph, bits, complement, components, induced_subgraph, make_graph

DEFAULT_PATTERN_CAP = 8


def path(t: int) -> Graph:
    return make_graph(t, [(i, i + 1) for i in range(t - 1)])


def cycle(t: int) -> Graph:
    if t < 3:
        raise ValueError("cycles need at least 3 vertices")
    return make_graph(t, [(i, (i + 1) % t) for i in range(t)])


def complete(t: int) -> Graph:
    return make_graph(t, [(i, j) for i in range(t) for j in range(i + 1, t)])


def empty(s: int) -> Graph:
    return make_graph(s, [])


def star(leaves: int) -> Graph:
    return make_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def biclique(r: int, s: int) -> Graph:
    return make_graph(r + s, [(i, r + j) for i in range(r) for j in range(s)])


def subdivided_claw(h: int, i: int, j: int) -> Graph:
    """Tree with one degree-3 vertex 0 and leaves at distances h, i, j."""
    if not 1 <= h <= i <= j:
        raise ValueError("branch lengths must satisfy 1 <= h <= i <= j")
    edges = []
    nxt = 1
    for length in (h, i, j):
        prev = 0
        for _ in range(length):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return make_graph(nxt, edges)


def disjoint_sum(parts: list[Graph]) -> Graph:
    """Disjoint union, densest parts first so searches fail fast."""
    ordered = sorted(parts, key=lambda g: (-g.edge_count(), -g.n))
    n = sum(g.n for g in ordered)
    edges = []
    off = 0
    for g in ordered:
        edges.extend((u + off, v + off) for u, v in g.edges())
        off += g.n
    return make_graph(n, edges)


_NAMED = {
    "diamond": lambda: complement(disjoint_sum([empty(2), path(2)])),
    "paw": lambda: complement(disjoint_sum([empty(1), path(3)])),
    "claw": lambda: star(3),
    "K13": lambda: star(3),
    "wheel": lambda: complement(disjoint_sum([empty(1), path(2), path(2)])),
    "petersen": lambda: make_graph(
        10,
        [(i, (i + 1) % 5) for i in range(5)]
        + [(i, i + 5) for i in range(5)]
        + [(5 + i, 5 + (i + 2) % 5) for i in range(5)],
    ),
}

_TERM = re.compile(r"^(\d*)([A-Za-z]+)(\d*)$")


@lru_cache(maxsize=None)
def pattern(name: str) -> Graph:
    """Resolve a pattern name like `P1+2P2`, `S123`, `K13`, `K:5`, `sP1:4`."""
    text = name.replace(" ", "").replace("_", "").replace("{", "").replace("}", "").replace(",", "")
    if ":" in text:
        head, arg = text.split(":", 1)
        k = int(arg)
        if head in ("sP1", "sp1"):
            return empty(k)
        if head == "K":
            return complete(k)
        if head == "P":
            return path(k)
        if head == "C":
            return cycle(k)
        raise ValueError(f"unknown pattern constructor {head!r}")
    parts = []
    for term in text.split("+"):
        if term.lower() in _NAMED:
            parts.append(_NAMED[term.lower()]())
            continue
        m = _TERM.match(term)
        if not m:
            raise ValueError(f"cannot parse pattern term {term!r}")
        count = int(m.group(1)) if m.group(1) else 1
        base, num = m.group(2), m.group(3)
        if base in _NAMED and not num:
            g = _NAMED[base]()
        elif base == "P" and num:
            g = path(int(num))
        elif base == "C" and num:
            g = cycle(int(num))
        elif base == "K" and num == "13":
            g = star(3)
        elif base == "K" and num:
            g = complete(int(num))
        elif base == "S" and len(num) == 3:
            g = subdivided_claw(int(num[0]), int(num[1]), int(num[2]))
        else:
            raise ValueError(f"cannot parse pattern term {term!r}")
        parts.extend([g] * count)
    if not parts:
        raise ValueError(f"empty pattern {name!r}")
    return parts[0] if len(parts) == 1 else disjoint_sum(parts)


def find_induced_embedding(
    g: Graph,
    h: Graph,
    cap: int = DEFAULT_PATTERN_CAP,
    anchors: dict[int, int] | None = None,
) -> tuple[int, ...] | None:
    """Injective map of H into G preserving edges and non-edges.

    Returns the image tuple indexed by H vertex, lexicographically least, or
    None. `anchors` pins chosen pattern vertices to host vertices (used when
    checking whether a freshly inserted edge completed a pattern).
    """
    if h.n > cap:
        raise ValueError(f"pattern on {h.n} vertices exceeds cap {cap}")
    if h.n > g.n:
        return None
    full = g.full_mask()
    order = list(range(h.n))
    image = [-1] * h.n
    used = 0
    if anchors:
        for hv, gv in anchors.items():
            image[hv] = gv
            used |= 1 << gv
        order = [v for v in order if v not in anchors]
        for hv, gv in anchors.items():
            for hw, gw in anchors.items():
                if hv < hw and h.has_edge(hv, hw) != g.has_edge(gv, gw):
                    return None

    def candidates(hv: int, used_mask: int) -> int:
        cand = full & ~used_mask
        for hw in range(h.n):
            gw = image[hw]
            if gw < 0:
                continue
            if h.has_edge(hv, hw):
                cand &= g.adj[gw]
            else:
                cand &= ~g.adj[gw]
        return cand

    def search(pos: int, used_mask: int) -> bool:
        if pos == len(order):
            return True
        hv = order[pos]
        for gv in bits(candidates(hv, used_mask)):
            image[hv] = gv
            if search(pos + 1, used_mask | 1 << gv):
                return True
            image[hv] = -1
        return False

    if search(0, used):
        return tuple(image)
    return None


@dataclass(frozen=True)
class FreeVerdict:
    free: bool
    violated: str | None = None
    embedding: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.free


def _resolve(p) -> tuple[str, Graph]:
    if isinstance(p, str):
        return p, pattern(p)
    if isinstance(p, Graph):
        return f"<{p.n}v,{p.edge_count()}e>", p
    return p  # (name, Graph) pair


def is_free(g: Graph, patterns, cap: int = DEFAULT_PATTERN_CAP) -> FreeVerdict:
    """Check G against a pattern list; the witness names the violated one."""
    for p in patterns:
        name, hg = _resolve(p)
        emb = find_induced_embedding(g, hg, cap=cap)
        if emb is not None:
            return FreeVerdict(False, name, emb)
    return FreeVerdict(True)


def is_linear_forest(h: Graph) -> bool:
    """True iff every component is a path."""
    if h.max_degree() > 2:
        return False
    return h.edge_count() == h.n - len(components(h))


def is_in_class_s(h: Graph) -> bool:
    """True iff every component is a path or a subdivided claw."""
    for comp in components(h):
        sub, _ = induced_subgraph(h, comp)
        if sub.edge_count() != sub.n - 1:
            return False  # component has a cycle
        degs = sorted((sub.degree(v) for v in sub.vertices()), reverse=True)
        if degs[0] > 3 or (degs[0] == 3 and len(degs) > 1 and degs[1] == 3):
            return False
    return True


def is_induced_subgraph_pair(h1: Graph, h2: Graph, cap: int = DEFAULT_PATTERN_CAP) -> bool:
    """H1 is an induced subgraph of H2."""
    if h1.n > cap or h2.n > cap:
        raise ValueError(f"graphs exceed cap {cap}")
    return find_induced_embedding(h2, h1, cap=cap) is not None
