"""Replayable reduction certificates.

A certificate explains why a graph has bounded clique-width as a tree of
boundedness-preserving steps (vertex deletion, subgraph or bipartite
complementation, component splitting, false-twin removal) ending in leaves
that are either explicit expressions or citations of a known bounded class.
Every step stores the graph hash before and after, so a verifier can replay
the whole tree from the root graph. Vertex ids reindex densely (ascending)
after any step that drops vertices; complementations keep ids.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from ..graphs import (
    Graph,
    bipartite_complement,
    bipartition,
    components,
    induced_subgraph,
    subgraph_complement,
)
from ..kexpr import KExpression, evaluate, format_expr, parse_expr, validate_against
from ..patterns import is_free


class ClaimViolation(RuntimeError):
    """A checked structural claim failed on a precondition-passing input.

    This contradicts the theory backing the pipeline, so it aborts the run
    (CLI exit code 3) with the claim id and a concrete witness.
    """

    def __init__(self, claim: str, witness=None):
        super().__init__(f"claim {claim} violated" + (f": {witness}" if witness else ""))
        self.claim = claim
        self.witness = witness


def graph_hash(g: Graph) -> str:
    payload = f"{g.n}|" + ",".join(f"{u}-{v}" for u, v in g.edges())
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


# -- steps -------------------------------------------------------------------


@dataclass(frozen=True)
class DeleteVertices:
    vertices: tuple[int, ...]


@dataclass(frozen=True)
class SubgraphComplement:
    inside: tuple[int, ...]


@dataclass(frozen=True)
class BipartiteComplement:
    side_a: tuple[int, ...]
    side_b: tuple[int, ...]


@dataclass(frozen=True)
class RemoveFalseTwins:
    classes: tuple[tuple[int, ...], ...]


Step = DeleteVertices | SubgraphComplement | BipartiteComplement | RemoveFalseTwins


def apply_step(g: Graph, step: Step) -> Graph:
    if isinstance(step, DeleteVertices):
        keep = [v for v in range(g.n) if v not in set(step.vertices)]
        return induced_subgraph(g, keep)[0]
    if isinstance(step, SubgraphComplement):
        return subgraph_complement(g, step.inside)
    if isinstance(step, BipartiteComplement):
        return bipartite_complement(g, step.side_a, step.side_b)
    if isinstance(step, RemoveFalseTwins):
        listed = sorted(v for cls in step.classes for v in cls)
        if listed != list(range(g.n)):
            raise ValueError("twin classes must partition the vertex set")
        for cls in step.classes:
            base = g.adj[cls[0]]
            if any(g.adj[v] != base for v in cls[1:]):
                raise ValueError(f"class {cls} is not a false-twin class")
        keep = sorted(min(cls) for cls in step.classes)
        return induced_subgraph(g, keep)[0]
    raise TypeError(f"unknown step {step!r}")


# -- leaves ------------------------------------------------------------------

CITE_DIAMOND_P2P3 = "diamond-p2p3-free"
CITE_S123_BIPARTITE = "s123-free-bipartite"
CITE_K3_H_FREE = "k3-h-free"

CITE_SOURCES = (CITE_DIAMOND_P2P3, CITE_S123_BIPARTITE, CITE_K3_H_FREE)


@dataclass(frozen=True)
class Base:
    expr: KExpression
    width_bound: int


@dataclass(frozen=True)
class Cite:
    source: str
    bound: int | None = None
    detail: str | None = None  # pattern name for the parameterised source


@dataclass
class Split:
    children: list["CertNode"]


@dataclass
class CertNode:
    hash_before: str
    n: int
    steps: list[tuple[Step, str]] = field(default_factory=list)
    terminal: Base | Cite | Split | None = None


@dataclass
class Certificate:
    root: CertNode
    delete_budget: int = 0


def cite_class_holds(g: Graph, cite: Cite) -> bool:
    if cite.source == CITE_DIAMOND_P2P3:
        return is_free(g, ["diamond", "P2+P3"]).free
    if cite.source == CITE_S123_BIPARTITE:
        return bipartition(g) is not None and is_free(g, ["S123"]).free
    if cite.source == CITE_K3_H_FREE:
        if cite.detail not in ("P1+2P2", "P1+P2+P3", "P1+P5", "S122"):
            return False
        return is_free(g, ["K3", cite.detail]).free
    return False


# -- construction helpers ----------------------------------------------------


class CertBuilder:
    """Accumulates steps against a live graph and closes with a terminal."""

    def __init__(self, g: Graph):
        self.graph = g
        self.node = CertNode(graph_hash(g), g.n)
        self.deletions = 0

    def apply(self, step: Step) -> Graph:
        self.graph = apply_step(self.graph, step)
        if isinstance(step, DeleteVertices):
            self.deletions += len(step.vertices)
        self.node.steps.append((step, graph_hash(self.graph)))
        return self.graph

    def close_base(self, expr: KExpression, width_bound: int) -> CertNode:
        self.node.terminal = Base(expr, width_bound)
        return self.node

    def close_cite(self, source: str, bound: int | None = None, detail: str | None = None) -> CertNode:
        self.node.terminal = Cite(source, bound, detail)
        return self.node

    def close_split(self, children: list[CertNode]) -> CertNode:
        self.node.terminal = Split(children)
        return self.node

    def components_graphs(self) -> list[Graph]:
        return [induced_subgraph(self.graph, comp)[0] for comp in components(self.graph)]


def count_deletions(node: CertNode) -> int:
    total = sum(len(s.vertices) for s, _ in node.steps if isinstance(s, DeleteVertices))
    if isinstance(node.terminal, Split):
        total += sum(count_deletions(c) for c in node.terminal.children)
    return total


def make_certificate(root: CertNode) -> Certificate:
    return Certificate(root, count_deletions(root))


# -- verification ------------------------------------------------------------


def _verify_node(g: Graph, node: CertNode) -> tuple[bool, str]:
    if graph_hash(g) != node.hash_before or g.n != node.n:
        return False, f"hash mismatch at node (expected {node.hash_before}, got {graph_hash(g)})"
    for step, expect in node.steps:
        try:
            g = apply_step(g, step)
        except (ValueError, TypeError) as exc:
            return False, f"step failed to apply: {exc}"
        if graph_hash(g) != expect:
            return False, f"hash mismatch after {type(step).__name__}"
    term = node.terminal
    if term is None:
        return False, "open node without a terminal"
    if isinstance(term, Base):
        if not validate_against(term.expr, g):
            return False, "base expression does not rebuild its graph"
        if evaluate(term.expr).width > term.width_bound:
            return False, f"base width exceeds declared bound {term.width_bound}"
        return True, ""
    if isinstance(term, Cite):
        if term.source not in CITE_SOURCES:
            return False, f"unknown citation source {term.source!r}"
        if not cite_class_holds(g, term):
            return False, f"cited class membership fails for {term.source}"
        return True, ""
    comps = components(g)
    if len(comps) != len(term.children):
        return False, f"component count {len(comps)} != child count {len(term.children)}"
    for comp, child in zip(comps, term.children):
        sub, _ = induced_subgraph(g, comp)
        ok, why = _verify_node(sub, child)
        if not ok:
            return False, why
    return True, ""


def verify_certificate(g: Graph, cert: Certificate) -> tuple[bool, str]:
    """Replay every step from g, checking hashes, budgets, bases and cites."""
    if count_deletions(cert.root) > cert.delete_budget:
        return False, "deletions exceed the declared budget"
    return _verify_node(g, cert.root)


# -- serialization: line-oriented, indentation gives tree depth ---------------


def _fmt_ids(ids) -> str:
    return ",".join(map(str, ids)) if ids else "-"


def _parse_ids(text: str) -> tuple[int, ...]:
    return tuple() if text == "-" else tuple(int(x) for x in text.split(","))


def _emit(node: CertNode, depth: int, out: list[str]) -> None:
    pad = "  " * depth
    out.append(f"{pad}node hash={node.hash_before} n={node.n}")
    for step, after in node.steps:
        if isinstance(step, DeleteVertices):
            out.append(f"{pad}step delete {_fmt_ids(step.vertices)} hash={after}")
        elif isinstance(step, SubgraphComplement):
            out.append(f"{pad}step complement {_fmt_ids(step.inside)} hash={after}")
        elif isinstance(step, BipartiteComplement):
            out.append(
                f"{pad}step bipcomplement {_fmt_ids(step.side_a)}|{_fmt_ids(step.side_b)} hash={after}"
            )
        else:
            classes = ";".join(_fmt_ids(c) for c in step.classes)
            out.append(f"{pad}step removetwins {classes} hash={after}")
    term = node.terminal
    if isinstance(term, Base):
        out.append(f"{pad}base width={term.width_bound} expr={format_expr(term.expr)}")
    elif isinstance(term, Cite):
        bound = "-" if term.bound is None else str(term.bound)
        detail = term.detail or "-"
        out.append(f"{pad}cite {term.source} bound={bound} detail={detail}")
    elif isinstance(term, Split):
        out.append(f"{pad}split {len(term.children)}")
        for child in term.children:
            _emit(child, depth + 1, out)
    else:
        raise ValueError("cannot serialize an open certificate node")


def certificate_to_text(cert: Certificate) -> str:
    out = [f"certificate budget={cert.delete_budget}"]
    _emit(cert.root, 0, out)
    return "\n".join(out) + "\n"


def certificate_from_text(text: str) -> Certificate:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("certificate budget="):
        raise ValueError("missing certificate header")
    budget = int(lines[0].split("=", 1)[1])
    pos = 1

    def depth_of(line: str) -> int:
        return (len(line) - len(line.lstrip())) // 2

    def parse_node(depth: int) -> CertNode:
        nonlocal pos
        line = lines[pos].strip()
        if depth_of(lines[pos]) != depth or not line.startswith("node "):
            raise ValueError(f"expected node header at line {pos + 1}")
        fields = dict(part.split("=", 1) for part in line.split()[1:])
        node = CertNode(fields["hash"], int(fields["n"]))
        pos += 1
        while pos < len(lines) and depth_of(lines[pos]) == depth:
            line = lines[pos].strip()
            if line.startswith("step "):
                _, kind, payload, hash_part = line.split(" ", 3)
                after = hash_part.split("=", 1)[1]
                if kind == "delete":
                    step: Step = DeleteVertices(_parse_ids(payload))
                elif kind == "complement":
                    step = SubgraphComplement(_parse_ids(payload))
                elif kind == "bipcomplement":
                    a, b = payload.split("|")
                    step = BipartiteComplement(_parse_ids(a), _parse_ids(b))
                elif kind == "removetwins":
                    step = RemoveFalseTwins(tuple(_parse_ids(c) for c in payload.split(";")))
                else:
                    raise ValueError(f"unknown step kind {kind!r}")
                node.steps.append((step, after))
                pos += 1
            elif line.startswith("base "):
                _, width_part, expr_part = line.split(" ", 2)
                node.terminal = Base(
                    parse_expr(expr_part.split("=", 1)[1]),
                    int(width_part.split("=", 1)[1]),
                )
                pos += 1
                return node
            elif line.startswith("cite "):
                _, source, bound_part, detail_part = line.split(" ", 3)
                bound_text = bound_part.split("=", 1)[1]
                detail_text = detail_part.split("=", 1)[1]
                node.terminal = Cite(
                    source,
                    None if bound_text == "-" else int(bound_text),
                    None if detail_text == "-" else detail_text,
                )
                pos += 1
                return node
            elif line.startswith("split "):
                count = int(line.split()[1])
                pos += 1
                node.terminal = Split([parse_node(depth + 1) for _ in range(count)])
                return node
            else:
                raise ValueError(f"unexpected line: {line!r}")
        return node

    root = parse_node(0)
    if pos != len(lines):
        raise ValueError("trailing lines after certificate")
    return Certificate(root, budget)


def certificate_to_dot(cert: Certificate) -> str:
    """GraphViz rendering of the certificate tree (optional output)."""
    lines = ["digraph certificate {", "  node [shape=box];"]
    counter = [0]

    def walk(node: CertNode) -> int:
        my = counter[0]
        counter[0] += 1
        steps = "\\n".join(type(s).__name__ for s, _ in node.steps) or "(no steps)"
        term = node.terminal
        if isinstance(term, Base):
            tail = f"Base w<={term.width_bound}"
        elif isinstance(term, Cite):
            tail = f"Cite {term.source}"
        else:
            tail = "Split"
        lines.append(f'  n{my} [label="n={node.n}\\n{steps}\\n{tail}"];')
        if isinstance(term, Split):
            for child in term.children:
                cid = walk(child)
                lines.append(f"  n{my} -> n{cid};")
        return my

    walk(cert.root)
    lines.append("}")
    return "\n".join(lines)
