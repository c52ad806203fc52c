"""Deterministic generators and exhaustive enumerators for the test suites.

All randomness flows from SplitMix64 seeded per spec; stream splitting
derives child seeds by mixing a stream index through the same finalizer, so
parallel batches stay reproducible. Structured generators construct their
witness (decomposition tree, ten-set partition, basic structure) alongside
the graph and never adjust a declared size silently: when constraints make
a spec infeasible they raise GenError after bounded resampling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

from .decomp import DecompositionSplit, DecompositionTree, cross_triple_witness
from .graphs import Graph, bits, make_graph, mask_of
from .patterns import find_induced_embedding, is_free, pattern
from .pipelines.basic import BasicStructure
from .pipelines.tenset import TenSetPartition

MASK64 = (1 << 64) - 1


class GenError(ValueError):
    pass


class SplitMix64:
    """Standard SplitMix64; pure integer ops, identical on every platform."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randrange needs a positive bound")
        # rejection keeps the draw unbiased
        limit = MASK64 - (MASK64 + 1) % n
        while True:
            x = self.next_u64()
            if x <= limit:
                return x % n

    def chance(self, percent: int) -> bool:
        return self.randrange(100) < percent

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def split(self, stream: int) -> "SplitMix64":
        child = SplitMix64((self.state ^ (0xA5A5A5A5A5A5A5A5 + stream)) & MASK64)
        child.next_u64()
        return child


@dataclass(frozen=True)
class GenSpec:
    mode: str  # random_free | basic | tenset | decomposable
    seed: int
    n: int = 0
    params: tuple[tuple[str, str], ...] = field(default_factory=tuple)

    def get(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.params:
            if k == key:
                return v
        return default

    def get_int(self, key: str, default: int) -> int:
        raw = self.get(key)
        return default if raw is None else int(raw)


def parse_genspec(text: str) -> GenSpec:
    """key=value lines; `mode` and `seed` required, the rest mode-specific."""
    pairs = {}
    extras = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise GenError(f"bad genspec line {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in ("mode", "seed", "n"):
            pairs[key] = value
        else:
            extras.append((key, value))
    if "mode" not in pairs or "seed" not in pairs:
        raise GenError("genspec needs mode= and seed=")
    return GenSpec(
        pairs["mode"], int(pairs["seed"]), int(pairs.get("n", "0")), tuple(extras)
    )


# -- exhaustive enumeration ----------------------------------------------------


def enumerate_small(n: int, filters=(), dedup: bool = False, cap: int = 8):
    """All labelled graphs on n vertices passing the filters.

    With dedup=True one representative per isomorphism class is kept (the
    one with the least edge bitmask over all vertex permutations).
    """
    if n > cap:
        raise GenError(f"enumeration capped at {cap} vertices")
    pats = [(p if isinstance(p, str) else p) for p in filters]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen = set()
    for code in range(1 << len(pairs)):
        edges = [pairs[k] for k in range(len(pairs)) if code >> k & 1]
        g = make_graph(n, edges)
        if dedup:
            key = canonical_code(g)
            if key in seen:
                continue
            seen.add(key)
        if pats and not is_free(g, pats).free:
            continue
        yield g


def canonical_code(g: Graph) -> int:
    """Least edge bitmask over all vertex permutations (tiny graphs only)."""
    pairs = [(i, j) for i in range(g.n) for j in range(i + 1, g.n)]
    index = {p: k for k, p in enumerate(pairs)}
    best = None
    for perm in permutations(range(g.n)):
        code = 0
        for u, v in g.edges():
            a, b = perm[u], perm[v]
            code |= 1 << index[(a, b) if a < b else (b, a)]
        if best is None or code < best:
            best = code
    return best if best is not None else 0


# -- repair-based random generation ---------------------------------------------


def random_free(spec: GenSpec) -> Graph:
    """Random n-vertex graph free of the listed patterns.

    Edges are tried in a shuffled order; an insertion is kept only if no
    forbidden pattern embeds through the new edge (anchored search over the
    pattern's edges), which keeps expected time linear in the attempts.
    """
    if spec.mode != "random_free":
        raise GenError("spec mode must be random_free")
    names = [s for s in (spec.get("patterns", "") or "").split(",") if s]
    if not names:
        raise GenError("random_free needs patterns=<comma list>")
    pats = [(name, pattern(name)) for name in names]
    rng = SplitMix64(spec.seed)
    n = spec.n
    density = spec.get_int("density", 50)
    adj = [0] * n
    candidates = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rng.shuffle(candidates)

    for u, v in candidates:
        if not rng.chance(density):
            continue
        adj[u] |= 1 << v
        adj[v] |= 1 << u
        g = Graph(n, tuple(adj))
        if _edge_completes_pattern(g, pats, u, v):
            adj[u] &= ~(1 << v)
            adj[v] &= ~(1 << u)
    g = Graph(n, tuple(adj))
    verdict = is_free(g, [p for p, _ in pats])
    if not verdict.free:
        raise GenError(f"start graph already contained {verdict.violated}")
    return g


def _edge_completes_pattern(g: Graph, pats, u: int, v: int) -> bool:
    for _, hg in pats:
        for a in range(hg.n):
            for b in bits(hg.adj[a]):
                if find_induced_embedding(g, hg, anchors={a: u, b: v}) is not None:
                    return True
    return False


# -- totally k-decomposable instances --------------------------------------------


def synthesize_decomposable(spec: GenSpec) -> tuple[Graph, DecompositionTree]:
    """Graph built top-down by sampled splits, so the witness tree is free.

    For k=3 the instance is resampled until it also meets the pairwise
    (P7,S123)-free and no-cross-triple conditions, so the constructive
    3-partite decomposer accepts it.
    """
    if spec.mode != "decomposable":
        raise GenError("spec mode must be decomposable")
    k = spec.get_int("k", 3)
    n = spec.n
    if n < 1 or k < 2:
        raise GenError("need n >= 1 and k >= 2")
    retries = spec.get_int("retries", 120)
    for attempt in range(retries):
        rng = SplitMix64(spec.seed).split(attempt)
        parts = [0] * k
        for v in range(n):
            parts[rng.randrange(k)] |= 1 << v
        edges: list[tuple[int, int]] = []
        tree = _sample_split_tree(rng, tuple(parts), edges, k)
        g = make_graph(n, edges)
        if k != 3:
            return g, tree
        from .decomp import PreconditionViolation, check_tripartite_preconditions

        try:
            check_tripartite_preconditions(g, tuple(parts))
            return g, tree
        except PreconditionViolation:
            continue
    raise GenError("could not sample an instance meeting the 3-partite conditions")


def _sample_split_tree(rng: SplitMix64, parts: tuple[int, ...], edges, k: int) -> DecompositionTree:
    total = 0
    for p in parts:
        total |= p
    node = DecompositionTree(total, parts)
    if total.bit_count() == 1:
        return node
    vs = list(bits(total))
    rng.shuffle(vs)
    cut = 1 + rng.randrange(len(vs) - 1)
    primed_set = set(vs[:cut])
    primed = tuple(mask_of(v for v in bits(p) if v in primed_set) for p in parts)
    double = tuple(p & ~pr for p, pr in zip(parts, primed))
    from .graphs import TrivialityKind

    rel = []
    for i in range(k):
        row = []
        for j in range(k):
            if i != j and primed[i] and double[j] and rng.chance(30):
                row.append(TrivialityKind.COMPLETE)
                edges.extend((u, v) for u in bits(primed[i]) for v in bits(double[j]))
            else:
                row.append(TrivialityKind.ANTICOMPLETE)
        rel.append(tuple(row))
    node.split = DecompositionSplit(primed, double, tuple(rel))
    node.left = _sample_split_tree(rng, primed, edges, k)
    node.right = _sample_split_tree(rng, double, edges, k)
    return node


# -- ten-set instances ------------------------------------------------------------


def synthesize_tenset(spec: GenSpec) -> tuple[Graph, TenSetPartition]:
    """Instance of the pentagonal ten-set class plus its witness partition.

    The safe scheme forces W_i complete to W_{i+-1}, keeps far W-pairs
    anti-complete, points each V_i fully at W_{i+2} and away from W_{i-2},
    and samples per-vertex trivial or sparse relations on the V-ring; the
    candidate is rejected until the literal conditions and (K3,S123)-
    freeness hold.
    """
    if spec.mode != "tenset":
        raise GenError("spec mode must be tenset")
    v_max = spec.get_int("v_max", 4)
    w_max = spec.get_int("w_max", 3)
    density = spec.get_int("density", 35)
    retries = spec.get_int("retries", 120)
    from .pipelines.tenset import check_ten_set_conditions

    for attempt in range(retries):
        rng = SplitMix64(spec.seed).split(attempt)
        v_sizes = [1 + rng.randrange(v_max) for _ in range(5)]
        w_sizes = [rng.randrange(w_max + 1) for _ in range(5)]
        v_sets, w_sets = [0] * 5, [0] * 5
        nxt = 0
        for i in range(5):
            v_sets[i] = mask_of(range(nxt, nxt + v_sizes[i]))
            nxt += v_sizes[i]
        for i in range(5):
            w_sets[i] = mask_of(range(nxt, nxt + w_sizes[i]))
            nxt += w_sizes[i]
        n = nxt
        edges = []
        for i in range(5):
            j = (i + 1) % 5
            edges.extend(
                (u, v) for u in bits(w_sets[i]) for v in bits(w_sets[j])
            )
        for i in range(5):
            for v in bits(v_sets[i]):
                if w_sets[(i + 2) % 5]:
                    edges.extend((v, w) for w in bits(w_sets[(i + 2) % 5]))
                if w_sets[i] and rng.chance(50):
                    edges.extend((v, w) for w in bits(w_sets[i]))
        for i in range(5):
            j = (i + 1) % 5
            for v in bits(v_sets[i]):
                mode = rng.randrange(3)
                if mode == 0:
                    continue  # anti to the right neighbour ring
                if mode == 1:
                    edges.extend((v, w) for w in bits(v_sets[j]))
                else:
                    for w in bits(v_sets[j]):
                        if rng.chance(density):
                            edges.append((v, w))
        g = make_graph(n, edges)
        p = TenSetPartition(tuple(v_sets), tuple(w_sets))
        if not check_ten_set_conditions(g, p):
            continue
        if not is_free(g, ["K3", "S123"]).free:
            continue
        return g, p
    raise GenError("could not sample a conforming ten-set instance")


# -- basic instances ---------------------------------------------------------------


def _chain_bipartite(rng: SplitMix64, side_a: list[int], side_b: list[int], density: int):
    """2P2-free bipartite edges: nested neighbourhoods (a chain graph)."""
    if not side_a or not side_b:
        return []
    sizes = sorted(
        (rng.randrange(len(side_b) + 1) if rng.chance(density) else 0 for _ in side_a),
        reverse=True,
    )
    edges = []
    for a, size in zip(side_a, sizes):
        edges.extend((a, b) for b in side_b[:size])
    return edges


def _sample_block(rng: SplitMix64, classes: list[list[int]], density: int):
    """W-block interior: chain-graph class pairs, no K3, no cross 3P1."""
    block_vertices = [v for cls in classes for v in cls]
    if not block_vertices:
        return []
    remap = {v: idx for idx, v in enumerate(block_vertices)}
    parts = tuple(mask_of(remap[v] for v in classes[k]) for k in range(3))
    for _ in range(40):
        block_edges = []
        for k in range(3):
            block_edges.extend(
                _chain_bipartite(rng, classes[k], classes[(k + 1) % 3], density)
            )
        sub = make_graph(
            len(block_vertices), [(remap[u], remap[v]) for u, v in block_edges]
        )
        if not is_free(sub, ["K3", "P1+2P2"]).free:
            continue
        hit = cross_triple_witness(sub, parts)
        if hit is not None and hit[0] == "3P1":
            continue
        return block_edges
    return None


def synthesize_basic(spec: GenSpec) -> tuple[Graph, BasicStructure]:
    """Basic graph plus its structure; resampled until (diamond,P1+2P2)-free.

    Construction: triangles in order with the forced forward pattern
    (class k complete to later class k+1), W-blocks with chain-graph
    class pairs (keeps them 2P2-free), consecutive-W diagonal flags sampled
    but forced complete when both blocks carry edges on that diagonal, and
    per-triangle U clones copying a host vertex's outside neighbourhood.
    """
    if spec.mode != "basic":
        raise GenError("spec mode must be basic")
    p = spec.get_int("p", 2)
    w_max = spec.get_int("w_max", 2)
    u_max = spec.get_int("u_max", 1)
    density = spec.get_int("density", 40)
    retries = spec.get_int("retries", 120)
    if p < 1:
        raise GenError("need at least one triangle")
    for attempt in range(retries):
        rng = SplitMix64(spec.seed).split(attempt)
        built = _build_basic(rng, p, w_max, u_max, density)
        if built is None:
            continue
        g, structure = built
        if is_free(g, ["P1+2P2"]).free:
            return g, structure
    raise GenError("could not sample a (diamond,P1+2P2)-free basic instance")


def _build_basic(rng: SplitMix64, p: int, w_max: int, u_max: int, density: int):
    tri: list[tuple[int, int, int]] = []
    w_cls: list[list[list[int]]] = []
    u_ids: list[list[int]] = []
    u_host: list[int] = []
    nxt = 0
    for i in range(p):
        if i == 0:
            # recognition anchors classes on the least triangle: vertex 1
            # lands in class 1, vertex 2 in class 2, vertex 0 in class 3
            tri.append((1, 2, 0))
        else:
            tri.append((nxt, nxt + 1, nxt + 2))
        nxt += 3
        size = rng.randrange(u_max + 1) if u_max else 0
        u_ids.append(list(range(nxt, nxt + size)))
        u_host.append(rng.randrange(3) if size else -1)
        nxt += size
        classes = []
        for _ in range(3):
            width = rng.randrange(w_max + 1) if w_max else 0
            classes.append(list(range(nxt, nxt + width)))
            nxt += width
        w_cls.append(classes)

    core_edges: list[tuple[int, int]] = []
    for t in tri:
        core_edges.extend(((t[0], t[1]), (t[1], t[2]), (t[0], t[2])))

    blocks: list[tuple[str, int, list[list[int]]]] = []
    for i in range(p):
        blocks.append(("T", i, [[tri[i][0]], [tri[i][1]], [tri[i][2]]]))
        blocks.append(("W", i, w_cls[i]))

    flags: dict[tuple[int, int], bool] = {}
    for a in range(len(blocks)):
        for b in range(a + 1, len(blocks)):
            kind_a, ia, cls_a = blocks[a]
            kind_b, ib, cls_b = blocks[b]
            for k in range(3):
                l = (k + 1) % 3
                if kind_a == "W" and kind_b == "W" and ib == ia + 1:
                    complete = rng.chance(50)
                    flags[(ia, k)] = complete
                    if complete:
                        core_edges.extend(
                            (u, v) for u in cls_a[k] for v in cls_b[l]
                        )
                else:
                    core_edges.extend((u, v) for u in cls_a[k] for v in cls_b[l])

    for i in range(p):
        block_edges = _sample_block(rng, w_cls[i], density)
        if block_edges is None:
            return None
        core_edges.extend(block_edges)

    # force the consecutive diagonal complete where both blocks use it,
    # otherwise the two internal edges plus any class-(k+2) clone is a
    # forbidden P1+2P2
    edge_set = {frozenset(e) for e in core_edges}
    for i in range(p - 1):
        for k in range(3):
            l = (k + 1) % 3
            if flags.get((i, k)):
                continue
            left = {frozenset((u, v)) for u in w_cls[i][k] for v in w_cls[i][l]}
            right = {frozenset((u, v)) for u in w_cls[i + 1][k] for v in w_cls[i + 1][l]}
            left_used = bool(left & edge_set)
            right_used = bool(right & edge_set)
            if left_used and right_used:
                flags[(i, k)] = True
                core_edges.extend(
                    (u, v) for u in w_cls[i][k] for v in w_cls[i + 1][l]
                )

    core = make_graph(nxt, core_edges)
    full_edges = list(core.edges())
    for i in range(p):
        if not u_ids[i]:
            continue
        host = tri[i][u_host[i]]
        t_mask = mask_of(tri[i])
        host_adj = core.adj[host] & ~t_mask
        for u in u_ids[i]:
            full_edges.extend((u, z) for z in bits(host_adj))
    for i in range(p):
        for j in range(i + 1, p):
            if not u_ids[i] or not u_ids[j]:
                continue
            if core.has_edge(tri[i][u_host[i]], tri[j][u_host[j]]):
                full_edges.extend((a, b) for a in u_ids[i] for b in u_ids[j])

    g = make_graph(nxt, full_edges)
    v_classes = [0, 0, 0]
    for i in range(p):
        for k in range(3):
            v_classes[k] |= 1 << tri[i][k]
            v_classes[k] |= mask_of(w_cls[i][k])
    structure = BasicStructure(
        g,
        tuple(v_classes),
        tuple(tri),
        tuple(mask_of(v for cls in w_cls[i] for v in cls) for i in range(p)),
        tuple(tuple(u_ids[i]) for i in range(p)),
        tuple(u_host),
    )
    return g, structure
