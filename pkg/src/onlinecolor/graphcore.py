"""Graphs as adjacency bitmasks, induced embeddings, canonical keys and a
brute-force chromatic number."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence


class GraphError(ValueError):
    pass


class GraphFormatError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[int, ...]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def neighbors(self, v: int) -> list[int]:
        return list(bits(self.adj[v]))

    def degree(self, v: int) -> int:
        return popcount(self.adj[v])

    def degree_sequence(self) -> list[int]:
        return [self.degree(v) for v in range(self.n)]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.adj[u] >> (u + 1) << (u + 1))]

    @property
    def num_edges(self) -> int:
        return sum(popcount(a) for a in self.adj) // 2

    def max_degree(self) -> int:
        return max((self.degree(v) for v in range(self.n)), default=0)

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        return graph_from_edges(self.n, [(perm[u], perm[v]) for u, v in self.edges()])

    def induced(self, vertices: Sequence[int]) -> Graph:
        index = {v: i for i, v in enumerate(vertices)}
        return graph_from_edges(
            len(vertices),
            [(index[u], index[v]) for u, v in self.edges() if u in index and v in index],
        )


def graph_from_edges(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    if n < 0:
        raise GraphError(f"negative vertex count {n}")
    adj = [0] * n
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
        if u == v:
            raise GraphError(f"edge ({u}, {v}) is a self-loop")
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return Graph(n, tuple(adj))


def graph_from_masks(adj: Sequence[int]) -> Graph:
    n = len(adj)
    for u, m in enumerate(adj):
        if m >> u & 1 or m >> n:
            raise GraphError(f"bad adjacency mask for vertex {u}")
        for v in bits(m):
            if not adj[v] >> u & 1:
                raise GraphError(f"asymmetric adjacency between {u} and {v}")
    return Graph(n, tuple(adj))


@dataclass(frozen=True)
class PrecoloredGraph:
    """A graph with a strong precoloring: precolored vertices are publicly
    identified, so embeddings must fix them."""

    graph: Graph
    precolored: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        seen = set()
        for v, c in self.precolored:
            if not 0 <= v < self.graph.n:
                raise GraphError(f"precolored vertex {v} out of range")
            if v in seen:
                raise GraphError(f"vertex {v} precolored twice")
            if c < 0:
                raise GraphError(f"negative color {c} on vertex {v}")
            seen.add(v)
        cmap = dict(self.precolored)
        for v, c in cmap.items():
            for w in bits(self.graph.adj[v]):
                if cmap.get(w) == c:
                    raise GraphError(f"precoloring not proper on edge ({v}, {w})")

    @classmethod
    def of(cls, graph: Graph, precolored: Mapping[int, int] | None = None) -> PrecoloredGraph:
        return cls(graph, tuple(sorted((precolored or {}).items())))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def coloring(self) -> dict[int, int]:
        return dict(self.precolored)

    @property
    def anchors(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.precolored)

    @property
    def precolored_mask(self) -> int:
        m = 0
        for v, _ in self.precolored:
            m |= 1 << v
        return m

    def free_vertices(self) -> list[int]:
        pm = self.precolored_mask
        return [v for v in range(self.n) if not pm >> v & 1]


# ---------------------------------------------------------------------------
# colored revealed graphs


@dataclass(frozen=True)
class ColoredGraph:
    """A colored graph whose first ``len(anchors)`` vertices are pinned to the
    listed host vertices (the precolored ones)."""

    adj: tuple[int, ...]
    colors: tuple[int, ...]
    anchors: tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return len(self.adj)

    def is_proper(self) -> bool:
        return all(self.colors[u] != self.colors[v] for u in range(self.n) for v in bits(self.adj[u]))

    def extend(self, nbr_mask: int, color: int) -> ColoredGraph:
        r = self.n
        adj = list(self.adj)
        for w in bits(nbr_mask):
            adj[w] |= 1 << r
        adj.append(nbr_mask)
        return ColoredGraph(tuple(adj), self.colors + (color,), self.anchors)


def colored_from_host(host: PrecoloredGraph, order: Sequence[int], colors: Sequence[int]) -> ColoredGraph:
    """Induced colored subgraph of ``host`` on ``order``; precolored vertices
    in ``order`` must come first."""
    index = {v: i for i, v in enumerate(order)}
    adj = [0] * len(order)
    for i, v in enumerate(order):
        for w in bits(host.graph.adj[v]):
            j = index.get(w)
            if j is not None:
                adj[i] |= 1 << j
    pre = host.coloring
    anchors = tuple(v for v in order if v in pre)
    if tuple(order[: len(anchors)]) != anchors:
        raise GraphError("precolored vertices must lead the order")
    return ColoredGraph(tuple(adj), tuple(colors), anchors)


# ---------------------------------------------------------------------------
# induced embeddings


def twin_classes(host: PrecoloredGraph) -> list[int]:
    """``rep[v]`` is the smallest non-precolored vertex with the same open
    (or closed) neighbourhood as ``v``; precolored vertices map to themselves.

    Permuting a twin class is a host automorphism fixing the precoloring."""
    g = host.graph
    pm = host.precolored_mask
    rep = list(range(g.n))
    seen_open: dict[int, int] = {}
    seen_closed: dict[int, int] = {}
    for v in range(g.n):
        if pm >> v & 1:
            continue
        op, cl = g.adj[v], g.adj[v] | 1 << v
        if op in seen_open:
            rep[v] = seen_open[op]
        elif cl in seen_closed:
            rep[v] = seen_closed[cl]
        else:
            seen_open[op] = v
            seen_closed[cl] = v
    return rep


def _search_order(pattern: ColoredGraph) -> list[int]:
    free = range(len(pattern.anchors), pattern.n)
    return sorted(free, key=lambda x: (-popcount(pattern.adj[x]), x))


def iter_embeddings(
    pattern: ColoredGraph,
    host: PrecoloredGraph,
    *,
    modulo_twins: bool = False,
) -> Iterator[tuple[int, ...]]:
    """Induced embeddings of ``pattern`` into ``host`` fixing the anchors.

    With ``modulo_twins`` only one representative per permutation of host
    twin classes is produced (enough whenever the caller's question is
    invariant under host automorphisms)."""
    g = host.graph
    r = pattern.n
    p = len(pattern.anchors)
    if r > g.n:
        return
    phi = [-1] * r
    used = 0
    for i, a in enumerate(pattern.anchors):
        phi[i] = a
        used |= 1 << a
    for i in range(p):
        for j in range(i):
            if bool(pattern.adj[i] >> j & 1) != g.has_edge(phi[i], phi[j]):
                return
    full = (1 << g.n) - 1
    base = full & ~host.precolored_mask
    # candidate set consistent with the anchors, per pattern vertex
    domain = [0] * r
    for x in range(p, r):
        d = base
        for i in range(p):
            a = phi[i]
            d &= g.adj[a] if pattern.adj[x] >> i & 1 else ~g.adj[a]
        domain[x] = d & full
    order = _search_order(pattern)
    if modulo_twins:
        rep = twin_classes(host)
        earlier = [0] * g.n
        for v in range(g.n):
            if rep[v] != v:
                earlier[v] = sum(1 << w for w in range(v) if rep[w] == rep[v])
    else:
        earlier = None

    def cands(x: int) -> int:
        c = domain[x] & ~used
        pa = pattern.adj[x]
        for y in range(p, r):
            h = phi[y]
            if h < 0:
                continue
            c &= g.adj[h] if pa >> y & 1 else ~g.adj[h]
        return c

    def rec(depth: int) -> Iterator[tuple[int, ...]]:
        nonlocal used
        if depth == len(order):
            yield tuple(phi)
            return
        x = order[depth]
        c = cands(x)
        for h in bits(c):
            if earlier is not None and earlier[h] & ~used:
                continue
            phi[x] = h
            used |= 1 << h
            ok = True
            for y in order[depth + 1 :]:
                if not cands(y):
                    ok = False
                    break
            if ok:
                yield from rec(depth + 1)
            used &= ~(1 << h)
            phi[x] = -1

    yield from rec(0)


def induced_embeddings(pattern: ColoredGraph, host: PrecoloredGraph, limit: int | None = None) -> list[tuple[int, ...]]:
    out = []
    if limit is not None and limit <= 0:
        return out
    for phi in iter_embeddings(pattern, host):
        out.append(phi)
        if limit is not None and len(out) >= limit:
            break
    return out


def is_induced_embedding(pattern: ColoredGraph, host: PrecoloredGraph, phi: Sequence[int]) -> bool:
    g = host.graph
    if len(phi) != pattern.n or len(set(phi)) != len(phi):
        return False
    if any(not 0 <= h < g.n for h in phi):
        return False
    p = len(pattern.anchors)
    if tuple(phi[:p]) != tuple(pattern.anchors):
        return False
    pm = host.precolored_mask
    if any(pm >> h & 1 for h in phi[p:]):
        return False
    for i in range(pattern.n):
        for j in range(i):
            if bool(pattern.adj[i] >> j & 1) != g.has_edge(phi[i], phi[j]):
                return False
    return True


# ---------------------------------------------------------------------------
# canonical keys


def _refine(adj: Sequence[int], same: Sequence[int], cells: list[int]) -> list[int]:
    """Refine an ordered partition (``cells[v]`` = cell rank) to equitable."""
    n = len(adj)
    while True:
        sig = [
            (
                cells[v],
                tuple(sorted(cells[w] for w in bits(adj[v]))),
                tuple(sorted(cells[w] for w in bits(same[v]))),
            )
            for v in range(n)
        ]
        ranks = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [ranks[s] for s in sig]
        if len(ranks) == len(set(cells)):
            return new
        cells = new


def canonical_key(state: ColoredGraph, rename_colors: bool = True) -> bytes:
    """Key equal for two colored graphs iff an isomorphism maps one onto the
    other, fixing anchors pointwise and mapping color classes onto color
    classes (or preserving color ids exactly when ``rename_colors`` is off).

    Individualization-refinement with twin pruning; no automorphism group
    bookkeeping beyond that."""
    n = state.n
    p = len(state.anchors)
    adj = state.adj
    colors = state.colors
    same = [0] * n
    by_color: dict[int, int] = {}
    for v, c in enumerate(colors):
        by_color[c] = by_color.get(c, 0) | 1 << v
    for v, c in enumerate(colors):
        same[v] = by_color[c] & ~(1 << v)
    init = []
    for v in range(n):
        if v < p:
            init.append((0, state.anchors[v], colors[v] if not rename_colors else 0))
        else:
            tag = popcount(by_color[colors[v]]) if rename_colors else colors[v]
            init.append((1, tag, popcount(adj[v])))
    ranks = {s: i for i, s in enumerate(sorted(set(init)))}
    cells = _refine(adj, same, [ranks[s] for s in init])

    best: list = [None]

    def certificate(cells: list[int]) -> tuple:
        order = sorted(range(n), key=lambda v: cells[v])
        pos = [0] * n
        for i, v in enumerate(order):
            pos[v] = i
        rows = tuple(sum(1 << pos[w] for w in bits(adj[v])) for v in order)
        if rename_colors:
            names: dict[int, int] = {}
            # anchor colors are tied to their anchor identities
            for v in range(p):
                names.setdefault(colors[v], -1 - len(names))
            cols = tuple(names.setdefault(colors[v], len(names)) for v in order)
        else:
            cols = tuple(colors[v] for v in order)
        return rows, cols

    def rec(cells: list[int]) -> None:
        counts: dict[int, list[int]] = {}
        for v in range(n):
            counts.setdefault(cells[v], []).append(v)
        target = None
        for c in sorted(counts):
            if len(counts[c]) > 1 and (target is None or len(counts[c]) < len(counts[target])):
                target = c
        if target is None:
            cert = certificate(cells)
            if best[0] is None or cert < best[0]:
                best[0] = cert
            return
        members = counts[target]
        tried: list[int] = []
        for v in members:
            # twins in the colored graph give isomorphic subtrees
            if any(
                colors[w] == colors[v] and adj[w] & ~(1 << v) == adj[v] & ~(1 << w)
                for w in tried
            ):
                continue
            tried.append(v)
            nc = [2 * c + (1 if c > target or (c == target and u != v) else 0) for u, c in enumerate(cells)]
            nc[v] = 2 * target
            rec(_refine(adj, same, nc))

    rec(cells)
    rows, cols = best[0]
    head = (n, p) + tuple(state.anchors)
    return repr((head, rows, cols)).encode()


# ---------------------------------------------------------------------------
# chromatic number and cliques

CHROMATIC_LIMIT = 16


def chromatic_number(g: Graph) -> int:
    if g.n > CHROMATIC_LIMIT:
        raise GraphError(f"chromatic_number refuses graphs with more than {CHROMATIC_LIMIT} vertices (got {g.n})")
    if g.n == 0:
        return 0
    order = sorted(range(g.n), key=lambda v: -g.degree(v))
    lower = popcount(max_clique(g.adj))
    for k in range(max(lower, 1), g.n + 1):
        if _colorable(g, order, k):
            return k
    return g.n


def _colorable(g: Graph, order: list[int], k: int) -> bool:
    color = [-1] * g.n

    def rec(i: int, used: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        blocked = {color[w] for w in bits(g.adj[v])}
        # a fresh color is interchangeable with any other fresh one
        for c in range(min(used + 1, k)):
            if c not in blocked:
                color[v] = c
                if rec(i + 1, max(used, c + 1)):
                    return True
                color[v] = -1
        return False

    return rec(0, 0)


def max_clique(
    adj: Sequence[int],
    candidates: int | None = None,
    restrict: int = 0,
    restrict_limit: int | None = None,
) -> int:
    """Maximum clique (as a bitmask) among ``candidates``, branch and bound
    with a greedy-coloring bound.  With ``restrict_limit`` set, at most that
    many members may come from the ``restrict`` mask."""
    if candidates is None:
        candidates = (1 << len(adj)) - 1
    best = [0, 0]

    def color_bound(cand: int) -> list[tuple[int, int]]:
        out = []
        color = 0
        rest = cand
        while rest:
            color += 1
            avail = rest
            while avail:
                v = (avail & -avail).bit_length() - 1
                avail &= ~adj[v] & ~(1 << v)
                rest &= ~(1 << v)
                out.append((v, color))
        return out

    def rec(clique: int, size: int, cand: int, taken: int) -> None:
        if not cand:
            if size > best[1]:
                best[0], best[1] = clique, size
            return
        if restrict_limit is not None:
            if taken >= restrict_limit:
                cand &= ~restrict
            room = popcount(cand & ~restrict) + min(restrict_limit - taken, popcount(cand & restrict))
            if size + room <= best[1]:
                return
            if not cand:
                if size > best[1]:
                    best[0], best[1] = clique, size
                return
        ordered = color_bound(cand)
        for v, bound in reversed(ordered):
            if size + bound <= best[1]:
                return
            bit = 1 << v
            t = taken + (1 if restrict >> v & 1 else 0)
            if restrict_limit is None or t <= restrict_limit:
                rec(clique | bit, size + 1, cand & adj[v], t)
            cand &= ~bit
        if size > best[1]:
            best[0], best[1] = clique, size

    if restrict_limit is not None and candidates & restrict:
        # a clique avoiding the restricted set is a strong starting bound
        seed = max_clique(adj, candidates & ~restrict)
        best[0], best[1] = seed, popcount(seed)
    rec(0, 0, candidates, 0)
    return best[0]


# ---------------------------------------------------------------------------
# text format


def parse_graph(text: str) -> PrecoloredGraph:
    n = None
    edges: list[tuple[int, int]] = []
    pre: dict[int, int] = {}
    lines: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        lines.append((lineno, line))
    for lineno, tok in lines:
        if tok[0] == "p":
            if len(tok) != 2:
                raise GraphFormatError("expected 'p <n>'", lineno)
            if n is not None:
                raise GraphFormatError("duplicate 'p' line", lineno)
            n = _int(tok[1], lineno)
    if n is None:
        raise GraphFormatError("missing 'p <n>' line")
    for lineno, tok in lines:
        kind = tok[0]
        if kind == "p":
            continue
        if kind not in ("e", "c") or len(tok) != 3:
            raise GraphFormatError(f"unrecognised record {' '.join(tok)!r}", lineno)
        a, b = _int(tok[1], lineno), _int(tok[2], lineno)
        if kind == "e":
            if not (0 <= a < n and 0 <= b < n) or a == b:
                raise GraphFormatError(f"bad edge ({a}, {b})", lineno)
            edges.append((a, b))
        else:
            if not 0 <= a < n:
                raise GraphFormatError(f"precolored vertex {a} out of range", lineno)
            if a in pre:
                raise GraphFormatError(f"vertex {a} precolored twice", lineno)
            pre[a] = b
    try:
        return PrecoloredGraph.of(graph_from_edges(n, edges), pre)
    except GraphError as exc:
        raise GraphFormatError(str(exc)) from exc


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise GraphFormatError(f"expected an integer, got {tok!r}", lineno) from None


def format_graph(host: PrecoloredGraph | Graph) -> str:
    if isinstance(host, Graph):
        host = PrecoloredGraph.of(host)
    out = [f"p {host.n}"]
    out += [f"e {u} {v}" for u, v in host.graph.edges()]
    out += [f"c {v} {c}" for v, c in host.precolored]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# small named graphs


def path_graph(n: int) -> Graph:
    return graph_from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return graph_from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return graph_from_edges(n, [(u, v) for u in range(n) for v in range(u)])


def empty_graph(n: int) -> Graph:
    return Graph(n, (0,) * n)


def binomial_tree(k: int) -> Graph:
    """B_k rooted at vertex 0: B_{k-1} on 0..2^(k-1)-1 joined root-to-root
    with a shifted copy."""
    edges: list[tuple[int, int]] = []
    size = 1
    for _ in range(k):
        edges += [(u + size, v + size) for u, v in edges] + [(0, size)]
        size *= 2
    return graph_from_edges(size, edges)
