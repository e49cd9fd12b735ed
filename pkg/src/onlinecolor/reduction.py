"""Hardness gadgets: quantified 3-DNF formula -> G1 (large precolored
clique) -> G2 (logarithmic precoloring via nodes) -> G3 (no precoloring,
one supernode per removed precolored vertex)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .graphcore import GraphError, PrecoloredGraph, bits, graph_from_edges
from .qdnf import FORALL, QdnfFormula

Role = tuple


@dataclass(frozen=True)
class Block:
    """``size`` consecutive vertex ids starting at ``start``, all of one
    supernode part."""

    iteration: int
    part: str  # "A", "B" or "C"
    start: int
    size: int


@dataclass
class ReductionOutput:
    graph: "PrecoloredGraph | StackedGraph"
    k: int
    base_roles: list[Role]
    color_roles: dict[int, Role]
    stats: dict
    blocks: list[Block] = field(default_factory=list)
    color_blocks: list[tuple[int, int, int]] = field(default_factory=list)  # (iteration, start, count)
    formula: QdnfFormula | None = None

    @property
    def n(self) -> int:
        return self.graph.n

    def vertex_role(self, v: int) -> Role:
        if v < len(self.base_roles):
            return self.base_roles[v]
        for b in self.blocks:
            if b.start <= v < b.start + b.size:
                return (f"supernode_{b.part}", b.iteration, v - b.start)
        raise IndexError(v)

    @property
    def vertex_roles(self) -> list[Role]:
        return [self.vertex_role(v) for v in range(self.n)]

    def vertex_of(self, role: Role) -> int:
        if role[0].startswith("supernode_"):
            part = role[0][-1]
            for b in self.blocks:
                if b.iteration == role[1] and b.part == part:
                    return b.start + role[2]
            raise KeyError(role)
        return self._index()[role]

    def _index(self) -> dict[Role, int]:
        idx = getattr(self, "_role_index", None)
        if idx is None:
            idx = {r: v for v, r in enumerate(self.base_roles)}
            self._role_index = idx
        return idx

    def color_of(self, role: Role) -> int:
        if role[0] == "supernode_color":
            for it, start, count in self.color_blocks:
                if it == role[1]:
                    return start + role[2]
            raise KeyError(role)
        for c, r in self.color_roles.items():
            if r == role:
                return c
        raise KeyError(role)

    def color_role(self, c: int) -> Role:
        if c in self.color_roles:
            return self.color_roles[c]
        for it, start, count in self.color_blocks:
            if start <= c < start + count:
                return ("supernode_color", it, c - start)
        raise KeyError(c)

    def sidecar(self) -> dict:
        return {
            "color_roles": {str(c): list(r) for c, r in sorted(self.color_roles.items())},
            "k": self.k,
            "stats": self.stats,
            "supernode_blocks": [
                {"iteration": b.iteration, "part": b.part, "size": b.size, "start": b.start} for b in self.blocks
            ],
            "supernode_colors": [{"count": n, "iteration": it, "start": s} for it, s, n in self.color_blocks],
            "vertex_roles": [list(r) for r in self.base_roles],
        }

    def sidecar_json(self) -> str:
        return json.dumps(self.sidecar(), sort_keys=True, indent=1) + "\n"


# ---------------------------------------------------------------------------
# G1


def g1_color_roles(f: QdnfFormula) -> list[Role]:
    roles: list[Role] = []
    for v, q in f.prefix:
        if q == FORALL:
            roles += [("set", v), ("unset", v)]
        else:
            roles += [("set_t", v), ("set_f", v), ("unset", v)]
    for a in range(1, f.m + 1):
        roles += [("f", a), ("false", a)]
    return roles


def allowed_color_roles(role: Role, f: QdnfFormula) -> frozenset[Role]:
    """Colors a G1 gadget vertex may take (the K_col colors it is not joined to)."""
    tag = role[0]
    if tag in ("x_it", "x_if"):
        return frozenset({("set", role[1]), ("unset", role[1])})
    if tag == "x_jt":
        return frozenset({("set_t", role[1]), ("unset", role[1])})
    if tag == "x_jf":
        return frozenset({("set_f", role[1]), ("unset", role[1])})
    if tag == "x_jh":
        return frozenset({("set_t", role[1]), ("set_f", role[1])})
    if tag == "l":
        return frozenset({("f", role[1]), ("unset", role[3])})
    if tag == "d":
        return frozenset({("f", role[1]), ("false", role[1])})
    if tag == "F":
        return frozenset(("false", a) for a in range(1, f.m + 1))
    raise ValueError(f"no allowed colors for role {role}")


def build_g1(f: QdnfFormula) -> ReductionOutput:
    croles = g1_color_roles(f)
    k = len(croles)
    color_id = {r: c for c, r in enumerate(croles)}
    roles: list[Role] = [("kcol", c) for c in range(k)]
    for v, q in f.prefix:
        roles += [("x_it", v), ("x_if", v)] if q == FORALL else [("x_jt", v), ("x_jf", v), ("x_jh", v)]
    for a, clause in enumerate(f.clauses, 1):
        roles += [("l", a, pos, var, sign) for pos, (var, sign) in enumerate(clause)]
        roles.append(("d", a))
    roles.append(("F",))
    vid = {r: i for i, r in enumerate(roles)}
    edges: set[tuple[int, int]] = set()

    def join(u: int, w: int) -> None:
        edges.add((min(u, w), max(u, w)))

    for c in range(k):
        for c2 in range(c):
            join(c, c2)
    for v, r in enumerate(roles[k:], k):
        allowed = {color_id[x] for x in allowed_color_roles(r, f)}
        for c in range(k):
            if c not in allowed:
                join(v, c)

    order = f.variables
    universal = [v for v, q in f.prefix if q == FORALL]

    def earlier_forall_t(var: int) -> list[int]:
        pos = order.index(var)
        return [vid[("x_it", u)] for u in universal if order.index(u) < pos]

    for var, q in f.prefix:
        if q == FORALL:
            t, fv = vid[("x_it", var)], vid[("x_if", var)]
            join(t, fv)
            members = [t, fv]
        else:
            members = [vid[("x_jt", var)], vid[("x_jf", var)], vid[("x_jh", var)]]
            for i in range(3):
                for j in range(i):
                    join(members[i], members[j])
        for x in members:
            for y in earlier_forall_t(var):
                join(x, y)
    all_forall_t = [vid[("x_it", u)] for u in universal]
    F = vid[("F",)]
    for a, clause in enumerate(f.clauses, 1):
        d = vid[("d", a)]
        join(F, d)
        for y in all_forall_t:
            join(d, y)
        for pos, (var, sign) in enumerate(clause):
            l = vid[("l", a, pos, var, sign)]
            join(d, l)
            if f.quantifier(var) == FORALL:
                join(l, vid[("x_it" if sign else "x_if", var)])
            else:
                join(l, vid[("x_jt" if sign else "x_jf", var)])
            for u in universal:
                if u != var:
                    join(l, vid[("x_it", u)])
    for y in all_forall_t:
        join(F, y)
    g = graph_from_edges(len(roles), sorted(edges))
    host = PrecoloredGraph.of(g, {c: c for c in range(k)})
    return ReductionOutput(
        graph=host,
        k=k,
        base_roles=roles,
        color_roles=dict(enumerate(croles)),
        stats={"stage": "g1", "N": len(roles), "n_vertices": len(roles), "k": k},
        formula=f,
    )


# ---------------------------------------------------------------------------
# G2


def node_identifies(g1_roles: Sequence[Role]) -> list[list[int]]:
    """``result[i-1]`` lists the G1 vertex ids identified by node ``i``."""
    partner: dict[int, int] = {}
    index = {r: v for v, r in enumerate(g1_roles)}
    for v, r in enumerate(g1_roles):
        if r[0] == "x_it":
            partner[v] = index[("x_if", r[1])]
        elif r[0] == "x_if":
            partner[v] = index[("x_it", r[1])]
    return [[v] + ([partner[v]] if v in partner else []) for v in range(len(g1_roles))]


def precolor_count(N: int) -> int:
    """Bits needed so that every 1-based node index up to ``N`` is nonzero;
    equals ceil(log2 N) unless N is a power of two."""
    return N.bit_length()


def build_g2(f: QdnfFormula) -> ReductionOutput:
    g1 = build_g1(f)
    N = g1.n
    p = precolor_count(N)
    k = g1.k
    roles = list(g1.base_roles)
    node_base = N
    for i in range(1, N + 1):
        roles += [("node_p1", i), ("node_p2", i), ("node_p3", i)]
    z_base = len(roles)
    roles += [("z", j) for j in range(1, p + 1)]
    edges = list(g1.graph.graph.edges())

    def node(i: int) -> list[int]:
        b = node_base + 3 * (i - 1)
        return [b, b + 1, b + 2]

    for i in range(1, N + 1):
        p1, p2, p3 = node(i)
        edges.append((p2, p3))
        for j in range(1, i):
            edges += [(x, y) for x in node(i) for y in node(j)]
        for j in range(1, p + 1):
            if i >> (j - 1) & 1:
                edges += [(x, z_base + j - 1) for x in node(i)]
    ident = node_identifies(g1.base_roles)
    for i in range(1, N + 1):
        p1, p2, p3 = node(i)
        mine = set(ident[i - 1])
        for v in range(N):
            edges += [(v, p1), (v, p2)]
            if v not in mine:
                edges.append((v, p3))
    g = graph_from_edges(len(roles), edges)
    host = PrecoloredGraph.of(g, {z_base + j: 0 for j in range(p)})
    color_roles = dict(g1.color_roles)
    for idx in range(2 * N):
        color_roles[k + idx] = ("node_color", idx)
    k2 = 2 * N + k
    return ReductionOutput(
        graph=host,
        k=k2,
        base_roles=roles,
        color_roles=color_roles,
        stats={"stage": "g2", "N": N, "p": p, "k_g1": k, "k": k2, "n_vertices": len(roles)},
        formula=f,
    )


# ---------------------------------------------------------------------------
# removing a precolored vertex


def split_d_e(host: PrecoloredGraph, v_p: int) -> tuple[list[int], list[int]]:
    pm = host.precolored_mask
    d, e = [], []
    for v in range(host.n):
        if v == v_p or pm >> v & 1:
            continue
        (e if host.graph.has_edge(v, v_p) else d).append(v)
    return d, e


def remove_precolored_vertex(g: ReductionOutput, v_p: int, iteration: int | None = None) -> ReductionOutput:
    host = g.graph
    if not isinstance(host, PrecoloredGraph):
        raise TypeError("remove_precolored_vertex needs a materialised graph")
    pre = host.coloring
    if v_p not in pre:
        raise ValueError(f"vertex {v_p} is not precolored")
    if iteration is None:
        iteration = 1 + max((b.iteration for b in g.blocks), default=0)
    D, E = split_d_e(host, v_p)
    N = len(D) + len(E)
    S = 8 * N
    keep = [v for v in range(host.n) if v != v_p]
    new_id = {v: i for i, v in enumerate(keep)}
    base = len(keep)
    A = range(base, base + S)
    B = range(base + S, base + 2 * S)
    C = range(base + 2 * S, base + 3 * S)
    edges = [(new_id[u], new_id[v]) for u, v in host.graph.edges() if v_p not in (u, v)]
    for clique in (A, range(B.start, C.stop)):
        edges += [(x, y) for x in clique for y in clique if x < y]
    for v in E:
        edges += [(new_id[v], x) for x in range(A.start, C.stop)]
    for v in D:
        edges += [(new_id[v], x) for x in range(A.start, B.stop)]
    graph = graph_from_edges(base + 3 * S, edges)
    out_host = PrecoloredGraph.of(graph, {new_id[v]: c for v, c in pre.items() if v != v_p})

    old_roles = g.vertex_roles
    base_roles = [old_roles[v] for v in keep]
    # earlier supernode blocks get renumbered into the explicit role list
    blocks = [Block(iteration, part, base + i * S, S) for i, part in enumerate("ABC")]
    next_color = max(list(g.color_roles) + [s + n - 1 for _, s, n in g.color_blocks] + [g.k - 1]) + 1
    stats = {
        "stage": "g'",
        "N": N,
        "S": S,
        "D": len(D),
        "E": len(E),
        "iteration": iteration,
        "v_p": v_p,
        "k": g.k + 2 * S,
        "n_vertices": graph.n,
        "n_vertices_before": host.n,
        "size_bound": 25 * host.n,
    }
    return ReductionOutput(
        graph=out_host,
        k=g.k + 2 * S,
        base_roles=base_roles,
        color_roles=dict(g.color_roles),
        stats=stats,
        blocks=blocks,
        color_blocks=list(g.color_blocks) + [(iteration, next_color, 2 * S)],
        formula=g.formula,
    )


# ---------------------------------------------------------------------------
# G3 without materialising the supernodes


@dataclass
class _Step:
    iteration: int
    z: int  # base id of the removed precolored vertex
    S: int
    start: int  # first id of this step's A block


class StackedGraph:
    """G2 with all precolored vertices removed by stacked supernodes.

    Only the G2 part is stored explicitly; supernode adjacency follows from
    the block rules, so graphs far beyond memory can be queried."""

    def __init__(self, base: PrecoloredGraph, steps: list[_Step]):
        self.base = base
        self.steps = steps
        self.removed = {s.z for s in steps}
        self.keep = [v for v in range(base.n) if v not in self.removed]
        self.base_count = len(self.keep)
        self._base_id = {v: i for i, v in enumerate(self.keep)}
        self.n = self.base_count + sum(3 * s.S for s in steps)
        self._pre = {v for v in base.coloring if v not in self.removed}

    @property
    def precolored(self) -> tuple:
        pre = self.base.coloring
        return tuple((self._base_id[v], c) for v, c in sorted(pre.items()) if v not in self.removed)

    def locate(self, v: int) -> tuple:
        """('base', base id) or ('block', step index, part)."""
        if not 0 <= v < self.n:
            raise IndexError(v)
        if v < self.base_count:
            return ("base", self.keep[v])
        for i, s in enumerate(self.steps):
            if s.start <= v < s.start + 3 * s.S:
                return ("block", i, "ABC"[(v - s.start) // s.S])
        raise IndexError(v)

    def _base_joins(self, w: int, i: int, part: str) -> bool:
        if w in self._pre:
            return False
        in_e = self.base.graph.has_edge(w, self.steps[i].z)
        return in_e or part in "AB"

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        a, b = self.locate(u), self.locate(v)
        if a[0] == "base" and b[0] == "base":
            return self.base.graph.has_edge(a[1], b[1])
        if a[0] == "base":
            a, b = b, a
        if b[0] == "base":
            return self._base_joins(b[1], a[1], a[2])
        if a[1] == b[1]:
            return a[2] == b[2] or {a[2], b[2]} == {"B", "C"}
        # the earlier block lies in D of the later step
        later = a if a[1] > b[1] else b
        return later[2] in "AB"

    def degree(self, v: int) -> int:
        loc = self.locate(v)
        if loc[0] == "base":
            w = loc[1]
            deg = sum(1 for x in bits(self.base.graph.adj[w]) if x not in self.removed)
            if w in self._pre:
                return deg
            for i, s in enumerate(self.steps):
                deg += 3 * s.S if self.base.graph.has_edge(w, s.z) else 2 * s.S
            return deg
        i, part = loc[1], loc[2]
        s = self.steps[i]
        deg = s.S - 1 + (s.S if part in "BC" else 0)
        # base vertices and earlier blocks
        deg += sum(1 for w in self.keep if self._base_joins(w, i, part))
        if part in "AB":
            deg += sum(3 * t.S for t in self.steps[:i])
        # later blocks see this one as D
        deg += sum(2 * t.S for t in self.steps[i + 1 :])
        return deg

    @property
    def num_edges(self) -> int:
        return sum(self.degree_counts()) // 2

    def degree_counts(self) -> Iterator[int]:
        for v in range(self.base_count):
            yield self.degree(v)
        for i, s in enumerate(self.steps):
            for j, part in enumerate("ABC"):
                yield self.degree(s.start + j * s.S) * s.S

    def materialize(self, max_vertices: int = 4000) -> PrecoloredGraph:
        if self.n > max_vertices:
            raise GraphError(f"refusing to materialise {self.n} vertices (limit {max_vertices})")
        edges = [(u, v) for u in range(self.n) for v in range(u) if self.has_edge(u, v)]
        return PrecoloredGraph.of(graph_from_edges(self.n, edges), dict(self.precolored))


def stack_removals(g: ReductionOutput, order: Sequence[int]) -> ReductionOutput:
    """Remove the precolored vertices ``order`` (ids of ``g``) one after
    another, recording the supernodes structurally."""
    base = g.graph
    if not isinstance(base, PrecoloredGraph):
        raise TypeError("stack_removals starts from a materialised graph")
    pre = base.coloring
    n_free = len(base.free_vertices())
    steps: list[_Step] = []
    keep_count = base.n - len(order)
    start = keep_count
    k = g.k
    iterations = []
    n_now = base.n
    for it, z in enumerate(order, 1):
        if z not in pre:
            raise ValueError(f"vertex {z} is not precolored")
        # free vertices of the current graph: base free vertices + all blocks
        N = n_free + sum(3 * s.S for s in steps)
        S = 8 * N
        steps.append(_Step(it, z, S, start))
        start += 3 * S
        k += 2 * S
        n_next = n_now - 1 + 3 * S
        iterations.append({"iteration": it, "z": z, "N": N, "S": S, "n_before": n_now, "n_after": n_next})
        n_now = n_next
    sg = StackedGraph(base, steps)
    keep = sg.keep
    base_roles = [g.vertex_roles[v] for v in keep]
    blocks = []
    color_blocks = list(g.color_blocks)
    next_color = max(list(g.color_roles) + [g.k - 1]) + 1
    for s in steps:
        blocks += [Block(s.iteration, part, s.start + j * s.S, s.S) for j, part in enumerate("ABC")]
        color_blocks.append((s.iteration, next_color, 2 * s.S))
        next_color += 2 * s.S
    stats = dict(g.stats)
    stats.update(stage="g3", iterations=iterations, k=k, n_vertices=sg.n, removed=len(order))
    return ReductionOutput(
        graph=sg,
        k=k,
        base_roles=base_roles,
        color_roles=dict(g.color_roles),
        stats=stats,
        blocks=blocks,
        color_blocks=color_blocks,
        formula=g.formula,
    )


def build_g3(f: QdnfFormula) -> ReductionOutput:
    g2 = build_g2(f)
    zs = sorted((g2.vertex_of(("z", j)) for j in range(1, g2.stats["p"] + 1)), reverse=True)
    out = stack_removals(g2, zs)
    out.stats["k_g2"] = g2.k
    return out


def g3_size_recurrence(n0: int, free0: int, removals: int) -> list[int]:
    """Vertex counts n_0, n_1, ... with n_i = n_{i-1} - 1 + 24 N_i, where N_i
    is the non-precolored count entering iteration i."""
    sizes = [n0]
    free = free0
    for _ in range(removals):
        sizes.append(sizes[-1] - 1 + 24 * free)
        free += 24 * free
    return sizes


def joined_nodes(m: int) -> ReductionOutput:
    """``m`` nodes (p1, p2, p3 with edge p2-p3), every pair of nodes joined
    completely; the node part of G2 on its own."""
    if m < 1:
        raise ValueError("need at least one node")
    roles: list[Role] = []
    for i in range(1, m + 1):
        roles += [("node_p1", i), ("node_p2", i), ("node_p3", i)]
    edges = []
    for i in range(m):
        b = 3 * i
        edges.append((b + 1, b + 2))
        for j in range(i):
            edges += [(b + x, 3 * j + y) for x in range(3) for y in range(3)]
    g = graph_from_edges(3 * m, edges)
    return ReductionOutput(
        graph=PrecoloredGraph.of(g),
        k=2 * m,
        base_roles=roles,
        color_roles={},
        stats={"stage": "nodes", "nodes": m, "n_vertices": 3 * m, "k": 2 * m},
    )


def wrap_host(host: PrecoloredGraph, k: int | None = None) -> ReductionOutput:
    """Role tables for a plain input graph: every vertex is ("v", id)."""
    return ReductionOutput(
        graph=host,
        k=k if k is not None else 0,
        base_roles=[("v", v) for v in range(host.n)],
        color_roles={},
        stats={"stage": "input", "n_vertices": host.n, "k": k},
    )
