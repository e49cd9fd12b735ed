"""Strategies on the logarithmic-precoloring graph: nodes replace most of
the precolored clique, the gadget part is unchanged."""

from __future__ import annotations

from ..engine import GameState, PainterStrategy
from ..graphcore import ColoredGraph
from ..qdnf import evaluate_qdnf
from ..reduction import ReductionOutput, allowed_color_roles, build_g1, node_identifies
from .g1 import G1Drawer, G1Painter
from .nodes import NodeSchedule


class G2Drawer(NodeSchedule, G1Drawer):
    """All nodes first, then the clique gadget vertices, then the gadget
    schedule of the precolored-clique Drawer."""

    name = "drawer-g2"

    def __init__(self, red: ReductionOutput, check: bool = True):
        super().__init__(red, check)
        self.open_q = None
        N = red.stats["N"]
        kcol = [self.index[("kcol", c)] for c in range(red.stats["k_g1"])]
        self.queue = self.node_items(range(1, N + 1)) + kcol + self.g1_queue()

    def move(self, state):
        self.resolve_node(state)
        self.resolve(state)
        if not self.queue:
            return self.send(self.unrevealed()[0])
        item = self.queue[0]
        if isinstance(item, tuple) and item[0] in ("p1", "q", "rest"):
            self.queue.pop(0)
            return self.send(self.next_node_item(state, item))
        return self.send(self.next_item(state))


class G2Painter(PainterStrategy):
    """Greedy with separate node / gadget palettes until two nonadjacent
    gadget vertices have arrived, then a simulation of the precolored-clique
    Painter on a virtual copy, recognising gadget vertices through the nodes
    that do not see them."""

    name = "painter-g2"
    stateless = False

    def __init__(self, red: ReductionOutput):
        f = red.formula
        if f is None or not evaluate_qdnf(f):
            raise ValueError("painter-g2 needs a true formula")
        self.red = red
        self.g1 = build_g1(f)
        self.inner = G1Painter(self.g1)
        self.N = red.stats["N"]
        self.k1 = red.stats["k_g1"]
        self.ident = node_identifies(self.g1.base_roles)
        self.g1_adj = self.g1.graph.graph.adj
        self.node_pal: list[int] = []
        self.gadget_pal: list[int] = [0]
        self.winning = False
        self.kind: list = []  # per revealed id: ("z",) ("node", i) ("g1",)
        self.bound: dict = {}  # role color -> real color
        self.bound_real: dict[int, object] = {}
        self.reserved: set[int] = set()  # real colors of unresolved greedy vertices
        self.virtual = None  # GameState over the G1 host
        self.vpos: dict[int, int] = {}  # real id -> virtual id
        self.pending_g1: list[int] = []  # greedy-colored, not yet recognised
        self.anomalies: list[str] = []
        self.identity: dict[int, int] = {}  # real id -> G1 id, recognised vertices

    # -- helpers -------------------------------------------------------

    def classify(self, state: GameState, nb: int) -> tuple:
        p = len(state.anchors)
        i = sum(1 << j for j in range(p) if nb >> j & 1)
        return ("node", i) if i else ("g1",)

    def _sync(self, state: GameState) -> None:
        while len(self.kind) < state.revealed:
            v = len(self.kind)
            if v < len(state.anchors):
                self.kind.append(("z",))
            else:
                self.kind.append(self.classify(state, state.graph.adj[v]))

    @staticmethod
    def _smallest(pal: list[int], blocked: set[int], skip=()) -> int | None:
        for c in pal:
            if c not in blocked and c not in skip:
                return c
        return None

    def _fresh(self, state: GameState, pal: list[int]) -> int:
        c = state.used_colors
        pal.append(c)
        return c

    def _recognise(self, adj_to, state: GameState, v: int) -> int | None:
        """G1 host id of gadget vertex ``v`` via a revealed node vertex that
        does not see it (only the identifying node's p3 does that)."""
        for w, kind in enumerate(self.kind):
            if kind[0] == "node" and not adj_to(v, w):
                return self.ident[kind[1] - 1][0]
        return None

    def _virtual_add(self, state: GameState, v: int, h: int, real: int | None, adj_to) -> int | None:
        """Place real vertex ``v`` (G1 id ``h``) in the virtual game; returns
        the real color the simulation asks for."""
        role = self.g1.base_roles[h]
        if role[0] == "kcol":
            rc = self.g1.color_roles[role[1]]
        else:
            vs = self.virtual
            mask = sum(1 << c for c in range(self.k1) if self.g1_adj[h] >> c & 1)
            for w, vw in self.vpos.items():
                if adj_to(v, w):
                    mask |= 1 << vw
            pend = vs.present(mask)
            vc = self.inner.choose(pend)
            if real is not None and not self._consistent(self._role(vc), real):
                vc = self._reconcile(pend, h, real, vc)
            self.virtual = pend.paint(vc)
            self.vpos[v] = vs.revealed
            rc = self._role(vc)
        self.identity[v] = h
        if real is not None:
            if rc not in self.bound and real not in self.bound_real:
                self.bound[rc] = real
                self.bound_real[real] = rc
            elif self.bound.get(rc) != real:
                self.anomalies.append(f"vertex {v}: simulated color {rc} differs from inherited {real}")
            return real
        return self._real_for(state, rc)

    def _role(self, vc: int):
        return self.g1.color_roles[vc] if vc < self.k1 else ("virtual", vc)

    def _consistent(self, rc, real: int) -> bool:
        return self.bound.get(rc, real) == real and self.bound_real.get(real, rc) == rc

    def _reconcile(self, pend: GameState, h: int, real: int, vc: int) -> int:
        """A vertex colored before it could be recognised: pick a simulated
        color it is allowed that agrees with the color it already has."""
        blocked = pend.neighbor_colors()
        for c in range(self.k1):
            if self.g1_adj[h] >> c & 1 or c in blocked:
                continue
            if self._consistent(self._role(c), real):
                return c
        return vc

    def _real_for(self, state: GameState, rc) -> int:
        blocked = state.neighbor_colors()
        c = self.bound.get(rc)
        if c is not None:
            if c in blocked:
                self.anomalies.append(f"bound color {c} for {rc} is blocked")
                alt = self._smallest(self.gadget_pal, blocked, set(self.bound_real) | self.reserved)
                return alt if alt is not None else self._fresh(state, self.gadget_pal)
            return c
        c = self._guess_reserved(state, rc, blocked)
        if c is None:
            c = self._smallest(self.gadget_pal, blocked, set(self.bound_real) | self.reserved)
        if c is None:
            # an inherited color is cheaper than a new one; prefer a vertex
            # that could end up with this color anyway
            c = self._smallest(self.gadget_pal, blocked, set(self.bound_real) | self._incompatible(state, rc))
        if c is None:
            c = self._smallest(self.gadget_pal, blocked, set(self.bound_real))
        if c is None:
            c = self._fresh(state, self.gadget_pal)
        self.bound[rc] = c
        self.bound_real[c] = rc
        return c

    def _candidates(self, state: GameState, w: int) -> set[int]:
        """G1 ids an unrecognised gadget vertex can still be."""
        g = state.graph
        adj1 = self.g1_adj
        out = set(range(self.N)) - set(self.identity.values())
        for y, hy in self.identity.items():
            if self.g1.base_roles[hy][0] in ("x_it", "x_if") or y >= g.n:
                continue
            near = bool(g.adj[max(w, y)] >> min(w, y) & 1)
            out = {h for h in out if bool(adj1[h] >> hy & 1) == near}
        full: dict[int, int] = {}
        for v, kind in enumerate(self.kind):
            if kind[0] == "node":
                full[kind[1]] = full.get(kind[1], 0) + 1
        for i, cnt in full.items():
            if cnt == 3:
                out -= set(self.ident[i - 1])
        return out

    def _can_take(self, h: int, rc) -> bool:
        role = self.g1.base_roles[h]
        if role[0] == "kcol":
            return self.g1.color_roles[role[1]] == rc
        return rc in allowed_color_roles(role, self.g1.formula)

    def _incompatible(self, state: GameState, rc) -> set[int]:
        """Inherited colors whose vertex might end up needing another color."""
        out = set()
        for w in self.pending_g1:
            if not all(self._can_take(h, rc) for h in self._candidates(state, w)):
                out.add(state.graph.colors[w])
        return out

    def _guess_reserved(self, state: GameState, rc, blocked: set[int]) -> int | None:
        """Reuse the color of an unrecognised greedy vertex that can only be
        the clique vertex of ``rc``."""
        if rc[0] == "virtual":
            return None
        c_id = next(c for c, r in self.g1.color_roles.items() if r == rc)
        kv = self.g1.vertex_of(("kcol", c_id))
        g = state.graph
        for w in self.pending_g1:
            cw = g.colors[w]
            if cw in blocked or cw in self.bound_real:
                continue
            if self._candidates(state, w) == {kv}:
                return cw
        return None

    def _start_winning(self, state: GameState) -> None:
        self.winning = True
        g1 = self.g1.graph
        anchors = list(range(self.k1))
        adj = tuple(sum(1 << w for w in anchors if g1.graph.has_edge(v, w)) for v in anchors)
        self.virtual = GameState(ColoredGraph(adj, tuple(anchors), tuple(anchors)), self.k1)
        g = state.graph
        adj_to = lambda a, b: bool(g.adj[a] >> b & 1)
        for v, kind in enumerate(self.kind):
            if kind[0] != "g1":
                continue
            h = self._recognise(adj_to, state, v)
            if h is None:
                self.pending_g1.append(v)
                self.reserved.add(g.colors[v])
            else:
                self._virtual_add(state, v, h, g.colors[v], adj_to)

    # -- the move -----------------------------------------------------------

    def choose(self, state: GameState) -> int:
        self._sync(state)
        g = state.graph
        u = g.n
        nb = state.pending
        kind = self.classify(state, nb)
        blocked = state.neighbor_colors()
        if not self.winning:
            if kind[0] == "node":
                c = self._smallest(self.node_pal, blocked)
                return c if c is not None else self._fresh(state, self.node_pal)
            gadget = [v for v, k in enumerate(self.kind) if k[0] == "g1"]
            if all(nb >> v & 1 for v in gadget) and all(
                g.adj[a] >> b & 1 for i, a in enumerate(gadget) for b in gadget[:i]
            ):
                c = self._smallest(self.gadget_pal, blocked)
                return c if c is not None else self._fresh(state, self.gadget_pal)
            self._start_winning(state)

        def adj_to(a: int, b: int) -> bool:
            if a == u:
                return bool(nb >> b & 1)
            if b == u:
                return bool(nb >> a & 1)
            return bool(g.adj[a] >> b & 1)

        gadget_colors = {g.colors[v] for v, k in enumerate(self.kind) if k[0] == "g1"}
        if kind[0] == "g1":
            h = self._recognise(adj_to, state, u)
            if h is not None:
                return self._virtual_add(state, u, h, None, adj_to)
            c = self._smallest(self.node_pal, blocked, gadget_colors)
            return c if c is not None else self._fresh(state, self.node_pal)
        # a node vertex: first claim a color saved on a gadget vertex it misses
        node_colors = {g.colors[v] for v, k in enumerate(self.kind) if k[0] == "node"}
        choice = None
        for v, k in enumerate(self.kind):
            c = g.colors[v]
            if k[0] == "g1" and not adj_to(u, v) and c in self.node_pal and c not in node_colors and c not in blocked:
                choice = c
                break
        if choice is None:
            choice = self._smallest(self.node_pal, blocked)
            if choice is None:
                choice = self._fresh(state, self.node_pal)
        # greedy-phase gadget vertices this node recognises join the simulation
        for v in list(self.pending_g1):
            if not adj_to(u, v):
                self.pending_g1.remove(v)
                self.reserved.discard(g.colors[v])
                self._virtual_add(state, v, self.ident[kind[1] - 1][0], g.colors[v], adj_to)
        return choice
