"""Strategies on a graph where one precolored vertex was replaced by a
supernode (cliques A, B, C of size S, B and C joined, E seeing all three,
D seeing A and B)."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..engine import DrawerStrategy, GameState, PainterStrategy, initial_state
from ..graphcore import PrecoloredGraph, bits, max_clique, popcount
from ..reduction import ReductionOutput
from .basic import LazyDrawer
from .g1 import RecognitionError


def _gid(x: int, v_p: int) -> int:
    """Pre-removal id of a kept vertex."""
    return x if x < v_p else x + 1


@dataclass
class PaletteLedger:
    """Colors reserved for the supernode side (C), for the simulated graph
    (E), and the surely-D clique exception (S).  Unrealised colors are
    negative placeholders until they are first painted."""

    C: set = field(default_factory=set)
    E: set = field(default_factory=set)
    S: set = field(default_factory=set)
    violations: list = field(default_factory=list)

    def check(self, rnd: int) -> None:
        both = self.C & self.E
        if both:
            self.violations.append((rnd, f"colors {sorted(both)} are in both palettes"))
        if not self.S <= self.E:
            self.violations.append((rnd, "S is not contained in E"))

    def rename(self, old: int, new: int) -> None:
        for s in (self.C, self.E, self.S):
            if old in s:
                s.discard(old)
                s.add(new)


@dataclass
class RecognitionState:
    K_A: int = 0  # bitmasks over revealed ids
    K_BC: int = 0
    d1: int = -1
    d2: int = -1
    kind: dict = field(default_factory=dict)  # id -> "A" "B" "C" "E" "D" or "AD"
    virtual: GameState | None = None
    vpos: dict = field(default_factory=dict)  # revealed id -> virtual id

    @property
    def surely_D(self) -> set[int]:
        return {v for v, k in self.kind.items() if k == "D"}

    @property
    def K_D(self) -> set[int]:
        return {v for v, k in self.kind.items() if k == "AD"}


class GPrimePainter(PainterStrategy):
    """Greedy until the supernode can be told apart, then the inner
    strategy on a virtual copy of the pre-removal graph."""

    name = "painter-gprime"
    stateless = False

    def __init__(self, red: ReductionOutput, inner: PainterStrategy, base: PrecoloredGraph):
        if not isinstance(red.graph, PrecoloredGraph) or "v_p" not in red.stats:
            raise ValueError("painter-gprime needs the output of a single removal")
        self.host = red.graph
        self.base = base
        self.inner = inner.fork()
        self.N = red.stats["N"]
        self.S = red.stats["S"]
        self.v_p = red.stats["v_p"]
        self.stopped = False
        self.rec = RecognitionState()
        self.ledger = PaletteLedger()
        self.vmap: dict[int, int] = {}  # token -> virtual color
        self.vinv: dict[int, int] = {}
        self._next_token = -1
        self.anomalies: list[str] = []
        self.rounds = 0
        # virtual anchor for each real anchor, and for the removed vertex
        vidx = {h: i for i, h in enumerate(base.anchors)}
        self.anchor_virtual = [vidx[_gid(x, self.v_p)] for x in self.host.anchors]
        self.vp_virtual = vidx[self.v_p]

    # -- colors ----------------------------------------------------------

    def _token(self) -> int:
        t = self._next_token
        self._next_token -= 1
        return t

    def _realize(self, tok: int, state: GameState) -> int:
        if tok >= 0:
            return tok
        real = state.used_colors
        self.ledger.rename(tok, real)
        if tok in self.vmap:
            vc = self.vmap.pop(tok)
            self.vmap[real] = vc
            self.vinv[vc] = real
        return real

    def _anchor_colors(self, state: GameState) -> set[int]:
        return set(state.colors[: len(state.anchors)])

    def _first_fit(self, state: GameState) -> int:
        blocked = state.neighbor_colors() | self._anchor_colors(state)
        return next(c for c in range(state.used_colors + 1) if c not in blocked)

    # -- revealed graph helpers ---------------------------------------

    def _adj(self, state: GameState) -> list[int]:
        g = state.graph
        nb = state.pending
        n = g.n
        am = (1 << len(state.anchors)) - 1
        adj = [(g.adj[v] & ~am) | ((nb >> v & 1) << n) for v in range(n)]
        adj.append(nb & ~am)
        return adj

    def _pu(self, adj, v: int, X: int) -> bool:
        return popcount(X & ~(1 << v) & ~adj[v]) <= self.N

    def _pi(self, adj, v: int, X: int) -> bool:
        return popcount(X & adj[v]) <= self.N

    # -- WaitForD ------------------------------------------------------

    def _wait_test(self, state: GameState, adj: list[int]):
        a = len(state.anchors)
        R = ((1 << len(adj)) - 1) & ~((1 << a) - 1)
        if popcount(R) < self.S - self.N:
            return None
        K1 = max_clique(adj, R)
        K2 = max_clique(adj, R, restrict=K1, restrict_limit=self.N)
        if 2 * popcount(K2) < self.S:
            return None
        for K, other in ((K1, K2), (K2, K1)):
            loose = [v for v in bits(R) if not self._pu(adj, v, K)]
            for i, x in enumerate(loose):
                for y in loose[:i]:
                    if not adj[x] >> y & 1:
                        return K, other, y, x
        return None

    # -- recognition ---------------------------------------------------

    def _classify(self, adj, v: int) -> str:
        r = self.rec
        ubc = self._pu(adj, v, r.K_BC)
        ua = self._pu(adj, v, r.K_A)
        if ubc and ua:
            return "E"
        if ubc and self._pi(adj, v, r.K_A):
            return "B" if adj[v] >> r.d1 & 1 else "C"
        if not ubc and ua:
            return "AD"
        raise RecognitionError(
            f"vertex {v} fits no rule: |K_A|={popcount(r.K_A)} |K_BC|={popcount(r.K_BC)} "
            f"missing from K_BC={popcount(r.K_BC & ~adj[v])} in K_A={popcount(r.K_A & adj[v])}"
        )

    def _refine(self, adj, kinds: dict) -> list[int]:
        """Promote A-or-D vertices that are now surely in D; returns them."""
        promoted = []
        changed = True
        while changed:
            changed = False
            amb = [v for v, k in kinds.items() if k == "AD"]
            E = [v for v, k in kinds.items() if k == "E"]
            B = [v for v, k in kinds.items() if k == "B"]
            for v in amb:
                if (
                    any(w != v and not adj[v] >> w & 1 for w in amb)
                    or any(not adj[v] >> w & 1 for w in E)
                    or any(adj[v] >> w & 1 for w in B)
                ):
                    kinds[v] = "D"
                    promoted.append(v)
                    changed = True
        return sorted(promoted)

    # -- the virtual game ------------------------------------------------

    def _vmask(self, state: GameState, adj, v: int) -> int:
        g = state.graph
        nbr = state.pending if v == g.n else g.adj[v]
        m = 0
        for i, vi in enumerate(self.anchor_virtual):
            if nbr >> i & 1:
                m |= 1 << vi
        if self.rec.kind.get(v) == "E":
            m |= 1 << self.vp_virtual
        for w, vw in self.rec.vpos.items():
            if adj[v] >> w & 1:
                m |= 1 << vw
        return m

    def _vpaint(self, v: int, mask: int, vcolor: int) -> None:
        vs = self.rec.virtual
        self.rec.vpos[v] = vs.revealed
        self.rec.virtual = vs.present(mask).paint(vcolor)

    def _vcolor_for(self, tok: int) -> int:
        vc = self.vmap.get(tok)
        if vc is None:
            vc = self.rec.virtual.used_colors
            self.vmap[tok] = vc
            self.vinv[vc] = tok
        return vc

    def _vinherit(self, state, adj, v: int, tok: int) -> bool:
        """Copy ``v`` into the virtual graph keeping color ``tok``; False
        when that would clash there."""
        mask = self._vmask(state, adj, v)
        vc = self.vmap.get(tok)
        if vc is not None and vc in self.rec.virtual.neighbor_colors(mask):
            return False
        self._vpaint(v, mask, self._vcolor_for(tok))
        return True

    def _vnew(self, state, adj, v: int) -> int:
        tok = self._token()
        self._vpaint(v, self._vmask(state, adj, v), self._vcolor_for(tok))
        self.ledger.E.add(tok)
        return tok

    def _vsimulate(self, state, adj, v: int) -> int:
        mask = self._vmask(state, adj, v)
        pend = self.rec.virtual.present(mask)
        vc = self.inner.choose(pend)
        self.rec.vpos[v] = pend.revealed
        self.rec.virtual = pend.paint(vc)
        tok = self.vinv.get(vc)
        if tok is None:
            tok = self._token()
            self.vmap[tok] = vc
            self.vinv[vc] = tok
        self.ledger.E.add(tok)
        return tok

    # -- InitSimulation --------------------------------------------------

    def _init(self, state: GameState, adj, stop) -> None:
        self.stopped = True
        r = self.rec
        r.K_BC, r.K_A, r.d1, r.d2 = stop
        g = state.graph
        a = len(state.anchors)
        colored = range(a, g.n)
        for v in colored:
            r.kind[v] = self._classify(adj, v)
        self._refine(adj, r.kind)
        col = g.colors
        by = lambda k: [v for v in colored if r.kind[v] == k]
        sd, et, ct = by("D"), by("E"), by("C")
        led = self.ledger
        if all(adj[x] >> y & 1 for i, x in enumerate(sd) for y in sd[:i]):
            led.S = {col[v] for v in sd} - {col[v] for v in ct}
        e_cols = {col[v] for v in et}
        led.C = {col[v] for v in colored if r.kind[v] in ("A", "B", "C", "AD", "D")} - led.S - e_cols
        anchors = self._anchor_colors(state)
        led.E = e_cols | led.S | anchors
        r.virtual = initial_state(self.base)
        for i, vi in enumerate(self.anchor_virtual):
            self.vmap[col[i]] = r.virtual.colors[vi]
            self.vinv[r.virtual.colors[vi]] = col[i]
        for v in et:
            if not self._vinherit(state, adj, v, col[v]):
                self.anomalies.append(f"E vertex {v} clashes in the virtual graph")
                self._vnew(state, adj, v)
        for v in sd:
            if col[v] in led.S and self._vinherit(state, adj, v, col[v]):
                continue
            self._vsimulate(state, adj, v)

    # -- ColorBySimulation -----------------------------------------------

    def _simulate(self, state: GameState, adj) -> int:
        r = self.rec
        g = state.graph
        u = g.n
        col = g.colors
        led = self.ledger
        kinds = dict(r.kind)
        kinds[u] = self._classify(adj, u)
        before = {v for v, k in r.kind.items() if k == "AD"}
        self._refine(adj, kinds)
        r.kind = kinds
        c_used = {col[v] for v, k in kinds.items() if k == "C" and v != u}
        for w in sorted(v for v in before if kinds[v] == "D"):
            c = col[w]
            if c not in c_used and self._vinherit(state, adj, w, c):
                led.C.discard(c)
                led.E.add(c)
            else:
                self._vnew(state, adj, w)
        blocked = state.neighbor_colors()
        kind = kinds[u]
        if kind in ("E", "D"):
            tok = self._vsimulate(state, adj, u)
            if tok >= 0 and tok in blocked:
                self.anomalies.append(f"simulated color {tok} for {u} clashes")
                tok = self._token()
                led.E.add(tok)
            return self._realize(tok, state)
        pal = sorted(t for t in led.C if t not in blocked)
        if kind == "C":
            sd_cols = {col[v] for v, k in kinds.items() if k == "D" and v != u}
            pref = [t for t in pal if t in sd_cols]
            if pref:
                return pref[0]
        if pal:
            return pal[0]
        tok = self._token()
        led.C.add(tok)
        return self._realize(tok, state)

    def choose(self, state: GameState) -> int:
        self.rounds += 1
        adj = self._adj(state)
        if not self.stopped:
            stop = self._wait_test(state, adj)
            if stop is None:
                return self._first_fit(state)
            self._init(state, adj, stop)
        c = self._simulate(state, adj)
        self.ledger.check(self.rounds)
        return c


class GPrimeDrawer(LazyDrawer):
    """A first, then B and C so that no color of A reaches B, then the
    inner Drawer on the remaining D and E vertices."""

    name = "drawer-gprime"

    def __init__(self, red: ReductionOutput, inner: DrawerStrategy, base: PrecoloredGraph):
        super().__init__(red.graph)
        self.inner = inner.fork()
        self.base = base
        self.v_p = red.stats["v_p"]
        blocks = {b.part: b for b in red.blocks if b.iteration == red.stats["iteration"]}
        self.A = list(range(blocks["A"].start, blocks["A"].start + blocks["A"].size))
        self.B = list(range(blocks["B"].start, blocks["B"].start + blocks["B"].size))
        self.C = list(range(blocks["C"].start, blocks["C"].start + blocks["C"].size))
        self.open: int | None = None
        self.rest: list[int] = []  # revealed ids of D and E vertices, in order
        self.base_rank = initial_state(base).colors

    def _unused(self, part: list[int]) -> list[int]:
        used = set(self.witness)
        return [v for v in part if v not in used]

    def _resolve(self, state: GameState) -> None:
        if self.open is None:
            return
        i = self.open
        self.open = None
        if self.witness[i] not in self.B:
            return
        a_cols = {state.colors[j] for j, h in enumerate(self.witness[: state.revealed]) if h in self.A}
        if state.colors[i] in a_cols:
            free_c = self._unused(self.C)
            if free_c:
                self.witness[i] = free_c[0]

    def _virtual_state(self, state: GameState) -> GameState:
        vs = initial_state(self.base)
        vidx = {h: i for i, h in enumerate(self.base.anchors)}
        real_anchor = {}
        for i, x in enumerate(self.host.anchors):
            real_anchor[state.colors[i]] = vs.colors[vidx[_gid(x, self.v_p)]]
        super_cols = {state.colors[j] for j, h in enumerate(self.witness[: state.revealed]) if h >= self.host.n - 3 * len(self.A)}
        vp_color = vs.colors[vidx[self.v_p]]
        cmap: dict[int, int] = {}
        pos = {}
        for j in self.rest:
            h = _gid(self.witness[j], self.v_p)
            m = 0
            for i, x in enumerate(self.host.anchors):
                if state.graph.adj[j] >> i & 1:
                    m |= 1 << vidx[_gid(x, self.v_p)]
            if self.base.graph.has_edge(h, self.v_p):
                m |= 1 << vidx[self.v_p]
            for jj, p in pos.items():
                if state.graph.adj[j] >> jj & 1:
                    m |= 1 << p
            c = state.colors[j]
            if c in real_anchor:
                vc = real_anchor[c]
            else:
                # one supernode color may stand in for v_p; distinct real
                # colors must stay distinct
                if c not in cmap:
                    if c in super_cols and vp_color not in cmap.values() and vp_color not in real_anchor.values():
                        cmap[c] = vp_color
                    else:
                        cmap[c] = max(vs.used_colors, max(cmap.values(), default=-1) + 1)
                vc = cmap[c]
            pos[j] = vs.revealed
            vs = vs.present(m).paint(vc)
        return vs

    def move(self, state):
        self._resolve(state)
        free_a = self._unused(self.A)
        if free_a:
            return self.send(free_a[0])
        free_b, free_c = self._unused(self.B), self._unused(self.C)
        if free_b or free_c:
            self.open = state.revealed
            return self.send((free_b or free_c)[0])
        vs = self._virtual_state(state)
        if vs.revealed >= self.base.n:
            return self.send(self.unrevealed()[0])
        vmask, vwit = self.inner.move(vs)
        a = len(self.base.anchors)
        # the inner Drawer may re-map earlier vertices
        for j, h in zip(self.rest, vwit[a:-1]):
            self.witness[j] = h if h < self.v_p else h - 1
        new_g = vwit[-1]
        new = new_g if new_g < self.v_p else new_g - 1
        self.rest.append(state.revealed)
        return self.send(new)
