"""The Painter/Drawer game: states, legal moves, the exact minimax solver and
the harnesses that pit fixed strategies against exhaustive opponents."""

from __future__ import annotations

import copy
import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Sequence

from .graphcore import (
    ColoredGraph,
    PrecoloredGraph,
    bits,
    canonical_key,
    chromatic_number,
    is_induced_embedding,
    iter_embeddings,
    popcount,
)

SOLVER_LIMIT = 12
DEFAULT_NODE_BUDGET = 2_000_000


class SolverLimitError(ValueError):
    pass


class BudgetExceeded(Exception):
    """A search ran past its node budget."""


class ProtocolError(RuntimeError):
    def __init__(self, round_no: int, message: str):
        self.round = round_no
        super().__init__(f"round {round_no}: {message}")


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True)
class GameState:
    """Everything either player can know: the colored revealed graph (the
    precolored anchors come first) plus the neighbourhood of a presented,
    still uncolored vertex."""

    graph: ColoredGraph
    used_colors: int
    pending: int | None = None

    @property
    def revealed(self) -> int:
        return self.graph.n

    @property
    def colors(self) -> tuple[int, ...]:
        return self.graph.colors

    @property
    def anchors(self) -> tuple[int, ...]:
        return self.graph.anchors

    def neighbor_colors(self, mask: int | None = None) -> set[int]:
        if mask is None:
            mask = self.pending or 0
        cols = self.graph.colors
        return {cols[w] for w in bits(mask)}

    def present(self, mask: int) -> GameState:
        if self.pending is not None:
            raise ValueError("a vertex is already pending")
        if mask >> self.graph.n:
            raise ValueError("neighbourhood refers to unrevealed vertices")
        return GameState(self.graph, self.used_colors, mask)

    def paint(self, color: int) -> GameState:
        if self.pending is None:
            raise ValueError("no pending vertex")
        g = self.graph.extend(self.pending, color)
        return GameState(g, max(self.used_colors, color + 1))

    def raw_key(self) -> tuple:
        return (self.graph.adj, self.graph.colors, self.pending)


def initial_state(host: PrecoloredGraph) -> GameState:
    """Precolored vertices revealed up front; their colors renumbered densely
    in ascending order of the original ids."""
    order = list(host.anchors)
    pre = host.coloring
    rank = {c: i for i, c in enumerate(sorted(set(pre.values())))}
    index = {v: i for i, v in enumerate(order)}
    adj = []
    for v in order:
        m = 0
        for w in bits(host.graph.adj[v]):
            if w in index:
                m |= 1 << index[w]
        adj.append(m)
    colors = tuple(rank[pre[v]] for v in order)
    return GameState(ColoredGraph(tuple(adj), colors, tuple(order)), len(rank))


def precolor_rank(host: PrecoloredGraph) -> dict[int, int]:
    """Host precolor id -> state color id used by :func:`initial_state`."""
    return {c: i for i, c in enumerate(sorted(set(host.coloring.values())))}


# ---------------------------------------------------------------------------
# legal moves


def legal_drawer_moves(state: GameState, host: PrecoloredGraph) -> list[int]:
    """Distinct neighbourhoods (bitmasks over revealed ids) the next vertex
    can have, ascending."""
    if state.pending is not None:
        raise ValueError("a vertex is pending")
    pattern = state.graph
    if pattern.n >= host.n:
        return []
    masks: set[int] = set()
    g = host.graph
    pm = host.precolored_mask
    for phi in iter_embeddings(pattern, host, modulo_twins=True):
        pos = {h: i for i, h in enumerate(phi)}
        image = sum(1 << h for h in phi)
        free = ((1 << g.n) - 1) & ~image & ~pm
        for u in bits(free):
            m = 0
            for h in bits(g.adj[u] & image):
                m |= 1 << pos[h]
            masks.add(m)
        if len(masks) == 1 << pattern.n:
            break
    return sorted(masks)


def naive_drawer_moves(state: GameState, host: PrecoloredGraph) -> list[int]:
    """Reference generator: every subset of the revealed vertices, kept when
    a brute-force search over injective maps finds an embedding."""
    pattern = state.graph
    if pattern.n >= host.n:
        return []
    out = []
    for mask in range(1 << pattern.n):
        ext = pattern.extend(mask, -1)
        if brute_force_embeddable(ext, host):
            out.append(mask)
    return out


def brute_force_embeddable(pattern: ColoredGraph, host: PrecoloredGraph) -> bool:
    p = len(pattern.anchors)
    free = host.free_vertices()
    for image in itertools.permutations(free, pattern.n - p):
        if is_induced_embedding(pattern, host, tuple(pattern.anchors) + image):
            return True
    return False


def legal_painter_colors(state: GameState, k: int) -> list[int]:
    if state.pending is None:
        raise ValueError("no pending vertex")
    blocked = state.neighbor_colors()
    out = [c for c in range(state.used_colors) if c not in blocked]
    if state.used_colors < k:
        out.append(state.used_colors)
    return out


# ---------------------------------------------------------------------------
# transcripts


@dataclass
class Round:
    index: int
    drawer: int
    painter: int
    colors_used: int
    host_vertex: int | None = None


@dataclass
class Transcript:
    rounds: list[Round] = field(default_factory=list)
    colors_used: int = 0
    embedding: tuple[int, ...] = ()

    def to_text(self) -> str:
        lines = [f"round {r.index} drawer {r.drawer} painter {r.painter}" for r in self.rounds]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> Transcript:
        t = cls()
        used = 0
        for line in text.split("\n"):
            if not line.strip():
                continue
            tok = line.split()
            if len(tok) != 6 or tok[0] != "round" or tok[2] != "drawer" or tok[4] != "painter":
                raise ValueError(f"bad transcript line {line!r}")
            c = int(tok[5])
            used = max(used, c + 1)
            t.rounds.append(Round(int(tok[1]), int(tok[3]), c, used))
        t.colors_used = used
        return t

    def to_dict(self) -> dict:
        return {
            "colors_used": self.colors_used,
            "rounds": [[r.index, r.drawer, r.painter] for r in self.rounds],
        }


# ---------------------------------------------------------------------------
# solver


@dataclass
class SolveStats:
    nodes: int = 0
    tt_hits: int = 0
    table_size: int = 0

    def to_dict(self) -> dict:
        return {"nodes": self.nodes, "table_size": self.table_size, "tt_hits": self.tt_hits}


@dataclass
class GameOutcome:
    winner: str  # "painter" or "drawer"
    k: int
    transcript: Transcript | None = None

    @property
    def painter_wins(self) -> bool:
        return self.winner == "painter"


def check_solver_limit(host: PrecoloredGraph, limit: int) -> None:
    free = host.n - len(host.precolored)
    if free > limit:
        raise SolverLimitError(f"solver limit is {limit} non-precolored vertices, host has {free}")


class Solver:
    """Minimax over colored revealed graphs, memoised on canonical keys.

    A state's value depends only on the revealed colored graph (Drawer's
    options and Painter's knowledge are both functions of it), so positions
    reached by different move orders, vertex labellings or color namings
    share one table entry."""

    def __init__(self, host: PrecoloredGraph, k: int, limit: int = SOLVER_LIMIT, node_budget: int | None = None):
        check_solver_limit(host, limit)
        self.host = host
        self.k = k
        self.node_budget = node_budget
        self.table: dict[bytes, bool] = {}
        self.stats = SolveStats()
        self._moves: dict[bytes, list[int]] = {}

    def key(self, state: GameState) -> bytes:
        return canonical_key(state.graph)

    def moves(self, state: GameState, key: bytes | None = None) -> list[int]:
        key = key or self.key(state)
        mv = self._moves.get(key)
        if mv is None:
            mv = legal_drawer_moves(state, self.host)
            cols = state.graph.colors
            # most constraining neighbourhoods first: Drawer refutes faster
            mv.sort(key=lambda m: (-len({cols[w] for w in bits(m)}), -popcount(m), m))
            self._moves[key] = mv
        return mv

    def painter_wins(self, state: GameState) -> bool:
        if state.revealed >= self.host.n:
            return True
        key = self.key(state)
        hit = self.table.get(key)
        if hit is not None:
            self.stats.tt_hits += 1
            return hit
        self.stats.nodes += 1
        if self.node_budget is not None and self.stats.nodes > self.node_budget:
            raise BudgetExceeded(f"solver passed {self.node_budget} nodes")
        value = True
        for mask in self.moves(state, key):
            pend = state.present(mask)
            if not any(self.painter_wins(pend.paint(c)) for c in legal_painter_colors(pend, self.k)):
                value = False
                break
        self.table[key] = value
        self.stats.table_size = len(self.table)
        return value

    def winning_color(self, pending: GameState) -> int | None:
        for c in legal_painter_colors(pending, self.k):
            if self.painter_wins(pending.paint(c)):
                return c
        return None

    def principal_variation(self, state: GameState) -> Transcript:
        t = Transcript()
        rnd = 0
        while state.revealed < self.host.n:
            rnd += 1
            chosen = None
            for mask in self.moves(state):
                pend = state.present(mask)
                if self.winning_color(pend) is None:
                    chosen = mask
                    break
            if chosen is None:
                chosen = self.moves(state)[0]
            pend = state.present(chosen)
            c = self.winning_color(pend)
            if c is None:
                legal = legal_painter_colors(pend, self.k)
                # Painter is lost: the game ends needing a (k+1)-th color
                c = legal[0] if legal else pend.used_colors
                state = pend.paint(c)
                t.rounds.append(Round(rnd, chosen, c, state.used_colors))
                if not legal:
                    break
                continue
            state = pend.paint(c)
            t.rounds.append(Round(rnd, chosen, c, state.used_colors))
        t.colors_used = state.used_colors
        return t


def _root_move_wins(args) -> tuple[bool, int, int]:
    host, k, limit, budget, mask = args
    solver = Solver(host, k, limit, budget)
    pend = initial_state(host).present(mask)
    win = solver.winning_color(pend) is not None
    return win, solver.stats.nodes, solver.stats.tt_hits


def painter_wins(
    host: PrecoloredGraph,
    k: int,
    limit: int = SOLVER_LIMIT,
    transcript: bool = False,
    node_budget: int | None = None,
    jobs: int = 1,
) -> tuple[GameOutcome, SolveStats]:
    """Decide whether Painter can finish with ``k`` colors.  With ``jobs``
    above 1 the first Drawer moves are solved in separate processes, each
    with its own table; the verdict is the same as the sequential one."""
    solver = Solver(host, k, limit, node_budget)
    root = initial_state(host)
    if root.used_colors > k:
        return GameOutcome("drawer", k), solver.stats
    if jobs > 1 and root.revealed < host.n:
        from concurrent.futures import ProcessPoolExecutor

        masks = solver.moves(root)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_root_move_wins, [(host, k, limit, node_budget, m) for m in masks]))
        win = all(r[0] for r in results)
        solver.stats.nodes = 1 + sum(r[1] for r in results)
        solver.stats.tt_hits = sum(r[2] for r in results)
    else:
        win = solver.painter_wins(root)
    outcome = GameOutcome("painter" if win else "drawer", k)
    if transcript:
        outcome.transcript = solver.principal_variation(root)
    return outcome, solver.stats


def online_chromatic_number(
    host: PrecoloredGraph, limit: int = SOLVER_LIMIT, node_budget: int | None = None, jobs: int = 1
) -> int:
    check_solver_limit(host, limit)
    k = max(chromatic_number(host.graph), len(set(host.coloring.values())))
    while True:
        outcome, _ = painter_wins(host, k, limit, node_budget=node_budget, jobs=jobs)
        if outcome.painter_wins:
            return k
        k += 1


def naive_painter_wins(host: PrecoloredGraph, k: int) -> bool:
    """Reference minimax: no table, no canonical forms, raw subset moves, and
    Painter tries every color id below ``k``."""
    root = initial_state(host)
    if root.used_colors > k:
        return False

    def win(state: GameState) -> bool:
        if state.revealed >= host.n:
            return True
        for mask in naive_drawer_moves(state, host):
            blocked = state.neighbor_colors(mask)
            pend = state.present(mask)
            ok = False
            for c in range(k):
                if c in blocked:
                    continue
                if win(_paint_any(pend, c)):
                    ok = True
                    break
            if not ok:
                return False
        return True

    return win(root)


def _paint_any(state: GameState, color: int) -> GameState:
    g = state.graph.extend(state.pending, color)
    return GameState(g, len(set(g.colors)))


# ---------------------------------------------------------------------------
# strategies


class PainterStrategy:
    """Maps a state with a pending vertex to a color id.

    ``stateless`` strategies are pure functions of the state; harnesses
    may then memoise on the state instead of copying the strategy."""

    name = "painter"
    stateless = False

    def choose(self, state: GameState) -> int:
        raise NotImplementedError

    def fork(self) -> PainterStrategy:
        return copy.deepcopy(self)


class DrawerStrategy:
    """Chooses the next neighbourhood and justifies it with a full witness
    embedding (host vertex per revealed id, the new vertex last)."""

    name = "drawer"

    def move(self, state: GameState) -> tuple[int, tuple[int, ...]]:
        raise NotImplementedError

    def fork(self) -> DrawerStrategy:
        return copy.deepcopy(self)


def check_drawer_move(state: GameState, host: PrecoloredGraph, mask: int, witness: Sequence[int], rnd: int) -> None:
    if mask < 0 or mask >> state.revealed:
        raise ProtocolError(rnd, f"neighbourhood {mask} mentions unrevealed vertices")
    ext = state.graph.extend(mask, -1)
    if not is_induced_embedding(ext, host, tuple(witness)):
        raise ProtocolError(rnd, f"drawer move {mask} with witness {tuple(witness)} is not an induced embedding")


def check_painter_move(state: GameState, color: int, rnd: int, k: int | None = None) -> None:
    if not isinstance(color, int) or color < 0 or color > state.used_colors:
        raise ProtocolError(rnd, f"painter color {color!r} is not a used color or the fresh color {state.used_colors}")
    if color in state.neighbor_colors():
        raise ProtocolError(rnd, f"painter color {color} clashes with a neighbour")
    if k is not None and color >= k and color == state.used_colors:
        raise ProtocolError(rnd, f"painter color {color} exceeds the budget {k}")


def play_match(host: PrecoloredGraph, drawer: DrawerStrategy, painter: PainterStrategy) -> Transcript:
    state = initial_state(host)
    t = Transcript()
    witness: tuple[int, ...] = tuple(state.anchors)
    rnd = 0
    while state.revealed < host.n:
        rnd += 1
        mask, witness = drawer.move(state)
        check_drawer_move(state, host, mask, witness, rnd)
        pend = state.present(mask)
        color = painter.choose(pend)
        check_painter_move(pend, color, rnd)
        state = pend.paint(color)
        t.rounds.append(Round(rnd, mask, color, state.used_colors, witness[-1]))
    t.colors_used = state.used_colors
    t.embedding = tuple(witness)
    return t


class RandomOrderDrawer(DrawerStrategy):
    """Presents the host vertices in a uniformly random order."""

    name = "random-order"

    def __init__(self, host: PrecoloredGraph, rng: random.Random):
        self.host = host
        order = host.free_vertices()
        rng.shuffle(order)
        self.order = list(host.anchors) + order

    def move(self, state):
        r = state.revealed
        nxt = self.order[r]
        mask = sum(1 << i for i, h in enumerate(self.order[:r]) if self.host.graph.has_edge(h, nxt))
        return mask, tuple(self.order[: r + 1])


class FixedOrderDrawer(DrawerStrategy):
    name = "fixed-order"

    def __init__(self, host: PrecoloredGraph, order: Sequence[int]):
        self.host = host
        self.order = list(host.anchors) + [v for v in order if v not in set(host.anchors)]

    def move(self, state):
        r = state.revealed
        nxt = self.order[r]
        mask = sum(1 << i for i, h in enumerate(self.order[:r]) if self.host.graph.has_edge(h, nxt))
        return mask, tuple(self.order[: r + 1])


# ---------------------------------------------------------------------------
# verification harnesses


@dataclass
class PainterReport:
    mode: str
    k: int
    max_colors: int
    complete: bool
    games: int = 0
    nodes: int = 0
    witness: Transcript | None = None

    @property
    def violation(self) -> bool:
        return self.max_colors > self.k

    def to_dict(self) -> dict:
        return {
            "complete": self.complete,
            "games": self.games,
            "k": self.k,
            "max_colors": self.max_colors,
            "mode": self.mode,
            "nodes": self.nodes,
            "violation": self.violation,
            "witness": self.witness.to_dict() if self.witness else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def verify_painter_strategy(
    host: PrecoloredGraph,
    k: int,
    strategy: PainterStrategy,
    mode: str = "exhaustive",
    seed: int = 0,
    trials: int = 1000,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> PainterReport:
    if mode == "sampled":
        return _sampled_painter(host, k, strategy, seed, trials)
    if mode != "exhaustive":
        raise ValueError(f"unknown mode {mode!r}")
    memo: dict = {}
    nodes = 0

    def rec(state: GameState, strat: PainterStrategy) -> tuple[int, list[tuple[int, int]] | None]:
        """Max final color count reachable, with the move list reaching it."""
        nonlocal nodes
        if state.revealed >= host.n:
            return state.used_colors, []
        key = canonical_key(state.graph, rename_colors=False) if strat.stateless else None
        if key is not None and key in memo:
            return memo[key]
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded
        best, best_line = -1, None
        for mask in legal_drawer_moves(state, host):
            pend = state.present(mask)
            s = strat if strat.stateless else strat.fork()
            color = s.choose(pend)
            check_painter_move(pend, color, state.revealed + 1)
            val, line = rec(pend.paint(color), s)
            if val > best:
                best, best_line = val, [(mask, color)] + line
            if best > k and best_line is not None:
                # one witness suffices, but keep the maximum honest
                pass
        if key is not None:
            memo[key] = (best, best_line)
        return best, best_line

    root = initial_state(host)
    try:
        best, line = rec(root, strategy.fork() if not strategy.stateless else strategy)
        complete = True
    except BudgetExceeded:
        return PainterReport("exhaustive", k, -1, False, nodes=nodes)
    witness = None
    if best > k:
        witness = _line_to_transcript(root, line)
    return PainterReport("exhaustive", k, best, complete, nodes=nodes, witness=witness)


def _line_to_transcript(root: GameState, line) -> Transcript:
    t = Transcript()
    state = root
    for i, (mask, color) in enumerate(line, 1):
        state = state.present(mask).paint(color)
        t.rounds.append(Round(i, mask, color, state.used_colors))
    t.colors_used = state.used_colors
    return t


def _sampled_painter(host, k, strategy, seed, trials) -> PainterReport:
    rng = random.Random(seed)
    worst, witness = -1, None
    for _ in range(trials):
        drawer = RandomOrderDrawer(host, rng)
        t = play_match(host, drawer, strategy.fork())
        if t.colors_used > worst:
            worst = t.colors_used
            if worst > k:
                witness = t
    return PainterReport("sampled", k, worst, True, games=trials, witness=witness)


@dataclass
class DrawerReport:
    k: int
    forced: bool
    complete: bool
    nodes: int
    branches: int
    escape: Transcript | None = None

    def to_dict(self) -> dict:
        return {
            "branches": self.branches,
            "complete": self.complete,
            "escape": self.escape.to_dict() if self.escape else None,
            "forced": self.forced,
            "k": self.k,
            "nodes": self.nodes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def verify_drawer_strategy(
    host: PrecoloredGraph,
    k: int,
    strategy: DrawerStrategy,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> DrawerReport:
    """Play ``strategy`` against every Painter reply within budget ``k``;
    forcing holds when every branch leaves Painter without a legal color."""
    nodes = 0
    branches = 0

    def rec(state: GameState, drawer: DrawerStrategy, line: list) -> list | None:
        nonlocal nodes, branches
        if state.revealed >= host.n:
            branches += 1
            return line
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded
        mask, witness = drawer.move(state)
        check_drawer_move(state, host, mask, witness, state.revealed + 1)
        pend = state.present(mask)
        colors = legal_painter_colors(pend, k)
        if not colors:
            branches += 1
            return None
        for c in colors:
            d = drawer.fork() if len(colors) > 1 else drawer
            esc = rec(pend.paint(c), d, line + [(mask, c)])
            if esc is not None:
                return esc
        return None

    root = initial_state(host)
    try:
        esc = rec(root, strategy.fork(), [])
    except BudgetExceeded:
        return DrawerReport(k, False, False, nodes, branches)
    escape = _line_to_transcript(root, esc) if esc is not None else None
    return DrawerReport(k, esc is None, True, nodes, branches, escape)


class SolverPainter(PainterStrategy):
    """Plays a winning color whenever the solver finds one, else the
    smallest legal color."""

    name = "solver"
    stateless = True

    def __init__(self, host: PrecoloredGraph, k: int, limit: int = SOLVER_LIMIT):
        self.solver = Solver(host, k, limit)
        self.k = k

    def choose(self, state: GameState) -> int:
        c = self.solver.winning_color(state)
        if c is not None:
            return c
        blocked = state.neighbor_colors()
        return min(c for c in range(state.used_colors + 1) if c not in blocked)

    def fork(self):
        return self
