"""Generic strategies that need no role tables."""

from __future__ import annotations

from ..engine import DrawerStrategy, GameState, PainterStrategy
from ..graphcore import PrecoloredGraph


def smallest_free(state: GameState, palette=None) -> int:
    blocked = state.neighbor_colors()
    candidates = range(state.used_colors + 1) if palette is None else palette
    for c in candidates:
        if c not in blocked:
            return c
    return state.used_colors


class FirstFit(PainterStrategy):
    """Smallest color id absent from the pending vertex's neighbourhood."""

    name = "firstfit"
    stateless = True

    def choose(self, state: GameState) -> int:
        return smallest_free(state)

    def fork(self):
        return self


def first_fit() -> FirstFit:
    return FirstFit()


class LazyDrawer(DrawerStrategy):
    """Drawer that keeps a current witness embedding and may re-map an
    already colored vertex as long as the revealed graph still embeds."""

    def __init__(self, host: PrecoloredGraph):
        self.host = host
        self.witness: list[int] = list(host.anchors)

    def mask_for(self, v: int) -> int:
        adj = self.host.graph.adj[v]
        return sum(1 << i for i, h in enumerate(self.witness) if adj >> h & 1)

    def send(self, v: int) -> tuple[int, tuple[int, ...]]:
        mask = self.mask_for(v)
        self.witness.append(v)
        return mask, tuple(self.witness)

    def unrevealed(self) -> list[int]:
        used = set(self.witness)
        return [v for v in range(self.host.n) if v not in used]


class P4EndpointsDrawer(LazyDrawer):
    """On a path a-b-c-d: send a, then a vertex non-adjacent to it.  Equal
    colors make it d (then b, c need two more colors); different colors
    make it c, and b then sees both."""

    name = "drawer-p4"

    def __init__(self, host: PrecoloredGraph, path: tuple[int, int, int, int] = (0, 1, 2, 3)):
        super().__init__(host)
        self.path = path

    def move(self, state):
        a, b, c, d = self.path
        r = len(self.witness) - len(self.host.anchors)
        if r == 0:
            return self.send(a)
        if r == 1:
            return self.send(c)
        if r == 2:
            p = len(self.host.anchors)
            if state.colors[p] == state.colors[p + 1]:
                self.witness[p + 1] = d
            return self.send(b)
        return self.send(self.unrevealed()[0])
