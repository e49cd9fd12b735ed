"""Drawer that makes every node's lower partite set {p1, p2} bichromatic."""

from __future__ import annotations

from ..engine import GameState
from ..reduction import ReductionOutput
from .basic import LazyDrawer


class NodeSchedule:
    """Queue items for node ``i``: p1, then q (p2 or p3, decided after q
    is colored), then the remaining one."""

    def node_items(self, nodes) -> list:
        out = []
        for i in nodes:
            out += [("p1", i), ("q", i), ("rest", i)]
        return out

    def resolve_node(self, state: GameState) -> None:
        if self.open_q is None:
            return
        i, iq, ip1 = self.open_q
        self.open_q = None
        same = state.colors[iq] == state.colors[ip1]
        self.witness[iq] = self.index[("node_p3" if same else "node_p2", i)]

    def next_node_item(self, state: GameState, item) -> int:
        tag, i = item
        if tag == "p1":
            return self.index[("node_p1", i)]
        if tag == "q":
            ip1 = self.witness.index(self.index[("node_p1", i)])
            self.open_q = (i, state.revealed, ip1)
            return self.index[("node_p2", i)]
        p2 = self.index[("node_p2", i)]
        return self.index[("node_p3", i)] if p2 in self.witness else p2


class NodesDrawer(NodeSchedule, LazyDrawer):
    name = "drawer-nodes"

    def __init__(self, red: ReductionOutput):
        super().__init__(red.graph)
        self.index = {r: v for v, r in enumerate(red.base_roles)}
        nodes = sorted(r[1] for r in red.base_roles if r[0] == "node_p1")
        self.queue = self.node_items(nodes)
        self.open_q = None

    def move(self, state):
        self.resolve_node(state)
        if not self.queue:
            return self.send(self.unrevealed()[0])
        return self.send(self.next_node_item(state, self.queue.pop(0)))
