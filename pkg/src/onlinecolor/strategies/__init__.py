"""Named Painter and Drawer strategies, selectable by string."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from ..engine import DrawerStrategy, PainterStrategy, RandomOrderDrawer, SolverPainter
from ..graphcore import PrecoloredGraph
from ..reduction import ReductionOutput
from .basic import FirstFit, LazyDrawer, P4EndpointsDrawer, first_fit, smallest_free
from .g1 import G1Drawer, G1Painter, RecognitionError
from .g2 import G2Drawer, G2Painter
from .gprime import GPrimeDrawer, GPrimePainter, PaletteLedger, RecognitionState
from .nodes import NodesDrawer

__all__ = [
    "FirstFit",
    "G1Drawer",
    "G1Painter",
    "G2Drawer",
    "G2Painter",
    "GPrimeDrawer",
    "GPrimePainter",
    "LazyDrawer",
    "NodesDrawer",
    "P4EndpointsDrawer",
    "PaletteLedger",
    "RecognitionError",
    "RecognitionState",
    "StrategyContext",
    "DRAWERS",
    "PAINTERS",
    "make_drawer",
    "make_painter",
    "first_fit",
    "smallest_free",
]


@dataclass
class StrategyContext:
    """What a strategy factory may look at: the host with its role tables,
    and for a supernode host the graph before the removal."""

    red: ReductionOutput
    k: int
    seed: int = 0
    base: PrecoloredGraph | None = None
    base_k: int | None = None
    inner: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def host(self) -> PrecoloredGraph:
        return self.red.graph


def _need_base(ctx: StrategyContext) -> PrecoloredGraph:
    if ctx.base is None:
        raise ValueError("this strategy needs the graph before the precolored vertex was removed")
    return ctx.base


def _inner_context(ctx: StrategyContext) -> StrategyContext:
    base = _need_base(ctx)
    red = ReductionOutput(graph=base, k=ctx.base_k or ctx.k, base_roles=[], color_roles={}, stats={})
    return StrategyContext(red=red, k=ctx.base_k or ctx.k, seed=ctx.seed)


PAINTERS: dict[str, Callable[[StrategyContext], PainterStrategy]] = {
    "firstfit": lambda ctx: FirstFit(),
    "solver": lambda ctx: SolverPainter(ctx.host, ctx.k),
    "painter-g1": lambda ctx: G1Painter(ctx.red),
    "painter-g2": lambda ctx: G2Painter(ctx.red),
    "painter-gprime": lambda ctx: GPrimePainter(
        ctx.red, make_painter(ctx.inner or "solver", _inner_context(ctx)), _need_base(ctx)
    ),
}

DRAWERS: dict[str, Callable[[StrategyContext], DrawerStrategy]] = {
    "random-order": lambda ctx: RandomOrderDrawer(ctx.host, random.Random(ctx.seed)),
    "drawer-p4": lambda ctx: P4EndpointsDrawer(ctx.host),
    "drawer-g1": lambda ctx: G1Drawer(ctx.red),
    "drawer-nodes": lambda ctx: NodesDrawer(ctx.red),
    "drawer-g2": lambda ctx: G2Drawer(ctx.red),
    "drawer-gprime": lambda ctx: GPrimeDrawer(
        ctx.red, make_drawer(ctx.inner or "random-order", _inner_context(ctx)), _need_base(ctx)
    ),
}


def make_painter(name: str, ctx: StrategyContext) -> PainterStrategy:
    try:
        factory = PAINTERS[name]
    except KeyError:
        raise ValueError(f"unknown painter {name!r}; choose from {', '.join(sorted(PAINTERS))}") from None
    return factory(ctx)


def make_drawer(name: str, ctx: StrategyContext) -> DrawerStrategy:
    try:
        factory = DRAWERS[name]
    except KeyError:
        raise ValueError(f"unknown drawer {name!r}; choose from {', '.join(sorted(DRAWERS))}") from None
    return factory(ctx)
