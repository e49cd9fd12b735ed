import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import SAT, UNSAT, toy_hosts
from onlinecolor.engine import (
    PainterStrategy,
    RandomOrderDrawer,
    SolverPainter,
    initial_state,
    legal_painter_colors,
    online_chromatic_number,
    play_match,
    verify_drawer_strategy,
    verify_painter_strategy,
)
from onlinecolor.graphcore import PrecoloredGraph, path_graph
from onlinecolor.qdnf import parse_qdnf
from onlinecolor.reduction import build_g1, build_g2, joined_nodes, remove_precolored_vertex, wrap_host
from onlinecolor.strategies import (
    DRAWERS,
    PAINTERS,
    FirstFit,
    G1Drawer,
    G1Painter,
    G2Drawer,
    G2Painter,
    GPrimeDrawer,
    GPrimePainter,
    NodesDrawer,
    P4EndpointsDrawer,
    StrategyContext,
    make_drawer,
    make_painter,
    smallest_free,
)


class RandomPainter(PainterStrategy):
    """Any legal color within the budget (a new one when none is left)."""

    name = "random-painter"

    def __init__(self, k, rng):
        self.k = k
        self.rng = rng

    def choose(self, state):
        return self.rng.choice(legal_painter_colors(state, self.k) or [state.used_colors])


def node_colors(red, t):
    """Node index -> {part: color} from a finished transcript."""
    cols = dict(zip(t.embedding[len(red.graph.anchors) :], (r.painter for r in t.rounds)))
    out = {}
    for v, c in cols.items():
        role = red.vertex_role(v)
        if role[0].startswith("node_p"):
            out.setdefault(role[1], {})[role[0][-1]] = c
    return out


# -- registry -------------------------------------------------------------------


def test_registry_names():
    assert {"firstfit", "painter-g1", "painter-g2", "painter-gprime"} <= set(PAINTERS)
    assert {"drawer-g1", "drawer-nodes", "drawer-g2", "drawer-gprime"} <= set(DRAWERS)
    ctx = StrategyContext(red=wrap_host(PrecoloredGraph.of(path_graph(4)), 3), k=3)
    with pytest.raises(ValueError):
        make_painter("nope", ctx)
    with pytest.raises(ValueError):
        make_drawer("nope", ctx)
    with pytest.raises(ValueError):
        make_painter("painter-gprime", ctx)
    assert make_painter("firstfit", ctx).name == "firstfit"
    assert make_drawer("random-order", ctx).name == "random-order"


def test_smallest_free_and_firstfit():
    s = initial_state(PrecoloredGraph.of(path_graph(3))).present(0).paint(0).present(0).paint(1)
    pend = s.present(0b11)
    assert smallest_free(pend) == 2
    assert smallest_free(pend, palette=[5, 1, 7]) == 5
    ff = FirstFit()
    assert ff.choose(pend) == 2 and ff.fork() is ff


# -- G1 -------------------------------------------------------------------------


def test_g1_strategies_refuse_wrong_formulas():
    with pytest.raises(ValueError):
        G1Painter(build_g1(parse_qdnf(UNSAT[0])))
    with pytest.raises(ValueError):
        G1Drawer(build_g1(parse_qdnf(SAT[0])))


@pytest.mark.parametrize("text", UNSAT)
def test_drawer_g1_forces_a_new_color(text):
    red = build_g1(parse_qdnf(text))
    rep = verify_drawer_strategy(red.graph, red.k, G1Drawer(red))
    assert rep.complete and rep.forced


def test_painter_g1_exhaustive_minimal_formula():
    red = build_g1(parse_qdnf(SAT[0]))
    rep = verify_painter_strategy(red.graph, red.k, G1Painter(red))
    assert rep.complete and rep.max_colors <= red.k


@pytest.mark.parametrize(
    "text",
    ["A x1 E x2 : (x1 & x2 & x2) | (~x1 & ~x2 & ~x2)", "E x1 E x2 E x3 : (x1 & x2 & x3)"],
)
def test_painter_g1_sampled(text):
    red = build_g1(parse_qdnf(text))
    rep = verify_painter_strategy(red.graph, red.k, G1Painter(red), mode="sampled", seed=0, trials=200)
    assert rep.max_colors <= red.k


def test_drawer_g1_against_firstfit_and_random():
    red = build_g1(parse_qdnf("A x1 E x2 : (x1 & x2 & x2) | (x1 & ~x2 & ~x2)"))
    assert play_match(red.graph, G1Drawer(red), FirstFit()).colors_used == red.k + 1
    rng = random.Random(0)
    for _ in range(20):
        assert play_match(red.graph, G1Drawer(red), RandomPainter(red.k, rng)).colors_used == red.k + 1


# -- nodes ----------------------------------------------------------------------


@pytest.mark.parametrize("m", [1, 2, 3])
def test_drawer_nodes_forces_two_colors_per_node(m):
    red = joined_nodes(m)
    t = play_match(red.graph, NodesDrawer(red), FirstFit())
    assert t.colors_used == 2 * m
    for parts in node_colors(red, t).values():
        assert parts["2"] != parts["3"]


def test_drawer_nodes_exhaustive_two_nodes():
    red = joined_nodes(2)
    rep = verify_drawer_strategy(red.graph, red.k - 1, NodesDrawer(red))
    assert rep.complete and rep.forced


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6))
def test_firstfit_node_property(m, seed):
    red = joined_nodes(m)
    t = play_match(red.graph, RandomOrderDrawer(red.graph, random.Random(seed)), FirstFit())
    order = {v: i for i, v in enumerate(t.embedding)}
    for i, parts in node_colors(red, t).items():
        assert len(set(parts.values())) <= 2
        p1, p2, p3 = (red.vertex_of((f"node_p{x}", i)) for x in (1, 2, 3))
        if max(order[p1], order[p2]) < order[p3]:
            assert parts["1"] == parts["2"]


# -- G2 -------------------------------------------------------------------------


def test_g2_drawer_forces_against_firstfit_and_random():
    red = build_g2(parse_qdnf(UNSAT[0]))
    assert play_match(red.graph, G2Drawer(red), FirstFit()).colors_used == red.k + 1
    rng = random.Random(2)
    for _ in range(10):
        assert play_match(red.graph, G2Drawer(red), RandomPainter(red.k, rng)).colors_used > red.k


def test_g2_painter_plays_legally_and_keeps_nodes_bichromatic():
    red = build_g2(parse_qdnf(SAT[0]))
    rng = random.Random(0)
    for _ in range(20):
        p = G2Painter(red)
        t = play_match(red.graph, RandomOrderDrawer(red.graph, rng), p)
        for parts in node_colors(red, t).values():
            assert len(set(parts.values())) <= 2
    with pytest.raises(ValueError):
        G2Painter(build_g2(parse_qdnf(UNSAT[0])))


# -- one removed precolored vertex ---------------------------------------------------


def gprime_setup(name):
    G = toy_hosts()[name]
    base = wrap_host(G, online_chromatic_number(G))
    red = remove_precolored_vertex(base, max(G.coloring))
    return G, base, red


def test_gprime_drawer_forces_past_budget():
    G, base, red = gprime_setup("p4+vp")
    # the inner Drawer forces 3 colors on the pre-removal graph
    k_inner = 2
    k = k_inner + 2 * red.stats["S"]
    assert play_match(red.graph, GPrimeDrawer(red, P4EndpointsDrawer(G), G), FirstFit()).colors_used == k + 1
    rng = random.Random(5)
    for _ in range(15):
        t = play_match(red.graph, GPrimeDrawer(red, P4EndpointsDrawer(G), G), RandomPainter(k, rng))
        assert t.colors_used > k


def test_gprime_drawer_commits_a_colors_to_c():
    G, base, red = gprime_setup("p4+vp")
    S = red.stats["S"]
    A = set(range(4, 4 + S))
    C = set(range(4 + 2 * S, 4 + 3 * S))
    t = play_match(red.graph, GPrimeDrawer(red, P4EndpointsDrawer(G), G), RandomPainter(red.k, random.Random(1)))
    color = dict(zip(t.embedding, (r.painter for r in t.rounds)))
    a_cols = {color[v] for v in A}
    for v, c in color.items():
        if v not in A and c in a_cols and red.vertex_role(v)[0].startswith("supernode"):
            assert v in C


class Watch(PainterStrategy):
    """Wraps the G' painter and records its recognition state each round."""

    def __init__(self, inner):
        self.inner = inner
        self.history = []

    def choose(self, state):
        c = self.inner.choose(state)
        r = self.inner.rec
        self.history.append((dict(r.kind), set(r.surely_D), set(r.K_D)))
        return c


@pytest.mark.parametrize("name", ["c6+vp", "p4+vp"])
def test_gprime_painter_ledger_and_recognition(name):
    G, base, red = gprime_setup(name)
    rng = random.Random(11)
    for _ in range(8):
        w = Watch(GPrimePainter(red, SolverPainter(G, base.k), G))
        t = play_match(red.graph, RandomOrderDrawer(red.graph, rng), w)
        p = w.inner
        assert p.ledger.violations == []
        assert not (p.ledger.C & p.ledger.E)
        assert t.colors_used <= red.k
        prev_d, prev_kd = set(), set()
        for kind, surely, kd in w.history:
            assert prev_d <= surely
            assert all(kind[v] == "D" for v in prev_d)
            # K_D members only leave K_D by becoming surely D
            assert prev_kd - kd <= surely
            prev_d, prev_kd = surely, kd
