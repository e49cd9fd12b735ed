import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_online_chromatic, brute_online_wins
from onlinecolor.engine import (
    BudgetExceeded,
    FixedOrderDrawer,
    GameState,
    PainterStrategy,
    ProtocolError,
    RandomOrderDrawer,
    SolverLimitError,
    SolverPainter,
    Transcript,
    check_drawer_move,
    check_painter_move,
    initial_state,
    legal_drawer_moves,
    legal_painter_colors,
    naive_drawer_moves,
    naive_painter_wins,
    online_chromatic_number,
    painter_wins,
    play_match,
    verify_drawer_strategy,
    verify_painter_strategy,
)
from onlinecolor.graphcore import (
    PrecoloredGraph,
    binomial_tree,
    complete_graph,
    cycle_graph,
    empty_graph,
    graph_from_edges,
    path_graph,
)
from onlinecolor.strategies import FirstFit, P4EndpointsDrawer


def host_of(g, pre=None):
    return PrecoloredGraph.of(g, pre or {})


P4 = host_of(path_graph(4))


@st.composite
def small_hosts(draw, max_n=5, max_pre=2):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    g = graph_from_edges(n, [p for p, b in zip(pairs, keep) if b])
    pre_vs = draw(st.lists(st.integers(0, n - 1), unique=True, max_size=min(max_pre, n)))
    pre = {}
    for v in pre_vs:
        used = {pre[w] for w in pre if g.has_edge(v, w)}
        pre[v] = draw(st.sampled_from([c for c in range(3) if c not in used]))
    return host_of(g, pre)


# -- states and moves ---------------------------------------------------------


def test_initial_state_renumbers_precolors():
    host = host_of(path_graph(3), {0: 7, 2: 3})
    s = initial_state(host)
    assert s.anchors == (0, 2)
    assert s.colors == (1, 0)
    assert s.used_colors == 2
    assert s.revealed == 2


def test_present_and_paint():
    s = initial_state(P4)
    pend = s.present(0)
    with pytest.raises(ValueError):
        pend.present(0)
    s1 = pend.paint(0)
    assert s1.used_colors == 1 and s1.pending is None
    with pytest.raises(ValueError):
        s1.paint(0)
    with pytest.raises(ValueError):
        s1.present(0b10)


@settings(max_examples=60, deadline=None)
@given(small_hosts(max_n=5), st.data())
def test_legal_moves_match_naive_generator(host, data):
    state = initial_state(host)
    # walk a random legal line and compare the generators at every step
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    while state.revealed < host.n:
        fast = legal_drawer_moves(state, host)
        assert fast == naive_drawer_moves(state, host)
        pend = state.present(rng.choice(fast))
        state = pend.paint(rng.choice(legal_painter_colors(pend, host.n + 3)))
    assert legal_drawer_moves(state, host) == []


def test_legal_painter_colors_budget():
    s = initial_state(P4).present(0).paint(0).present(1)
    assert legal_painter_colors(s, 1) == []
    assert legal_painter_colors(s, 2) == [1]
    s2 = initial_state(P4).present(0).paint(0).present(0)
    assert legal_painter_colors(s2, 2) == [0, 1]


# -- solver ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "g, chi_o",
    [
        (path_graph(4), 3),
        (cycle_graph(4), 2),
        (cycle_graph(5), 3),
        (complete_graph(3), 3),
        (graph_from_edges(4, [(0, 1), (0, 2), (0, 3)]), 2),
        (path_graph(5), 3),
        (graph_from_edges(4, [(0, 1), (2, 3)]), 2),
        (binomial_tree(2), 3),
        (empty_graph(3), 1),
    ],
)
def test_frozen_online_chromatic_numbers(g, chi_o):
    # values computed with the brute-force oracle in tests/oracles.py
    assert online_chromatic_number(host_of(g)) == chi_o


@settings(max_examples=40, deadline=None)
@given(small_hosts(max_n=4, max_pre=0))
def test_solver_matches_definition_oracle(host):
    edges = host.graph.edges()
    n = host.n
    chi = online_chromatic_number(host)
    assert chi == brute_online_chromatic(n, edges)
    assert brute_online_wins(n, edges, chi) and not brute_online_wins(n, edges, chi - 1)


@settings(max_examples=60, deadline=None)
@given(small_hosts(max_n=5, max_pre=2), st.integers(0, 4))
def test_solver_matches_naive_on_precolored_hosts(host, k):
    assert painter_wins(host, k)[0].painter_wins == naive_painter_wins(host, k)


@settings(max_examples=25, deadline=None)
@given(small_hosts(max_n=6, max_pre=1), st.integers(0, 10**6))
def test_relabelling_invariance(host, seed):
    perm = list(range(host.n))
    random.Random(seed).shuffle(perm)
    moved = host_of(host.graph.relabel(perm), {perm[v]: c for v, c in host.coloring.items()})
    assert online_chromatic_number(moved) == online_chromatic_number(host)


def test_solver_limit_and_budget():
    with pytest.raises(SolverLimitError):
        painter_wins(host_of(empty_graph(14)), 1, limit=12)
    with pytest.raises(BudgetExceeded):
        painter_wins(host_of(binomial_tree(3)), 3, node_budget=5)


def test_parallel_root_split_agrees():
    for g, k in [(path_graph(4), 2), (path_graph(4), 3), (binomial_tree(3), 3), (cycle_graph(6), 2)]:
        seq = painter_wins(host_of(g), k)[0].winner
        par = painter_wins(host_of(g), k, jobs=2)[0].winner
        assert seq == par


def test_principal_variation_is_a_legal_losing_line():
    outcome, _ = painter_wins(P4, 2, transcript=True)
    assert outcome.winner == "drawer"
    t = outcome.transcript
    state = initial_state(P4)
    for r in t.rounds:
        assert r.drawer in legal_drawer_moves(state, P4)
        state = state.present(r.drawer).paint(r.painter)
    assert t.colors_used == 3
    assert Transcript.from_text(t.to_text()).to_text() == t.to_text()


def test_precolored_vertices_count_towards_budget():
    host = host_of(empty_graph(3), {0: 0, 1: 1})
    assert not painter_wins(host, 1)[0].painter_wins
    assert painter_wins(host, 2)[0].painter_wins
    assert online_chromatic_number(host) == 2


def test_transcript_parse_errors():
    with pytest.raises(ValueError):
        Transcript.from_text("round 1 drawer x\n")


# -- protocol checks and harnesses -----------------------------------------------


def test_protocol_checks():
    s = initial_state(P4).present(0).paint(0)
    with pytest.raises(ProtocolError):
        check_drawer_move(s, P4, 0b10, (0, 1), 2)
    with pytest.raises(ProtocolError):
        check_drawer_move(s, P4, 0b1, (0, 2), 2)
    check_drawer_move(s, P4, 0b1, (0, 1), 2)
    pend = s.present(1)
    with pytest.raises(ProtocolError):
        check_painter_move(pend, 0, 2)
    with pytest.raises(ProtocolError):
        check_painter_move(pend, 5, 2)
    with pytest.raises(ProtocolError):
        check_painter_move(pend, 1, 2, k=1)


class Cheater(PainterStrategy):
    stateless = True

    def choose(self, state: GameState) -> int:
        return 0


def test_play_match_rejects_illegal_painter():
    with pytest.raises(ProtocolError):
        play_match(P4, FixedOrderDrawer(P4, [0, 1, 2, 3]), Cheater())


def test_play_match_firstfit_orders():
    assert play_match(P4, FixedOrderDrawer(P4, [0, 1, 2, 3]), FirstFit()).colors_used == 2
    assert play_match(P4, FixedOrderDrawer(P4, [0, 3, 1, 2]), FirstFit()).colors_used == 3
    t = play_match(P4, RandomOrderDrawer(P4, random.Random(3)), FirstFit())
    assert sorted(t.embedding) == [0, 1, 2, 3]


def test_verify_painter_exhaustive_and_sampled():
    rep = verify_painter_strategy(P4, 2, FirstFit())
    assert rep.complete and rep.violation and rep.max_colors == 3
    assert rep.witness.colors_used == 3
    ok = verify_painter_strategy(P4, 3, SolverPainter(P4, 3))
    assert ok.complete and not ok.violation
    a = verify_painter_strategy(P4, 2, FirstFit(), mode="sampled", seed=4, trials=50)
    b = verify_painter_strategy(P4, 2, FirstFit(), mode="sampled", seed=4, trials=50)
    assert a.to_json() == b.to_json()
    budget = verify_painter_strategy(host_of(binomial_tree(3)), 4, FirstFit(), node_budget=3)
    assert not budget.complete


def test_verify_drawer():
    rep = verify_drawer_strategy(P4, 2, P4EndpointsDrawer(P4))
    assert rep.complete and rep.forced
    rep = verify_drawer_strategy(P4, 3, P4EndpointsDrawer(P4))
    assert rep.complete and not rep.forced and rep.escape is not None
    rep = verify_drawer_strategy(P4, 2, RandomOrderDrawer(P4, random.Random(0)))
    assert rep.complete


def test_solver_painter_never_loses_when_winning():
    host = host_of(binomial_tree(3))
    painter = SolverPainter(host, 4)
    rng = random.Random(1)
    for _ in range(30):
        assert play_match(host, RandomOrderDrawer(host, rng), painter).colors_used <= 4
