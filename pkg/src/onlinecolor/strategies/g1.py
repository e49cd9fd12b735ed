"""Strategies on the large-precolored-clique gadget.

Painter reads every vertex's gadget class off the colors it is forbidden
(its neighbours in the precolored clique) and plays the formula's game
through the colors.  Drawer presents the variable gadgets in quantifier
order and commits each universal pair only after seeing Painter's color."""

from __future__ import annotations

from ..engine import GameState, PainterStrategy
from ..qdnf import EXISTS, FORALL, QdnfFormula, evaluate_qdnf, winning_choice
from ..reduction import ReductionOutput, allowed_color_roles
from .basic import LazyDrawer, smallest_free


class RecognitionError(RuntimeError):
    pass


def gadget_class(role) -> tuple:
    tag = role[0]
    if tag in ("x_it", "x_if"):
        return ("A", role[1])
    if tag in ("x_jt", "x_jf", "x_jh"):
        return (tag, role[1])
    if tag == "l":
        return ("l", role[1], role[3])
    return tuple(role)


class G1Painter(PainterStrategy):
    """Winning Painter for a true formula with the clique colors as budget."""

    name = "painter-g1"
    stateless = True

    def __init__(self, g1: ReductionOutput):
        f = g1.formula
        if f is None or not evaluate_qdnf(f):
            raise ValueError("painter-g1 needs a true formula")
        self.f: QdnfFormula = f
        self.roles = g1.base_roles
        self.color_roles = g1.color_roles
        adj = g1.graph.graph.adj
        self.kcol_role = {v: g1.color_roles[r[1]] for v, r in enumerate(self.roles) if r[0] == "kcol"}
        self.classes: dict[frozenset, tuple] = {}
        members: dict[tuple, list[int]] = {}
        for v, r in enumerate(self.roles):
            if r[0] in ("kcol",) or r[0].startswith("node") or r[0] == "z":
                continue
            cls = gadget_class(r)
            self.classes[allowed_color_roles(r, f)] = cls
            members.setdefault(cls, []).append(v)
        # how a class tells x_it from x_if by adjacency
        self.witness_kind: dict[tuple, str] = {}
        index = {r: v for v, r in enumerate(self.roles)}
        for var, q in f.prefix:
            if q != FORALL:
                continue
            t, fv = index[("x_it", var)], index[("x_if", var)]
            for cls, vs in members.items():
                to_t = [adj[v] >> t & 1 for v in vs]
                to_f = [adj[v] >> fv & 1 for v in vs]
                if all(to_t) and not any(to_f):
                    self.witness_kind[(cls, var)] = "t"
                elif all(to_f) and not any(to_t):
                    self.witness_kind[(cls, var)] = "f"
        self.clause_signs = {}
        for a, clause in enumerate(f.clauses, 1):
            for var, s in clause:
                self.clause_signs.setdefault((a, var), set()).add(s)

    # -- reading the state -------------------------------------------------

    def choose(self, state: GameState) -> int:
        view = _View(self, state)
        role = view.pending_role()
        c = view.state_color.get(role)
        if c is None or c in state.neighbor_colors():
            return smallest_free(state)
        return c


class _View:
    def __init__(self, p: G1Painter, state: GameState):
        self.p = p
        self.state = state
        g = state.graph
        anchors = {}
        self.state_color = {}
        self.role_of_color = {}
        for i, h in enumerate(g.anchors):
            r = p.kcol_role.get(h)
            if r is None:
                continue
            anchors[i] = r
            self.state_color[r] = g.colors[i]
            self.role_of_color[g.colors[i]] = r
        a = len(g.anchors)
        self.items = list(range(a, g.n)) + [g.n]
        self.cls = {}
        for v in self.items:
            nb = g.adj[v] if v < g.n else state.pending
            allowed = frozenset(r for i, r in anchors.items() if not nb >> i & 1)
            cls = p.classes.get(allowed)
            if cls is None:
                raise RecognitionError(f"vertex {v} matches no gadget class")
            self.cls[v] = cls
        self._values = None

    def adj(self, u: int, v: int) -> bool:
        g = self.state.graph
        if u == g.n:
            u, v = v, u
        if v == g.n:
            return bool(self.state.pending >> u & 1)
        return bool(g.adj[u] >> v & 1)

    def color_role(self, v: int):
        return self.role_of_color.get(self.state.graph.colors[v])

    def identify(self, v: int, var: int) -> str | None:
        for w in self.items:
            if w == v:
                continue
            kind = self.p.witness_kind.get((self.cls[w], var))
            if kind is None:
                continue
            near = self.adj(v, w)
            return "t" if near == (kind == "t") else "f"
        return None

    def values(self) -> dict[int, bool]:
        if self._values is not None:
            return self._values
        vals: dict[int, bool] = {}
        for v in self.items[:-1]:
            cls = self.cls[v]
            var = cls[1] if len(cls) > 1 else None
            if var in vals:
                continue
            r = self.color_role(v)
            if cls[0] == "A":
                who = self.identify(v, var)
                if who is not None and r is not None:
                    vals[var] = (who == "t") == (r == ("set", var))
            elif cls[0] == "x_jt":
                vals[var] = r == ("set_t", var)
            elif cls[0] == "x_jf":
                vals[var] = r != ("set_f", var)
            elif cls[0] == "x_jh":
                vals[var] = r == ("set_f", var)
        self._values = vals
        return vals

    def assignment(self, upto: int | None = None) -> list[bool]:
        f = self.p.f
        known = self.values()
        out: list[bool] = []
        stop = f.n if upto is None else upto + 1
        for var, q in f.prefix[:stop]:
            if var in known:
                out.append(known[var])
            elif q == EXISTS:
                out.append(winning_choice(f, tuple(out)))
            else:
                out.append(True)
        return out

    def value_of(self, var: int) -> bool:
        return self.assignment(self.p.f.position(var))[-1]

    def pending_role(self):
        v = self.items[-1]
        cls = self.cls[v]
        tag = cls[0]
        f = self.p.f
        if tag == "A":
            var = cls[1]
            who = self.identify(v, var)
            if who is None:
                taken = {self.color_role(w) for w in self.items[:-1] if self.cls[w] == cls}
                for r in (("set", var), ("unset", var)):
                    if r not in taken:
                        return r
                return ("set", var)
            val = self.value_of(var)
            return ("set", var) if (who == "t") == val else ("unset", var)
        if tag in ("x_jt", "x_jf", "x_jh"):
            var = cls[1]
            val = self.value_of(var)
            if tag == "x_jt":
                return ("set_t", var) if val else ("unset", var)
            if tag == "x_jf":
                return ("unset", var) if val else ("set_f", var)
            return ("set_f", var) if val else ("set_t", var)
        full = dict(zip(f.variables, self.assignment()))
        if tag == "l":
            a, var = cls[1], cls[2]
            signs = self.p.clause_signs[(a, var)]
            if len(signs) == 1 and full[var] == next(iter(signs)):
                return ("unset", var)
            return ("f", a)
        if tag == "d":
            a = cls[1]
            clause = f.clauses[a - 1]
            return ("f", a) if all(full[x] == s for x, s in clause) else ("false", a)
        if tag == "F":
            for a, clause in enumerate(f.clauses, 1):
                if all(full[x] == s for x, s in clause):
                    return ("false", a)
            return ("false", 1)
        raise RecognitionError(f"unexpected class {cls}")


class G1Drawer(LazyDrawer):
    """Forces one color beyond the clique on a false formula."""

    name = "drawer-g1"

    def __init__(self, red: ReductionOutput, check: bool = True):
        super().__init__(red.graph)
        f = red.formula
        if f is None:
            raise ValueError("drawer-g1 needs the formula")
        if check and evaluate_qdnf(f):
            raise ValueError("drawer-g1 needs a false formula")
        self.f = f
        self.roles = red.base_roles
        self.index = {r: v for v, r in enumerate(self.roles)}
        self.color_roles = red.color_roles
        self.queue = self.g1_queue()
        self.open_pair: tuple[int, int] | None = None

    def g1_queue(self) -> list:
        q: list = []
        ix = self.index
        for var, kind in self.f.prefix:
            if kind == FORALL:
                q += [("pair1", var), ("pair2", var)]
            else:
                q += [ix[("x_jt", var)], ix[("x_jf", var)], ix[("x_jh", var)]]
        for a, clause in enumerate(self.f.clauses, 1):
            q += [ix[("l", a, pos, var, s)] for pos, (var, s) in enumerate(clause)]
        q += [ix[("d", a)] for a in range(1, self.f.m + 1)]
        q.append(ix[("F",)])
        return q

    # colors are read through the revealed clique vertices
    def color_role(self, state: GameState, c: int):
        for i, h in enumerate(self.witness[: state.revealed]):
            r = self.roles[h]
            if r[0] == "kcol" and state.colors[i] == c:
                return self.color_roles[r[1]]
        return None

    def values_before(self, state: GameState, var: int) -> tuple[bool, ...]:
        pos = {h: i for i, h in enumerate(self.witness[: state.revealed])}
        out = []
        for v, q in self.f.prefix:
            if v == var:
                break
            if q == FORALL:
                i = pos[self.index[("x_it", v)]]
                out.append(self.color_role(state, state.colors[i]) == ("set", v))
            else:
                i = pos[self.index[("x_jt", v)]]
                out.append(self.color_role(state, state.colors[i]) == ("set_t", v))
        return tuple(out)

    def resolve(self, state: GameState) -> None:
        if self.open_pair is None:
            return
        var, i = self.open_pair
        self.open_pair = None
        want = winning_choice(self.f, self.values_before(state, var))
        r = self.color_role(state, state.colors[i])
        is_t = True
        if r == ("set", var):
            is_t = want
        elif r == ("unset", var):
            is_t = not want
        self.witness[i] = self.index[("x_it" if is_t else "x_if", var)]

    def next_item(self, state: GameState) -> int:
        item = self.queue.pop(0)
        if isinstance(item, int):
            return item
        tag, var = item
        if tag == "pair1":
            self.open_pair = (var, state.revealed)
            return self.index[("x_it", var)]
        t = self.index[("x_it", var)]
        return self.index[("x_if", var)] if t in self.witness else t

    def move(self, state):
        self.resolve(state)
        if not self.queue:
            return self.send(self.unrevealed()[0])
        return self.send(self.next_item(state))
