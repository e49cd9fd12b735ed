"""Fully quantified formulas whose matrix is a disjunction of three-literal
conjunctions.

Concrete syntax::

    A x1 E x2 : (x1 & ~x2 & x2) | (~x1 & x2 & x2)

``A``/``E`` quantify variables (named ``x<number>``) in order, the matrix
follows the colon.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

FORALL = "A"
EXISTS = "E"

EVAL_LIMIT = 24

Literal = tuple[int, bool]  # (variable id, positive?)


class QdnfError(ValueError):
    pass


class QdnfParseError(QdnfError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


@dataclass(frozen=True)
class QdnfFormula:
    prefix: tuple[tuple[int, str], ...]
    clauses: tuple[tuple[Literal, Literal, Literal], ...]

    def __post_init__(self):
        seen = set()
        for var, q in self.prefix:
            if q not in (FORALL, EXISTS):
                raise QdnfError(f"unknown quantifier {q!r}")
            if var in seen:
                raise QdnfError(f"variable x{var} quantified twice")
            seen.add(var)
        for clause in self.clauses:
            if len(clause) != 3:
                raise QdnfError(f"clause {clause} does not have exactly 3 literals")
            for var, _ in clause:
                if var not in seen:
                    raise QdnfError(f"variable x{var} is not quantified")

    @property
    def variables(self) -> list[int]:
        return [v for v, _ in self.prefix]

    @property
    def n(self) -> int:
        return len(self.prefix)

    @property
    def m(self) -> int:
        return len(self.clauses)

    @property
    def n_forall(self) -> int:
        return sum(q == FORALL for _, q in self.prefix)

    @property
    def n_exists(self) -> int:
        return sum(q == EXISTS for _, q in self.prefix)

    def quantifier(self, var: int) -> str:
        return dict(self.prefix)[var]

    def position(self, var: int) -> int:
        return self.variables.index(var)

    def matrix_value(self, assignment: dict[int, bool]) -> bool:
        return any(all(assignment[v] == s for v, s in clause) for clause in self.clauses)

    def __str__(self) -> str:
        return format_qdnf(self)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(?P<var>x\d+)|(?P<q>[AE])\b|(?P<op>[:&|~()]))")


def _tokens(text: str):
    line_starts = [0]
    for i, ch in enumerate(text):
        if ch == "\n":
            line_starts.append(i + 1)

    def where(pos: int) -> tuple[int, int]:
        line = max(i for i, s in enumerate(line_starts) if s <= pos)
        return line + 1, pos - line_starts[line] + 1

    # strip comments without moving offsets
    text = re.sub(r"#[^\n]*", lambda m: " " * len(m.group()), text)
    pos = 0
    out = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise QdnfParseError(f"unexpected character {text[pos]!r}", *where(pos))
        start = m.start(m.lastgroup)
        out.append((m.group(m.lastgroup), where(start)))
        pos = m.end()
    out.append(("<end>", where(len(text))))
    return out


def parse_qdnf(text: str) -> QdnfFormula:
    toks = _tokens(text)
    i = 0

    def peek():
        return toks[i][0]

    def take(expected: str | None = None):
        nonlocal i
        tok, loc = toks[i]
        if expected is not None and tok != expected:
            raise QdnfParseError(f"expected {expected!r}, found {tok!r}", *loc)
        i += 1
        return tok, loc

    prefix: list[tuple[int, str]] = []
    seen: set[int] = set()
    while peek() in (FORALL, EXISTS):
        q, _ = take()
        tok, loc = take()
        if not tok.startswith("x"):
            raise QdnfParseError(f"expected a variable after {q}, found {tok!r}", *loc)
        var = int(tok[1:])
        if var in seen:
            raise QdnfParseError(f"variable {tok} quantified twice", *loc)
        seen.add(var)
        prefix.append((var, q))
    take(":")
    clauses = []
    while True:
        _, open_loc = take("(")
        lits: list[Literal] = []
        while True:
            positive = True
            if peek() == "~":
                take()
                positive = False
            tok, loc = take()
            if not tok.startswith("x"):
                raise QdnfParseError(f"expected a literal, found {tok!r}", *loc)
            var = int(tok[1:])
            if var not in seen:
                raise QdnfParseError(f"variable {tok} is not quantified", *loc)
            lits.append((var, positive))
            if peek() == "&":
                take()
                continue
            break
        take(")")
        if len(lits) != 3:
            raise QdnfParseError(f"clause has {len(lits)} literals, expected 3", *open_loc)
        clauses.append(tuple(lits))
        if peek() == "|":
            take()
            continue
        break
    tok, loc = toks[i]
    if tok != "<end>":
        raise QdnfParseError(f"trailing input {tok!r}", *loc)
    return QdnfFormula(tuple(prefix), tuple(clauses))


def format_qdnf(f: QdnfFormula) -> str:
    head = " ".join(f"{q} x{v}" for v, q in f.prefix)
    body = " | ".join(
        "(" + " & ".join(("" if s else "~") + f"x{v}" for v, s in clause) + ")" for clause in f.clauses
    )
    return f"{head} : {body}" if head else f": {body}"


# ---------------------------------------------------------------------------
# evaluation


def _check_size(f: QdnfFormula) -> None:
    if f.n > EVAL_LIMIT:
        raise QdnfError(f"evaluation refused: {f.n} variables exceeds the limit of {EVAL_LIMIT}")


def evaluate_qdnf(f: QdnfFormula) -> bool:
    _check_size(f)
    return value_after(f, ())


def value_after(f: QdnfFormula, values: tuple[bool, ...]) -> bool:
    """Game value once the first ``len(values)`` prefix variables are fixed."""
    return _evaluator(f)(tuple(values))


@lru_cache(maxsize=64)
def _evaluator(f: QdnfFormula):
    _check_size(f)
    order = {v: i for i, (v, _) in enumerate(f.prefix)}
    # clause as (index, sign) pairs in prefix positions
    clauses = [tuple((order[v], s) for v, s in c) for c in f.clauses]
    quant = [q for _, q in f.prefix]

    @lru_cache(maxsize=None)
    def val(values: tuple[bool, ...]) -> bool:
        d = len(values)
        if d == len(quant):
            return any(all(values[i] == s for i, s in c) for c in clauses)
        # clauses already decided
        live = False
        for c in clauses:
            if all(i >= d or values[i] == s for i, s in c):
                if all(i < d for i, _ in c):
                    return True
                live = True
        if not live:
            return False
        a, b = val(values + (True,)), val(values + (False,))
        return (a and b) if quant[d] == FORALL else (a or b)

    return val


def winning_choice(f: QdnfFormula, values: tuple[bool, ...], prefer: bool = True) -> bool:
    """The value for prefix variable ``len(values)`` that keeps the formula
    true (existential) or makes it false (universal); ``prefer`` when both or
    neither work."""
    q = f.prefix[len(values)][1]
    want = q == EXISTS
    if value_after(f, values + (prefer,)) == want:
        return prefer
    if value_after(f, values + (not prefer,)) == want:
        return not prefer
    return prefer


def negate(f: QdnfFormula) -> tuple[tuple[tuple[int, str], ...], tuple[tuple[Literal, ...], ...]]:
    """Dual of ``f``: quantifiers swapped and matrix negated, returned as a
    CNF (prefix, clauses) pair since the negated matrix is conjunctive."""
    prefix = tuple((v, EXISTS if q == FORALL else FORALL) for v, q in f.prefix)
    clauses = tuple(tuple((v, not s) for v, s in c) for c in f.clauses)
    return prefix, clauses
