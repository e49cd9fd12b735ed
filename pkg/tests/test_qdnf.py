import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import flat_qbf
from onlinecolor.qdnf import (
    EVAL_LIMIT,
    EXISTS,
    FORALL,
    QdnfError,
    QdnfFormula,
    QdnfParseError,
    evaluate_qdnf,
    format_qdnf,
    negate,
    parse_qdnf,
    value_after,
    winning_choice,
)


@st.composite
def formulas(draw, max_vars=4, max_clauses=3):
    n = draw(st.integers(1, max_vars))
    prefix = tuple((v, draw(st.sampled_from([FORALL, EXISTS]))) for v in range(1, n + 1))
    lit = st.tuples(st.integers(1, n), st.booleans())
    clauses = draw(st.lists(st.tuples(lit, lit, lit), min_size=1, max_size=max_clauses))
    return QdnfFormula(prefix, tuple(clauses))


def test_parse_example():
    f = parse_qdnf("A x1 E x2 : (x1 & ~x2 & x2) | (~x1 & x2 & x2)")
    assert f.prefix == ((1, FORALL), (2, EXISTS))
    assert f.clauses == (((1, True), (2, False), (2, True)), ((1, False), (2, True), (2, True)))
    assert (f.n, f.m, f.n_forall, f.n_exists) == (2, 2, 1, 1)


@given(formulas(max_vars=5, max_clauses=4))
def test_format_roundtrip(f):
    assert parse_qdnf(format_qdnf(f)) == f


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("A x1 : (x1 & x2 & x1)", 1, 14),
        ("A x1 : (x1 & x1)", 1, 8),
        ("A x1 A x1 : (x1 & x1 & x1)", 1, 8),
        ("A x1 :\n (x1 & x1 & x1) ?", 2, 17),
        ("A x1 (x1 & x1 & x1)", 1, 6),
        ("A x1 : (x1 & x1 & x1) (x1 & x1 & x1)", 1, 23),
    ],
)
def test_parse_errors_have_locations(text, line, col):
    with pytest.raises(QdnfParseError) as e:
        parse_qdnf(text)
    assert (e.value.line, e.value.column) == (line, col)


def test_comments_are_ignored():
    f = parse_qdnf("# header\nE x1 : (x1 & x1 & x1)  # tail\n")
    assert evaluate_qdnf(f) is True


def test_constructor_validation():
    with pytest.raises(QdnfError):
        QdnfFormula(((1, FORALL), (1, EXISTS)), ())
    with pytest.raises(QdnfError):
        QdnfFormula(((1, FORALL),), (((2, True), (1, True), (1, True)),))


def test_trivial_values():
    assert evaluate_qdnf(parse_qdnf("A x1 : (x1&x1&x1)")) is False
    assert evaluate_qdnf(parse_qdnf("E x1 : (x1&x1&x1)")) is True
    assert evaluate_qdnf(parse_qdnf("A x1 : (x1&x1&x1) | (~x1&~x1&~x1)")) is True
    assert evaluate_qdnf(parse_qdnf("E x1 A x2 : (x1&x2&x2) | (x1&~x2&~x2)")) is True
    assert evaluate_qdnf(parse_qdnf("A x1 E x2 : (x1&x2&x2) | (~x1&~x2&~x2)")) is True
    assert evaluate_qdnf(parse_qdnf("E x2 A x1 : (x1&x2&x2) | (~x1&~x2&~x2)")) is False


@settings(max_examples=300)
@given(formulas(max_vars=5, max_clauses=4))
def test_evaluator_matches_flat_enumeration(f):
    assert evaluate_qdnf(f) == flat_qbf(f.prefix, f.clauses)


def flat_from(f, vals):
    """Flat min/max over the variables after the pinned prefix ``vals``."""
    assign = dict(zip(f.variables, vals))

    def rec(i, a):
        if i == f.n:
            return f.matrix_value(a)
        var, q = f.prefix[i]
        r = [rec(i + 1, {**a, var: b}) for b in (False, True)]
        return all(r) if q == FORALL else any(r)

    return rec(len(vals), assign)


@settings(max_examples=150)
@given(formulas(max_vars=4, max_clauses=3), st.data())
def test_value_after_and_winning_choice(f, data):
    d = data.draw(st.integers(0, f.n - 1))
    vals = tuple(data.draw(st.lists(st.booleans(), min_size=d, max_size=d)))
    assert value_after(f, vals) == flat_from(f, vals)
    choice = winning_choice(f, vals)
    want = f.prefix[d][1] == EXISTS
    good = [b for b in (True, False) if flat_from(f, vals + (b,)) == want]
    if good:
        assert choice in good


@settings(max_examples=150)
@given(formulas(max_vars=4, max_clauses=3))
def test_negation_is_dual(f):
    prefix, cnf = negate(f)

    def rec(i, a):
        if i == len(prefix):
            return all(any(a[v] == s for v, s in c) for c in cnf)
        var, q = prefix[i]
        r = [rec(i + 1, {**a, var: b}) for b in (False, True)]
        return all(r) if q == FORALL else any(r)

    assert rec(0, {}) == (not evaluate_qdnf(f))


def test_evaluation_size_limit():
    n = EVAL_LIMIT + 1
    text = " ".join(f"E x{i}" for i in range(1, n + 1)) + " : (x1 & x1 & x1)"
    with pytest.raises(QdnfError):
        evaluate_qdnf(parse_qdnf(text))
