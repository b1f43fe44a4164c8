from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from grpdasm.pca import (
    App, I, K, KBAR, PRED, S, ZERO_TEST, Normal, OutOfFuel, TermSyntaxError, Var,
    ap, bracket_abstract, free_vars, church, church_value, enumerate_terms, evaluate, lam, lookup_combinator,
    mk_pair, nf, paper_lookup_combinator, parse_term, show, std, substitute, unpair,
)

closed_terms = st.integers(0, len(enumerate_terms(5)) - 1).map(lambda i: enumerate_terms(5)[i])


def normals(max_size: int = 6):
    pool = [t for t in enumerate_terms(max_size) if evaluate(t).result is t]
    return st.sampled_from(pool)


# ------------------------------------------------------------------ parsing

def test_parse_atoms_and_structure():
    assert parse_term("k") is K
    assert parse_term("((s k) k)") is App(App(S, K), K)
    assert parse_term("(k x)") is App(K, Var("x"))


def test_parse_sequences_are_left_associative():
    assert parse_term("(s k k x)") is ap(S, K, K, Var("x"))
    assert parse_term("s k k") is ap(S, K, K)


@pytest.mark.parametrize("text,pos", [("", 0), ("(", 0), ("(k", 0), ("k)", 1), ("()", 0), ("(k ())", 3), ("K", 0)])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(TermSyntaxError) as ei:
        parse_term(text)
    assert ei.value.position == pos


@given(closed_terms)
def test_print_parse_round_trip(t):
    assert parse_term(show(t)) is t


def test_variable_names_validated():
    with pytest.raises(ValueError):
        Var("X")
    with pytest.raises(ValueError):
        Var("")


# --------------------------------------------------------------- evaluation

def test_k_and_identity():
    a, b = Var("a"), Var("b")
    assert evaluate(ap(K, a, b)) == Normal(a, 1)
    assert evaluate(ap(S, K, K, a)).result is a


def test_omega_runs_out_of_fuel():
    sii = ap(S, I, I)
    out = evaluate(App(sii, sii), 1000)
    assert isinstance(out, OutOfFuel)


def test_fuel_must_be_positive():
    with pytest.raises(ValueError):
        evaluate(K, 0)


def test_steps_bounded_by_fuel_and_monotone():
    t = ap(S, K, K, ap(S, K, K, K))
    out = evaluate(t)
    assert isinstance(out, Normal) and out.steps <= 10_000
    for fuel in range(out.steps, out.steps + 5):
        assert evaluate(t, fuel) == out
    assert isinstance(evaluate(t, out.steps - 1), OutOfFuel)


def _has_redex(t):
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, App):
            args, h = [], u
            while isinstance(h, App):
                args.append(h.arg)
                h = h.fun
            if (h is K and len(args) >= 2) or (h is S and len(args) >= 3):
                return True
            stack.extend(args)
    return False


@settings(max_examples=150, deadline=None)
@given(st.integers(0, len(enumerate_terms(7)) - 1))
def test_normal_results_contain_no_redex(i):
    out = evaluate(enumerate_terms(7)[i], 2000)
    if isinstance(out, Normal):
        assert not _has_redex(out.result)


@settings(max_examples=100, deadline=None)
@given(normals(), normals(), normals())
def test_pca_axioms(a, b, c):
    assert evaluate(ap(K, a, b)).result is a
    assert isinstance(evaluate(ap(S, a, b)), Normal)
    lhs, rhs = evaluate(ap(S, a, b, c)), evaluate(ap(a, c, App(b, c)))
    if isinstance(lhs, Normal) and isinstance(rhs, Normal):
        assert lhs.result is rhs.result


# -------------------------------------------------------- bracket abstraction

def test_bracket_examples():
    x = Var("x")
    assert bracket_abstract("x", x) is I
    assert bracket_abstract("x", K) is App(K, K)
    assert bracket_abstract("x", App(x, x)) is ap(S, I, I)


def test_bracket_result_is_x_free():
    t = parse_term("(x (y x) k)")
    assert free_vars(bracket_abstract("x", t)) == {"y"}


@st.composite
def one_var_terms(draw, max_size=7):
    n = draw(st.integers(1, max_size))

    def build(n):
        if n == 1:
            return draw(st.sampled_from([S, K, Var("x")]))
        left = draw(st.integers(1, n - 1))
        return App(build(left), build(n - left))

    return build(n)


@settings(max_examples=150, deadline=None)
@given(one_var_terms(), normals(5))
def test_beta_law(t, a):
    rhs = evaluate(substitute(t, "x", a))
    if isinstance(rhs, Normal):
        lhs = evaluate(App(bracket_abstract("x", t), a))
        assert isinstance(lhs, Normal) and lhs.result is rhs.result


# ------------------------------------------------------- derived combinators

def test_std_names_and_unknown():
    for name in ("i", "kbar", "pair", "p0", "p1", "ifthen", "app", "fix", "fixf"):
        assert std(name).closed
    with pytest.raises(KeyError):
        std("nope")


def test_kbar_selects_second():
    a, b = Var("a"), Var("b")
    assert nf(ap(std("kbar"), a, b)) is b
    assert KBAR is App(K, I)


@settings(max_examples=60, deadline=None)
@given(normals(), normals())
def test_pair_laws(a, b):
    p = nf(ap(std("pair"), a, b))
    assert p is mk_pair(a, b)
    assert unpair(p) == (a, b)
    assert nf(ap(std("p0"), p)) is a
    assert nf(ap(std("p1"), p)) is b


def test_ifthen_and_app():
    x, y = Var("x"), Var("y")
    assert nf(ap(std("ifthen"), K, x, y)) is x
    assert nf(ap(std("ifthen"), KBAR, x, y)) is y
    assert nf(ap(std("app"), x, y)) is App(x, y)


def test_fixf_unfolds():
    f = lam("g n", ap(std("ifthen"), App(ZERO_TEST, Var("n")), K, ap(Var("g"), App(PRED, Var("n")))))
    for n in range(3):
        lhs = evaluate(ap(std("fixf"), f, church(n)))
        rhs = evaluate(ap(f, App(std("fixf"), f), church(n)))
        assert isinstance(lhs, Normal) and isinstance(rhs, Normal)
        assert lhs.result is rhs.result is K


def test_fix_is_fixed_point():
    g = lam("r x", Var("x"))
    assert nf(App(App(std("fix"), g), S)) is S


def test_numerals():
    assert nf(App(ZERO_TEST, church(0))) is K
    for n in range(1, 8):
        assert nf(App(ZERO_TEST, church(n))) is KBAR
        assert nf(App(PRED, church(n))) is church(n - 1)
        assert church_value(church(n)) == n
    assert church_value(K) is None


# ------------------------------------------------------------------- lookup

def test_lookup_examples():
    a, b = church(5), K
    assert nf(App(lookup_combinator([a]), church(0))) is a
    assert nf(App(lookup_combinator([a, b]), church(1)), 10**5) is b
    lookup_combinator([])


def test_lookup_agrees_with_literal_construction():
    table = [K, S, I, KBAR]
    lit, fast = paper_lookup_combinator(table), lookup_combinator(table)
    for i, r in enumerate(table):
        assert nf(App(lit, church(i)), 10**6) is r
        assert nf(App(fast, church(i))) is r


def test_lookup_long_table_within_default_fuel():
    table = [church(i + 1) for i in range(25)]
    L = lookup_combinator(table)
    for i in (0, 12, 24):
        assert nf(App(L, church(i))) is table[i]


# -------------------------------------------------------------- enumeration

def test_enumeration_counts_and_prefix():
    assert enumerate_terms(1) == [S, K]
    assert len(enumerate_terms(2)) == 6
    assert [len(enumerate_terms(n)) for n in range(1, 6)] == [2, 6, 22, 102, 550]
    for n in range(1, 6):
        assert enumerate_terms(n + 1)[: len(enumerate_terms(n))] == enumerate_terms(n)
    assert enumerate_terms(0) == []
    assert len(set(map(id, enumerate_terms(5)))) == 550


def test_lookup_is_a_normal_form_and_scales():
    table = [church(i) for i in range(100)]
    L = lookup_combinator(table)
    assert evaluate(L).steps == 0
    out = evaluate(App(L, church(99)))
    assert isinstance(out, Normal) and out.result is table[99]
