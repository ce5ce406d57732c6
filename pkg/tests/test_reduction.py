import random

import pytest
from hypothesis import given, strategies as st

from nsplab.corpus import _Gen
from nsplab.reduction import (FuelExhausted, Value, evaluate, observationally_distinct_witness, step,
                              step_detail)
from nsplab.syntax import parse
from nsplab.terms import (NAT, PRE, SUC, App, Byval, IFZERO, LangTag, MembershipError, Num, Rec,
                          RecStr, Var, Y, alpha_eq, app, in_language, lam)
from nsplab.types import arrow

from conftest import programs

N2N = arrow(NAT, NAT)


def test_ifzero_zero_rule():
    new, rule = step(App(IFZERO, Num(0)))
    assert rule == "ifzero-zero"
    assert alpha_eq(new, parse("(lam (x nat) (y nat) x)"))


def test_pre_zero_rule():
    new, rule = step(App(PRE, Num(0)))
    assert rule == "pre-zero" and new.n == 0


def test_while_rule_shape_and_value():
    M = parse("((while nat) (lam (x nat) x) 3 suc)")
    new, rule = step(M)
    assert rule == "while"
    want = parse("(ifzero ((lam (x nat) x) 3) ((while nat) (lam (x nat) x) (suc 3) suc) 3)")
    assert alpha_eq(new, want)
    assert evaluate(M).outcome == Value(3)


def test_evaluate_examples():
    assert evaluate(parse("(min (lam (x nat) 0) 5)")).outcome == Value(5)
    out = evaluate(parse("((Y nat) (lam (x nat) x))"), fuel=1000).outcome
    assert isinstance(out, FuelExhausted) and out.steps == 1000
    assert evaluate(parse("((rec nat) 0 (lam (x nat) (n nat) (suc x)) 3)")).outcome == Value(3)


def test_fuel_must_be_positive():
    with pytest.raises(ValueError):
        evaluate(Num(0), fuel=0)


def test_step_checks_membership():
    with pytest.raises(MembershipError):
        step(parse("(min (lam (x nat) 0) 5)"), "T")


def test_observational_witnesses():
    f = Var("f", N2N)
    n = Var("n", NAT)
    lhs = Byval((), NAT)
    rhs = lam(f, n, app(IFZERO, n, App(f, n), App(f, n)))
    x = Var("x", NAT)
    fs = [lam(x, Num(0)), lam(x, App(SUC, x)), lam(x, App(PRE, x)), lam(x, Num(7))]
    corpus = [(g, Num(k)) for g in fs for k in range(4)]
    assert observationally_distinct_witness(lhs, rhs, corpus) is None

    w = observationally_distinct_witness(SUC, PRE, [(Num(0),)])
    assert w is not None and w[1] == Value(1) and w[2] == Value(0)

    bot = App(Y(NAT), lam(x, x))
    body = lam(x, n, Num(0))
    strict = lam(Var("u", NAT), app(RecStr(NAT), bot, body, Num(1)))
    lazy = lam(Var("u", NAT), app(Rec(NAT), bot, body, Num(1)))
    w = observationally_distinct_witness(strict, lazy, [(Num(0),)], fuel=2000)
    assert w is not None and isinstance(w[1], FuelExhausted) and w[2] == Value(0)


def _trace(M, limit=400):
    out = []
    cur = M
    for _ in range(limit):
        r = step_detail(cur)
        if r is None:
            break
        out.append((cur, r[0], r[1]))
        cur = r[0]
    return out


@given(programs("PCF_byval"))
def test_determinism(M):
    for cur, _, _ in _trace(M, 100):
        a, b = step_detail(cur), step_detail(cur)
        assert alpha_eq(a[0], b[0]) and a[1] == b[1]


@pytest.mark.parametrize("lang", ["PCF_byval", "T_min", "W", "T0_str_min", "W0_str"])
@given(data=st.data())
def test_subject_reduction(lang, data):
    M = data.draw(programs(lang))
    for cur, nxt, rule in _trace(M, 150):
        assert nxt.type is cur.type
        assert in_language(nxt, lang), rule


@given(programs("T_min"))
def test_value_soundness(M):
    tr = evaluate(M, fuel=20000)
    if isinstance(tr.outcome, Value):
        assert isinstance(tr.final, Num) and tr.final.n == tr.outcome.n


@given(st.integers(0, 2 ** 32), st.integers(0, 4))
def test_strict_and_lazy_rec_agree_on_total_arguments(seed, n):
    g = _Gen(random.Random(seed), "B", False)
    x, k = Var("x", NAT), Var("k", NAT)
    X = g.nat([], 2)
    F = lam(x, k, g.nat([x, k], 2))
    a = evaluate(app(RecStr(NAT), X, F, Num(n))).outcome
    b = evaluate(app(Rec(NAT), X, F, Num(n))).outcome
    assert isinstance(a, Value) and a == b
