import random

import pytest
from hypothesis import given, strategies as st

from nsplab.corpus import _Gen, generate_corpus
from nsplab.reduction import FuelExhausted, Value, evaluate
from nsplab.syntax import parse
from nsplab.terms import NAT, Var, alpha_eq, in_language, substitute, term_is_product_free
from nsplab.translations import (eliminate_products, lockstep_check, strict_to_lazy, t_min_to_w,
                                 to_pcf, w_to_t_min)

from conftest import programs


def value(M, fuel=10 ** 6):
    return evaluate(M, fuel=fuel).outcome


def test_min_translation_agrees():
    # min returns the first i >= n with F i = 0, so x - 3 already vanishes at 0
    M = parse("(min (lam (x nat) (sub:rec x 3)) 0)")
    assert value(M) == value(to_pcf(M)) == Value(0)
    M = parse("(min (lam (x nat) (sub:rec 3 x)) 0)")
    assert value(M) == value(to_pcf(M)) == Value(3)


def test_numeral_is_fixed():
    assert alpha_eq(to_pcf(parse("7")), parse("7"))


def test_while_step_is_simulated():
    M = parse("((while nat) (lam (x nat) (ifzero x 1 0)) 3 (lam (x nat) (pre x)))")
    res = lockstep_check(M)
    assert res.ok and res.steps > 0


def test_t_min_to_w_examples():
    M = parse("((rec nat) 0 (lam (x nat) (n nat) (suc x)) 3)")
    assert in_language(t_min_to_w(M), "W")
    assert value(t_min_to_w(M)) == Value(3)
    assert value(t_min_to_w(parse("(min (lam (x nat) 0) 5)"))) == Value(5)
    D = parse("((rec nat) 0 (lam (x nat) (n nat) (suc x)) (min (lam (y nat) 1) 0))")
    assert isinstance(value(D, 5000), FuelExhausted)
    assert isinstance(value(t_min_to_w(D), 5000), FuelExhausted)


def test_w_to_t_min_examples():
    M = parse("((while nat) (lam (n nat) (neq:while n 3)) 0 suc)")
    out = w_to_t_min(M)
    assert in_language(out, "T_min")
    assert value(M) == value(out) == Value(3)
    loop = parse("((while nat) (lam (n nat) 0) 0 suc)")
    assert isinstance(value(loop, 5000), FuelExhausted)
    assert isinstance(value(w_to_t_min(loop), 5000), FuelExhausted)


DIVMOD = """
((while (* nat nat))
  (lam (p (* nat nat)) (ifzero (lt:while (snd p) 5) 1 0))
  (pair 0 17)
  (lam (p (* nat nat)) (pair (suc (fst p)) (sub:while (snd p) 5))))
"""


@pytest.mark.parametrize("proj,expected", [("fst", divmod(17, 5)[0]), ("snd", divmod(17, 5)[1])])
def test_while_over_pairs(proj, expected):
    M = parse("(%s %s)" % (proj, DIVMOD))
    assert value(M) == Value(expected)
    assert value(w_to_t_min(M)) == Value(expected)


GCD = """
(fst ((while (* nat nat))
  (lam (p (* nat nat)) (neq:while (fst p) (snd p)))
  (pair 12 18)
  (lam (p (* nat nat))
    ((ifzero (* nat nat)) (lt:while (snd p) (fst p))
       (pair (sub:while (fst p) (snd p)) (snd p))
       (pair (fst p) (sub:while (snd p) (fst p)))))))
"""


def test_product_elimination_examples():
    M = parse("(suc 4)")
    assert alpha_eq(eliminate_products(M), M)
    assert value(eliminate_products(parse("(fst (pair 4 7))"))) == Value(4)
    g = parse(GCD)
    out = eliminate_products(g)
    assert term_is_product_free(out)
    assert value(g) == value(out) == Value(6)


def _same(a, b):
    if isinstance(a, Value) or isinstance(b, Value):
        return a == b
    return True


@pytest.mark.parametrize("lang", ["W", "T_min", "W0_str", "T0_str_min"])
@given(data=st.data())
def test_lockstep_on_corpus(lang, data):
    M = data.draw(programs(lang))
    res = lockstep_check(M)
    assert res.ok, res.failure


@given(programs("T_min"))
def test_dagger_preserves_ground_values(M):
    assert _same(value(M, 50000), value(t_min_to_w(M), 200000))


@given(programs("W"))
def test_double_dagger_preserves_ground_values(M):
    a, b = value(M, 50000), value(w_to_t_min(M), 500000)
    assert _same(a, b)


@pytest.mark.parametrize("lang", ["T0_str", "T0_str_min", "W0_str"])
@given(data=st.data())
def test_strict_to_lazy_preserves_ground_values(lang, data):
    M = data.draw(programs(lang))
    assert _same(value(M, 50000), value(strict_to_lazy(M), 200000))


@given(programs("PCF_byval", products=True))
def test_product_elimination_preserves_ground_values(M):
    assert _same(value(M, 50000), value(eliminate_products(M), 200000))


@given(st.integers(0, 2 ** 32))
def test_translation_commutes_with_substitution(seed):
    rng = random.Random(seed)
    x = Var("x", NAT)
    g = _Gen(rng, "T_min", False)
    M = g.nat([x], 3)
    N = generate_corpus(seed, 1, "T_min", 2)[0]
    assert alpha_eq(to_pcf(substitute(M, x, N)), substitute(to_pcf(M), x, to_pcf(N)))
