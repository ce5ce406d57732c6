import pytest
from hypothesis import given, strategies as st

from nsplab.syntax import ParseError, parse, parse_type, show
from nsplab.terms import (LANGS, NAT, SUC, App, IFZERO, LangTag, MembershipError, Num, TermTypeError,
                          Var, alpha_eq, app, check_membership, in_language, lam,
                          long_beta_eta_normal_form, substitute, term_is_product_free)
from nsplab.types import arrow, level, product, pure

from conftest import programs


def test_parse_identity():
    t = parse("(lam (x nat) x)")
    assert t.type is arrow(NAT, NAT)


def test_parse_app_suc():
    t = parse("(app suc 3)")
    assert isinstance(t, App) and t.fn.kind == "suc" and t.arg.n == 3
    assert t.type is NAT


def test_lazy_rec_not_in_strict_language():
    t = parse("(rec nat)")
    with pytest.raises(MembershipError):
        check_membership(t, LangTag.parse("T0_str_min:0"))


def test_parse_errors_carry_position():
    with pytest.raises(ParseError, match="line 1"):
        parse("(lam (x nat) x")
    with pytest.raises(TermTypeError):
        parse("(suc (lam (x nat) x))")


def test_substitute_examples():
    x = Var("x", NAT)
    y = Var("y", NAT)
    assert alpha_eq(substitute(x, x, Num(3)), Num(3))
    out = substitute(lam(y, x), x, y)
    assert out.var.name != "y" and out.body.name == "y"
    t = app(IFZERO, x, Num(1), Num(2))
    assert alpha_eq(substitute(t, x, Num(0)), app(IFZERO, Num(0), Num(1), Num(2)))


def test_substitute_type_mismatch():
    x = Var("x", NAT)
    with pytest.raises(TermTypeError):
        substitute(x, x, SUC)


def test_long_normal_forms():
    x = Var("x", NAT)
    assert alpha_eq(long_beta_eta_normal_form(SUC), lam(x, App(SUC, x)))
    y = Var("y", NAT)
    t = App(lam(Var("f", arrow(NAT, NAT)), Var("f", arrow(NAT, NAT))), lam(y, App(SUC, y)))
    assert alpha_eq(long_beta_eta_normal_form(t), lam(y, App(SUC, y)))
    # min is expanded including its function argument
    m = long_beta_eta_normal_form(parse("min"))
    assert alpha_eq(m, parse("(lam (f (-> nat nat)) (n nat) (min (lam (z nat) (f z)) n))"))


@given(st.integers(0, 6))
def test_pure_type_levels(k):
    assert level(pure(k)) == k


def test_type_levels():
    assert level(NAT) == 0
    assert level(arrow(arrow(NAT, NAT), NAT)) == 2
    assert level(product(arrow(NAT, NAT), NAT)) == 1
    assert parse_type("(-> (-> nat nat) nat)") is pure(2)


@given(programs("B"))
def test_membership_monotone_from_b(t):
    assert all(in_language(t, name) for name in LANGS)


@pytest.mark.parametrize("lang", ["B", "PCF_byval", "T_min", "W", "T0_str_min", "W0_str"])
@given(data=st.data())
def test_print_parse_round_trip(lang, data):
    t = data.draw(programs(lang, products=lang == "B"))
    again = parse(show(t))
    assert alpha_eq(t, again)
    assert again.type is t.type


@given(programs("T_min"))
def test_terms_are_product_free_without_pairs(t):
    assert term_is_product_free(t)
