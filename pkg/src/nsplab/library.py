"""Named first-order arithmetic programs and the sequence coding.

Each library function has one body per *family*, differing only in the
primitive-recursion scheme used underneath:

    str    rec-str over nat           (T0_str and everything above it)
    rec    lazy rec over nat          (T, T_min)
    while  while over nat x nat x nat (W)
    pcf    Y-recursion                (PCF)

The host functions at the bottom are the reference semantics; tests check
every body against them on small grids.

Sequence codes: code(<>) = 0 and code(x.z) = cantor(code x, z) + 1, where
cantor(a, b) = (a+b)(a+b+1)/2 + b.
"""

import threading
from math import isqrt

from .terms import (IFZERO, NAT, PRE, SUC, App, Byval, Fst, Lib, Num, Pair, Rec, RecStr,
                    Snd, Var, While, Y, app, fresh_var, ifz, lam, names_of)
from .types import Product, arrow, product

_build_lock = threading.RLock()


# --- byval_[sigma] for level-0 sigma ------------------------------------------

def byval_bracket(sigma, rho=None):
    """The operator byval_[sigma] : (sigma -> rho) -> sigma -> rho (rho defaults to sigma).

    byval_[nat] is the constant byval with no leading arguments; products are
    handled by forcing the first component, then the second.
    """
    rho = sigma if rho is None else rho
    if sigma is NAT:
        return Byval((), rho)
    if not isinstance(sigma, Product):
        raise TypeError("byval_[%s]: only level-0 types are supported" % sigma)
    f = Var("f", arrow(sigma, rho))
    x = Var("x", sigma)
    y = Var("y", sigma.left)
    z = Var("z", sigma.right)
    inner = lam(z, App(f, Pair(y, z)))
    outer = lam(y, app(byval_bracket(sigma.right, rho), inner, Snd(x)))
    return lam(f, x, app(byval_bracket(sigma.left, rho), outer, Fst(x)))


# --- recursion schemes ---------------------------------------------------------

def _avoid(*terms):
    out = set()
    for t in terms:
        out |= names_of(t.fv)
    return out


def recursor(family):
    """R(X, F, n) building `rec X F n` in the given family; F : nat->nat->nat."""
    if family == "str":
        return lambda X, F, n: app(RecStr(NAT), X, F, n)
    if family == "rec":
        return lambda X, F, n: app(Rec(NAT), X, F, n)
    if family == "while":
        return _while_rec
    if family == "pcf":
        return _pcf_rec
    raise ValueError("unknown family %r" % family)


def _pcf_rec(X, F, n):
    avoid = _avoid(X, F)
    r = fresh_var("r", arrow(NAT, NAT), avoid)
    m = fresh_var("m", NAT, avoid | {r.name})
    body = ifz(m, X, app(F, App(r, App(PRE, m)), App(PRE, m)))
    return app(Y(arrow(NAT, NAT)), lam(r, m, body), n)


_STATE = product(product(NAT, NAT), NAT)


def _while_rec(X, F, n):
    # state ((remaining, counter), acc); loop while remaining > 0
    avoid = _avoid(X, F, n)
    p = fresh_var("p", _STATE, avoid)
    cond = lam(p, ifz(Fst(Fst(p)), Num(1), Num(0)))
    step = lam(p, Pair(Pair(App(PRE, Fst(Fst(p))), App(SUC, Snd(Fst(p)))),
                       app(F, Snd(p), Snd(Fst(p)))))
    start = Pair(Pair(n, Num(0)), X)
    return Snd(app(While(_STATE), cond, start, step))


# --- bodies ----------------------------------------------------------------------

def _v(name):
    return Var(name, NAT)


def _bodies(fam):
    R = recursor(fam)

    def L(name):
        return Lib(name, fam)

    a, b, c, x, z, i, j, k, n, acc = (_v(s) for s in "a b c x z i j k n acc".split())
    out = {}
    out["plus"] = lam(a, b, R(a, lam(x, k, App(SUC, x)), b))
    out["sub"] = lam(a, b, R(a, lam(x, k, App(PRE, x)), b))
    out["double"] = lam(a, app(L("plus"), a, a))
    # tri n = 0 + 1 + ... + n
    out["tri"] = lam(n, R(Num(0), lam(x, k, app(L("plus"), x, App(SUC, k))), n))
    out["cantor"] = lam(a, b, app(L("plus"), App(L("tri"), app(L("plus"), a, b)), b))
    # diagonal index of m: the largest s with tri s <= m
    diag = lam(n, R(Num(0), lam(x, k, ifz(app(L("sub"), App(L("tri"), App(SUC, x)), App(SUC, k)),
                                          App(SUC, x), x)), n))
    # last / init of a nonzero code: unpair (c - 1)
    m = App(PRE, c)
    lastb = app(L("sub"), m, App(L("tri"), App(diag, m)))
    out["last"] = lam(c, lastb)
    out["init"] = lam(c, app(L("sub"), App(diag, m), lastb))
    # iterate init k times
    it = lambda cc, kk: R(cc, lam(x, j, App(L("init"), x)), kk)
    out["len"] = lam(c, R(Num(0), lam(acc, k, ifz(it(c, k), acc, App(SUC, acc))), c))
    out["index"] = lam(c, i, App(L("last"), it(c, app(L("sub"), App(PRE, App(L("len"), c)), i))))
    out["add"] = lam(c, z, App(SUC, app(L("cantor"), c, z)))
    out["eq"] = lam(a, b, ifz(app(L("sub"), a, b), ifz(app(L("sub"), b, a), Num(0), Num(1)), Num(1)))
    out["neq"] = lam(a, b, ifz(app(L("eq"), a, b), Num(1), Num(0)))
    out["lt"] = lam(a, b, ifz(app(L("sub"), b, a), Num(1), Num(0)))
    out["basic"] = lam(c, j, i, ifz(app(L("lt"), i, App(L("len"), c)), app(L("index"), c, i), j))
    return out


_cache = {}


def body(name, family="str"):
    """The closed term that ``Lib(name, family)`` stands for."""
    key = (name, family)
    hit = _cache.get(key)
    if hit is None:
        with _build_lock:
            if family not in {f for (_, f) in _cache}:
                for nm, t in _bodies(family).items():
                    _cache[(nm, family)] = t
            hit = _cache[key]
    return hit


# --- host semantics ----------------------------------------------------------------

def cantor(a, b):
    s = a + b
    return s * (s + 1) // 2 + b


def uncantor(m):
    s = (isqrt(8 * m + 1) - 1) // 2
    b = m - s * (s + 1) // 2
    return s - b, b


def seq_add(c, z):
    return cantor(c, z) + 1


def seq_init(c):
    return uncantor(c - 1)[0] if c else 0


def seq_last(c):
    return uncantor(c - 1)[1] if c else 0


def decode(c):
    """Code to list of naturals."""
    out = []
    while c:
        c, z = uncantor(c - 1)
        out.append(z)
    out.reverse()
    return out


def encode(xs):
    c = 0
    for z in xs:
        c = seq_add(c, z)
    return c


def seq_len(c):
    n = 0
    while c:
        c = uncantor(c - 1)[0]
        n += 1
    return n


def seq_index(c, i):
    # past the end the body returns the last entry (or 0 for the empty code)
    xs = decode(c)
    return xs[min(i, len(xs) - 1)] if xs else 0


def basic_value(c, j, i):
    xs = decode(c)
    return xs[i] if i < len(xs) else j


HOST = {
    "sub": lambda a, b: max(a - b, 0),
    "plus": lambda a, b: a + b,
    "double": lambda a: 2 * a,
    "tri": lambda n: n * (n + 1) // 2,
    "cantor": cantor,
    "add": seq_add,
    "init": seq_init,
    "last": seq_last,
    "len": seq_len,
    "index": seq_index,
    "basic": basic_value,
    "eq": lambda a, b: 0 if a == b else 1,
    "neq": lambda a, b: 1 if a == b else 0,
    "lt": lambda a, b: 0 if a < b else 1,
}


_expanded = {}


def expand(t):
    """t with every library reference replaced by its (expanded) body."""
    from .translations import _map_term

    def lib(u):
        key = (u.name, u.family)
        hit = _expanded.get(key)
        if hit is None:
            hit = _expanded.setdefault(key, expand(body(u.name, u.family)))
        return hit
    return _map_term(t, lambda c: c, lib)
