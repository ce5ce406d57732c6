"""Translations between the languages.

to_pcf        W, T_min and the strict variants into PCF_byval; step-for-step
t_min_to_w    rec and min as while loops (ground values preserved)
w_to_t_min    while as rec plus min (ground values preserved)
strict_to_lazy  rec-str / while-str / byval_[nat] into T_min / W terms
eliminate_products  a product-free term with the same ground behaviour

All of them are homomorphic: only constants (and library references, whose
family is switched) are replaced.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .library import byval_bracket
from .reduction import step_detail
from .terms import (MIN, NAT, PRE, SUC, App, Byval, Const, Fst, Lam, Lib, Num, Pair, Rec,
                    Snd, TermTypeError, Var, While, Y, alpha_eq, app, check_membership, ifz, lam)
from .types import Arrow, arrow, is_product_free, product, split_arrow


def _map_term(t, const_fn, lib_fn=None, var_fn=None):
    """Rebuild t bottom-up, replacing constants (and optionally libs / vars)."""
    memo = {}

    def go(u):
        key = id(u)
        hit = memo.get(key)
        if hit is not None:
            return hit[1]
        cls = type(u)
        if cls is Const:
            r = const_fn(u)
        elif cls is Lib:
            r = lib_fn(u) if lib_fn else u
        elif cls is Var:
            r = var_fn(u) if var_fn else u
        elif cls is Num:
            r = u
        elif cls is App:
            r = App(go(u.fn), go(u.arg))
        elif cls is Lam:
            r = Lam(go(u.var), go(u.body))
        elif cls is Pair:
            r = Pair(go(u.left), go(u.right))
        elif cls is Fst:
            r = Fst(go(u.arg))
        else:
            r = Snd(go(u.arg))
        memo[key] = (u, r)
        return r

    return go(t)


# --- PCF + byval programs --------------------------------------------------------

def _while_type(s):
    return arrow(arrow(s, NAT), s, arrow(s, s), s)


def _rec_type(s):
    return arrow(s, arrow(s, NAT, s), NAT, s)


MU = arrow(arrow(NAT, NAT), NAT, NAT)


@lru_cache(maxsize=None)
def while_program(s):
    """Y_w (\\w c x f. ifzero (c x) (w c (f x) f) x), w the full while type."""
    om = _while_type(s)
    w, c, x, f = Var("w", om), Var("c", arrow(s, NAT)), Var("x", s), Var("f", arrow(s, s))
    body = ifz(App(c, x), app(w, c, App(f, x), f), x)
    return App(Y(om), lam(w, c, x, f, body))


def _byval_plus(s):
    return Byval((s, arrow(s, NAT, s)), s)


@lru_cache(maxsize=None)
def rec_program(s):
    rho = _rec_type(s)
    bp = _byval_plus(s)
    r, x, f, n, n1 = (Var("r", rho), Var("x", s), Var("f", arrow(s, NAT, s)),
                      Var("n", NAT), Var("n'", NAT))
    inner = lam(n1, app(f, app(App(bp, r), x, f, n1), n1))
    body = ifz(n, x, app(Byval((), s), inner, App(PRE, n)))
    return App(bp, App(Y(rho), lam(r, x, f, n, body)))


@lru_cache(maxsize=None)
def min_program():
    bm = Byval((arrow(NAT, NAT),), NAT)
    m, f, n = Var("m", MU), Var("f", arrow(NAT, NAT)), Var("n", NAT)
    body = ifz(App(f, n), n, app(App(bm, m), f, App(SUC, n)))
    return App(bm, App(Y(MU), lam(m, f, n, body)))


@lru_cache(maxsize=None)
def rec_str_program(s):
    rho = _rec_type(s)
    bp = _byval_plus(s)
    r, x, f, n, n1, m = (Var("r", rho), Var("x", s), Var("f", arrow(s, NAT, s)),
                         Var("n", NAT), Var("n'", NAT), Var("m", s))
    inner = lam(n1, app(byval_bracket(s), lam(m, app(f, m, n1)), app(App(bp, r), x, f, n1)))
    body = ifz(n, x, app(Byval((), s), inner, App(PRE, n)))
    return App(bp, App(Y(rho), lam(r, x, f, n, body)))


@lru_cache(maxsize=None)
def while_str_program(s):
    om = _while_type(s)
    w, c, x, f, x1 = (Var("w", om), Var("c", arrow(s, NAT)), Var("x", s),
                      Var("f", arrow(s, s)), Var("x'", s))
    loop = lam(x1, ifz(App(c, x1), app(w, c, App(f, x1), f), x1))
    return App(Y(om), lam(w, c, x, f, app(byval_bracket(s), loop, x)))


def to_pcf(M, source=None):
    """Replace while / rec / min (and their strict forms) by PCF_byval programs."""
    if source is not None:
        check_membership(M, source)

    def const(c):
        k = c.kind
        if k == "while":
            return while_program(c.params[0])
        if k == "rec":
            return rec_program(c.params[0])
        if k == "min":
            return min_program()
        if k == "rec-str":
            return rec_str_program(c.params[0])
        if k == "while-str":
            return while_str_program(c.params[0])
        return c

    return _map_term(M, const, lambda u: Lib(u.name, "pcf"))


# --- T_min <-> W ---------------------------------------------------------------

@lru_cache(maxsize=None)
def rec_prime(s):
    """\\x f n. snd (while_{nat x s} (\\p. fst p != n) <0, x> (\\p. <suc (fst p), f (snd p) (fst p)>))"""
    st = product(NAT, s)
    x, f, n, p = Var("x", s), Var("f", arrow(s, NAT, s)), Var("n", NAT), Var("p", st)
    cond = lam(p, app(Lib("neq", "while"), Fst(p), n))
    step = lam(p, Pair(App(SUC, Fst(p)), app(f, Snd(p), Fst(p))))
    return lam(x, f, n, Snd(app(While(st), cond, Pair(Num(0), x), step)))


@lru_cache(maxsize=None)
def min_prime():
    f, n, n1 = Var("f", arrow(NAT, NAT)), Var("n", NAT), Var("n'", NAT)
    cond = lam(n1, app(Lib("neq", "while"), App(f, n1), Num(0)))
    return lam(f, n, app(While(NAT), cond, n, SUC))


@lru_cache(maxsize=None)
def while_prime(s):
    """\\c x f. rec x (\\x' n. f x') (min (\\n. c (rec x (\\x' n. f x') n) != 0) 0)

    The loop runs while c answers 0, so min looks for the first iterate on
    which c is nonzero.
    """
    c, x, f = Var("c", arrow(s, NAT)), Var("x", s), Var("f", arrow(s, s))
    x1, n = Var("x'", s), Var("n", NAT)
    it = lam(x1, n, App(f, x1))
    test = lam(n, app(Lib("neq", "rec"), App(c, app(Rec(s), x, it, n)), Num(0)))
    return lam(c, x, f, app(Rec(s), x, it, app(MIN, test, Num(0))))


def t_min_to_w(M):
    check_membership(M, "T_min")

    def const(c):
        if c.kind == "rec":
            return rec_prime(c.params[0])
        if c.kind == "min":
            return min_prime()
        return c

    return _map_term(M, const, lambda u: Lib(u.name, "while"))


def w_to_t_min(M):
    check_membership(M, "W")

    def const(c):
        if c.kind == "while":
            return while_prime(c.params[0])
        return c

    return _map_term(M, const, lambda u: Lib(u.name, "rec"))


# --- strict variants into the lazy languages ----------------------------------

@lru_cache(maxsize=None)
def _byval_nat_b(rho=NAT):
    # observationally equal to byval_[nat] at result type rho, but a B term
    f, n = Var("f", arrow(NAT, rho)), Var("n", NAT)
    return lam(f, n, ifz(n, App(f, n), App(f, n)))


def _strict_apply(s, c, x):
    """c x, after forcing every component of the level-0 value x (result nat)."""
    if s is NAT:
        y = Var("y", NAT)
        return app(_byval_nat_b(), lam(y, App(c, y)), x)
    y1, y2 = Var("y1", s.left), Var("y2", s.right)
    tail = _strict_apply(s.right, lam(y2, App(c, Pair(y1, y2))), Snd(x))
    return _strict_apply(s.left, lam(y1, tail), Fst(x))


def _lazy_bracket(s):
    return _lazify(byval_bracket(s))


def _lazify(t):
    def const(c):
        if c.kind == "byval" and len(c.params) == 1:
            return _byval_nat_b(c.params[0])
        return c
    return _map_term(t, const)


@lru_cache(maxsize=None)
def rec_str_lazy(s):
    """rec-str_s as \\x f n. rec_s x (\\y m. byval_[s] (\\y'. f y' m) y) n."""
    x, f, n = Var("x", s), Var("f", arrow(s, NAT, s)), Var("n", NAT)
    y, m, y1 = Var("y", s), Var("m", NAT), Var("y'", s)
    step = lam(y, m, app(_lazy_bracket(s), lam(y1, app(f, y1, m)), y))
    return lam(x, f, n, app(Rec(s), x, step, n))


@lru_cache(maxsize=None)
def while_str_lazy(s):
    """while-str_s as a lazy while whose test forces the current value."""
    c, x, f, z = Var("c", arrow(s, NAT)), Var("x", s), Var("f", arrow(s, s)), Var("z", s)
    return lam(c, x, f, app(While(s), lam(z, _strict_apply(s, c, z)), x, f))


def strict_to_lazy(M):
    """T0_str(+min) into T(+min), W0_str into W."""

    def const(c):
        if c.kind == "rec-str":
            return rec_str_lazy(c.params[0])
        if c.kind == "while-str":
            return while_str_lazy(c.params[0])
        if c.kind == "byval" and len(c.params) == 1:
            return _byval_nat_b(c.params[0])
        return c

    return _map_term(M, const, lambda u: Lib(u.name, "rec" if u.family == "str" else u.family))


# --- product elimination ----------------------------------------------------------

@lru_cache(maxsize=None)
def hat(t):
    """The product-free type representing t."""
    if t is NAT:
        return NAT
    if isinstance(t, Arrow):
        return arrow(hat(t.dom), hat(t.cod))
    return arrow(NAT, join(hat(t.left), hat(t.right)))


@lru_cache(maxsize=None)
def join(a, b):
    """Least product-free type both a and b embed into (argument-wise)."""
    if a is b:
        return a
    xs, _ = split_arrow(a)
    ys, _ = split_arrow(b)
    n = max(len(xs), len(ys))
    cs = []
    for i in range(n):
        if i < len(xs) and i < len(ys):
            cs.append(join(xs[i], ys[i]))
        else:
            cs.append(xs[i] if i < len(xs) else ys[i])
    return arrow(*cs, NAT)


def _zero(c):
    args, _ = split_arrow(c)
    vs = [Var("z%d" % i, a) for i, a in enumerate(args)]
    return lam(*vs, Num(0))


@lru_cache(maxsize=None)
def emb(a, c):
    """Embedding a -> c, where c = join(a, ...)."""
    u = Var("u", a)
    if a is c:
        return lam(u, u)
    xs, _ = split_arrow(a)
    cs, _ = split_arrow(c)
    zs = [Var("z%d" % i, t) for i, t in enumerate(cs)]
    body = app(u, *[App(proj(cs[i], xs[i]), zs[i]) for i in range(len(xs))])
    return lam(u, lam(*zs, body))


@lru_cache(maxsize=None)
def proj(c, a):
    """Projection c -> a, left inverse of emb(a, c)."""
    v = Var("v", c)
    if a is c:
        return lam(v, v)
    xs, _ = split_arrow(a)
    cs, _ = split_arrow(c)
    ys = [Var("y%d" % i, t) for i, t in enumerate(xs)]
    args = [App(emb(xs[i], cs[i]), ys[i]) for i in range(len(xs))]
    args += [_zero(t) for t in cs[len(xs):]]
    return lam(v, lam(*ys, app(v, *args)))


@lru_cache(maxsize=None)
def pair_program(s, t):
    hs, ht = hat(s), hat(t)
    j = join(hs, ht)
    a, b, i = Var("a", hs), Var("b", ht), Var("i", NAT)
    return lam(a, b, lam(i, ifz(i, App(emb(hs, j), a), App(emb(ht, j), b))))


@lru_cache(maxsize=None)
def fst_program(s, t):
    j = join(hat(s), hat(t))
    p = Var("p", arrow(NAT, j))
    return lam(p, App(proj(j, hat(s)), App(p, Num(0))))


@lru_cache(maxsize=None)
def snd_program(s, t):
    j = join(hat(s), hat(t))
    p = Var("p", arrow(NAT, j))
    return lam(p, App(proj(j, hat(t)), App(p, Num(1))))


def eliminate_products(M, target=None):
    """A product-free term observationally equal to the closed term M."""
    target = M.type if target is None else target
    if not is_product_free(target):
        raise TermTypeError("target type %s contains a product" % target)
    if M.type is not target:
        raise TermTypeError("term has type %s, not %s" % (M.type, target))
    return _hat_term(M)


def _hat_term(t):
    cls = type(t)
    if cls is Var:
        return Var(t.name, hat(t.type))
    if cls in (Num, Lib):
        return t
    if cls is Const:
        k = t.kind
        if k in ("suc", "pre", "min"):
            return t
        if k in ("rec-str", "while-str") and not is_product_free(t.params[0]):
            # go through the lazy equivalent; byval_[s] has no product-free form
            lazy = rec_str_lazy if k == "rec-str" else while_str_lazy
            return _hat_term(lazy(t.params[0]))
        if t.params:
            return Const(k, tuple(hat(p) for p in t.params))
        return t
    if cls is App:
        return App(_hat_term(t.fn), _hat_term(t.arg))
    if cls is Lam:
        return Lam(_hat_term(t.var), _hat_term(t.body))
    if cls is Pair:
        s, u = t.left.type, t.right.type
        return app(pair_program(s, u), _hat_term(t.left), _hat_term(t.right))
    ty = t.arg.type
    prog = fst_program if cls is Fst else snd_program
    return App(prog(ty.left, ty.right), _hat_term(t.arg))



# --- lock-step harness -------------------------------------------------------------

@dataclass
class LockstepResult:
    steps: int
    ok: bool
    failure: Optional[str] = None


def lockstep_check(M, fuel=2000, max_sim=256):
    """Follow M's reduction; each step M => M' must give M° =>+ M'°.

    Also checks that M° is normal when M is.  Library references are not
    allowed (their unfolding has no counterpart on the other side).
    """
    cur, cur_t = M, to_pcf(M)
    for n in range(fuel):
        r = step_detail(cur)
        if r is None:
            if step_detail(cur_t) is not None:
                return LockstepResult(n, False, "source is normal but its image still steps")
            return LockstepResult(n, True)
        nxt = r[0]
        want = to_pcf(nxt)
        a, k = cur_t, 0
        while not alpha_eq(a, want):
            rr = step_detail(a)
            k += 1
            if rr is None or k > max_sim:
                return LockstepResult(n, False, "rule %s not simulated within %d steps" % (r[1], max_sim))
            a = rr[0]
        if k == 0:
            return LockstepResult(n, False, "rule %s simulated by zero steps" % r[1])
        cur, cur_t = nxt, want
    return LockstepResult(fuel, True)
