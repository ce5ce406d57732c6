"""Seeded random generator of closed, well-typed ground programs.

Loops are drawn from terminating templates (counting recursion, bounded
searches, counting while loops) so that most programs finish quickly; a small
fraction are deliberately divergent so both outcomes get exercised.
"""

import random

from .syntax import show
from .terms import (IFZERO, NAT, PRE, SUC, App, Byval, Fst, MIN, Num, Pair, Rec, RecStr, Snd, Var,
                    While, WhileStr, Y, app, in_language, lam)
from .types import arrow

SCHEMA = "nsplab.corpus/1"

N2N = arrow(NAT, NAT)

# which loop templates each language may use
_LOOPS = {
    "B": (),
    "PCF": ("Y",),
    "PCF_byval": ("Y", "byval"),
    "T": ("rec",),
    "T_min": ("rec", "min"),
    "W": ("while",),
    "T0_str": ("rec-str", "byval"),
    "T0_str_min": ("rec-str", "byval", "min"),
    "W0_str": ("while-str", "byval"),
}


class _Gen:
    def __init__(self, rng, lang, products):
        self.rng = rng
        self.lang = lang
        self.loops = _LOOPS[lang]
        self.products = products
        self.fresh = 0

    def var(self, typ, base="x"):
        self.fresh += 1
        return Var("%s%d" % (base, self.fresh), typ)

    def small(self):
        return Num(self.rng.choice((0, 0, 1, 1, 2, 3, 4)))

    def pres(self, t, c):
        for _ in range(c):
            t = App(PRE, t)
        return t

    def nat(self, ctx, depth):
        rng = self.rng
        if depth <= 0:
            nats = [v for v in ctx if v.type is NAT]
            return rng.choice(nats) if nats and rng.random() < 0.6 else self.small()
        choice = rng.choice(self._choices(ctx))
        return getattr(self, "g_" + choice)(ctx, depth - 1)

    def _choices(self, ctx):
        out = ["num", "suc", "pre", "ifzero", "ifzero", "beta"]
        if any(v.type is NAT for v in ctx):
            out += ["var", "var"]
        if any(v.type is N2N for v in ctx):
            out.append("call")
        if self.products:
            out.append("proj")
        out += [loop.replace("-", "_") for loop in self.loops] * 2
        return out

    def fun(self, ctx, depth):
        x = self.var(NAT)
        return lam(x, self.nat(ctx + [x], depth))

    # constructors for nat-typed terms
    def g_num(self, ctx, depth):
        return self.small()

    def g_var(self, ctx, depth):
        return self.rng.choice([v for v in ctx if v.type is NAT])

    def g_call(self, ctx, depth):
        f = self.rng.choice([v for v in ctx if v.type is N2N])
        return App(f, self.nat(ctx, depth))

    def g_suc(self, ctx, depth):
        return App(SUC, self.nat(ctx, depth))

    def g_pre(self, ctx, depth):
        return App(PRE, self.nat(ctx, depth))

    def g_ifzero(self, ctx, depth):
        return app(IFZERO, self.nat(ctx, depth), self.nat(ctx, depth), self.nat(ctx, depth))

    def g_beta(self, ctx, depth):
        if self.rng.random() < 0.5:
            x = self.var(NAT)
            return App(lam(x, self.nat(ctx + [x], depth)), self.nat(ctx, depth))
        f = self.var(N2N, "f")
        return App(lam(f, self.nat(ctx + [f], depth)), self.fun(ctx, depth))

    def g_proj(self, ctx, depth):
        pair = Pair(self.nat(ctx, depth), self.nat(ctx, depth))
        return Fst(pair) if self.rng.random() < 0.5 else Snd(pair)

    def g_Y(self, ctx, depth):
        rng = self.rng
        if rng.random() < 0.04:
            x = self.var(NAT)
            return App(Y(NAT), lam(x, x))            # diverges
        # countdown: fix f. lam n. ifzero n base (step (f (pre n)))
        f, n, r = self.var(N2N, "f"), self.var(NAT, "n"), self.var(NAT, "r")
        step = lam(r, self.nat(ctx + [n, r], depth - 1))
        body = app(IFZERO, n, self.nat(ctx, depth - 1), App(step, App(f, App(PRE, n))))
        return App(App(Y(N2N), lam(f, n, body)), self.nat(ctx, depth - 1))

    def g_byval(self, ctx, depth):
        return app(Byval((), NAT), self.fun(ctx, depth), self.nat(ctx, depth))

    def _rec(self, const, ctx, depth):
        x, n = self.var(NAT), self.var(NAT, "n")
        step = lam(x, n, self.nat(ctx + [x, n], depth - 1))
        return app(const, self.nat(ctx, depth - 1), step, self.nat(ctx, depth - 1))

    def g_rec(self, ctx, depth):
        return self._rec(Rec(NAT), ctx, depth)

    def g_rec_str(self, ctx, depth):
        return self._rec(RecStr(NAT), ctx, depth)

    def g_min(self, ctx, depth):
        # the search succeeds at the latest at c+1
        i = self.var(NAT, "i")
        c = self.rng.randrange(0, 4)
        test = app(IFZERO, self.pres(i, c), self.nat(ctx + [i], depth - 1), Num(0))
        return app(MIN, lam(i, test), self.nat(ctx, depth - 1))

    def _while(self, const, ctx, depth):
        # counts up from the start value while x <= c
        x = self.var(NAT)
        c = self.rng.randrange(0, 4)
        cond = lam(x, app(IFZERO, self.pres(x, c), Num(0), Num(1)))
        y = self.var(NAT)
        inc = lam(y, App(SUC, y)) if self.rng.random() < 0.5 else lam(y, App(SUC, App(SUC, y)))
        return app(const, cond, self.nat(ctx, depth - 1), inc)

    def g_while(self, ctx, depth):
        return self._while(While(NAT), ctx, depth)

    def g_while_str(self, ctx, depth):
        return self._while(WhileStr(NAT), ctx, depth)


def random_program(rng, lang="PCF", depth=4, products=False):
    """One closed term of type nat in the language ``lang``."""
    if lang not in _LOOPS:
        raise ValueError("unknown language %r" % lang)
    g = _Gen(rng, lang, products)
    while True:
        t = g.nat([], depth)
        if in_language(t, lang):
            return t


def generate_corpus(seed, size, lang="PCF", depth=4, products=False):
    """``size`` programs; the same seed always gives the same list."""
    rng = random.Random("%s/%s/%d/%d" % (seed, lang, depth, int(products)))
    return [random_program(rng, lang, depth, products) for _ in range(size)]


def write_corpus(directory, seed, size, lang="PCF", depth=4, products=False):
    """Write one .term file per program plus an index recording the seed."""
    import json
    import os
    os.makedirs(directory, exist_ok=True)
    names = []
    for i, t in enumerate(generate_corpus(seed, size, lang, depth, products)):
        name = "%s_%04d.term" % (lang.lower(), i)
        with open(os.path.join(directory, name), "w", encoding="utf-8") as fh:
            fh.write("; seed %s, %s #%d\n%s\n" % (seed, lang, i, show(t)))
        names.append(name)
    index = {"schema": SCHEMA, "seed": seed, "size": size, "lang": lang, "depth": depth,
             "products": products, "files": names}
    with open(os.path.join(directory, "index.json"), "w", encoding="utf-8") as fh:
        json.dump(index, fh, indent=2)
    return index
