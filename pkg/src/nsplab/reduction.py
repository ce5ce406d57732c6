"""Small-step call-by-name reduction for every language in the family.

A step finds the unique redex by walking down the basic evaluation contexts
([-]N, suc [-], pre [-], ifzero [-], fst [-], snd [-], rec X F [-],
rec-str X F [-], min F [-], byval F X.. [-]) and rebuilds the term around the
contractum.  Library references (``add:str`` etc.) are macros: they are
unfolded in place when they reach head position, without costing a step.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from .library import body as lib_body
from .library import byval_bracket
from .terms import (IFZERO, NAT, App, Const, Fst, Lam, LangTag, Lib, Num, Pair, Snd, Var,
                    app, check_membership, fresh_var, ifz, lam, names_of, substitute)

DEFAULT_FUEL = 10 ** 6


class StuckError(Exception):
    pass


@dataclass(frozen=True)
class Value:
    n: int

    def __str__(self):
        return "value %d" % self.n


@dataclass(frozen=True)
class FuelExhausted:
    steps: int

    def __str__(self):
        return "no value after %d steps (possible divergence)" % self.steps


@dataclass(frozen=True)
class Stuck:
    reason: str

    def __str__(self):
        return "stuck: " + self.reason


Outcome = Union[Value, FuelExhausted, Stuck]


@dataclass
class StepTrace:
    outcome: Outcome
    final: object
    count: int
    steps: List[Tuple[object, str, Tuple[str, ...]]] = field(default_factory=list)

    @property
    def value(self):
        return self.outcome.n if isinstance(self.outcome, Value) else None


def _strict_position(head, nargs):
    """(arity, index of the argument evaluated first or None)."""
    kind = head.kind
    if kind in ("suc", "pre", "ifzero"):
        return 1, 0
    if kind == "Y":
        return 1, None
    if kind in ("while", "while-str"):
        return 3, None
    if kind in ("rec", "rec-str"):
        return 3, 2
    if kind == "min":
        return 2, 1
    # byval: F, X_1..X_r, n
    r = len(head.params) - 1
    return r + 2, r + 1


_CONTEXT_NAME = {"suc": "suc [-]", "pre": "pre [-]", "ifzero": "ifzero [-]",
                 "rec": "rec X F [-]", "rec-str": "rec-str X F [-]", "min": "min F [-]",
                 "byval": "byval F X [-]"}


def _fresh(base, typ, *terms):
    avoid = set()
    for t in terms:
        avoid |= names_of(t.fv)
    return fresh_var(base, typ, avoid)


def _fire(head, args):
    """Contract the redex head args (len(args) == arity).  Returns (term, rule)."""
    kind = head.kind
    if kind == "suc":
        return Num(args[0].n + 1), "suc"
    if kind == "pre":
        n = args[0].n
        return Num(n - 1 if n else 0), ("pre-succ" if n else "pre-zero")
    if kind == "ifzero":
        s = head.params[0] if head.params else NAT
        x, y = Var("x", s), Var("y", s)
        if args[0].n == 0:
            return lam(x, y, x), "ifzero-zero"
        return lam(x, y, y), "ifzero-succ"
    if kind == "Y":
        (F,) = args
        return App(F, App(head, F)), "Y"
    if kind == "while":
        C, X, F = args
        return ifz(App(C, X), app(head, C, App(F, X), F), X), "while"
    if kind == "rec":
        X, F, n = args
        if n.n == 0:
            return X, "rec-zero"
        m = Num(n.n - 1)
        return app(F, app(head, X, F, m), m), "rec-succ"
    if kind == "rec-str":
        X, F, n = args
        if n.n == 0:
            return X, "rec-str-zero"
        m = Num(n.n - 1)
        sigma = head.params[0]
        v = _fresh("m", sigma, F)
        return app(byval_bracket(sigma), lam(v, app(F, v, m)), app(head, X, F, m)), "rec-str-succ"
    if kind == "while-str":
        C, X, F = args
        sigma = head.params[0]
        v = _fresh("x", sigma, C, F)
        loop = lam(v, ifz(App(C, v), app(head, C, App(F, v), F), v))
        return app(byval_bracket(sigma), loop, X), "while-str"
    if kind == "min":
        F, n = args
        return ifz(App(F, n), n, app(head, F, App(Const("suc"), n))), "min"
    # byval
    return app(args[0], *args[1:]), "byval"


def _find(t):
    """Locate and contract the redex of t.

    Returns (new term, rule, context path) or None when t is normal.
    Raises StuckError for a free variable in a position that needs a value.
    """
    frames = []
    path = []
    cur = t
    while True:
        head, args = _spine(cur)
        cls = type(head)
        if cls is Lib:
            head = lib_body(head.name, head.family)
            cls = Lam
        if cls is Lam:
            if not args:
                if frames:
                    raise StuckError("abstraction in a ground position")
                return None
            path.extend(["[-]N"] * (len(args) - 1))
            new = app(substitute(head.body, head.var, args[0]), *args[1:])
            rule = "beta"
            break
        if cls is Fst or cls is Snd:
            inner = head.arg
            if type(inner) is Pair:
                path.extend(["[-]N"] * len(args))
                new = app(inner.left if cls is Fst else inner.right, *args)
                rule = "fst" if cls is Fst else "snd"
                break
            path.extend(["[-]N"] * len(args))
            path.append("fst [-]" if cls is Fst else "snd [-]")
            frames.append((cls, None, args))
            cur = inner
            continue
        if cls is Const:
            need, strict = _strict_position(head, len(args))
            if len(args) < need:
                if frames:
                    raise StuckError("partial application in a ground position")
                return None
            if strict is not None and type(args[strict]) is not Num:
                path.extend(["[-]N"] * (len(args) - need))
                path.append(_CONTEXT_NAME[head.kind])
                frames.append((head, strict, args))
                cur = args[strict]
                continue
            path.extend(["[-]N"] * (len(args) - need))
            con, rule = _fire(head, args[:need])
            new = app(con, *args[need:])
            break
        if cls is Var:
            raise StuckError("free variable %s in head position" % head.name)
        # numerals and pairs are normal
        if frames:
            raise StuckError("unexpected %s in a redex position" % cls.__name__)
        return None
    # rebuild outwards
    for head, idx, args in reversed(frames):
        if head is Fst or head is Snd:
            new = app(head(new), *args)
        else:
            new = app(head, *args[:idx], new, *args[idx + 1:])
    return new, rule, tuple(path)


def _spine(t):
    args = []
    while type(t) is App:
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def step(M, lang=None):
    """One reduction step: (M', rule) or None if M is normal.

    When ``lang`` is given, M must belong to it.  Stuck open terms give None;
    use ``step_detail`` to see the reason.
    """
    if lang is not None:
        check_membership(M, LangTag.parse(lang))
    try:
        r = _find(M)
    except StuckError:
        return None
    return None if r is None else (r[0], r[1])


def step_detail(M):
    """Like step but returns (M', rule, context path) and raises StuckError."""
    return _find(M)


def evaluate(M, lang=None, fuel=DEFAULT_FUEL, trace=False, on_step=None):
    """Iterate ``step`` from M for at most ``fuel`` steps."""
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    if lang is not None:
        check_membership(M, LangTag.parse(lang))
    steps = []
    cur = M
    count = 0
    while True:
        if type(cur) is Num:
            return StepTrace(Value(cur.n), cur, count, steps)
        if count >= fuel:
            return StepTrace(FuelExhausted(count), cur, count, steps)
        try:
            r = _find(cur)
        except StuckError as e:
            return StepTrace(Stuck(str(e)), cur, count, steps)
        if r is None:
            why = "normal form of type %s is not a numeral" % cur.type
            return StepTrace(Stuck(why), cur, count, steps)
        new, rule, path = r
        if trace:
            steps.append((cur, rule, path))
        if on_step is not None:
            on_step(cur, rule, path)
        cur = new
        count += 1


def run(M, fuel=DEFAULT_FUEL):
    """Numeral value of M or None (divergent within fuel, or stuck)."""
    return evaluate(M, fuel=fuel).value


def observationally_distinct_witness(M, M2, corpus, lang=None, fuel=20000):
    """Search argument tuples for one where M and M2 give different ground results.

    ``corpus`` is an iterable of tuples of closed terms.  None means no
    difference was seen; that is evidence, not a proof of equivalence.
    """
    if M.type is not M2.type:
        raise TypeError("terms have different types: %s vs %s" % (M.type, M2.type))
    for args in corpus:
        a = evaluate(app(M, *args), lang, fuel).outcome
        b = evaluate(app(M2, *args), lang, fuel).outcome
        if _observably_different(a, b):
            return tuple(args), a, b
    return None


def _observably_different(a, b):
    if isinstance(a, Value) and isinstance(b, Value):
        return a.n != b.n
    return isinstance(a, Value) != isinstance(b, Value)


