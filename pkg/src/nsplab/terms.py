"""Typed terms, substitution, alpha-equivalence and language membership.

Every variable carries its type.  Terms are immutable and type-checked when
they are built; each node caches its type and its free variables.
"""

import itertools
import re
import threading
from dataclasses import dataclass
from typing import Optional

from .types import NAT, Arrow, Product, arrow, is_product_free, level, product, split_arrow


class TermTypeError(TypeError):
    def __init__(self, message, term=None):
        super().__init__(message)
        self.term = term


class MembershipError(ValueError):
    pass


class Term:
    __slots__ = ("type", "fv", "__weakref__")

    def __str__(self):
        from .syntax import show
        return show(self)

    def __repr__(self):
        return "<%s %s>" % (type(self).__name__, self)

    # conveniences for building applications in Python
    def __call__(self, *args):
        t = self
        for a in args:
            t = App(t, a)
        return t


_EMPTY = frozenset()


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name, type):
        self.name = name
        self.type = type
        self.fv = frozenset((self,))

    def __eq__(self, other):
        return isinstance(other, Var) and self.name == other.name and self.type is other.type

    def __hash__(self):
        return hash((self.name, id(self.type)))


class Lam(Term):
    __slots__ = ("var", "body")

    def __init__(self, var, body):
        if not isinstance(var, Var):
            raise TermTypeError("lambda binder must be a variable", var)
        self.var = var
        self.body = body
        self.type = arrow(var.type, body.type)
        self.fv = body.fv - {var} if var in body.fv else body.fv


class App(Term):
    __slots__ = ("fn", "arg")

    def __init__(self, fn, arg):
        ft = fn.type
        if not isinstance(ft, Arrow):
            raise TermTypeError("applying a term of type %s" % ft, fn)
        if ft.dom is not arg.type:
            raise TermTypeError("argument of type %s where %s expected" % (arg.type, ft.dom), arg)
        self.fn = fn
        self.arg = arg
        self.type = ft.cod
        self.fv = fn.fv | arg.fv if arg.fv else fn.fv


class Pair(Term):
    __slots__ = ("left", "right")

    def __init__(self, left, right):
        self.left = left
        self.right = right
        self.type = product(left.type, right.type)
        self.fv = left.fv | right.fv


class Fst(Term):
    __slots__ = ("arg",)

    def __init__(self, arg):
        if not isinstance(arg.type, Product):
            raise TermTypeError("fst of non-product type %s" % arg.type, arg)
        self.arg = arg
        self.type = arg.type.left
        self.fv = arg.fv


class Snd(Term):
    __slots__ = ("arg",)

    def __init__(self, arg):
        if not isinstance(arg.type, Product):
            raise TermTypeError("snd of non-product type %s" % arg.type, arg)
        self.arg = arg
        self.type = arg.type.right
        self.fv = arg.fv


class Num(Term):
    __slots__ = ("n",)

    def __init__(self, n):
        if n < 0:
            raise TermTypeError("numerals are natural numbers")
        self.n = n
        self.type = NAT
        self.fv = _EMPTY


# --- constants -------------------------------------------------------------

CONST_KINDS = ("suc", "pre", "ifzero", "Y", "while", "rec", "min", "byval",
               "rec-str", "while-str")


def const_type(kind, params):
    if kind in ("suc", "pre"):
        return arrow(NAT, NAT)
    if kind == "ifzero":
        s = params[0] if params else NAT
        return arrow(NAT, s, s, s)
    if kind == "min":
        return arrow(arrow(NAT, NAT), NAT, NAT)
    if kind == "Y":
        (s,) = params
        return arrow(arrow(s, s), s)
    if kind in ("while", "while-str"):
        (s,) = params
        return arrow(arrow(s, NAT), s, arrow(s, s), s)
    if kind in ("rec", "rec-str"):
        (s,) = params
        return arrow(s, arrow(s, NAT, s), NAT, s)
    if kind == "byval":
        # params = (sigma_1, ..., sigma_r, tau)
        sigmas, tau = params[:-1], params[-1]
        f = arrow(*sigmas, NAT, tau)
        return arrow(f, *sigmas, NAT, tau)
    raise TermTypeError("unknown constant %r" % kind)


_PARAM_COUNT = {"suc": 0, "pre": 0, "ifzero": 0, "min": 0, "Y": 1, "while": 1,
                "while-str": 1, "rec": 1, "rec-str": 1}


class Const(Term):
    __slots__ = ("kind", "params")

    def __init__(self, kind, params=()):
        params = tuple(params)
        if kind == "byval":
            if not params:
                raise TermTypeError("byval needs its result type")
        elif kind == "ifzero":
            # ifzero at a higher type is written (ifzero s); at nat it has no parameter
            if params == (NAT,):
                params = ()
            if len(params) > 1:
                raise TermTypeError("ifzero takes at most one type parameter")
        elif kind not in _PARAM_COUNT or len(params) != _PARAM_COUNT[kind]:
            raise TermTypeError("constant %s takes %d type parameters"
                                % (kind, _PARAM_COUNT.get(kind, 0)))
        self.kind = kind
        self.params = params
        self.type = const_type(kind, params)
        self.fv = _EMPTY


# Defined arithmetic lives in library.py; here we only need its types.
LIB_FAMILIES = ("str", "rec", "while", "pcf")
LIB_TYPES = {
    "sub": 2, "plus": 2, "double": 1, "tri": 1, "cantor": 2, "add": 2,
    "init": 1, "last": 1, "len": 1, "index": 2, "basic": 3,
    "eq": 2, "neq": 2, "lt": 2,
}


class Lib(Term):
    """A named first-order arithmetic program, e.g. ``add:str``.

    The family picks which recursion scheme the body uses, so the same
    function can live in T0_str, T_min, W or pure PCF.
    """
    __slots__ = ("name", "family")

    def __init__(self, name, family="str"):
        if name not in LIB_TYPES:
            raise TermTypeError("unknown library function %r" % name)
        if family not in LIB_FAMILIES:
            raise TermTypeError("unknown library family %r" % family)
        self.name = name
        self.family = family
        self.type = arrow(*([NAT] * (LIB_TYPES[name] + 1)))
        self.fv = _EMPTY


# --- small builders ----------------------------------------------------------

SUC = Const("suc")
PRE = Const("pre")
IFZERO = Const("ifzero")
MIN = Const("min")


def Y(s):
    return Const("Y", (s,))


def While(s):
    return Const("while", (s,))


def Rec(s):
    return Const("rec", (s,))


def RecStr(s):
    return Const("rec-str", (s,))


def WhileStr(s):
    return Const("while-str", (s,))


def Byval(sigmas, tau):
    return Const("byval", tuple(sigmas) + (tau,))


def lam(*parts):
    """lam(x, y, body) is the nested abstraction over x then y."""
    *vs, body = parts
    for v in reversed(vs):
        body = Lam(v, body)
    return body


def app(f, *args):
    for a in args:
        f = App(f, a)
    return f


def spine(t):
    """Split t into head and argument list."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def ifz(n, a, b):
    c = IFZERO if a.type is NAT else Const("ifzero", (a.type,))
    return App(App(App(c, n), a), b)


def numeral_value(t):
    return t.n if isinstance(t, Num) else None


# --- fresh names and substitution ------------------------------------------

_counter = itertools.count()
_SUFFIX = re.compile(r"^(.*?)(\d*)$")


def fresh_var(base, typ, avoid_names):
    """A variable named like ``base`` whose name is not in avoid_names."""
    stem = _SUFFIX.match(base).group(1) or "v"
    if base not in avoid_names:
        return Var(base, typ)
    for i in itertools.count(1):
        name = "%s%d" % (stem, i)
        if name not in avoid_names:
            return Var(name, typ)


def gensym(base, typ):
    """A variable with a globally unique name (used by program builders)."""
    return Var("%s_%d" % (base, next(_counter)), typ)


def names_of(vs):
    return {v.name for v in vs}


def substitute(body, binder, replacement):
    """Capture-avoiding body[binder := replacement]."""
    if replacement.type is not binder.type:
        raise TermTypeError("substituting %s for a variable of type %s"
                            % (replacement.type, binder.type), replacement)
    return subst_many(body, {binder: replacement})


def subst_many(body, mapping):
    """Simultaneous capture-avoiding substitution."""
    if not mapping:
        return body
    rfv = set()
    for r in mapping.values():
        rfv |= r.fv
    return _subst(body, mapping, names_of(rfv))


def _subst(t, m, rfv):
    # rfv holds the names of the replacements' free variables
    if t.fv.isdisjoint(m.keys()):
        return t
    if isinstance(t, Var):
        return m.get(t, t)
    if isinstance(t, App):
        return App(_subst(t.fn, m, rfv), _subst(t.arg, m, rfv))
    if isinstance(t, Lam):
        x = t.var
        if x in m:
            m = {k: v for k, v in m.items() if k != x}
            if t.body.fv.isdisjoint(m.keys()):
                return t
        if x.name in rfv:
            avoid = rfv | names_of(t.body.fv)
            y = fresh_var(x.name, x.type, avoid)
            body = _subst(t.body, {x: y}, {y.name})
            return Lam(y, _subst(body, m, rfv))
        return Lam(x, _subst(t.body, m, rfv))
    if isinstance(t, Pair):
        return Pair(_subst(t.left, m, rfv), _subst(t.right, m, rfv))
    if isinstance(t, Fst):
        return Fst(_subst(t.arg, m, rfv))
    if isinstance(t, Snd):
        return Snd(_subst(t.arg, m, rfv))
    return t


def alpha_eq(a, b):
    return _aeq(a, b, {}, {}, 0)


def _aeq(a, b, ea, eb, depth):
    while True:
        if a is b and not ea and not eb:
            return True
        ta = type(a)
        if ta is not type(b):
            return False
        if ta is Var:
            ia, ib = ea.get(a), eb.get(b)
            if ia is None and ib is None:
                return a == b
            return ia == ib
        if ta is App:
            if not _aeq(a.fn, b.fn, ea, eb, depth):
                return False
            a, b = a.arg, b.arg
            continue
        if ta is Lam:
            if a.var.type is not b.var.type:
                return False
            ea = dict(ea)
            eb = dict(eb)
            ea[a.var] = depth
            eb[b.var] = depth
            depth += 1
            a, b = a.body, b.body
            continue
        if ta is Num:
            return a.n == b.n
        if ta is Const:
            return a.kind == b.kind and a.params == b.params
        if ta is Lib:
            return a.name == b.name and a.family == b.family
        if ta is Pair:
            if not _aeq(a.left, b.left, ea, eb, depth):
                return False
            a, b = a.right, b.right
            continue
        # Fst / Snd
        a, b = a.arg, b.arg


def subterms(t):
    """Pre-order iterator over all subterms."""
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        if isinstance(u, App):
            stack.append(u.arg)
            stack.append(u.fn)
        elif isinstance(u, Lam):
            stack.append(u.body)
        elif isinstance(u, Pair):
            stack.append(u.right)
            stack.append(u.left)
        elif isinstance(u, (Fst, Snd)):
            stack.append(u.arg)


def term_size(t):
    return sum(1 for _ in subterms(t))


def is_closed(t):
    return not t.fv


def term_is_product_free(t):
    return all(is_product_free(u.type) and not (isinstance(u, Lam) and not is_product_free(u.var.type))
               for u in subterms(t))


# --- languages ---------------------------------------------------------------

LANGS = ("B", "PCF", "PCF_byval", "T", "T_min", "W", "T0_str", "T0_str_min", "W0_str")

_ALLOWED = {
    "B": set(),
    "PCF": {"Y"},
    "PCF_byval": {"Y", "byval"},
    "T": {"rec"},
    "T_min": {"rec", "min"},
    "W": {"while"},
    "T0_str": {"rec-str", "byval0"},
    "T0_str_min": {"rec-str", "byval0", "min"},
    "W0_str": {"while-str", "byval0"},
}

_STRICT_LANGS = ("T0_str", "T0_str_min", "W0_str")

_ALIASES = {name.lower(): name for name in LANGS}
_ALIASES.update({"pcf+byval": "PCF_byval", "pcfbyval": "PCF_byval", "t+min": "T_min",
                 "tmin": "T_min", "t0str": "T0_str", "t0str+min": "T0_str_min",
                 "t0_str+min": "T0_str_min", "w0str": "W0_str"})


@dataclass(frozen=True)
class LangTag:
    name: str
    cap: Optional[int] = None

    def __post_init__(self):
        if self.name not in LANGS:
            raise ValueError("unknown language %r" % self.name)
        if self.cap is not None and self.cap < 0:
            raise ValueError("level cap must be >= 0")

    def __str__(self):
        return self.name if self.cap is None else "%s:%d" % (self.name, self.cap)

    @staticmethod
    def parse(text):
        """Accepts e.g. ``PCF``, ``t_min``, ``pcf_byval``, ``T:1``."""
        if isinstance(text, LangTag):
            return text
        name, _, cap = text.partition(":")
        key = name.strip().lower()
        if key not in _ALIASES:
            raise ValueError("unknown language %r (expected one of %s)" % (text, ", ".join(LANGS)))
        return LangTag(_ALIASES[key], int(cap) if cap else None)


def lang(text):
    return LangTag.parse(text)


def const_violation(c, tag):
    """Why the constant c is not admitted in tag, or None."""
    allowed = _ALLOWED[tag.name]
    kind = c.kind
    if kind in ("suc", "pre", "ifzero"):
        return None
    if kind == "byval":
        if "byval" in allowed:
            return None
        # byval_[nat] at any level-0 result type, so byval_[s] is typable for products
        if "byval0" in allowed and len(c.params) == 1 and level(c.params[0]) == 0:
            return None
        return "byval%s is not a constant of %s" % (_params_str(c), tag)
    if kind not in allowed:
        return "%s is not a constant of %s" % (kind, tag)
    if kind in ("rec-str", "while-str") and tag.name in _STRICT_LANGS and level(c.params[0]) > 0:
        return "%s is only admitted at level-0 types in %s" % (kind, tag)
    if tag.cap is not None and kind in ("Y", "rec", "while", "rec-str", "while-str"):
        if level(c.params[0]) > tag.cap:
            return "%s at type %s exceeds level cap %d" % (kind, c.params[0], tag.cap)
    return None


def _params_str(c):
    return "[" + ", ".join(str(p) for p in c.params) + "]"


_lib_member_cache = {}
_lib_member_lock = threading.Lock()


def membership_violations(t, tag):
    tag = LangTag.parse(tag)
    out = []
    seen = set()
    for u in subterms(t):
        if isinstance(u, Const):
            key = (u.kind, u.params)
            if key in seen:
                continue
            seen.add(key)
            why = const_violation(u, tag)
            if why:
                out.append(why)
        elif isinstance(u, Lib):
            key = (u.name, u.family)
            if key in seen:
                continue
            seen.add(key)
            if not _lib_member(u, tag):
                out.append("%s:%s is not definable in %s" % (u.name, u.family, tag))
    return out


def _lib_member(u, tag):
    key = (u.name, u.family, tag)
    hit = _lib_member_cache.get(key)
    if hit is None:
        from .library import body
        hit = not membership_violations(body(u.name, u.family), tag)
        with _lib_member_lock:
            _lib_member_cache[key] = hit
    return hit


def in_language(t, tag):
    return not membership_violations(t, tag)


def check_membership(t, tag):
    problems = membership_violations(t, tag)
    if problems:
        raise MembershipError("; ".join(problems))
    return t


# --- long beta-eta normal form -----------------------------------------------

def beta_normal(t):
    """Full beta normalisation (normal order).  Constants are left alone."""
    head, args = spine(t)
    while isinstance(head, Lam) and args:
        head, more = spine(substitute(head.body, head.var, args[0]))
        args = more + args[1:]
    if isinstance(head, Lam):
        return Lam(head.var, beta_normal(head.body))
    if isinstance(head, Pair):
        head = Pair(beta_normal(head.left), beta_normal(head.right))
    elif isinstance(head, (Fst, Snd)):
        inner = beta_normal(head.arg)
        if isinstance(inner, Pair):
            return beta_normal(app(inner.left if isinstance(head, Fst) else inner.right, *args))
        head = type(head)(inner)
    return app(head, *[beta_normal(a) for a in args])


def long_beta_eta_normal_form(t):
    """Beta-normal form with every variable and constant fully applied."""
    if not term_is_product_free(t):
        raise TermTypeError("long normal forms are only defined on product-free terms", t)
    return _eta_long(beta_normal(t), set(names_of(t.fv)))


def _eta_long(t, used):
    if isinstance(t, Lam):
        used = used | {t.var.name}
        return Lam(t.var, _eta_long(t.body, used))
    head, args = spine(t)
    argtypes, _ = split_arrow(t.type)
    extra = []
    for ty in argtypes:
        v = fresh_var("x", ty, used)
        used = used | {v.name}
        extra.append(v)
    body = app(head, *[_eta_long(a, used) for a in args], *[_eta_long(v, used) for v in extra])
    return lam(*extra, body)
