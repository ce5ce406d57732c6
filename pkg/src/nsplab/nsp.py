"""Nested sequential procedures (PCF Boehm trees).

Procedures are built lazily.  A procedure is ``lam x0..x(r-1). e`` where the
expression e is computed on demand and memoised.  An expression is bottom, a
numeral, or ``case x(q0..) of (i => e_i)`` with branches produced by a rule
that is forced index by index.

Normal forms are produced by an environment machine (``hnf``) which plays the
role of head reduction on meta-terms: closures of PCF terms, closures of
procedures and native constants are all "values" that can be applied to
argument values, and pending ``case`` continuations are kept on a stack, so
case-of-case is just stack concatenation.
"""

import itertools
import threading
from dataclasses import dataclass

from . import library
from .terms import (LIB_TYPES, NAT, App, Const, Fst, Lam, Lib, Num, Pair, Snd, Var, in_language,
                    term_is_product_free)
from .types import arrow, split_arrow, type_str

DEFAULT_STEPS = 200_000


class ProductError(TypeError):
    pass


# --- procedure syntax ------------------------------------------------------------

_ids = itertools.count()


class NVar:
    """A procedure variable.  Identity-based; names are only for printing."""
    __slots__ = ("name", "type", "uid")

    def __init__(self, name, type):
        self.name = name
        self.type = type
        self.uid = next(_ids)

    def __repr__(self):
        return self.name

    @property
    def arg_types(self):
        return split_arrow(self.type)[0]


class _Bot:
    __slots__ = ()

    def __repr__(self):
        return "BOT"


BOT = _Bot()


@dataclass(frozen=True)
class Unresolved:
    """Head reduction did not finish within the step budget."""
    steps: int


@dataclass(frozen=True)
class Val:
    n: int


class Branches:
    """i => e_i as an explicit table plus a default rule, memoised."""
    __slots__ = ("table", "default", "memo", "lock", "identity")

    def __init__(self, table=None, default=None, identity=False):
        self.table = dict(table or {})
        self.default = default
        self.memo = {}
        self.lock = threading.Lock()
        self.identity = identity

    def __getitem__(self, i):
        e = self.memo.get(i)
        if e is not None:
            return e
        if i in self.table:
            e = self.table[i]
        elif self.default is not None:
            e = self.default(i)
        else:
            e = BOT
        with self.lock:
            # first writer wins, so every reader sees the same node
            return self.memo.setdefault(i, e)

    def forced(self):
        with self.lock:
            return dict(self.memo)


def identity_branches():
    return Branches(default=Val, identity=True)


class Case:
    __slots__ = ("head", "args", "branches")

    def __init__(self, head, args, branches):
        self.head = head
        self.args = tuple(args)
        self.branches = branches

    def __repr__(self):
        return "Case(%s, %d args)" % (self.head, len(self.args))


class MetaCase:
    """case E of (i => E_i) where E is any ground meta-term."""
    __slots__ = ("scrutinee", "branches")

    def __init__(self, scrutinee, branches):
        self.scrutinee = scrutinee
        self.branches = branches


class MetaApp:
    """A ground meta-term x Q or P Q (head a variable or a procedure)."""
    __slots__ = ("head", "args")

    def __init__(self, head, args):
        self.head = head
        self.args = list(args)


class Procedure:
    __slots__ = ("params", "_body", "_thunk", "_lock", "type")

    def __init__(self, params, body):
        self.params = tuple(params)
        self.type = arrow(*[p.type for p in self.params], NAT)
        self._lock = threading.Lock()
        if callable(body) and not isinstance(body, (Case, Val, Unresolved, _Bot)):
            self._thunk, self._body = body, None
        else:
            self._thunk, self._body = None, body

    @property
    def body(self):
        b = self._body
        if b is None:
            with self._lock:
                if self._body is None:
                    self._body = self._thunk()
                    self._thunk = None
                b = self._body
        return b

    def __repr__(self):
        return "<Procedure %s>" % show_procedure(self, depth=2, branches=3)


def const_proc(n):
    return Procedure((), Val(n))


BOT_PROC = Procedure((), BOT)


def var_eta(x):
    """x^eta, the hereditary eta-expansion of the variable x."""
    args = x.arg_types
    zs = [NVar("z%d" % i, t) for i, t in enumerate(args)]
    return Procedure(zs, lambda: Case(x, [var_eta(z) for z in zs], identity_branches()))


def eta_expand(x):
    if not isinstance(x, NVar):
        x = NVar(x.name, x.type)
    return var_eta(x)


# --- the machine ------------------------------------------------------------------

class Clo:
    __slots__ = ("term", "env")

    def __init__(self, term, env):
        self.term = term
        self.env = env


class NumVal:
    __slots__ = ("n",)

    def __init__(self, n):
        self.n = n


class PClo:
    """A procedure under an environment for its free procedure variables."""
    __slots__ = ("proc", "env")

    def __init__(self, proc, env=None):
        self.proc = proc
        self.env = env


class EClo:
    __slots__ = ("expr", "env")

    def __init__(self, expr, env):
        self.expr = expr
        self.env = env


class PApp:
    """A value applied to some (not all) of its arguments."""
    __slots__ = ("fn", "args")

    def __init__(self, fn, args):
        self.fn = fn
        self.args = tuple(args)


class Native:
    """Constants with a built-in meaning; ``enter`` consumes arguments."""
    __slots__ = ()
    arity = 0

    def enter(self, args, k):
        raise NotImplementedError


@dataclass(frozen=True)
class HNum:
    n: int


@dataclass(frozen=True)
class HBot:
    pass


@dataclass(frozen=True)
class Exhausted:
    steps: int


class HCase:
    """Stuck on a call to a free variable: case head(args) of i => resume(k, i)."""
    __slots__ = ("head", "args", "k")

    def __init__(self, head, args, k):
        self.head = head
        self.args = args
        self.k = k


def _lookup(env, key):
    while env is not None:
        if env[0] is key or env[0] == key:
            return env[1]
        env = env[2]
    raise KeyError(key)


def _bind(env, key, value):
    return (key, value, env)


class _Cons:
    __slots__ = ("head", "tail")

    def __init__(self, head, tail):
        self.head = head
        self.tail = tail


def push(k, frame):
    return _Cons(frame, k)


def hnf(val, args=(), k=None, steps=DEFAULT_STEPS, inst=None):
    """Run ``val`` applied to ``args`` (normal order) under continuation k.

    Returns HNum, HBot, HCase (stuck on a free variable) or Exhausted.
    ``inst`` maps free procedure variables to values to substitute for them.
    """
    stack = list(reversed(args))  # next argument is stack[-1]
    inst = inst or {}
    count = 0
    while True:
        count += 1
        if count > steps:
            return Exhausted(count - 1)
        t = type(val)
        if t is Clo:
            term = val.term
            tt = type(term)
            if tt is App:
                stack.append(Clo(term.arg, val.env))
                val = Clo(term.fn, val.env)
            elif tt is Lam:
                val = Clo(term.body, _bind(val.env, term.var, stack.pop()))
            elif tt is Var:
                val = _lookup(val.env, term)
            elif tt is Num:
                val = NumVal(term.n)
            elif tt is Const:
                val = native_for(term)
            elif tt is Lib:
                val = LibNative.get(term.name)
            else:
                raise ProductError("procedures are product-free; found %s" % tt.__name__)
        elif t is NumVal:
            if k is None:
                return HNum(val.n)
            frame = k.head
            k = k.tail
            val, stack, k = frame(val.n, k)
        elif t is NVar:
            v = inst.get(val)
            if v is None:
                return HCase(val, list(reversed(stack)), k)
            val = v
        elif t is PClo:
            proc = val.proc
            env = val.env
            for p in proc.params:
                env = _bind(env, p, stack.pop())
            val = EClo(proc.body, env)
        elif t is EClo:
            e = val.expr
            te = type(e)
            if te is Val:
                val = NumVal(e.n)
            elif te is Case:
                env = val.env
                try:
                    head = _lookup(env, e.head)
                except KeyError:
                    head = e.head
                stack = [PClo(q, env) for q in reversed(e.args)]
                k = push(k, _branch_frame(e.branches, env))
                val = head
            elif e is BOT:
                return HBot()
            elif te is MetaCase:
                k = push(k, _branch_frame(e.branches, val.env))
                val = EClo(e.scrutinee, val.env)
            elif te is MetaApp:
                env = val.env
                stack = [PClo(q, env) for q in reversed(e.args)]
                head = e.head
                if type(head) is NVar:
                    try:
                        head = _lookup(env, head)
                    except KeyError:
                        pass
                    val = head
                else:
                    val = PClo(head, env)
            else:
                return Exhausted(count)
        elif t is PApp:
            stack.extend(reversed(val.args))
            val = val.fn
        else:
            val, stack, k = val.enter(stack, k)


def _branch_frame(branches, env):
    def frame(i, k):
        return EClo(branches[i], env), [], k
    return frame


def resume(k, i, steps=DEFAULT_STEPS, inst=None):
    return hnf(NumVal(i), (), k, steps, inst)


# --- natives ------------------------------------------------------------------------

class _Suc(Native):
    def enter(self, stack, k):
        a = stack.pop()
        return a, stack, push(k, lambda i, k: (NumVal(i + 1), [], k))


class _Pre(Native):
    def enter(self, stack, k):
        a = stack.pop()
        return a, stack, push(k, lambda i, k: (NumVal(i - 1 if i else 0), [], k))


class _Ifzero(Native):
    def enter(self, stack, k):
        x = stack.pop()
        y = stack.pop()
        z = stack.pop()
        rest = tuple(stack)

        def frame(i, k):
            return (y if i == 0 else z), list(rest), k
        return x, [], push(k, frame)


class _Byval(Native):
    __slots__ = ("r",)

    def __init__(self, r):
        self.r = r

    def enter(self, stack, k):
        f = stack.pop()
        xs = [stack.pop() for _ in range(self.r)]
        n = stack.pop()
        rest = tuple(stack)

        def frame(i, k):
            st = list(rest)
            st.append(NumVal(i))
            st.extend(reversed(xs))
            return f, st, k
        return n, [], push(k, frame)


class _Y(Native):
    def enter(self, stack, k):
        F = stack.pop()
        stack.append(PApp(self, (F,)))
        return F, stack, k


class _ViaProgram(Native):
    """rec, min, while and the strict forms run as their PCF_byval programs."""
    __slots__ = ("value",)

    def __init__(self, program):
        self.value = Clo(program, None)

    def enter(self, stack, k):
        return self.value, stack, k


_SUC, _PRE, _IFZ, _YN = _Suc(), _Pre(), _Ifzero(), _Y()
_native_cache = {}
_native_lock = threading.Lock()


def native_for(c):
    kind = c.kind
    if kind == "suc":
        return _SUC
    if kind == "pre":
        return _PRE
    if kind == "ifzero":
        return _IFZ
    if kind == "Y":
        return _YN
    key = (kind, c.params)
    hit = _native_cache.get(key)
    if hit is None:
        if kind == "byval":
            hit = _Byval(len(c.params) - 1)
        else:
            from .translations import to_pcf
            hit = _ViaProgram(to_pcf(c))
        with _native_lock:
            _native_cache.setdefault(key, hit)
    return hit


class LibNative(Native):
    """Library arithmetic: query the arguments left to right, then compute.

    ``basic x j i`` only asks for j when i is past the end of x.
    """
    __slots__ = ("name", "arity_", "fn")
    _all = {}

    def __init__(self, name):
        self.name = name
        self.arity_ = library_arity(name)
        self.fn = library.HOST[name]

    @classmethod
    def get(cls, name):
        hit = cls._all.get(name)
        if hit is None:
            hit = cls._all.setdefault(name, cls(name))
        return hit

    def enter(self, stack, k):
        args = [stack.pop() for _ in range(self.arity_)]
        if self.name == "basic":
            x, j, i = args

            def after_i(iv, k, c):
                xs = library.decode(c)
                if iv < len(xs):
                    return NumVal(xs[iv]), [], k
                return j, [], k
            return x, [], push(k, lambda c, k: (i, [], push(k, lambda iv, k: after_i(iv, k, c))))
        return self._collect(args, 0, (), k)

    def _collect(self, args, idx, got, k):
        fn = self.fn
        last = len(args) - 1

        def frame(v, k):
            now = got + (v,)
            if idx == last:
                return NumVal(fn(*now)), [], k
            return self._collect(args, idx + 1, now, k)
        return args[idx], [], push(k, frame)


def library_arity(name):
    return LIB_TYPES[name]


# --- normal forms -------------------------------------------------------------------

def to_expression(h, steps=DEFAULT_STEPS, inst=None):
    if type(h) is HNum:
        return Val(h.n)
    if type(h) is HBot:
        return BOT
    if type(h) is Exhausted:
        return Unresolved(h.steps)
    head = h.head
    arg_types = head.arg_types
    args = [normalize(a, arg_types[i], steps, inst) for i, a in enumerate(h.args)]
    k = h.k
    if k is None:
        br = identity_branches()
    else:
        br = Branches(default=lambda i: to_expression(resume(k, i, steps, inst), steps, inst))
    return Case(head, args, br)


def normalize(val, typ, steps=DEFAULT_STEPS, inst=None, names=None):
    """The (lazy) normal form of the value ``val`` at type ``typ``."""
    if isinstance(val, NVar) and not inst:
        return var_eta(val)
    arg_types = split_arrow(typ)[0]
    params = [NVar(names[i] if names and i < len(names) else "x%d" % i, t)
              for i, t in enumerate(arg_types)]
    return Procedure(params, lambda: to_expression(hnf(val, params, None, steps, inst), steps, inst))


def value_of(proc):
    return PClo(proc, None)


def apply(p, *qs, steps=DEFAULT_STEPS):
    """p . q1 . ... . qn, as a lazy procedure."""
    if len(qs) > len(p.params):
        raise TypeError("too many arguments for a procedure of type %s" % type_str(p.type))
    for param, q in zip(p.params, qs):
        if param.type is not q.type:
            raise TypeError("argument of type %s where %s expected"
                            % (type_str(q.type), type_str(param.type)))
    rest = p.params[len(qs):]
    typ = arrow(*[x.type for x in rest], NAT)
    val = PApp(PClo(p), [PClo(q) for q in qs])
    return normalize(val, typ, steps, names=[x.name for x in rest])


def denote(M, steps=DEFAULT_STEPS):
    """The procedure of a product-free PCF_byval term (free variables stay free)."""
    proc, _ = denote_open(M, steps)
    return proc


def denote_open(M, steps=DEFAULT_STEPS):
    """Like denote, also returning the map from free term variables to NVars."""
    if not term_is_product_free(M):
        raise ProductError("denote needs a product-free term")
    env = None
    free = {}
    for v in sorted(M.fv, key=lambda v: v.name):
        nv = NVar(v.name, v.type)
        free[v] = nv
        env = _bind(env, v, nv)
    names = []
    t = M
    while isinstance(t, Lam):
        names.append(t.var.name)
        t = t.body
    return normalize(Clo(M, env), M.type, steps, names=names), free


def ground_value(proc, steps=DEFAULT_STEPS):
    """n if the closed ground procedure is lam.n, None if bottom or unresolved."""
    e = proc.body
    return e.n if type(e) is Val else None


def run_ground(val, args=(), steps=DEFAULT_STEPS, inst=None):
    """Evaluate a ground application to a number; None if it does not finish."""
    h = hnf(val, args, None, steps, inst)
    if type(h) is HNum:
        return h.n
    if type(h) is HCase:
        raise ValueError("evaluation needs the free variable %s" % h.head)
    return None


@dataclass(frozen=True)
class HeadNormalForm:
    """kind is "bottom", "value", "case" (case y Q of ...) or "application" (y Q)."""
    kind: str
    value: object = None
    head: object = None
    args: tuple = ()
    branches: object = None


def head_reduce(T, budget=None):
    """Head-reduce a ground meta-term (expression, MetaCase or MetaApp).

    ``budget`` is an ExplorationBudget or a plain step count.
    """
    steps = getattr(budget, "steps", budget) or DEFAULT_STEPS
    h = hnf(EClo(T, None), (), None, steps)
    t = type(h)
    if t is HNum:
        return HeadNormalForm("value", h.n)
    if t is HBot:
        return HeadNormalForm("bottom")
    if t is Exhausted:
        return h
    e = to_expression(h, steps)
    if h.k is None:
        return HeadNormalForm("application", head=e.head, args=tuple(e.args))
    return HeadNormalForm("case", head=e.head, args=tuple(e.args), branches=e.branches)


def normalize_meta(T, typ=NAT, steps=DEFAULT_STEPS):
    """Normal form of a meta-procedure (a Procedure) or of a ground meta-term."""
    if isinstance(T, Procedure):
        return normalize(PClo(T), T.type, steps, names=[x.name for x in T.params])
    return normalize(EClo(T, None), typ, steps)


def truncate(p, depth, branches):
    """p cut off below ``depth`` nested cases and at branch indices >= ``branches``.

    The result lies below p in the syntactic order.
    """
    def proc(q, d):
        return Procedure(q.params, lambda: expr(q.body, d))

    def expr(e, d):
        if type(e) is not Case:
            return e
        if d <= 0:
            return BOT
        table = {i: expr(e.branches[i], d - 1) for i in range(branches)}
        return Case(e.head, [proc(a, d - 1) for a in e.args], Branches(table))
    return proc(p, depth)


# --- orders and probes ----------------------------------------------------------------

@dataclass(frozen=True)
class ExplorationBudget:
    steps: int = DEFAULT_STEPS
    depth: int = 6
    branches: int = 6
    far: int = 0    # when set, the probe's last branch is this answer instead of branches-1

    def __post_init__(self):
        if min(self.steps, self.depth, self.branches) <= 0 or self.far < 0:
            raise ValueError("budget fields must be positive")

    @property
    def last_branch(self):
        return self.far or self.branches - 1


TRUE, FALSE, UNKNOWN = True, False, None


def _and3(a, b):
    if a is False or b is False:
        return False
    if a is None or b is None:
        return None
    return True


def syntactic_leq(p, q, budget=ExplorationBudget()):
    """Bounded check of p below q: True, False or None (unknown)."""
    if len(p.params) != len(q.params) or p.type is not q.type:
        return False
    bij = dict(zip(p.params, q.params))
    return _leq_expr(p.body, q.body, bij, budget.depth, budget)


def _leq_proc(p, q, bij, depth, budget):
    if len(p.params) != len(q.params):
        return False
    bij = dict(bij)
    bij.update(zip(p.params, q.params))
    return _leq_expr(p.body, q.body, bij, depth, budget)


def _leq_expr(e1, e2, bij, depth, budget):
    if e1 is BOT:
        return True
    if type(e1) is Unresolved:
        return None
    if type(e2) is Unresolved:
        return None
    if type(e1) is Val:
        return type(e2) is Val and e2.n == e1.n
    if type(e2) is not Case:
        return False
    if bij.get(e1.head, e1.head) is not e2.head or len(e1.args) != len(e2.args):
        return False
    if depth <= 0:
        return True
    res = True
    for a, b in zip(e1.args, e2.args):
        res = _and3(res, _leq_proc(a, b, bij, depth - 1, budget))
        if res is False:
            return False
    for i in range(budget.branches):
        res = _and3(res, _leq_expr(e1.branches[i], e2.branches[i], bij, depth - 1, budget))
        if res is False:
            return False
    return res


def ext_leq(p, p2, arg_grid, steps=DEFAULT_STEPS):
    """Bounded test of the extensional preorder over argument tuples.

    Returns the first argument tuple where p gives n but p2 does not, or None.
    """
    for args in arg_grid:
        a = ground_value(apply(p, *args, steps=steps))
        if a is None:
            continue
        b = ground_value(apply(p2, *args, steps=steps))
        if b != a:
            return tuple(args)
    return None


@dataclass(frozen=True)
class CertifiedUpTo:
    depth: int
    deepest: int
    by_construction: bool = False


@dataclass(frozen=True)
class ChainFound:
    length: int
    bound: int


def lwf_probe(p, D, budget=ExplorationBudget(), source=None):
    """Look for a chain of nested applications longer than D.

    The depth of an application x q0.. is one more than the deepest
    application inside its arguments; branches sit at the same level.  When
    ``source`` is a T_min or W term, the certificate is also marked as
    holding by construction (those terms always denote LWF procedures).
    """
    by_construction = source is not None and (in_language(source, "T_min")
                                              or in_language(source, "W"))
    state = {"nodes": 0}
    limit = budget.steps // 50 + 1000
    deepest = _probe_proc(p, 0, D, budget, state, limit, budget.depth)
    if deepest > D:
        return ChainFound(deepest, D)
    return CertifiedUpTo(D, deepest, by_construction)


def _probe_proc(p, level, D, budget, state, limit, seq):
    return _probe_expr(p.body, level, D, budget, state, limit, seq)


def _probe_expr(e, level, D, budget, state, limit, seq):
    # returns the deepest nesting found (stops early once it exceeds D)
    best = level
    while type(e) is Case:
        state["nodes"] += 1
        if state["nodes"] > limit:
            return best
        inner = level + 1
        best = max(best, inner)
        if best > D:
            return best
        for q in e.args:
            best = max(best, _probe_proc(q, inner, D, budget, state, limit, budget.depth))
            if best > D:
                return best
        if seq <= 0:
            return best
        seq -= 1
        # explore the window of branches; the last one continues the loop
        n = budget.branches
        for i in range(n - 1):
            best = max(best, _probe_expr(e.branches[i], level, D, budget, state, limit, seq))
            if best > D:
                return best
        e = e.branches[budget.last_branch]
    return best


# --- printing -------------------------------------------------------------------------

class _Namer:
    """Display names: a binder gets a suffix when its name is already taken."""

    def __init__(self):
        self.names = {}
        self.used = set()

    def bind(self, x):
        base = x.name
        name, n = base, 0
        while name in self.used:
            n += 1
            name = "%s_%d" % (base, n)
        self.used.add(name)
        self.names[x] = name
        return name

    def __call__(self, x):
        name = self.names.get(x)
        if name is None:
            name = self.bind(x)
        return name


def show_procedure(p, depth=4, branches=4, indent=""):
    """Case-tree rendering of the explored window of p."""
    lines = []
    _show_proc(p, depth, branches, indent, lines, "", _Namer())
    return "\n".join(lines)


def _params_str(p, nm):
    return "λ" + " ".join(nm.bind(x) for x in p.params) + "."


def _show_proc(p, depth, branches, indent, lines, prefix, nm):
    head = prefix + _params_str(p, nm)
    _show_expr(p.body, depth, branches, indent, lines, head, nm)


def _inline_proc(p, depth, nm):
    """Short one-line rendering when the body is small, else None."""
    e = p.body
    if type(e) is Val:
        return _params_str(p, nm) + str(e.n)
    if e is BOT:
        return _params_str(p, nm) + "⊥"
    if type(e) is Case and e.branches.identity and depth > 0:
        ps = _params_str(p, nm)
        inner = [_inline_proc(q, depth - 1, nm) for q in e.args]
        if all(s is not None for s in inner):
            return ps + "%s(%s)" % (nm(e.head), ", ".join(inner))
    return None


def _show_expr(e, depth, branches, indent, lines, head, nm):
    if type(e) is Val:
        lines.append(indent + head + str(e.n))
        return
    if e is BOT:
        lines.append(indent + head + "⊥")
        return
    if type(e) is Unresolved:
        lines.append(indent + head + "? (unresolved after %d steps)" % e.steps)
        return
    if depth <= 0:
        lines.append(indent + head + "case %s(...) of ..." % nm(e.head))
        return
    saved = dict(nm.names), set(nm.used)
    args = [_inline_proc(q, 2, nm) for q in e.args]
    if all(a is not None for a in args):
        app = "%s(%s)" % (nm(e.head), ", ".join(args))
        if e.branches.identity:
            lines.append(indent + head + app)
            return
        lines.append(indent + head + "case %s of" % app)
    else:
        nm.names, nm.used = saved
        lines.append(indent + head + "case %s(" % nm(e.head))
        for q in e.args:
            _show_proc(q, depth - 1, branches, indent + "    ", lines, "", nm)
        if e.branches.identity:
            lines.append(indent + ") of i ⇒ i")
            return
        lines.append(indent + ") of")
    for i in range(branches):
        _show_expr(e.branches[i], depth - 1, branches, indent + "  ", lines, "%d ⇒ " % i, nm)
    lines.append(indent + "  ...")


def to_json(p, depth=4, branches=4, _nm=None):
    """Explored region of a procedure as JSON-ready dicts."""
    nm = _nm or _Namer()
    params = [nm.bind(x) for x in p.params]
    return {"kind": "procedure", "params": params,
            "body": _expr_json(p.body, depth, branches, nm)}


def _expr_json(e, depth, branches, nm):
    if type(e) is Val:
        return {"kind": "value", "value": e.n}
    if e is BOT:
        return {"kind": "bottom"}
    if type(e) is Unresolved:
        return {"kind": "unresolved", "steps": e.steps}
    node = {"kind": "case",
            "scrutinee": {"head": nm(e.head),
                          "args": [to_json(q, depth - 1, branches, nm) for q in e.args]
                          if depth > 0 else "elided"},
            "branches": {}, "default": "elided"}
    if depth > 0:
        for i in range(branches):
            node["branches"][str(i)] = _expr_json(e.branches[i], depth - 1, branches, nm)
    return node
