"""Bar recursion over sequence codes.

Functionals F of type (nat->nat)->nat carve a tree of finite sequences out
of N* by one of two stopping tests, evaluated on the eventually-constant
functions [xs j^w]:

    spector     F([xs 0^w]) < |xs|
    kohlenbach  F([xs 0^w]) = F([xs 1^w])

A node is in the tree when no proper prefix satisfies the test; it is a leaf
when it satisfies the test itself.  ``reference_phi`` is the host-level
simplified bar recursor (leaf value 2<xs>+1, branch functional G) used as the
trusted oracle everywhere else.
"""

import threading
from dataclasses import dataclass, field
from functools import lru_cache

from . import library, nsp
from .library import decode, encode, seq_add
from .terms import (MIN, NAT, PRE, App, Lib, Num, Rec, SUC, Var, Y, app, ifz, lam)
from .types import arrow

SPECTOR, KOHLENBACH = "spector", "kohlenbach"
FLAVORS = (SPECTOR, KOHLENBACH)

DEFAULT_DEPTH = 32
DEFAULT_WINDOW = 64

TYPE1 = arrow(NAT, NAT)
TYPE2 = arrow(TYPE1, NAT)


class Undefined(ValueError):
    """F (or G) gave no numeral on an argument where one was needed."""


class NotInTree(ValueError):
    pass


class NonWellFounded(ValueError):
    """Recursion went past the depth cap: the reachable cone looks infinite."""


def _flavor(flavor):
    f = flavor.lower()
    if f in ("s", "spector"):
        return SPECTOR
    if f in ("k", "kohlenbach"):
        return KOHLENBACH
    raise ValueError("unknown bar condition %r" % flavor)


# --- sequence codes ---------------------------------------------------------------

@dataclass(frozen=True)
class SeqCode:
    code: int

    @classmethod
    def of(cls, xs):
        return cls(encode(xs))

    @property
    def seq(self):
        return decode(self.code)

    def __len__(self):
        return library.seq_len(self.code)

    def add(self, z):
        return SeqCode(seq_add(self.code, z))

    def index(self, i):
        return library.seq_index(self.code, i)

    def __str__(self):
        return "<%s>" % ",".join(map(str, self.seq))


def parse_node(text):
    """'<1,2>' or '1,2' or '' to a list of naturals."""
    s = text.strip().strip("<>⟨⟩ ")
    if not s:
        return []
    return [int(p) for p in s.split(",")]


def seq_primitives():
    """The T0_str programs len, add and basic (library references, family str)."""
    return {"len": Lib("len", "str"), "add": Lib("add", "str"), "basic": Lib("basic", "str")}


# --- functionals as oracles ----------------------------------------------------------

class HostFun(nsp.Native):
    """A host function nat -> nat usable as an argument inside the machine."""
    __slots__ = ("fn",)

    def __init__(self, fn):
        self.fn = fn

    def enter(self, stack, k):
        a = stack.pop()
        fn = self.fn
        return a, [], nsp.push(k, lambda i, k: (nsp.NumVal(fn(i)), [], k))


class HostFunctional(nsp.Native):
    """A host functional of type 2 given as a Python callable on int -> int."""
    __slots__ = ("fn", "steps")

    def __init__(self, fn, steps=nsp.DEFAULT_STEPS):
        self.fn = fn
        self.steps = steps

    def enter(self, stack, k):
        g = stack.pop()
        steps = self.steps

        def probe(i):
            v = nsp.run_ground(g, [nsp.NumVal(i)], steps)
            if v is None:
                raise Undefined("argument undefined at %d" % i)
            return v
        return nsp.NumVal(self.fn(probe)), stack, k


def as_value(x):
    """Procedure, term, host callable or machine value -> machine value."""
    if isinstance(x, nsp.Procedure):
        return nsp.PClo(x)
    if isinstance(x, (nsp.Clo, nsp.PClo, nsp.PApp, nsp.Native, nsp.NumVal)):
        return x
    if callable(x):
        return HostFunctional(x)
    # a term
    return nsp.Clo(x, None)


def call2(F, fn, steps=nsp.DEFAULT_STEPS):
    """F applied to the host function fn (type 2 applied to type 1)."""
    v = nsp.run_ground(as_value(F), [HostFun(fn)], steps)
    if v is None:
        raise Undefined("functional has no value on this argument")
    return v


def basic_proc(xs, j):
    """basic . <xs> . j as a procedure: the function [xs j^w]."""
    c = encode(xs)
    b = nsp.denote(Lib("basic", "str"))
    return nsp.apply(b, nsp.const_proc(c), nsp.const_proc(j))


def eval_on_basic(F, xs, j, steps=nsp.DEFAULT_STEPS):
    """F . (basic . <xs> . j), as a number; Undefined if it has none."""
    xs = list(xs)
    if isinstance(F, nsp.Procedure):
        v = nsp.run_ground(nsp.PClo(F), [nsp.PClo(basic_proc(xs, j))], steps)
        if v is None:
            raise Undefined("F is undefined on [%s %d^w]" % (xs, j))
        return v
    r = len(xs)
    return call2(F, lambda i: xs[i] if i < r else j, steps)


def bar_condition(F, xs, flavor, steps=nsp.DEFAULT_STEPS):
    flavor = _flavor(flavor)
    xs = list(xs)
    a = eval_on_basic(F, xs, 0, steps)
    if flavor == SPECTOR:
        return a < len(xs)
    return a == eval_on_basic(F, xs, 1, steps)


# --- trees --------------------------------------------------------------------------

class BarTree:
    """Memoised membership oracle for the tree of F."""

    def __init__(self, F, flavor, depth=DEFAULT_DEPTH, window=DEFAULT_WINDOW,
                 steps=nsp.DEFAULT_STEPS):
        self.F = F
        self.flavor = _flavor(flavor)
        self.depth = depth
        self.window = window
        self.steps = steps
        self._bar = {}
        self._lock = threading.Lock()

    def satisfies(self, xs):
        key = tuple(xs)
        hit = self._bar.get(key)
        if hit is None:
            hit = bar_condition(self.F, key, self.flavor, self.steps)
            with self._lock:
                self._bar.setdefault(key, hit)
        return hit

    def member(self, xs):
        return not any(self.satisfies(xs[:r]) for r in range(len(xs)))

    def is_leaf(self, xs):
        return self.member(xs) and self.satisfies(xs)

    def is_internal(self, xs):
        return self.member(xs) and not self.satisfies(xs)

    def probed(self):
        with self._lock:
            return dict(self._bar)


@dataclass
class WellFoundedUpToCaps:
    leaves: list
    internal: list


@dataclass
class InfinitePathWitness:
    path: list


@dataclass
class Exceeded:
    path: list
    reason: str


def explore_tree(F, flavor, depth=DEFAULT_DEPTH, window=DEFAULT_WINDOW, max_nodes=100_000,
                 steps=nsp.DEFAULT_STEPS):
    """Walk the tree of F below the caps.  Returns (BarTree, verdict).

    Children 0..window-1 of every internal node are probed.  A path that is
    still internal at the depth cap gives Exceeded; so does running out of
    nodes.  A bounded search never proves a path infinite, so
    InfinitePathWitness is only produced by callers with extra knowledge.
    """
    tree = BarTree(F, flavor, depth, window, steps)
    leaves, internal = [], []
    todo = [[]]
    seen = 0
    while todo:
        xs = todo.pop()
        seen += 1
        if seen > max_nodes:
            return tree, Exceeded(xs, "node cap %d reached" % max_nodes)
        if tree.satisfies(xs):
            leaves.append(xs)
            continue
        internal.append(xs)
        if len(xs) >= depth:
            return tree, Exceeded(xs, "still internal at depth cap %d" % depth)
        for z in reversed(range(window)):
            todo.append(xs + [z])
    return tree, WellFoundedUpToCaps(leaves, internal)


# --- the worked functionals -------------------------------------------------------------

def f_plus(ks):
    """F+_w for moduli ks = [k0..k(w-1)]: F+_0 when ks is empty.

    case f(0) of (i0 < k0 => <i0> | i0 >= k0 => case f(1) of ... ) with the
    last level case f(w) of (iw => <i0..iw>).
    """
    return _f_shape(list(ks), final_bot=False)


def f_trunc(ks):
    """F_w: like F+ but the last level is i < k => <..> | i >= k => bottom."""
    return _f_shape(list(ks), final_bot=True)


def _f_shape(ks, final_bot):
    f = nsp.NVar("f", TYPE1)

    def level(prefix):
        w = len(prefix)

        def branch(i):
            xs = prefix + [i]
            if w < len(ks) and i < ks[w]:
                return nsp.Val(encode(xs))
            if w < len(ks) - 1 or (w == len(ks) - 1 and not final_bot):
                return level(xs)
            if w == len(ks) - 1:
                return nsp.BOT
            return nsp.Val(encode(xs))
        return nsp.Case(f, [nsp.const_proc(w)], nsp.Branches(default=branch))
    if final_bot and not ks:
        raise ValueError("a truncation needs at least one modulus")
    return nsp.Procedure([f], lambda: level([]))


def g0():
    """G0 = lam g. case g(0) of i => 2i."""
    g = nsp.NVar("g", TYPE1)
    return nsp.Procedure([g], nsp.Case(g, [nsp.const_proc(0)],
                                       nsp.Branches(default=lambda i: nsp.Val(2 * i))))


def const_functional(n):
    g = nsp.NVar("f", TYPE1)
    return nsp.Procedure([g], nsp.Val(n))


def g_mixed():
    """lam g. g(1) + 2 g(0): asks for two children, the later one first."""
    g = nsp.NVar("g", TYPE1)

    def after1(a):
        return nsp.Case(g, [nsp.const_proc(0)], nsp.Branches(default=lambda b: nsp.Val(a + 2 * b)))
    return nsp.Procedure([g], nsp.Case(g, [nsp.const_proc(1)], nsp.Branches(default=after1)))


# term versions (T0_str) of the same functionals

def _L(name):
    return Lib(name, "str")


def f_plus_term(ks):
    """A T0_str term extensionally equal to f_plus(ks)."""
    f = Var("f", TYPE1)

    def code(w):
        c = Num(0)
        for i in range(w + 1):
            c = app(_L("add"), c, App(f, Num(i)))
        return c

    def level(w):
        if w == len(ks):
            return code(w)
        return ifz(app(_L("lt"), App(f, Num(w)), Num(ks[w])), code(w), level(w + 1))
    return lam(f, level(0))


def g0_term():
    g = Var("g", TYPE1)
    return lam(g, App(_L("double"), App(g, Num(0))))


# --- reference recursor ------------------------------------------------------------------

class ReferencePhi:
    """Host simplified bar recursor for fixed F, G: phi(xs) per the two equations."""

    def __init__(self, F, G, flavor=KOHLENBACH, depth=DEFAULT_DEPTH, steps=nsp.DEFAULT_STEPS):
        self.tree = BarTree(F, flavor, depth, steps=steps)
        self.G = G
        self.depth = depth
        self.steps = steps
        self.memo = {}

    def __call__(self, xs, _check=True):
        xs = list(xs)
        if _check and not self.tree.member(xs):
            raise NotInTree("%s is not in the tree" % xs)
        return self._phi(xs, 0)

    def at_code(self, c):
        return self(decode(c))

    def _phi(self, xs, depth):
        key = tuple(xs)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if self.tree.satisfies(xs):
            v = 2 * encode(xs) + 1
        else:
            if depth >= self.depth:
                raise NonWellFounded("no leaf within depth %d at %s" % (self.depth, xs))
            v = call2(self.G, lambda z: self._phi(xs + [z], depth + 1), self.steps)
        self.memo[key] = v
        return v


def reference_phi(F, G, xs=(), flavor=KOHLENBACH, depth=DEFAULT_DEPTH, steps=nsp.DEFAULT_STEPS):
    """Phi(F, G, <xs>) computed by recursion on the tree of F."""
    return ReferencePhi(F, G, flavor, depth, steps)(list(xs))


def general_phi(F, L, G, xs=(), flavor=KOHLENBACH, depth=DEFAULT_DEPTH):
    """Unsimplified recursor: host callables L(code) and G(code, g)."""
    tree = BarTree(F, flavor, depth)

    def phi(ys, d):
        if tree.satisfies(ys):
            return L(encode(ys))
        if d >= depth:
            raise NonWellFounded("no leaf within depth %d" % depth)
        return G(encode(ys), lambda z: phi(ys + [z], d + 1))
    xs = list(xs)
    if not tree.member(xs):
        raise NotInTree("%s is not in the tree" % xs)
    return phi(xs, 0)


# --- canonical programs --------------------------------------------------------------------

@lru_cache(maxsize=None)
def canonical_br(flavor):
    """BR^S or BR^K as a closed PCF term of type 2 -> (nat->nat) -> (nat->1->nat) -> nat -> nat."""
    flavor = _flavor(flavor)
    L_ = lambda name: Lib(name, "pcf")
    F = Var("F", TYPE2)
    Lf = Var("L", TYPE1)
    G = Var("G", arrow(NAT, TYPE1, NAT))
    B = Var("B", TYPE1)
    x = Var("x", NAT)
    z = Var("z", NAT)
    at = lambda j: App(F, app(L_("basic"), x, Num(j)))
    if flavor == SPECTOR:
        test = app(L_("lt"), at(0), App(L_("len"), x))
    else:
        test = app(L_("eq"), at(0), at(1))
    body = ifz(test, App(Lf, x), app(G, x, lam(z, App(B, app(L_("add"), x, z)))))
    return lam(F, Lf, G, App(Y(TYPE1), lam(B, x, body)))


@lru_cache(maxsize=None)
def simplified(flavor):
    """lam F G x. BR F (lam x. 2x+1) (lam x g. G g) x : 2 -> 2 -> 1."""
    F = Var("F", TYPE2)
    G = Var("G", TYPE2)
    x = Var("x", NAT)
    y = Var("y", NAT)
    g = Var("g", TYPE1)
    leaf = lam(y, App(SUC, App(Lib("double", "pcf"), y)))
    branch = lam(y, g, App(G, g))
    return lam(F, G, x, app(canonical_br(flavor), F, leaf, branch, x))


# --- Spector to Kohlenbach ----------------------------------------------------------------

def u_functional(F, cap=10_000, steps=nsp.DEFAULT_STEPS):
    """U(F) = lam g. (min r. F[g0..g(r-1) 0^w] = F[g0..g(r-1) 1^w]) - 1, host level."""
    def U(g):
        prefix = []
        for r in range(cap + 1):
            if eval_on_basic(F, prefix, 0, steps) == eval_on_basic(F, prefix, 1, steps):
                return max(r - 1, 0)
            prefix.append(g(r))
        raise NonWellFounded("U: no r below %d along the probed argument" % cap)
    return U


def u_term():
    """U as a T+min term (library family rec) of type 2 -> 2."""
    L_ = lambda name: Lib(name, "rec")
    F = Var("F", TYPE2)
    g = Var("g", TYPE1)
    r = Var("r", NAT)
    acc = Var("acc", NAT)
    k = Var("k", NAT)
    prefix = app(Rec(NAT), Num(0), lam(acc, k, app(L_("add"), acc, App(g, k))), r)
    test = app(L_("eq"), App(F, app(L_("basic"), prefix, Num(0))),
               App(F, app(L_("basic"), prefix, Num(1))))
    return lam(F, g, App(PRE, app(MIN, lam(r, test), Num(0))))


def spector_to_kohlenbach_bridge(phi_S, steps=nsp.DEFAULT_STEPS):
    """Wrap a Spector recursor phi_S(F, G, xs) into a Kohlenbach one.

    Phi^K(F, G, xs) = 2<>+1 if F[0^w] = F[1^w], else phi_S(U(F), G, xs).
    """
    def phi_K(F, G, xs=()):
        if eval_on_basic(F, [], 0, steps) == eval_on_basic(F, [], 1, steps):
            return 2 * encode([]) + 1
        return phi_S(u_functional(F, steps=steps), G, list(xs))
    return phi_K


def reference_spector(F, G, xs=()):
    return reference_phi(F, G, xs, SPECTOR)


# --- conformance ---------------------------------------------------------------------------

@dataclass
class Violation:
    node: list
    expected: object
    actual: object
    kind: str

    def as_dict(self):
        return {"node": self.node, "expected": self.expected, "actual": self.actual,
                "kind": self.kind}


@dataclass
class ConformanceReport:
    checked: int = 0
    violations: list = field(default_factory=list)
    truncated: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def candidate_caller(candidate, steps=nsp.DEFAULT_STEPS):
    """(F, G, code) -> number or None, for a procedure / term / host callable."""
    if callable(candidate) and not isinstance(candidate, (nsp.Procedure, nsp.Native)):
        return lambda F, G, c: candidate(F, G, decode(c))
    val = as_value(candidate)

    def call(F, G, c):
        return nsp.run_ground(val, [as_value(F), as_value(G), nsp.NumVal(c)], steps)
    return call


def conformance_check(candidate, battery, flavor=KOHLENBACH, depth=None, window=None,
                      max_nodes=None, steps=nsp.DEFAULT_STEPS):
    """Check the two recursor equations at every probed node of each tree.

    ``battery`` is a list of (F, G) pairs.  The right-hand side at an
    internal node applies G to lam z. candidate(F, G, x.z).
    """
    flavor = _flavor(flavor)
    caps = CONFORMANCE_CAPS[flavor]
    depth = caps["depth"] if depth is None else depth
    window = caps["window"] if window is None else window
    max_nodes = caps["max_nodes"] if max_nodes is None else max_nodes
    call = candidate_caller(candidate, steps)
    rep = ConformanceReport()
    for F, G in battery:
        tree, verdict = explore_tree(F, flavor, depth, window, max_nodes, steps)
        if not isinstance(verdict, WellFoundedUpToCaps):
            rep.truncated.append({"reason": verdict.reason, "path": verdict.path})
        nodes = verdict.leaves + verdict.internal if isinstance(verdict, WellFoundedUpToCaps) \
            else [list(k) for k in tree.probed()]
        for xs in nodes:
            if not tree.member(xs):
                continue
            c = encode(xs)
            rep.checked += 1
            actual = call(F, G, c)
            if tree.satisfies(xs):
                expected, kind = 2 * c + 1, "leaf"
            else:
                kind = "internal"

                def child(z, F=F, G=G, c=c):
                    v = call(F, G, seq_add(c, z))
                    if v is None:
                        raise Undefined("candidate undefined at child %d" % z)
                    return v
                try:
                    expected = call2(G, child, steps)
                except Undefined as e:
                    expected = "undefined: %s" % e
            if actual != expected:
                rep.violations.append(Violation(xs, expected, actual, kind))
    return rep


def spector_shape(ks):
    """A functional whose Spector tree mirrors the Kohlenbach tree of f_plus(ks).

    F(f) = w for the first level w with f(w) < ks[w], and len(ks) if none.
    """
    f = nsp.NVar("f", TYPE1)

    def level(w):
        if w == len(ks):
            return nsp.Val(w)
        return nsp.Case(f, [nsp.const_proc(w)],
                        nsp.Branches(default=lambda i: nsp.Val(w) if i < ks[w] else level(w + 1)))
    return nsp.Procedure([f], lambda: level(0))


def mixed_tree(flavor):
    """A depth-3 tree with leaves at every depth from 1 to 3."""
    return f_plus([1, 2]) if _flavor(flavor) == KOHLENBACH else spector_shape([1, 2])


def standard_battery(flavor=KOHLENBACH):
    """Battery used by the acceptance suite: F's times G's."""
    Fs = [const_functional(0), f_plus([]), f_plus([2]), mixed_tree(flavor)]
    Gs = [g0(), g_mixed()]
    return [(F, G) for F in Fs for G in Gs]


# Spector trees of the F+ shapes are deep (a node needs length above its own
# code), so the Spector checks use a narrower window by default.
CONFORMANCE_CAPS = {KOHLENBACH: dict(depth=6, window=4, max_nodes=2000),
                    SPECTOR: dict(depth=16, window=2, max_nodes=64)}
