"""Constructive separation of an LWF candidate from genuine bar recursion.

Given a candidate Psi : 2 -> 2 -> 1 that is meant to be a simplified weak
Kohlenbach bar recursor, the pipeline

    analyze -> choose_critical_path -> build_G1 -> verify_separation

traces the computation of Psi F G <> with F and G left symbolic, records every
oracle call and its outcome under approximations of the final F, and keeps
refining F one level deeper until the traced subcomputations stop calling F
or G.  From the recorded tables it builds a G1 that agrees with G0 on every
neighbourhood the candidate relied on, while pushing the reference recursor
to a value K the candidate never sees.
"""

import random
from dataclasses import dataclass, field
from typing import Optional

from . import nsp
from .barrec import (KOHLENBACH, TYPE1, TYPE2, ReferencePhi, as_value, f_plus, f_trunc, g0)
from .terms import (NAT, App, Lib, Num, SUC, Term, Var, app, ifz, in_language, lam)
from .types import arrow

SCHEMA = "nsplab.separation/1"
CANDIDATE_TYPE = arrow(TYPE2, TYPE2, NAT, NAT)

K_SCHEDULE_CAP = 2 ** 16
DEFAULT_DEPTH_CAP = 8
DEFAULT_STEPS = nsp.DEFAULT_STEPS
DEFAULT_MAX_ENTRIES = 20_000


class AnalysisError(RuntimeError):
    pass


class TraceExhausted(AnalysisError):
    def __init__(self, msg, partial=()):
        super().__init__(msg)
        self.partial = list(partial)


class BottomReached(AnalysisError):
    pass


class AnalysisInapplicable(AnalysisError):
    """A subcomputation did not produce a numeral (candidate is not a recursor)."""


class DepthCapExceeded(AnalysisError):
    pass


class EntryCapExceeded(AnalysisError):
    pass


class ModulusNotFound(AnalysisError):
    pass


class InfeasibleSelection(AnalysisError):
    pass


class Rejected(AnalysisError):
    """The candidate failed the LWF gate; ``evidence`` says why."""

    def __init__(self, msg, evidence=None):
        super().__init__(msg)
        self.evidence = evidence


# the symbolic oracles
F_VAR = nsp.NVar("F", TYPE2)
G_VAR = nsp.NVar("G", TYPE2)


@dataclass
class OracleTraceEntry:
    oracle: str
    arg: object = field(repr=False)
    outcome: int
    level: int
    index: int = 0
    parent: Optional["OracleTraceEntry"] = field(default=None, repr=False)
    parent_z: Optional[int] = None

    def procedure(self):
        """The argument as a procedure with F and G free."""
        return nsp.normalize(self.arg, TYPE1)

    @property
    def label(self):
        return "%s^%d_%d" % ("f" if self.oracle == "F" else "g", self.level, self.index)


def _inst(F, G):
    return {F_VAR: as_value(F), G_VAR: as_value(G)}


def trace(val, args, F, G, steps=DEFAULT_STEPS, level=0, parent=None, z=None):
    """Head-reduce val(args) with F, G symbolic, answering each oracle call.

    Each call F(h) or G(h) is answered by evaluating it under the given
    instances.  Returns (entries, numeral).
    """
    inst = _inst(F, G)
    entries = []
    h = nsp.hnf(val, args, None, steps)
    while True:
        t = type(h)
        if t is nsp.HNum:
            return entries, h.n
        if t is nsp.HBot:
            raise BottomReached("reached a bottom leaf after %d oracle calls" % len(entries))
        if t is nsp.Exhausted:
            raise TraceExhausted("head reduction ran out of steps (%d)" % h.steps, entries)
        head = h.head
        if head is not F_VAR and head is not G_VAR:
            raise AnalysisError("stuck on an unexpected free variable %s" % head)
        (arg,) = h.args
        out = nsp.run_ground(inst[head], [arg], steps, inst)
        if out is None:
            raise TraceExhausted("oracle call %s(...) has no value within budget" % head.name,
                                 entries)
        entries.append(OracleTraceEntry(head.name, arg, out, level, 0, parent, z))
        h = nsp.resume(h.k, out, steps)


def trace_toplevel(psi0, F, G, steps=DEFAULT_STEPS):
    """Trace psi0 : 2 -> 2 -> 0 applied to symbolic F, G."""
    return trace(as_value(psi0), [F_VAR, G_VAR], F, G, steps)


def candidate_value(candidate):
    if isinstance(candidate, Term):
        return nsp.Clo(candidate, None)
    return as_value(candidate)


def _psi0(candidate):
    return nsp.PApp(candidate_value(candidate), [F_VAR, G_VAR, nsp.NumVal(0)])


# --- analysis state --------------------------------------------------------------------------

@dataclass
class Level:
    w: int
    entries: list
    k: int
    m: int = 0
    q: dict = field(default_factory=dict)   # (i, z) -> numeral, F-entries
    r: dict = field(default_factory=dict)   # (i, z) -> numeral, G-entries

    @property
    def f_entries(self):
        return [e for e in self.entries if e.oracle == "F"]

    @property
    def g_entries(self):
        return [e for e in self.entries if e.oracle == "G"]

    @property
    def n(self):
        return len(self.g_entries)

    @property
    def l(self):
        return len(self.f_entries)


@dataclass
class AnalysisState:
    candidate: object = field(repr=False)
    c: int
    levels: list
    d: int
    top: list = field(repr=False)
    steps: int = DEFAULT_STEPS

    @property
    def ks(self):
        return [lv.k for lv in self.levels]

    @property
    def ms(self):
        return [lv.m for lv in self.levels]

    @property
    def F_inf(self):
        return f_plus(self.ks)

    def F_w(self, w):
        return f_trunc(self.ks[:w + 1])

    def F_plus(self, w):
        return f_plus(self.ks[:w])

    def neighbourhoods(self):
        """Per G-entry: (level, index, constraint table {z: r}, required v)."""
        out = []
        for lv in self.levels:
            for e in lv.g_entries:
                table = {z: lv.r[(e.index, z)] for z in range(lv.m)}
                out.append(CriticalNeighbourhood(lv.w, e.index, table, e.outcome))
        return out

    def numbers(self):
        nums = {self.c}
        for lv in self.levels:
            nums.add(lv.k)
            nums.add(lv.m)
            nums.update(e.outcome for e in lv.entries)
            nums.update(lv.q.values())
            nums.update(lv.r.values())
        return nums

    def check_invariants(self, window=None):
        """Assert the moduli inequalities and that F_w lies below F+_w, F+_(w+1) and F_inf."""
        total_n = 0
        prev_m = 0
        for lv in self.levels:
            total_n += lv.n
            assert lv.k >= 1, "k^%d must be positive" % lv.w
            assert lv.m > lv.k + total_n + lv.w + 1, "m^%d too small" % lv.w
            assert lv.m >= prev_m, "m^%d below m^%d" % (lv.w, lv.w - 1)
            prev_m = lv.m
        assert self.d == len(self.levels) - 1
        budget = window or nsp.ExplorationBudget(depth=2 * (self.d + 2) + 2, branches=3)
        F_inf = self.F_inf
        for w in range(self.d + 1):
            Fw = self.F_w(w)
            for name, upper in (("F+_%d" % w, self.F_plus(w)), ("F+_%d" % (w + 1), self.F_plus(w + 1)),
                                ("F_inf", F_inf)):
                assert nsp.syntactic_leq(Fw, upper, budget) is not False, \
                    "F_%d not below %s" % (w, name)
        return True


@dataclass
class CriticalNeighbourhood:
    w: int
    i: int
    table: dict
    v: int

    def as_procedure(self):
        """lam z. case z() of (z < m => r_z | otherwise bottom): least member of V."""
        z = nsp.NVar("z", NAT)
        table = {k: nsp.Val(v) for k, v in self.table.items()}
        return nsp.Procedure([z], nsp.Case(z, [], nsp.Branches(table)))


# --- analysis ---------------------------------------------------------------------------------

def _schedule(cap=K_SCHEDULE_CAP):
    k = 1
    while k <= cap:
        yield k
        k *= 2


def _run_all(subs, F, G, steps, level):
    """Trace every (entry, z) subcomputation; returns (values, children)."""
    values = {}
    children = []
    for e, z in subs:
        ents, v = trace(e.arg, [nsp.NumVal(z)], F, G, steps, level, e, z)
        values[(e.oracle, e.index, z)] = v
        children.extend(ents)
    return values, children


def find_truncation_modulus(check, cap=K_SCHEDULE_CAP):
    """Smallest k in 1, 2, 4, ... with check(k) true."""
    for k in _schedule(cap):
        try:
            if check(k):
                return k
        except AnalysisError:
            continue
    raise ModulusNotFound("no truncation modulus up to %d preserves the outcomes" % cap)


def _number(entries):
    nf = ng = 0
    for e in entries:
        if e.oracle == "F":
            e.index, nf = nf, nf + 1
        else:
            e.index, ng = ng, ng + 1
    return entries


def analyze_top(candidate, steps=DEFAULT_STEPS, k_cap=K_SCHEDULE_CAP):
    """Level 0: c under (F+_0, G0), the modulus k0 and the entries under F_0."""
    G0 = g0()
    psi0 = _psi0(candidate)
    try:
        _, c = trace(psi0, [], f_plus([]), G0, steps)
    except AnalysisError as e:
        raise AnalysisInapplicable("top-level computation under F+_0: %s" % e) from e

    def top_ok(k):
        return trace(psi0, [], f_trunc([k]), G0, steps)[1] == c

    k0 = find_truncation_modulus(top_ok, k_cap)
    top, c0 = trace(psi0, [], f_trunc([k0]), G0, steps)
    assert c0 == c
    return c, k0, _number(top)


def analyze(candidate, depth_cap=DEFAULT_DEPTH_CAP, steps=DEFAULT_STEPS,
            max_entries=DEFAULT_MAX_ENTRIES, k_cap=K_SCHEDULE_CAP):
    """Run the level-by-level computation analysis of candidate <>."""
    G0 = g0()
    c, k0, top = analyze_top(candidate, steps, k_cap)
    levels = [Level(0, top, k0)]
    total_n = 0
    w = 0
    while True:
        lv = levels[w]
        total_n += lv.n
        lv.m = max(lv.k + total_n + w + 2, levels[w - 1].m if w else 0)
        ks = [x.k for x in levels]
        subs = [(e, z) for e in lv.entries
                for z in (range(w + 1) if e.oracle == "F" else range(lv.m))]
        if len(subs) > max_entries:
            raise EntryCapExceeded("%d subcomputations at level %d exceed the cap of %d"
                                   % (len(subs), w, max_entries))
        try:
            values, children = _run_all(subs, f_plus(ks), G0, steps, w + 1)
        except AnalysisError as e:
            raise AnalysisInapplicable("level %d subcomputation: %s" % (w, e)) from e
        for (o, i, z), v in values.items():
            (lv.q if o == "F" else lv.r)[(i, z)] = v
        if not children:
            return AnalysisState(candidate, c, levels, w, top, steps)
        if w + 1 > depth_cap:
            raise DepthCapExceeded("analysis still finds oracle calls at depth %d (cap %d)"
                                   % (w + 1, depth_cap))
        if sum(len(x.entries) for x in levels) + len(children) > max_entries:
            raise EntryCapExceeded("more than %d trace entries by depth %d" % (max_entries, w + 1))
        found = {}

        def sub_ok(k):
            vals, ch = _run_all(subs, f_trunc(ks + [k]), G0, steps, w + 1)
            if vals != values:
                return False
            found[k] = ch
            return True

        k = find_truncation_modulus(sub_ok, k_cap)
        levels.append(Level(w + 1, _number(found[k]), k))
        w += 1


# --- the counterexample -----------------------------------------------------------------------

def theta(n):
    """Odd part of a positive n."""
    if n <= 0:
        raise ValueError("theta needs a positive number")
    while n % 2 == 0:
        n //= 2
    return n


@dataclass
class CounterexamplePackage:
    x: list
    y: list
    K: int
    G1: object = field(default=None, repr=False)
    G1_term: object = field(default=None, repr=False)
    psi_result: Optional[int] = None
    phi_result: Optional[int] = None

    def check_invariants(self, state):
        for w, xw in enumerate(self.x):
            lv = state.levels[w]
            assert lv.k <= xw < lv.m, "x_%d outside [k, m)" % w
        th = [theta(v) for v in self.y]
        assert len(set(th)) == len(th), "theta(y) not pairwise distinct"
        for w in range(len(self.x)):
            forbidden = {lv.r[(e.index, 0)] for lv in state.levels[:w + 1] for e in lv.g_entries}
            assert self.y[w + 1] not in forbidden, "y_%d meets a neighbourhood" % (w + 1)
        assert self.K > max(state.numbers() | set(self.y)), "K not above every recorded number"
        assert self.K != state.c
        return True


def choose_critical_path(state, steps=DEFAULT_STEPS):
    """Pick x_w in [k^w, m^w) and y_0..y_(d+1), K as described in the module doc."""
    phi0 = ReferencePhi(state.F_inf, g0(), KOHLENBACH, depth=state.d + 8, steps=steps)
    y = [phi0([0])]
    x = []
    forbidden = set()
    count = 0
    for lv in state.levels:
        w = lv.w
        forbidden |= {lv.r[(e.index, 0)] for e in lv.g_entries}
        count += lv.n
        # counting bound: at most count + (w+1) values are excluded
        if not lv.m - lv.k > count + (w + 1):
            raise InfeasibleSelection("interval [%d, %d) too narrow at level %d" % (lv.k, lv.m, w))
        seen = {theta(v) for v in y}
        for xw in range(lv.k, lv.m):
            yy = phi0(x + [xw, 0])
            if yy not in forbidden and theta(yy) not in seen:
                break
        else:
            raise InfeasibleSelection("no admissible x_%d in [%d, %d)" % (w, lv.k, lv.m))
        x.append(xw)
        y.append(yy)
    K = 1 + max(state.numbers() | set(y) | set(x) | {state.c})
    return CounterexamplePackage(x, y, K)


def build_G1(x, y, K):
    """G1 as a procedure and as a T0_str term."""
    if len(set(y)) != len(y):
        raise ValueError("y values must be pairwise distinct")
    if len(y) != len(x) + 1:
        raise ValueError("need one more y than x")
    g = nsp.NVar("g", TYPE1)
    d1 = len(x)
    table = {y[d1]: nsp.Val(K)}
    for u in range(d1 - 1, -1, -1):
        yu = y[u]
        table[yu] = nsp.Case(g, [nsp.const_proc(x[u])],
                             nsp.Branches({K: nsp.Val(K)}, default=lambda j, yu=yu: nsp.Val(2 * yu)))
    proc = nsp.Procedure([g], nsp.Case(g, [nsp.const_proc(0)],
                                       nsp.Branches(table, default=lambda i: nsp.Val(2 * i))))
    return proc, g1_term(x, y, K)


def g1_term(x, y, K):
    L = lambda name: Lib(name, "str")
    g = Var("g", TYPE1)
    g0v = App(g, Num(0))
    dbl = App(L("double"), g0v)
    is_ = lambda a, n: app(L("eq"), a, Num(n))
    body = dbl
    for u in range(len(x)):
        inner = ifz(is_(App(g, Num(x[u])), K), Num(K), dbl)
        body = ifz(is_(g0v, y[u]), inner, body)
    body = ifz(is_(g0v, y[len(x)]), Num(K), body)
    return lam(g, body)


# --- verification ------------------------------------------------------------------------------

@dataclass
class SeparationReport:
    c: int
    d: int
    k: list
    m: list
    x: list
    y: list
    K: int
    psi_result: Optional[int]
    phi_result: Optional[int]
    checks: dict
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return all(self.checks.values()) and self.psi_result == self.c \
            and self.phi_result == self.K and self.c != self.K

    def as_dict(self):
        return {"schema": SCHEMA, "c": self.c, "d": self.d, "k": self.k, "m": self.m,
                "x": self.x, "y": self.y, "K": self.K, "psi_result": self.psi_result,
                "phi_result": self.phi_result, "checks": dict(self.checks),
                "pass": self.passed, "failures": list(self.failures)}


def neighbourhood_check(state, G, steps=DEFAULT_STEPS):
    """G . g = v for all g in each V^w_i, via the least member of V^w_i.

    Every g in V^w_i lies above the table procedure, so by monotonicity a
    numeral for the table procedure is the value for all of them.
    Returns the list of failed (w, i, expected, actual).
    """
    bad = []
    Gv = as_value(G)
    for nb in state.neighbourhoods():
        got = nsp.run_ground(Gv, [nsp.PClo(nb.as_procedure())], steps)
        if got != nb.v:
            bad.append((nb.w, nb.i, nb.v, got))
    return bad


def run_candidate(candidate, F, G, code=0, steps=DEFAULT_STEPS):
    return nsp.run_ground(candidate_value(candidate), [as_value(F), as_value(G), nsp.NumVal(code)],
                          steps)


def verify_separation(candidate, state, pkg, steps=DEFAULT_STEPS, G=None):
    """Run the three checks; ``G`` overrides G1 (control runs)."""
    G1 = pkg.G1 if G is None else G
    failures = []
    bad = neighbourhood_check(state, G1, steps)
    failures += ["neighbourhood g^%d_%d: expected %d, got %s" % b for b in bad]
    psi = run_candidate(candidate, state.F_inf, G1, 0, steps)
    if psi != state.c:
        failures.append("candidate gave %s, expected c = %d" % (psi, state.c))
    phi1 = ReferencePhi(state.F_inf, G1, KOHLENBACH, depth=state.d + 8, steps=steps)
    phi = phi1([])
    phi_ok = phi == pkg.K
    if G is None:
        for w in range(len(pkg.x) + 1):
            xw = pkg.x[:w]
            if phi1(xw + [0]) != pkg.y[w]:
                phi_ok = False
                failures.append("phi1(x^%d.0) != y_%d" % (w, w))
            if phi1(xw) != pkg.K:
                phi_ok = False
                failures.append("phi1(x^%d) != K" % w)
    pkg.psi_result, pkg.phi_result = psi, phi
    checks = {"neighbourhood": not bad, "psi_eval": psi == state.c, "phi_eval": phi_ok}
    return SeparationReport(state.c, state.d, state.ks, state.ms, pkg.x, pkg.y, pkg.K,
                            psi, phi, checks, failures)


# --- securing property --------------------------------------------------------------------------

def random_member(state, rng):
    """A random G in the critical neighbourhood, different from G0 and G1 in general.

    Values of g(0) that occur in some constraint table keep the answer 2 g(0)
    on the constrained cylinders but may probe one more index; every other
    value of g(0) gets an arbitrary answer.
    """
    groups = {}
    for nb in state.neighbourhoods():
        groups.setdefault(nb.table[0], []).append(nb)
    g = nsp.NVar("g", TYPE1)
    table = {}
    for a, nbs in groups.items():
        v = nbs[0].v
        if any(nb.v != v for nb in nbs):
            raise AnalysisError("neighbourhoods with the same g(0) need different values")
        width = min(len(nb.table) for nb in nbs)
        if width > 1 and rng.random() < 0.7:
            z = rng.randrange(1, width)
            ok = {nb.table[z]: nsp.Val(v) for nb in nbs}
            noise = rng.randrange(1, 10 ** 6)
            table[a] = nsp.Case(g, [nsp.const_proc(z)],
                                nsp.Branches(ok, default=lambda j, noise=noise: nsp.Val(noise + j)))
        else:
            table[a] = nsp.Val(v)
    probe_at = rng.randrange(0, 5)
    mul, add = rng.randrange(1, 7), rng.randrange(0, 1000)

    def other(i):
        return nsp.Case(g, [nsp.const_proc(probe_at)],
                        nsp.Branches(default=lambda j: nsp.Val(mul * i + j + add)))
    return nsp.Procedure([g], nsp.Case(g, [nsp.const_proc(0)], nsp.Branches(table, default=other)))


def securing_check(state, G, steps=DEFAULT_STEPS):
    """Same top-level path and value c under (F_inf, G); claims 1-4 as equalities.

    Returns a list of failure strings (empty when the computation is secured).
    """
    failures = []
    F = state.F_inf
    ents, v = trace(_psi0(state.candidate), [], F, G, steps)
    path = [(e.oracle, e.outcome) for e in ents]
    want = [(e.oracle, e.outcome) for e in state.top]
    if path != want:
        failures.append("top-level path differs")
    if v != state.c:
        failures.append("value %s instead of c = %d" % (v, state.c))
    inst = _inst(F, G)
    for lv in state.levels:
        for e in lv.entries:
            out = nsp.run_ground(inst[F_VAR if e.oracle == "F" else G_VAR], [e.arg], steps, inst)
            if out != e.outcome:
                failures.append("claim %d fails for %s" % (3 if e.oracle == "F" else 4, e.label))
            zs = range(lv.w + 1) if e.oracle == "F" else range(lv.m)
            tab = lv.q if e.oracle == "F" else lv.r
            for z in zs:
                got = nsp.run_ground(e.arg, [nsp.NumVal(z)], steps, inst)
                if got != tab[(e.index, z)]:
                    failures.append("claim %d fails for %s at %d" %
                                    (1 if e.oracle == "F" else 2, e.label, z))
    return failures


# --- candidates and the pipeline ------------------------------------------------------------------

def make_truncated_candidate(D):
    """A T term (library family rec) recursing like the Kohlenbach recursor to depth D.

    Below depth D it returns the leaf value 2<x>+1 without asking the tree.
    """
    if D < 0:
        raise ValueError("D must be non-negative")
    L = lambda name: Lib(name, "rec")
    F = Var("F", TYPE2)
    G = Var("G", TYPE2)
    x = Var("x", NAT)

    def leaf(t):
        return App(SUC, App(L("double"), t))

    def body(n, t):
        if n == 0:
            return leaf(t)
        z = Var("z%d" % n, NAT)
        test = app(L("eq"), App(F, app(L("basic"), t, Num(0))), App(F, app(L("basic"), t, Num(1))))
        return ifz(test, leaf(t), App(G, lam(z, body(n - 1, app(L("add"), t, z)))))
    return lam(F, G, x, body(D, x))


def lwf_gate(candidate, bound=6, budget=None):
    """Certificate for T_min / W terms; otherwise probe the procedure.

    Returns a description of the evidence; raises Rejected on ChainFound.
    """
    if isinstance(candidate, Term):
        if in_language(candidate, "T_min") or in_language(candidate, "W"):
            return "LWF by construction (T+min or W term)"
        proc = nsp.denote(candidate)
    else:
        proc = candidate
    # Spector trees only deepen when F answers above the current length, so
    # the last explored answer is a large one
    budget = budget or nsp.ExplorationBudget(depth=4 * bound, branches=2, far=64)
    res = nsp.lwf_probe(proc, bound, budget)
    if isinstance(res, nsp.ChainFound):
        raise Rejected("candidate is not LWF: a chain of %d nested applications exceeds %d"
                       % (res.length, res.bound), res)
    return "no nesting beyond %d within the probed window" % bound


@dataclass
class SeparationRun:
    state: AnalysisState
    package: CounterexamplePackage
    report: SeparationReport
    evidence: str


def separate(candidate, depth_cap=DEFAULT_DEPTH_CAP, steps=DEFAULT_STEPS, lwf_bound=6,
             skip_gate=False):
    """Full pipeline on a candidate term or procedure."""
    if candidate.type != CANDIDATE_TYPE:
        raise TypeError("candidate must have type 2 -> 2 -> 1")
    evidence = "gate skipped" if skip_gate else lwf_gate(candidate, lwf_bound)
    state = analyze(candidate, depth_cap, steps)
    state.check_invariants()
    pkg = choose_critical_path(state, steps)
    pkg.G1, pkg.G1_term = build_G1(pkg.x, pkg.y, pkg.K)
    pkg.check_invariants(state)
    report = verify_separation(candidate, state, pkg, steps)
    return SeparationRun(state, pkg, report, evidence)
