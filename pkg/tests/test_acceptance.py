"""Acceptance suite: one test and one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the summary)
or ``python tests/test_acceptance.py``.
"""

import random
import time

import pytest

from conftest import ACCEPTANCE
from nsplab import nsp
from nsplab.barrec import (KOHLENBACH, SPECTOR, WellFoundedUpToCaps, call2, conformance_check,
                           explore_tree, f_plus, g0, reference_phi, reference_spector, simplified,
                           spector_to_kohlenbach_bridge, standard_battery)
from nsplab.corpus import generate_corpus
from nsplab.library import encode
from nsplab.reduction import Value, evaluate
from nsplab.separation import (AnalysisError, Rejected, make_truncated_candidate, random_member,
                               securing_check, separate)
from nsplab.translations import (eliminate_products, lockstep_check, strict_to_lazy, t_min_to_w,
                                 to_pcf, w_to_t_min)

SEED = 2024


def report(n, ok, detail, seconds, target=None):
    slow = target is not None and seconds > target
    line = "criterion %d: %s  %s  (%.1fs%s)" % (n, "PASS" if ok and not slow else "FAIL", detail,
                                                 seconds, ", over the %ds target" % target if slow else "")
    ACCEPTANCE[n] = line
    print(line)
    assert ok, line
    assert not slow, line


def ground(M, fuel):
    out = evaluate(M, fuel=fuel).outcome
    return out.n if isinstance(out, Value) else None


def test_1_adequacy():
    t = time.time()
    progs = generate_corpus(SEED, 60, "PCF_byval")
    bad, diverging = [], 0
    for i, M in enumerate(progs):
        a = ground(M, 10 ** 6)
        b = nsp.ground_value(nsp.denote(M, steps=10 ** 6))
        diverging += a is None
        if a != b:
            bad.append((i, a, b))
    report(1, not bad, "%d PCF_byval programs (%d without a value), %d mismatches %s"
           % (len(progs), diverging, len(bad), bad[:3]), time.time() - t, 60)


def test_2_lockstep():
    t = time.time()
    progs = generate_corpus(SEED, 60, "W") + generate_corpus(SEED, 60, "T_min")
    fails = []
    steps = 0
    for M in progs:
        res = lockstep_check(M)
        steps += res.steps
        if not res.ok:
            fails.append(res.failure)
    report(2, not fails, "%d W and T+min terms, %d source steps matched, %d failures %s"
           % (len(progs), steps, len(fails), fails[:2]), time.time() - t, 60)


def test_3_ground_faithfulness():
    t = time.time()
    jobs = []
    for lang, fn in (("T_min", t_min_to_w), ("W", w_to_t_min), ("T_min", to_pcf), ("W", to_pcf),
                     ("T0_str", strict_to_lazy), ("T0_str_min", strict_to_lazy),
                     ("W0_str", strict_to_lazy)):
        jobs += [(lang, fn, M) for M in generate_corpus(SEED + 1, 20, lang)]
    jobs += [("PCF_byval+pairs", eliminate_products, M)
             for M in generate_corpus(SEED + 1, 20, "PCF_byval", products=True)]
    bad, compared = [], 0
    for lang, fn, M in jobs:
        a = ground(M, 50_000)
        if a is None:
            continue
        compared += 1
        b = ground(fn(M), 2_000_000)
        if a != b:
            bad.append((lang, fn.__name__, a, b))
    report(3, not bad and compared >= len(jobs) // 2,
           "%d source/translation pairs, %d with a value compared, %d mismatches %s"
           % (len(jobs), compared, len(bad), bad[:3]),
           time.time() - t, 120)


def test_4_conformance():
    t = time.time()
    parts = []
    ok = True
    for flavor in (KOHLENBACH, SPECTOR):
        rep = conformance_check(nsp.denote(simplified(flavor)), standard_battery(flavor), flavor)
        ok &= rep.ok and rep.checked > 0
        parts.append("BR^%s %d nodes %d violations" % (flavor[0].upper(), rep.checked, len(rep.violations)))
    bridge = spector_to_kohlenbach_bridge(reference_spector)
    rep = conformance_check(bridge, standard_battery(KOHLENBACH), KOHLENBACH)
    ok &= rep.ok and rep.checked > 0
    parts.append("bridge %d nodes %d violations" % (rep.checked, len(rep.violations)))
    report(4, ok, ", ".join(parts), time.time() - t, 60)


def test_5_constants():
    t = time.time()
    phi = reference_phi(f_plus([]), g0(), [])
    tree, verdict = explore_tree(f_plus([]), KOHLENBACH, window=64)
    shape = (isinstance(verdict, WellFoundedUpToCaps) and verdict.internal == [[]]
             and sorted(verdict.leaves) == [[x] for x in range(64)])
    ok = phi == 4 * encode([0]) + 2 == 6 and shape
    report(5, ok, "Phi(F+_0, G0, <>) = %d, root internal and 64 probed children leaves: %s"
           % (phi, shape), time.time() - t)


_RUNS = {}


def _run(D):
    if D not in _RUNS:
        t = time.time()
        run = separate(make_truncated_candidate(D))
        _RUNS[D] = (run, time.time() - t)
    return _RUNS[D]


def test_6_separation():
    t = time.time()
    parts, ok, slow = [], True, 0.0
    for D in (1, 2, 3):
        run, secs = _run(D)
        r = run.report
        run.state.check_invariants()
        run.package.check_invariants(run.state)
        ok &= r.passed and r.psi_result == r.c and r.phi_result == r.K and r.c != r.K \
            and r.checks["neighbourhood"]
        slow = max(slow, secs)
        parts.append("D=%d c=%d K=%d d=%d" % (D, r.c, r.K, r.d))
    report(6, ok and slow < 60, "; ".join(parts) + "; slowest candidate %.2fs" % slow, time.time() - t)


def _distinct(Gr, G):
    fns = [lambda z, a=a: a for a in range(40)] + [lambda z, a=a: z + a for a in range(40)]
    return any(call2(Gr, f) != call2(G, f) for f in fns)


def test_7_securing():
    t = time.time()
    parts, ok = [], True
    rng = random.Random(SEED)
    for D in (1, 2, 3):
        run, _ = _run(D)
        secured = 0
        for _ in range(5):
            Gr = random_member(run.state, rng)
            if not (_distinct(Gr, g0()) and _distinct(Gr, run.package.G1)):
                continue
            fails = securing_check(run.state, Gr)
            ok &= not fails
            secured += not fails
        ok &= secured >= 3
        parts.append("D=%d %d members secured" % (D, secured))
    report(7, ok, "; ".join(parts), time.time() - t)


def test_8_control():
    t = time.time()
    parts, ok = [], True
    for flavor in ("k", "s"):
        try:
            separate(simplified(flavor))
            ok = False
            parts.append("BR^%s produced a report" % flavor.upper())
        except Rejected as e:
            parts.append("BR^%s rejected (%s)" % (flavor.upper(), e))
    try:
        separate(simplified("k"), skip_gate=True)
        ok = False
        parts.append("forced analysis produced a report")
    except AnalysisError as e:
        parts.append("forced analysis stopped: %s" % type(e).__name__)
    report(8, ok, "; ".join(parts), time.time() - t)


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
