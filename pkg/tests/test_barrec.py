import random

import pytest
from hypothesis import given, settings, strategies as st

from nsplab import barrec, nsp
from nsplab.barrec import (KOHLENBACH, SPECTOR, BarTree, SeqCode, Undefined, WellFoundedUpToCaps,
                           bar_condition, conformance_check, const_functional, explore_tree, f_plus,
                           g0, reference_phi)
from nsplab.corpus import _Gen
from nsplab.library import cantor, decode, encode, seq_add, seq_index, seq_len
from nsplab.reduction import Value, evaluate
from nsplab.separation import make_truncated_candidate
from nsplab.syntax import parse
from nsplab.terms import NAT, App, Lib, Num, Var, app, lam
from nsplab.types import arrow

N2N = arrow(NAT, NAT)


def run(t):
    out = evaluate(t).outcome
    assert isinstance(out, Value)
    return out.n


# --- coding --------------------------------------------------------------------------------

def test_coding_constants():
    assert encode([]) == 0
    assert encode([0]) == cantor(0, 0) + 1 == 1
    assert encode([1]) == 3 and encode([2]) == 6 and encode([0, 0]) == 2


def test_coding_is_bijective_below_10000():
    seen = set()
    for c in range(10000):
        xs = decode(c)
        assert encode(xs) == c
        seen.add(tuple(xs))
    assert len(seen) == 10000


@given(st.lists(st.integers(0, 10 ** 6), max_size=6), st.integers(0, 10 ** 9))
def test_len_add_index_laws(xs, z):
    c = encode(xs)
    assert decode(c) == xs
    assert seq_len(seq_add(c, z)) == len(xs) + 1
    assert seq_index(seq_add(c, z), len(xs)) == z
    s = SeqCode.of(xs).add(z)
    assert s.seq == xs + [z] and len(s) == len(xs) + 1


def test_sequence_programs():
    prims = barrec.seq_primitives()
    assert run(App(prims["len"], Num(0))) == 0
    assert run(app(prims["add"], Num(0), Num(0))) == 1
    # the programs are slow on large codes, so keep them tiny
    for xs in ([1], [0, 0], [2]):
        c = Num(encode(xs))
        assert run(App(prims["len"], c)) == len(xs)
        for i in range(3):
            want = xs[i] if i < len(xs) else 9
            assert run(app(prims["basic"], c, Num(9), Num(i))) == want


# --- bar conditions and trees ----------------------------------------------------------------

def test_bar_condition_examples():
    zero = const_functional(0)
    assert bar_condition(zero, [], KOHLENBACH)
    assert not bar_condition(zero, [], SPECTOR)
    assert bar_condition(zero, [4], SPECTOR)
    F = f_plus([])
    assert not bar_condition(F, [], KOHLENBACH)
    assert all(bar_condition(F, [x], KOHLENBACH) for x in range(10))


def test_bar_condition_on_partial_functional():
    f = nsp.NVar("f", N2N)
    with pytest.raises(Undefined):
        bar_condition(nsp.Procedure([f], nsp.BOT), [], KOHLENBACH)


def test_explore_examples():
    tree, verdict = explore_tree(const_functional(0), KOHLENBACH)
    assert isinstance(verdict, WellFoundedUpToCaps)
    assert verdict.leaves == [[]] and verdict.internal == []
    tree, verdict = explore_tree(f_plus([]), KOHLENBACH, window=64)
    assert verdict.internal == [[]]
    assert sorted(verdict.leaves) == [[x] for x in range(64)]


@pytest.mark.parametrize("ks", [[1], [2, 3], [2, 1, 2]])
def test_f_inf_shape(ks):
    tree = BarTree(f_plus(ks), KOHLENBACH)
    d = len(ks) - 1
    path = [k + 1 for k in ks]
    for r in range(d + 2):
        assert tree.is_internal(path[:r])
    assert tree.is_leaf(path + [5])
    # stepping below a modulus stops early
    assert tree.is_leaf([0]) and tree.is_leaf(path[:d] + [0])


def _t0_functional(seed):
    g = _Gen(random.Random(seed), "T0_str", False)
    f = Var("f", N2N)
    return lam(f, g.nat([f], 2))


@settings(max_examples=15)
@given(st.integers(0, 2 ** 32), st.sampled_from([[], [0], [1], [0, 0]]))
def test_bar_condition_matches_syntactic_evaluation(seed, xs):
    F = _t0_functional(seed)
    c = Num(encode(xs))
    basic = Lib("basic", "str")
    lhs = App(F, app(basic, c, Num(0)))
    rhs = App(F, app(basic, c, Num(1)))
    kohl = run(app(Lib("eq", "str"), lhs, rhs)) == 0
    spector = run(app(Lib("lt", "str"), lhs, Num(len(xs)))) == 0
    p = nsp.denote(F)
    assert bar_condition(p, xs, KOHLENBACH) == kohl
    assert bar_condition(p, xs, SPECTOR) == spector


@given(st.integers(0, 2 ** 32))
def test_tree_laws(seed):
    p = nsp.denote(_t0_functional(seed))
    for flavor in (KOHLENBACH, SPECTOR):
        tree, verdict = explore_tree(p, flavor, depth=24, window=2, max_nodes=20000)
        assert isinstance(verdict, WellFoundedUpToCaps)
        for xs in verdict.leaves + verdict.internal:
            assert tree.member(xs)
            assert all(tree.member(xs[:r]) for r in range(len(xs)))
            assert tree.is_leaf(xs) != tree.is_internal(xs)


@given(st.integers(0, 2 ** 32))
def test_u_turns_kohlenbach_trees_into_spector_trees(seed):
    p = nsp.denote(_t0_functional(seed))
    kt, verdict = explore_tree(p, KOHLENBACH, depth=24, window=2, max_nodes=20000)
    if kt.satisfies([]):
        return
    st_ = BarTree(barrec.HostFunctional(barrec.u_functional(p)), SPECTOR)
    for xs in verdict.leaves + verdict.internal:
        assert st_.is_leaf(xs) == kt.is_leaf(xs)
        assert st_.member(xs)


def test_u_on_f_plus_and_term_version():
    F = f_plus([])
    kt = BarTree(F, KOHLENBACH)
    U = barrec.u_functional(F)
    st_ = BarTree(barrec.HostFunctional(U), SPECTOR)
    for xs in ([], [0], [3], [7]):
        assert st_.is_leaf(xs) == kt.is_leaf(xs)
    u = nsp.denote(barrec.u_term())
    UF = nsp.apply(u, F)
    for xs in ([], [0], [3]):
        assert bar_condition(UF, xs, SPECTOR) == kt.is_leaf(xs)


# --- canonical programs and the reference recursor ---------------------------------------------

def test_canonical_programs_by_reduction():
    F = parse("(lam (f (-> nat nat)) 0)")
    L = parse("(lam (x nat) x)")
    G = parse("(lam (x nat) (g (-> nat nat)) (suc (g 0)))")
    assert run(app(barrec.canonical_br("k"), F, L, G, Num(0))) == 0
    # Spector: <> is internal (0 < 0 fails), so G runs once and <0> is a leaf
    assert run(app(barrec.canonical_br("s"), F, L, G, Num(0))) == encode([0]) + 1


def test_canonical_recursor_is_not_lwf():
    F = Var("F", arrow(N2N, NAT))
    L = Var("L", N2N)
    G = Var("G", arrow(NAT, N2N, NAT))
    t = lam(F, L, G, app(barrec.canonical_br("k"), F, L, G, Num(0)))
    for D in (2, 4, 6):
        assert isinstance(nsp.lwf_probe(nsp.denote(t), D), nsp.ChainFound)


def test_reference_phi_examples():
    assert reference_phi(f_plus([]), g0(), []) == 4 * encode([0]) + 2 == 6
    for xs in ([0], [5]):
        assert reference_phi(f_plus([]), g0(), xs) == 2 * encode(xs) + 1
    assert reference_phi(const_functional(0), barrec.g_mixed(), []) == 1
    with pytest.raises(barrec.NotInTree):
        reference_phi(const_functional(0), g0(), [1])


@given(st.lists(st.integers(1, 3), min_size=1, max_size=3), st.lists(st.integers(0, 4), max_size=2))
def test_reference_phi_is_deterministic(ks, xs):
    F = f_plus(ks)
    try:
        a = reference_phi(F, barrec.g_mixed(), xs)
    except barrec.NotInTree:
        return
    assert a == reference_phi(F, barrec.g_mixed(), xs)


def test_phi0_values_follow_leaf_distance():
    # phi0 x = 2^t (2<x 0^t> + 1) with t the distance to the leaf along zeros
    phi = barrec.ReferencePhi(f_plus([2, 2]), g0())
    assert phi([0]) == 2 * encode([0]) + 1
    assert phi([3]) == 2 * (2 * encode([3, 0]) + 1)
    assert phi([3, 3]) == 2 * (2 * encode([3, 3, 0]) + 1)
    assert phi([3, 3, 0]) == 2 * encode([3, 3, 0]) + 1


def test_bridge():
    bridge = barrec.spector_to_kohlenbach_bridge(barrec.reference_spector)
    assert bridge(const_functional(0), g0()) == 2 * encode([]) + 1
    for F, G in barrec.standard_battery(KOHLENBACH):
        for xs in ([], [0], [1], [3]):
            try:
                want = reference_phi(F, G, xs)
            except barrec.NotInTree:
                continue
            assert bridge(F, G, xs) == want


# --- conformance ----------------------------------------------------------------------------------

def test_canonical_recursor_conforms_on_small_battery():
    cand = nsp.denote(barrec.simplified("k"))
    rep = conformance_check(cand, [(f_plus([]), g0()), (const_functional(0), g0())])
    assert rep.ok and rep.checked > 0


def test_truncated_candidate_violates_on_deep_tree():
    cand = nsp.denote(make_truncated_candidate(1))
    # G0 only asks for child 0, so child 0 of the root must itself be internal
    rep = conformance_check(cand, [(f_plus([0, 1]), g0())])
    assert not rep.ok
    bad = {tuple(v.node): v for v in rep.violations}
    assert bad[()].kind == "internal"
    assert bad[()].actual == 2 * (2 * encode([0]) + 1) and bad[()].expected == 4 * (2 * encode([0, 0]) + 1)
    assert conformance_check(cand, [(barrec.mixed_tree(KOHLENBACH), g0())]).ok


def test_zero_candidate_violates_at_every_leaf():
    F, G = Var("F", arrow(N2N, NAT)), Var("G", arrow(N2N, NAT))
    zero = nsp.denote(lam(F, G, Var("x", NAT), Num(0)))
    rep = conformance_check(zero, [(f_plus([]), g0())])
    leaves = [v for v in rep.violations if v.kind == "leaf"]
    assert len(leaves) == 4  # window of 4 children below the root
    assert all(v.actual == 0 and v.expected % 2 == 1 for v in leaves)


def test_truncated_candidate_conforms_when_deep_enough():
    cand = nsp.denote(make_truncated_candidate(4))
    rep = conformance_check(cand, barrec.standard_battery(KOHLENBACH))
    assert rep.ok
