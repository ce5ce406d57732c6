"""Command-line front end: ``nsplab <command> ...``.

Exit status is 0 on success, 1 when a check fails (no value, violations,
a rejected or failing separation) and 2 on usage errors.
"""

import argparse
import json
import random
import sys

from . import barrec, nsp, reduction, separation, translations
from .corpus import write_corpus
from .syntax import ParseError, parse_file, show
from .terms import LANGS, LangTag, MembershipError, TermTypeError, in_language

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _load(path):
    try:
        return parse_file(path)
    except OSError as e:
        raise UsageError("cannot read %s: %s" % (path, e.strerror))
    except (ParseError, TermTypeError) as e:
        raise UsageError("%s: %s" % (path, e))


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=False)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# --- eval ------------------------------------------------------------------------

def cmd_eval(a):
    M = _load(a.file)
    try:
        tr = reduction.evaluate(M, a.lang, a.fuel, trace=a.trace)
    except MembershipError as e:
        raise UsageError("term is not in %s: %s" % (a.lang, e))
    if a.trace:
        for i, (t, rule, _) in enumerate(tr.steps):
            print(json.dumps({"step": i, "rule": rule, "term": show(t)}))
    if isinstance(tr.outcome, reduction.Value):
        print(tr.outcome.n)
        return OK
    print(tr.outcome)
    return FAILED


# --- translate ---------------------------------------------------------------------

_ROUTES = {
    ("W", "PCF_byval"): translations.to_pcf,
    ("T_min", "PCF_byval"): translations.to_pcf,
    ("T0_str_min", "PCF_byval"): translations.to_pcf,
    ("W0_str", "PCF_byval"): translations.to_pcf,
    ("T0_str", "PCF_byval"): translations.to_pcf,
    ("T_min", "W"): translations.t_min_to_w,
    ("T", "W"): translations.t_min_to_w,
    ("W", "T_min"): translations.w_to_t_min,
    ("T0_str", "T"): translations.strict_to_lazy,
    ("T0_str_min", "T_min"): translations.strict_to_lazy,
    ("W0_str", "W"): translations.strict_to_lazy,
}


def cmd_translate(a):
    M = _load(a.file)
    src, dst = LangTag.parse(a.source).name, LangTag.parse(a.target).name
    if not in_language(M, src):
        raise UsageError("input is not a %s term" % src)
    if src == dst:
        out = M
    else:
        fn = _ROUTES.get((src, dst))
        if fn is None:
            raise UsageError("no translation from %s to %s" % (src, dst))
        out = fn(M)
    if a.eliminate_products:
        out = translations.eliminate_products(out)
    print(show(out))
    return OK


# --- nsp ---------------------------------------------------------------------------

def _builtin(name, ks):
    table = {
        "fplus": lambda: barrec.f_plus(ks),
        "ftrunc": lambda: barrec.f_trunc(ks or [1]),
        "g0": barrec.g0,
        "br-k": lambda: nsp.denote(barrec.simplified("k")),
        "br-s": lambda: nsp.denote(barrec.simplified("s")),
    }
    if name not in table:
        raise UsageError("unknown object %r (choose from %s)" % (name, ", ".join(table)))
    return table[name]()


def cmd_nsp(a):
    if bool(a.denote) == bool(a.object):
        raise UsageError("give exactly one of --denote FILE or --object NAME")
    if a.denote:
        M = _load(a.denote)
        try:
            p = nsp.denote(M, a.steps)
        except nsp.ProductError as e:
            raise UsageError(str(e))
        src = M
    else:
        p, src = _builtin(a.object, a.k), None
    if a.json:
        _emit({"schema": "nsplab.nsp/1", "tree": nsp.to_json(p, a.depth, a.branches)})
    else:
        print(nsp.show_procedure(p, a.depth, a.branches))
    if a.lwf is not None:
        res = nsp.lwf_probe(p, a.lwf, nsp.ExplorationBudget(a.steps, 4 * a.lwf + 4, a.branches),
                            source=src)
        print(res)
        if isinstance(res, nsp.ChainFound):
            return FAILED
    return OK


# --- barrec ------------------------------------------------------------------------

def _functional(path):
    M = _load(path)
    if M.type is not barrec.TYPE2:
        raise UsageError("%s: expected a term of type (nat -> nat) -> nat" % path)
    return nsp.denote(M)


def cmd_barrec(a):
    flavor = a.flavor
    if a.conformance:
        cand = _load(a.conformance)
        if cand.type is not separation.CANDIDATE_TYPE:
            raise UsageError("candidate must have type 2 -> 2 -> 1")
        if a.F or a.G:
            battery = [(_functional(a.F) if a.F else barrec.f_plus([]),
                        _functional(a.G) if a.G else barrec.g0())]
        else:
            battery = barrec.standard_battery(flavor)
        rep = barrec.conformance_check(nsp.denote(cand), battery, flavor, a.depth, a.window)
        _emit({"schema": "nsplab.conformance/1", "flavor": flavor, "checked": rep.checked,
               "ok": rep.ok, "violations": [v.as_dict() for v in rep.violations],
               "truncated": rep.truncated}, a.out)
        return OK if rep.ok else FAILED
    if not (a.F and a.G):
        raise UsageError("--F and --G are required (or use --conformance)")
    F, G = _functional(a.F), _functional(a.G)
    try:
        xs = barrec.parse_node(a.node)
    except ValueError as e:
        raise UsageError(str(e))
    depth = a.depth or barrec.DEFAULT_DEPTH
    window = a.window or barrec.DEFAULT_WINDOW
    try:
        v = barrec.reference_phi(F, G, xs, flavor, depth)
    except barrec.NotInTree:
        print("node %s is not in the tree" % barrec.SeqCode.of(xs))
        return FAILED
    except barrec.Undefined as e:
        print("undefined: %s" % e)
        return FAILED
    print(v)
    if a.tree:
        tree, verdict = barrec.explore_tree(F, flavor, depth, window, a.max_nodes)
        for k in sorted(tree.probed(), key=lambda k: (len(k), k)):
            kind = "leaf" if tree.satisfies(list(k)) else "internal"
            print("<%s> %s" % (",".join(map(str, k)), kind))
        print(type(verdict).__name__)
    return OK


# --- separate ----------------------------------------------------------------------

def cmd_separate(a):
    cand = _load(a.candidate)
    if cand.type is not separation.CANDIDATE_TYPE:
        raise UsageError("candidate must have type 2 -> 2 -> 1")
    try:
        run = separation.separate(cand, a.depth_cap, a.fuel, a.lwf_bound, skip_gate=a.skip_gate)
    except separation.AnalysisError as e:
        _emit({"schema": separation.SCHEMA, "rejected": True, "reason": type(e).__name__,
               "detail": str(e), "pass": False}, a.out)
        return FAILED
    d = run.report.as_dict()
    d["evidence"] = run.evidence
    if a.securing:
        rng = random.Random(a.seed)
        d["securing"] = [not separation.securing_check(run.state, separation.random_member(run.state, rng),
                                                       a.fuel)
                         for _ in range(a.securing)]
    if a.show:
        print(nsp.show_procedure(run.state.F_inf, 2 * run.state.d + 4, 4), file=sys.stderr)
        print(show(run.package.G1_term), file=sys.stderr)
    _emit(d, a.out)
    if a.out:
        print("pass" if run.report.passed else "FAIL")
    return OK if run.report.passed and all(d.get("securing", [True])) else FAILED


# --- corpus ------------------------------------------------------------------------

def cmd_corpus(a):
    lang = LangTag.parse(a.lang).name
    index = write_corpus(a.out, a.seed, a.size, lang, a.depth, a.products)
    print("wrote %d files to %s (seed %s)" % (len(index["files"]), a.out, a.seed))
    return OK


# --- parser ------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="nsplab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", metavar="command")
    sub.required = True

    e = sub.add_parser("eval", help="evaluate a closed ground term")
    e.add_argument("--lang", default=None, help="language tag checked before running")
    e.add_argument("--fuel", type=int, default=reduction.DEFAULT_FUEL)
    e.add_argument("--trace", action="store_true", help="print every step as a JSON line")
    e.add_argument("file")
    e.set_defaults(func=cmd_eval)

    t = sub.add_parser("translate", help="translate a term between languages")
    t.add_argument("--from", dest="source", required=True, help="one of %s" % ", ".join(LANGS))
    t.add_argument("--to", dest="target", required=True)
    t.add_argument("--eliminate-products", action="store_true")
    t.add_argument("file")
    t.set_defaults(func=cmd_translate)

    n = sub.add_parser("nsp", help="print the procedure of a term")
    n.add_argument("--denote", metavar="FILE")
    n.add_argument("--object", help="fplus, ftrunc, g0, br-k or br-s")
    n.add_argument("--k", type=int, nargs="*", default=[], help="moduli for fplus / ftrunc")
    n.add_argument("--depth", type=int, default=4)
    n.add_argument("--branches", type=int, default=4)
    n.add_argument("--steps", type=int, default=nsp.DEFAULT_STEPS)
    n.add_argument("--lwf", type=int, metavar="D", help="run the nesting probe with bound D")
    n.add_argument("--json", action="store_true")
    n.set_defaults(func=cmd_nsp)

    b = sub.add_parser("barrec", help="reference bar recursion and conformance checks")
    b.add_argument("--flavor", choices=("spector", "kohlenbach"), default="kohlenbach")
    b.add_argument("--F", metavar="FILE")
    b.add_argument("--G", metavar="FILE")
    b.add_argument("--node", default="", help='sequence such as "<1,2>" (empty for the root)')
    b.add_argument("--depth", type=int)
    b.add_argument("--window", type=int)
    b.add_argument("--max-nodes", type=int, default=100_000)
    b.add_argument("--tree", action="store_true", help="also list the explored tree")
    b.add_argument("--conformance", metavar="FILE", help="candidate recursor to check")
    b.add_argument("--out", metavar="FILE")
    b.set_defaults(func=cmd_barrec)

    s = sub.add_parser("separate", help="build F_inf and G1 for a candidate recursor")
    s.add_argument("--candidate", required=True, metavar="FILE")
    s.add_argument("--depth-cap", type=int, default=separation.DEFAULT_DEPTH_CAP)
    s.add_argument("--fuel", type=int, default=separation.DEFAULT_STEPS)
    s.add_argument("--lwf-bound", type=int, default=6)
    s.add_argument("--skip-gate", action="store_true", help="analyse even without LWF evidence")
    s.add_argument("--securing", type=int, default=0, metavar="N",
                   help="also test N random members of the neighbourhood")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--show", action="store_true", help="print F_inf and G1 to stderr")
    s.add_argument("--out", metavar="FILE")
    s.set_defaults(func=cmd_separate)

    c = sub.add_parser("corpus", help="write a seeded corpus of random programs")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--size", type=int, default=50)
    c.add_argument("--lang", default="PCF_byval")
    c.add_argument("--depth", type=int, default=4)
    c.add_argument("--products", action="store_true")
    c.add_argument("--out", required=True, metavar="DIR")
    c.set_defaults(func=cmd_corpus)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE
    try:
        return args.func(args)
    except (UsageError, ValueError) as e:
        parser.print_usage(sys.stderr)
        print("nsplab: error: %s" % e, file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
