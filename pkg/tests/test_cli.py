import json
import os
import re
import subprocess
import sys

import pytest

from conftest import TERMS, term_path
from nsplab import cli
from nsplab.library import encode
from nsplab.separation import CANDIDATE_TYPE
from nsplab.syntax import parse_file
from nsplab.terms import NAT, in_language
from nsplab.types import Arrow
from nsplab.corpus import generate_corpus


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name,lang,want", [
    ("min5.term", "PCF", "5"),
    ("rec3.term", "T", "3"),
    ("while3.term", "W", "3"),
])
def test_eval(capsys, name, lang, want):
    code, out, _ = run(capsys, "eval", "--lang", lang, "--fuel", 10000, term_path(name))
    assert code == 0 and out.strip() == want


def test_eval_trace_and_fuel(capsys):
    code, out, _ = run(capsys, "eval", "--trace", term_path("rec3.term"))
    lines = out.strip().splitlines()
    assert code == 0 and lines[-1] == "3"
    steps = [json.loads(l) for l in lines[:-1]]
    assert [s["step"] for s in steps] == list(range(len(steps)))
    code, out, _ = run(capsys, "eval", "--fuel", 2, term_path("min5.term"))
    assert code == 1


def test_eval_rejects_wrong_language(capsys):
    code, _, err = run(capsys, "eval", "--lang", "T", term_path("min5.term"))
    assert code == 2 and "not in T" in err


def test_translate_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "translate", "--from", "T", "--to", "W", term_path("rec3.term"))
    assert code == 0
    p = tmp_path / "w.term"
    p.write_text(out)
    assert in_language(parse_file(str(p)), "W")
    code, out, _ = run(capsys, "eval", "--lang", "W", p)
    assert code == 0 and out.strip() == "3"
    code, _, err = run(capsys, "translate", "--from", "PCF", "--to", "T", term_path("min5.term"))
    assert code == 2 and "no translation" in err


def test_nsp(capsys):
    code, out, _ = run(capsys, "nsp", "--denote", term_path("g0.term"), "--json")
    assert code == 0 and json.loads(out)["schema"] == "nsplab.nsp/1"
    assert run(capsys, "nsp", "--object", "fplus", "--k", 2, "--lwf", 4)[0] == 0
    assert run(capsys, "nsp", "--object", "br-k", "--lwf", 4)[0] == 1
    assert run(capsys, "nsp", "--object", "nope")[0] == 2
    assert run(capsys, "nsp")[0] == 2


def test_barrec_values(capsys):
    F, G = term_path("fplus0.term"), term_path("g0.term")
    assert run(capsys, "barrec", "--F", F, "--G", G, "--node", "")[1].strip() == "6"
    assert run(capsys, "barrec", "--F", F, "--G", G, "--node", "<1>")[1].strip() == \
        str(2 * encode([1]) + 1)
    F1 = term_path("fplus1_k2.term")
    # <3> is internal for k0 = 2, and its child <3,0> is a leaf
    assert run(capsys, "barrec", "--F", F1, "--G", G, "--node", "<3>")[1].strip() == \
        str(2 * (2 * encode([3, 0]) + 1))
    code, out, _ = run(capsys, "barrec", "--F", F, "--G", G, "--node", "<1,2>")
    assert code == 1 and "not in the tree" in out
    code, out, _ = run(capsys, "barrec", "--F", F, "--G", G, "--tree", "--window", 3)
    assert "<> internal" in out and "<2> leaf" in out and "WellFoundedUpToCaps" in out
    assert run(capsys, "barrec", "--F", F, "--node", "")[0] == 2
    assert run(capsys, "barrec", "--F", F, "--G", G, "--node", "<a>")[0] == 2


def test_barrec_conformance(capsys, tmp_path):
    out = tmp_path / "conf.json"
    code, _, _ = run(capsys, "barrec", "--conformance", term_path("psi_trunc3.term"), "--out", out)
    rep = json.loads(out.read_text())
    assert code == 0 and rep["ok"] and rep["checked"] > 0
    code, stdout, _ = run(capsys, "barrec", "--conformance", term_path("const7.term"))
    assert code == 1 and json.loads(stdout)["violations"]


def test_separate(capsys, tmp_path):
    out = tmp_path / "sep.json"
    code, stdout, _ = run(capsys, "separate", "--candidate", term_path("psi_trunc2.term"),
                          "--securing", 3, "--out", out)
    rep = json.loads(out.read_text())
    assert code == 0 and stdout.strip() == "pass"
    assert rep["pass"] and rep["securing"] == [True] * 3
    assert (rep["c"], rep["d"], rep["K"]) == (6, 1, 1564)
    assert rep["psi_result"] == 6 and rep["phi_result"] == 1564
    code, stdout, _ = run(capsys, "separate", "--candidate", term_path("br_k.term"))
    rep = json.loads(stdout)
    assert code == 1 and rep["rejected"] and rep["reason"] == "Rejected"
    code, stdout, _ = run(capsys, "separate", "--candidate", term_path("br_s.term"))
    assert code == 1
    assert run(capsys, "separate", "--candidate", term_path("g0.term"))[0] == 2


@pytest.mark.parametrize("name", ["psi_trunc1.term", "psi_trunc3.term", "const7.term"])
def test_separate_other_candidates(capsys, name):
    code, stdout, _ = run(capsys, "separate", "--candidate", term_path(name), "--show")
    assert code == 0 and json.loads(stdout)["pass"]


def test_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "eval", "/nonexistent.term")[0] == 2
    assert run(capsys)[0] == 2


def test_corpus_determinism(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(capsys, "corpus", "--seed", 11, "--size", 8, "--lang", "T_min", "--out", d)[0] == 0
    names = sorted(os.listdir(a))
    assert names == sorted(os.listdir(b))
    for n in names:
        assert (a / n).read_text() == (b / n).read_text()
    index = json.loads((a / "index.json").read_text())
    assert index["seed"] == 11 and len(index["files"]) == 8
    for n in index["files"]:
        t = parse_file(str(a / n))
        assert in_language(t, "T_min") and t.type is NAT
    run(capsys, "corpus", "--seed", 12, "--size", 8, "--lang", "T_min", "--out", tmp_path / "c")
    assert any((a / n).read_text() != (tmp_path / "c" / n).read_text() for n in index["files"])


@pytest.mark.parametrize("lang", ["PCF_byval", "T_min", "W", "T0_str", "W0_str"])
def test_generated_programs_are_members(lang):
    for t in generate_corpus(3, 20, lang):
        assert in_language(t, lang) and t.type is NAT


def test_every_sample_term_parses_and_is_used():
    here = os.path.dirname(os.path.abspath(__file__))
    sources = "".join(open(os.path.join(here, f)).read() for f in os.listdir(here) if f.endswith(".py"))
    for name in sorted(os.listdir(TERMS)):
        t = parse_file(os.path.join(TERMS, name))
        assert t.type is NAT or t.type is CANDIDATE_TYPE or isinstance(t.type, Arrow)
        assert re.search(re.escape('"%s"' % name), sources), name


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "nsplab.cli", "eval", term_path("rec3.term")],
                         capture_output=True, text=True, timeout=60)
    assert out.returncode == 0 and out.stdout.strip() == "3"
