import json
import shutil
import subprocess
from fractions import Fraction

import pytest

from mcdual.cli import main

CHAIN2 = {"elements": ["a", "b"], "leq": [["a", "b"]]}


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)

    return {
        "chain2": write("chain2.json", CHAIN2),
        "cycle": write("cycle.json", {"elements": ["a", "b"], "leq": [["a", "b"], ["b", "a"]]}),
        "gens": write("gens.json", {"generators": [{"values": {"a": "0", "b": "1"}}]}),
        "consts": write("consts.json", {"generators": [{"values": {"a": "1/2", "b": "1/2"}}]}),
        "target": write("target.json", {"poset": "chain2.json", "values": {"a": "1/4", "b": "1/2"}}),
        "dir": tmp_path,
    }


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval(capsys):
    assert run(capsys, "eval", "--term", "oplus(const(1/4),const(1/2))")[:2] == (0, "3/4\n")
    code, out, _ = run(capsys, "eval", "--term", "delta(constant(const(1/3)))", "--epsilon", "1/8")
    assert code == 0 and out.startswith("[") and "<= 1/8" in out
    code, out, _ = run(capsys, "eval", "--format", "json", "--term", "delta(constant(const(1/3)))", "--epsilon", "1/8")
    doc = json.loads(out)
    assert Fraction(doc["lo"]) <= Fraction(1, 3) <= Fraction(doc["hi"])
    code, _, err = run(capsys, "eval", "--term", "var(3)")
    assert code == 2 and "unbound variable x3" in err
    assert run(capsys, "eval", "--term", "const(5/4)")[0] == 2
    assert run(capsys, "eval", "--term", "var(0)", "--var", "0=1/3")[1] == "1/3\n"
    assert run(capsys, "eval", "--term", "var(0)", "--var", "zero=1")[0] == 2


def test_axioms(capsys, tmp_path):
    summary = tmp_path / "summary.json"
    code, out, _ = run(capsys, "axioms", "--algebra", "scalar", "--grid", "2", "--schema", "mc", "--summary", str(summary))
    assert code == 0 and "0 failed" in out.splitlines()[-1]
    assert json.loads(summary.read_text())["failed"] == 0
    code, out, _ = run(capsys, "--format", "json", "axioms", "--algebra", "sabotaged", "--grid", "2", "--schema", "mc")
    assert code == 1
    records = [json.loads(line) for line in out.splitlines()]
    failed = {r["axiom"] for r in records if "axiom" in r and not r["passed"]}
    assert "11" in failed


def test_axioms_on_poset_needs_seed(capsys, files):
    code, _, err = run(capsys, "axioms", "--algebra", files["chain2"], "--grid", "2")
    assert code == 2 and "--seed" in err
    code, out, _ = run(
        capsys, "axioms", "--algebra", files["chain2"], "--grid", "2", "--seed", "3", "--samples", "30",
        "--spec-samples", "20",
    )
    assert code == 0


def test_poset_commands(capsys, files):
    code, out, _ = run(capsys, "poset", "check", files["chain2"])
    assert code == 0 and json.loads(out) == CHAIN2
    code, _, err = run(capsys, "poset", "check", files["cycle"])
    assert code == 2 and "cycle a,b" in err
    assert run(capsys, "poset", "urysohn", files["chain2"], "--x", "a", "--y", "b")[1] == "a:0 b:1\n"
    assert run(capsys, "poset", "urysohn", files["chain2"], "--x", "b", "--y", "a")[0] == 2
    code, out, _ = run(capsys, "poset", "quotient", files["chain2"], "--maps", files["consts"])
    assert json.loads(out)["projection"] == {"a": "a", "b": "a"}
    code, out, _ = run(capsys, "poset", "product", files["chain2"], files["chain2"])
    assert len(json.loads(out)["elements"]) == 4
    assert run(capsys, "poset", "product", files["chain2"])[0] == 2


def test_dualize(capsys, files):
    code, out, _ = run(capsys, "dualize", "--poset", files["chain2"])
    assert code == 0
    max_doc = json.loads(out.splitlines()[0].removeprefix("max: "))
    assert max_doc["elements"] == ["a", "b"] and max_doc["leq"] == [["a", "b"]]
    code, out, _ = run(
        capsys, "dualize", "--poset", files["chain2"], "--generators", files["gens"],
        "--targets", files["target"], "--epsilon", "1/8",
    )
    assert code == 0 and "certificate" in out
    assert run(capsys, "dualize", "--poset", files["cycle"], "--preorder")[0] == 1


def test_approximate(capsys, files):
    trace = files["dir"] / "trace.json"
    code, out, _ = run(
        capsys, "--format", "json", "approximate", "--poset", files["chain2"], "--generators", files["gens"],
        "--target", files["target"], "--epsilon", "1/8", "--trace", str(trace),
    )
    assert code == 0
    rec = json.loads(out)
    assert rec["epsilon"] == "1/8"
    assert Fraction(rec["error"]) <= Fraction(1, 8)
    assert json.loads(trace.read_text())["term"] == rec["term"]
    code, out, _ = run(
        capsys, "approximate", "--poset", files["chain2"], "--generators", files["consts"],
        "--target", files["target"], "--epsilon", "1/8",
    )
    assert code == 1 and "separation fails" in out


def test_bad_arguments(capsys, files):
    assert run(capsys, "eval", "--term", "var(0)", "--epsilon", "0")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "poset", "check", str(files["dir"] / "missing.json"))[0] == 2


def test_deterministic_json(capsys):
    outs = [run(capsys, "--format", "json", "axioms", "--grid", "1", "--schema", "derived")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    for line in outs[0].splitlines():
        assert list(json.loads(line)) == sorted(json.loads(line))


@pytest.mark.skipif(shutil.which("mcdual") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["mcdual", "eval", "--term", "var(3)"], capture_output=True, text=True)
    assert res.returncode == 2 and "unbound variable x3" in res.stderr
