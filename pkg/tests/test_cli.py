import json
import re
import shlex
import subprocess
import sys
from importlib import resources
from pathlib import Path

import pytest

from graphmod import load_rules, parse_formula, parse_termgraph
from graphmod.cli import main
from graphmod.termgraph import natural_key

README = Path(__file__).resolve().parent.parent / "README.md"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_irreflexive_check_on_loop(capsys):
    code, out, _ = run(capsys, "mc", "check", "--graph", "loop.tg", "--formula", "irreflexive_a.mlf")
    assert code == 1
    assert out == "false\n"


def test_normalize_double(capsys):
    code, out, _ = run(capsys, "tg", "normalize", "--system", "arith.rules", "--graph", "double2.tg")
    assert code == 0
    assert out == "succ(succ(succ(succ(0))))\n"


def test_valid_formula(capsys):
    code, out, _ = run(capsys, "logic", "valid", "--formula", "[test(p)]q <-> (p -> q)")
    assert (code, out) == (0, "valid\n")


def test_invalid_formula_prints_countermodel(capsys):
    code, out, _ = run(capsys, "logic", "valid", "--formula", "p -> [a]p")
    assert code == 1
    assert out.startswith("not valid; countermodel:\n")


def test_json_report_layout(capsys):
    code, out, _ = run(capsys, "mc", "check", "--json", "--graph", "loop.tg", "--formula", "<a>c")
    doc = json.loads(out)
    assert code == 0
    assert list(doc) == ["command", "verdict", "stats"]
    assert doc["verdict"] == "true"
    assert list(doc["stats"]) == ["statesExplored", "freshNodes", "steps"]


def test_json_graph_sorted_nodes(capsys):
    run(capsys, "tg", "normalize", "--json", "--system", "arith", "--graph", "double2")
    code, out, _ = run(capsys, "tg", "normalize", "--json", "--system", "arith", "--graph", "double2")
    doc = json.loads(out)
    assert list(doc) == ["command", "graph", "trace", "stats"]
    ids = [n["id"] for n in doc["graph"]["nodes"]]
    assert ids == sorted(ids, key=natural_key)
    assert all(list(step) == ["action", "canonicalKey"] for step in doc["trace"])
    assert doc["stats"]["steps"] == len(doc["trace"])


def test_unknown_reports_exhausted_budget(capsys):
    chain = "n0:c(a => n1:c(a => n2:c(a => n3:c(a => n4:c(a => n5:c)))))"
    code, out, _ = run(capsys, "mc", "check", "--json", "--graph", chain, "--max-states", "40",
                       "--formula", "[(U; setl(p, true))*](q | ~q)")
    doc = json.loads(out)
    assert code == 2
    assert doc["verdict"] == "unknown"
    assert doc["stats"]["statesExplored"] == 40


def test_step_bound_exit_code(capsys):
    code, out, _ = run(capsys, "tg", "normalize", "--system", "arith", "--graph", "double2", "--max-steps", "1")
    assert code == 2
    assert out.endswith("bound of 1 steps exceeded\n")


@pytest.mark.parametrize("argv", [
    ["mc", "check", "--graph", "r:c(", "--formula", "p"],
    ["mc", "check", "--graph", "missing.tg", "--formula", "p"],
    ["logic", "valid", "--formula", "[a*]p"],
    ["tg", "apply", "--graph", "branch"],
    ["encode", "rule", "--system", "arith", "--rule", "9"],
])
def test_input_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 3
    assert out == ""
    assert err.startswith("graphmod: error:")


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as e:
        main(["mc", "frobnicate"])
    assert e.value.code == 3


def test_rewrite_without_match(capsys):
    code, out, _ = run(capsys, "tg", "rewrite", "--system", "arith", "--graph", "r:succ(z:0)")
    assert (code, out) == (1, "no match\n")


def test_hybrid_translate(capsys):
    code, out, _ = run(capsys, "hybrid", "translate", "--formula", "down ?x . <a>?x")
    assert out == "[setg($var_x, false)][setl($var_x, true)]<a>$var_x\n"


def test_bundled_files_parse():
    data = resources.files("graphmod").joinpath("data")
    names = sorted(p.name for p in data.iterdir())
    for name in names:
        text = data.joinpath(name).read_text()
        if name.endswith(".tg"):
            parse_termgraph(text)
        elif name.endswith(".rules"):
            assert load_rules(text)
        elif name.endswith(".mlf"):
            parse_formula(text)
    assert {n.rsplit(".", 1)[1] for n in names} == {"tg", "rules", "mlf"}


def readme_sessions():
    """(command, expected output) pairs from the README's console blocks."""
    text = README.read_text()
    out = []
    for block in re.findall(r"```console\n(.*?)```", text, re.S):
        cmd, lines = None, []
        for line in block.splitlines():
            if line.startswith("$ "):
                if cmd:
                    out.append((cmd, lines))
                cmd, lines = line[2:], []
            else:
                lines.append(line)
        if cmd:
            out.append((cmd, lines))
    return out


def test_readme_has_sessions():
    assert len(readme_sessions()) >= 5


@pytest.mark.parametrize("cmd, expected", readme_sessions())
def test_readme_replays(cmd, expected):
    argv = shlex.split(cmd)
    assert argv[0] == "graphmod" and "--seed" in argv
    code_marker = None
    if expected and expected[-1].startswith("[exit "):
        code_marker = int(expected.pop()[6:-1])
    proc = subprocess.run([sys.executable, "-m", "graphmod.cli", *argv[1:]], capture_output=True, text=True)
    assert proc.stdout.splitlines() == expected
    assert proc.returncode == (code_marker or 0)


def test_trace_lists_witness_steps(capsys):
    code, out, _ = run(capsys, "mc", "check", "--json", "--trace", "--graph", "branch", "--formula", "[a]g")
    doc = json.loads(out)
    assert code == 1
    assert [step["action"] for step in doc["trace"]] == ["a"]
