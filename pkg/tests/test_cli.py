import io
import os
import re
import subprocess
import sys

import pytest

from conftest import FIXTURES
from dyncond.cli import run

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")
NETD = os.path.join(FIXTURES, "netd.bnet")

CASES = {
    "query_netd": ["query", "--algo", "dynamic", "--net", NETD, "--target", "D"],
    "query_netd_evidence": ["query", "--algo", "cutset", "--net", NETD, "--evidence", "D=d1"],
    "analyze_netd": ["analyze", "--net", NETD],
    "bound_adder": ["bound", "--family", "adder", "--size", "2", "--noise", "0.05",
                    "--target", "Carry_1", "--sweep", "0.2,0.1,0.01"],
    "bench_ladder": ["bench", "--family", "diamond-ladder", "--sizes", "2..6"],
}


def invoke(argv):
    out = io.StringIO()
    code = run(argv, out)
    return code, out.getvalue()


def mask(text):
    text = text.replace(FIXTURES, "<fixtures>")
    text = re.sub(r"# backend=\w+", "# backend=<any>", text)
    # wall-clock column of bench rows
    return re.sub(r"^(\w+\s+\d+\s+\d+\s+\d+)\s+\d+\.\d+$", r"\1 <ms>", text, flags=re.M)


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    code, text = invoke(CASES[name])
    assert code == 0
    path = os.path.join(GOLDEN, f"{name}.txt")
    if os.environ.get("UPDATE_GOLDEN"):
        os.makedirs(GOLDEN, exist_ok=True)
        with open(path, "w") as fh:
            fh.write(mask(text))
    with open(path) as fh:
        assert mask(text) == fh.read()


def test_query_prints_exact_beliefs():
    _, text = invoke(CASES["query_netd"])
    assert "BEL D d1=0.7145 d0=0.2855" in text
    assert re.search(r"^max_messages_per_arc=\d+$", text, re.M)


def test_bench_columns():
    _, text = invoke(CASES["bench_ladder"])
    rows = [line.split() for line in text.splitlines()[2:]]
    cutset = [int(r[3]) for r in rows if r[0] == "cutset"]
    dynamic = [int(r[2]) for r in rows if r[0] == "dynamic"]
    assert cutset == [4, 8, 16, 32, 64]
    diffs = {b - a for a, b in zip(dynamic, dynamic[1:])}
    assert len(diffs) == 1


def test_oracle_and_algorithms_agree():
    outputs = set()
    for algo in ("oracle", "cutset", "dynamic"):
        _, text = invoke(["query", "--algo", algo, "--family", "random", "--size", "9",
                          "--seed", "4", "--max-card", "3", "--evidence", "X8=s1"])
        outputs.add("\n".join(line for line in text.splitlines() if line.startswith("BEL")))
    assert len(outputs) == 1


def test_gen_round_trips(tmp_path):
    _, text = invoke(["gen", "--family", "adder", "--size", "2"])
    path = tmp_path / "adder.bnet"
    path.write_text(text)
    _, again = invoke(["gen", "--net", str(path)])
    assert again == text


@pytest.mark.parametrize("argv, code", [
    (["query", "--algo", "polytree", "--net", NETD, "--target", "D"], 3),
    (["query", "--net", NETD, "--cutset", "D"], 3),
    (["query", "--net", "/nonexistent.bnet"], 2),
    (["query", "--net", NETD, "--evidence", "D=d9"], 2),
    (["query", "--net", NETD, "--target", "Q"], 2),
    (["bound", "--net", NETD, "--target", "D", "--epsilon", "0.6"], 4),
    (["bound", "--net", NETD, "--target", "D", "--epsilon", "1.5"], 2),
    (["frobnicate"], 1),
    (["query"], 1),
    (["bench", "--algos", "magic"], 1),
])
def test_exit_codes(argv, code):
    assert invoke(argv)[0] == code


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dyncond", "query", "--net", NETD, "--target", "A"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("BEL A a1=0.5 a0=0.5")
