import json

import pytest

from nonsing.cli import run_cli
from nonsing.io import parse_smap, parse_smap_list, parse_sset
from nonsing.verify import TAGS


@pytest.fixture
def d2(tmp_path):
    path = tmp_path / "d2"
    assert run_cli(["simplex", "2", "-o", str(path)]) == 0
    return path


@pytest.fixture
def q(tmp_path, d2):
    pairs = tmp_path / "collapse02.pairs"
    pairs.write_text("pairs v1\npair (0_2, [0, 1]) (0, [0, 0])\n")
    out = tmp_path / "q"
    assert run_cli(["quotient", str(d2), "--pairs", str(pairs), "-o", str(out)]) == 0
    return out


def test_simplex_then_check(d2, capsys):
    capsys.readouterr()
    assert run_cli(["check", str(d2)]) == 0
    assert json.loads(capsys.readouterr().out) == {"nonsingular": True, "cells": 7}


def test_quotient_then_check_gives_witness(q, capsys):
    capsys.readouterr()
    assert run_cli(["check", str(q)]) == 1
    out = json.loads(capsys.readouterr().out)
    Q = parse_sset(q.read_text())
    assert out == {"nonsingular": False, "witness": {"cell": Q.cells_of_dim(2)[0], "k": 0, "l": 2}}


def test_desingularize_writes_reflection_and_unit(q, tmp_path, capsys):
    out = tmp_path / "dq"
    capsys.readouterr()
    assert run_cli(["desingularize", str(q), "-o", str(out), "--trace"]) == 0
    trace = json.loads(capsys.readouterr().out)
    assert trace["steps"] and set(trace["steps"][0]) == {"cell", "k", "l"}
    D = parse_sset(out.read_text())
    assert D.counts() == (1,)
    unit = parse_smap((tmp_path / "dq.unit").read_text(), parse_sset(q.read_text()), D)
    assert unit.is_degreewise_surjective(3)


def test_product_coproduct_nerve(tmp_path, capsys):
    d1 = tmp_path / "d1"
    run_cli(["simplex", "1", "-o", str(d1)])
    sq = tmp_path / "sq"
    assert run_cli(["product", str(d1), str(d1), "-o", str(sq)]) == 0
    assert parse_sset(sq.read_text()).counts() == (4, 5, 2)
    co = tmp_path / "co"
    assert run_cli(["coproduct", str(d1), str(d1), str(d1), "-o", str(co)]) == 0
    assert parse_sset(co.read_text()).counts() == (6, 3)
    poset = tmp_path / "p.poset"
    poset.write_text("poset v1\nle a b\nle a c\nle b d\nle c d\n")
    nv = tmp_path / "nv"
    assert run_cli(["nerve", str(poset), "-o", str(nv)]) == 0
    assert parse_sset(nv.read_text()).counts() == (4, 5, 2)


def test_exp_and_maps(tmp_path, d2, capsys):
    d1 = tmp_path / "d1"
    run_cli(["simplex", "1", "-o", str(d1)])
    e = tmp_path / "e"
    assert run_cli(["exp", str(d1), str(d1), "-o", str(e)]) == 0
    assert parse_sset(e.read_text()).counts() == (3, 3, 1)
    assert run_cli(["exp", str(d2), str(d1), "--cap", "1", "-o", str(e)]) == 1
    assert "cap overflow" in capsys.readouterr().err
    assert run_cli(["maps", str(d1), str(d2), "--count"]) == 0
    assert capsys.readouterr().out.strip() == "6"
    lst = tmp_path / "maps"
    assert run_cli(["maps", str(d1), str(d2), "-o", str(lst)]) == 0
    A, X = parse_sset(d1.read_text()), parse_sset(d2.read_text())
    assert len(parse_smap_list(lst.read_text(), A, X)) == 6


def test_stdout_output(capsys):
    assert run_cli(["simplex", "0"]) == 0
    assert capsys.readouterr().out == "sset v1\ncell 0 dim=0 faces=[]\n"


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["simplex", "-1"],
        ["check", "/nonexistent/file"],
        ["verify", "--suite", "nope"],
    ],
)
def test_usage_errors(argv, capsys):
    assert run_cli(argv) == 2


def test_parse_error_names_line(tmp_path, capsys):
    bad = tmp_path / "bad"
    bad.write_text("sset v1\ncell a dim=0 faces=[]\ncell e dim=1 faces=[(a, [0]), (b, [0])]\n")
    assert run_cli(["check", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "line 3" in err and "'b'" in err


def test_bad_pairs_file(tmp_path, d2, capsys):
    pairs = tmp_path / "p"
    pairs.write_text("pairs v1\npair (9, [0]) (0, [0])\n")
    assert run_cli(["quotient", str(d2), "--pairs", str(pairs), "-o", str(tmp_path / "o")]) == 2
    pairs.write_text("pairs v1\npair (0, [0])\n")
    assert run_cli(["quotient", str(d2), "--pairs", str(pairs), "-o", str(tmp_path / "o")]) == 2
    assert "line 2" in capsys.readouterr().err


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("NONSING_THREADS", "0")
    assert run_cli(["simplex", "0"]) == 2
    monkeypatch.setenv("NONSING_THREADS", "4")
    assert run_cli(["simplex", "0"]) == 0


def _without_time(text):
    return "\n".join(line for line in text.splitlines() if '"wall_time"' not in line)


def test_verify_json_deterministic(capsys):
    runs = []
    for _ in range(2):
        assert run_cli(["verify", "--suite", "lem-2.4", "--json"]) == 0
        runs.append(capsys.readouterr().out)
    assert runs[0] != "" and _without_time(runs[0]) == _without_time(runs[1])
    data = json.loads(runs[0])
    assert list(data) == ["suite", "entries", "totals", "wall_time"]
    assert {e["tag"] for e in data["entries"]} == {"Lem 2.4", "Eq 2.4", "Eq 2.5"}


def test_verify_text(capsys):
    assert run_cli(["verify", "--suite", "rel-2.1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert all(line.startswith("PASS  Rel 2.1") for line in lines[:-1])
    assert lines[-1].startswith("6/6 passed")


def test_verify_all(capsys):
    assert run_cli(["verify", "--suite", "all", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    tags = {e["tag"] for e in report["entries"]}
    assert tags == set(TAGS)
    assert all(e["passed"] for e in report["entries"])
    assert report["totals"]["failed"] == 0
