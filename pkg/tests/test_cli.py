"""Command line interface: run, verify, bench."""

import json
import re

import pytest

from congestcolor.cli import main
from congestcolor.decomposition import generate_decomposition, save_decomposition
from congestcolor.graphs import (
    attach_default_lists,
    generate_graph,
    load_coloring,
    load_instance,
    verify_coloring,
)

RATIO = re.compile(r"^\d+/\d+$")


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_instance(path, n, edges, lists=None, c=None, psi=None):
    payload = {"n": n, "edges": [list(e) for e in edges]}
    if lists is not None:
        payload["lists"] = {str(v): list(l) for v, l in lists.items()}
    if c is not None:
        payload["C"] = c
    if psi is not None:
        payload["psi"] = {str(v): p for v, p in psi.items()}
    path.write_text(json.dumps(payload))


def write_coloring(path, n, colors):
    path.write_text(json.dumps({"n": n, "colors": {str(v): c for v, c in colors.items()}}))


def test_run_path_writes_valid_coloring(tmp_path, capsys):
    out = tmp_path / "col.json"
    code, stdout, _ = run_cli(
        ["run", "--gen", "path,n=5", "--out", str(out)], capsys
    )
    assert code == 0
    stats = json.loads(stdout)
    assert stats["n"] == 5
    assert stats["colored"] == 5
    assert stats["phases"] >= 1
    assert stats["rounds"] >= 1
    assert set(stats["max_bits"]) == {"algorithm", "aggregation"}
    coloring = load_coloring(out)
    inst = attach_default_lists(generate_graph("path", {"n": 5}, 0))
    assert verify_coloring(inst, coloring).ok


def test_run_reports_stats_under_strict_policy(capsys):
    code, stdout, _ = run_cli(
        ["run", "--gen", "cycle,n=12", "--bandwidth", "strict:8"], capsys
    )
    assert code == 0
    stats = json.loads(stdout)
    cap = 8 * max(1, (12 - 1).bit_length())
    assert 0 < stats["max_bits"]["algorithm"] <= cap
    assert stats["max_bits"]["aggregation"] > 0
    assert stats["messages"] > 0


def test_run_trace_is_json_lines(tmp_path, capsys):
    trace = tmp_path / "trace.jsonl"
    code, _, _ = run_cli(
        [
            "run",
            "--gen",
            "gnp,n=24,p=0.15",
            "--mode",
            "avoid-mis",
            "--trace",
            str(trace),
        ],
        capsys,
    )
    assert code == 0
    records = [json.loads(line) for line in trace.read_text().splitlines()]
    phases = [r for r in records if "phase" in r]
    levels = [r for r in records if "level" in r]
    rounds = [r for r in records if "round" in r]
    assert phases and levels and rounds
    assert phases[-1]["remaining"] == 0
    assert all(RATIO.match(r["phi_final"]) for r in phases)
    assert all(RATIO.match(r["phi_after"]) for r in levels)


def test_run_seed_cap_exhausts(capsys):
    code, _, stderr = run_cli(
        ["run", "--gen", "path,n=6", "--strategy", "exhaustive", "--seed-cap", "4"],
        capsys,
    )
    assert code == 1
    assert stderr.startswith("error:")
    assert "cap" in stderr


def test_run_round_cap_aborts(capsys):
    code, _, stderr = run_cli(
        ["run", "--gen", "cycle,n=16", "--round-cap", "3"], capsys
    )
    assert code == 1
    assert stderr.startswith("error:")


def test_run_rejects_bad_generator_spec(capsys):
    code, _, stderr = run_cli(["run", "--gen", "path,n"], capsys)
    assert code == 1
    assert stderr.startswith("error:")


def test_run_decomposition_generate_and_file(tmp_path, capsys):
    code, stdout, _ = run_cli(
        ["run", "--gen", "gnp,n=32,p=0.1", "--decomp", "generate"], capsys
    )
    assert code == 0
    stats = json.loads(stdout)
    assert stats["colored"] == 32
    assert stats["phases"] >= 1

    g = generate_graph("gnp", {"n": 32, "p": 0.1}, 0)
    path = tmp_path / "decomp.json"
    save_decomposition(path, generate_decomposition(g))
    code, stdout, _ = run_cli(
        ["run", "--gen", "gnp,n=32,p=0.1", "--decomp", str(path)], capsys
    )
    assert code == 0
    assert json.loads(stdout)["colored"] == 32


def test_run_lists_mode_needs_graph_file(capsys):
    code, _, stderr = run_cli(
        ["run", "--gen", "path,n=4", "--colors-mode", "lists"], capsys
    )
    assert code == 1
    assert stderr.startswith("error:")


def test_run_lists_mode_respects_file_lists(tmp_path, capsys):
    inst_path = tmp_path / "inst.json"
    lists = {0: [0, 3], 1: [1, 3, 4], 2: [2, 4]}
    write_instance(inst_path, 3, [(0, 1), (1, 2)], lists=lists, c=5)
    out = tmp_path / "col.json"
    code, _, _ = run_cli(
        ["run", "--graph", str(inst_path), "--colors-mode", "lists", "--out", str(out)],
        capsys,
    )
    assert code == 0
    coloring = load_coloring(out)
    assert all(coloring.colors[v] in lists[v] for v in range(3))


def test_run_delta1_mode_stays_within_max_degree(capsys):
    code, stdout, _ = run_cli(
        ["run", "--gen", "gnp,n=30,p=0.1", "--colors-mode", "delta1", "--rng-seed", "7"],
        capsys,
    )
    assert code == 0
    assert json.loads(stdout)["colored"] == 30


def test_run_graph_file_with_degree1_lists(tmp_path, capsys):
    inst_path = tmp_path / "inst.json"
    write_instance(inst_path, 4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    code, stdout, _ = run_cli(["run", "--graph", str(inst_path)], capsys)
    assert code == 0
    assert json.loads(stdout)["colored"] == 4


def test_verify_accepts_valid_coloring(tmp_path, capsys):
    inst_path = tmp_path / "inst.json"
    col_path = tmp_path / "col.json"
    write_instance(inst_path, 3, [(0, 1), (1, 2)])
    write_coloring(col_path, 3, {0: 0, 1: 1, 2: 0})
    code, stdout, _ = run_cli(["verify", str(inst_path), str(col_path)], capsys)
    assert code == 0
    assert stdout.strip() == "ok"


def test_verify_flags_monochromatic_edge(tmp_path, capsys):
    inst_path = tmp_path / "inst.json"
    col_path = tmp_path / "col.json"
    write_instance(inst_path, 3, [(0, 1), (1, 2)])
    write_coloring(col_path, 3, {0: 0, 1: 0, 2: 1})
    code, stdout, _ = run_cli(["verify", str(inst_path), str(col_path)], capsys)
    assert code == 1
    assert "edge (0, 1)" in stdout


def test_verify_flags_color_outside_list(tmp_path, capsys):
    inst_path = tmp_path / "inst.json"
    col_path = tmp_path / "col.json"
    write_instance(inst_path, 3, [(0, 1), (1, 2)])
    write_coloring(col_path, 3, {0: 0, 1: 9, 2: 0})
    code, stdout, _ = run_cli(["verify", str(inst_path), str(col_path)], capsys)
    assert code == 1
    assert "node 1" in stdout


def test_verify_flags_uncolored_node(tmp_path, capsys):
    inst_path = tmp_path / "inst.json"
    col_path = tmp_path / "col.json"
    write_instance(inst_path, 3, [(0, 1), (1, 2)])
    write_coloring(col_path, 3, {0: 0, 1: 1, 2: None})
    code, stdout, _ = run_cli(["verify", str(inst_path), str(col_path)], capsys)
    assert code == 1
    assert "node 2" in stdout
    assert "uncolored" in stdout


def test_verify_missing_file(tmp_path, capsys):
    inst_path = tmp_path / "inst.json"
    write_instance(inst_path, 2, [(0, 1)])
    code, _, stderr = run_cli(
        ["verify", str(inst_path), str(tmp_path / "nope.json")], capsys
    )
    assert code == 1
    assert stderr.startswith("error:")


def test_bench_emits_one_row_per_graph(tmp_path, capsys):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps(["path,n=6", "cycle,n=8"]))
    code, stdout, _ = run_cli(["bench", str(suite)], capsys)
    assert code == 0
    lines = stdout.splitlines()
    assert lines[0] == "n,delta,C,phases,rounds,max_bits,ratio,wall_ms"
    assert len(lines) == 3
    first = lines[1].split(",")
    assert first[0] == "6"
    assert RATIO.match(first[6])
    assert lines[2].split(",")[0] == "8"


def test_bench_no_time_is_deterministic(tmp_path, capsys):
    suite = tmp_path / "suite.json"
    suite.write_text(
        json.dumps({"graphs": ["gnp,n=20,p=0.2", "clique,n=5"], "mode": "avoid-mis"})
    )
    code, first, _ = run_cli(["bench", str(suite), "--no-time"], capsys)
    assert code == 0
    code, second, _ = run_cli(["bench", str(suite), "--no-time"], capsys)
    assert code == 0
    assert first == second
    assert first.splitlines()[0] == "n,delta,C,phases,rounds,max_bits,ratio"


def test_bench_empty_suite_prints_header_only(tmp_path, capsys):
    suite = tmp_path / "suite.json"
    suite.write_text("[]")
    code, stdout, _ = run_cli(["bench", str(suite), "--no-time"], capsys)
    assert code == 0
    assert stdout == "n,delta,C,phases,rounds,max_bits,ratio\n"


def test_bench_writes_csv_file(tmp_path, capsys):
    suite = tmp_path / "suite.json"
    out = tmp_path / "rows.csv"
    suite.write_text(json.dumps(["star,n=7"]))
    code, stdout, _ = run_cli(
        ["bench", str(suite), "--no-time", "--out", str(out)], capsys
    )
    assert code == 0
    assert stdout == ""
    lines = out.read_text().splitlines()
    assert len(lines) == 2 and lines[1].startswith("7,")
