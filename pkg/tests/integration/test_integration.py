"""
Integration tests for the fourcycle command line.

This module drives main() end to end: stream files in, totals and CSV out, exit codes.
"""

import json

import pytest

import main as cli
from main import EXIT_DIVERGENCE, EXIT_OK, EXIT_PARSE, EXIT_USAGE, main
from modules.graph.layered import LayeredGraph, MatrixId
from modules.oracle.brute import join_example_graph
from modules.workload.generators import generate
from modules.workload.stream import write_stream


@pytest.fixture
def run(tmp_path, capsys):
    """Call main() with defaults isolated from the working directory; returns (code, stdout lines)."""

    def _run(*argv):
        args = list(argv) + ["--config", str(tmp_path / "no-config.json"), "--log-dir", ""]
        code = main(args)
        return code, capsys.readouterr().out.splitlines()

    return _run


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return _write


SQUARE = "+ 0 1\n+ 1 2\n+ 2 3\n+ 3 0\n"
K4 = "".join(f"+ {u} {v}\n" for u in range(4) for v in range(u + 1, 4))
FAST_MAIN = ["--bootstrap-min", "7", "--lenient"]


@pytest.mark.parametrize("engine", [["--engine", "naive"], ["--engine", "oracle"], ["--engine", "main"], FAST_MAIN])
def test_square_prints_running_totals(run, write, engine):
    code, out = run("run", write("square.txt", SQUARE), *engine)
    assert code == EXIT_OK
    assert out == ["0", "0", "0", "1"]


def test_k4_and_edge_removal(run, write):
    stream = K4 + "- 0 1\n"
    code, out = run("run", write("k4.txt", stream), *FAST_MAIN)
    assert code == EXIT_OK
    assert out[5] == "3"
    assert out[-1] == "1"


def test_wedge_probe_on_the_join_example(run, write):
    g = join_example_graph()
    lines = [f"+ {matrix.name} {a} {b}" for matrix in MatrixId for a, b in g.edges(matrix)]
    code, out = run("run", write("join.txt", "\n".join(lines) + "\n"), "--mode", "layered", "--wedges", "1", "1")
    assert code == EXIT_OK
    assert out == ["3"]


def test_wedge_probe_needs_layered_mode(run, write):
    code, out = run("run", write("square.txt", SQUARE), "--wedges", "1", "1")
    assert code == EXIT_USAGE
    assert out == []


def test_generate_run_and_verify(run, tmp_path):
    stream = str(tmp_path / "hub.txt")
    code, _ = run("gen", "--kind", "hub", "--vertices", "12", "--steps", "300", "--seed", "3", "-o", stream)
    assert code == EXIT_OK

    _, expected = run("run", stream, "--engine", "oracle")
    _, got = run("run", stream, *FAST_MAIN)
    assert got == expected and len(expected) > 0

    code, out = run("verify", stream, *FAST_MAIN)
    assert code == EXIT_OK
    assert out == [f"ok: {len(expected)} updates agree"]


def test_generated_stream_on_stdout_is_replayable(run, write):
    code, out = run("gen", "--kind", "sliding-window", "--vertices", "8", "--steps", "60", "--window", "5")
    assert code == EXIT_OK
    assert out[0].startswith("# sliding-window general stream")
    code, totals = run("run", write("window.txt", "\n".join(out) + "\n"), "--engine", "naive")
    assert code == EXIT_OK
    assert len(totals) == len(out) - 1
    assert totals[-1] == "0"


@pytest.mark.parametrize("engine", [["--engine", "naive"], ["--engine", "warmup"], FAST_MAIN])
def test_layered_engines_verify_against_the_oracle(run, tmp_path, engine):
    stream = str(tmp_path / "layered.txt")
    code, _ = run(
        "gen", "--mode", "layered", "--kind", "uniform", "--vertices", "6", "--steps", "150",
        "--frozen-prefix", "40", "--seed", "9", "-o", stream,
    )
    assert code == EXIT_OK
    code, out = run("verify", stream, "--mode", "layered", "--bootstrap-min", "7", "--lenient", *engine)
    assert code == EXIT_OK, out
    assert out[0].startswith("ok:")


def test_warmup_rejects_general_streams(run, write):
    code, _ = run("run", write("square.txt", SQUARE), "--engine", "warmup")
    assert code == EXIT_USAGE


def test_warmup_rejects_late_a_updates(run, write):
    stream = "+ A 0 0\n+ B 0 0\n+ A 1 1\n"
    code, out = run("run", write("late.txt", stream), "--mode", "layered", "--engine", "warmup")
    assert code == EXIT_USAGE
    assert out == ["0", "0"]


def test_bench_writes_one_row_per_update(run, write, tmp_path):
    stream = write("k4.txt", K4)
    metrics = tmp_path / "out" / "bench.csv"
    summary = tmp_path / "out" / "summary.json"
    code, totals = run("bench", stream, *FAST_MAIN, "--metrics", str(metrics), "--summary", str(summary))
    assert code == EXIT_OK
    _, expected = run("run", stream, *FAST_MAIN)
    assert totals == expected

    rows = metrics.read_text().splitlines()
    assert rows[0] == "update_index,wall_ns,elementary_ops,job_backlog,rebuild,slice_ops,budget"
    assert len(rows) == len(totals) + 1
    assert [row.split(",")[0] for row in rows[1:]] == [str(i) for i in range(len(totals))]

    data = json.loads(summary.read_text())
    assert data["summary"]["updates"] == len(totals)


def peak_edges(stream):
    g = LayeredGraph()
    peak = 0
    for e in stream:
        g.apply(e)
        peak = max(peak, g.m)
    return peak


@pytest.mark.parametrize(
    "engine, stream_options",
    [
        ("main", dict(kind="uniform", delete_fraction=0.4)),
        ("warmup", dict(kind="hub", frozen_prefix=80)),
    ],
)
def test_bench_slices_stay_within_the_derived_budget(run, write, tmp_path, engine, stream_options):
    events = generate(vertices=10, steps=500, seed=5, mode="layered", **stream_options)
    stream = str(tmp_path / "layered.txt")
    write_stream(stream, events)
    flat = write("audit.cfg", "engine.transition_slack = 4\nengine.bootstrap_min = 1\n")
    metrics = tmp_path / "bench.csv"
    summary = tmp_path / "summary.json"
    code, totals = run(
        "bench", stream, "--mode", "layered", "--engine", engine, "--flat-config", flat,
        "--reference-edges", str(peak_edges(events)), "--rebuild-policy", "fixed",
        "--metrics", str(metrics), "--summary", str(summary),
    )
    assert code == EXIT_OK
    assert len(totals) == len(events)

    header, *rows = [line.split(",") for line in metrics.read_text().splitlines()]
    columns = {name: header.index(name) for name in ("rebuild", "slice_ops", "budget")}
    budgeted = [row for row in rows if row[columns["rebuild"]] in ("0", "False")]
    assert budgeted
    assert all(int(row[columns["slice_ops"]]) <= int(row[columns["budget"]]) for row in budgeted)
    assert any(int(row[columns["slice_ops"]]) > 0 for row in budgeted)
    data = json.loads(summary.read_text())
    assert data["summary"]["over_budget"] == 0
    assert data["summary"]["max_slice_ops"] > 0


def test_params_report(run, tmp_path):
    output = tmp_path / "params.csv"
    code, _ = run("params", "-o", str(output))
    assert code == EXIT_OK
    lines = output.read_text().splitlines()
    assert lines[0] == "name,lhs,rhs,slack"
    assert "C4,0.875,0.875,0.0" in lines

    code, out = run("params", "--solve")
    assert code == EXIT_OK
    assert out[0] == "name,lhs,rhs,slack"


def test_params_report_with_violations_still_succeeds(run, write):
    flat = write("bad.cfg", "params.epsilon = 1/6\n")
    code, out = run("params", "--flat-config", flat)
    assert code == EXIT_OK
    assert any(line.startswith("C5,") for line in out)


def test_expected_totals_mismatch(run, write):
    stream = write("square.txt", SQUARE)
    code, _ = run("run", stream, "--engine", "naive", "--expected", write("good.txt", "0\n0\n0\n1\n"))
    assert code == EXIT_OK
    code, _ = run("run", stream, "--engine", "naive", "--expected", write("bad.txt", "0\n0\n0\n2\n"))
    assert code == EXIT_DIVERGENCE


def test_parse_errors_exit_before_any_output(run, write):
    code, out = run("run", write("bad.txt", "+ 0 1\n+ 1 1\n"), "--engine", "naive")
    assert code == EXIT_PARSE
    assert out == []


def test_usage_errors(run, write):
    assert run("run")[0] == EXIT_USAGE
    assert run("run", write("square.txt", SQUARE), "--engine", "quantum")[0] == EXIT_USAGE
    assert run("run", str(write("x", "")) + ".missing")[0] == EXIT_USAGE
    bad = write("bad.cfg", "engine.speed = fast\n")
    assert run("run", write("square.txt", SQUARE), "--flat-config", bad)[0] == EXIT_USAGE


def test_verify_reports_the_first_divergence(run, write, monkeypatch):
    class OffByOne:
        def __init__(self):
            self.updates = 0

        def apply(self, update):
            self.updates += 1
            return 1 if self.updates == 3 else 0

    monkeypatch.setattr(cli, "build_counter", lambda config: OffByOne())
    code, out = run("verify", write("square.txt", SQUARE))
    assert code == EXIT_DIVERGENCE
    assert out == ["divergence at update 2: engine=1 oracle=0"]
