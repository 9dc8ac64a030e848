"""
Unit tests for the stream format and the workload generators.
"""

import pytest

from core.errors import InvalidParam, ParseError
from modules.graph.layered import MatrixId, Op, UpdateEvent
from modules.graph.reduction import GeneralUpdate
from modules.workload.generators import degree_trace, generate, validate_stream
from modules.workload.stream import format_update, parse_line, parse_stream, read_stream, read_totals, write_stream


def test_parse_general_and_layered_lines():
    assert parse_line("+ 0 1", "general") == GeneralUpdate(Op.INSERT, 0, 1)
    assert parse_line("- 3 2", "general") == GeneralUpdate(Op.DELETE, 3, 2)
    assert parse_line("+ d 4 1", "layered") == UpdateEvent(Op.INSERT, MatrixId.D, 4, 1)


def test_comments_and_blank_lines_are_skipped():
    lines = ["# header", "", "+ 0 1  # first", "   ", "- 0 1"]
    assert parse_stream(lines, "general") == [GeneralUpdate(Op.INSERT, 0, 1), GeneralUpdate(Op.DELETE, 0, 1)]


@pytest.mark.parametrize(
    "lines,mode,line_number",
    [
        (["+ 0 1", "* 0 1"], "general", 2),
        (["+ 0"], "general", 1),
        (["+ 0 1", "", "+ x 1"], "general", 3),
        (["+ 0 -1"], "general", 1),
        (["+ 2 2"], "general", 1),
        (["+ E 0 1"], "layered", 1),
        (["+ A 0 1", "+ A 0"], "layered", 2),
    ],
)
def test_parse_errors_carry_the_line_number(lines, mode, line_number):
    with pytest.raises(ParseError) as excinfo:
        parse_stream(lines, mode)
    assert excinfo.value.line_number == line_number
    assert str(excinfo.value).startswith(f"line {line_number}:")


def test_stream_file_round_trip(tmp_path):
    updates = generate("uniform", 6, 50, seed=2, mode="layered")
    path = tmp_path / "stream.txt"
    write_stream(str(path), updates, header="kind=uniform\nseed=2")
    text = path.read_text().splitlines()
    assert text[:2] == ["# kind=uniform", "# seed=2"]
    assert text[2] == format_update(updates[0])
    assert read_stream(str(path), "layered") == updates


def test_read_totals(tmp_path):
    path = tmp_path / "expected.txt"
    path.write_text("0\n1\n\n3\n")
    assert read_totals(str(path)) == [0, 1, 3]
    path.write_text("0\nthree\n")
    with pytest.raises(ParseError):
        read_totals(str(path))


@pytest.mark.parametrize("kind", ["uniform", "hub", "sliding-window"])
@pytest.mark.parametrize("mode", ["general", "layered"])
def test_generated_streams_are_valid_and_deterministic(kind, mode):
    first = generate(kind, 10, 200, seed=7, mode=mode)
    assert first == generate(kind, 10, 200, seed=7, mode=mode)
    assert first != generate(kind, 10, 200, seed=8, mode=mode)
    validate_stream(first, mode)


def test_zero_steps_give_an_empty_stream():
    assert generate("uniform", 5, 0) == []
    assert generate("sliding-window", 5, 0) == []


def test_sliding_window_ends_empty_and_stays_bounded():
    updates = generate("sliding-window", 12, 300, seed=1, window=8)
    assert validate_stream(updates, "general").m == 0
    live = 0
    for update in updates:
        live += update.op.sign
        assert live <= 8


def test_frozen_prefix_puts_a_and_c_first():
    updates = generate("uniform", 6, 100, seed=3, mode="layered", frozen_prefix=30)
    prefix, rest = updates[:30], updates[30:]
    assert all(e.matrix in (MatrixId.A, MatrixId.C) and e.op is Op.INSERT for e in prefix)
    assert all(e.matrix in (MatrixId.B, MatrixId.D) for e in rest)
    with pytest.raises(InvalidParam):
        generate("uniform", 6, 10, frozen_prefix=5)


def test_hub_vertex_crosses_degree_thresholds():
    trace = degree_trace(generate("hub", 40, 600, delete_fraction=0.2, seed=5))
    assert trace[0] <= 1
    assert max(trace) >= 20


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="zipf", vertices=5, steps=1),
        dict(kind="uniform", vertices=1, steps=1),
        dict(kind="uniform", vertices=5, steps=-1),
        dict(kind="uniform", vertices=5, steps=1, delete_fraction=1.0),
        dict(kind="sliding-window", vertices=5, steps=1, window=0),
        dict(kind="uniform", vertices=5, steps=1, mode="bipartite"),
    ],
)
def test_invalid_generator_arguments(kwargs):
    with pytest.raises(InvalidParam):
        generate(**kwargs)
