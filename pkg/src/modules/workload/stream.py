"""
Update stream text format.

One event per line; `#` starts a comment and blank lines are ignored.
General mode lines are `+ u v` / `- u v`, layered mode lines are `+ A u v` with the
first endpoint on the matrix's lower layer (D edges run from L4 to L1).
Expected-output files hold one decimal total per line.
"""

import logging
from typing import Iterable, List, Sequence, Union

from core.errors import ParseError
from modules.graph.layered import MatrixId, Op, UpdateEvent
from modules.graph.reduction import GeneralUpdate

logger = logging.getLogger(__name__)

Update = Union[GeneralUpdate, UpdateEvent]

MODES = ("general", "layered")


def _op(token: str, line_number: int) -> Op:
    try:
        return Op(token)
    except ValueError:
        raise ParseError(f"expected '+' or '-', got {token!r}", line_number)


def _vertex(token: str, line_number: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(f"vertex id must be an integer, got {token!r}", line_number)
    if value < 0:
        raise ParseError(f"vertex id must be non-negative, got {value}", line_number)
    return value


def parse_line(line: str, mode: str, line_number: int = 0) -> Update:
    """
    Parse one non-blank, comment-free line.

    Raises:
        ParseError: If the line does not match the mode's grammar
    """
    tokens = line.split()
    if mode == "general":
        if len(tokens) != 3:
            raise ParseError(f"expected '<op> u v', got {line.strip()!r}", line_number)
        u, v = _vertex(tokens[1], line_number), _vertex(tokens[2], line_number)
        if u == v:
            raise ParseError(f"self-loop on vertex {u}", line_number)
        return GeneralUpdate(_op(tokens[0], line_number), u, v)
    if mode == "layered":
        if len(tokens) != 4:
            raise ParseError(f"expected '<op> <matrix> a b', got {line.strip()!r}", line_number)
        try:
            matrix = MatrixId[tokens[1].upper()]
        except KeyError:
            raise ParseError(f"matrix must be one of A, B, C, D, got {tokens[1]!r}", line_number)
        return UpdateEvent(_op(tokens[0], line_number), matrix, _vertex(tokens[2], line_number), _vertex(tokens[3], line_number))
    raise ValueError(f"Unknown stream mode: {mode}")


def parse_stream(lines: Iterable[str], mode: str) -> List[Update]:
    """
    Parse a whole stream.

    Raises:
        ParseError: With the 1-based line number of the first bad line
    """
    updates = []
    for line_number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            updates.append(parse_line(line, mode, line_number))
    return updates


def read_stream(path: str, mode: str) -> List[Update]:
    with open(path, "r") as f:
        updates = parse_stream(f, mode)
    logger.debug(f"Read {len(updates)} updates from {path}")
    return updates


def format_update(update: Update) -> str:
    if isinstance(update, GeneralUpdate):
        return f"{update.op.value} {update.u} {update.v}"
    return f"{update.op.value} {update.matrix.name} {update.a} {update.b}"


def write_stream(path: str, updates: Sequence[Update], header: str = "") -> None:
    with open(path, "w") as f:
        if header:
            for line in header.splitlines():
                f.write(f"# {line}\n")
        for update in updates:
            f.write(format_update(update) + "\n")


def read_totals(path: str) -> List[int]:
    """
    Read an expected-output file.

    Raises:
        ParseError: If a line is not a decimal integer
    """
    totals = []
    with open(path, "r") as f:
        for line_number, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                totals.append(int(line))
            except ValueError:
                raise ParseError(f"expected an integer total, got {line!r}", line_number)
    return totals
