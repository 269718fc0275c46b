"""Plain-text board and proof files.

A board file is line oriented; ``#`` starts a comment and blank lines are
ignored::

    board shidoku
    cells 16
    labels 1:1 2:1 3:1 4:1
    asterism 0 1 2 3
    ...
    inscription 5=2
    clue 0=1

Inscription pairs are clues as well, so they do not need a separate ``clue``
line.  Several boards may share one file, each starting at its ``board``
line (see :func:`parse_boards`).

A proof file holds one step per line: ``<serial> <actor> <effect>``, where
the effect is ``place <cell>=<label>``, ``elim <cell>/<label>,...``, both,
or ``none``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import EMPTY, Board, LabelMultiset, PartialLabeledBoard, validate_board
from .proof import Proof, ProofStep


class FormatError(ValueError):
    """A parse or validation failure; ``kind`` names the failure, ``line`` is 1-based (0: whole file)."""

    def __init__(self, kind: str, line: int, message: str) -> None:
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}{kind}: {message}")
        self.kind = kind
        self.line = line


SYNTAX = "Syntax"
UNKNOWN_LABEL = "UnknownLabel"
CELL_OUT_OF_RANGE = "CellOutOfRange"
BAD_COUNT = "BadCount"
NON_UNIFORM = "NonUniform"
CONFLICT = "ConflictingClue"

_VIOLATION_KINDS = {"AsterismWrongSize": NON_UNIFORM}


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _int(tok: str, lineno: int, kind: str = SYNTAX) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(kind, lineno, f"expected an integer, got {tok!r}") from None


@dataclass
class _Draft:
    name: str
    line: int
    cells: int | None = None
    labels: list[tuple[str, int]] | None = None
    asterisms: list[tuple[int, tuple[int, ...]]] | None = None
    inscription: list[tuple[int, int, str]] | None = None
    clues: list[tuple[int, int, str]] | None = None

    def __post_init__(self) -> None:
        self.asterisms = []
        self.inscription = []
        self.clues = []


def _cell(tok: str, lineno: int, n: int) -> int:
    c = _int(tok, lineno, CELL_OUT_OF_RANGE)
    if not 0 <= c < n:
        raise FormatError(CELL_OUT_OF_RANGE, lineno, f"cell {c} not in 0..{n - 1}")
    return c


def _pair(tok: str, lineno: int, n: int) -> tuple[int, str]:
    cell, eq, disp = tok.partition("=")
    if not eq or not disp:
        raise FormatError(SYNTAX, lineno, f"expected <cell>=<label>, got {tok!r}")
    return _cell(cell, lineno, n), disp


def _finish(d: _Draft) -> PartialLabeledBoard:
    if d.cells is None:
        raise FormatError(SYNTAX, d.line, "missing 'cells' line")
    if d.labels is None:
        raise FormatError(SYNTAX, d.line, "missing 'labels' line")
    if not d.asterisms:
        raise FormatError(SYNTAX, d.line, "board has no asterisms")
    try:
        ms = LabelMultiset.from_counts(d.labels)
    except ValueError as exc:
        raise FormatError(BAD_COUNT, d.line, str(exc)) from None
    board = Board(d.cells, tuple(a for _, a in d.asterisms), d.name)
    report = validate_board(board, ms.k)
    if not report.ok:
        v = report.violations[0]
        kind = _VIOLATION_KINDS.get(v.kind, v.kind)
        if v.kind == "CellNotCovered":
            raise FormatError(kind, d.line, f"cell {v.index} lies in no asterism")
        lineno = d.asterisms[v.index][0]
        detail = f"asterism has {v.size} cells, labels sum to {ms.k}" if v.kind == "AsterismWrongSize" else "repeated cell"
        raise FormatError(kind, lineno, detail)
    values = [EMPTY] * d.cells
    ins = set()

    def put(lineno: int, cell: int, disp: str) -> int:
        try:
            lab = ms.lookup(disp)
        except KeyError:
            raise FormatError(UNKNOWN_LABEL, lineno, f"label {disp!r} is not in the multiset") from None
        if values[cell] not in (EMPTY, lab):
            raise FormatError(CONFLICT, lineno, f"cell {cell} already holds {ms.display(values[cell])!r}")
        values[cell] = lab
        return lab

    for lineno, cell, disp in d.inscription:
        if any(c == cell for c, _ in ins):
            raise FormatError(CONFLICT, lineno, f"cell {cell} inscribed twice")
        ins.add((cell, put(lineno, cell, disp)))
    for lineno, cell, disp in d.clues:
        put(lineno, cell, disp)
    return PartialLabeledBoard(board, ms, tuple(values), frozenset(ins))


def parse_boards(text: str) -> list[PartialLabeledBoard]:
    """Every board in ``text``, in file order."""
    drafts: list[_Draft] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        key, *args = line.split()
        if key == "board":
            if len(args) != 1:
                raise FormatError(SYNTAX, lineno, "expected 'board <name>'")
            drafts.append(_Draft(args[0], lineno))
            continue
        if not drafts:
            raise FormatError(SYNTAX, lineno, "file must start with a 'board' line")
        d = drafts[-1]
        if key == "cells":
            if len(args) != 1 or d.cells is not None:
                raise FormatError(SYNTAX, lineno, "expected a single 'cells <n>' line")
            d.cells = _int(args[0], lineno, BAD_COUNT)
            if d.cells < 1:
                raise FormatError(BAD_COUNT, lineno, "a board needs at least one cell")
            continue
        if d.cells is None:
            raise FormatError(SYNTAX, lineno, f"'{key}' before 'cells'")
        if key == "labels":
            if not args or d.labels is not None:
                raise FormatError(SYNTAX, lineno, "expected a single non-empty 'labels' line")
            labels = []
            for tok in args:
                disp, colon, count = tok.rpartition(":")
                if not colon or not disp:
                    raise FormatError(SYNTAX, lineno, f"expected <label>:<count>, got {tok!r}")
                n = _int(count, lineno, BAD_COUNT)
                if n < 1:
                    raise FormatError(BAD_COUNT, lineno, f"label {disp!r} has count {n}")
                labels.append((disp, n))
            if len({disp for disp, _ in labels}) != len(labels):
                raise FormatError(BAD_COUNT, lineno, "label listed twice")
            d.labels = labels
        elif key == "asterism":
            if not args:
                raise FormatError(SYNTAX, lineno, "empty asterism")
            d.asterisms.append((lineno, tuple(_cell(t, lineno, d.cells) for t in args)))
        elif key == "inscription":
            d.inscription += [(lineno, *_pair(t, lineno, d.cells)) for t in args]
        elif key == "clue":
            if len(args) != 1:
                raise FormatError(SYNTAX, lineno, "expected 'clue <cell>=<label>'")
            d.clues.append((lineno, *_pair(args[0], lineno, d.cells)))
        else:
            raise FormatError(SYNTAX, lineno, f"unknown keyword {key!r}")
    return [_finish(d) for d in drafts]


def parse_board(text: str) -> PartialLabeledBoard:
    boards = parse_boards(text)
    if len(boards) != 1:
        raise FormatError(SYNTAX, 0, f"expected exactly one board, found {len(boards)}")
    return boards[0]


def _check_token(tok: str, what: str) -> str:
    if not tok or any(ch.isspace() for ch in tok) or "#" in tok:
        raise ValueError(f"{what} {tok!r} cannot be written: no whitespace or '#' allowed")
    return tok


def serialize_board(plb: PartialLabeledBoard, comments: list[str] | tuple[str, ...] = ()) -> str:
    """Canonical text for ``plb``: asterisms in board order with sorted cells, clues by cell."""
    ms = plb.multiset
    out = [f"# {c}" for c in comments]
    out.append(f"board {_check_token(plb.board.name, 'board name')}")
    out.append(f"cells {plb.board.cell_count}")
    out.append("labels " + " ".join(f"{_check_token(lab.display, 'label')}:{n}" for lab, n in zip(ms.labels, ms.counts)))
    for a in plb.board.asterisms:
        out.append("asterism " + " ".join(map(str, a)))
    if plb.inscription:
        out.append("inscription " + " ".join(f"{c}={ms.display(l)}" for c, l in sorted(plb.inscription)))
    ins_cells = plb.inscription_cells
    for c, v in enumerate(plb.values):
        if v != EMPTY and c not in ins_cells:
            out.append(f"clue {c}={ms.display(v)}")
    return "\n".join(out) + "\n"


# -- proofs ------------------------------------------------------------------


def serialize_proof(proof: Proof, multiset: LabelMultiset) -> str:
    lines = []
    for s in proof.steps:
        parts = [str(s.serial), s.actor]
        if s.placement is not None:
            c, l = s.placement
            parts.append(f"place {c}={multiset.display(l)}")
        if s.eliminations:
            parts.append("elim " + ",".join(f"{c}/{multiset.display(l)}" for c, l in s.eliminations))
        if len(parts) == 2:
            parts.append("none")
        lines.append(" ".join(parts))
    return "".join(line + "\n" for line in lines)


def parse_proof(text: str, multiset: LabelMultiset) -> Proof:
    def label(tok: str, lineno: int) -> int:
        try:
            return multiset.lookup(tok)
        except KeyError:
            raise FormatError(UNKNOWN_LABEL, lineno, f"label {tok!r} is not in the multiset") from None

    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        toks = line.split()
        if len(toks) < 3:
            raise FormatError(SYNTAX, lineno, "expected '<serial> <actor> <effect>'")
        serial = _int(toks[0], lineno)
        actor = toks[1]
        placement = None
        elims: list[tuple[int, int]] = []
        rest = toks[2:]
        if rest == ["none"]:
            rest = []
        while rest:
            if len(rest) < 2:
                raise FormatError(SYNTAX, lineno, f"dangling {rest[0]!r}")
            kw, arg, rest = rest[0], rest[1], rest[2:]
            if kw == "place" and placement is None:
                cell, eq, disp = arg.partition("=")
                if not eq:
                    raise FormatError(SYNTAX, lineno, f"bad placement {arg!r}")
                placement = (_int(cell, lineno), label(disp, lineno))
            elif kw == "elim" and not elims:
                for item in arg.split(","):
                    cell, slash, disp = item.partition("/")
                    if not slash:
                        raise FormatError(SYNTAX, lineno, f"bad elimination {item!r}")
                    elims.append((_int(cell, lineno), label(disp, lineno)))
            else:
                raise FormatError(SYNTAX, lineno, f"unexpected {kw!r}")
        steps.append(ProofStep(serial, actor, placement, tuple(elims)))
    try:
        return Proof(tuple(steps))
    except ValueError as exc:
        raise FormatError(SYNTAX, 0, str(exc)) from None
