"""Constructors for the common board families.

Every constructor returns an empty :class:`PartialLabeledBoard` (or one whose
only clues are the inscription).  Cells of an ``n x n`` grid are numbered
row-major.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .model import Board, LabelMultiset, PartialLabeledBoard, validate_board


class CatalogError(ValueError):
    pass


def _rows_cols(n: int) -> list[tuple[int, ...]]:
    rows = [tuple(r * n + c for c in range(n)) for r in range(n)]
    cols = [tuple(r * n + c for r in range(n)) for c in range(n)]
    return rows + cols


def _finish(board: Board, multiset: LabelMultiset | None, n: int) -> PartialLabeledBoard:
    ms = multiset if multiset is not None else LabelMultiset.range(n)
    if ms.k != n:
        raise CatalogError(f"multiset total {ms.k} does not match asterism size {n}")
    report = validate_board(board, ms.k)
    if not report.ok:
        raise CatalogError(f"board {board.name} is not {ms.k}-uniform: {report.violations}")
    return PartialLabeledBoard.empty(board, ms)


def latin_square(n: int, multiset: LabelMultiset | None = None) -> PartialLabeledBoard:
    """n x n board with rows and columns as asterisms."""
    if n < 1:
        raise CatalogError("order must be positive")
    return _finish(Board(n * n, tuple(_rows_cols(n)), f"latin_square_{n}"), multiset, n)


def sudoku_boxes(rows: int, cols: int, multiset: LabelMultiset | None = None) -> PartialLabeledBoard:
    """Rows, columns and ``rows x cols`` boxes over an (rows*cols)^2 grid.

    ``sudoku_boxes(2, 2)`` is Shidoku, ``sudoku_boxes(3, 3)`` is Sudoku.
    """
    if rows < 1 or cols < 1:
        raise CatalogError("box dimensions must be positive")
    n = rows * cols
    boxes = []
    for br in range(cols):
        for bc in range(rows):
            boxes.append(
                tuple((br * rows + r) * n + bc * cols + c for r in range(rows) for c in range(cols))
            )
    board = Board(n * n, tuple(_rows_cols(n) + boxes), f"sudoku_{rows}x{cols}")
    return _finish(board, multiset, n)


def shidoku(multiset: LabelMultiset | None = None) -> PartialLabeledBoard:
    return sudoku_boxes(2, 2, multiset)


def sudoku(multiset: LabelMultiset | None = None) -> PartialLabeledBoard:
    return sudoku_boxes(3, 3, multiset)


def _partition_regions(n: int, partition: Sequence[Iterable[int]] | str) -> list[tuple[int, ...]]:
    if isinstance(partition, str):
        lines = [ln.strip() for ln in partition.strip().splitlines() if ln.strip()]
        if len(lines) != n or any(len(ln) != n for ln in lines):
            raise CatalogError(f"region grid must be {n} lines of {n} characters")
        regions: dict[str, list[int]] = {}
        for r, ln in enumerate(lines):
            for c, ch in enumerate(ln):
                regions.setdefault(ch, []).append(r * n + c)
        return [tuple(v) for v in regions.values()]
    return [tuple(reg) for reg in partition]


def gerechte(
    n: int, partition: Sequence[Iterable[int]] | str, multiset: LabelMultiset | None = None
) -> PartialLabeledBoard:
    """Latin square plus a partition of the grid into n regions of n cells."""
    regions = _partition_regions(n, partition)
    if len(regions) != n:
        raise CatalogError(f"expected {n} regions, got {len(regions)}")
    seen: set[int] = set()
    for reg in regions:
        if len(reg) != n or len(set(reg)) != n:
            raise CatalogError(f"region {reg} does not have {n} distinct cells")
        if seen & set(reg):
            raise CatalogError("regions overlap")
        seen.update(reg)
    if seen != set(range(n * n)):
        raise CatalogError("regions do not cover the board")
    board = Board(n * n, tuple(_rows_cols(n) + regions), f"gerechte_{n}")
    return _finish(board, multiset, n)


def extra_windows(
    base: PartialLabeledBoard, windows: Iterable[Iterable[int]], name: str | None = None
) -> PartialLabeledBoard:
    """Add extra asterisms (windows, diagonals, ...) to ``base``."""
    board = base.board.with_asterisms(windows, name or base.board.name + "_windows")
    report = validate_board(board, base.multiset.k)
    if not report.ok:
        raise CatalogError(f"extra asterisms break uniformity: {report.violations}")
    return PartialLabeledBoard(board, base.multiset, base.values, base.inscription)


def ripeto(base: PartialLabeledBoard, multiset: LabelMultiset | Mapping[str, int]) -> PartialLabeledBoard:
    """Same topology as ``base`` with an arbitrary (repeating) multiset."""
    ms = multiset if isinstance(multiset, LabelMultiset) else LabelMultiset.from_counts(multiset)
    if ms.k != base.multiset.k:
        raise CatalogError(f"multiset total {ms.k} != asterism size {base.multiset.k}")
    if base.clue_count:
        raise CatalogError("ripeto needs an empty base board")
    return PartialLabeledBoard.empty(base.board, ms)


def inscripted(base: PartialLabeledBoard, placements: Mapping[int, str | int]) -> PartialLabeledBoard:
    """Pre-fill ``placements`` (cell -> label display or id) as the inscription."""
    ms = base.multiset
    pairs = []
    for cell, lab in placements.items():
        lid = lab if isinstance(lab, int) else ms.lookup(lab)
        if not 0 <= cell < base.board.cell_count:
            raise CatalogError(f"inscription cell {cell} out of range")
        pairs.append((cell, lid))
    vals = list(base.values)
    for cell, lid in pairs:
        vals[cell] = lid
    return PartialLabeledBoard(base.board, ms, tuple(vals), base.inscription | frozenset(pairs))


@dataclass(frozen=True)
class CatalogSpec:
    family: str
    params: Mapping[str, Any] = field(default_factory=dict)


def build(spec: CatalogSpec) -> PartialLabeledBoard:
    p = dict(spec.params)
    ms = p.get("multiset")
    if isinstance(ms, Mapping):
        ms = LabelMultiset.from_counts(ms)
    fam = spec.family
    if fam == "latin_square":
        return latin_square(int(p["n"]), ms)
    if fam == "sudoku_boxes":
        return sudoku_boxes(int(p["rows"]), int(p["cols"]), ms)
    if fam == "gerechte":
        return gerechte(int(p["n"]), p["partition"], ms)
    if fam == "extra_windows":
        return extra_windows(build(p["base"]), p["windows"])
    if fam == "ripeto":
        return ripeto(build(p["base"]), ms)
    if fam == "inscripted":
        return inscripted(build(p["base"]), p["placements"])
    raise CatalogError(f"unknown family {fam!r}")


def parse_family(text: str, multiset: Mapping[str, int] | None = None) -> PartialLabeledBoard:
    """Short CLI spellings: ``shidoku``, ``sudoku``, ``latin:N``, ``sudoku:RxC``."""
    name, _, arg = text.partition(":")
    name = name.strip().lower()
    ms = LabelMultiset.from_counts(multiset) if multiset else None
    if name == "shidoku":
        return shidoku(ms)
    if name == "sudoku" and not arg:
        return sudoku(ms)
    if name in ("latin", "latin_square"):
        return latin_square(int(arg), ms)
    if name in ("sudoku", "sudoku_boxes"):
        r, _, c = arg.lower().partition("x")
        return sudoku_boxes(int(r), int(c), ms)
    raise CatalogError(f"unknown board family {text!r}")
