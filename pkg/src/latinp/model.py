"""Boards, label multisets and partial labelings.

Cells are plain integer ids ``0..n-1`` and labels are interned to dense
integer ids ``0..m-1``; display strings only matter for I/O.  All objects
here are immutable.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

EMPTY = -1
MAX_LABELS = 64


@dataclass(frozen=True)
class Label:
    id: int
    display: str

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError("label id must be non-negative")
        if not self.display:
            raise ValueError("label display must be non-empty")


@dataclass(frozen=True)
class LabelMultiset:
    """A k-multiset of labels; ``counts[i]`` is the multiplicity of label ``i``."""

    labels: tuple[Label, ...]
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("multiset needs at least one label")
        if len(self.labels) != len(self.counts):
            raise ValueError("labels and counts differ in length")
        if len(self.labels) > MAX_LABELS:
            raise ValueError(f"at most {MAX_LABELS} distinct labels are supported")
        for i, lab in enumerate(self.labels):
            if lab.id != i:
                raise ValueError("label ids must be dense and in order")
        if any(c < 1 for c in self.counts):
            raise ValueError("every count must be >= 1")
        if len({lab.display for lab in self.labels}) != len(self.labels):
            raise ValueError("duplicate label display")

    @classmethod
    def from_counts(cls, counts: Mapping[str, int] | Iterable[tuple[str, int]]) -> LabelMultiset:
        items = list(counts.items()) if isinstance(counts, Mapping) else list(counts)
        labels = tuple(Label(i, str(d)) for i, (d, _) in enumerate(items))
        return cls(labels, tuple(int(c) for _, c in items))

    @classmethod
    def distinct(cls, displays: Iterable[str]) -> LabelMultiset:
        """Set multiset: every label once (plain Latin squares, Sudoku)."""
        return cls.from_counts([(str(d), 1) for d in displays])

    @classmethod
    def range(cls, n: int, start: int = 1) -> LabelMultiset:
        return cls.distinct(str(i) for i in range(start, start + n))

    @property
    def k(self) -> int:
        return sum(self.counts)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.labels)) - 1

    def support(self) -> frozenset[int]:
        return frozenset(range(len(self.labels)))

    def display(self, label: int) -> str:
        return self.labels[label].display

    @cached_property
    def _by_display(self) -> dict[str, int]:
        return {lab.display: lab.id for lab in self.labels}

    def lookup(self, display: str) -> int:
        try:
            return self._by_display[display]
        except KeyError:
            raise KeyError(f"unknown label {display!r}") from None


@dataclass(frozen=True)
class Board:
    """A cell set ``0..cell_count-1`` and its constellation of asterisms."""

    cell_count: int
    asterisms: tuple[tuple[int, ...], ...]
    name: str = "board"

    def __post_init__(self) -> None:
        if self.cell_count < 1:
            raise ValueError("a board needs at least one cell")
        norm = tuple(tuple(sorted(int(c) for c in a)) for a in self.asterisms)
        for a in norm:
            if a and (a[0] < 0 or a[-1] >= self.cell_count):
                raise ValueError(f"asterism {a} references a cell out of range")
        object.__setattr__(self, "asterisms", norm)

    @cached_property
    def cell_asterisms(self) -> tuple[tuple[int, ...], ...]:
        """For each cell, the indices of the asterisms that contain it."""
        out: list[list[int]] = [[] for _ in range(self.cell_count)]
        for i, a in enumerate(self.asterisms):
            for c in set(a):
                out[c].append(i)
        return tuple(tuple(x) for x in out)

    @cached_property
    def peers(self) -> tuple[frozenset[int], ...]:
        out = []
        for c in range(self.cell_count):
            s: set[int] = set()
            for i in self.cell_asterisms[c]:
                s.update(self.asterisms[i])
            s.discard(c)
            out.append(frozenset(s))
        return tuple(out)

    @cached_property
    def overlapping_pairs(self) -> tuple[tuple[int, int, tuple[int, ...]], ...]:
        """All ordered pairs (a, b), a != b, of asterisms sharing cells, with the shared cells."""
        sets = [frozenset(a) for a in self.asterisms]
        out = []
        for i, sa in enumerate(sets):
            for j, sb in enumerate(sets):
                if i != j and sa != sb:
                    common = sa & sb
                    if common:
                        out.append((i, j, tuple(sorted(common))))
        return tuple(out)

    def with_asterisms(self, extra: Iterable[Iterable[int]], name: str | None = None) -> Board:
        return Board(self.cell_count, self.asterisms + tuple(tuple(a) for a in extra), name or self.name)


class Violation(NamedTuple):
    kind: str  # CellNotCovered | AsterismWrongSize | DuplicateCellInAsterism
    index: int  # cell id for CellNotCovered, asterism index otherwise
    size: int | None = None


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_board(board: Board, k: int) -> ValidationReport:
    """Check that ``board`` is a k-uniform board.  Violations are returned, not raised."""
    violations: list[Violation] = []
    warnings: list[str] = []
    covered = bytearray(board.cell_count)
    seen: dict[tuple[int, ...], int] = {}
    for i, a in enumerate(board.asterisms):
        if len(set(a)) != len(a):
            violations.append(Violation("DuplicateCellInAsterism", i))
        if len(a) != k:
            violations.append(Violation("AsterismWrongSize", i, len(a)))
        for c in a:
            covered[c] = 1
        key = tuple(sorted(set(a)))
        if key in seen:
            warnings.append(f"asterism {i} duplicates asterism {seen[key]}; collapsed")
        else:
            seen[key] = i
    for c in range(board.cell_count):
        if not covered[c]:
            violations.append(Violation("CellNotCovered", c))
    return ValidationReport(tuple(violations), tuple(warnings))


@dataclass(frozen=True)
class PartialLabeledBoard:
    """Board + multiset + partial assignment (``EMPTY`` marks a missing label).

    ``inscription`` holds (cell, label) pairs that are always present among the
    clues; they must also appear in ``values``.
    """

    board: Board
    multiset: LabelMultiset
    values: tuple[int, ...]
    inscription: frozenset[tuple[int, int]] = field(default=frozenset())

    def __post_init__(self) -> None:
        vals = tuple(int(v) for v in self.values)
        if len(vals) != self.board.cell_count:
            raise ValueError("assignment length does not match the cell count")
        m = self.multiset.size
        for c, v in enumerate(vals):
            if v != EMPTY and not 0 <= v < m:
                raise ValueError(f"cell {c}: label id {v} not in the multiset support")
        object.__setattr__(self, "values", vals)
        ins = frozenset((int(c), int(l)) for c, l in self.inscription)
        seen_cells: set[int] = set()
        for c, l in ins:
            if c in seen_cells:
                raise ValueError(f"inscription has two labels for cell {c}")
            seen_cells.add(c)
            if not 0 <= c < len(vals) or vals[c] != l:
                raise ValueError(f"inscription pair ({c}, {l}) is not among the clues")
        object.__setattr__(self, "inscription", ins)

    @classmethod
    def empty(cls, board: Board, multiset: LabelMultiset) -> PartialLabeledBoard:
        return cls(board, multiset, (EMPTY,) * board.cell_count)

    @classmethod
    def from_assignment(
        cls,
        board: Board,
        multiset: LabelMultiset,
        assignment: Mapping[int, int],
        inscription: Iterable[tuple[int, int]] = (),
    ) -> PartialLabeledBoard:
        vals = [EMPTY] * board.cell_count
        for c, l in assignment.items():
            vals[c] = l
        return cls(board, multiset, tuple(vals), frozenset(inscription))

    @property
    def assignment(self) -> dict[int, int]:
        return {c: v for c, v in enumerate(self.values) if v != EMPTY}

    @property
    def empty_cells(self) -> tuple[int, ...]:
        return tuple(c for c, v in enumerate(self.values) if v == EMPTY)

    @property
    def clue_count(self) -> int:
        return sum(1 for v in self.values if v != EMPTY)

    @property
    def is_complete(self) -> bool:
        return EMPTY not in self.values

    @property
    def inscription_cells(self) -> frozenset[int]:
        return frozenset(c for c, _ in self.inscription)

    def removable_clues(self) -> tuple[int, ...]:
        """Clue cells that are not part of the inscription."""
        ins = self.inscription_cells
        return tuple(c for c, v in enumerate(self.values) if v != EMPTY and c not in ins)

    def with_values(self, values: Sequence[int]) -> PartialLabeledBoard:
        return PartialLabeledBoard(self.board, self.multiset, tuple(values), self.inscription)

    def with_clue(self, cell: int, label: int) -> PartialLabeledBoard:
        vals = list(self.values)
        vals[cell] = label
        return self.with_values(vals)

    def without_clue(self, cell: int) -> PartialLabeledBoard:
        if cell in self.inscription_cells:
            raise ValueError(f"cell {cell} is inscribed and cannot be cleared")
        vals = list(self.values)
        vals[cell] = EMPTY
        return self.with_values(vals)

    def restricted_to(self, cells: Iterable[int]) -> PartialLabeledBoard:
        """Keep only the labels on ``cells`` (plus the inscription)."""
        keep = set(cells) | self.inscription_cells
        return self.with_values(v if c in keep else EMPTY for c, v in enumerate(self.values))


def is_partial_latin_board(plb: PartialLabeledBoard) -> bool:
    """No asterism holds a label more often than the multiset allows."""
    counts = plb.multiset.counts
    vals = plb.values
    for a in plb.board.asterisms:
        seen = Counter(vals[c] for c in a)
        seen.pop(EMPTY, None)
        for lab, n in seen.items():
            if n > counts[lab]:
                return False
    return True


def is_latin_board(plb: PartialLabeledBoard) -> bool:
    """Total assignment where every asterism holds exactly the multiset."""
    if not plb.is_complete:
        return False
    want = Counter(dict(enumerate(plb.multiset.counts)))
    vals = plb.values
    for a in plb.board.asterisms:
        if Counter(vals[c] for c in a) != want:
            return False
    return True
