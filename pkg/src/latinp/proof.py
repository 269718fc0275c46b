"""Solving proofs: the ordered steps that take a puzzle to its solution."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .domains import is_single, single_label
from .model import EMPTY, PartialLabeledBoard, is_latin_board

BACKTRACK = "backtrack"


class ReplayMismatch(ValueError):
    pass


@dataclass(frozen=True)
class ProofStep:
    """One logged step.

    ``placement`` is the (cell, label) written by the step, if any; the
    eliminations are the (cell, label) candidates removed since the previous
    step.  Search decisions carry ``actor == "backtrack"``.
    """

    serial: int
    actor: str
    placement: tuple[int, int] | None = None
    eliminations: tuple[tuple[int, int], ...] = ()

    @property
    def is_decision(self) -> bool:
        return self.actor == BACKTRACK


@dataclass(frozen=True)
class Proof:
    steps: tuple[ProofStep, ...] = ()

    def __post_init__(self) -> None:
        steps = tuple(self.steps)
        for a, b in zip(steps, steps[1:]):
            if b.serial <= a.serial:
                raise ValueError(f"proof serials not strictly increasing at {b.serial}")
        object.__setattr__(self, "steps", steps)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    @property
    def has_backtrack(self) -> bool:
        return any(s.is_decision for s in self.steps)

    def actors(self) -> list[str]:
        return [s.actor for s in self.steps]

    def placements(self) -> list[tuple[int, int]]:
        return [s.placement for s in self.steps if s.placement is not None]

    def extend(self, steps: Iterable[ProofStep]) -> Proof:
        return Proof(self.steps + tuple(steps))


def replay(proof: Proof, puzzle: PartialLabeledBoard) -> PartialLabeledBoard:
    """Apply ``proof`` to ``puzzle`` from the initial domain and return the board it reaches.

    Raises :class:`ReplayMismatch` when a step removes a candidate that is not
    present, places a label the cell cannot take, or the end state is not a
    Latin board.
    """
    full = puzzle.multiset.full_mask
    masks = {c: full for c in puzzle.empty_cells}
    for step in proof.steps:
        for cell, lab in step.eliminations:
            m = masks.get(cell)
            if m is None or not m >> lab & 1:
                raise ReplayMismatch(f"step {step.serial}: cannot eliminate {lab} from cell {cell}")
            masks[cell] = m & ~(1 << lab)
        if step.placement is not None:
            cell, lab = step.placement
            m = masks.get(cell)
            if m is None or not m >> lab & 1:
                raise ReplayMismatch(f"step {step.serial}: cannot place {lab} on cell {cell}")
            if not step.is_decision and m != 1 << lab:
                raise ReplayMismatch(f"step {step.serial}: cell {cell} is not forced to {lab}")
            masks[cell] = 1 << lab
    vals = list(puzzle.values)
    for cell, m in masks.items():
        if not is_single(m):
            raise ReplayMismatch(f"cell {cell} is unresolved after the proof")
        vals[cell] = single_label(m)
    out = puzzle.with_values(vals)
    if EMPTY in out.values or not is_latin_board(out):
        raise ReplayMismatch("proof does not end in a Latin board")
    return out
