"""Classification and puzzle solving on top of the search engine."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .model import PartialLabeledBoard, is_latin_board, is_partial_latin_board
from .proof import Proof
from .search import SearchConfig, enumerate_solutions, fast_solutions


class Tag(str, Enum):
    NOT_PLB = "NotPLB"
    NOT_COMPLETABLE = "NotCompletable"
    UNIQUE = "UniqueSolution"
    MULTIPLE = "MultipleSolutions"
    ALREADY_LATIN = "AlreadyLatinBoard"
    INDETERMINATE = "Indeterminate"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Classification:
    tag: Tag
    solutions_found: int
    witnesses: tuple[PartialLabeledBoard, ...] = ()

    @property
    def is_puzzle(self) -> bool:
        return self.tag is Tag.UNIQUE


class NotAPuzzle(ValueError):
    def __init__(self, classification: Classification) -> None:
        super().__init__(f"not a Latin puzzle: {classification.tag}")
        self.classification = classification


def classify(plb: PartialLabeledBoard, max_nodes: int | None = None) -> Classification:
    """Bucket ``plb`` by its number of completions (0 / 1 / 2+).

    Only two solutions are ever looked for.  With ``max_nodes`` the search may
    give up, yielding ``Indeterminate`` with whatever it had found.
    """
    if not is_partial_latin_board(plb):
        return Classification(Tag.NOT_PLB, 0)
    if is_latin_board(plb):
        return Classification(Tag.ALREADY_LATIN, 1, (plb,))
    sols, _, complete = fast_solutions(plb, limit=2, max_nodes=max_nodes)
    found = len(sols)
    if found >= 2:
        return Classification(Tag.MULTIPLE, found, tuple(sols[:2]))
    if not complete:
        return Classification(Tag.INDETERMINATE, found, tuple(sols))
    if found == 1:
        return Classification(Tag.UNIQUE, 1, tuple(sols))
    return Classification(Tag.NOT_COMPLETABLE, 0)


def is_unique(plb: PartialLabeledBoard) -> bool:
    return classify(plb).tag is Tag.UNIQUE


@dataclass(frozen=True)
class Solved:
    solution: PartialLabeledBoard
    proof: Proof


def solve_puzzle(puzzle: PartialLabeledBoard, cfg: SearchConfig | None = None) -> Solved:
    """Unique completion of a Latin puzzle plus the proof the engine followed."""
    if is_latin_board(puzzle):
        return Solved(puzzle, Proof())
    verdict = classify(puzzle)
    if verdict.tag is not Tag.UNIQUE:
        raise NotAPuzzle(verdict)
    cfg = replace(cfg or SearchConfig(), limit=1)
    result = enumerate_solutions(puzzle, cfg)
    sol = result.solutions[0]
    if sol.values != verdict.witnesses[0].values:
        raise RuntimeError("search and kernel disagree on the unique solution")
    return Solved(sol, result.proof)
