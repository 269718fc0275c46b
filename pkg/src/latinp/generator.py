"""Puzzle generation from Latin boards and partial boards.

:func:`puzzles_from_latin_board` removes clues one at a time from a solved
board, keeping a removal only when the puzzle stays uniquely completable, and
descends from there; every board kept along the way is emitted, so clue
counts strictly decrease along the returned list.  :func:`single_pass_generate`
instead tags every label the search writes and extracts puzzles from tags
that belong to exactly one solution.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .fairness import DifficultyRating, RatingConfig, certify_fair, rate
from .model import EMPTY, PartialLabeledBoard, is_latin_board, is_partial_latin_board
from .proof import Proof
from .search import SearchConfig, enumerate_solutions, fast_solutions
from .solver import Tag, classify, solve_puzzle


class ExhaustionRequired(RuntimeError):
    """Single-pass extraction needs a search that explored every branch."""


@dataclass(frozen=True)
class GeneratedPuzzle:
    puzzle: PartialLabeledBoard
    solution: PartialLabeledBoard
    proof: Proof
    fair: bool
    critical: bool
    rating: DifficultyRating

    @property
    def clue_count(self) -> int:
        return self.puzzle.clue_count


def describe(
    puzzle: PartialLabeledBoard,
    critical: bool | None = None,
    rating_config: RatingConfig | None = None,
) -> GeneratedPuzzle:
    """Solve, rate and (unless given) criticality-check a Latin puzzle."""
    solved = solve_puzzle(puzzle)
    if critical is None:
        critical = is_critical(puzzle)
    return GeneratedPuzzle(
        puzzle=puzzle,
        solution=solved.solution,
        proof=solved.proof,
        fair=not solved.proof.has_backtrack,
        critical=critical,
        rating=rate(solved.proof, puzzle, rating_config),
    )


def _removal_order(lb: PartialLabeledBoard, seed: int | None) -> list[int]:
    cells = list(lb.removable_clues())
    if seed is None:
        cells.reverse()
    else:
        random.Random(seed).shuffle(cells)
    return cells


def puzzles_from_latin_board(
    lb: PartialLabeledBoard,
    inscription: Iterable[tuple[int, int]] | None = None,
    seed: int | None = None,
    *,
    require_fair: bool = False,
    max_puzzles: int | None = None,
    exhaustive: bool = False,
    rating_config: RatingConfig | None = None,
) -> list[GeneratedPuzzle]:
    """Puzzles whose unique solution is ``lb``, found by recursive clue removal.

    Removal candidates are visited in a seeded random order (``seed=None``:
    descending cell id), and inscribed cells are never removed.  The working
    board is shared by reference.  By default a removal that keeps the puzzle
    unique is never undone, so the result is one descent with strictly
    decreasing clue counts ending in a critical puzzle.  With ``exhaustive``
    every removal is undone once its subtree is explored and boards already
    seen are skipped, which visits every puzzle reachable from ``lb``.
    With ``require_fair`` a removal is also rejected when propagation alone
    cannot solve the result.
    """
    if inscription is not None:
        lb = PartialLabeledBoard(lb.board, lb.multiset, lb.values, frozenset(inscription) | lb.inscription)
    if not is_latin_board(lb):
        raise ValueError("puzzles_from_latin_board needs a Latin board")
    order = _removal_order(lb, seed)
    work = list(lb.values)
    found: list[list] = []
    seen: set[tuple[int, ...]] = set()
    verdicts: dict[tuple[int, ...], bool] = {}

    def full() -> bool:
        return max_puzzles is not None and len(found) >= max_puzzles

    def accepted(key: tuple[int, ...]) -> bool:
        if key not in verdicts:
            plb = lb.with_values(key)
            ok = classify(plb).tag is Tag.UNIQUE
            if ok and require_fair:
                ok = certify_fair(plb).fair
            verdicts[key] = ok
        return verdicts[key]

    def recur() -> bool | None:
        # True when some single removal kept the board a puzzle, None when unsure
        any_ok = False
        for cell in order:
            if full():
                return None if not any_ok else True
            lab = work[cell]
            if lab == EMPTY:
                continue
            work[cell] = EMPTY
            key = tuple(work)
            if accepted(key):
                any_ok = True
                if key not in seen:
                    seen.add(key)
                    entry = [lb.with_values(key), None]
                    found.append(entry)
                    below = recur()
                    entry[1] = None if below is None or require_fair else not below
                if exhaustive:
                    work[cell] = lab
            else:
                work[cell] = lab
        return any_ok

    recur()
    return [describe(p, crit, rating_config) for p, crit in found]


def puzzles_from_pb(
    pb: PartialLabeledBoard,
    n: int | float | None,
    seed: int | None = None,
    *,
    quantity: int | None = None,
    require_fair: bool = False,
    rating_config: RatingConfig | None = None,
) -> list[GeneratedPuzzle]:
    """Find up to ``n`` Latin boards for ``pb`` and collect puzzles from each.

    ``n=None`` or ``math.inf`` means all boards; ``quantity`` stops once that
    many puzzles have been collected.
    """
    if n is not None and n != float("inf") and n < 1:
        raise ValueError("n must be a positive integer or infinity")
    if not is_partial_latin_board(pb):
        return []
    cfg = SearchConfig(
        limit=n,
        instantiation="ascending" if seed is None else "random",
        seed=seed or 0,
        record_proof=False,
    )
    boards = enumerate_solutions(pb, cfg).solutions
    rng = random.Random(seed)
    out: list[GeneratedPuzzle] = []
    for lb in boards:
        sub_seed = None if seed is None else rng.randrange(1 << 31)
        left = None if quantity is None else quantity - len(out)
        out += puzzles_from_latin_board(
            lb, seed=sub_seed, require_fair=require_fair, max_puzzles=left, rating_config=rating_config
        )
        if quantity is not None and len(out) >= quantity:
            break
    return out


def single_pass_generate(
    pb: PartialLabeledBoard,
    seed: int | None = None,
    *,
    max_nodes: int | None = None,
    rating_config: RatingConfig | None = None,
) -> list[GeneratedPuzzle]:
    """Puzzles read off one exhaustive, tagged search of ``pb``.

    Each label written by the search (decision or propagation) gets a unique
    serial tag.  A tag that occurs in exactly one solution's tag sequence
    marks the board as it stood right after that write as a puzzle.  Every
    candidate is re-checked with :func:`classify` before it is emitted.
    """
    if not is_partial_latin_board(pb):
        return []
    cfg = SearchConfig(
        instantiation="ascending" if seed is None else "random",
        seed=seed or 0,
        max_nodes=max_nodes,
    )
    result = enumerate_solutions(pb, cfg)
    if not result.complete:
        raise ExhaustionRequired("search was truncated; tag extraction needs every branch")
    sequences = []
    for proof in result.proofs:
        seq = [(s.serial, s.placement) for s in proof.steps if s.placement is not None]
        sequences.append(seq)
    tally = Counter(t for seq in sequences for t, _ in seq)
    seen: set[tuple[int, ...]] = set()
    out: list[GeneratedPuzzle] = []
    for sol, seq in zip(result.solutions, sequences):
        vals = list(pb.values)
        for tag, (cell, lab) in seq:
            vals[cell] = lab
            if tally[tag] != 1 or EMPTY not in vals:
                continue
            key = tuple(vals)
            if key in seen:
                continue
            seen.add(key)
            cand = pb.with_values(vals)
            verdict = classify(cand)
            if verdict.tag is Tag.UNIQUE and verdict.witnesses[0].values == sol.values:
                out.append(describe(cand, rating_config=rating_config))
    return out


def is_critical(p: GeneratedPuzzle | PartialLabeledBoard) -> bool:
    """Removing any single non-inscribed clue destroys uniqueness."""
    plb = p.puzzle if isinstance(p, GeneratedPuzzle) else p
    for cell in plb.removable_clues():
        if classify(plb.without_clue(cell)).tag is Tag.UNIQUE:
            return False
    return True


MINIMAL = "Minimal"
NOT_MINIMAL = "NotMinimal"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class MinimalityVerdict:
    status: str
    witness: PartialLabeledBoard | None = None


def _base_of(plb: PartialLabeledBoard) -> PartialLabeledBoard:
    return plb.restricted_to(())


def find_puzzle_with_clues(
    pb: PartialLabeledBoard,
    clues: int,
    solutions: list[PartialLabeledBoard] | None = None,
) -> PartialLabeledBoard | None:
    """A uniquely completable board with exactly ``clues`` clues (inscription included), or None.

    Exhaustive over clue positions: for each set of positions, the restrictions
    of all solutions are tallied and a restriction seen exactly once is a puzzle.
    """
    base = _base_of(pb)
    if solutions is None:
        solutions = fast_solutions(base)[0]
    ins = sorted(base.inscription_cells)
    free = [c for c in range(base.board.cell_count) if c not in base.inscription_cells]
    extra = clues - len(ins)
    if extra < 0 or extra > len(free):
        return None
    rows = [s.values for s in solutions]
    for subset in combinations(free, extra):
        tally = Counter(tuple(r[c] for c in subset) for r in rows)
        for key, cnt in tally.items():
            if cnt == 1:
                vals = list(base.values)
                for c, v in zip(subset, key):
                    vals[c] = v
                return base.with_values(vals)
    return None


def is_minimal(
    p: GeneratedPuzzle | PartialLabeledBoard,
    budget: int = 16,
    max_solutions: int = 200_000,
) -> MinimalityVerdict:
    """Whether no puzzle on the same board (and inscription) has fewer clues.

    Only boards with at most ``budget`` cells are decided; it suffices to look
    for a unique board with one clue fewer, since clues can always be added
    back from its solution.
    """
    plb = p.puzzle if isinstance(p, GeneratedPuzzle) else p
    if plb.board.cell_count > budget:
        return MinimalityVerdict(UNKNOWN)
    base = _base_of(plb)
    sols, _, complete = fast_solutions(base, limit=max_solutions + 1)
    if not complete or len(sols) > max_solutions:
        return MinimalityVerdict(UNKNOWN)
    witness = find_puzzle_with_clues(base, plb.clue_count - 1, sols)
    if witness is None:
        return MinimalityVerdict(MINIMAL)
    return MinimalityVerdict(NOT_MINIMAL, witness)
