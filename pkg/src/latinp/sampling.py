"""Random boards, puzzles and domains for property checks."""

from __future__ import annotations

import random
from typing import Callable

from . import catalog
from .domains import BoardDomain
from .model import EMPTY, LabelMultiset, PartialLabeledBoard, is_partial_latin_board


def small_boards() -> list[PartialLabeledBoard]:
    """Empty boards with at most 16 cells, including repeated-label multisets."""
    return [
        catalog.latin_square(2),
        catalog.latin_square(3),
        catalog.latin_square(4),
        catalog.shidoku(),
        catalog.latin_square(3, LabelMultiset.from_counts({"1": 2, "2": 1})),
        catalog.latin_square(4, LabelMultiset.from_counts({"1": 2, "2": 2})),
        catalog.shidoku(LabelMultiset.from_counts({"1": 2, "2": 2})),
        catalog.shidoku(LabelMultiset.from_counts({"1": 1, "2": 3})),
    ]


def random_solution(plb: PartialLabeledBoard, rng: random.Random) -> PartialLabeledBoard | None:
    from .search import SearchConfig, enumerate_solutions

    cfg = SearchConfig(limit=1, instantiation="random", seed=rng.randrange(1 << 30), record_proof=False)
    sols = enumerate_solutions(plb, cfg).solutions
    return sols[0] if sols else None


def random_puzzle_like(
    rng: random.Random,
    boards: list[PartialLabeledBoard] | None = None,
    keep: float | None = None,
    noise: float = 0.0,
) -> PartialLabeledBoard:
    """A random PLB: a random solution thinned to a fraction ``keep`` of its labels.

    With ``noise`` some empty cells get random labels as long as the board
    stays a PLB, which makes non-completable boards likely.
    """
    boards = boards or small_boards()
    base = rng.choice(boards)
    sol = random_solution(base, rng)
    assert sol is not None
    p = rng.random() if keep is None else keep
    vals = [v if rng.random() < p else EMPTY for v in sol.values]
    plb = sol.with_values(vals)
    if noise:
        m = plb.multiset.size
        for c in range(len(vals)):
            if vals[c] == EMPTY and rng.random() < noise:
                vals[c] = rng.randrange(m)
                cand = plb.with_values(vals)
                if is_partial_latin_board(cand):
                    plb = cand
                else:
                    vals[c] = EMPTY
    return plb


def random_domain(plb: PartialLabeledBoard, rng: random.Random, p_empty: float = 0.02) -> BoardDomain:
    full = plb.multiset.full_mask
    cells = plb.empty_cells
    masks = []
    for _ in cells:
        if rng.random() < p_empty:
            masks.append(0)
        else:
            m = rng.randint(1, full)
            masks.append(m | full if rng.random() < 0.3 else m)
    return BoardDomain(cells, tuple(masks))


def random_subdomain(d: BoardDomain, rng: random.Random, p_drop: float = 0.3) -> BoardDomain:
    out = []
    for m in d.masks:
        keep = m
        bit = 1
        while bit <= m:
            if m & bit and rng.random() < p_drop:
                keep &= ~bit
            bit <<= 1
        out.append(keep)
    return BoardDomain(d.cells, tuple(out))


BoardFactory = Callable[[random.Random], PartialLabeledBoard]
