from __future__ import annotations

import random

import oracle
import pytest

from latinp import catalog
from latinp.generator import puzzles_from_latin_board
from latinp.model import EMPTY
from latinp.sampling import random_puzzle_like, small_boards
from latinp.solver import NotAPuzzle, Tag, classify, solve_puzzle


BUCKET = {Tag.NOT_COMPLETABLE: "0", Tag.UNIQUE: "1", Tag.ALREADY_LATIN: "1", Tag.MULTIPLE: "2+"}


def _shidoku_lb():
    return catalog.shidoku().with_values(oracle.solutions(catalog.shidoku())[7])


def test_generated_puzzle_is_unique():
    p = puzzles_from_latin_board(_shidoku_lb(), seed=1)[-1].puzzle
    assert len(oracle.solutions(p)) == 1
    verdict = classify(p)
    assert verdict.tag is Tag.UNIQUE and verdict.is_puzzle
    assert verdict.witnesses[0].values == _shidoku_lb().values


def test_empty_shidoku_has_two_distinct_witnesses():
    verdict = classify(catalog.shidoku())
    assert verdict.tag is Tag.MULTIPLE and str(verdict.tag) == "MultipleSolutions"
    a, b = verdict.witnesses
    assert a.values != b.values


def test_overfull_row_is_not_a_plb():
    vals = [EMPTY] * 16
    vals[0] = vals[1] = 2
    assert classify(catalog.shidoku().with_values(vals)).tag is Tag.NOT_PLB


def test_plb_without_completion():
    vals = [EMPTY] * 16
    vals[0], vals[1], vals[14], vals[7] = 0, 1, 2, 2
    assert classify(catalog.shidoku().with_values(vals)).tag is Tag.NOT_COMPLETABLE


def test_node_budget_gives_indeterminate():
    verdict = classify(catalog.latin_square(7).with_values([0] + [EMPTY] * 48), max_nodes=1)
    assert verdict.tag in (Tag.INDETERMINATE, Tag.MULTIPLE)
    plb = catalog.sudoku().with_values([EMPTY] * 80 + [0])
    assert classify(plb, max_nodes=1).tag is not Tag.UNIQUE


def test_solve_returns_solution_and_clean_proof():
    gen = puzzles_from_latin_board(_shidoku_lb(), seed=4, require_fair=True)[-1]
    solved = solve_puzzle(gen.puzzle)
    assert solved.solution.values == _shidoku_lb().values
    assert not solved.proof.has_backtrack
    assert classify(solved.solution).tag is Tag.ALREADY_LATIN


def test_solved_board_returns_itself_with_empty_proof():
    lb = _shidoku_lb()
    solved = solve_puzzle(lb)
    assert solved.solution == lb and len(solved.proof) == 0


def test_multi_solution_input_raises():
    with pytest.raises(NotAPuzzle) as info:
        solve_puzzle(catalog.shidoku())
    assert info.value.classification.tag is Tag.MULTIPLE


def test_verdicts_match_the_oracle_on_random_boards():
    rng = random.Random(99)
    for _ in range(1000):
        plb = random_puzzle_like(rng, small_boards(), noise=0.08)
        b = plb.board
        if not oracle.within_counts(plb.values, b.asterisms, plb.multiset.counts):
            assert classify(plb).tag is Tag.NOT_PLB
            continue
        want = oracle.bucket(len(oracle.solutions(plb)))
        got = classify(plb).tag
        assert BUCKET[got] == want
