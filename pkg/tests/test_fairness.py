from __future__ import annotations

import random
from fractions import Fraction

import oracle
import pytest

from latinp import catalog
from latinp.domains import BoardDomain
from latinp.fairness import (
    FAIR,
    NOT_CERTIFIED,
    RatingConfig,
    certify_fair,
    fairness_robustness_check,
    load_rating_config,
    rate,
)
from latinp.generator import puzzles_from_latin_board
from latinp.model import EMPTY, Board, LabelMultiset, PartialLabeledBoard
from latinp.proof import BACKTRACK, Proof, ProofStep, ReplayMismatch
from latinp.propagation import SHIPPED, Propagator, Work, run_fixpoint
from latinp.solver import Tag, classify, solve_puzzle

# a unique 28-clue Sudoku on which the shipped propagators stall; found by greedy
# clue removal (seed 1) from the first grid the kernel enumerates
STALLS = (
    0, 1, -1, 3, -1, -1, 6, -1, 8, -1, -1, -1, 6, 7, 8, 0, -1, 2, -1, -1, -1, -1, -1, -1, -1, -1, 5,
    -1, -1, -1, -1, -1, 3, -1, -1, -1, -1, 6, -1, -1, -1, -1, -1, 5, -1, 5, 8, -1, 4, 2, -1, 1, -1, 6,
    -1, 0, -1, 1, -1, 4, 8, -1, 7, 4, -1, -1, -1, -1, -1, -1, -1, -1, 8, -1, -1, 2, -1, -1, -1, -1, -1,
)


def _grids():
    return oracle.solutions(catalog.shidoku())


def _fair_puzzles(count):
    out = []
    grids = _grids()
    for i in range(count):
        lb = catalog.shidoku().with_values(grids[(i * 37) % len(grids)])
        out.append(puzzles_from_latin_board(lb, seed=i, require_fair=True)[-1].puzzle)
    return out


def _line(values):
    board = Board(3, ((0, 1, 2),), "line")
    return PartialLabeledBoard(board, LabelMultiset.range(3), tuple(values))


def test_fair_puzzle_certifies_with_a_clean_proof():
    p = _fair_puzzles(1)[0]
    cert = certify_fair(p)
    assert cert.status == FAIR and cert.fair
    assert not cert.proof.has_backtrack
    assert cert.solution.values == solve_puzzle(p).solution.values


def test_stalling_puzzle_is_not_certified():
    p = catalog.sudoku().with_values(STALLS)
    assert classify(p).tag is Tag.UNIQUE
    cert = certify_fair(p)
    assert cert.status == NOT_CERTIFIED and cert.solution is None
    assert solve_puzzle(p).proof.has_backtrack


def test_complete_board_is_fair_with_empty_proof():
    lb = catalog.shidoku().with_values(_grids()[0])
    cert = certify_fair(lb)
    assert cert.fair and len(cert.proof) == 0


def test_non_monotonic_sets_are_rejected():
    loose = Propagator.from_function("identity", lambda plb, d: d)
    with pytest.raises(ValueError):
        certify_fair(_fair_puzzles(1)[0], SHIPPED + (loose,))


def test_robustness_on_a_fair_puzzle():
    report = fairness_robustness_check(_fair_puzzles(1)[0], trials=100, seed=2)
    assert report.ok and report.solved == 100


def test_robustness_with_no_trials_passes():
    report = fairness_robustness_check(_fair_puzzles(1)[0], trials=0)
    assert report.ok and report.trials == 0 and report.solved == 0


def test_planted_defect_is_reported_with_its_schedule():
    p = _fair_puzzles(1)[0]
    truth = solve_puzzle(p).solution.values

    def lie(plb, d):
        # claims monotonicity but removes the true label wherever a choice is left
        return BoardDomain(d.cells, tuple(m & ~(1 << truth[c]) if m & (m - 1) else m for c, m in zip(d.cells, d.masks)))

    bad = Propagator.from_function("liar", lie, monotonic=True)
    report = fairness_robustness_check(p, trials=20, seed=1, prefix_props=[bad])
    assert not report.ok
    fail = report.failures[0]
    assert fail.schedule and all(name == "liar" for name, _ in fail.schedule)
    assert fail.reason


def test_fair_verdict_survives_random_schedules():
    for p in _fair_puzzles(50):
        target = certify_fair(p).solution.values
        for s in range(10):
            work = Work(p, record=False)
            assert run_fixpoint(work, SHIPPED, rng=random.Random(s))
            assert work.is_solved() and work.values() == target


def test_forced_chain_rates_one():
    plb = _line([0, 1, EMPTY])
    proof = Proof((ProofStep(1, "count_saturation", (2, 2), ((2, 0), (2, 1))),))
    r = rate(proof, plb)
    assert r.score == 1 and r.band == "very easy"
    assert r.step_histogram == {"count_saturation": 1}


def test_empty_proof_rates_zero():
    r = rate(Proof(), _line([0, 1, 2]))
    assert r.score == 0 and r.band == "very easy"


def test_backtrack_is_unfair():
    plb = _line([0, EMPTY, EMPTY])
    proof = Proof(
        (
            ProofStep(1, BACKTRACK, (1, 1), ((1, 0),)),
            ProofStep(2, "count_saturation", (2, 2), ((2, 0), (2, 1))),
        )
    )
    r = rate(proof, plb)
    assert r.band == "unfair" and r.score == Fraction(1, 2)


def test_bands_follow_thresholds():
    cfg = RatingConfig()
    assert [cfg.band(Fraction(x)) for x in ("1.04", "1.05", "1.34", "1.79", "2.49", "2.5", "9")] == [
        "very easy",
        "easy",
        "easy",
        "medium",
        "difficult",
        "very difficult",
        "very difficult",
    ]


def test_wrong_proof_fails_replay():
    plb = _line([0, 1, EMPTY])
    with pytest.raises(ReplayMismatch):
        rate(Proof((ProofStep(1, "count_saturation", (2, 1), ()),)), plb)
    with pytest.raises(ReplayMismatch):
        rate(Proof(), plb)


def test_rating_is_repeatable():
    p = _fair_puzzles(1)[0]
    proof = solve_puzzle(p).proof
    assert rate(proof, p) == rate(proof, p)


def test_config_file_and_environment(tmp_path, monkeypatch):
    path = tmp_path / "rating.ini"
    path.write_text("[weights]\ncount_saturation = 3\n\n[bands]\nvery_easy = 2\neasy = 3.5\nmedium = 4\ndifficult = 5\n")
    cfg = load_rating_config(path)
    assert cfg.weight("count_saturation") == 3 and cfg.weight("intersection") == 4
    plb = _line([0, 1, EMPTY])
    proof = Proof((ProofStep(1, "count_saturation", (2, 2), ((2, 0), (2, 1))),))
    assert rate(proof, plb, cfg).score == 3 and rate(proof, plb, cfg).band == "easy"
    monkeypatch.setenv("LATINP_CONFIG", str(path))
    assert load_rating_config() == cfg
    monkeypatch.delenv("LATINP_CONFIG")
    assert load_rating_config() == RatingConfig()


def test_bad_config_is_rejected(tmp_path):
    path = tmp_path / "rating.ini"
    path.write_text("[bands]\neasy = 1.0\n")
    with pytest.raises(ValueError):
        load_rating_config(path)
    path.write_text("[bands]\nvery_difficult = 9\n")
    with pytest.raises(ValueError):
        load_rating_config(path)
