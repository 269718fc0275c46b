"""Acceptance suite: one test (or a few) per criterion, at the stated sizes and tolerances.

Expected counts are frozen constants, each also recomputed by the brute-force
oracle in ``oracle.py``.  A per-criterion PASS/FAIL table is printed at the
end of the pytest run.
"""

from __future__ import annotations

import io
import random
import time
from collections import Counter
from itertools import combinations

import oracle
import pytest

from latinp import catalog
from latinp.cli import main as cli_main
from latinp.domains import BoardDomain, initial_domain, is_stronger, solution_space_size
from latinp.fairness import certify_fair, fairness_robustness_check
from latinp.formats import parse_board, parse_boards, serialize_board
from latinp.generator import (
    MINIMAL,
    find_puzzle_with_clues,
    is_critical,
    is_minimal,
    puzzles_from_latin_board,
    puzzles_from_pb,
    single_pass_generate,
)
from latinp.model import EMPTY, Board, LabelMultiset, PartialLabeledBoard, validate_board
from latinp.proof import BACKTRACK
from latinp.propagation import SHIPPED, Propagator, check_monotonic, propagate_fixpoint
from latinp.sampling import random_puzzle_like, small_boards
from latinp.search import SearchConfig, enumerate_solutions
from latinp.solver import Tag, classify

LATIN_COUNTS = {1: 1, 2: 2, 3: 12, 4: 576}
SHIDOKU_COUNT = 288


def _clue_set(plb: PartialLabeledBoard) -> frozenset[tuple[int, int]]:
    return frozenset((c, v) for c, v in enumerate(plb.values) if v != EMPTY)


def _cli(argv: list[str]) -> tuple[int, str]:
    out = io.StringIO()
    code = cli_main(argv, out=out)
    return code, out.getvalue()


# -- 1 ------------------------------------------------------------------------


@pytest.mark.criterion(1, "exact enumeration of Latin squares of order 1-4 vs oracle, < 10 s")
def test_latin_square_counts_match_oracle():
    elapsed = 0.0
    for n, expected in LATIN_COUNTS.items():
        board = catalog.latin_square(n)
        t0 = time.perf_counter()
        found = enumerate_solutions(board, SearchConfig(limit=float("inf"))).solutions
        elapsed += time.perf_counter() - t0
        got = sorted(s.values for s in found)
        assert len(got) == expected
        assert len(set(got)) == expected
        assert got == oracle.solutions(board)
    print(f"\ncriterion 1: counts {list(LATIN_COUNTS.values())}, enumeration time {elapsed:.2f} s")
    assert elapsed < 10.0


@pytest.mark.criterion(1, "exact enumeration of Latin squares of order 1-4 vs oracle, < 10 s")
def test_oracle_agrees_with_plain_assignment_filter():
    for n in (1, 2, 3):
        board = catalog.latin_square(n)
        assert oracle.solutions(board) == sorted(oracle.assignment_filter(board))


# -- 2 ------------------------------------------------------------------------


@pytest.mark.criterion(2, "Shidoku census of 288 grids vs oracle, < 5 s")
def test_shidoku_census():
    board = catalog.sudoku_boxes(2, 2)
    t0 = time.perf_counter()
    found = enumerate_solutions(board).solutions
    elapsed = time.perf_counter() - t0
    got = sorted(s.values for s in found)
    assert len(got) == SHIDOKU_COUNT
    assert got == oracle.solutions(board)
    print(f"\ncriterion 2: {len(got)} grids in {elapsed:.2f} s")
    assert elapsed < 5.0


# -- 3 ------------------------------------------------------------------------


@pytest.mark.criterion(3, "classify buckets and finite-N prefixes on 200 random PLBs")
def test_classify_and_limits_on_random_plbs():
    rng = random.Random(2024)
    boards = small_boards()
    agree = 0
    buckets = Counter()
    for _ in range(200):
        plb = random_puzzle_like(rng, boards, noise=0.15 if rng.random() < 0.4 else 0.0)
        truth = oracle.solutions(plb)
        verdict = classify(plb)
        expected = {0: Tag.NOT_COMPLETABLE, 1: Tag.UNIQUE}.get(len(truth), Tag.MULTIPLE)
        if plb.is_complete and len(truth) == 1:
            expected = Tag.ALREADY_LATIN
        agree += verdict.tag is expected
        buckets[oracle.bucket(len(truth))] += 1

        full = enumerate_solutions(plb, SearchConfig(record_proof=False)).solutions
        assert sorted(s.values for s in full) == truth
        for n in sorted({1, 2, 3, len(truth) + 1}):
            part = enumerate_solutions(plb, SearchConfig(limit=n, record_proof=False)).solutions
            assert len(part) == min(n, len(truth))
            assert [s.values for s in part] == [s.values for s in full[: len(part)]]
    print(f"\ncriterion 3: {agree}/200 verdicts agree; oracle buckets {dict(buckets)}")
    assert agree == 200
    assert all(buckets[b] > 0 for b in ("0", "1", "2+"))


# -- 4 ------------------------------------------------------------------------


@pytest.mark.criterion(4, "37 ternary cells give a solution space of exactly 3^37")
def test_ternary_solution_space():
    # 37 empty cells over the labels {2, 3, 4}; overlapping windows of three cover them all
    board = Board(37, tuple((i, i + 1, i + 2) for i in range(35)), "strip")
    assert validate_board(board, 3).ok
    plb = PartialLabeledBoard.empty(board, LabelMultiset.distinct("234"))
    d = initial_domain(plb)
    assert len(d.cells) == 37
    assert {frozenset(plb.multiset.display(l) for l in d.candidates(c)) for c in d.cells} == {frozenset("234")}
    assert solution_space_size(d) == 3**37 == 450283905890997363
    print(f"\ncriterion 4: solution space {solution_space_size(d)} = 3^37")


# -- 5 ------------------------------------------------------------------------


@pytest.mark.criterion(5, "propagator soundness on 10,000 domains each and solution preservation")
def test_propagators_never_weaken_a_domain():
    from latinp.sampling import random_domain

    rng = random.Random(5)
    boards = small_boards() + [catalog.sudoku_boxes(2, 3)]
    violations = 0
    for p in SHIPPED:
        plb = None
        for t in range(10_000):
            if t % 25 == 0:
                plb = random_puzzle_like(rng, boards, noise=0.1)
                while not plb.empty_cells:
                    plb = random_puzzle_like(rng, boards)
            d = random_domain(plb, rng)
            out = p.apply(plb, d).domain
            violations += not is_stronger(out, d)
    print(f"\ncriterion 5: {violations} soundness violations over 3 x 10,000 domains")
    assert violations == 0


@pytest.mark.criterion(5, "propagator soundness on 10,000 domains each and solution preservation")
def test_propagators_keep_every_solution_label():
    rng = random.Random(55)
    boards = small_boards()
    lost = 0
    checked = 0
    while checked < 400:
        plb = random_puzzle_like(rng, boards)
        sols = oracle.solutions(plb)
        if not sols or not plb.empty_cells:
            continue
        needed = {c: 0 for c in plb.empty_cells}
        for s in sols:
            for c in needed:
                needed[c] |= 1 << s[c]
        # a random certified domain: shrink but keep every solution label
        full = plb.multiset.full_mask
        d = BoardDomain(plb.empty_cells, tuple(needed[c] | (rng.randint(0, full)) for c in plb.empty_cells))
        outs = [p.apply(plb, d).domain for p in SHIPPED]
        outs.append(propagate_fixpoint(plb, d).domain)
        for out in outs:
            for c, m in zip(out.cells, out.masks):
                lost += bool(needed[c] & ~m)
        checked += 1
    print(f"\ncriterion 5: {lost} solution labels eliminated over {checked} oracle-known boards")
    assert lost == 0


# -- 6 ------------------------------------------------------------------------


def _even_breaker() -> Propagator:
    def fn(plb, d):
        masks = []
        for m in d.masks:
            if m and m.bit_count() % 2 == 0:
                m &= m - 1  # drop the lowest label
            masks.append(m)
        return BoardDomain(d.cells, tuple(masks))

    return Propagator.from_function("even_breaker", fn, monotonic=False)


@pytest.mark.criterion(6, "monotonicity: 1,000 trials per shipped propagator, planted defect caught")
def test_shipped_propagators_are_monotonic():
    for p in SHIPPED:
        report = check_monotonic(p, trials=1000, seed=6)
        print(f"\ncriterion 6: {p.name}: {len(report.counterexamples)} counterexamples in {report.trials} trials")
        assert report.ok


@pytest.mark.criterion(6, "monotonicity: 1,000 trials per shipped propagator, planted defect caught")
def test_planted_non_monotonic_propagator_is_caught():
    report = check_monotonic(_even_breaker(), trials=1000, seed=6)
    assert not report.ok
    ce = report.counterexamples[0]
    assert is_stronger(ce.smaller, ce.larger)
    assert not is_stronger(ce.smaller_out, ce.larger_out)
    assert ce.cells()


# -- 7 ------------------------------------------------------------------------


@pytest.mark.criterion(7, "fixpoint confluence: 100 PLBs x 10 schedules")
def test_fixpoint_confluence():
    rng = random.Random(7)
    boards = small_boards() + [catalog.sudoku_boxes(2, 3), catalog.latin_square(5)]
    same = 0
    for i in range(100):
        plb = random_puzzle_like(rng, boards, noise=0.1 if i % 3 == 0 else 0.0)
        ref = propagate_fixpoint(plb)
        for j in range(10):
            other = propagate_fixpoint(plb, rng=random.Random(1000 * i + j))
            if ref.wipeout and other.wipeout:
                same += 1
            else:
                same += (ref.wipeout == other.wipeout) and ref.domain == other.domain
    print(f"\ncriterion 7: {same}/1000 identical fixpoints")
    assert same == 1000


# -- 8 ------------------------------------------------------------------------


@pytest.mark.criterion(8, "50 --fair puzzles certify Fair, no backtrack, 100/100 robustness runs each")
def test_fair_generation_is_robust():
    puzzles = []
    for family, seed in (("shidoku", 11), ("sudoku:2x3", 12)):
        code, text = _cli(["generate", "--family", family, "--fair", "--count", "25", "--seed", str(seed)])
        assert code == 0
        puzzles += parse_boards(text)
    assert len(puzzles) == 50
    solved_runs = 0
    for p in puzzles:
        cert = certify_fair(p)
        assert cert.fair
        assert BACKTRACK not in cert.proof.actors()
        report = fairness_robustness_check(p, trials=100, seed=8)
        assert report.ok, report.failures[:1]
        solved_runs += report.solved
    print(f"\ncriterion 8: 50/50 Fair, {solved_runs}/5000 robustness runs solved")
    assert solved_runs == 5000


# -- 9 ------------------------------------------------------------------------


def _mixed_generation() -> list:
    sources = [
        (catalog.shidoku(), 1),
        (catalog.shidoku(LabelMultiset.from_counts({"1": 2, "2": 2})), 2),
        (catalog.shidoku(LabelMultiset.from_counts({"a": 1, "b": 1, "c": 2})), 3),
        (catalog.latin_square(4, LabelMultiset.from_counts({"x": 3, "y": 1})), 4),
        (catalog.sudoku_boxes(2, 3, LabelMultiset.from_counts({"1": 2, "2": 2, "3": 2})), 5),
    ]
    out = []
    for pb, seed in sources:
        out += puzzles_from_pb(pb, 20, seed, quantity=20)
    return out


@pytest.mark.criterion(9, "100 generated puzzles re-verify; critical flags hold exhaustively")
def test_generated_puzzles_reverify():
    puzzles = _mixed_generation()
    assert len(puzzles) == 100
    critical = 0
    for g in puzzles:
        verdict = classify(g.puzzle)
        assert verdict.tag is Tag.UNIQUE
        assert verdict.witnesses[0].values == g.solution.values
        if g.puzzle.board.cell_count <= 16:
            assert oracle.solutions(g.puzzle) == [g.solution.values]
        if g.critical:
            critical += 1
            for c in g.puzzle.removable_clues():
                assert classify(g.puzzle.without_clue(c)).tag is not Tag.UNIQUE
        assert g.critical == is_critical(g.puzzle)
    print(f"\ncriterion 9: 100/100 re-verified, {critical} flagged critical and confirmed")
    assert critical > 0


# -- 10 -----------------------------------------------------------------------


@pytest.mark.criterion(10, "Shidoku: unique 4-clue puzzles exist, no unique 3-clue puzzle, < 60 s")
def test_shidoku_minimality():
    t0 = time.perf_counter()
    board = catalog.shidoku()
    four = find_puzzle_with_clues(board, 4)
    assert four is not None and four.clue_count == 4
    verdict = is_minimal(four)
    assert verdict.status == MINIMAL
    assert find_puzzle_with_clues(board, 3) is None
    elapsed = time.perf_counter() - t0

    # independent scan over the oracle's 288 grids
    grids = oracle.solutions(board)
    assert oracle.solutions(four) == [next(g for g in grids if all(four.values[c] in (EMPTY, g[c]) for c in range(16)))]

    def unique_pattern_exists(m):
        for cells in combinations(range(16), m):
            tally = Counter(tuple(g[c] for c in cells) for g in grids)
            if 1 in tally.values():
                return True
        return False

    assert unique_pattern_exists(4)
    assert not unique_pattern_exists(3)
    print(f"\ncriterion 10: 4-clue puzzle certified Minimal, no 3-clue puzzle; {elapsed:.2f} s")
    assert elapsed < 60.0


# -- 11 -----------------------------------------------------------------------


@pytest.mark.criterion(11, "single-pass and Latin-board generation agree on the 2x2 board")
def test_cross_method_equivalence():
    board = catalog.latin_square(2)
    single = {_clue_set(g.puzzle) for g in single_pass_generate(board)}
    by_removal = set()
    for lb in enumerate_solutions(board).solutions:
        by_removal |= {_clue_set(g.puzzle) for g in puzzles_from_latin_board(lb)}
    assert single == by_removal
    assert len(single) == 6
    print(f"\ncriterion 11: both methods emit the same {len(single)} puzzles")


# -- 12 -----------------------------------------------------------------------


@pytest.mark.criterion(12, "inscription pairs kept in 20 generated puzzles; criticality skips them")
def test_inscription_integrity():
    rng = random.Random(12)
    base = catalog.shidoku(LabelMultiset.distinct("WORD"))
    grids = oracle.solutions(base)
    puzzles = []
    attempt = 0
    while len(puzzles) < 20:
        attempt += 1
        grid = rng.choice(grids)
        cells = rng.sample(range(16), rng.randint(1, 3))
        pb = catalog.inscripted(base, {c: grid[c] for c in cells})
        batch = puzzles_from_pb(pb, 1, seed=attempt)
        puzzles += batch[-2:]
    puzzles = puzzles[:20]
    for g in puzzles:
        ins = g.puzzle.inscription
        assert ins
        assert ins <= _clue_set(g.puzzle)
        free = [c for c in range(16) if g.puzzle.values[c] != EMPTY and c not in g.puzzle.inscription_cells]
        assert sorted(g.puzzle.removable_clues()) == free
        by_oracle = all(len(oracle.solutions(g.puzzle.without_clue(c))) != 1 for c in free)
        assert g.critical == by_oracle
    print(f"\ncriterion 12: 20/20 inscripted puzzles keep their inscription; critical flags match the oracle")


# -- 13 -----------------------------------------------------------------------


@pytest.mark.criterion(13, "seeded generation is byte-identical; 1,000 lossless round trips")
def test_generation_is_deterministic():
    argv = ["generate", "--family", "sudoku:2x3", "--count", "4", "--seed", "13", "--critical"]
    first = _cli(argv)
    second = _cli(argv)
    assert first[0] == 0
    assert first == second
    pb = catalog.shidoku(LabelMultiset.from_counts({"1": 2, "2": 2}))
    a = "".join(serialize_board(g.puzzle) for g in puzzles_from_pb(pb, 3, 99))
    b = "".join(serialize_board(g.puzzle) for g in puzzles_from_pb(pb, 3, 99))
    assert a == b


def _random_board(rng: random.Random) -> PartialLabeledBoard:
    choice = rng.randrange(6)
    if choice == 0:
        base = catalog.latin_square(rng.randint(1, 6))
    elif choice == 1:
        base = catalog.sudoku_boxes(rng.randint(1, 3), rng.randint(1, 3))
    elif choice == 2:
        base = catalog.sudoku(LabelMultiset.from_counts({"1": 3, "2": 3, "3": 3}))
    elif choice == 3:
        base = catalog.gerechte(4, "ABBB\nAABC\nADCC\nDDDC")
    elif choice == 4:
        base = catalog.extra_windows(catalog.latin_square(4), [(0, 5, 10, 15), (3, 6, 9, 12)])
    else:
        base = catalog.shidoku(LabelMultiset.from_counts({"alpha": 1, "beta": 2, "g:1": 1}))
    m = base.multiset.size
    vals = [rng.randrange(m) if rng.random() < 0.4 else EMPTY for _ in base.values]
    filled = [c for c, v in enumerate(vals) if v != EMPTY]
    ins = rng.sample(filled, min(len(filled), rng.randint(0, 3))) if rng.random() < 0.5 else []
    return PartialLabeledBoard(base.board, base.multiset, tuple(vals), frozenset((c, vals[c]) for c in ins))


@pytest.mark.criterion(13, "seeded generation is byte-identical; 1,000 lossless round trips")
def test_thousand_round_trips():
    rng = random.Random(13)
    lossless = 0
    for _ in range(1000):
        x = _random_board(rng)
        text = serialize_board(x)
        y = parse_board(text)
        lossless += y == x and serialize_board(y) == text
    print(f"\ncriterion 13: {lossless}/1000 lossless round trips")
    assert lossless == 1000
