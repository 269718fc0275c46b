"""Fairness certification and proof-based difficulty rating.

A puzzle is certified fair when a set of monotonic propagators alone takes it
to its solution: any other sound partial reasoning can then be finished by the
same set.  Failing to certify does not mean the puzzle is unfair.
"""

from __future__ import annotations

import configparser
import os
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .model import PartialLabeledBoard, is_latin_board
from .proof import BACKTRACK, Proof, replay
from .propagation import REGISTRY, SHIPPED, Propagator, Work, run_fixpoint

FAIR = "Fair"
NOT_CERTIFIED = "NotCertified"

BANDS = ("very easy", "easy", "medium", "difficult", "very difficult")
UNFAIR = "unfair"
CONFIG_ENV = "LATINP_CONFIG"


@dataclass(frozen=True)
class Certificate:
    status: str
    proof: Proof = field(default_factory=Proof)
    solution: PartialLabeledBoard | None = None

    @property
    def fair(self) -> bool:
        return self.status == FAIR


def _require_monotonic(props: Sequence[Propagator]) -> None:
    bad = [p.name for p in props if not p.monotonic]
    if bad:
        raise ValueError(f"fairness needs monotonic propagators; not monotonic: {', '.join(bad)}")


def certify_fair(puzzle: PartialLabeledBoard, props: Sequence[Propagator] = SHIPPED) -> Certificate:
    """``Fair`` with its propagation-only proof, or ``NotCertified``."""
    _require_monotonic(props)
    if is_latin_board(puzzle):
        return Certificate(FAIR, Proof(), puzzle)
    work = Work(puzzle)
    if not run_fixpoint(work, props) or not work.is_solved():
        return Certificate(NOT_CERTIFIED, Proof(tuple(work.steps)))
    sol = puzzle.with_values(work.values())
    if not is_latin_board(sol):
        return Certificate(NOT_CERTIFIED, Proof(tuple(work.steps)))
    return Certificate(FAIR, Proof(tuple(work.steps)), sol)


@dataclass(frozen=True)
class RobustnessFailure:
    trial: int
    schedule: tuple[tuple[str, int], ...]
    reason: str


@dataclass(frozen=True)
class RobustnessReport:
    trials: int
    solved: int
    failures: tuple[RobustnessFailure, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failures


def fairness_robustness_check(
    puzzle: PartialLabeledBoard,
    props: Sequence[Propagator] = SHIPPED,
    trials: int = 100,
    seed: int = 0,
    prefix_props: Sequence[Propagator] | None = None,
) -> RobustnessReport:
    """Run random partial attrition sequences, then finish with ``props``; every run must solve.

    Prefix steps apply one propagator to one asterism, drawn at random from
    ``prefix_props`` (default: ``props`` plus the shipped set).
    """
    cert = certify_fair(puzzle, props)
    if not cert.fair:
        raise ValueError("puzzle is not certified fair under this propagator set")
    target = cert.solution.values if cert.solution is not None else puzzle.values
    pool = list(prefix_props) if prefix_props is not None else list(props)
    if prefix_props is None:
        pool += [p for p in SHIPPED if p not in pool]
    rng = random.Random(seed)
    n_ast = len(puzzle.board.asterisms)
    failures = []
    solved = 0
    for t in range(trials):
        work = Work(puzzle, record=False)
        schedule = []
        for _ in range(rng.randint(0, 2 * n_ast)):
            p = rng.choice(pool)
            a = rng.randrange(n_ast)
            schedule.append((p.name, a))
            p.sweep(work, [a])
            if work.wiped:
                break
        reason = ""
        if work.wiped:
            reason = "prefix wiped out a domain"
        else:
            work.take_changed()
            run_fixpoint(work, props, rng=rng)
            if work.wiped:
                reason = "fixpoint wiped out a domain"
            elif not work.is_solved():
                reason = "fixpoint stalled before the solution"
            elif work.values() != target:
                reason = "fixpoint reached a different board"
        if reason:
            failures.append(RobustnessFailure(t, tuple(schedule), reason))
        else:
            solved += 1
    return RobustnessReport(trials, solved, tuple(failures))


# -- rating ------------------------------------------------------------------


@dataclass(frozen=True)
class RatingConfig:
    weights: Mapping[str, int] = field(default_factory=lambda: {p.name: p.weight for p in SHIPPED})
    # upper bounds (exclusive) for every band but the last
    thresholds: tuple[Fraction, ...] = (
        Fraction("1.05"),
        Fraction("1.35"),
        Fraction("1.80"),
        Fraction("2.50"),
    )

    def weight(self, actor: str) -> int:
        if actor in self.weights:
            return int(self.weights[actor])
        if actor in REGISTRY:
            return REGISTRY[actor].weight
        raise ValueError(f"no weight configured for propagator {actor!r}")

    def band(self, score: Fraction) -> str:
        for name, bound in zip(BANDS, self.thresholds):
            if score < bound:
                return name
        return BANDS[-1]


def load_rating_config(path: str | os.PathLike[str] | None = None) -> RatingConfig:
    """Read an INI file with ``[weights]`` and ``[bands]`` sections.

    ``path`` defaults to ``$LATINP_CONFIG``; without either the defaults apply.
    Band entries give the exclusive upper score bound of each band except
    ``very difficult``.
    """
    path = path or os.environ.get(CONFIG_ENV)
    default = RatingConfig()
    if not path:
        return default
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    weights = dict(default.weights)
    if parser.has_section("weights"):
        for key, value in parser.items("weights"):
            weights[key] = int(value)
    thresholds = list(default.thresholds)
    if parser.has_section("bands"):
        for key, value in parser.items("bands"):
            name = key.replace("_", " ")
            if name not in BANDS[:-1]:
                raise ValueError(f"unknown or unbounded band {key!r}")
            thresholds[BANDS.index(name)] = Fraction(value)
    if any(a >= b for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("band thresholds must be increasing")
    return RatingConfig(weights, tuple(thresholds))


@dataclass(frozen=True)
class DifficultyRating:
    score: Fraction
    band: str
    step_histogram: Mapping[str, int]

    def __str__(self) -> str:
        hist = " ".join(f"{k}={v}" for k, v in sorted(self.step_histogram.items()))
        return f"score={float(self.score):.4f} band={self.band} {hist}".rstrip()


def rate(proof: Proof, puzzle: PartialLabeledBoard, config: RatingConfig | None = None) -> DifficultyRating:
    """Weighted count of propagator steps per initially empty cell; any search decision makes it unfair."""
    config = config or RatingConfig()
    replay(proof, puzzle)
    hist = Counter(s.actor for s in proof.steps)
    total = sum(config.weight(s.actor) for s in proof.steps if s.actor != BACKTRACK)
    score = Fraction(total, max(1, len(puzzle.empty_cells)))
    band = UNFAIR if hist.get(BACKTRACK) else config.band(score)
    return DifficultyRating(score, band, dict(sorted(hist.items())))
