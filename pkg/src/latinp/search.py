"""Backtracking search for Latin boards completing a partial labeled board.

:func:`enumerate_solutions` is the instrumented engine: it interleaves
propagation with decisions, restores state from a trail, optionally records
nogoods, and keeps a proof per solution.  :func:`fast_solutions` runs the bare
kernel (compiled when available) and is what uniqueness checks use.
"""

from __future__ import annotations

import math
import random
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from . import kernel
from .domains import BoardDomain
from .model import PartialLabeledBoard, is_latin_board, is_partial_latin_board
from .proof import Proof
from .propagation import SHIPPED, Propagator, Work, run_fixpoint

BRANCHING = ("min_domain", "first_empty")
INSTANTIATION = ("ascending", "descending", "random")


@dataclass(frozen=True)
class SearchConfig:
    """Search knobs.  ``limit=None`` (or ``math.inf``) asks for every solution."""

    limit: int | float | None = None
    interleave_propagation: bool = True
    nogood_recording: bool = False
    branching: str = "min_domain"
    instantiation: str = "ascending"
    seed: int = 0
    props: tuple[Propagator, ...] = SHIPPED
    max_nodes: int | None = None
    time_limit: float | None = None
    nogood_store_size: int = 1024
    record_proof: bool = True
    check_restoration: bool = False

    def __post_init__(self) -> None:
        if self.limit is not None:
            if self.limit == math.inf:
                object.__setattr__(self, "limit", None)
            elif int(self.limit) != self.limit or self.limit < 1:
                raise ValueError("limit must be a positive integer or infinity")
            else:
                object.__setattr__(self, "limit", int(self.limit))
        if self.branching not in BRANCHING:
            raise ValueError(f"unknown branching heuristic {self.branching!r}")
        if self.instantiation not in INSTANTIATION:
            raise ValueError(f"unknown instantiation heuristic {self.instantiation!r}")


@dataclass
class SearchStats:
    nodes: int = 0
    backtracks: int = 0
    backjumps: int = 0
    propagations: int = 0
    wall_time: float = 0.0

    def merge(self, other: SearchStats) -> None:
        self.nodes += other.nodes
        self.backtracks += other.backtracks
        self.backjumps += other.backjumps
        self.propagations += other.propagations


@dataclass
class SearchResult:
    solutions: list[PartialLabeledBoard]
    stats: SearchStats
    proofs: list[Proof] = field(default_factory=list)
    complete: bool = True

    @property
    def status(self) -> str:
        return "Complete" if self.complete else "Incomplete"

    @property
    def proof(self) -> Proof:
        return self.proofs[0] if self.proofs else Proof()


class NogoodStore:
    """Bounded store of assignment fragments known to have no completion (FIFO eviction)."""

    def __init__(self, capacity: int = 1024) -> None:
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._order: deque[frozenset[tuple[int, int]]] = deque()
        self._index: dict[tuple[int, int], list[frozenset[tuple[int, int]]]] = {}

    def __len__(self) -> int:
        return len(self._order)

    def record(self, fragment: Iterable[tuple[int, int]]) -> None:
        ng = frozenset(fragment)
        if not ng:
            return
        if len(self._order) >= self.capacity:
            old = self._order.popleft()
            for p in old:
                bucket = self._index[p]
                bucket.remove(old)
                if not bucket:
                    del self._index[p]
        self._order.append(ng)
        for p in ng:
            self._index.setdefault(p, []).append(ng)

    def consult(self, fragment: Iterable[tuple[int, int]]) -> bool:
        """True iff ``fragment`` extends (contains) some recorded nogood."""
        current = fragment if isinstance(fragment, (set, frozenset)) else frozenset(fragment)
        for p in current:
            for ng in self._index.get(p, ()):
                if ng <= current:
                    return True
        return False


def _order_labels(mask: int, cfg: SearchConfig, rng: random.Random) -> list[int]:
    labels = []
    while mask:
        low = mask & -mask
        labels.append(low.bit_length() - 1)
        mask ^= low
    if cfg.instantiation == "descending":
        labels.reverse()
    elif cfg.instantiation == "random":
        rng.shuffle(labels)
    return labels


def _pick_cell(cells: Iterable[int], masks: Sequence[int], branching: str) -> int:
    best, best_n = -1, 1 << 30
    for c in cells:
        n = masks[c].bit_count()
        if n > 1:
            if branching == "first_empty":
                return c
            if n < best_n:
                best, best_n = c, n
    return best


def choose_branch(
    d: BoardDomain, cfg: SearchConfig = SearchConfig(), rng: random.Random | None = None
) -> tuple[int, list[int]]:
    """Cell to branch on and the order to try its labels in.

    Default: smallest domain, ties to the lowest cell id; labels ascending.
    """
    masks = dict(zip(d.cells, d.masks))
    cell = _pick_cell(sorted(masks), masks, cfg.branching)
    if cell < 0:
        raise ValueError("every cell domain is already a singleton")
    return cell, _order_labels(masks[cell], cfg, rng or random.Random(cfg.seed))


class _Stop(Exception):
    pass


class _Run:
    def __init__(self, plb: PartialLabeledBoard, cfg: SearchConfig) -> None:
        self.plb = plb
        self.cfg = cfg
        self.work = Work(plb, record=cfg.record_proof)
        self.free = self.work.empty_cells()
        self.rng = random.Random(cfg.seed)
        self.stats = SearchStats()
        self.solutions: list[PartialLabeledBoard] = []
        self.proofs: list[Proof] = []
        self.nogoods = NogoodStore(cfg.nogood_store_size) if cfg.nogood_recording else None
        self.complete = True
        self.t0 = time.perf_counter()

    def propagate(self, dirty: Iterable[int] | None, since: int) -> bool:
        w = self.work
        if not self.cfg.interleave_propagation:
            return True
        self.stats.propagations += 1
        if not run_fixpoint(w, self.cfg.props, dirty):
            return False
        placed = [s.placement[0] for s in w.steps[since:] if s.placement is not None]
        if not w.record:
            placed = self.free
        return w.plb_ok(placed)

    def root(self) -> bool:
        return self.propagate(None, 0)

    def assignment(self) -> frozenset[tuple[int, int]]:
        masks = self.work.masks
        return frozenset(
            (c, masks[c].bit_length() - 1) for c in self.free if masks[c] and masks[c] & (masks[c] - 1) == 0
        )

    def step_into(self, cell: int, lab: int) -> bool:
        w = self.work
        since = len(w.steps)
        w.decide(cell, lab)
        if not w.plb_ok([cell]):
            return False
        return self.propagate(w.cell_asterisms[cell], since)

    def dfs(self, decisions: tuple[tuple[int, int], ...]) -> None:
        cfg, w, stats = self.cfg, self.work, self.stats
        if cfg.max_nodes is not None and stats.nodes >= cfg.max_nodes:
            self.complete = False
            raise _Stop
        if cfg.time_limit is not None and time.perf_counter() - self.t0 > cfg.time_limit:
            self.complete = False
            raise _Stop
        stats.nodes += 1
        cell = _pick_cell(self.free, w.masks, cfg.branching)
        if cell < 0:
            cand = self.plb.with_values(w.values())
            if is_latin_board(cand):
                self.solutions.append(cand)
                if w.record:
                    w.flush()
                    self.proofs.append(Proof(tuple(w.steps)))
                if cfg.limit is not None and len(self.solutions) >= cfg.limit:
                    raise _Stop
            return
        for lab in _order_labels(w.masks[cell], cfg, self.rng):
            frag = decisions + ((cell, lab),)
            if self.nogoods is not None and self.nogoods.consult(self.assignment() | {(cell, lab)}):
                stats.backjumps += 1
                continue
            snap = tuple(w.masks) if cfg.check_restoration else None
            mark = w.mark()
            before = len(self.solutions)
            if self.step_into(cell, lab):
                self.dfs(frag)
            w.undo(mark)
            stats.backtracks += 1
            if snap is not None and tuple(w.masks) != snap:
                raise RuntimeError(f"state restoration failed after undoing {cell}={lab}")
            if self.nogoods is not None and len(self.solutions) == before:
                self.nogoods.record(frag)

    def run(self, root_decision: tuple[int, int] | None = None) -> SearchResult:
        try:
            if self.root():
                if root_decision is None:
                    self.dfs(())
                elif self.step_into(*root_decision):
                    self.dfs((root_decision,))
        except _Stop:
            pass
        self.stats.wall_time = time.perf_counter() - self.t0
        return SearchResult(self.solutions, self.stats, self.proofs, self.complete)


def _subtree(plb: PartialLabeledBoard, cfg: SearchConfig, decision: tuple[int, int]) -> SearchResult:
    return _Run(plb, cfg).run(decision)


def enumerate_solutions(
    plb: PartialLabeledBoard, cfg: SearchConfig = SearchConfig(), *, jobs: int = 1
) -> SearchResult:
    """All (or ``cfg.limit``) Latin boards completing ``plb``, in a deterministic order.

    A board that is not a partial Latin board has no solutions; a board that
    already is a Latin board is its own single solution.  With ``jobs > 1``
    the root branch is split across worker processes and merged in branch
    order, which gives the same list as the sequential run (with random
    instantiation each worker reseeds, so only the set is the same).
    """
    t0 = time.perf_counter()
    if not is_partial_latin_board(plb):
        return SearchResult([], SearchStats())
    if is_latin_board(plb):
        return SearchResult([plb], SearchStats(), [Proof()])
    if plb.is_complete:
        return SearchResult([], SearchStats())
    run = _Run(plb, cfg)
    if jobs <= 1:
        return run.run()

    try:
        ok = run.root()
    except _Stop:
        ok = False
    if not ok:
        return run.run()
    w = run.work
    cell = _pick_cell(run.free, w.masks, cfg.branching)
    if cell < 0:
        return run.run()
    labels = _order_labels(w.masks[cell], cfg, random.Random(cfg.seed))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_subtree, [plb] * len(labels), [cfg] * len(labels), [(cell, l) for l in labels]))
    out = SearchResult([], SearchStats())
    for part in parts:
        out.solutions.extend(part.solutions)
        out.proofs.extend(part.proofs)
        out.stats.merge(part.stats)
        out.complete = out.complete and part.complete
    if cfg.limit is not None and len(out.solutions) >= cfg.limit:
        out.solutions = out.solutions[: cfg.limit]
        out.proofs = out.proofs[: cfg.limit]
        out.complete = True
    out.stats.wall_time = time.perf_counter() - t0
    return out


def fast_solutions(
    plb: PartialLabeledBoard, limit: int | None = None, max_nodes: int | None = None
) -> tuple[list[PartialLabeledBoard], int, bool]:
    """Kernel-backed enumeration without proofs.

    Returns ``(solutions, nodes, complete)``; ``complete`` is False when
    ``max_nodes`` cut the search short.
    """
    if not is_partial_latin_board(plb):
        return [], 0, True
    if plb.is_complete:
        return ([plb] if is_latin_board(plb) else []), 0, True
    b = plb.board
    sols, nodes, complete = kernel.search(
        b.cell_count,
        b.asterisms,
        b.cell_asterisms,
        plb.multiset.counts,
        plb.values,
        limit or -1,
        max_nodes or 0,
    )
    return [plb.with_values(s) for s in sols], nodes, complete


def with_limit(cfg: SearchConfig, limit: int | None) -> SearchConfig:
    return replace(cfg, limit=limit)
