"""Attrition propagators and the fixpoint engine.

Every shipped propagator is built from per-(asterism, label) rules of the form
``D(x) := D(x) & K(D)(x)`` where ``K`` only ever shrinks as ``D`` shrinks, so
one application (and any composition of applications) is monotonic.  Empty
cell domains count as "forced to any label"; that keeps the rules monotonic
on wiped-out domains as well.

The engine works on a mutable :class:`Work` state with a trail, so the search
module can push/pop it cheaply.  Proof steps are emitted whenever a label is
written (a cell domain becomes a singleton); eliminations made since the
previous write are attached to that step.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .domains import BoardDomain, bits, is_single, single_label
from .model import EMPTY, PartialLabeledBoard
from .proof import BACKTRACK, Proof, ProofStep

COUNT_SATURATION = "count_saturation"
REQUIRED_COUNT = "required_count"
INTERSECTION = "intersection"


class Work:
    """Mutable solving state: one candidate mask per cell (clues are fixed singletons)."""

    def __init__(
        self,
        plb: PartialLabeledBoard,
        domain: BoardDomain | None = None,
        *,
        record: bool = True,
        serial_start: int = 1,
    ) -> None:
        board = plb.board
        ms = plb.multiset
        self.plb = plb
        self.asterisms = board.asterisms
        self.cell_asterisms = board.cell_asterisms
        self.counts = ms.counts
        self.nlabels = ms.size
        self.full = ms.full_mask
        vals = plb.values
        self.fixed = [v != EMPTY for v in vals]
        self.masks = [self.full if v == EMPTY else 1 << v for v in vals]
        if domain is not None:
            for c, m in zip(domain.cells, domain.masks):
                if self.fixed[c]:
                    raise ValueError(f"cell {c} is a clue, not an empty cell")
                self.masks[c] = m
        self.free_cells = [tuple(c for c in a if not self.fixed[c]) for a in self.asterisms]
        fixed_count = []
        for a in self.asterisms:
            row = [0] * self.nlabels
            for c in a:
                if vals[c] != EMPTY:
                    row[vals[c]] += 1
            fixed_count.append(row)
        self.fixed_count = fixed_count
        self._pairs: list[list[tuple[int, int, tuple[int, ...]]]] | None = None

        self.record = record
        self.trail: list[tuple[int, int]] = []
        self.steps: list[ProofStep] = []
        self.elim_log: list[tuple[int, int, str]] = []
        self.serial = serial_start
        self.pend_elims: list[tuple[int, int]] = []
        self.pend_actor = ""
        self.pend_weight = -1
        self.changed: set[int] = set()
        self.wiped = any(m == 0 for m in self.masks)
        self.halt_on_wipe = True

    # -- state access -------------------------------------------------------

    @property
    def halted(self) -> bool:
        return self.wiped and self.halt_on_wipe

    def empty_cells(self) -> tuple[int, ...]:
        return tuple(c for c, f in enumerate(self.fixed) if not f)

    def domain(self) -> BoardDomain:
        cells = self.empty_cells()
        return BoardDomain(cells, tuple(self.masks[c] for c in cells))

    def is_solved(self) -> bool:
        return all(m & (m - 1) == 0 and m for m in self.masks)

    def values(self) -> tuple[int, ...]:
        return tuple(single_label(m) if is_single(m) else EMPTY for m in self.masks)

    def pairs_from(self, a: int) -> list[tuple[int, int, tuple[int, ...]]]:
        """(b, shared-cell bitset, free cells of b outside a) for each asterism b overlapping a."""
        if self._pairs is None:
            pairs: list[list[tuple[int, int, tuple[int, ...]]]] = [[] for _ in self.asterisms]
            for i, j, common in self.plb.board.overlapping_pairs:
                cbits = 0
                for c in common:
                    cbits |= 1 << c
                cs = set(common)
                outside = tuple(c for c in self.free_cells[j] if c not in cs)
                pairs[i].append((j, cbits, outside))
            self._pairs = pairs
        return self._pairs[a]

    # -- mutation -----------------------------------------------------------

    def restrict(self, cell: int, new: int, actor: str, weight: int) -> None:
        old = self.masks[cell]
        if new == old:
            return
        self.trail.append((cell, old))
        self.masks[cell] = new
        self.changed.add(cell)
        if self.record:
            for lab in bits(old & ~new):
                self.pend_elims.append((cell, lab))
                self.elim_log.append((cell, lab, actor))
            if weight > self.pend_weight:
                self.pend_actor, self.pend_weight = actor, weight
        if new == 0:
            self.wiped = True
        elif new & (new - 1) == 0 and self.record:
            self.steps.append(
                ProofStep(self.serial, self.pend_actor, (cell, single_label(new)), tuple(self.pend_elims))
            )
            self.serial += 1
            self.pend_elims = []
            self.pend_weight = -1

    def flush(self) -> None:
        """Emit pending eliminations that did not end in a written label."""
        if self.record and self.pend_elims:
            self.steps.append(ProofStep(self.serial, self.pend_actor, None, tuple(self.pend_elims)))
            self.serial += 1
        self.pend_elims = []
        self.pend_weight = -1

    def decide(self, cell: int, label: int) -> None:
        """Write ``label`` on ``cell`` as a search decision."""
        self.flush()
        old = self.masks[cell]
        new = 1 << label
        self.trail.append((cell, old))
        self.masks[cell] = new
        self.changed.add(cell)
        if not old & new:
            self.wiped = True
        if self.record:
            self.steps.append(ProofStep(self.serial, BACKTRACK, (cell, label)))
            self.serial += 1

    def mark(self) -> tuple[int, int, int]:
        self.flush()
        return (len(self.trail), len(self.steps), len(self.elim_log))

    def undo(self, mark: tuple[int, int, int]) -> None:
        t, s, e = mark
        trail, masks = self.trail, self.masks
        while len(trail) > t:
            cell, old = trail.pop()
            masks[cell] = old
        del self.steps[s:]
        del self.elim_log[e:]
        self.pend_elims = []
        self.pend_weight = -1
        self.changed.clear()
        self.wiped = any(m == 0 for m in masks)

    def take_changed(self) -> set[int]:
        ch, self.changed = self.changed, set()
        return ch

    def plb_ok(self, cells: Iterable[int]) -> bool:
        """PLB condition (no label over its count) on every asterism touching ``cells``."""
        masks, counts = self.masks, self.counts
        seen: set[int] = set()
        for c in cells:
            for a in self.cell_asterisms[c]:
                if a in seen:
                    continue
                seen.add(a)
                tally: dict[int, int] = {}
                for x in self.asterisms[a]:
                    m = masks[x]
                    if m and m & (m - 1) == 0:
                        n = tally.get(m, 0) + 1
                        if n > counts[m.bit_length() - 1]:
                            return False
                        tally[m] = n
        return True


# -- propagator rules --------------------------------------------------------


def _sweep_count_saturation(work: Work, asterisms: Iterable[int], name: str, weight: int) -> None:
    masks, counts, L = work.masks, work.counts, work.nlabels
    for a in asterisms:
        if work.halted:
            return
        zeros = 0
        singles: dict[int, int] = {}
        for c in work.asterisms[a]:
            m = masks[c]
            if m == 0:
                zeros += 1
            elif m & (m - 1) == 0:
                singles[m] = singles.get(m, 0) + 1
        if not singles and not zeros:
            continue
        eq = over = 0
        if zeros:
            for lab in range(L):
                f = singles.get(1 << lab, 0) + zeros
                if f > counts[lab]:
                    over |= 1 << lab
                elif f == counts[lab]:
                    eq |= 1 << lab
        else:
            for bit, f in singles.items():
                cnt = counts[bit.bit_length() - 1]
                if f > cnt:
                    over |= bit
                elif f == cnt:
                    eq |= bit
        if not eq | over:
            continue
        drop = eq | over
        for c in work.free_cells[a]:
            m = masks[c]
            if m == 0:
                continue
            if m & (m - 1) == 0:
                new = 0 if m & over else m
            else:
                new = m & ~drop
            if new != m:
                work.restrict(c, new, name, weight)


def _sweep_required_count(work: Work, asterisms: Iterable[int], name: str, weight: int) -> None:
    masks, counts, L, full = work.masks, work.counts, work.nlabels, work.full
    for a in asterisms:
        if work.halted:
            return
        free = work.free_cells[a]
        if not free:
            continue
        fc = work.fixed_count[a]
        cand: list[list[int]] = [[] for _ in range(L)]
        for c in free:
            for lab in bits(masks[c]):
                cand[lab].append(c)
        force: dict[int, int] = {}
        wipe = False
        for lab in range(L):
            r = counts[lab] - fc[lab]
            if r <= 0:
                continue
            n = len(cand[lab])
            if n < r:
                wipe = True
                break
            if n == r:
                for c in cand[lab]:
                    force[c] = force.get(c, full) & (1 << lab)
        if wipe:
            for c in free:
                work.restrict(c, 0, name, weight)
            continue
        for c, keep in force.items():
            m = masks[c]
            if m & ~keep:
                work.restrict(c, m & keep, name, weight)


def _sweep_intersection(work: Work, asterisms: Iterable[int], name: str, weight: int) -> None:
    masks, counts, L = work.masks, work.counts, work.nlabels
    fixed_count = work.fixed_count
    for a in asterisms:
        if work.halted:
            return
        pairs = work.pairs_from(a)
        if not pairs:
            continue
        cand_bits = [0] * L
        for c in work.free_cells[a]:
            for lab in bits(masks[c]):
                cand_bits[lab] |= 1 << c
        fa = fixed_count[a]
        for b, common, outside in pairs:
            if not outside:
                continue
            fb = fixed_count[b]
            for lab in range(L):
                if cand_bits[lab] & ~common:
                    continue
                r_a = counts[lab] - fa[lab]
                if counts[lab] - fb[lab] - r_a > 0:
                    continue
                bit = 1 << lab
                for c in outside:
                    m = masks[c]
                    if m & bit:
                        work.restrict(c, m & ~bit, name, weight)


# -- propagators -------------------------------------------------------------


@dataclass(frozen=True)
class PropagationOutcome:
    domain: BoardDomain
    eliminations: tuple[tuple[int, int, str], ...] = ()
    placements: tuple[tuple[int, int], ...] = ()
    wipeout: bool = False
    proof: Proof = field(default_factory=Proof)


@dataclass(frozen=True, eq=False)
class Propagator:
    """A named attrition algorithm.

    ``sweep(work, asterisms)`` applies the rule to the listed asterisms of a
    :class:`Work` state in place.  ``scoped`` propagators only read the
    asterisms they are given; unscoped ones look at the whole board and are
    re-run whenever anything changes.
    """

    name: str
    weight: int
    monotonic: bool
    sweep: Callable[[Work, Sequence[int]], None]
    scoped: bool = True

    def apply(self, plb: PartialLabeledBoard, d: BoardDomain | None = None) -> PropagationOutcome:
        """One application to every asterism of ``plb``."""
        work = Work(plb, d)
        work.halt_on_wipe = False
        self.sweep(work, range(len(work.asterisms)))
        work.flush()
        return _outcome(work)

    @classmethod
    def from_function(
        cls,
        name: str,
        fn: Callable[[PartialLabeledBoard, BoardDomain], BoardDomain],
        *,
        weight: int = 1,
        monotonic: bool = False,
    ) -> Propagator:
        """Wrap a whole-domain function ``fn(plb, D) -> D'``; results are intersected with D."""

        def sweep(work: Work, asterisms: Sequence[int]) -> None:
            out = fn(work.plb, work.domain())
            for c, m in zip(out.cells, out.masks):
                old = work.masks[c]
                if old & ~m:
                    work.restrict(c, old & m, name, weight)

        return cls(name, weight, monotonic, sweep, scoped=False)

    def __repr__(self) -> str:
        return f"Propagator({self.name!r}, weight={self.weight})"


def _rule_sweep(rule, name: str, weight: int, work: Work, asterisms: Sequence[int]) -> None:
    rule(work, asterisms, name, weight)


def _make(name: str, weight: int, rule) -> Propagator:
    # a partial over module-level functions pickles, so worker processes can receive it
    return Propagator(name, weight, True, functools.partial(_rule_sweep, rule, name, weight))


COUNT_SATURATION_PROP = _make(COUNT_SATURATION, 1, _sweep_count_saturation)
REQUIRED_COUNT_PROP = _make(REQUIRED_COUNT, 2, _sweep_required_count)
INTERSECTION_PROP = _make(INTERSECTION, 4, _sweep_intersection)

SHIPPED: tuple[Propagator, ...] = (COUNT_SATURATION_PROP, REQUIRED_COUNT_PROP, INTERSECTION_PROP)
REGISTRY: dict[str, Propagator] = {p.name: p for p in SHIPPED}


def with_weights(props: Sequence[Propagator], weights: dict[str, int]) -> tuple[Propagator, ...]:
    """Copies of ``props`` with weights overridden by name."""
    out = []
    for p in props:
        if p.name in weights and weights[p.name] != p.weight:
            rule = {
                COUNT_SATURATION: _sweep_count_saturation,
                REQUIRED_COUNT: _sweep_required_count,
                INTERSECTION: _sweep_intersection,
            }.get(p.name)
            if rule is None:
                raise ValueError(f"cannot re-weight custom propagator {p.name!r}")
            out.append(_make(p.name, int(weights[p.name]), rule))
        else:
            out.append(p)
    return tuple(out)


def prop_count_saturation(plb: PartialLabeledBoard, d: BoardDomain | None = None) -> PropagationOutcome:
    """Remove a label from an asterism's open cells once its count there is reached."""
    return COUNT_SATURATION_PROP.apply(plb, d)


def prop_required_count(plb: PartialLabeledBoard, d: BoardDomain | None = None) -> PropagationOutcome:
    """Force a label onto its candidate cells when they are exactly as many as the copies still missing."""
    return REQUIRED_COUNT_PROP.apply(plb, d)


def prop_intersection(plb: PartialLabeledBoard, d: BoardDomain | None = None) -> PropagationOutcome:
    """If all candidates for a label in asterism a lie in a & b, b cannot use it elsewhere when its budget is spent."""
    return INTERSECTION_PROP.apply(plb, d)


# -- fixpoint ----------------------------------------------------------------


def run_fixpoint(
    work: Work,
    props: Sequence[Propagator],
    dirty: Iterable[int] | None = None,
    rng: random.Random | None = None,
) -> bool:
    """Run ``props`` on ``work`` until nothing changes.  Returns False on wipeout.

    Default scheduling is cheapest-weight first over a queue of dirtied
    asterisms.  With ``rng`` the propagator and asterism order are random;
    for monotonic sets the fixpoint is the same either way.
    """
    if work.wiped:
        return False
    if not props:
        return True
    order = sorted(range(len(props)), key=lambda i: props[i].weight)
    props = [props[i] for i in order]
    n_ast = len(work.asterisms)
    start = set(range(n_ast)) if dirty is None else set(dirty)
    pending = [set(start) for _ in props]
    cell_asterisms = work.cell_asterisms
    work.take_changed()
    while True:
        live = [i for i, p in enumerate(pending) if p]
        if not live:
            break
        i = rng.choice(live) if rng is not None else live[0]
        asts = list(pending[i]) if props[i].scoped else list(range(n_ast))
        pending[i] = set()
        if rng is not None:
            rng.shuffle(asts)
        else:
            asts.sort()
        props[i].sweep(work, asts)
        if work.wiped:
            work.flush()
            return False
        changed = work.take_changed()
        if changed:
            touched: set[int] = set()
            for c in changed:
                touched.update(cell_asterisms[c])
            for p in pending:
                p |= touched
    work.flush()
    return True


def _outcome(work: Work, mark: tuple[int, int, int] = (0, 0, 0)) -> PropagationOutcome:
    steps = work.steps[mark[1]:]
    return PropagationOutcome(
        domain=work.domain(),
        eliminations=tuple(work.elim_log[mark[2]:]),
        placements=tuple(s.placement for s in steps if s.placement is not None),
        wipeout=work.wiped,
        proof=Proof(tuple(steps)),
    )


def propagate_fixpoint(
    plb: PartialLabeledBoard,
    d: BoardDomain | None = None,
    props: Sequence[Propagator] = SHIPPED,
    *,
    rng: random.Random | None = None,
) -> PropagationOutcome:
    """Propagate ``props`` from ``d`` (default: the initial domain) to a fixpoint or wipeout."""
    work = Work(plb, d)
    run_fixpoint(work, props, rng=rng)
    return _outcome(work)


# -- monotonicity check ------------------------------------------------------


@dataclass(frozen=True)
class Counterexample:
    plb: PartialLabeledBoard
    larger: BoardDomain
    smaller: BoardDomain
    larger_out: BoardDomain
    smaller_out: BoardDomain

    def cells(self) -> list[int]:
        """Cells where the image of the smaller domain escapes the image of the larger."""
        return [
            c
            for c, a, b in zip(self.larger.cells, self.smaller_out.masks, self.larger_out.masks)
            if a & ~b
        ]


@dataclass(frozen=True)
class MonotonicityReport:
    propagator: str
    trials: int
    counterexamples: tuple[Counterexample, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def check_monotonic(p: Propagator, trials: int = 1000, seed: int = 0) -> MonotonicityReport:
    """Random search for D' <= D with p(D') not <= p(D) on small random PLBs."""
    from .domains import is_stronger
    from .sampling import random_domain, random_puzzle_like, random_subdomain, small_boards

    rng = random.Random(seed)
    boards = small_boards()
    found = []
    plb = None
    for t in range(trials):
        if t % 20 == 0 or plb is None or not plb.empty_cells:
            plb = random_puzzle_like(rng, boards, noise=0.1 if rng.random() < 0.3 else 0.0)
            if not plb.empty_cells:
                continue
        d = random_domain(plb, rng)
        d2 = random_subdomain(d, rng)
        out = p.apply(plb, d).domain
        out2 = p.apply(plb, d2).domain
        if not is_stronger(out2, out):
            found.append(Counterexample(plb, d, d2, out, out2))
    return MonotonicityReport(p.name, trials, tuple(found))
