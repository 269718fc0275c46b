"""Cell domains and board domains.

A cell domain is a bit mask over interned label ids (bit ``i`` set means label
``i`` is still a candidate).  A :class:`BoardDomain` maps every empty cell of a
partial labeled board to its mask.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Iterator, Mapping

from .model import PartialLabeledBoard, is_partial_latin_board


def bits(mask: int) -> Iterator[int]:
    """Label ids present in ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(labels: Iterable[int]) -> int:
    m = 0
    for lab in labels:
        m |= 1 << lab
    return m


def is_single(mask: int) -> bool:
    return mask != 0 and mask & (mask - 1) == 0


def single_label(mask: int) -> int:
    return mask.bit_length() - 1


@dataclass(frozen=True)
class BoardDomain:
    cells: tuple[int, ...]
    masks: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.cells) != len(self.masks):
            raise ValueError("cells and masks differ in length")

    @classmethod
    def from_mapping(cls, domains: Mapping[int, int | Iterable[int]]) -> BoardDomain:
        cells = tuple(sorted(domains))
        masks = []
        for c in cells:
            d = domains[c]
            masks.append(d if isinstance(d, int) else mask_of(d))
        return cls(cells, tuple(masks))

    def __len__(self) -> int:
        return len(self.cells)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.cells, self.masks))

    def mask(self, cell: int) -> int:
        return self.as_dict()[cell]

    def candidates(self, cell: int) -> frozenset[int]:
        return frozenset(bits(self.mask(cell)))

    @property
    def wiped_out(self) -> bool:
        return 0 in self.masks

    @property
    def solved(self) -> bool:
        return all(is_single(m) for m in self.masks)

    def replace(self, updates: Mapping[int, int]) -> BoardDomain:
        d = self.as_dict()
        for c, m in updates.items():
            if c not in d:
                raise KeyError(f"cell {c} is not an empty cell of this domain")
            d[c] = m
        return BoardDomain(self.cells, tuple(d[c] for c in self.cells))


def initial_domain(plb: PartialLabeledBoard) -> BoardDomain:
    """Every empty cell gets the whole multiset support."""
    if not is_partial_latin_board(plb):
        raise ValueError("initial_domain needs a partial Latin board")
    empties = plb.empty_cells
    full = plb.multiset.full_mask
    return BoardDomain(empties, (full,) * len(empties))


def solution_space_size(d: BoardDomain) -> int:
    return prod(m.bit_count() for m in d.masks)


def is_stronger(d1: BoardDomain, d2: BoardDomain) -> bool:
    """True iff ``d1`` is pointwise contained in ``d2`` (d1 is more advanced)."""
    if d1.cells != d2.cells:
        raise ValueError("board domains are keyed by different cell sets")
    return all(a & ~b == 0 for a, b in zip(d1.masks, d2.masks))
