"""Enumeration-based candidate producer with valid matching-length bounds [l, u]."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .corpus import WeightedTokenSet
from .matcher import MatchGrid, MatchOccurrence
from .simcore import EPS

FED = "fed"
FJ = "fj"


@dataclass(frozen=True)
class MatchingLengthBounds:
    l: int
    u: float  # int, or math.inf when no finite bound exists

    def __post_init__(self):
        if self.l < 1 or self.u < self.l:
            raise ValueError(f"invalid bounds [{self.l}, {self.u}]")


@dataclass(frozen=True)
class CandidateWindow:
    start: int  # first token position (a landmark)
    end: int    # last token position, inclusive (a landmark)
    matched: tuple[MatchOccurrence, ...] = ()

    @property
    def doc_span(self) -> tuple[int, int]:
        return (self.start, self.end)


def similarity_threshold(delta: float, mode: str) -> float:
    """Minimum entity-side matched weight a window needs: delta for FED, (3d-1)/(1+d) for FJ."""
    if mode == FED:
        return delta
    if mode == FJ:
        return (3.0 * delta - 1.0) / (1.0 + delta)
    raise ValueError(f"unknown mode {mode!r}")


def matching_length_bounds(entity: WeightedTokenSet, delta: float, mode: str,
                           idf_ceilings: Sequence[float] | None = None,
                           idf_floor: float | None = None) -> MatchingLengthBounds:
    """[l, u] on the number of matched positions of a window scoring >= delta.

    u adds redundant matches, each carrying at least `idf_floor`, to a window whose
    useful matches carry at most sum(idf_ceilings). Both default to the entity's own
    idf values (smallest value and the total), which is the textbook bound when every
    text token carries the idf of the entity token it matches.
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    theta = similarity_threshold(delta, mode)
    m = len(entity)
    if theta <= EPS:
        return MatchingLengthBounds(1, math.inf)
    acc = 0.0
    l = m
    for cnt, w in enumerate(sorted(entity.weights, reverse=True), start=1):
        acc += w
        if acc + EPS >= theta:
            l = cnt
            break
    ceil_total = math.fsum(entity.idf_values if idf_ceilings is None else idf_ceilings)
    floor = min(entity.idf_values) if idf_floor is None else idf_floor
    if ceil_total <= 0.0 or floor <= 0.0:
        return MatchingLengthBounds(l, math.inf)

    def ok(r: int) -> bool:
        return ceil_total / (ceil_total + r * floor) + EPS >= theta

    r = int(max(0.0, math.floor(ceil_total * (1.0 - theta) / (theta * floor))))
    while r > 0 and not ok(r):
        r -= 1
    while ok(r + 1):
        r += 1
    return MatchingLengthBounds(l, m + r)


def enumerate_spans(k: int, bounds: MatchingLengthBounds) -> Iterator[tuple[int, int]]:
    """Index pairs (i, j) into the k landmark positions with j - i + 1 in [l, u]."""
    hi = k if bounds.u >= k else int(bounds.u)
    for i in range(k):
        for cnt in range(bounds.l, hi + 1):
            j = i + cnt - 1
            if j >= k:
                break
            yield i, j


def enumerate_candidates(grid: MatchGrid, bounds: MatchingLengthBounds) -> list[CandidateWindow]:
    """All landmark-bounded windows whose matched-position count lies in [l, u]."""
    positions = grid.positions()
    occ = grid.occurrences
    first = {}
    for idx, o in enumerate(occ):
        first.setdefault(o.doc_pos, idx)
    ends = {}
    for idx, o in enumerate(occ):
        ends[o.doc_pos] = idx + 1
    return [CandidateWindow(positions[i], positions[j],
                            occ[first[positions[i]]:ends[positions[j]]])
            for i, j in enumerate_spans(len(positions), bounds)]
