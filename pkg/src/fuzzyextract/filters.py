"""Candidate filters: the FED insert/substitute lower bound and the overlap-weight test.

Both return True when the window is kept.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

from .corpus import WeightedTokenSet
from .simcore import EPS


def fed_lower_bound_filter(entity: WeightedTokenSet, M: Sequence[float], delta: float) -> bool:
    """Keep unless sum (1 - M_i) w(E_i) > 1 - delta. M_i = 0 marks an unmatched entity token."""
    cost = math.fsum((1.0 - mi) * w for mi, w in zip(M, entity.weights))
    return cost <= 1.0 - delta + EPS


def overlap_weight_filter(entity: WeightedTokenSet, matched: Iterable[int], delta: float,
                          threshold: float | None = None) -> bool:
    """Keep unless the entity-side weight of matched entity tokens falls below the threshold.

    The threshold defaults to delta, which is sound for FuzzyED. Fuzzy Jaccard needs
    (3 delta - 1) / (1 + delta); see candidates_enum.similarity_threshold.
    """
    thr = delta if threshold is None else threshold
    return entity.subset_weight(matched) + EPS >= thr
