"""FuzzyED: token-level weighted edit cost and the derived similarity."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .corpus import WeightedTokenSet
from .kernels import fed_dp
from .simcore import edit_similarity, is_match


@dataclass(frozen=True)
class TransformCost:
    deletion: float
    insertion: float
    substitution: float
    total: float


def substitution_cost(e: str, s: str, w_e: float, w_s: float, tau: float) -> float:
    """(1 - eds(e, s)) * (w(e) + w(s)); callers substitute only matched pairs."""
    return (1.0 - edit_similarity(e, s)) * (w_e + w_s)


def gated_similarities(entity_tokens: Sequence[str], cand_tokens: Sequence[str],
                       tau: float) -> list[float]:
    """Row-major m*n eds matrix with -1 where the pair is not a tau-match."""
    out = []
    for e in entity_tokens:
        for s in cand_tokens:
            sim = edit_similarity(e, s)
            out.append(sim if is_match(sim, tau) else -1.0)
    return out


def fuzzy_ed_cost(entity: WeightedTokenSet, candidate: WeightedTokenSet, tau: float,
                  free_ends: bool = True, sims: Sequence[float] | None = None) -> TransformCost:
    """Minimum weighted edit cost of turning a candidate sub-string into the entity.

    With free_ends the DP may skip a candidate prefix and suffix at no cost, giving
    the cost of the best contiguous sub-string. The extraction pipeline calls it
    with free_ends=False: windows there are scored as a whole.
    """
    if len(entity) == 0:
        raise ValueError("empty entity")
    if sims is None:
        sims = gated_similarities(entity.tokens, candidate.tokens, tau)
    total, dele, ins, sub = fed_dp(list(entity.weights), list(candidate.weights), list(sims), free_ends)
    return TransformCost(dele, ins, sub, total)


def fed_similarity(total_cost: float) -> float:
    return 0.0 if total_cost > 1.0 else 1.0 - total_cost


def fuzzy_ed_similarity(entity: WeightedTokenSet, candidate: WeightedTokenSet, tau: float,
                        free_ends: bool = True) -> float:
    return fed_similarity(fuzzy_ed_cost(entity, candidate, tau, free_ends).total)
