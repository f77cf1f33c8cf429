"""Character-level edit similarity, plain Jaccard and shared numeric tolerances."""
from __future__ import annotations

import math
from collections import Counter
from typing import Iterable

from .kernels import levenshtein

# Every threshold comparison in the engine uses this slack: a score qualifies when
# score + EPS >= threshold, and every pruning rule prunes only past the slack.
EPS = 1e-9


def edit_similarity(a: str, b: str) -> float:
    """1 - ed(a, b) / max(|a|, |b|)."""
    n = max(len(a), len(b))
    if n == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / n


def max_edits(length: int, tau: float) -> int:
    """Largest edit distance still giving eds >= tau against a string of max length `length`."""
    return int(math.floor((1.0 - tau) * length + EPS))


def edit_similarity_at_least(a: str, b: str, tau: float) -> float:
    """eds(a, b) if it reaches tau, else 0.0. Uses the banded early exit."""
    n = max(len(a), len(b))
    if n == 0:
        return 1.0
    k = max_edits(n, tau)
    if abs(len(a) - len(b)) > k:
        return 0.0
    d = levenshtein(a, b, k)
    if d > k:
        return 0.0
    sim = 1.0 - d / n
    return sim if is_match(sim, tau) else 0.0


def is_match(sim: float, tau: float) -> bool:
    return sim + EPS >= tau


def jaccard(E: Iterable[str], S: Iterable[str]) -> float:
    """Multiset Jaccard: equal tokens are paired one-to-one."""
    ce, cs = Counter(E), Counter(S)
    ne, ns = sum(ce.values()), sum(cs.values())
    if ne == 0 and ns == 0:
        return 1.0
    inter = sum((ce & cs).values())
    return inter / (ne + ns - inter)
