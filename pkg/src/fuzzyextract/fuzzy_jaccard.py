"""Fuzzy Jaccard with redundant-match removal by maximum-weight bipartite matching."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .corpus import WeightedTokenSet
from .fuzzy_ed import gated_similarities

_TIE = 1e-9


@dataclass(frozen=True)
class MatchBipartite:
    left: tuple[int, ...]
    right: tuple[int, ...]
    edges: tuple[tuple[int, int, float], ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[int, int, float], ...]
    weight: float


def _solve(mat: np.ndarray) -> tuple[float, list[tuple[int, int]]]:
    if mat.size == 0:
        return 0.0, []
    rows, cols = linear_sum_assignment(mat, maximize=True)
    pairs = [(int(r), int(c)) for r, c in zip(rows, cols) if mat[r, c] > 0.0]
    return math.fsum(float(mat[r, c]) for r, c in pairs), pairs


def _matching_on_matrix(mat: np.ndarray) -> tuple[float, list[tuple[int, int]]]:
    """Optimal matching on a dense nonnegative matrix (0 = no edge), with
    lexicographic tie-breaking over (row, col) among optimal matchings."""
    best, pairs = _solve(mat)
    edges = [(int(r), int(c)) for r, c in zip(*np.nonzero(mat > 0.0))]
    if len(edges) == len(pairs):
        return best, sorted(pairs)
    forced: list[tuple[int, int]] = []
    used_r: set[int] = set()
    used_c: set[int] = set()
    fixed = 0.0
    for r, c in edges:  # np.nonzero yields lexicographic order
        if r in used_r or c in used_c:
            continue
        keep_r = [i for i in range(mat.shape[0]) if i not in used_r and i != r]
        keep_c = [j for j in range(mat.shape[1]) if j not in used_c and j != c]
        rest, _ = _solve(mat[np.ix_(keep_r, keep_c)])
        if fixed + float(mat[r, c]) + rest >= best - _TIE:
            forced.append((r, c))
            used_r.add(r)
            used_c.add(c)
            fixed += float(mat[r, c])
    return math.fsum(float(mat[r, c]) for r, c in forced), forced


def max_weight_matching(g: MatchBipartite) -> Matching:
    if not g.edges:
        return Matching((), 0.0)
    li = {v: k for k, v in enumerate(sorted(set(g.left) | {e[0] for e in g.edges}))}
    ri = {v: k for k, v in enumerate(sorted(set(g.right) | {e[1] for e in g.edges}))}
    lv = sorted(li, key=li.get)
    rv = sorted(ri, key=ri.get)
    mat = np.zeros((len(li), len(ri)))
    for i, j, w in g.edges:
        mat[li[i], ri[j]] = w
    weight, pairs = _matching_on_matrix(mat)
    out = tuple(sorted((lv[r], rv[c], float(mat[r, c])) for r, c in pairs))
    return Matching(out, weight)


def build_bipartite(entity_tokens: Sequence[str], cand_tokens: Sequence[str],
                    tau: float) -> MatchBipartite:
    sims = gated_similarities(entity_tokens, cand_tokens, tau)
    n = len(cand_tokens)
    edges = tuple((i, j, sims[i * n + j]) for i in range(len(entity_tokens))
                  for j in range(n) if sims[i * n + j] >= 0.0)
    return MatchBipartite(tuple(range(len(entity_tokens))), tuple(range(n)), edges)


def fj_value(overlap: float, total_e: float, total_s: float) -> float:
    """X / (T_w(E) + T_w(S) - X); with normalized sets this is Q / (2 - Q)."""
    denom = total_e + total_s - overlap
    if denom <= 0.0:
        return 1.0 if overlap > 0.0 else 0.0
    v = overlap / denom
    return 0.0 if v < 0.0 else (1.0 if v > 1.0 else v)


def fj_from_matrix(ew: Sequence[float], cw: Sequence[float], mat: np.ndarray,
                   total_e: float = 1.0, total_s: float = 1.0) -> float:
    """Score from a dense eds matrix (rows = entity tokens, 0 = no edge)."""
    _, pairs = _matching_on_matrix(mat)
    x = 0.5 * math.fsum(float(mat[r, c]) * (ew[r] + cw[c]) for r, c in pairs)
    return fj_value(x, total_e, total_s)


def fuzzy_jaccard_similarity(entity: WeightedTokenSet, candidate: WeightedTokenSet,
                             tau: float, sims: Sequence[float] | None = None) -> float:
    """sims: optional precomputed row-major eds matrix, negative where not a tau-match."""
    if len(entity) == 0:
        raise ValueError("empty entity")
    if len(candidate) == 0:
        return 0.0
    if sims is None:
        sims = gated_similarities(entity.tokens, candidate.tokens, tau)
    sims = np.asarray(sims, dtype=float).reshape(
        len(entity), len(candidate))
    mat = np.where(sims >= 0.0, sims, 0.0)
    return fj_from_matrix(entity.weights, candidate.weights, mat,
                          math.fsum(entity.weights), math.fsum(candidate.weights))
