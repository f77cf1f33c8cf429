"""Spanning-based candidate producer: core tokens, lower-bound dissimilarity,
left/right spanning and shrink-based state reuse.

All spanning arithmetic is in raw idf space. A text token that matches the entity
carries the idf of the entity token it matches best (ties go to the lower index);
other tokens carry their dictionary idf. The scorers use the same convention, so
the bounds below hold for the scores actually computed.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .candidates_enum import FED, FJ, CandidateWindow
from .corpus import WeightedTokenSet
from .kernels import levenshtein
from .matcher import MatchGrid
from .simcore import EPS


@dataclass(frozen=True)
class CoreTokenSet:
    core: frozenset[int]
    optional: frozenset[int]


def core_threshold(delta: float, mode: str) -> float:
    if mode == FED:
        return 1.0 - delta
    if mode == FJ:
        return 2.0 * (1.0 - delta) / (1.0 + delta)
    raise ValueError(f"unknown mode {mode!r}")


def select_core_tokens(entity: WeightedTokenSet, delta: float, mode: str) -> CoreTokenSet:
    """Fewest largest-weight tokens whose total weight strictly exceeds the threshold."""
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    thr = core_threshold(delta, mode)
    order = sorted(range(len(entity)), key=lambda i: (-entity.weights[i], i))
    core = []
    acc = 0.0
    for i in order:
        core.append(i)
        acc += entity.weights[i]
        if acc > thr + EPS:
            break
    c = frozenset(core)
    return CoreTokenSet(c, frozenset(range(len(entity))) - c)


# ---------------------------------------------------------------------------
# per-entity profile used by the bound


@dataclass(frozen=True)
class SpanProfile:
    """idf[r]: entity token idf. cap[r]: the largest idf a text token matched to r
    can carry (its own idf, or that of another entity token some string could match
    together with r). phi[r]: best edit similarity of a non-identical string to r."""
    idf: tuple[float, ...]
    cap: tuple[float, ...]
    phi: tuple[float, ...]
    fuzzy: tuple[bool, ...]

    @property
    def floor(self) -> float:
        return min(self.idf)


def _reach(token: str, tau: float) -> int:
    """Max edits between `token` and any string matching it at tau."""
    longest = int(math.floor(len(token) / tau + EPS))
    return int(math.floor((1.0 - tau) * longest + EPS))


def build_span_profile(tokens: Sequence[str], idf_values: Sequence[float], tau: float) -> SpanProfile:
    m = len(tokens)
    reach = [_reach(t, tau) for t in tokens]
    cap = []
    for r in range(m):
        c = idf_values[r]
        for q in range(m):
            if idf_values[q] > c and tokens[q] != tokens[r]:
                if levenshtein(tokens[r], tokens[q], reach[r] + reach[q]) <= reach[r] + reach[q]:
                    c = idf_values[q]
        cap.append(c)
    phi = tuple(1.0 - 1.0 / (len(t) + 1) for t in tokens)
    fuzzy = tuple(tau < 1.0 and phi[r] + EPS >= tau for r in range(m))
    return SpanProfile(tuple(idf_values), tuple(cap), phi, fuzzy)


# ---------------------------------------------------------------------------
# per (document, entity) context


@dataclass
class SpanContext:
    doc_idf: Sequence[float]
    matches: dict[int, tuple[tuple[int, float], ...]]
    iota_at: dict[int, float]
    landmarks: list[int]
    core_positions: list[int]
    core_flag: set[int]
    m: int

    def iota(self, p: int) -> float:
        v = self.iota_at.get(p)
        return self.doc_idf[p] if v is None else v


def build_span_context(doc_idf: Sequence[float], grid: MatchGrid, entity_idf: Sequence[float],
                       core: frozenset[int] | set[int]) -> SpanContext:
    by_pos = grid.by_position()
    matches = {}
    iota_at = {}
    core_pos = []
    for p, lst in by_pos.items():
        lst = sorted(lst)
        matches[p] = tuple(lst)
        best_r, best_s = lst[0]
        for r, s in lst[1:]:
            if s > best_s:
                best_r, best_s = r, s
        iota_at[p] = entity_idf[best_r]
        if any(r in core for r, _ in lst):
            core_pos.append(p)
    landmarks = sorted(matches)
    core_pos.sort()
    return SpanContext(doc_idf, matches, iota_at, landmarks, core_pos, set(core_pos), len(entity_idf))


# ---------------------------------------------------------------------------
# state


@dataclass
class SpanState:
    left: int
    right: int
    v_t: float
    v_r: float
    v_m: float
    best_sim: list  # M_r, None when absent
    best_pos: list  # S'_r position, None when absent
    best_val: list  # eds * idf of S'_r, 0.0 when absent
    best_iota: list
    hits: list = field(default_factory=list)  # per r: deque of (pos, eds, iota)
    core_hits: int = 0
    positive: int = 0  # tokens with iota > 0; v_t is exactly 0 when none

    def snapshot(self) -> dict:
        return {
            "left": self.left, "right": self.right, "v_t": self.v_t, "v_r": self.v_r,
            "v_m": self.v_m, "best_sim": list(self.best_sim), "best_pos": list(self.best_pos),
            "best_val": list(self.best_val), "core_hits": self.core_hits,
            "hits": [list(h) for h in self.hits],
        }


def _better(cand: tuple, cur: tuple | None) -> bool:
    # cand/cur: (pos, eds, iota); prefer larger eds*iota, then larger eds, then leftmost
    if cur is None:
        return True
    kc = (cand[1] * cand[2], cand[1], -cand[0])
    ko = (cur[1] * cur[2], cur[1], -cur[0])
    return kc > ko


def _set_best(state: SpanState, r: int, entry: tuple | None) -> None:
    if entry is None:
        state.best_sim[r] = None
        state.best_pos[r] = None
        state.best_val[r] = 0.0
        state.best_iota[r] = 0.0
    else:
        state.best_pos[r] = entry[0]
        state.best_sim[r] = entry[1]
        state.best_val[r] = entry[1] * entry[2]
        state.best_iota[r] = entry[2]


def _refresh_totals(state: SpanState) -> None:
    if state.positive == 0:
        state.v_t = 0.0  # drop rounding residue from incremental updates
    state.v_m = math.fsum(state.best_val)
    seen = {}
    for r, p in enumerate(state.best_pos):
        if p is not None:
            seen[p] = state.best_iota[r]
    state.v_r = state.v_t - math.fsum(seen.values())


def _add(state: SpanState, ctx: SpanContext, p: int, left: bool) -> None:
    iota = ctx.iota(p)
    state.v_t += iota
    if iota > 0.0:
        state.positive += 1
    for r, eds in ctx.matches.get(p, ()):
        entry = (p, eds, iota)
        if left:
            state.hits[r].appendleft(entry)
        else:
            state.hits[r].append(entry)
        cur = None
        if state.best_pos[r] is not None:
            cur = (state.best_pos[r], state.best_sim[r], state.best_iota[r])
        if _better(entry, cur):
            _set_best(state, r, entry)
    if p in ctx.core_flag:
        state.core_hits += 1


def _empty_state(ctx: SpanContext, pos: int) -> SpanState:
    m = ctx.m
    return SpanState(pos, pos - 1, 0.0, 0.0, 0.0, [None] * m, [None] * m, [0.0] * m,
                     [0.0] * m, [deque() for _ in range(m)], 0)


def init_span_state(ctx: SpanContext, core_pos: int) -> SpanState:
    """State for the single-token window [core_pos, core_pos]."""
    state = _empty_state(ctx, core_pos)
    _add(state, ctx, core_pos, False)
    state.right = core_pos
    _refresh_totals(state)
    return state


def build_span_state(ctx: SpanContext, left: int, right: int) -> SpanState:
    """Fresh state over [left, right], built token by token."""
    state = _empty_state(ctx, left)
    for p in range(left, right + 1):
        _add(state, ctx, p, False)
        state.right = p
    _refresh_totals(state)
    return state


def extend_span(state: SpanState, ctx: SpanContext, direction: str) -> SpanState:
    if direction == "left":
        state.left -= 1
        _add(state, ctx, state.left, True)
    elif direction == "right":
        state.right += 1
        _add(state, ctx, state.right, False)
    else:
        raise ValueError(direction)
    _refresh_totals(state)
    return state


def _drop_left_until(state: SpanState, ctx: SpanContext, new_left: int) -> None:
    for p in range(state.left, new_left):
        iota = ctx.iota(p)
        state.v_t -= iota
        if iota > 0.0:
            state.positive -= 1
        lst = ctx.matches.get(p)
        if lst:
            for r, _ in lst:
                state.hits[r].popleft()
                if state.best_pos[r] == p:
                    best = None
                    for entry in state.hits[r]:
                        if _better(entry, best):
                            best = entry
                    _set_best(state, r, best)
            if p in ctx.core_flag:
                state.core_hits -= 1
    state.left = new_left
    _refresh_totals(state)


def trim_left(state: SpanState, ctx: SpanContext) -> None:
    """Move the left boundary to the first landmark inside the window."""
    i = bisect_left(ctx.landmarks, state.left)
    if i < len(ctx.landmarks) and ctx.landmarks[i] <= state.right:
        _drop_left_until(state, ctx, ctx.landmarks[i])


def shrink(state: SpanState, ctx: SpanContext) -> SpanState | None:
    """Drop the leftmost landmark and the unmatched tokens after it.

    Returns None when no landmark remains in the window.
    """
    i = bisect_right(ctx.landmarks, state.left)
    if i >= len(ctx.landmarks) or ctx.landmarks[i] > state.right:
        return None
    _drop_left_until(state, ctx, ctx.landmarks[i])
    return state


# ---------------------------------------------------------------------------
# bound


def max_ratio(v_t: float, best_val: Sequence[float], profile: SpanProfile) -> float:
    """Upper bound on sum(eds * idf of matched tokens) / total idf over any superset window.

    Each entity token r either keeps its current best contribution, or is given a
    new text token: an exact one (adds idf_r to both sides) or a fuzzy one with
    idf at most cap_r and similarity at most phi_r. The best mix is found by
    Dinkelbach iteration on the resulting fractional program.
    """
    if v_t <= 0.0:
        return 1.0
    base_num = math.fsum(best_val)
    lam = base_num / v_t
    m = len(best_val)
    idf, cap, phi, fuzzy = profile.idf, profile.cap, profile.phi, profile.fuzzy
    for _ in range(4 * m + 8):
        num, den = base_num, v_t
        for r in range(m):
            b = best_val[r]
            gain, dv, dc = 0.0, 0.0, 0.0
            i_r = idf[r]
            if i_r > 0.0:
                g = (i_r - b) - lam * i_r
                if g > gain:
                    gain, dv, dc = g, i_r - b, i_r
            if fuzzy[r] and cap[r] > i_r:
                c = cap[r]
                g = (phi[r] * c - b) - lam * c
                if g > gain:
                    gain, dv, dc = g, phi[r] * c - b, c
            if dc > 0.0:
                num += dv
                den += dc
        new = num / den
        if new <= lam + 1e-15:
            break
        lam = new
    return 1.0 if lam > 1.0 else lam


def bound_from_ratio(rho: float, mode: str) -> float:
    if mode == FED:
        return 1.0 - rho
    q = 0.5 * (1.0 + rho)
    return 1.0 - q / (2.0 - q)


def lower_bound(state: SpanState, profile: SpanProfile, mode: str) -> float:
    """Lower bound on the dissimilarity (1 - score) of every window containing the state's window."""
    return bound_from_ratio(max_ratio(state.v_t, state.best_val, profile), mode)


def bound_after(state: SpanState, ctx: SpanContext, p: int, profile: SpanProfile, mode: str) -> float:
    """lower_bound of the state extended by position p, without mutating it."""
    iota = ctx.iota(p)
    vals = state.best_val
    lst = ctx.matches.get(p)
    if lst:
        vals = list(vals)
        for r, eds in lst:
            v = eds * iota
            if v > vals[r]:
                vals[r] = v
    return bound_from_ratio(max_ratio(state.v_t + iota, vals, profile), mode)


def lemma2_admits(v_m, v_t, m_r) -> bool:
    """Admission test for the FJ term: (1 - M_r) >= V_m / V_T (equality admits)."""
    return (1 - m_r) * v_t >= v_m


def fj_term(v_m, v_t, additions=()):
    """(V_m + sum (1 - M_r) c_r) / (V_T + sum c_r) over the given (M_r, c_r) additions."""
    num = v_m + sum((1 - mr) * c for mr, c in additions)
    den = v_t + sum(c for _, c in additions)
    return num / den


# ---------------------------------------------------------------------------
# producer


@dataclass
class SpanTrace:
    """Trajectories recorded for inspection: each is a list of
    (left, right, raw bound, effective bound, accepted)."""
    trajectories: list = field(default_factory=list)


def span_regions(ctx: SpanContext, profile: SpanProfile, delta: float, mode: str,
                 trace: SpanTrace | None = None) -> list[tuple[int, int]]:
    """Candidate regions (start, end), one per distinct start landmark.

    Every window [start, b] with b a landmark in the region that scores >= delta is
    found by measuring the region; no qualifying window lies outside all regions.
    """
    limit = 1.0 - delta + EPS
    regions: list[tuple[int, int]] = []
    core_pos = ctx.core_positions
    landmarks = ctx.landmarks
    n = len(ctx.doc_idf)
    next_min = 0
    state: SpanState | None = None
    while True:
        if state is None or state.core_hits == 0:
            idx = bisect_left(core_pos, next_min)
            if idx == len(core_pos):
                break
            state = init_span_state(ctx, core_pos[idx])
            run = lower_bound(state, profile, mode)
            traj = [(state.left, state.right, run, run, True)] if trace is not None else None
            while state.left - 1 >= next_min:
                raw = bound_after(state, ctx, state.left - 1, profile, mode)
                eff = raw if raw > run else run
                if traj is not None:
                    traj.append((state.left - 1, state.right, raw, eff, eff <= limit))
                if eff > limit:
                    break
                extend_span(state, ctx, "left")
                run = eff
            if traj is not None:
                trace.trajectories.append(traj)
            trim_left(state, ctx)
        run = lower_bound(state, profile, mode)
        traj = [(state.left, state.right, run, run, True)] if trace is not None else None
        while state.right + 1 < n:
            raw = bound_after(state, ctx, state.right + 1, profile, mode)
            eff = raw if raw > run else run
            if traj is not None:
                traj.append((state.left, state.right + 1, raw, eff, eff <= limit))
            if eff > limit:
                break
            extend_span(state, ctx, "right")
            run = eff
        if traj is not None:
            trace.trajectories.append(traj)
        end = landmarks[bisect_right(landmarks, state.right) - 1]
        regions.append((state.left, end))
        next_min = state.left + 1
        state = shrink(state, ctx)
    return regions


def produce_candidates_spanning(grid: MatchGrid, entity: WeightedTokenSet, delta: float, tau: float,
                                mode: str, doc_idf: Sequence[float],
                                core: CoreTokenSet | None = None) -> list[CandidateWindow]:
    """Regions for one (document, entity) pair; doc_idf gives the idf of every document token."""
    if core is None:
        core = select_core_tokens(entity, delta, mode)
    ctx = build_span_context(doc_idf, grid, entity.idf_values, core.core)
    profile = build_span_profile(entity.tokens, entity.idf_values, tau)
    return [CandidateWindow(a, b) for a, b in span_regions(ctx, profile, delta, mode)]
