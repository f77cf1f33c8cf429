"""Extraction loop: match, produce candidates, filter, measure."""
from __future__ import annotations

import math
import os
import time
from bisect import bisect_left, bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Sequence

import numpy as np

from .candidates_enum import (FED, FJ, MatchingLengthBounds, matching_length_bounds,
                              similarity_threshold)
from .candidates_span import (SpanContext, SpanProfile, build_span_context, build_span_profile,
                              select_core_tokens, span_regions)
from .corpus import Document, Entity, IdfModel, WeightedTokenSet, build_idf_model, weigh
from .filters import fed_lower_bound_filter, overlap_weight_filter
from .fuzzy_ed import fed_similarity
from .fuzzy_jaccard import fj_from_matrix
from .kernels import fed_dp
from .matcher import TokenIndex, grid_from_doc_matches, match_document
from .simcore import EPS

MODES = ("fed-e", "fed-s", "fj-e", "fj-s", "fed-a")


@dataclass(frozen=True)
class Config:
    delta: float = 0.9
    tau: float = 0.8
    mode: str = "fed-s"
    core_tokens: bool = True
    overlap: str = "all"

    def __post_init__(self):
        if not 0.0 < self.delta <= 1.0:
            raise ValueError("delta must lie in (0, 1]")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("tau must lie in (0, 1]")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.overlap not in ("all", "best", "best-per-span"):
            raise ValueError(f"unknown overlap policy {self.overlap!r}")

    @property
    def scorer(self) -> str:
        return FJ if self.mode.startswith("fj") else FED

    @property
    def spanning(self) -> bool:
        return self.mode.endswith("-s") or self.mode == "fed-a"

    @property
    def use_core(self) -> bool:
        return self.core_tokens and self.mode != "fed-a"


@dataclass(frozen=True)
class Extraction:
    doc_id: str
    entity_id: int
    token_span: tuple[int, int]  # [start, end)
    char_span: tuple[int, int]   # [start, end)
    score: float
    mode: str

    def key(self) -> tuple:
        return (self.doc_id, self.token_span, self.entity_id)

    def to_record(self) -> dict:
        return {"doc_id": self.doc_id, "entity_id": self.entity_id,
                "start_char": self.char_span[0], "end_char": self.char_span[1],
                "start_token": self.token_span[0], "end_token": self.token_span[1],
                "score": round(self.score, 6), "mode": self.mode}


@dataclass
class Stats:
    pairs: int = 0            # (document, entity) pairs with a grid
    landmarks: int = 0        # total matched positions k over pairs
    candidates: int = 0       # enumeration windows, or spanning regions
    windows: int = 0          # windows considered for measuring
    pruned_core: int = 0      # windows without a core match (spanning)
    pruned_overlap: int = 0
    pruned_fed: int = 0
    scored: int = 0
    extracted: int = 0
    pair_seconds: float = 0.0  # candidate generation, filtering and scoring, after token matching

    def add(self, other: "Stats") -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class _EntityPlan:
    bounds: MatchingLengthBounds
    core: frozenset


class Extractor:
    """Dictionary artifacts shared across documents: index, idf model and per-entity
    weights, bounds and core tokens (the latter two cached per configuration)."""

    def __init__(self, dictionary: Sequence[Entity], tau: float = 0.8,
                 model: IdfModel | None = None, index: TokenIndex | None = None):
        self.dictionary = list(dictionary)
        self.model = model or build_idf_model(self.dictionary)
        self.index = index or TokenIndex(self.dictionary, tau)
        self.weighted = [weigh(e.tokens, self.model) for e in self.dictionary]
        self._profiles: dict[tuple[int, float], SpanProfile] = {}
        self._plans: dict[tuple, list[_EntityPlan]] = {}
        self._core_postings: dict[tuple, dict[int, list[int]]] = {}
        self._query_cache: dict[tuple[str, float], list] = {}
        self._idf_cache: dict[str, float] = {}

    # -- cached artifacts ---------------------------------------------------

    def profile(self, ei: int, tau: float) -> SpanProfile:
        key = (ei, tau)
        p = self._profiles.get(key)
        if p is None:
            w = self.weighted[ei]
            p = build_span_profile(w.tokens, w.idf_values, tau)
            self._profiles[key] = p
        return p

    def _plan(self, ei: int, cfg: Config) -> _EntityPlan:
        key = (cfg.delta, cfg.tau, cfg.scorer, cfg.use_core)
        plans = self._plans.get(key)
        if plans is None:
            plans = [None] * len(self.dictionary)
            self._plans[key] = plans
        plan = plans[ei]
        if plan is None:
            w = self.weighted[ei]
            prof = self.profile(ei, cfg.tau)
            bounds = matching_length_bounds(w, cfg.delta, cfg.scorer, idf_ceilings=prof.cap,
                                            idf_floor=prof.floor)
            if cfg.use_core:
                core = select_core_tokens(w, cfg.delta, cfg.scorer).core
            else:
                core = frozenset(range(len(w)))
            plan = _EntityPlan(bounds, core)
            plans[ei] = plan
        return plan

    def _core_index(self, cfg: Config) -> dict[int, list[int]]:
        key = (cfg.delta, cfg.scorer, cfg.use_core)
        idx = self._core_postings.get(key)
        if idx is None:
            idx = {}
            for ei in range(len(self.dictionary)):
                ent = self.dictionary[ei]
                for j in self._plan(ei, cfg).core:
                    idx.setdefault(self.index.sid[ent.tokens[j]], []).append(ei)
            self._core_postings[key] = idx
        return idx

    def _doc_idf(self, doc: Document) -> list[float]:
        out = []
        cache = self._idf_cache
        for t in doc.tokens:
            v = cache.get(t)
            if v is None:
                v = self.model.idf(t)
                cache[t] = v
            out.append(v)
        return out

    # -- extraction ---------------------------------------------------------

    def extract_document(self, doc: Document, cfg: Config, stats: Stats | None = None) -> list[Extraction]:
        if stats is None:
            stats = Stats()
        if not doc.tokens:
            return []
        qcache = self._query_cache
        cache = {}
        for t in set(doc.tokens):
            hits = qcache.get((t, cfg.tau))
            if hits is None:
                hits = self.index.query(t, cfg.tau)
                qcache[(t, cfg.tau)] = hits
            cache[t] = hits
        doc_matches = match_document(doc, self.index, cfg.tau, cache)
        doc_idf = self._doc_idf(doc)
        prefix = np.concatenate(([0.0], np.cumsum(doc_idf))).tolist()

        candidates: set[int] = set()
        if cfg.spanning:
            core_index = self._core_index(cfg)
            for sid in doc_matches:
                candidates.update(core_index.get(sid, ()))
        else:
            for sid in doc_matches:
                candidates.update(ei for ei, _ in self.index.postings[sid])

        out: list[Extraction] = []
        t0 = time.perf_counter()
        for ei in sorted(candidates):
            ent = self.dictionary[ei]
            w = self.weighted[ei]
            plan = self._plan(ei, cfg)
            grid = grid_from_doc_matches(ent, self.index, doc_matches)
            ctx = build_span_context(doc_idf, grid, w.idf_values, plan.core)
            if not ctx.landmarks:
                continue
            stats.pairs += 1
            stats.landmarks += len(ctx.landmarks)
            scorer = _WindowScorer(ctx, w, prefix, cfg)
            if cfg.spanning:
                spans = self._spanning_windows(ctx, ei, cfg, stats)
            else:
                spans = self._enumerated_windows(ctx, plan.bounds, stats)
            for ia, ib in spans:
                score = scorer.measure(ia, ib, stats)
                if score is not None:
                    a, b = ctx.landmarks[ia], ctx.landmarks[ib]
                    out.append(Extraction(doc.id, ent.id, (a, b + 1),
                                          (doc.offsets[a][0], doc.offsets[b][1]), score, cfg.mode))
        stats.pair_seconds += time.perf_counter() - t0
        stats.extracted += len(out)
        out.sort(key=Extraction.key)
        return out

    def _enumerated_windows(self, ctx: SpanContext, bounds: MatchingLengthBounds, stats: Stats):
        k = len(ctx.landmarks)
        hi = k if bounds.u >= k else int(bounds.u)
        for i in range(k):
            for cnt in range(bounds.l, hi + 1):
                j = i + cnt - 1
                if j >= k:
                    break
                stats.candidates += 1
                yield i, j

    def _spanning_windows(self, ctx: SpanContext, ei: int, cfg: Config, stats: Stats):
        regions = span_regions(ctx, self.profile(ei, cfg.tau), cfg.delta, cfg.scorer)
        stats.candidates += len(regions)
        lm = ctx.landmarks
        for a, end in regions:
            ia = bisect_left(lm, a)
            ib = bisect_right(lm, end) - 1
            ci = bisect_left(ctx.core_positions, a)
            first_core = ctx.core_positions[ci] if ci < len(ctx.core_positions) else None
            for j in range(ia, ib + 1):
                if first_core is None or lm[j] < first_core:
                    stats.pruned_core += 1
                    continue
                yield ia, j

    def extract(self, docs: Sequence[Document], cfg: Config, threads: int = 1,
                stats: Stats | None = None) -> list[Extraction]:
        if stats is None:
            stats = Stats()
        if threads > 1 and len(docs) > 1:
            results = _parallel_extract(self.dictionary, docs, cfg, threads)
            out = []
            for exts, st in results:
                out.extend(exts)
                stats.add(st)
        else:
            out = []
            for doc in docs:
                out.extend(self.extract_document(doc, cfg, stats))
        out = resolve_overlaps(out, cfg.overlap)
        out.sort(key=Extraction.key)
        return out


class _WindowScorer:
    """Filters and scores landmark-bounded windows of one (document, entity) pair.

    A window is scored as a whole (no free prefix or suffix); text-token weights
    are normalized over the window. Runs of unmatched tokens are collapsed into a
    single deletion column, which leaves the DP value unchanged.
    """

    def __init__(self, ctx: SpanContext, entity: WeightedTokenSet, prefix: list[float], cfg: Config):
        self.ctx = ctx
        self.entity = entity
        self.prefix = prefix
        self.cfg = cfg
        self.overlap_thr = similarity_threshold(cfg.delta, cfg.scorer)
        lm = ctx.landmarks
        # window total = idf of the gaps between landmarks + iota of the landmarks; both
        # running sums are of nonnegative terms so an all-zero window totals exactly 0
        gaps = [0.0]
        iotas = [0.0]
        for k, p in enumerate(lm):
            gaps.append(gaps[-1] + (prefix[p] - prefix[lm[k - 1] + 1] if k else 0.0))
            iotas.append(iotas[-1] + ctx.iota(p))
        self.gaps = gaps
        self.iotas = iotas

    def measure(self, ia: int, ib: int, stats: Stats) -> float | None:
        ctx, ent, cfg = self.ctx, self.entity, self.cfg
        stats.windows += 1
        lm = ctx.landmarks
        m = len(ent)
        M = [0.0] * m
        for p in lm[ia:ib + 1]:
            for r, s in ctx.matches[p]:
                if s > M[r]:
                    M[r] = s
        matched = [r for r in range(m) if M[r] > 0.0]
        if not overlap_weight_filter(ent, matched, cfg.delta, self.overlap_thr):
            stats.pruned_overlap += 1
            return None
        if cfg.scorer == FED and not fed_lower_bound_filter(ent, M, cfg.delta):
            stats.pruned_fed += 1
            return None
        stats.scored += 1
        score = self.score(ia, ib)
        if score + EPS >= cfg.delta:
            return score
        return None

    def score(self, ia: int, ib: int) -> float:
        ctx, ent = self.ctx, self.entity
        lm = ctx.landmarks
        a, b = lm[ia], lm[ib]
        total = (self.gaps[ib + 1] - self.gaps[ia + 1]) + (self.iotas[ib + 1] - self.iotas[ia])
        n_tokens = b - a + 1
        uniform = total <= 0.0
        if uniform:
            def wsum(lo, hi):  # weight of positions lo..hi-1
                return (hi - lo) / n_tokens

            def wpos(p):
                return 1.0 / n_tokens
        else:
            prefix, inv = self.prefix, 1.0 / total

            def wsum(lo, hi):
                return (prefix[hi] - prefix[lo]) * inv

            def wpos(p):
                return ctx.iota(p) * inv

        m = len(ent)
        if self.cfg.scorer == FED:
            cols_w = []
            cols_pos = []
            prev = None
            for p in lm[ia:ib + 1]:
                if prev is not None and p > prev + 1:
                    g = wsum(prev + 1, p)
                    if g > 0.0:
                        cols_w.append(g)
                        cols_pos.append(None)
                cols_w.append(wpos(p))
                cols_pos.append(p)
                prev = p
            c = len(cols_w)
            sims = [-1.0] * (m * c)
            for col, p in enumerate(cols_pos):
                if p is not None:
                    for r, s in ctx.matches[p]:
                        sims[r * c + col] = s
            total_cost = fed_dp(list(ent.weights), cols_w, sims, False)[0]
            return fed_similarity(total_cost)
        pos = lm[ia:ib + 1]
        mat = np.zeros((m, len(pos)))
        cw = []
        for col, p in enumerate(pos):
            cw.append(wpos(p))
            for r, s in ctx.matches[p]:
                mat[r, col] = s
        return fj_from_matrix(ent.weights, cw, mat, 1.0, 1.0)


def resolve_overlaps(extractions: Sequence[Extraction], policy: str = "all") -> list[Extraction]:
    if policy == "all":
        return list(extractions)
    if policy not in ("best", "best-per-span"):
        raise ValueError(f"unknown overlap policy {policy!r}")
    by_doc: dict[str, list[Extraction]] = {}
    for e in extractions:
        by_doc.setdefault(e.doc_id, []).append(e)
    out = []
    for doc_id in sorted(by_doc):
        ranked = sorted(by_doc[doc_id], key=lambda e: (-e.score, -(e.token_span[1] - e.token_span[0]),
                                                      e.entity_id, e.token_span))
        taken: list[tuple[int, int]] = []
        for e in ranked:
            s, t = e.token_span
            if all(t <= s2 or t2 <= s for s2, t2 in taken):
                taken.append((s, t))
                out.append(e)
    out.sort(key=Extraction.key)
    return out


def extract_document(doc: Document, dictionary: Sequence[Entity], index: TokenIndex | None = None,
                     model: IdfModel | None = None, cfg: Config | None = None) -> list[Extraction]:
    """One-shot convenience wrapper; build an Extractor to reuse artifacts across documents."""
    cfg = cfg or Config()
    ex = Extractor(dictionary, cfg.tau, model=model, index=index)
    return resolve_overlaps(ex.extract_document(doc, cfg), cfg.overlap)


# -- process pool -------------------------------------------------------------

_WORKER: Extractor | None = None


def _init_worker(dictionary, tau):
    global _WORKER
    _WORKER = Extractor(dictionary, tau)


def _work(args):
    doc, cfg = args
    st = Stats()
    return _WORKER.extract_document(doc, cfg, st), st


def _parallel_extract(dictionary, docs, cfg, threads):
    with ProcessPoolExecutor(max_workers=threads, initializer=_init_worker,
                             initargs=(dictionary, cfg.tau)) as pool:
        return list(pool.map(_work, [(d, cfg) for d in docs], chunksize=max(1, len(docs) // (4 * threads))))


def default_threads() -> int:
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1))
