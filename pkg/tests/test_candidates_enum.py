import math

import pytest
from hypothesis import given, settings, strategies as st

from fuzzyextract.candidates_enum import (FED, FJ, MatchingLengthBounds, enumerate_candidates,
                                          enumerate_spans, matching_length_bounds)
from fuzzyextract.corpus import WeightedTokenSet, make_document, make_entity
from fuzzyextract.matcher import build_token_index, find_matched_tokens
from fuzzyextract.pipeline import Extractor

from oracles import exhaustive_extract, random_corpus

ENT = WeightedTokenSet.from_idf(["a", "b", "c", "d"], [4, 3, 2, 1])


def test_bounds_examples():
    b = matching_length_bounds(ENT, 0.9, FED)
    assert (b.l, b.u) == (3, 5)
    for mode in (FED, FJ):
        b = matching_length_bounds(ENT, 1.0, mode)
        assert (b.l, b.u) == (4, 4)


def test_fj_bounds_degenerate_below_one_third():
    b = matching_length_bounds(ENT, 0.3, FJ)
    assert b.l == 1 and b.u == math.inf


def test_fj_bounds_use_fj_threshold():
    # theta = (3 * 0.9 - 1) / 1.9 = 0.8947: 0.4 + 0.3 + 0.2 reaches it
    b = matching_length_bounds(ENT, 0.9, FJ)
    assert b.l == 3 and b.u == 5


def test_invalid_bounds():
    with pytest.raises(ValueError):
        MatchingLengthBounds(3, 2)
    with pytest.raises(ValueError):
        matching_length_bounds(ENT, 0.0, FED)


@given(st.integers(0, 25))
def test_naive_count(k):
    assert len(list(enumerate_spans(k, MatchingLengthBounds(1, k or 1)))) == k * (k + 1) // 2


@given(st.integers(0, 25), st.integers(1, 30), st.integers(0, 30))
def test_bounded_count(k, l, extra):
    b = MatchingLengthBounds(l, l + extra)
    spans = list(enumerate_spans(k, b))
    assert len(spans) <= (b.u - b.l + 1) * k
    assert all(b.l <= j - i + 1 <= b.u for i, j in spans)
    assert len(set(spans)) == len(spans)
    if l > k:
        assert spans == []
    if l == 1 and extra == 0:
        assert len(spans) == k


def test_enumerate_candidates_windows():
    ent = make_entity(1, "alpha beta")
    doc = make_document("d", "alpha x beta y alpha")
    grid = find_matched_tokens(doc, ent, build_token_index([ent], 0.8), 0.8)
    wins = enumerate_candidates(grid, MatchingLengthBounds(2, 2))
    assert [w.doc_span for w in wins] == [(0, 2), (2, 4)]
    assert [o.doc_pos for o in wins[0].matched] == [0, 2]


@settings(max_examples=25)
@given(st.integers(0, 5000), st.sampled_from([(0.8, 0.8), (0.9, 0.8), (0.9, 0.9), (0.95, 0.8), (1.0, 1.0)]))
def test_qualifying_windows_within_bounds(seed, params):
    delta, tau = params
    ents, docs = random_corpus(seed, max_entities=10, max_doc=50)
    ex = Extractor(ents, tau)
    ref = exhaustive_extract(ents, docs, delta, tau)
    idx = ex.index
    for sc, mode in (("fed", FED), ("fj", FJ)):
        for (doc_id, eid, a, b), _ in ref[sc].items():
            ent = ents[eid - 1]
            prof = ex.profile(eid - 1, tau)
            bounds = matching_length_bounds(ex.weighted[eid - 1], delta, mode, prof.cap, prof.floor)
            pos = find_matched_tokens(docs[0], ent, idx, tau).positions()
            cnt = sum(1 for p in pos if a <= p < b)
            assert bounds.l <= cnt <= bounds.u
