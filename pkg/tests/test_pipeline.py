import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from fuzzyextract.corpus import make_document, make_entity
from fuzzyextract.matcher import TokenIndex
from fuzzyextract.pipeline import (MODES, Config, Extraction, Extractor, Stats, extract_document,
                                   resolve_overlaps)

from oracles import exhaustive_extract, random_corpus

OXFORD = [make_entity(1, "the university of oxford")]


def keyset(out):
    return {(e.doc_id, e.entity_id, *e.token_span): e.score for e in out}


def test_university_example():
    doc = make_document("d", "Researchers at the Univercity of Oxfort published a study.")
    out = extract_document(doc, OXFORD, cfg=Config(0.8, 0.8, "fed-s"))
    assert [(e.entity_id, e.token_span) for e in out] == [(1, (2, 6))]
    assert doc.text[slice(*out[0].char_span)] == "the Univercity of Oxfort"
    ref = exhaustive_extract(OXFORD, [doc], 0.8, 0.8, scorers=("fed",))["fed"]
    assert keyset(out) == pytest.approx(ref)


def test_defaults():
    cfg = Config()
    assert (cfg.delta, cfg.tau, cfg.mode, cfg.overlap) == (0.9, 0.8, "fed-s", "all")


@pytest.mark.parametrize("bad", [dict(delta=0.0), dict(tau=1.5), dict(mode="x"), dict(overlap="some")])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        Config(**bad)


def test_empty_document():
    ex = Extractor(OXFORD, 0.8)
    for mode in MODES:
        assert ex.extract([make_document("e", "")], Config(mode=mode)) == []
        assert ex.extract([make_document("e", "nothing relevant here")], Config(mode=mode)) == []


def phrase_occurrences(dictionary, docs):
    out = set()
    for doc in docs:
        for ent in dictionary:
            m = len(ent.tokens)
            for a in range(len(doc.tokens) - m + 1):
                if doc.tokens[a:a + m] == ent.tokens:
                    out.add((doc.id, ent.id, a, a + m))
    return out


@settings(max_examples=20, suppress_health_check=[HealthCheck.filter_too_much])
@given(st.integers(0, 10_000))
def test_exact_thresholds_find_exact_phrases(seed):
    ents, docs = random_corpus(seed, max_entities=12, max_doc=80)
    ex = Extractor(ents, 1.0)
    # a token in (nearly) every entity has idf 0 and can be inserted or deleted for free
    assume(all(ex.model.idf(t) > 0.0 for e in ents for t in e.tokens))
    for mode in ("fed-e", "fed-s", "fed-a"):
        assert set(keyset(ex.extract(docs, Config(1.0, 1.0, mode)))) == phrase_occurrences(ents, docs)
    # Fuzzy Jaccard is order-free: score 1 means the window is a permutation of the entity
    for mode in ("fj-e", "fj-s"):
        for doc_id, eid, a, b in keyset(ex.extract(docs, Config(1.0, 1.0, mode))):
            assert sorted(docs[0].tokens[a:b]) == sorted(ents[eid - 1].tokens)


@settings(max_examples=15)
@given(st.integers(0, 10_000), st.sampled_from([0.8, 0.9, 0.95]), st.sampled_from([0.8, 0.9]))
def test_modes_agree_with_exhaustive_scoring(seed, delta, tau):
    ents, docs = random_corpus(seed, max_entities=10, max_doc=60)
    ex = Extractor(ents, tau)
    ref = exhaustive_extract(ents, docs, delta, tau)
    for mode in MODES:
        got = keyset(ex.extract(docs, Config(delta, tau, mode)))
        want = ref["fj" if mode.startswith("fj") else "fed"]
        assert set(got) == set(want), mode
        assert all(got[k] == pytest.approx(want[k], abs=1e-9) for k in got)
        assert all(v + 1e-9 >= delta for v in got.values())


def test_core_tokens_off_is_equivalent():
    ents, docs = random_corpus(17, max_entities=20)
    ex = Extractor(ents, 0.8)
    for mode in ("fed-s", "fj-s"):
        on = ex.extract(docs, Config(0.85, 0.8, mode))
        off = ex.extract(docs, Config(0.85, 0.8, mode, core_tokens=False))
        assert keyset(on) == keyset(off)


def test_determinism_and_threads():
    ents, docs = random_corpus(5, max_entities=25, n_docs=4)
    ex = Extractor(ents, 0.8)
    cfg = Config(0.85, 0.8, "fed-s")
    a = [e.to_record() for e in ex.extract(docs, cfg)]
    b = [e.to_record() for e in Extractor(ents, 0.8).extract(docs, cfg)]
    c = [e.to_record() for e in ex.extract(docs, cfg, threads=2)]
    assert a == b == c and a


def test_stats_counters():
    ents, docs = random_corpus(8, max_entities=20)
    ex = Extractor(ents, 0.8)
    se, ss = Stats(), Stats()
    e = ex.extract(docs, Config(0.9, 0.8, "fed-e"), stats=se)
    s = ex.extract(docs, Config(0.9, 0.8, "fed-s"), stats=ss)
    assert se.extracted == len(e) and ss.extracted == len(s)
    assert se.windows == se.candidates
    assert se.windows == se.pruned_overlap + se.pruned_fed + se.scored
    assert ss.candidates <= ss.landmarks


def test_record_format():
    e = Extraction("d", 3, (1, 4), (5, 20), 0.91234567, "fj-s")
    assert e.to_record() == {"doc_id": "d", "entity_id": 3, "start_char": 5, "end_char": 20,
                             "start_token": 1, "end_token": 4, "score": 0.912346, "mode": "fj-s"}


def ext(eid, span, score, doc="d"):
    return Extraction(doc, eid, span, span, score, "fed-s")


def test_resolve_overlaps():
    disjoint = [ext(1, (0, 2), 0.9), ext(2, (3, 5), 0.95)]
    assert resolve_overlaps(disjoint, "best") == disjoint
    same = [ext(1, (0, 2), 0.9), ext(2, (0, 2), 0.95)]
    assert resolve_overlaps(same, "best-per-span") == [same[1]]
    assert resolve_overlaps(same, "all") == same
    # equal scores: the longer span wins, then the lower entity id
    tie = [ext(2, (0, 3), 0.9), ext(1, (1, 3), 0.9), ext(3, (0, 3), 0.9)]
    assert resolve_overlaps(tie, "best") == [tie[0]]
    with pytest.raises(ValueError):
        resolve_overlaps(same, "nope")


def test_shared_index_reuse():
    ents, docs = random_corpus(9)
    idx = TokenIndex(ents, 0.8)
    a = Extractor(ents, 0.8, index=idx).extract(docs, Config())
    assert keyset(a) == keyset(Extractor(ents, 0.8).extract(docs, Config()))
