import math

import pytest

from fuzzyextract.eval import (Label, generate_dictionary, generate_synthetic_corpus,
                               occurrence_scores, score_predictions)
from fuzzyextract.corpus import build_idf_model, weigh
from fuzzyextract.pipeline import Config, Extractor


def labels(n, doc="d"):
    return [Label(doc, 10 * i, 10 * i + 5, i + 1) for i in range(n)]


def test_score_examples():
    truth = labels(100)
    assert score_predictions(truth, truth) == (1.0, 1.0, 1.0)
    pred = truth[:90] + [Label("d", 5000 + i, 5001 + i, 1) for i in range(10)]
    p, r, f1 = score_predictions(pred, truth)
    assert (p, r, f1) == pytest.approx((0.9, 0.9, 0.9))
    assert score_predictions([], truth) == (0.0, 0.0, 0.0)


def test_score_accepts_records_and_extractions():
    truth = [Label("d", 0, 5, 1).to_record()]
    pred = [{"doc_id": "d", "start_char": 0, "end_char": 5, "entity_id": 1, "score": 0.93}]
    assert score_predictions(pred, truth) == (1.0, 1.0, 1.0)
    assert score_predictions([{**pred[0], "entity_id": 2}], truth)[2] == 0.0


@pytest.fixture(scope="module")
def dictionary():
    return generate_dictionary(300, seed=1)


def test_dictionary_shape(dictionary):
    assert len(dictionary) == 300
    assert len({e.tokens for e in dictionary}) == 300
    assert [e.id for e in dictionary] == list(range(1, 301))
    assert generate_dictionary(300, seed=1) == dictionary


def test_seed_determinism(dictionary):
    a = generate_synthetic_corpus(dictionary, 10, 0.3, seed=5)
    b = generate_synthetic_corpus(dictionary, 10, 0.3, seed=5)
    assert [d.text for d in a.documents] == [d.text for d in b.documents]
    assert a.truth == b.truth
    c = generate_synthetic_corpus(dictionary, 10, 0.3, seed=6)
    assert [d.text for d in a.documents] != [d.text for d in c.documents]


def test_truth_spans_are_planted_tokens(dictionary):
    sc = generate_synthetic_corpus(dictionary, 20, 0.0, seed=2)
    by_id = {d.id: d for d in sc.documents}
    for lab in sc.truth:
        text = by_id[lab.doc_id].text[lab.start_char:lab.end_char]
        assert text == dictionary[lab.entity_id - 1].text


def test_zero_typo_recovered_exactly(dictionary):
    sc = generate_synthetic_corpus(dictionary, 30, 0.0, seed=3)
    assert sc.trace.char_edits == sc.trace.variant_edits == 0
    ex = Extractor(dictionary, 1.0)
    out = ex.extract(sc.documents, Config(1.0, 1.0, "fed-s"))
    assert score_predictions(out, sc.truth)[1] == 1.0
    # single-name entities nested in longer planted names are real but unlabelled matches;
    # keeping the longest of equally scored overlapping spans leaves exactly the plants
    out = ex.extract(sc.documents, Config(1.0, 1.0, "fed-s", overlap="best"))
    assert score_predictions(out, sc.truth) == (1.0, 1.0, 1.0)


def test_corruption_rate_binomial(dictionary):
    sc = generate_synthetic_corpus(dictionary, 100, 0.3, seed=4)
    n = sc.trace.planted_tokens
    mean, sd = 0.3 * n, math.sqrt(n * 0.3 * 0.7)
    assert abs(sc.trace.selected_tokens - mean) <= 2.576 * sd
    t = sc.trace
    assert t.char_edits + t.variant_edits + t.skipped == t.selected_tokens
    assert t.char_edits > 0


def test_recall_one_up_to_guard(dictionary):
    sc = generate_synthetic_corpus(dictionary, 60, 0.3, seed=8)
    ex = Extractor(dictionary, 0.8)
    for mode in ("fed-s", "fj-s"):
        for delta in (0.9, 0.85):
            out = ex.extract(sc.documents, Config(delta, 0.8, mode))
            assert score_predictions(out, sc.truth)[1] == 1.0


def test_planted_occurrences_pass_guard(dictionary):
    sc = generate_synthetic_corpus(dictionary, 30, 0.5, seed=9)
    model = build_idf_model(dictionary)
    by_id = {d.id: d for d in sc.documents}
    for lab in sc.truth:
        doc = by_id[lab.doc_id]
        toks = [t for t, (a, b) in zip(doc.tokens, doc.offsets) if a >= lab.start_char and b <= lab.end_char]
        w = weigh(dictionary[lab.entity_id - 1].tokens, model)
        assert min(occurrence_scores(w, toks, model, 0.8)) + 1e-9 >= 0.9


def test_invalid_typo_rate(dictionary):
    with pytest.raises(ValueError):
        generate_synthetic_corpus(dictionary, 1, 1.5)
