import json
import math

import pytest
from hypothesis import given, strategies as st

from fuzzyextract.corpus import (Entity, WeightedTokenSet, build_idf_model, load_dictionary,
                                 load_documents, make_document, make_entity, tokenize, weigh)


def ents(*texts):
    return [make_entity(i + 1, t) for i, t in enumerate(texts)]


def test_tokenize_examples():
    assert tokenize("The University of Oxford")[0] == ["the", "university", "of", "oxford"]
    assert tokenize("") == ([], [])
    assert tokenize("Univercity-of  Oxford.")[0] == ["univercity", "of", "oxford"]


def test_tokenize_offsets_point_into_source():
    raw = "  Ünïversité--of_Oxford, 2024!"
    toks, offs = tokenize(raw)
    assert toks == ["ünïversité", "of", "oxford", "2024"]
    for t, (a, b) in zip(toks, offs):
        assert raw[a:b].lower() == t
    assert all(offs[i][1] <= offs[i + 1][0] for i in range(len(offs) - 1))


@given(st.text(max_size=60))
def test_tokenize_idempotent(raw):
    toks, offs = tokenize(raw)
    assert tokenize(" ".join(toks))[0] == toks
    assert len(toks) == len(offs)
    assert all(t and not any(c.isspace() for c in t) for t in toks)


def test_idf_examples():
    model = build_idf_model(ents("a b", "a c", "a d", "a e"))
    assert model.idf("b") == pytest.approx(math.log(2))
    assert model.idf("a") == 0.0  # log(4/5) clamped
    assert model.idf("zzz") == pytest.approx(math.log(4))


def test_idf_counts_each_entity_once():
    model = build_idf_model(ents("a a a", "b"))
    assert model.doc_freq["a"] == 1


def test_empty_dictionary_rejected():
    with pytest.raises(ValueError, match="empty dictionary"):
        build_idf_model([])


@given(st.integers(1, 50), st.integers(0, 49))
def test_idf_monotone_in_doc_freq(n, nt):
    nt = min(nt, n)
    model_a = build_idf_model([Entity(i, ("t",) if i < nt else ("u",), "") for i in range(n)])
    model_b = build_idf_model([Entity(i, ("t",) if i <= nt else ("u",), "") for i in range(n)])
    assert model_b.idf("t") <= model_a.idf("t") + 1e-12


def test_weigh_examples():
    w = WeightedTokenSet.from_idf(list("abcd"), [4, 3, 2, 1])
    assert w.weights == pytest.approx([0.4, 0.3, 0.2, 0.1])
    assert WeightedTokenSet.from_idf(["x"], [2.5]).weights == (1.0,)
    assert WeightedTokenSet.from_idf(["x", "y"], [0, 0]).weights == (0.5, 0.5)


def test_weigh_uses_model():
    model = build_idf_model(ents("a b", "a c", "d"))
    w = weigh(["a", "b"], model)
    assert w.idf_values == (model.idf("a"), model.idf("b"))
    with pytest.raises(ValueError):
        weigh([], model)


@given(st.lists(st.floats(0, 20, allow_nan=False), min_size=1, max_size=8))
def test_weights_normalized(idfs):
    w = WeightedTokenSet.from_idf([f"t{i}" for i in range(len(idfs))], idfs)
    assert math.fsum(w.weights) == pytest.approx(1.0, abs=1e-9)
    assert all(0.0 <= x <= 1.0 for x in w.weights)


def test_load_dictionary_line_ids(tmp_path):
    p = tmp_path / "dict.txt"
    p.write_text("The University of Oxford\n\n  \nMIT\n", encoding="utf-8")
    d = load_dictionary(p)
    assert [(e.id, e.tokens) for e in d] == [(1, ("the", "university", "of", "oxford")), (4, ("mit",))]


def test_load_documents_dir_and_jsonl(tmp_path):
    (tmp_path / "docs").mkdir()
    (tmp_path / "docs" / "b.txt").write_text("beta gamma", encoding="utf-8")
    (tmp_path / "docs" / "a.txt").write_text("alpha", encoding="utf-8")
    docs = load_documents(tmp_path / "docs")
    assert [(d.id, d.tokens) for d in docs] == [("a", ("alpha",)), ("b", ("beta", "gamma"))]
    jl = tmp_path / "docs.jsonl"
    jl.write_text(json.dumps({"id": "x", "text": "Hello, world"}) + "\n", encoding="utf-8")
    assert load_documents(jl)[0].tokens == ("hello", "world")


def test_document_offsets():
    d = make_document("d", "Foo  bar")
    assert d.offsets == ((0, 3), (5, 8))
