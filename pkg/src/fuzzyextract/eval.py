"""Precision/recall/F1 against labelled spans, and a synthetic labelled-corpus generator."""
from __future__ import annotations

import json
import math
import random
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Iterable, Sequence

from .corpus import Document, Entity, IdfModel, WeightedTokenSet, build_idf_model, make_document
from .fuzzy_ed import fed_similarity, fuzzy_ed_cost
from .fuzzy_jaccard import fuzzy_jaccard_similarity
from .simcore import EPS, edit_similarity


@dataclass(frozen=True)
class Label:
    doc_id: str
    start_char: int
    end_char: int
    entity_id: int

    def to_record(self) -> dict:
        return {"doc_id": self.doc_id, "start_char": self.start_char,
                "end_char": self.end_char, "entity_id": self.entity_id}


def _as_key(item) -> tuple:
    if isinstance(item, Label):
        return (item.doc_id, item.start_char, item.end_char, item.entity_id)
    if isinstance(item, dict):
        return (str(item["doc_id"]), int(item["start_char"]), int(item["end_char"]), int(item["entity_id"]))
    if hasattr(item, "char_span"):
        return (item.doc_id, item.char_span[0], item.char_span[1], item.entity_id)
    doc_id, s, e, ent = item
    return (str(doc_id), int(s), int(e), int(ent))


def score_predictions(predictions: Iterable, truth: Iterable) -> tuple[float, float, float]:
    """Exact (span, entity) matching. Undefined ratios are reported as 0."""
    pred = {_as_key(p) for p in predictions}
    gold = {_as_key(t) for t in truth}
    tp = len(pred & gold)
    p = tp / len(pred) if pred else 0.0
    r = tp / len(gold) if gold else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


def recall_by(predictions: Iterable, truth: Iterable) -> float:
    return score_predictions(predictions, truth)[1]


def load_jsonl(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


# ---------------------------------------------------------------------------
# synthetic data

_COMMON = (
    "university", "of", "the", "institute", "national", "research", "college", "center",
    "for", "and", "technology", "science", "school", "department", "international",
    "hospital", "laboratory", "foundation", "society", "association", "company", "group",
    "medical", "royal", "state", "academy", "council", "engineering", "applied", "general",
)
_ALPHABET = "abcdefghijklmnopqrstuvwxyz"
_VOWELS = "aeiou"
_CONSONANTS = "bcdfghjklmnprstvwz"


def _pseudo_word(rng: random.Random, lo: int = 3, hi: int = 11) -> str:
    n = rng.randint(lo, hi)
    start = rng.random() < 0.5
    return "".join(rng.choice(_VOWELS if (i % 2 == 0) == start else _CONSONANTS) for i in range(n))


def generate_dictionary(n_entities: int, seed: int = 0, n_names: int | None = None) -> list[Entity]:
    """Organisation-like names: Zipf-distributed common words mixed with mostly distinct names."""
    rng = random.Random(seed)
    if n_names is None:
        n_names = max(50, 4 * n_entities)
    names = []
    seen_names = set(_COMMON)
    while len(names) < n_names:
        w = _pseudo_word(rng)
        if w not in seen_names:
            seen_names.add(w)
            names.append(w)
    common_cum = list(accumulate(1.0 / (i + 1) for i in range(len(_COMMON))))
    name_cum = list(accumulate(1.0 / (i + 1) ** 0.3 for i in range(len(names))))

    def pick(cum, pool):
        return pool[bisect_right(cum, rng.random() * cum[-1])]

    out: list[Entity] = []
    seen = set()
    while len(out) < n_entities:
        n_tok = rng.choice((1, 2, 2, 3, 3, 3, 4, 4, 5))
        n_common = min(n_tok - 1, rng.choice((0, 1, 1, 2)))
        toks = [pick(common_cum, _COMMON) for _ in range(n_common)]
        toks += [pick(name_cum, names) for _ in range(n_tok - n_common)]
        rng.shuffle(toks)
        key = tuple(toks)
        if key in seen:
            continue
        seen.add(key)
        out.append(Entity(len(out) + 1, key, " ".join(key)))
    return out


@dataclass
class CorruptionTrace:
    planted_occurrences: int = 0
    planted_tokens: int = 0
    selected_tokens: int = 0    # Bernoulli(typo_rate) successes, one draw per planted token
    char_edits: int = 0
    variant_edits: int = 0
    skipped: int = 0            # selections rejected by the similarity guard or with no legal edit


@dataclass
class SyntheticCorpus:
    documents: list[Document]
    truth: list[Label]
    trace: CorruptionTrace = field(default_factory=CorruptionTrace)


def _char_edit(rng: random.Random, tok: str, alphabet: str, min_eds: float) -> str | None:
    ops = []
    if len(tok) >= 2:
        ops += ["sub", "del"]
    ops.append("ins")
    rng.shuffle(ops)
    for op in ops:
        for _ in range(4):
            i = rng.randrange(len(tok) + (op == "ins"))
            ch = rng.choice(alphabet)
            if op == "sub":
                new = tok[:i] + ch + tok[i + 1:]
            elif op == "del":
                new = tok[:i] + tok[i + 1:]
            else:
                new = tok[:i] + ch + tok[i:]
            if new != tok and edit_similarity(tok, new) + EPS >= min_eds:
                return new
    return None


def occurrence_scores(entity: WeightedTokenSet, tokens: Sequence[str], model: IdfModel,
                      tau: float) -> tuple[float, float]:
    """(FuzzyED, Fuzzy Jaccard) of a token sequence scored as a whole window."""
    iota = []
    for s in tokens:
        best_j, best = None, -1.0
        for j, e in enumerate(entity.tokens):
            v = edit_similarity(e, s)
            if v + EPS >= tau and v > best:
                best_j, best = j, v
        iota.append(entity.idf_values[best_j] if best_j is not None else model.idf(s))
    cand = WeightedTokenSet.from_idf(tokens, iota)
    fed = fed_similarity(fuzzy_ed_cost(entity, cand, tau, free_ends=False).total)
    return fed, fuzzy_jaccard_similarity(entity, cand, tau)


def generate_synthetic_corpus(dictionary: Sequence[Entity], n_docs: int, typo_rate: float,
                              seed: int = 0, doc_tokens: int = 100, plants_per_doc: int = 4,
                              tau: float = 0.8, guard: float = 0.9,
                              common_filler: float = 0.1) -> SyntheticCorpus:
    """Documents of filler with planted, optionally corrupted, entity occurrences.

    Every planted token is selected for corruption with probability typo_rate. A
    selected token receives one character edit keeping eds >= tau; tokens too short
    for that instead trigger a drop or duplicate of the entity's minimum-weight token.
    An edit is kept only while the occurrence still scores >= guard under both
    scorers, so extraction at delta <= guard (and the same tau) recovers every label.
    """
    if not 0.0 <= typo_rate <= 1.0:
        raise ValueError("typo_rate must lie in [0, 1]")
    rng = random.Random(seed)
    model = build_idf_model(dictionary)
    weighted = [WeightedTokenSet.from_idf(e.tokens, [model.idf(t) for t in e.tokens]) for e in dictionary]
    chars = Counter()
    lengths = []
    tok_freq = Counter()
    for e in dictionary:
        for t in e.tokens:
            chars.update(t)
            lengths.append(len(t))
            tok_freq[t] += 1
    alphabet = "".join(sorted(chars)) or _ALPHABET
    char_pool = list(chars.elements())
    common = [t for t, _ in tok_freq.most_common(20)]
    dict_tokens = set(tok_freq)
    trace = CorruptionTrace()
    docs: list[Document] = []
    truth: list[Label] = []

    def filler() -> str:
        if common and rng.random() < common_filler:
            return rng.choice(common)
        while True:
            w = "".join(rng.choice(char_pool) for _ in range(rng.choice(lengths)))
            if w not in dict_tokens:
                return w

    for d in range(n_docs):
        doc_id = f"doc{d:05d}"
        words: list[str] = []
        spans: list[tuple[int, int, int]] = []
        n_plants = rng.randint(max(1, plants_per_doc // 2), plants_per_doc + plants_per_doc // 2)
        n_fill = max(0, doc_tokens - 3 * n_plants)
        gaps = sorted(rng.randint(0, n_fill) for _ in range(n_plants))
        prev = 0
        for g in gaps:
            words.extend(filler() for _ in range(g - prev))
            prev = g
            ei = rng.randrange(len(dictionary))
            occ = _plant(rng, dictionary[ei], weighted[ei], model, typo_rate, tau, guard, alphabet, trace)
            spans.append((len(words), len(words) + len(occ), ei))
            words.extend(occ)
            words.append(filler())  # keep occurrences apart
        words.extend(filler() for _ in range(n_fill - prev))
        doc = make_document(doc_id, " ".join(words))
        assert list(doc.tokens) == words
        for a, b, ei in spans:
            truth.append(Label(doc_id, doc.offsets[a][0], doc.offsets[b - 1][1], dictionary[ei].id))
        docs.append(doc)
    return SyntheticCorpus(docs, truth, trace)


def _plant(rng, entity: Entity, weighted: WeightedTokenSet, model, typo_rate, tau, guard,
           alphabet, trace: CorruptionTrace) -> list[str]:
    tokens = list(entity.tokens)
    trace.planted_occurrences += 1
    trace.planted_tokens += len(tokens)
    selected = [j for j in range(len(tokens)) if rng.random() < typo_rate]
    trace.selected_tokens += len(selected)

    def passes(cand):
        return min(occurrence_scores(weighted, cand, model, tau)) + EPS >= guard

    want_variant = 0
    for j in selected:
        new = _char_edit(rng, tokens[j], alphabet, tau)
        if new is None:
            want_variant += 1
            continue
        cand = tokens[:j] + [new] + tokens[j + 1:]
        if passes(cand):
            tokens = cand
            trace.char_edits += 1
        else:
            trace.skipped += 1
    if want_variant:
        # one drop/duplicate per occurrence; any further short-token selections are skipped
        lo = min(range(len(tokens)), key=lambda i: (weighted.weights[i], i))
        if len(tokens) >= 2 and rng.random() < 0.5:
            cand = tokens[:lo] + tokens[lo + 1:]
        else:
            cand = tokens[:lo + 1] + [tokens[lo]] + tokens[lo + 1:]
        if passes(cand):
            tokens = cand
            trace.variant_edits += 1
            want_variant -= 1
        trace.skipped += want_variant
    return tokens
