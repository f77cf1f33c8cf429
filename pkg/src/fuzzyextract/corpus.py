"""Tokenization, dictionary/document loading and the IDF weight model."""
from __future__ import annotations

import json
import math
import os
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

_TOKEN_RE = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class Entity:
    id: int
    tokens: tuple[str, ...]
    text: str = ""


@dataclass(frozen=True)
class Document:
    id: str
    tokens: tuple[str, ...]
    offsets: tuple[tuple[int, int], ...]
    text: str = ""


def tokenize(raw_text: str) -> tuple[list[str], list[tuple[int, int]]]:
    """Split on non-alphanumeric runs and lowercase.

    Lowercasing happens before splitting so that characters whose lowercase form
    is not alphanumeric (e.g. the combining dot produced by 'İ') are treated as
    separators. Offsets point into raw_text.
    """
    if not raw_text:
        return [], []
    if raw_text.isascii():
        lowered = raw_text.lower()
        src = None
    else:
        parts = []
        src = []
        for i, ch in enumerate(raw_text):
            low = ch.lower()
            parts.append(low)
            src.extend([i] * len(low))
        lowered = "".join(parts)
    tokens = []
    offsets = []
    for m in _TOKEN_RE.finditer(lowered):
        tokens.append(m.group())
        if src is None:
            offsets.append((m.start(), m.end()))
        else:
            offsets.append((src[m.start()], src[m.end() - 1] + 1))
    return tokens, offsets


def make_document(doc_id: str, text: str) -> Document:
    tokens, offsets = tokenize(text)
    return Document(doc_id, tuple(tokens), tuple(offsets), text)


def make_entity(entity_id: int, text: str) -> Entity:
    tokens, _ = tokenize(text)
    return Entity(entity_id, tuple(tokens), text)


@dataclass(frozen=True)
class IdfModel:
    entity_count: int
    doc_freq: dict[str, int] = field(default_factory=dict)

    def idf(self, token: str) -> float:
        """log(N / (N_t + 1)), clamped at zero."""
        value = math.log(self.entity_count / (self.doc_freq.get(token, 0) + 1))
        return value if value > 0.0 else 0.0


def build_idf_model(dictionary: Sequence[Entity]) -> IdfModel:
    if not dictionary:
        raise ValueError("empty dictionary")
    freq: Counter[str] = Counter()
    for ent in dictionary:
        freq.update(set(ent.tokens))
    return IdfModel(len(dictionary), dict(freq))


@dataclass(frozen=True)
class WeightedTokenSet:
    tokens: tuple[str, ...]
    idf_values: tuple[float, ...]
    total_idf: float
    weights: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    @classmethod
    def from_idf(cls, tokens: Sequence[str], idf_values: Sequence[float]) -> "WeightedTokenSet":
        if len(tokens) != len(idf_values):
            raise ValueError("tokens and idf values differ in length")
        idfs = tuple(max(0.0, float(v)) for v in idf_values)
        total = math.fsum(idfs)
        if total > 0.0:
            weights = tuple(v / total for v in idfs)
        elif tokens:
            weights = tuple(1.0 / len(tokens) for _ in tokens)
        else:
            weights = ()
        return cls(tuple(tokens), idfs, total, weights)

    @classmethod
    def with_weights(cls, tokens: Sequence[str], weights: Sequence[float]) -> "WeightedTokenSet":
        """Explicit weights, not renormalized (used for the unit-weight Jaccard reduction)."""
        w = tuple(float(x) for x in weights)
        return cls(tuple(tokens), w, math.fsum(w), w)

    def subset_weight(self, indices: Iterable[int]) -> float:
        return math.fsum(self.weights[i] for i in set(indices))


def weigh(tokens: Sequence[str], model: IdfModel) -> WeightedTokenSet:
    if not tokens:
        raise ValueError("empty token sequence")
    return WeightedTokenSet.from_idf(tokens, [model.idf(t) for t in tokens])


def load_dictionary(path: str | os.PathLike) -> list[Entity]:
    """One entity per line; the 1-based line number is the id. Lines without tokens are skipped."""
    entities = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            ent = make_entity(lineno, line.rstrip("\n"))
            if ent.tokens:
                entities.append(ent)
    return entities


def load_documents(path: str | os.PathLike) -> list[Document]:
    """A directory of .txt files (id = file stem) or a JSON-lines file of {"id", "text"}."""
    docs = []
    if os.path.isdir(path):
        for name in sorted(os.listdir(path)):
            if not name.endswith(".txt"):
                continue
            with open(os.path.join(path, name), encoding="utf-8") as fh:
                docs.append(make_document(name[:-4], fh.read()))
        return docs
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            docs.append(make_document(str(rec["id"]), rec["text"]))
    return docs
