"""Finding matched text tokens: a bigram inverted index with count and length filters.

Candidates that pass the filters are verified with an exact edit distance, so
the result is exactly {(p, j): eds(doc[p], entity[j]) >= tau}.
"""
from __future__ import annotations

import math
from array import array
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import Document, Entity
from .kernels import count_filter
from .simcore import EPS, edit_similarity_at_least, max_edits


@dataclass(frozen=True)
class MatchOccurrence:
    doc_pos: int
    entity_token_idx: int
    sim: float


@dataclass(frozen=True)
class MatchGrid:
    """Matches of one entity in one document, sorted by (doc_pos, entity_token_idx)."""
    occurrences: tuple[MatchOccurrence, ...]

    def positions(self) -> list[int]:
        out: list[int] = []
        for occ in self.occurrences:
            if not out or out[-1] != occ.doc_pos:
                out.append(occ.doc_pos)
        return out

    def by_position(self) -> dict[int, list[tuple[int, float]]]:
        out: dict[int, list[tuple[int, float]]] = {}
        for occ in self.occurrences:
            out.setdefault(occ.doc_pos, []).append((occ.entity_token_idx, occ.sim))
        return out

    def __len__(self) -> int:
        return len(self.occurrences)


def bigrams(token: str) -> list[str]:
    return [token[i:i + 2] for i in range(len(token) - 1)]


class TokenIndex:
    """Inverted index from bigrams to distinct entity-token strings.

    `postings[sid]` lists (entity position in the dictionary, token index) pairs.
    The index itself does not depend on tau; `tau` is only the default for queries.
    """

    def __init__(self, dictionary: Sequence[Entity], tau: float):
        if not 0.0 < tau <= 1.0:
            raise ValueError("tau must lie in (0, 1]")
        self.tau = tau
        self.strings: list[str] = []
        self.sid: dict[str, int] = {}
        postings: list[list[tuple[int, int]]] = []
        for ei, ent in enumerate(dictionary):
            for j, tok in enumerate(ent.tokens):
                s = self.sid.get(tok)
                if s is None:
                    s = len(self.strings)
                    self.sid[tok] = s
                    self.strings.append(tok)
                    postings.append([])
                postings[s].append((ei, j))
        self.postings: list[tuple[tuple[int, int], ...]] = [tuple(p) for p in postings]
        grams: dict[str, list[tuple[int, int]]] = defaultdict(list)
        by_length: dict[int, list[int]] = defaultdict(list)
        for s, tok in enumerate(self.strings):
            by_length[len(tok)].append(s)
            for g, c in Counter(bigrams(tok)).items():
                grams[g].append((s, c))
        self.by_length = dict(by_length)
        # flat posting arrays for the count-filter kernel
        self.gram_id = {g: k for k, g in enumerate(grams)}
        self._offsets = array("q", [0])
        self._post_sids = array("i")
        self._post_cnts = array("i")
        for g, lst in grams.items():
            for s, c in lst:
                self._post_sids.append(s)
                self._post_cnts.append(c)
            self._offsets.append(len(self._post_sids))
        self._str_len = array("i", (len(t) for t in self.strings))
        self._scratch = array("i", bytes(4 * len(self.strings)))

    def query(self, token: str, tau: float | None = None) -> list[tuple[int, float]]:
        """All (sid, eds) with eds(token, strings[sid]) >= tau, sorted by sid."""
        if tau is None:
            tau = self.tau
        if tau >= 1.0 - EPS:
            s = self.sid.get(token)
            return [] if s is None else [(s, 1.0)]
        L = len(token)
        lo = max(1, int(math.ceil(tau * L - EPS)))
        hi = int(math.floor(L / tau + EPS))
        need = array("i", bytes(4 * (hi + 1)))
        cands: set[int] = set()
        for length in range(lo, hi + 1):
            if length not in self.by_length:
                continue
            longest = max(L, length)
            n = (longest - 1) - 2 * max_edits(longest, tau)
            if n <= 0:
                cands.update(self.by_length[length])  # count filter is vacuous here
            else:
                need[length] = n
        gids, cnts = [], []
        for g, c in Counter(bigrams(token)).items():
            k = self.gram_id.get(g)
            if k is not None:
                gids.append(k)
                cnts.append(c)
        if gids:
            cands.update(count_filter(gids, cnts, self._offsets, self._post_sids, self._post_cnts,
                                      self._str_len, need, self._scratch))
        strings = self.strings
        out = []
        for s in sorted(cands):
            sim = edit_similarity_at_least(token, strings[s], tau)
            if sim > 0.0:
                out.append((s, sim))
        return out


def build_token_index(dictionary: Sequence[Entity], tau: float) -> TokenIndex:
    return TokenIndex(dictionary, tau)


def match_document(doc: Document, index: TokenIndex, tau: float | None = None,
                   cache: dict | None = None) -> dict[int, list[tuple[int, float]]]:
    """Map each matched entity-token string id to its (doc_pos, eds) list, in position order."""
    if cache is None:
        cache = {}
    out: dict[int, list[tuple[int, float]]] = {}
    for pos, tok in enumerate(doc.tokens):
        hits = cache.get(tok)
        if hits is None:
            hits = index.query(tok, tau)
            cache[tok] = hits
        for s, sim in hits:
            lst = out.get(s)
            if lst is None:
                out[s] = [(pos, sim)]
            else:
                lst.append((pos, sim))
    return out


def grid_from_doc_matches(entity: Entity, index: TokenIndex,
                          doc_matches: dict[int, list[tuple[int, float]]],
                          restrict_to: Iterable[int] | None = None) -> MatchGrid:
    wanted = range(len(entity.tokens)) if restrict_to is None else sorted(set(restrict_to))
    occ = []
    for j in wanted:
        s = index.sid.get(entity.tokens[j])
        for pos, sim in doc_matches.get(s, ()):
            occ.append(MatchOccurrence(pos, j, sim))
    occ.sort(key=lambda o: (o.doc_pos, o.entity_token_idx))
    return MatchGrid(tuple(occ))


def find_matched_tokens(doc: Document, entity: Entity, index: TokenIndex, tau: float,
                        restrict_to: Iterable[int] | None = None) -> MatchGrid:
    """restrict_to holds entity token indices (e.g. the core tokens) to query."""
    return grid_from_doc_matches(entity, index, match_document(doc, index, tau), restrict_to)
