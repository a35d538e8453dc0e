"""Coarse candidate generation over an inverted index of conditioning phrases."""

from __future__ import annotations

import heapq
from collections import defaultdict

from .corpus_io import MonolingualCorpus
from .model import DirectionalModel

DEFAULT_CANDIDATES = 100
DEFAULT_TOPK = 20


class InvertedIndex:
    """word id -> sorted postings of (phrase id, occurrence count)."""

    def __init__(self, postings: dict[int, list[tuple[int, int]]], lengths: list[int]):
        self.postings = postings
        self.lengths = lengths  # lengths[s - 1] is the length of phrase s

    def __len__(self) -> int:
        return len(self.lengths)

    def get(self, word: int) -> list[tuple[int, int]]:
        return self.postings.get(word, [])

    def phrase_ids(self) -> range:
        return range(1, len(self.lengths) + 1)


def build_index(corpus: MonolingualCorpus) -> InvertedIndex:
    postings: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for p in corpus.phrases:
        counts: dict[int, int] = {}
        for w in p.tokens:
            counts[w] = counts.get(w, 0) + 1
        for w in sorted(counts):
            postings[w].append((p.id, counts[w]))
    return InvertedIndex(dict(postings), [p.length for p in corpus.phrases])


class ColumnIndex:
    """Per generated word, the conditioning words ranked by p(word | cond).

    Built once per model snapshot. Rows with background mass (uniform or
    seed-initialized rows) are ranked together by their background value so
    they need not be expanded into every column.
    """

    def __init__(self, model: DirectionalModel):
        table = model.table
        self.table = table
        self.stored: dict[int, list[tuple[float, int]]] = defaultdict(list)
        n_cond = len(model.cond_vocab) if model.cond_vocab is not None else max(table.rows, default=0)
        background = []
        for e in range(1, n_cond + 1):
            row = table.rows.get(e)
            if row is None:
                background.append((-table.uniform.rest, e))
                continue
            for f, p in row.probs.items():
                self.stored[f].append((-p, e))
            if row.rest > 0:
                background.append((-row.rest, e))
        background.sort()
        self.background = background
        self.n_cond = n_cond
        self._memo: dict[tuple[int, int], list[tuple[float, int]]] = {}

    def top(self, f: int, k: int) -> list[tuple[float, int]]:
        """Up to k (p, e) pairs with the highest p(f|e); ties to lower e."""
        key = (f, k)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if k >= self.n_cond:
            # exhaustive: every conditioning word, floors included
            table = self.table
            res = sorted(((-table.prob(e, f), e) for e in range(1, self.n_cond + 1)))
        else:
            pool = list(self.stored.get(f, ()))
            taken = 0
            rows = self.table.rows
            for negp, e in self.background:
                if taken >= k:
                    break
                row = rows.get(e)
                if row is not None and f in row.probs:
                    continue
                pool.append((negp, e))
                taken += 1
            res = heapq.nsmallest(k, pool)
        out = [(-negp, e) for negp, e in res]
        self._memo[key] = out
        return out


def column_index(model: DirectionalModel) -> ColumnIndex:
    cols = getattr(model, "_columns", None)
    if cols is None:
        cols = ColumnIndex(model)
        model._columns = cols
    return cols


def candidates(index: InvertedIndex, model: DirectionalModel, query,
               n: int = DEFAULT_CANDIDATES, top_k: int = DEFAULT_TOPK) -> list[int]:
    """The n conditioning phrases with the highest coarse score for `query`.

    Coarse score of phrase s: sum over query positions j of the largest
    p(f_j|e) among words e of s that are in the top_k translations of f_j.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tokens = query.tokens if hasattr(query, "tokens") else query
    cols = column_index(model)
    score: dict[int, float] = defaultdict(float)
    for f in tokens:
        best: dict[int, float] = {}
        for p, e in cols.top(f, top_k):
            for s, _ in index.get(e):
                if p > best.get(s, 0.0):
                    best[s] = p
        for s, p in best.items():
            score[s] += p
    ranked = heapq.nsmallest(n, score.items(), key=lambda kv: (-kv[1], kv[0]))
    return [s for s, _ in ranked]
