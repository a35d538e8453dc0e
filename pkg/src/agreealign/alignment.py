"""Unidirectional Viterbi phrase alignment, link sets and their agreement."""

from __future__ import annotations

import math
import multiprocessing as mp
from dataclasses import dataclass, field

from .corpus_io import MonolingualCorpus
from .model import SRC2TGT, DirectionalModel, inner_pair_score, phrase_translation_prob
from .retrieval import DEFAULT_CANDIDATES, DEFAULT_TOPK, InvertedIndex, build_index, candidates, column_index

DEFAULT_KAPPA = 1e-9


@dataclass
class PhraseAlignment:
    """m_q for every query phrase q (1-based), 0 meaning the empty phrase.

    For src2tgt the queries are target phrases and values are source ids;
    for tgt2src it is the other way round.
    """

    direction: str
    assignment: list[int]
    scores: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.assignment)


class LinkSet:
    """Set of non-empty <s, t> links with optional per-link scores."""

    def __init__(self, pairs=(), scores: dict | None = None):
        self.pairs: frozenset[tuple[int, int]] = frozenset(pairs)
        for s, t in self.pairs:
            if s < 1 or t < 1:
                raise ValueError(f"link <{s}, {t}> touches the empty phrase")
        self.scores = dict(scores) if scores else {}

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(sorted(self.pairs, key=lambda st: (st[1], st[0])))

    def __contains__(self, link) -> bool:
        return link in self.pairs

    def __eq__(self, other) -> bool:
        if isinstance(other, LinkSet):
            return self.pairs == other.pairs
        return self.pairs == set(other)

    def __hash__(self):
        return hash(self.pairs)

    def __repr__(self) -> str:
        return "LinkSet({" + ", ".join(f"<{s},{t}>" for s, t in self) + "})"


def to_link_set(a: PhraseAlignment) -> LinkSet:
    pairs, scores = [], {}
    for q, m in enumerate(a.assignment, start=1):
        if m == 0:
            continue
        link = (m, q) if a.direction == SRC2TGT else (q, m)
        pairs.append(link)
        if a.scores:
            scores[link] = a.scores[q - 1]
    return LinkSet(pairs, scores)


def intersect(fwd_links: LinkSet, bwd_links: LinkSet) -> LinkSet:
    """Links present in both; scores become (fwd score, bwd score) pairs."""
    common = fwd_links.pairs & bwd_links.pairs
    scores = {}
    if fwd_links.scores or bwd_links.scores:
        for link in common:
            scores[link] = (fwd_links.scores.get(link, 0.0), bwd_links.scores.get(link, 0.0))
    return LinkSet(common, scores)


def agreement_ratio(fwd_links, bwd_links) -> float:
    """Dice overlap 2|A & B| / (|A| + |B|); two empty sets agree perfectly."""
    a = fwd_links.pairs if isinstance(fwd_links, LinkSet) else set(fwd_links)
    b = bwd_links.pairs if isinstance(bwd_links, LinkSet) else set(bwd_links)
    if not a and not b:
        return 1.0
    return 2 * len(a & b) / (len(a) + len(b))


def _sides(model: DirectionalModel, E: MonolingualCorpus, F: MonolingualCorpus):
    # (queries, conditioning phrases)
    return (F, E) if model.direction == SRC2TGT else (E, F)


# search state shared with forked workers
_STATE: dict = {}


def _search_one(q: int) -> tuple[int, float]:
    st = _STATE
    model, other = st["model"], st["other"]
    queries, conds = st["queries"], st["conds"]
    query = queries[q].tokens
    log_eps = model.log_epsilon
    if st["exhaustive"]:
        cands = range(1, len(conds) + 1)
    else:
        cands = sorted(candidates(st["index"], model, query, st["n"], st["top_k"]))
    best, best_score = 0, -math.inf
    kappa = st["kappa"]
    for s in cands:
        cond = conds[s].tokens
        lp = phrase_translation_prob(model, cond, query)
        if lp < log_eps:
            continue
        if other is not None:
            lp += math.log(inner_pair_score(model, other, cond, query) + kappa)
        if lp > best_score:
            best, best_score = s, lp
    if best == 0:
        best_score = log_eps
    return best, best_score


def _search_chunk(qs: list[int]) -> list[tuple[int, float]]:
    return [_search_one(q) for q in qs]


def _search(model, other, E, F, index, n_candidates, top_k, exhaustive, kappa, workers) -> PhraseAlignment:
    queries, conds = _sides(model, E, F)
    if index is None and not exhaustive:
        index = build_index(conds)
    if not exhaustive:
        column_index(model)  # build before forking so workers share it
    _STATE.update(model=model, other=other, queries=queries, conds=conds, index=index,
                  n=n_candidates, top_k=top_k, exhaustive=exhaustive, kappa=kappa)
    ids = list(range(1, len(queries) + 1))
    try:
        if workers > 1 and len(ids) > 1 and "fork" in mp.get_all_start_methods():
            size = max(1, math.ceil(len(ids) / (workers * 4)))
            chunks = [ids[i:i + size] for i in range(0, len(ids), size)]
            with mp.get_context("fork").Pool(workers) as pool:
                results = [r for part in pool.map(_search_chunk, chunks) for r in part]
        else:
            results = _search_chunk(ids)
    finally:
        _STATE.clear()
    return PhraseAlignment(model.direction, [m for m, _ in results], [sc for _, sc in results])


def viterbi_outer(model: DirectionalModel, E: MonolingualCorpus, F: MonolingualCorpus,
                  index: InvertedIndex | None = None, n_candidates: int = DEFAULT_CANDIDATES,
                  top_k: int = DEFAULT_TOPK, exhaustive: bool = False, workers: int = 1) -> PhraseAlignment:
    """Best conditioning phrase for every query phrase under one direction.

    The empty phrase is chosen only when every candidate scores below
    log epsilon. `index` must cover the conditioning corpus (E for src2tgt).
    """
    return _search(model, None, E, F, index, n_candidates, top_k, exhaustive, 0.0, workers)


def viterbi_inner(model: DirectionalModel, other: DirectionalModel, E: MonolingualCorpus,
                  F: MonolingualCorpus, index: InvertedIndex | None = None,
                  n_candidates: int = DEFAULT_CANDIDATES, top_k: int = DEFAULT_TOPK,
                  exhaustive: bool = False, kappa: float = DEFAULT_KAPPA, workers: int = 1) -> PhraseAlignment:
    """Like viterbi_outer, with candidates rescored by word-level agreement.

    Candidate score is log P(query | cond) + log(inner_pair_score + kappa);
    `other` is the opposite-direction model.
    """
    return _search(model, other, E, F, index, n_candidates, top_k, exhaustive, kappa, workers)
