"""Viterbi EM for the two directional models, with or without agreement."""

from __future__ import annotations

import csv
import logging
import math
import warnings
from dataclasses import asdict, dataclass, field

from .alignment import (
    DEFAULT_KAPPA,
    LinkSet,
    PhraseAlignment,
    agreement_ratio,
    intersect,
    to_link_set,
    viterbi_inner,
    viterbi_outer,
)
from .corpus_io import MonolingualCorpus, SeedLexicon
from .model import (
    DEFAULT_EPSILON,
    DEFAULT_FLOOR,
    DIRECTIONS,
    SRC2TGT,
    TGT2SRC,
    DirectionalModel,
    LengthModel,
    Row,
    TranslationTable,
    init_models,
    link_posteriors,
)
from .retrieval import DEFAULT_CANDIDATES, DEFAULT_TOPK, build_index

log = logging.getLogger(__name__)

INDEPENDENT = "independent"
OUTER = "outer"
INNER = "inner"
MODES = (INDEPENDENT, OUTER, INNER)

STATS_COLUMNS = ("iter", "mode", "agreed_links", "ratio", "fwd_links", "bwd_links")


class EmptyAgreementWarning(UserWarning):
    pass


@dataclass
class TrainingConfig:
    mode: str = OUTER
    iterations: int = 10
    epsilon: float = DEFAULT_EPSILON
    n_candidates: int = DEFAULT_CANDIDATES
    top_k: int = DEFAULT_TOPK
    floor: float = DEFAULT_FLOOR
    alpha_bg: float = 0.1
    w_seed: float = 1.0
    kappa: float = DEFAULT_KAPPA
    max_len: int | None = None
    workers: int = 1
    exhaustive: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.floor <= 0:
            raise ValueError("floor must be positive")
        if self.w_seed < 0:
            raise ValueError("w_seed must be >= 0")
        if self.n_candidates < 1 or self.top_k < 1:
            raise ValueError("candidate counts must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


class CountAccumulator:
    """Expected counts for both directions' translation and length models."""

    def __init__(self, n_cols: dict[str, int], max_len: int):
        self.n_cols = dict(n_cols)
        self.max_len = max_len
        self.trans: dict[str, dict[int, dict[int, float]]] = {d: {} for d in DIRECTIONS}
        self.lengths: dict[str, dict[int, dict[int, float]]] = {d: {} for d in DIRECTIONS}

    @classmethod
    def for_models(cls, fwd: DirectionalModel, bwd: DirectionalModel) -> "CountAccumulator":
        return cls({SRC2TGT: fwd.table.n_cols, TGT2SRC: bwd.table.n_cols},
                   max(fwd.lengths.max_len, bwd.lengths.max_len))

    def add(self, direction: str, e: int, f: int, c: float) -> None:
        row = self.trans[direction].setdefault(e, {})
        row[f] = row.get(f, 0.0) + c

    def add_length(self, direction: str, i: int, j: int, c: float = 1.0) -> None:
        row = self.lengths[direction].setdefault(i, {})
        row[j] = row.get(j, 0.0) + c

    def add_seed(self, seed: SeedLexicon, w_seed: float, direction: str | None = None) -> None:
        if w_seed <= 0:
            return
        for d in (direction,) if direction else DIRECTIONS:
            for e, f in seed.pairs:
                if d == SRC2TGT:
                    self.add(d, e, f, w_seed)
                else:
                    self.add(d, f, e, w_seed)

    def merge(self, other: "CountAccumulator") -> "CountAccumulator":
        for src, dst in ((other.trans, self.trans), (other.lengths, self.lengths)):
            for d in DIRECTIONS:
                for e, row in src[d].items():
                    mine = dst[d].setdefault(e, {})
                    for f, c in row.items():
                        mine[f] = mine.get(f, 0.0) + c
        return self

    def get(self, direction: str, e: int, f: int) -> float:
        return self.trans[direction].get(e, {}).get(f, 0.0)

    def total(self, direction: str) -> float:
        return math.fsum(c for row in self.trans[direction].values() for c in row.values())


def _link_phrases(link, E, F, direction):
    s, t = link
    # (conditioning phrase, generated phrase)
    return (E[s], F[t]) if direction == SRC2TGT else (F[t], E[s])


def collect_counts_outer(links, E: MonolingualCorpus, F: MonolingualCorpus, model: DirectionalModel,
                         seed: SeedLexicon | None = None, w_seed: float = 1.0,
                         acc: CountAccumulator | None = None) -> CountAccumulator:
    """Model-1 expected counts from the given links, for `model`'s direction only."""
    d = model.direction
    if acc is None:
        acc = CountAccumulator({d: model.table.n_cols}, model.lengths.max_len)
    for link in links:
        cond, gen = _link_phrases(link, E, F, d)
        acc.add_length(d, cond.length, gen.length)
        post = link_posteriors(model, cond, gen)
        words = (0,) + cond.tokens
        for j, f in enumerate(gen.tokens):
            for i, e in enumerate(words):
                acc.add(d, e, f, post[i][j])
    if seed is not None:
        acc.add_seed(seed, w_seed, d)
    return acc


def collect_counts_independent(alignment: PhraseAlignment, E, F, model: DirectionalModel,
                               seed: SeedLexicon | None = None, w_seed: float = 1.0,
                               acc: CountAccumulator | None = None) -> CountAccumulator:
    """Counts from a direction's own Viterbi links (no intersection)."""
    return collect_counts_outer(to_link_set(alignment), E, F, model, seed, w_seed, acc)


def collect_counts_inner(links, E: MonolingualCorpus, F: MonolingualCorpus, fwd: DirectionalModel,
                         bwd: DirectionalModel, seed: SeedLexicon | None = None, w_seed: float = 1.0,
                         acc: CountAccumulator | None = None) -> CountAccumulator:
    """Counts weighted by the product of the two directions' link posteriors.

    Fills both directions. NULL positions get no direct counts.
    """
    if acc is None:
        acc = CountAccumulator.for_models(fwd, bwd)
    for s, t in links:
        e, f = E[s], F[t]
        acc.add_length(SRC2TGT, e.length, f.length)
        acc.add_length(TGT2SRC, f.length, e.length)
        pf = link_posteriors(fwd, e, f)  # (I+1) x J
        pb = link_posteriors(bwd, f, e)  # (J+1) x I
        for i, ew in enumerate(e.tokens, start=1):
            for j, fw in enumerate(f.tokens, start=1):
                c = pf[i][j - 1] * pb[j][i - 1]
                acc.add(SRC2TGT, ew, fw, c)
                acc.add(TGT2SRC, fw, ew, c)
    if seed is not None:
        acc.add_seed(seed, w_seed)
    return acc


def normalize(counts: CountAccumulator, floor: float, direction: str) -> tuple[TranslationTable, LengthModel]:
    """Relative-frequency tables; rows without mass are left uniform."""
    table = TranslationTable(counts.n_cols[direction], floor)
    for e, row in counts.trans[direction].items():
        z = math.fsum(row.values())
        if z > 0:
            table.rows[e] = Row({f: c / z for f, c in row.items() if c > 0}, 0.0, floor)
    lengths = LengthModel(counts.max_len, floor)
    for i, row in counts.lengths[direction].items():
        z = math.fsum(row.values())
        if z > 0:
            lengths.rows[i] = Row({j: c / z for j, c in row.items() if c > 0}, 0.0, floor)
    return table, lengths


@dataclass
class IterationStats:
    iter: int
    mode: str
    agreed_links: int
    ratio: float
    fwd_links: int
    bwd_links: int
    fwd_score: float
    bwd_score: float


@dataclass
class TrainResult:
    fwd: DirectionalModel
    bwd: DirectionalModel
    links: LinkSet
    stats: list[IterationStats] = field(default_factory=list)
    fwd_alignment: PhraseAlignment | None = None
    bwd_alignment: PhraseAlignment | None = None


def search(fwd, bwd, E, F, config: TrainingConfig, src_index=None, tgt_index=None, inner: bool | None = None):
    """Both unidirectional Viterbi alignments under the current models."""
    if inner is None:
        inner = config.mode == INNER
    kw = dict(n_candidates=config.n_candidates, top_k=config.top_k,
              exhaustive=config.exhaustive, workers=config.workers)
    if inner:
        a_fwd = viterbi_inner(fwd, bwd, E, F, src_index, kappa=config.kappa, **kw)
        a_bwd = viterbi_inner(bwd, fwd, E, F, tgt_index, kappa=config.kappa, **kw)
    else:
        a_fwd = viterbi_outer(fwd, E, F, src_index, **kw)
        a_bwd = viterbi_outer(bwd, E, F, tgt_index, **kw)
    return a_fwd, a_bwd


def run_viterbi_em(E: MonolingualCorpus, F: MonolingualCorpus, seed: SeedLexicon,
                   config: TrainingConfig, on_iteration=None, on_update=None) -> TrainResult:
    """Alternate search and count-normalize steps for `config.iterations` rounds.

    Returns the models after the last update and the agreed alignment found
    in the last search. Optional hooks: `on_iteration(stats, fwd_alignment,
    bwd_alignment, agreed)` after every search and `on_update(k, fwd, bwd)`
    after every re-estimation.
    """
    max_len = config.max_len or max(E.max_length(), F.max_length())
    fwd, bwd = init_models(E.vocab, F.vocab, seed, config.alpha_bg, max_len, config.epsilon, config.floor)
    src_index = None if config.exhaustive else build_index(E)
    tgt_index = None if config.exhaustive else build_index(F)
    result = TrainResult(fwd, bwd, LinkSet())
    for k in range(1, config.iterations + 1):
        a_fwd, a_bwd = search(fwd, bwd, E, F, config, src_index, tgt_index)
        l_fwd, l_bwd = to_link_set(a_fwd), to_link_set(a_bwd)
        agreed = intersect(l_fwd, l_bwd)
        st = IterationStats(k, config.mode, len(agreed), agreement_ratio(l_fwd, l_bwd),
                            len(l_fwd), len(l_bwd), math.fsum(a_fwd.scores), math.fsum(a_bwd.scores))
        result.stats.append(st)
        log.info("iter %d %s: agreed=%d ratio=%.4f fwd=%d bwd=%d", k, config.mode,
                 st.agreed_links, st.ratio, st.fwd_links, st.bwd_links)
        if on_iteration is not None:
            on_iteration(st, a_fwd, a_bwd, agreed)

        acc = CountAccumulator.for_models(fwd, bwd)
        if config.mode == INDEPENDENT:
            collect_counts_outer(l_fwd, E, F, fwd, seed, config.w_seed, acc)
            collect_counts_outer(l_bwd, E, F, bwd, seed, config.w_seed, acc)
        else:
            if not agreed:
                warnings.warn(f"iteration {k}: no agreed links; updating from seed counts only",
                              EmptyAgreementWarning, stacklevel=2)
            if config.mode == OUTER:
                collect_counts_outer(agreed, E, F, fwd, seed, config.w_seed, acc)
                collect_counts_outer(agreed, E, F, bwd, seed, config.w_seed, acc)
            else:
                collect_counts_inner(agreed, E, F, fwd, bwd, seed, config.w_seed, acc)
        fwd = DirectionalModel(SRC2TGT, *normalize(acc, config.floor, SRC2TGT), config.epsilon, E.vocab, F.vocab)
        bwd = DirectionalModel(TGT2SRC, *normalize(acc, config.floor, TGT2SRC), config.epsilon, F.vocab, E.vocab)
        result = TrainResult(fwd, bwd, agreed, result.stats, a_fwd, a_bwd)
        if on_update is not None:
            on_update(k, fwd, bwd)
    return result


def align(fwd: DirectionalModel, bwd: DirectionalModel, E, F, config: TrainingConfig) -> LinkSet:
    """Agreed links of the two models without any update."""
    a_fwd, a_bwd = search(fwd, bwd, E, F, config,
                          None if config.exhaustive else build_index(E),
                          None if config.exhaustive else build_index(F))
    return intersect(to_link_set(a_fwd), to_link_set(a_bwd))


def write_stats_csv(stats: list[IterationStats], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(STATS_COLUMNS)
        for st in stats:
            w.writerow([st.iter, st.mode, st.agreed_links, format(st.ratio, ".6f"), st.fwd_links, st.bwd_links])
