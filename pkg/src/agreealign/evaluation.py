"""Link-set metrics, synthetic non-parallel benchmarks and artifact extraction."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus_io import FormatError, MonolingualCorpus, Vocabulary, corpus_from_lines, SOURCE, TARGET
from .model import DirectionalModel, TranslationTable


def _pairs(x) -> set:
    return set(x.pairs) if hasattr(x, "pairs") else set(x)


def precision_recall(D, G) -> tuple[float, float]:
    d, g = _pairs(D), _pairs(G)
    hit = len(d & g)
    p = hit / len(d) if d else 1.0
    r = hit / len(g) if g else 1.0
    return p, r


def f1(D, G) -> float:
    """2|D & G| / (|D| + |G|) over <s, t> index pairs; 1.0 when both are empty."""
    d, g = _pairs(D), _pairs(G)
    if not d and not g:
        return 1.0
    return 2 * len(d & g) / (len(d) + len(g))


@dataclass
class SynthSpec:
    """How to corrupt a parallel phrase set. None means "use everything"."""

    n_pairs: int | None = None
    noise_src: int = 0
    noise_tgt: int = 0
    seed: int = 42

    def __post_init__(self):
        if (self.n_pairs is not None and self.n_pairs < 0) or self.noise_src < 0 or self.noise_tgt < 0:
            raise ValueError("counts must be >= 0")


def _check_unique(lines, side):
    seen = set()
    for line in lines:
        key = " ".join(line.split())
        if key in seen:
            raise FormatError(f"duplicate {side} phrase {key!r}")
        seen.add(key)


def synthesize(pairs, noise_src, noise_tgt, spec: SynthSpec):
    """Shuffle parallel sides together with noise phrases.

    Returns (source lines, target lines, gold) where gold holds the 1-based
    post-shuffle <s, t> positions of the true pairs.
    """
    pairs = list(pairs)[: spec.n_pairs] if spec.n_pairs is not None else list(pairs)
    noise_src = list(noise_src)
    noise_tgt = list(noise_tgt)
    if spec.noise_src > len(noise_src) or spec.noise_tgt > len(noise_tgt):
        raise ValueError("not enough noise phrases for the requested counts")
    src = [s for s, _ in pairs] + noise_src[: spec.noise_src]
    tgt = [t for _, t in pairs] + noise_tgt[: spec.noise_tgt]
    _check_unique(src, SOURCE)
    _check_unique(tgt, TARGET)
    rng = random.Random(spec.seed)
    order_s = list(range(len(src)))
    rng.shuffle(order_s)
    order_t = list(range(len(tgt)))
    rng.shuffle(order_t)
    pos_s = {orig: k for k, orig in enumerate(order_s, start=1)}
    pos_t = {orig: k for k, orig in enumerate(order_t, start=1)}
    gold = {(pos_s[i], pos_t[i]) for i in range(len(pairs))}
    return [src[i] for i in order_s], [tgt[i] for i in order_t], gold


def read_parallel(path) -> list[tuple[str, str]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 2 or not fields[0].split() or not fields[1].split():
                raise FormatError(f"{path}: malformed parallel pair at line {n}")
            out.append((fields[0].strip(), fields[1].strip()))
    return out


def read_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def gen_synthetic(parallel_path, spec: SynthSpec, noise_src_path=None, noise_tgt_path=None):
    """File-based wrapper around `synthesize`; returns (E, F, gold)."""
    pairs = read_parallel(parallel_path)
    ns = read_lines(noise_src_path) if noise_src_path else []
    nt = read_lines(noise_tgt_path) if noise_tgt_path else []
    src, tgt, gold = synthesize(pairs, ns, nt, spec)
    return corpus_from_lines(src, SOURCE), corpus_from_lines(tgt, TARGET), gold


def extract_lexicon(table, threshold: float, cond_vocab: Vocabulary | None = None,
                    gen_vocab: Vocabulary | None = None) -> list[tuple]:
    """Word pairs with p(f|e) >= threshold, best first.

    Accepts a DirectionalModel (vocabularies taken from it) or a bare
    TranslationTable, in which case ids are returned unless vocabularies are
    given. NULL rows are skipped.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must lie in (0, 1]")
    if isinstance(table, DirectionalModel):
        cond_vocab = cond_vocab or table.cond_vocab
        gen_vocab = gen_vocab or table.gen_vocab
        table = table.table
    assert isinstance(table, TranslationTable)
    n_cond = len(cond_vocab) if cond_vocab is not None else max(table.rows, default=0)
    found = []
    for e in range(1, n_cond + 1):
        row = table.rows.get(e)
        if row is None:
            row = table.uniform
        for f, p in row.probs.items():
            if p >= threshold:
                found.append((e, f, p))
        if row.rest > 0 and row.rest >= threshold:
            for f in range(1, table.n_cols + 1):
                if f not in row.probs:
                    found.append((e, f, row.rest))
    if cond_vocab is not None and gen_vocab is not None:
        named = [(cond_vocab.word(e), gen_vocab.word(f), p) for e, f, p in found]
    else:
        named = found
    named.sort(key=lambda x: (-x[2], x[0], x[1]))
    return named


def extract_phrase_pairs(links, E: MonolingualCorpus, F: MonolingualCorpus) -> list[tuple[str, str]]:
    """Source/target text for every link, ordered by target then source index."""
    ordered = sorted(_pairs(links), key=lambda st: (st[1], st[0]))
    return [(E.text(s), F.text(t)) for s, t in ordered]
