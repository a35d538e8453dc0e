"""Directional Model-1 phrase translation models.

A model conditions on phrases of one side (the *conditioning* side, which
owns the NULL word at id 0) and generates phrases of the other side. The
source-to-target model scores p(f|e); the target-to-source model is the
same structure with the roles of the vocabularies swapped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus_io import SOURCE, TARGET, SeedLexicon, Vocabulary

SRC2TGT = "src2tgt"
TGT2SRC = "tgt2src"
DIRECTIONS = (SRC2TGT, TGT2SRC)

DEFAULT_FLOOR = 1e-12
DEFAULT_EPSILON = 1e-12


def direction_sides(direction: str) -> tuple[str, str]:
    """(conditioning side, generated side) for a direction name."""
    if direction == SRC2TGT:
        return SOURCE, TARGET
    if direction == TGT2SRC:
        return TARGET, SOURCE
    raise ValueError(f"unknown direction {direction!r}")


class Row:
    """One conditional distribution stored sparsely.

    `probs` holds explicit entries. `rest` is genuine probability mass given
    to every unstored column (used by uniform/background rows); when it is 0
    unstored columns read as the floor, which is not part of the row's mass.
    """

    __slots__ = ("probs", "rest", "default")

    def __init__(self, probs: dict[int, float], rest: float = 0.0, floor: float = DEFAULT_FLOOR):
        self.probs = probs
        self.rest = rest
        self.default = rest if rest > 0 else floor

    def get(self, col: int) -> float:
        return self.probs.get(col, self.default)

    def mass(self, n_cols: int) -> float:
        return math.fsum(self.probs.values()) + self.rest * (n_cols - len(self.probs))

    def __eq__(self, other) -> bool:
        return isinstance(other, Row) and self.probs == other.probs and self.rest == other.rest

    def __repr__(self) -> str:
        return f"Row({len(self.probs)} entries, rest={self.rest:g})"


class TranslationTable:
    """Sparse p(gen word | cond word). Rows never stored read as uniform."""

    def __init__(self, n_cols: int, floor: float = DEFAULT_FLOOR):
        if n_cols < 1:
            raise ValueError("translation table needs at least one column")
        self.n_cols = n_cols
        self.floor = floor
        self.rows: dict[int, Row] = {}
        self.uniform = Row({}, 1.0 / n_cols, floor)

    def row(self, e: int) -> Row:
        return self.rows.get(e, self.uniform)

    def prob(self, e: int, f: int) -> float:
        row = self.rows.get(e)
        if row is None:
            return self.uniform.rest
        return row.probs.get(f, row.default)

    def row_sums(self) -> dict[int, float]:
        return {e: r.mass(self.n_cols) for e, r in self.rows.items()}

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TranslationTable)
            and self.n_cols == other.n_cols
            and self.floor == other.floor
            and self.rows == other.rows
        )


class LengthModel:
    """p(J | I) over J in 1..max_len; missing rows are uniform."""

    def __init__(self, max_len: int, floor: float = DEFAULT_FLOOR):
        if max_len < 1:
            raise ValueError("max_len must be >= 1")
        self.max_len = max_len
        self.floor = floor
        self.rows: dict[int, Row] = {}

    def prob(self, i: int, j: int) -> float:
        row = self.rows.get(i)
        if row is None:
            return 1.0 / self.max_len if 1 <= j <= self.max_len else self.floor
        return row.probs.get(j, row.default)

    def row_sums(self) -> dict[int, float]:
        return {i: r.mass(self.max_len) for i, r in self.rows.items()}

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LengthModel)
            and self.max_len == other.max_len
            and self.floor == other.floor
            and self.rows == other.rows
        )


@dataclass
class DirectionalModel:
    direction: str
    table: TranslationTable
    lengths: LengthModel
    epsilon: float
    cond_vocab: Vocabulary | None = None
    gen_vocab: Vocabulary | None = None

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        direction_sides(self.direction)
        self._columns = None

    @property
    def log_epsilon(self) -> float:
        return math.log(self.epsilon)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DirectionalModel)
            and self.direction == other.direction
            and self.epsilon == other.epsilon
            and self.table == other.table
            and self.lengths == other.lengths
        )


def init_models(src_vocab: Vocabulary, tgt_vocab: Vocabulary, seed: SeedLexicon,
                alpha_bg: float = 0.1, max_len: int = 1,
                epsilon: float = DEFAULT_EPSILON, floor: float = DEFAULT_FLOOR):
    """Initial (src->tgt, tgt->src) models from the seed lexicon.

    A word with k seed translations puts (1 - alpha_bg)/k on each of them and
    spreads alpha_bg over the whole other-side vocabulary. Words without seed
    entries, and all length rows, start uniform.
    """
    if len(src_vocab) == 0 or len(tgt_vocab) == 0:
        raise ValueError("vocabularies must be non-empty")
    if not 0.0 <= alpha_bg <= 1.0:
        raise ValueError("alpha_bg must lie in [0, 1]")
    models = []
    for direction, cv, gv, by_cond in (
        (SRC2TGT, src_vocab, tgt_vocab, seed.by_source),
        (TGT2SRC, tgt_vocab, src_vocab, seed.by_target),
    ):
        n = len(gv)
        table = TranslationTable(n, floor)
        bg = alpha_bg / n
        for e, trans in by_cond.items():
            share = (1.0 - alpha_bg) / len(trans)
            table.rows[e] = Row({f: share + bg for f in trans}, bg, floor)
        models.append(DirectionalModel(direction, table, LengthModel(max_len, floor), epsilon, cv, gv))
    return tuple(models)


def _tokens(p):
    return p.tokens if hasattr(p, "tokens") else tuple(p)


def phrase_translation_prob(model: DirectionalModel, e, f) -> float:
    """log P(f | e) under Model 1, summed over all word alignments.

    `e` may be empty (or None), in which case the result is log epsilon.
    Phrases may be Phrase objects or plain token sequences.
    """
    f = _tokens(f)
    if not f:
        raise ValueError("generated phrase must be non-empty")
    if e is None:
        return model.log_epsilon
    e = _tokens(e)
    if not e:
        return model.log_epsilon
    table = model.table
    # summing in sorted word order keeps the score bit-identical under reordering
    rows = [table.row(0)]
    rows.extend(table.row(w) for w in sorted(e))
    n_i, n_j = len(e), len(f)
    lp = math.log(model.lengths.prob(n_i, n_j)) - n_j * math.log(n_i + 1)
    for w in sorted(f):
        s = 0.0
        for r in rows:
            s += r.probs.get(w, r.default)
        lp += math.log(s)
    return lp


def link_posteriors(model: DirectionalModel, e, f) -> list[list[float]]:
    """Word-link posteriors as an (I+1) x J nested list; row 0 is NULL."""
    e, f = _tokens(e), _tokens(f)
    if not e or not f:
        raise ValueError("both phrases must be non-empty")
    rows = [model.table.row(0)]
    rows.extend(model.table.row(w) for w in e)
    post = [[0.0] * len(f) for _ in rows]
    for j, w in enumerate(f):
        col = [r.probs.get(w, r.default) for r in rows]
        z = math.fsum(col)
        for i, p in enumerate(col):
            post[i][j] = p / z
    return post


def inner_pair_score(fwd: DirectionalModel, bwd: DirectionalModel, e, f) -> float:
    """Sum over non-NULL links <i, j> of fwd-posterior x bwd-posterior.

    `fwd` conditions on `e` and generates `f`; `bwd` the reverse. Swapping
    both the models and the phrases gives the same value.
    """
    e, f = _tokens(e), _tokens(f)
    if not e or not f:
        raise ValueError("both phrases must be non-empty")
    e, f = sorted(e), sorted(f)  # canonical order, as in phrase_translation_prob
    ft, bt = fwd.table, bwd.table
    erows = [ft.row(w) for w in e]
    enull = ft.row(0)
    frows = [bt.row(w) for w in f]
    fnull = bt.row(0)
    # bwd posterior denominators, one per e position
    bden = []
    for w in e:
        z = fnull.probs.get(w, fnull.default)
        for r in frows:
            z += r.probs.get(w, r.default)
        bden.append(z)
    total = 0.0
    for j, fw in enumerate(f):
        fcol = [r.probs.get(fw, r.default) for r in erows]
        z = enull.probs.get(fw, enull.default)
        for p in fcol:
            z += p
        fr = frows[j]
        acc = 0.0
        for i, ew in enumerate(e):
            acc += fcol[i] * fr.probs.get(ew, fr.default) / bden[i]
        total += acc / z
    return total


def check_normalized(model: DirectionalModel, tol: float = 1e-9) -> list[str]:
    """Names of stored rows whose mass is off by more than `tol`."""
    bad = []
    for e, s in model.table.row_sums().items():
        if abs(s - 1.0) > tol:
            bad.append(f"TR[{e}]={s!r}")
    for i, s in model.lengths.row_sums().items():
        if abs(s - 1.0) > tol:
            bad.append(f"LEN[{i}]={s!r}")
    return bad
