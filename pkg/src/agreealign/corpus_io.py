"""Reading and writing phrase corpora, seed lexicons, model files and alignments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

NULL_TOKEN = "<NULL>"
MODEL_MAGIC = "agreealign-model"
MODEL_VERSION = "v1"

SOURCE = "source"
TARGET = "target"


class FormatError(ValueError):
    """Raised for malformed input files."""


class Vocabulary:
    """Word <-> id bijection for one corpus side.

    Real words get ids 1, 2, ... in first-seen order. Id 0 is reserved for
    NULL and only ever used on the conditioning axis of a translation table.
    """

    def __init__(self, side: str, words: Iterable[str] = ()):
        self.side = side
        self._ids: dict[str, int] = {}
        self._words: list[str] = [NULL_TOKEN]
        for w in words:
            self.add(w)

    def add(self, word: str) -> int:
        if word == NULL_TOKEN:
            raise FormatError(f"reserved token {NULL_TOKEN!r} cannot be a word")
        idx = self._ids.get(word)
        if idx is None:
            idx = len(self._words)
            self._ids[word] = idx
            self._words.append(word)
        return idx

    def id(self, word: str) -> int:
        return self._ids[word]

    def get(self, word: str, default=None):
        return self._ids.get(word, default)

    def word(self, idx: int) -> str:
        return self._words[idx]

    def words(self) -> list[str]:
        """Real words in id order (NULL excluded)."""
        return self._words[1:]

    def __contains__(self, word) -> bool:
        return word in self._ids

    def __len__(self) -> int:
        # number of real words; NULL not counted
        return len(self._words) - 1

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.side == other.side and self._words == other._words

    def __repr__(self) -> str:
        return f"Vocabulary({self.side!r}, size={len(self)})"


@dataclass(frozen=True)
class Phrase:
    id: int
    tokens: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass
class MonolingualCorpus:
    side: str
    vocab: Vocabulary
    phrases: list[Phrase] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.phrases)

    def __getitem__(self, phrase_id: int) -> Phrase:
        # 1-based phrase ids
        if phrase_id < 1:
            raise IndexError(phrase_id)
        return self.phrases[phrase_id - 1]

    def text(self, phrase_id: int) -> str:
        return " ".join(self.vocab.word(w) for w in self[phrase_id].tokens)

    def max_length(self) -> int:
        return max(p.length for p in self.phrases)


def corpus_from_lines(lines: Iterable[str], side: str, vocab: Vocabulary | None = None) -> MonolingualCorpus:
    if vocab is None:
        vocab = Vocabulary(side)
    corpus = MonolingualCorpus(side, vocab)
    for n, line in enumerate(lines, start=1):
        words = line.split()
        if not words:
            raise FormatError(f"empty phrase at line {n}")
        corpus.phrases.append(Phrase(n, tuple(vocab.add(w) for w in words)))
    if not corpus.phrases:
        raise FormatError("empty corpus")
    return corpus


def load_corpus(path, side: str, vocab: Vocabulary | None = None) -> MonolingualCorpus:
    """Load a one-phrase-per-line corpus; line n becomes phrase n."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    # a single trailing newline is not a blank phrase
    if lines and lines[-1] == "":
        lines.pop()
    try:
        return corpus_from_lines(lines, side, vocab)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


class SeedLexicon:
    """Set of trusted (source id, target id) pairs, indexed both ways."""

    def __init__(self, pairs: Iterable[tuple[int, int]] = ()):
        self.pairs: set[tuple[int, int]] = set()
        self.by_source: dict[int, set[int]] = {}
        self.by_target: dict[int, set[int]] = {}
        for e, f in pairs:
            self.add(e, f)

    def add(self, e: int, f: int) -> None:
        if (e, f) in self.pairs:
            return
        self.pairs.add((e, f))
        self.by_source.setdefault(e, set()).add(f)
        self.by_target.setdefault(f, set()).add(e)

    def sigma(self, f: int, e: int) -> int:
        """1 if <f, e> is a seed entry, else 0."""
        return 1 if (e, f) in self.pairs else 0

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(sorted(self.pairs))


def load_seed_lexicon(path, src_vocab: Vocabulary, tgt_vocab: Vocabulary) -> SeedLexicon:
    """Read a `source<TAB>target` file. Unknown words are added to the vocabularies."""
    seed = SeedLexicon()
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 2 or not fields[0].strip() or not fields[1].strip():
                raise FormatError(f"{path}: malformed seed entry at line {n}")
            seed.add(src_vocab.add(fields[0].strip()), tgt_vocab.add(fields[1].strip()))
    return seed


def _fmt(p: float) -> str:
    return format(p, ".17g")


def save_model(model, path) -> None:
    """Write a DirectionalModel in the versioned text format.

    Layout: header, VOCAB lines (conditioning side then generated side, id
    order), LEN lines, REST lines for rows carrying background mass, TR lines.
    """
    from .model import DirectionalModel  # noqa: F401  (type reference only)

    table, lengths = model.table, model.lengths
    cv, gv = model.cond_vocab, model.gen_vocab
    out = [
        f"{MODEL_MAGIC} {MODEL_VERSION} {model.direction} epsilon={_fmt(model.epsilon)}"
        f" floor={_fmt(table.floor)} max_len={lengths.max_len} n_cols={table.n_cols}"
    ]
    for tag, vocab in (("cond", cv), ("gen", gv)):
        for w in vocab.words():
            out.append(f"VOCAB\t{tag}\t{w}")
    for i in sorted(lengths.rows):
        row = lengths.rows[i]
        for j in sorted(row.probs):
            out.append(f"LEN\t{i}\t{j}\t{_fmt(row.probs[j])}")
    for e in sorted(table.rows):
        row = table.rows[e]
        if row.rest > 0:
            out.append(f"REST\t{cv.word(e)}\t{_fmt(row.rest)}")
    for e in sorted(table.rows):
        row = table.rows[e]
        ew = cv.word(e)
        for f in sorted(row.probs):
            out.append(f"TR\t{ew}\t{gv.word(f)}\t{_fmt(row.probs[f])}")
    out.append("END")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def load_model(path, cond_vocab: Vocabulary | None = None, gen_vocab: Vocabulary | None = None):
    """Read a model file written by `save_model`.

    When vocabularies are passed they must agree with the file's id order
    for the words they already contain; missing words are appended.
    """
    from .model import DirectionalModel, LengthModel, Row, TranslationTable

    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if not lines or not lines[0].startswith(MODEL_MAGIC + " "):
        raise FormatError(f"{path}: not an agreealign model file")
    head = lines[0].split()
    if len(head) < 4 or head[1] != MODEL_VERSION:
        raise FormatError(f"{path}: unsupported model version {head[1] if len(head) > 1 else '?'}")
    direction = head[2]
    meta = {}
    for item in head[3:]:
        k, _, v = item.partition("=")
        meta[k] = v
    try:
        epsilon = float(meta["epsilon"])
        floor = float(meta.get("floor", "1e-12"))
        max_len = int(meta["max_len"])
        n_cols = int(meta["n_cols"])
    except (KeyError, ValueError):
        raise FormatError(f"{path}: bad header") from None

    from .model import direction_sides

    cside, gside = direction_sides(direction)
    cv = cond_vocab if cond_vocab is not None else Vocabulary(cside)
    gv = gen_vocab if gen_vocab is not None else Vocabulary(gside)
    len_rows: dict[int, dict[int, float]] = {}
    rests: dict[int, float] = {}
    tr_rows: dict[int, dict[int, float]] = {}
    cond_order, gen_order = [], []
    ended = False
    for n, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        if ended:
            raise FormatError(f"{path}: data after END at line {n}")
        fields = line.split("\t")
        tag = fields[0]
        try:
            if tag == "VOCAB" and len(fields) == 3:
                (cond_order if fields[1] == "cond" else gen_order).append(fields[2])
            elif tag == "LEN" and len(fields) == 4:
                len_rows.setdefault(int(fields[1]), {})[int(fields[2])] = float(fields[3])
            elif tag == "REST" and len(fields) == 3:
                rests[_lookup(cv, fields[1])] = float(fields[2])
            elif tag == "TR" and len(fields) == 4:
                tr_rows.setdefault(_lookup(cv, fields[1]), {})[gv.add(fields[2])] = float(fields[3])
            elif tag == "END" and len(fields) == 1:
                ended = True
            else:
                raise ValueError
        except ValueError:
            raise FormatError(f"{path}: malformed line {n}") from None
        if tag == "VOCAB":
            # vocab lines precede data lines; map them in file order
            vocab = cv if fields[1] == "cond" else gv
            idx = vocab.add(fields[2])
            expected = len(cond_order if fields[1] == "cond" else gen_order)
            if idx != expected:
                raise FormatError(f"{path}: vocabulary order conflicts with loaded ids ({fields[2]!r})")
    if not ended:
        raise FormatError(f"{path}: truncated model file")
    if len(gv) < n_cols:
        raise FormatError(f"{path}: vocabulary smaller than table width")

    table = TranslationTable(n_cols, floor)
    for e in set(tr_rows) | set(rests):
        table.rows[e] = Row(tr_rows.get(e, {}), rests.get(e, 0.0), floor)
    lengths = LengthModel(max_len, floor)
    for i, r in len_rows.items():
        lengths.rows[i] = Row(r, 0.0, floor)
    return DirectionalModel(direction, table, lengths, epsilon, cv, gv)


def _lookup(vocab: Vocabulary, word: str) -> int:
    if word == NULL_TOKEN:
        return 0
    return vocab.add(word)


def write_alignment(links, path) -> None:
    """Write `t<TAB>s<TAB>score` lines sorted by target index.

    `links` is a LinkSet (or any iterable of (s, t) pairs). Pair-valued
    scores from an intersection are written as their sum.
    """
    scores = getattr(links, "scores", {})
    rows = sorted(((t, s) for s, t in links))
    with open(path, "w", encoding="utf-8") as fh:
        for t, s in rows:
            sc = scores.get((s, t), 0.0)
            if isinstance(sc, tuple):
                sc = math.fsum(sc)
            fh.write(f"{t}\t{s}\t{_fmt(sc)}\n")


def read_alignment(path) -> list[tuple[int, int]]:
    """Read an alignment TSV back as a list of (s, t) pairs."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            try:
                t, s = int(fields[0]), int(fields[1])
            except (ValueError, IndexError):
                raise FormatError(f"{path}: malformed alignment line {n}") from None
            pairs.append((s, t))
    return pairs


def read_pairs(path) -> list[tuple[int, int]]:
    """Read a ground-truth `s<TAB>t` file."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2:
                raise FormatError(f"{path}: malformed pair line {n}")
            try:
                pairs.append((int(fields[0]), int(fields[1])))
            except ValueError:
                raise FormatError(f"{path}: malformed pair line {n}") from None
    return pairs


def write_pairs(pairs, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s, t in sorted(pairs):
            fh.write(f"{s}\t{t}\n")
