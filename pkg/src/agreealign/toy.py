"""A small artificial language pair for demos and benchmarks.

Source words map one-to-one onto target words; target phrases are
reordered translations that sometimes carry an extra function word with no
source counterpart. Word frequencies are Zipfian.
"""

from __future__ import annotations

import random
from dataclasses import dataclass


@dataclass
class ToyBitext:
    pairs: list[tuple[str, str]]
    noise_src: list[str]
    noise_tgt: list[str]
    lexicon: dict[str, str]
    src_by_freq: list[str]

    def seed_entries(self, n: int) -> list[tuple[str, str]]:
        """The n most frequent source words with their translations."""
        return [(w, self.lexicon[w]) for w in self.src_by_freq[:n]]


LENGTHS = (1, 2, 3, 4)
LENGTH_WEIGHTS = (0.25, 0.35, 0.25, 0.15)


def make_toy_bitext(n_pairs: int, n_noise_src: int = 0, n_noise_tgt: int = 0, vocab_size: int = 1000,
                    zipf: float = 1.0, n_function: int = 5, p_function: float = 0.2,
                    seed: int = 0) -> ToyBitext:
    rng = random.Random(seed)
    src_words = [f"s{i}" for i in range(vocab_size)]
    tgt_ids = list(range(vocab_size))
    rng.shuffle(tgt_ids)
    lexicon = {w: f"t{tgt_ids[i]}" for i, w in enumerate(src_words)}
    function_words = [f"fn{i}" for i in range(n_function)]
    weights = [1.0 / (r + 1) ** zipf for r in range(vocab_size)]

    def src_phrase():
        n = rng.choices(LENGTHS, LENGTH_WEIGHTS)[0]
        return rng.choices(src_words, weights, k=n)

    def translate(words):
        out = [lexicon[w] for w in words]
        rng.shuffle(out)
        if function_words and rng.random() < p_function:
            out.insert(rng.randrange(len(out) + 1), rng.choice(function_words))
        return out

    seen_src, seen_tgt = set(), set()

    def fresh(make, seen):
        while True:
            text = " ".join(make())
            if text not in seen:
                seen.add(text)
                return text

    pairs = []
    while len(pairs) < n_pairs:
        words = src_phrase()
        s = " ".join(words)
        if s in seen_src:
            continue
        t = " ".join(translate(words))
        if t in seen_tgt:
            continue
        seen_src.add(s)
        seen_tgt.add(t)
        pairs.append((s, t))
    noise_src = [fresh(src_phrase, seen_src) for _ in range(n_noise_src)]
    noise_tgt = [fresh(lambda: translate(src_phrase()), seen_tgt) for _ in range(n_noise_tgt)]
    return ToyBitext(pairs, noise_src, noise_tgt, lexicon, src_words)
