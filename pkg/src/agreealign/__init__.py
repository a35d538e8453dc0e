"""Agreement-based learning of parallel lexicons and phrases from non-parallel corpora."""

__version__ = "0.1.0"

from .alignment import LinkSet, PhraseAlignment, agreement_ratio, intersect, to_link_set, viterbi_inner, viterbi_outer
from .corpus_io import (
    MonolingualCorpus,
    Phrase,
    SeedLexicon,
    Vocabulary,
    load_corpus,
    load_model,
    load_seed_lexicon,
    save_model,
    write_alignment,
)
from .evaluation import SynthSpec, extract_lexicon, extract_phrase_pairs, f1, gen_synthetic, synthesize
from .model import DirectionalModel, init_models, inner_pair_score, link_posteriors, phrase_translation_prob
from .retrieval import build_index, candidates
from .training import TrainingConfig, run_viterbi_em
