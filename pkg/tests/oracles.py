"""Brute-force reference computations. They only read table entries through
`TranslationTable.prob` / `LengthModel.prob` and share no code with the
scoring paths they check."""

import itertools
import math
import random

import numpy as np

from agreealign.corpus_io import Vocabulary
from agreealign.model import SRC2TGT, TGT2SRC, DirectionalModel, LengthModel, Row, TranslationTable


def random_model(direction, n_cond, n_gen, rng: random.Random, max_len=4, sparsity=0.0,
                 epsilon=1e-12, floor=1e-12):
    """Normalized random tables; with `sparsity` > 0 some entries are left to the floor."""
    table = TranslationTable(n_gen, floor)
    for e in range(0, n_cond + 1):
        vals = {}
        for f in range(1, n_gen + 1):
            if rng.random() >= sparsity:
                vals[f] = rng.random() + 1e-3
        if not vals:
            vals[rng.randint(1, n_gen)] = 1.0
        z = sum(vals.values())
        table.rows[e] = Row({f: v / z for f, v in vals.items()}, 0.0, floor)
    lengths = LengthModel(max_len, floor)
    for i in range(1, max_len + 1):
        vals = [rng.random() + 1e-3 for _ in range(max_len)]
        z = sum(vals)
        lengths.rows[i] = Row({j: v / z for j, v in enumerate(vals, start=1)}, 0.0, floor)
    cside, gside = ("source", "target") if direction == SRC2TGT else ("target", "source")
    cv = Vocabulary(cside, [f"{cside[0]}{i}" for i in range(1, n_cond + 1)])
    gv = Vocabulary(gside, [f"{gside[0]}{i}" for i in range(1, n_gen + 1)])
    return DirectionalModel(direction, table, lengths, epsilon, cv, gv)


def random_pair_models(n_src, n_tgt, rng, **kw):
    fwd = random_model(SRC2TGT, n_src, n_tgt, rng, **kw)
    bwd = random_model(TGT2SRC, n_tgt, n_src, rng, **kw)
    return fwd, bwd


def brute_phrase_prob(model, e, f):
    """sum over all (I+1)^J word alignments of p(J|I)/(I+1)^J prod p(f_j|e_aj)."""
    if not e:
        return model.epsilon
    words = (0,) + tuple(e)
    n_i, n_j = len(e), len(f)
    total = 0.0
    for a in itertools.product(range(n_i + 1), repeat=n_j):
        p = 1.0
        for j, i in enumerate(a):
            p *= model.table.prob(words[i], f[j])
        total += p
    return model.lengths.prob(n_i, n_j) / (n_i + 1) ** n_j * total


def brute_posteriors(model, e, f):
    """P(a_j = i | e, f) by marginalizing the enumerated joint alignments."""
    words = (0,) + tuple(e)
    n_i, n_j = len(e), len(f)
    post = [[0.0] * n_j for _ in range(n_i + 1)]
    z = 0.0
    for a in itertools.product(range(n_i + 1), repeat=n_j):
        p = 1.0
        for j, i in enumerate(a):
            p *= model.table.prob(words[i], f[j])
        z += p
        for j, i in enumerate(a):
            post[i][j] += p
    return [[v / z for v in row] for row in post]


def double_loop_inner(fwd, bwd, e, f):
    total = 0.0
    for i in range(1, len(e) + 1):
        for j in range(1, len(f) + 1):
            num_f = fwd.table.prob(e[i - 1], f[j - 1])
            den_f = fwd.table.prob(0, f[j - 1]) + sum(fwd.table.prob(x, f[j - 1]) for x in e)
            num_b = bwd.table.prob(f[j - 1], e[i - 1])
            den_b = bwd.table.prob(0, e[i - 1]) + sum(bwd.table.prob(y, e[i - 1]) for y in f)
            total += (num_f / den_f) * (num_b / den_b)
    return total


def double_loop_inner_counts(fwd, bwd, pairs):
    """{(e, f): count} for the src2tgt direction, NULL excluded."""
    counts = {}
    for e, f in pairs:
        for i in range(1, len(e) + 1):
            for j in range(1, len(f) + 1):
                num_f = fwd.table.prob(e[i - 1], f[j - 1])
                den_f = fwd.table.prob(0, f[j - 1]) + sum(fwd.table.prob(x, f[j - 1]) for x in e)
                num_b = bwd.table.prob(f[j - 1], e[i - 1])
                den_b = bwd.table.prob(0, e[i - 1]) + sum(bwd.table.prob(y, e[i - 1]) for y in f)
                key = (e[i - 1], f[j - 1])
                counts[key] = counts.get(key, 0.0) + (num_f / den_f) * (num_b / den_b)
    return counts


def brute_joint_alignment(model, conds, queries):
    """argmax over all (S+1)^T joint phrase alignments of prod_t P(q_t | c_{m_t}).

    Scores are computed with `brute_phrase_prob`; ties resolve to the
    lexicographically smallest assignment (np.argmax returns the first).
    """
    n_s, n_t = len(conds), len(queries)
    logp = np.empty((n_t, n_s + 1))
    for t, q in enumerate(queries):
        logp[t, 0] = math.log(model.epsilon)
        for s, c in enumerate(conds, start=1):
            logp[t, s] = math.log(brute_phrase_prob(model, c, q))
    joint = np.zeros((n_s + 1,) * n_t)
    for t in range(n_t):
        shape = [1] * n_t
        shape[t] = n_s + 1
        joint = joint + logp[t].reshape(shape)
    best = np.unravel_index(int(np.argmax(joint)), joint.shape)
    return [int(m) for m in best]


def random_phrase(rng, vocab_size, max_len):
    return tuple(rng.randint(1, vocab_size) for _ in range(rng.randint(1, max_len)))
