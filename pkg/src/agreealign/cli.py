"""agreealign command line.

Exit codes: 0 success, 1 runtime/IO failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .alignment import to_link_set
from .corpus_io import (
    SOURCE,
    TARGET,
    FormatError,
    load_corpus,
    load_model,
    load_seed_lexicon,
    read_alignment,
    read_pairs,
    save_model,
    write_alignment,
    write_pairs,
)
from .evaluation import SynthSpec, extract_lexicon, extract_phrase_pairs, f1, read_lines, read_parallel, synthesize
from .training import MODES, TrainingConfig, align, run_viterbi_em, write_stats_csv

log = logging.getLogger("agreealign")

TRAIN_OUTPUTS = ("src2tgt.model", "tgt2src.model", "alignment.tsv", "stats.csv", "manifest.json")


class UsageError(Exception):
    pass


def _digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _add_search_args(p):
    p.add_argument("--candidates", type=int, default=100, help="coarse candidate set size per phrase")
    p.add_argument("--topk", type=int, default=20, help="translations per word used for retrieval")
    p.add_argument("--exhaustive", action="store_true", help="score every phrase instead of retrieving")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--kappa", type=float, default=1e-9)


def _config(args, mode=None) -> TrainingConfig:
    try:
        return TrainingConfig(
            mode=mode or args.mode,
            iterations=getattr(args, "iterations", 1),
            epsilon=getattr(args, "epsilon", 1e-12),
            n_candidates=args.candidates,
            top_k=args.topk,
            floor=getattr(args, "floor", 1e-12),
            alpha_bg=getattr(args, "alpha_bg", 0.1),
            w_seed=getattr(args, "seed_weight", 1.0),
            kappa=args.kappa,
            max_len=getattr(args, "max_len", None),
            workers=args.threads,
            exhaustive=args.exhaustive,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_train_args(p):
    p.add_argument("--src", required=True, help="source phrase corpus, one phrase per line")
    p.add_argument("--tgt", required=True, help="target phrase corpus, one phrase per line")
    p.add_argument("--seed-lexicon", required=True, help="source<TAB>target seed entries")
    p.add_argument("--iterations", type=int, default=10)
    p.add_argument("--epsilon", type=float, default=1e-12, help="empty-phrase translation probability")
    p.add_argument("--floor", type=float, default=1e-12, help="probability of unstored word pairs")
    p.add_argument("--alpha-bg", type=float, default=0.1, help="background mass of seeded rows at init")
    p.add_argument("--seed-weight", type=float, default=1.0, help="pseudo-count per seed entry")
    p.add_argument("--max-len", type=int, default=None)
    p.add_argument("--rand-seed", type=int, default=42)
    _add_search_args(p)


def cmd_train(args) -> int:
    config = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "tool": "agreealign",
        "version": __version__,
        "command": "train",
        "config": config.to_dict(),
        "rand_seed": args.rand_seed,
        "inputs": {
            name: {"path": str(p), "sha256": _digest(p)}
            for name, p in (("src", args.src), ("tgt", args.tgt), ("seed_lexicon", args.seed_lexicon))
        },
        "stats": "stats.csv",
        "outputs": list(TRAIN_OUTPUTS),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    E = load_corpus(args.src, SOURCE)
    F = load_corpus(args.tgt, TARGET)
    seed = load_seed_lexicon(args.seed_lexicon, E.vocab, F.vocab)
    result = run_viterbi_em(E, F, seed, config)
    save_model(result.fwd, out / "src2tgt.model")
    save_model(result.bwd, out / "tgt2src.model")
    # alignment under the saved models, so `align` reproduces it
    write_alignment(align(result.fwd, result.bwd, E, F, config), out / "alignment.tsv")
    write_stats_csv(result.stats, out / "stats.csv")
    last = result.stats[-1]
    print(f"iterations={len(result.stats)} agreed_links={last.agreed_links} ratio={last.ratio:.6f}")
    return 0


def cmd_align(args) -> int:
    config = _config(args)
    fwd = load_model(args.fwd_model)
    bwd = load_model(args.bwd_model, cond_vocab=fwd.gen_vocab, gen_vocab=fwd.cond_vocab)
    if fwd.direction != "src2tgt" or bwd.direction != "tgt2src":
        raise FormatError("expected a src2tgt model for --fwd-model and a tgt2src model for --bwd-model")
    E = load_corpus(args.src, SOURCE, fwd.cond_vocab)
    F = load_corpus(args.tgt, TARGET, fwd.gen_vocab)
    links = align(fwd, bwd, E, F, config)
    write_alignment(links, args.out)
    print(f"agreed_links={len(links)}")
    return 0


def cmd_synth(args) -> int:
    pairs = read_parallel(args.pairs)
    ns = read_lines(args.noise_src) if args.noise_src else []
    nt = read_lines(args.noise_tgt) if args.noise_tgt else []
    spec = SynthSpec(args.n_pairs,
                     len(ns) if args.n_noise_src is None else args.n_noise_src,
                     len(nt) if args.n_noise_tgt is None else args.n_noise_tgt,
                     args.rand_seed)
    src, tgt, gold = synthesize(pairs, ns, nt, spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "source.txt").write_text("\n".join(src) + "\n", encoding="utf-8")
    (out / "target.txt").write_text("\n".join(tgt) + "\n", encoding="utf-8")
    write_pairs(gold, out / "gold.tsv")
    print(f"S={len(src)} T={len(tgt)} G={len(gold)}")
    return 0


def cmd_eval_f1(args) -> int:
    pred = read_alignment(args.pred) if args.pred_format == "alignment" else read_pairs(args.pred)
    gold = read_pairs(args.gold)
    print(f"{f1(pred, gold):.6f}")
    return 0


def cmd_extract(args) -> int:
    if args.what == "lexicon":
        if not args.model:
            raise UsageError("extract lexicon needs --model")
        if not 0 < args.threshold <= 1:
            raise UsageError("--threshold must lie in (0, 1]")
        model = load_model(args.model)
        rows = extract_lexicon(model, args.threshold)
        lines = [f"{e}\t{f}\t{format(p, '.17g')}" for e, f, p in rows]
    else:
        if not (args.alignment and args.src and args.tgt):
            raise UsageError("extract phrases needs --alignment, --src and --tgt")
        E = load_corpus(args.src, SOURCE)
        F = load_corpus(args.tgt, TARGET)
        links = read_alignment(args.alignment)
        for s, t in links:
            if s > len(E) or t > len(F):
                raise FormatError(f"link <{s}, {t}> outside the corpora")
        lines = [f"{s}\t{t}" for s, t in extract_phrase_pairs(links, E, F)]
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_report(args) -> int:
    """Train every requested mode on one corpus pair and chart the runs."""
    from .plotting import plot_agreement, plot_f1

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for mode in args.modes:
        config = _config(args, mode)
        E = load_corpus(args.src, SOURCE)
        F = load_corpus(args.tgt, TARGET)
        seed = load_seed_lexicon(args.seed_lexicon, E.vocab, F.vocab)
        gold = read_pairs(args.gold)

        def record(st, a_fwd, a_bwd, agreed, mode=mode):
            rows.append(dict(iter=st.iter, mode=mode, ratio=st.ratio, agreed_links=st.agreed_links,
                             f1_fwd=f1(to_link_set(a_fwd), gold), f1_bwd=f1(to_link_set(a_bwd), gold),
                             f1_agreed=f1(agreed, gold)))

        run_viterbi_em(E, F, seed, config, on_iteration=record)
    cols = ("iter", "mode", "ratio", "agreed_links", "f1_fwd", "f1_bwd", "f1_agreed")
    with open(out / "ablation.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([f"{r[c]:.6f}" if isinstance(r[c], float) else r[c] for c in cols])
    plot_agreement(rows, out / "agreement_ratio.png")
    plot_f1(rows, out / "f1.png")
    for mode in args.modes:
        last = [r for r in rows if r["mode"] == mode][-1]
        print(f"{mode}: ratio={last['ratio']:.4f} f1_fwd={last['f1_fwd']:.4f} "
              f"f1_bwd={last['f1_bwd']:.4f} f1_agreed={last['f1_agreed']:.4f}")
    return 0


def cmd_toy(args) -> int:
    from .toy import make_toy_bitext

    toy = make_toy_bitext(args.pairs, args.noise, args.noise, vocab_size=args.vocab, seed=args.rand_seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "parallel.tsv").write_text("".join(f"{s}\t{t}\n" for s, t in toy.pairs), encoding="utf-8")
    (out / "noise.src").write_text("".join(s + "\n" for s in toy.noise_src), encoding="utf-8")
    (out / "noise.tgt").write_text("".join(t + "\n" for t in toy.noise_tgt), encoding="utf-8")
    (out / "seed.tsv").write_text("".join(f"{s}\t{t}\n" for s, t in toy.seed_entries(args.seed_size)),
                                  encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agreealign", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="joint Viterbi EM training")
    _add_train_args(p)
    p.add_argument("--mode", required=True, choices=MODES)
    p.add_argument("--out", default="out", help="output directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("align", help="agreed alignment from trained models")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.add_argument("--fwd-model", required=True)
    p.add_argument("--bwd-model", required=True)
    p.add_argument("--mode", default="outer", choices=MODES, help="search scoring (inner adds word agreement)")
    p.add_argument("--out", required=True, help="alignment TSV path")
    _add_search_args(p)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("synth", help="build a noisy non-parallel benchmark from parallel pairs")
    p.add_argument("--pairs", required=True, help="source<TAB>target parallel phrases")
    p.add_argument("--noise-src")
    p.add_argument("--noise-tgt")
    p.add_argument("--n-pairs", type=int)
    p.add_argument("--n-noise-src", type=int)
    p.add_argument("--n-noise-tgt", type=int)
    p.add_argument("--rand-seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval-f1", help="F1 of predicted links against gold pairs")
    p.add_argument("--pred", required=True)
    p.add_argument("--pred-format", choices=("alignment", "pairs"), default="alignment")
    p.add_argument("--gold", required=True)
    p.set_defaults(func=cmd_eval_f1)

    p = sub.add_parser("extract", help="lexicon or parallel phrases from training artifacts")
    p.add_argument("what", choices=("lexicon", "phrases"))
    p.add_argument("--model")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--alignment")
    p.add_argument("--src")
    p.add_argument("--tgt")
    p.add_argument("--out")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("report", help="train several modes, write ablation.csv and figures")
    _add_train_args(p)
    p.add_argument("--gold", required=True, help="ground-truth s<TAB>t pairs")
    p.add_argument("--modes", nargs="+", choices=MODES, default=list(MODES))
    p.add_argument("--out", default="report")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("toy", help="write an artificial parallel set, noise and seed lexicon")
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--noise", type=int, default=1000)
    p.add_argument("--vocab", type=int, default=1000)
    p.add_argument("--seed-size", type=int, default=100)
    p.add_argument("--rand-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_toy)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on bad usage
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"agreealign: error: {exc}", file=sys.stderr)
        return 2
    except (FormatError, OSError, ValueError) as exc:
        print(f"agreealign: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
