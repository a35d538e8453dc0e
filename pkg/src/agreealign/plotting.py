"""Figures for ablation reports: agreement ratio and F1 per iteration."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.ticker import MaxNLocator  # noqa: E402

MODE_STYLE = {
    "independent": dict(color="0.45", marker="o", linestyle="--", label="no agreement"),
    "outer": dict(color="tab:blue", marker="s", label="outer"),
    "inner": dict(color="tab:red", marker="^", label="inner"),
}


def _axes(xlabel, ylabel, width=5.0):
    fig, ax = plt.subplots(figsize=(width, width * 0.68))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    ax.xaxis.set_major_locator(MaxNLocator(integer=True))
    return fig, ax


def plot_agreement(rows, path):
    """rows: dicts with iter, mode, ratio."""
    fig, ax = _axes("iteration", "agreement ratio")
    for mode, style in MODE_STYLE.items():
        pts = [(r["iter"], r["ratio"]) for r in rows if r["mode"] == mode]
        if pts:
            xs, ys = zip(*pts)
            ax.plot(xs, ys, **style)
    ax.set_ylim(0, 1)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_f1(rows, path):
    """rows: dicts with iter, mode, f1_fwd, f1_bwd, f1_agreed.

    Independent training is drawn as its two directions, agreement modes as
    the F1 of their agreed link set.
    """
    fig, ax = _axes("iteration", "F1")
    indep = [r for r in rows if r["mode"] == "independent"]
    if indep:
        xs = [r["iter"] for r in indep]
        ax.plot(xs, [r["f1_fwd"] for r in indep], color="0.3", marker="o", linestyle="--", label="src→tgt")
        ax.plot(xs, [r["f1_bwd"] for r in indep], color="0.6", marker="o", linestyle=":", label="tgt→src")
    for mode in ("outer", "inner"):
        pts = [(r["iter"], r["f1_agreed"]) for r in rows if r["mode"] == mode]
        if pts:
            xs, ys = zip(*pts)
            ax.plot(xs, ys, **MODE_STYLE[mode])
    ax.set_ylim(0, 1)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
