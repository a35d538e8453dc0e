import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from agreealign.corpus_io import SeedLexicon, corpus_from_lines  # noqa: E402

# Acceptance criteria register their verdicts here; printed in the summary.
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])


@pytest.fixture
def tiny():
    """Two-word-overlap toy corpora with a covering seed lexicon."""
    E = corpus_from_lines(["a b", "c", "b d"], "source")
    F = corpus_from_lines(["x y", "z", "y w"], "target")
    seed = SeedLexicon()
    for s, t in (("a", "x"), ("b", "y"), ("c", "z"), ("d", "w")):
        seed.add(E.vocab.id(s), F.vocab.id(t))
    return E, F, seed


@pytest.fixture
def tiny_files(tmp_path):
    src = tmp_path / "src.txt"
    tgt = tmp_path / "tgt.txt"
    seed = tmp_path / "seed.tsv"
    src.write_text("a b\nc\nb d\ne\n", encoding="utf-8")
    tgt.write_text("z\ny w\nx y\nv\n", encoding="utf-8")
    seed.write_text("a\tx\nb\ty\nc\tz\n", encoding="utf-8")
    return src, tgt, seed
