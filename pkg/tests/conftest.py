from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import synth_corpus, write_vocab_for  # noqa: E402


@pytest.fixture(scope="session")
def small_corpus():
    return synth_corpus(n_per_class=120, seed=11)


@pytest.fixture(scope="session")
def small_vocab(tmp_path_factory, small_corpus):
    from assumption_forge.vectorize import load_vocab

    path = tmp_path_factory.mktemp("vocab") / "small.vocab"
    write_vocab_for(small_corpus.texts, path)
    return load_vocab(path)
