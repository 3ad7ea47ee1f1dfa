import pytest

from reladapt.adapters.corpusgen import bundled_corpus_texts, bundled_corpus_dir
from reladapt.minilang import parse


@pytest.fixture(scope="session")
def corpus_sources() -> list[str]:
    texts = bundled_corpus_texts()
    assert len(texts) >= 50
    return texts


@pytest.fixture(scope="session")
def corpus_programs(corpus_sources):
    names = sorted(entry.name for entry in bundled_corpus_dir().iterdir()
                   if entry.name.endswith(".mini"))
    return [(name, parse(text)) for name, text in zip(names, corpus_sources)]
