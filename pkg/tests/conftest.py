from pathlib import Path

import pytest

from questgen.annotate import annotate
from questgen.providers import default_providers
from questgen.rules import load_pairs, train

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def providers():
    return default_providers()


@pytest.fixture(scope="session")
def worked_example_pairs():
    return load_pairs(DATA / "worked_example_pairs.jsonl")


@pytest.fixture(scope="session")
def worked_example_store(providers, worked_example_pairs):
    return train(worked_example_pairs, providers)


@pytest.fixture(scope="session")
def corpus_pairs():
    from questgen.providers import data_path

    return load_pairs(data_path("training_pairs.jsonl"))


@pytest.fixture(scope="session")
def corpus_store(providers, corpus_pairs):
    return train(corpus_pairs, providers)


@pytest.fixture(scope="session")
def annotate_text(providers):
    def _annotate(text, source_id="s0"):
        return annotate(text, providers, source_id=source_id)

    return _annotate
