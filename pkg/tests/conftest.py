import os

# zero timestamps everywhere so fixtures and transcripts are byte-stable
os.environ.setdefault("CAUSALAB_TEST_MODE", "1")

import pytest

from causalab.retrieval import default_index


@pytest.fixture(scope="session")
def corpus_index():
    return default_index()
