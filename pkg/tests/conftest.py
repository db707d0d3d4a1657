from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from proofdesk.parser import parse_article  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def golden_text() -> str:
    return (FIXTURES / "mtest1.mfl").read_text()


@pytest.fixture(scope="session")
def golden_article(golden_text):
    return parse_article(golden_text)


@pytest.fixture(scope="session")
def golden_problem_text() -> str:
    return (FIXTURES / "e2_2__mtest1.p").read_text()


@pytest.fixture(scope="session")
def corpus():
    """(library with base0, 20 parsed articles, >= 200 obligations)."""
    from helpers import build_corpus

    return build_corpus()


@pytest.fixture(scope="session")
def corpus_reports(corpus):
    """Per-article serial verification reports over the corpus."""
    from proofdesk.verifier import verify_article

    lib, articles = corpus
    return [verify_article(article, lib, workers=1) for article in articles]
