import sys
from pathlib import Path

import pytest

from semtm import HashingEmbedder, TranslationMemoryStore, TranslationUnit, embed_batch

DATA = Path(__file__).parent / "data"

# verdict lines appended by the acceptance gate, echoed after the run
ACCEPTANCE_VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.ensure_newline()
        terminalreporter.section("acceptance criteria", sep="-")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def fake_sidecar_cmd() -> list[str]:
    return [sys.executable, str(DATA / "fake_sidecar.py")]


@pytest.fixture
def units5() -> list[TranslationUnit]:
    return [
        TranslationUnit(0, "good morning", "buenos días"),
        TranslationUnit(1, "good night", "buenas noches"),
        TranslationUnit(2, "see you tomorrow", "hasta mañana"),
        TranslationUnit(3, "the office opens at 9", "la oficina abre a las 9"),
        TranslationUnit(4, "payment of 100 euros", "pago de 100 euros"),
    ]


@pytest.fixture
def provider() -> HashingEmbedder:
    return HashingEmbedder()


@pytest.fixture
def store5(tmp_path, units5, provider) -> TranslationMemoryStore:
    vectors = embed_batch(provider, [u.source_text for u in units5])
    store = TranslationMemoryStore.build(tmp_path / "tm.stm", units5, vectors)
    yield store
    store.close()
