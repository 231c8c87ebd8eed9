import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from guiscout.corpus import CorpusIndex
from guiscout.embedding import DeterministicHashEmbedder
from guiscout.fixtures import demo_corpus, demo_llm_script, write_demo_llm_script
from guiscout.recommend import ScriptedLlmProvider
from guiscout.session import SessionConfig, SessionEngine, SessionStore


class SteppingClock:
    """Deterministic clock: one second per event, fixed start."""

    def __init__(self, start="2024-01-01T00:00:00+00:00"):
        self.t = datetime.fromisoformat(start)
        self.n = 0

    def __call__(self) -> str:
        ts = (self.t + timedelta(seconds=self.n)).isoformat()
        self.n += 1
        return ts


class SequentialIds:
    def __init__(self, prefix="sess"):
        self.prefix = prefix
        self.n = 0

    def __call__(self) -> str:
        self.n += 1
        return f"{self.prefix}-{self.n:04d}"


def index_of(docs) -> CorpusIndex:
    return CorpusIndex(documents={d.gui_id: d for d in docs}, count_total=len(docs))


@pytest.fixture(scope="session")
def demo_index() -> CorpusIndex:
    return index_of(demo_corpus())


@pytest.fixture()
def demo_script_path(tmp_path):
    return write_demo_llm_script(tmp_path / "script.json")


def build_engine(index, script_path, store=None, **config_kwargs) -> SessionEngine:
    config = SessionConfig(**config_kwargs)
    return SessionEngine(
        index=index,
        embedder=DeterministicHashEmbedder(dim=config.embedder_dim),
        llm_provider=ScriptedLlmProvider(script_path),
        config=config,
        store=store,
        clock=SteppingClock(),
        id_factory=SequentialIds(),
    )


@pytest.fixture()
def engine(demo_index, demo_script_path, tmp_path) -> SessionEngine:
    return build_engine(
        demo_index, demo_script_path, store=SessionStore(tmp_path / "sessions")
    )


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1].replace("test_", "", 1)
    outcome = "PASS" if report.passed else "FAIL"
    print(f"\nACCEPTANCE {name}: {outcome}")
