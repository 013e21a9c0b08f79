from pathlib import Path

import pytest

from nertc import corpus, gazetteer, kb, textproc

DATA = Path(__file__).parent / "data"
GOLDEN = DATA / "golden"


@pytest.fixture(scope="session")
def kb_path() -> Path:
    return DATA / "minikb.kbsnap"


@pytest.fixture(scope="session")
def dump_path() -> Path:
    return DATA / "articles.dump"


@pytest.fixture(scope="session")
def mapping_path() -> Path:
    return DATA / "type_mapping.txt"


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture(scope="session")
def snapshot(kb_path):
    return kb.parse_snapshot(str(kb_path))


@pytest.fixture(scope="session")
def gaz(snapshot):
    return gazetteer.build_gazetteer(snapshot)


@pytest.fixture(scope="session")
def docs(dump_path):
    return textproc.read_dump(str(dump_path))


@pytest.fixture(scope="session")
def golden_fga():
    return corpus.read_corpus(str(GOLDEN / "fga.tsv"))


@pytest.fixture(scope="session")
def golden_cga_di():
    return corpus.read_corpus(str(GOLDEN / "cga_di.tsv"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed"):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance" in report.nodeid and report.when == "call":
                name = report.nodeid.split("::")[-1]
                lines.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for name, verdict in sorted(lines):
            terminalreporter.write_line(f"  {verdict}  {name}")
