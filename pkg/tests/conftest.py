import pytest

from evatlas.atlas import build_atlas
from evatlas.demo import demo_csv_text
from evatlas.ingest import parse_corpus
from evatlas.topics import RunConfig, extract_topics_lexical


@pytest.fixture(scope="session")
def demo_corpus():
    corpus, report = parse_corpus(demo_csv_text(), source="demo_corpus.csv")
    assert report.ok
    return corpus


@pytest.fixture(scope="session")
def demo_run(demo_corpus):
    return extract_topics_lexical(demo_corpus, RunConfig(seed=0))


@pytest.fixture(scope="session")
def demo_atlas(demo_corpus, demo_run):
    model, table = demo_run
    return build_atlas(demo_corpus, model, table)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    lines = []
    for status in ("passed", "failed", "error", "skipped"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" in nodeid:
                name = nodeid.split("::")[-1]
                lines.append((name, status.upper()))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, status in sorted(set(lines)):
            terminalreporter.write_line(f"{status:7s} {name}")
