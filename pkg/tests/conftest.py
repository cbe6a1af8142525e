from pathlib import Path

import pytest

from sensindex.config import default_config_path, load_config
from sensindex.pipeline import Pipeline

DATA = default_config_path().parent
CORPUS = sorted((DATA / "corpus").glob("*.txt"))

# Lines collected by the acceptance tests, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def config():
    return load_config()


@pytest.fixture(scope="session")
def pipeline(config):
    return Pipeline(config)


@pytest.fixture(scope="session")
def built(pipeline):
    structure, report = pipeline.build(CORPUS)
    return structure, report


@pytest.fixture(scope="session")
def structure(built):
    return built[0]


def copy_fixtures(dest: Path) -> Path:
    """Copy the shipped fixtures into ``dest`` and return the config path."""
    for p in DATA.iterdir():
        if p.is_file():
            (dest / p.name).write_bytes(p.read_bytes())
    return dest / "config.json"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, "rep_" + rep.when, rep)
