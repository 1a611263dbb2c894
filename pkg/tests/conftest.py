from pathlib import Path

import pytest
from hypothesis import settings

from apiscenarios.opinion import default_lexicon
from apiscenarios.synthetic import motivating_catalog, motivating_thread

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def fig_thread():
    return motivating_thread()


@pytest.fixture(scope="session")
def fig_catalog():
    return motivating_catalog()


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


_ACCEPTANCE: list[tuple[str, str, str]] = []


@pytest.fixture
def detail(request):
    """Attach a measured value to the acceptance summary line."""
    def note(text):
        request.node.user_properties.append(("detail", str(text)))
        print(text)
    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.module.__name__.endswith("test_acceptance") and (rep.when == "call" or rep.failed):
        label = (item.function.__doc__ or item.name).strip().splitlines()[0]
        notes = "; ".join(v for k, v in item.user_properties if k == "detail")
        _ACCEPTANCE.append(("PASS" if rep.passed else "FAIL", label, notes))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for status, label, notes in _ACCEPTANCE:
        terminalreporter.write_line(f"{status} {label}" + (f" [{notes}]" if notes else ""))
