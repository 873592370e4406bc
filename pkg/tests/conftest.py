import numpy as np
import pytest
from hypothesis import settings

from isoent.families import Bell, Elegant, General, gen_family

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

EJM = Elegant(np.pi / 4, np.pi / 2)
BSM = Bell(np.pi / 4, 0.0, np.pi / 2)


@pytest.fixture
def ejm():
    return gen_family(EJM).computational().matrix


@pytest.fixture
def bsm():
    return gen_family(BSM).computational().matrix


@pytest.fixture
def general_member():
    return gen_family(General(0.3, 0.7, 0.4)).computational().matrix


_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    n, title = mark.args
    prev = _ACCEPTANCE.get(n, (title, "PASS"))
    failed = rep.failed or (rep.when == "call" and rep.skipped)
    _ACCEPTANCE[n] = (title, "FAIL" if failed or prev[1] == "FAIL" else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, status = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {title}")
