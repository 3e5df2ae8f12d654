import numpy as np
import pytest
from hypothesis import settings

from noneqcp.materials import GOLD, LayerStack, load_sapphire

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


@pytest.fixture(scope="session")
def sapphire():
    return load_sapphire()


@pytest.fixture(scope="session")
def stack(sapphire):
    return LayerStack(sapphire, GOLD, 50e-9)


def rel(a, b):
    return np.max(np.abs(np.asarray(a) / np.asarray(b) - 1))


# ---------------------------------------------------------------------------
# acceptance summary: one line per criterion, whatever the -s / -q flags

_CRITERIA: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    entry = _CRITERIA.setdefault(mark.args[0], {"ok": True, "details": []})
    entry["ok"] &= rep.passed
    details = [v for k, v in item.user_properties if k == "detail"]
    status = "ok" if rep.passed else "FAILED"
    entry["details"].append(f"{item.name} {status}" + (f" ({'; '.join(details)})" if details else ""))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if e['ok'] else 'FAIL'}")
        for d in e["details"]:
            terminalreporter.write_line(f"    {d}")
