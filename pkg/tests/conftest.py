import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gammamrl import mixture  # noqa: E402

# every MrlGrid built during the session is checked for m(t) + t non-decreasing
MRL_AUDIT = {"grids": 0, "rows": 0, "violations": [], "current": None, "exempt": False}
ACCEPTANCE = {}

_original_post_init = mixture.MrlGrid.__post_init__


def _audited_post_init(self):
    _original_post_init(self)
    t = self.grid.points
    rows = np.atleast_2d(self.values)
    if MRL_AUDIT.get("exempt"):
        return
    MRL_AUDIT["grids"] += 1
    for row in rows:
        ok = np.isfinite(row)
        if ok.sum() < 2:
            continue
        MRL_AUDIT["rows"] += 1
        y = row[ok] + t[ok]
        worst = np.min(np.diff(y))
        if worst < -1e-6 * abs(row[ok][0]):
            MRL_AUDIT["violations"].append((float(worst), float(row[ok][0]), MRL_AUDIT["current"]))


mixture.MrlGrid.__post_init__ = _audited_post_init


def pytest_collection_modifyitems(config, items):
    # the characterization audit has to see every other test's grids first
    last = [it for it in items if it.get_closest_marker("audit_last")]
    rest = [it for it in items if not it.get_closest_marker("audit_last")]
    items[:] = rest + last


def pytest_configure(config):
    config.addinivalue_line("markers", "audit_last: run after every other test")
    config.addinivalue_line("markers", "mrl_audit_exempt: builds invalid MRL grids on purpose")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, title, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title}  [{detail}]")


@pytest.fixture(autouse=True)
def _audit_owner(request):
    MRL_AUDIT["current"] = request.node.nodeid
    # a test that hand-builds an invalid grid to exercise the detector opts out
    MRL_AUDIT["exempt"] = request.node.get_closest_marker("mrl_audit_exempt") is not None
    yield
    MRL_AUDIT["current"] = None
    MRL_AUDIT["exempt"] = False


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
