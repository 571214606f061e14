import numpy as np
import pytest

from dsflow.symfun import elementary_table


def cone_points(n, k, count, seed=0, min_margin=1e-2):
    """Random curvature tuples strictly inside Gamma_k^+ (ascending).

    Centres are spread so that samples range from nearly umbilic to far from
    the positive cone; tuples too close to the cone boundary are rejected.
    """
    rng = np.random.default_rng(seed)
    out = []
    while sum(len(b) for b in out) < count:
        kap = rng.normal(size=(4 * count, n)) * rng.uniform(0.05, 2.0, size=(4 * count, 1))
        kap += rng.uniform(0.0, 2.0, size=(4 * count, 1))
        E = elementary_table(kap)
        scale = np.max(np.abs(kap), axis=-1)
        ok = np.all(E[:, 1 : k + 1] > min_margin * scale[:, None] ** np.arange(1, k + 1), axis=1)
        out.append(kap[ok])
    return np.sort(np.concatenate(out)[:count], axis=-1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, msg, secs = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  ({secs:6.1f} s)  {msg}")
