import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_spd(rng, d, cond_floor=0.5):
    A = rng.standard_normal((d, d))
    return A @ A.T / d + cond_floor * np.eye(d)


def sample_cov(X):
    C = X - X.mean(axis=0)
    return C.T @ C / X.shape[0]


# one line per acceptance criterion, printed after the test run
_ACCEPTANCE = {}


@pytest.fixture
def criterion():
    def record(number, ok, detail):
        _ACCEPTANCE[number] = ("PASS" if ok else "FAIL", detail)
        assert ok, f"criterion {number}: {detail}"

    def skip(number, reason):
        _ACCEPTANCE[number] = ("SKIP", reason)
        pytest.skip(reason)

    record.skip = skip
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"{status} criterion {number}: {detail}")
