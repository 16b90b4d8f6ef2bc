import numpy as np
import pytest

from fracflux.lattice import Grid


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def g1024():
    return Grid(1024)


@pytest.fixture(scope="session")
def g2048():
    return Grid(2048)


# acceptance bookkeeping: one summary line per criterion at the end of the run
_ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


@pytest.fixture
def accept():
    def record(k: int, part: str, ok: bool, detail: str) -> bool:
        _ACCEPTANCE.setdefault(k, []).append((part, bool(ok), detail))
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        parts = _ACCEPTANCE[k]
        ok = all(p[1] for p in parts)
        detail = "; ".join(f"{name}: {'ok' if good else 'FAIL'} ({d})" for name, good, d in parts)
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
