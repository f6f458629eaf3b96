import numpy as np
import pytest

from monochar.simplicial import shell_mesh, sphere_mesh

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def octa():
    return {L: sphere_mesh("octahedron", L) for L in range(4)}


@pytest.fixture(scope="session")
def ico():
    return {L: sphere_mesh("icosahedron", L) for L in range(3)}


@pytest.fixture(scope="session")
def shell():
    return shell_mesh("octahedron", 1, 1.0, 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def record():
    def _record(number: int, title: str, ok: bool, detail: str = ""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}"
        if detail:
            line += f"  ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
