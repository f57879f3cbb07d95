import pytest

from semipositone.model import Regime, standard_spec
from semipositone.radialfem import build_mesh
from semipositone.solvers import minimize, mountain_pass_solve


@pytest.fixture(scope="session")
def ref_mesh():
    return build_mesh(400, 60.0, 5.0)


@pytest.fixture(scope="session")
def small_mesh():
    return build_mesh(120, 40.0, 4.0, growth=1.1)


@pytest.fixture(scope="session")
def sup_spec():
    return standard_spec(Regime.SUPERLINEAR, 0.0)


@pytest.fixture(scope="session")
def sub_spec():
    return standard_spec(Regime.SUBLINEAR, 0.0)


@pytest.fixture(scope="session")
def sup_solution(sup_spec, ref_mesh):
    return mountain_pass_solve(sup_spec, ref_mesh)


@pytest.fixture(scope="session")
def sub_solution(sub_spec, ref_mesh):
    return minimize(sub_spec, ref_mesh)


_ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}


@pytest.fixture
def acceptance(request):
    """Record one acceptance criterion outcome for the end-of-run summary."""
    lines = request.config.stash[_ACCEPTANCE]

    def record(number: int, title: str, ok: bool, detail: str):
        lines[number] = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title} ({detail})"
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash[_ACCEPTANCE]
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
