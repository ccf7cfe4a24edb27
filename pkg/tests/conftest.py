import numpy as np
import pytest
from hypothesis import settings

from skewfv.mesh import build_cartesian, build_triangular, distort_random, distort_systematic

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def uniform():
    return build_cartesian(8, 6, 2.0, 1.5)


@pytest.fixture(scope="session")
def chevron():
    return distort_systematic(build_cartesian(10, 8, 1.0, 1.0), 0.25)


@pytest.fixture(scope="session")
def random_quad():
    return distort_random(build_cartesian(10, 8, 1.0, 1.0), 0.2, seed=3)


@pytest.fixture(scope="session")
def triangles():
    return distort_random(build_triangular(8, 8, 1.0, 1.0, seed=2), 0.2, seed=2)


@pytest.fixture(scope="session", params=["uniform", "chevron", "random_quad", "triangles"])
def any_mesh(request):
    return request.getfixturevalue(request.param)


def interior_cells(mesh):
    """Cells without a boundary face."""
    ni = mesh.n_internal
    boundary = np.unique(mesh.owner[ni:])
    mask = np.ones(mesh.n_cells, dtype=bool)
    mask[boundary] = False
    return np.where(mask)[0]


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def report(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
