import pytest

from kndirac.discretization import assemble_pencil, build_mesh, mesh_for_width
from kndirac.operator_model import OperatorParams

PARAM_SETS = [(0.5, 0.0, 0.0), (1.5, 0.25, 0.75), (-4.5, 0.005, 0.015)]


@pytest.fixture(scope="session")
def exact_case_pencil():
    """kappa = 3/2, am = aw = 1/4 at n = 64."""
    return assemble_pencil(OperatorParams(1.5, 0.25, 0.25), build_mesh(64))


@pytest.fixture(scope="session")
def pencil_cache():
    cache = {}

    def get(kappa, am, aw, h):
        key = (kappa, am, aw, h)
        if key not in cache:
            cache[key] = assemble_pencil(OperatorParams(kappa, am, aw), mesh_for_width(h))
        return cache[key]

    return get
