import pytest

from frf import synth
from frf.division import SeedSet, divide, project_and_open
from frf.flatten import flatten_pipeline, label_boundary_loops
from frf.mesh import close_hole
from frf.template import build_template

HOLES = ("LIPV", "LSPV", "RIPV", "RSPV", "LAA")


@pytest.fixture(scope="session")
def cavity():
    return synth.make_cavity(n_lat=40, n_lon=60, radius=30.0)


@pytest.fixture(scope="session")
def seeds(cavity):
    return SeedSet(holes={k: cavity.seeds[k] for k in HOLES},
                   mv=tuple(cavity.seeds["MV"]))


@pytest.fixture(scope="session")
def closed_cavity(cavity):
    closed = cavity.mesh
    for label in HOLES:
        closed = close_hole(closed, cavity.rings[label])
    return closed


@pytest.fixture(scope="session")
def division(closed_cavity, seeds):
    return divide(closed_cavity, seeds)


@pytest.fixture(scope="session")
def projection(closed_cavity, division, seeds):
    return project_and_open(closed_cavity, division, seeds)


@pytest.fixture(scope="session")
def population_template():
    return build_template("population")


@pytest.fixture(scope="session")
def flat_result(cavity, seeds, population_template):
    return flatten_pipeline(cavity.mesh, seeds, population_template)


@pytest.fixture(scope="session")
def labelled_loops(cavity, seeds):
    return label_boundary_loops(cavity.mesh, seeds)


@pytest.fixture(scope="session")
def big_cavity():
    """The ~50k-triangle benchmark cavity; built once per session."""
    return synth.make_cavity(n_lat=128, n_lon=230, radius=30.0)


@pytest.fixture(scope="session")
def big_seeds(big_cavity):
    return SeedSet(holes={k: big_cavity.seeds[k] for k in HOLES},
                   mv=tuple(big_cavity.seeds["MV"]))
