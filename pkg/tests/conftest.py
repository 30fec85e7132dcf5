"""Shared fixtures.

The expensive artifacts (grid searches, the dense pinned-regime database)
are built once per session and shared between the unit tests and the
acceptance suite.
"""

import pytest

from chainsynth.cli import main as cli_main
from chainsynth.hamiltonian import CouplingPair
from chainsynth.pinned import pinned_database
from chainsynth.search import (
    SearchConfig,
    coordinate_descent,
    grid_points,
    read_database,
    run_search,
    write_database,
)

COUPLINGS = CouplingPair(1.0, 0.9)


@pytest.fixture(scope="session")
def couplings():
    return COUPLINGS


@pytest.fixture(scope="session")
def pinned_db(couplings):
    """Dense ZZ-angle database from the deeply pinned sweep."""
    return pinned_database(couplings)


@pytest.fixture(scope="session")
def pinned_db_path(pinned_db, couplings, tmp_path_factory):
    path = tmp_path_factory.mktemp("pinned") / "pinned.jsonl"
    write_database(path, pinned_db, SearchConfig(couplings=couplings))
    return path


@pytest.fixture(scope="session")
def m6_config(couplings):
    return SearchConfig(couplings=couplings, density_m=6, workers=1)


@pytest.fixture(scope="session")
def m6_descents(m6_config):
    """Descent results from every seed of the m=6 grid."""
    seeds = grid_points(m6_config.range_l, m6_config.density_m)
    return [coordinate_descent(s, m6_config) for s in seeds]


@pytest.fixture(scope="session")
def m6_db_paths(tmp_path_factory):
    """Two identical m=6 CLI search invocations with different worker counts."""
    root = tmp_path_factory.mktemp("m6")
    paths = []
    for name, workers in (("a", 1), ("b", 2)):
        path = root / f"db_{name}.jsonl"
        code = cli_main([
            "search", "--grid", "6", "--workers", str(workers),
            "--out", str(path),
        ])
        assert code == 0
        paths.append(path)
    return tuple(paths)


@pytest.fixture(scope="session")
def m6_records(m6_db_paths):
    records, _config = read_database(m6_db_paths[0])
    return records


@pytest.fixture(scope="session")
def m10_records(couplings):
    return run_search(SearchConfig(couplings=couplings, density_m=10, workers=1))


@pytest.fixture(scope="session")
def m4_records(couplings):
    return run_search(SearchConfig(couplings=couplings, density_m=4, workers=1))
