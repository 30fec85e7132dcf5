import json
import math

import numpy as np
import pytest

from chainsynth.canonical import CanonicalClass
from chainsynth.hamiltonian import ControlPoint, CouplingPair
from chainsynth.search import (
    CoverageStats,
    GateRecord,
    SearchConfig,
    coordinate_descent,
    coverage_stats,
    grid_points,
    read_database,
    run_search,
    write_database,
    write_stats_csv,
    zz_distance,
)

COUPLINGS = CouplingPair(1.0, 0.9)
HALF_PI = math.pi / 2


def _fake_record(angle, tau=10.0):
    return GateRecord(
        point=ControlPoint.from_values(1.0, 2.0, 3.0, tau),
        couplings=COUPLINGS,
        objective_value=1.9999,
        leakage=0.001,
        cls=CanonicalClass(0.0, 0.0, angle),
        zz_angle=angle,
        alpha=1.0 + 0.0j,
        beta=complex(math.cos(angle), math.sin(angle)),
        n_entries=(1.0 + 0.0j, 0.0j, 0.0j, 1.0 + 0.0j),
        projection_distance=1e-6,
        descent_iterations=42,
    )


def test_grid_shape_and_corners():
    points = grid_points(5.0, 2)
    assert len(points) == 16
    first = points[0]
    assert (first.energies.e1, first.energies.e2, first.energies.e3,
            first.tau) == (-5.0, -5.0, -5.0, 5.0)
    assert points[-1].tau == 20.0
    assert len(grid_points(5.0, 3)) == 81


def test_grid_refinement_preserves_seeds():
    # m' = 5 refines m = 3 because (3-1) divides (5-1).
    coarse = {(p.energies.e1, p.energies.e2, p.energies.e3, p.tau)
              for p in grid_points(5.0, 3)}
    fine = {(p.energies.e1, p.energies.e2, p.energies.e3, p.tau)
            for p in grid_points(5.0, 5)}
    assert coarse <= fine


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(couplings=COUPLINGS, density_m=1)
    with pytest.raises(ValueError):
        SearchConfig(couplings=COUPLINGS, range_l=0.0)
    with pytest.raises(ValueError):
        SearchConfig(couplings=COUPLINGS, obj_threshold=2.5)
    with pytest.raises(ValueError):
        SearchConfig(couplings=COUPLINGS, jitter=-1.0)


def test_descent_trace_monotone_from_grid_seed():
    config = SearchConfig(couplings=COUPLINGS, density_m=2)
    result = coordinate_descent(grid_points(5.0, 2)[3], config)
    assert np.all(np.diff(result.trace) >= 0)
    assert result.converged
    assert result.final_obj == pytest.approx(result.trace[-1], abs=1e-9)


def test_run_search_is_worker_independent():
    config1 = SearchConfig(couplings=COUPLINGS, density_m=3, workers=1)
    config2 = SearchConfig(couplings=COUPLINGS, density_m=3, workers=2)
    assert run_search(config1) == run_search(config2)


def test_run_search_progress_callback():
    seen = []
    config = SearchConfig(couplings=COUPLINGS, density_m=2, workers=1)
    run_search(config, progress=lambda done, total, found: seen.append(
        (done, total, found)))
    assert seen[-1][0] == seen[-1][1] == 16


def test_coverage_stats_reference_values():
    stats = coverage_stats([_fake_record(a) for a in (0.1, 0.5, 1.0)])
    assert stats.count == 3
    assert stats.max_gap == pytest.approx(HALF_PI - 1.0, abs=1e-12)
    assert sum(stats.angle_histogram) == 3

    single = coverage_stats([_fake_record(math.pi / 4)])
    assert single.max_gap == pytest.approx(math.pi / 4)

    empty = coverage_stats([])
    assert empty.count == 0
    assert empty.max_gap == pytest.approx(HALF_PI)
    assert empty.mean_gap == pytest.approx(HALF_PI)


def test_database_round_trip(tmp_path):
    path = tmp_path / "db.jsonl"
    config = SearchConfig(couplings=COUPLINGS, density_m=4)
    records = [_fake_record(0.2), _fake_record(0.4, tau=11.0)]
    write_database(path, records, config)
    back, back_config = read_database(path)
    assert back == records
    assert back_config == config


def test_read_database_rejects_foreign_files(tmp_path):
    path = tmp_path / "other.jsonl"
    path.write_text(json.dumps({"kind": "something-else"}) + "\n")
    with pytest.raises(ValueError, match="not a chainsynth database"):
        read_database(path)
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    with pytest.raises(ValueError, match="empty"):
        read_database(empty)


def test_stats_csv_format(tmp_path):
    path = tmp_path / "stats.csv"
    write_stats_csv(path, CoverageStats(2, 0.5, 0.25, [1, 1],
                                        [0.0, HALF_PI / 2, HALF_PI]))
    lines = path.read_text().splitlines()
    assert lines[0] == "count,max_gap,mean_gap"
    assert lines[1].startswith("2,0.5,0.25")
    assert lines[2] == "bin_start,bin_end,count"
    assert len(lines) == 5


def test_zz_distance_recognizes_dressed_zz():
    c = 0.37
    phases = np.exp(1j * (0.2 + 0.3 * np.array([1, 1, -1, -1])
                          + 0.5 * np.array([1, -1, 1, -1])))
    block = phases[:, None] * np.diag(
        np.exp(1j * c * np.array([1, -1, -1, 1])))
    assert zz_distance(block, c) < 1e-8
    assert zz_distance(np.eye(4, dtype=complex), c) > 0.1
