"""Grid-seeded coordinate descent search for decoupled ZZ-type gates.

The three-step procedure: seed an m^4 grid over (E1, E2, E3, tau), run
alternating coordinate gradient descent on the decoupling objective from
every seed, and keep converged points whose objective clears the
acceptance threshold and whose conditional gate classifies as (0, 0, c).
Accepted gates form a database covering ZZ angles in [0, pi/2).
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from chainsynth import __version__, _kernels
from chainsynth.canonical import (
    DEFAULT_ZZ_TOL,
    CanonicalClass,
    canonical_angles,
    gate_of_class,
    is_zz_class,
    project_unitary,
)
from chainsynth.hamiltonian import (
    ControlPoint,
    CouplingPair,
    build_n,
    conditional_block,
    leakage as point_leakage,
    objective as point_objective,
)
from chainsynth.numerics import max_entry_norm

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class SearchConfig:
    couplings: CouplingPair
    range_l: float = 5.0
    density_m: int = 10
    conv_tol: float = 0.000005
    obj_threshold: float = 1.99995
    angle_tol: float = DEFAULT_ZZ_TOL
    max_iterations: int = 10000
    workers: int | None = None
    jitter: float = 0.0
    seed: int = 0
    tau_penalty: float = 0.0

    def __post_init__(self):
        if self.density_m < 2:
            raise ValueError("density_m must be at least 2")
        if self.range_l <= 0:
            raise ValueError("range_l must be positive")
        if not 0.0 < self.obj_threshold < 2.0:
            raise ValueError("obj_threshold must lie in (0, 2)")
        if self.jitter < 0:
            raise ValueError("jitter must be non-negative")


@dataclass(frozen=True)
class GateRecord:
    """An accepted search solution and everything needed to replay it."""

    point: ControlPoint
    couplings: CouplingPair
    objective_value: float
    leakage: float
    cls: CanonicalClass
    zz_angle: float
    alpha: complex
    beta: complex
    n_entries: tuple[complex, complex, complex, complex]  # n11, n13, n31, n33
    projection_distance: float
    descent_iterations: int

    def to_json_dict(self) -> dict:
        p = self.point
        return {
            "e1": p.energies.e1,
            "e2": p.energies.e2,
            "e3": p.energies.e3,
            "tau": p.tau,
            "j12": self.couplings.j12,
            "j23": self.couplings.j23,
            "objective": self.objective_value,
            "leakage": self.leakage,
            "class": [self.cls.c1, self.cls.c2, self.cls.c3],
            "zz_angle": self.zz_angle,
            "alpha": [self.alpha.real, self.alpha.imag],
            "beta": [self.beta.real, self.beta.imag],
            "n_entries": [[z.real, z.imag] for z in self.n_entries],
            "projection_distance": self.projection_distance,
            "descent_iterations": self.descent_iterations,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "GateRecord":
        return cls(
            point=ControlPoint.from_values(d["e1"], d["e2"], d["e3"], d["tau"]),
            couplings=CouplingPair(d["j12"], d["j23"]),
            objective_value=d["objective"],
            leakage=d["leakage"],
            cls=CanonicalClass(*d["class"]),
            zz_angle=d["zz_angle"],
            alpha=complex(*d["alpha"]),
            beta=complex(*d["beta"]),
            n_entries=tuple(complex(re, im) for re, im in d["n_entries"]),
            projection_distance=d["projection_distance"],
            descent_iterations=d["descent_iterations"],
        )


@dataclass(frozen=True)
class DescentResult:
    final: ControlPoint
    final_obj: float
    iterations: int
    trace: np.ndarray
    converged: bool


@dataclass(frozen=True)
class CoverageStats:
    count: int
    max_gap: float
    mean_gap: float
    angle_histogram: list[int]
    bin_edges: list[float] = field(default_factory=list)


def grid_points(range_l: float, density_m: int) -> list[ControlPoint]:
    """The deterministic m^4 seed grid, lexicographic in (E1, E2, E3, tau).

    Energies run over { -L + 2Lk/(m-1) } and tau over { L + 3Lk/(m-1) }
    for k = 0..m-1.
    """
    if density_m < 2:
        raise ValueError("density_m must be at least 2")
    ks = np.arange(density_m)
    energies = -range_l + 2.0 * range_l * ks / (density_m - 1)
    taus = range_l + 3.0 * range_l * ks / (density_m - 1)
    return [
        ControlPoint.from_values(e1, e2, e3, tau)
        for e1 in energies
        for e2 in energies
        for e3 in energies
        for tau in taus
    ]


def coordinate_descent(start: ControlPoint, config: SearchConfig) -> DescentResult:
    """Alternating {E_j} / tau gradient ascent from one seed.

    The returned trace is non-decreasing; ``converged`` is False when the
    round budget ran out before the objective change fell below
    ``conv_tol`` (the best point found is still returned).
    """
    e1, e2, e3, tau, value, rounds, converged, trace = _kernels.descend(
        start.energies.e1, start.energies.e2, start.energies.e3, start.tau,
        config.couplings.j12, config.couplings.j23,
        config.conv_tol, config.max_iterations, config.tau_penalty,
    )
    final = ControlPoint.from_values(e1, e2, e3, tau)
    return DescentResult(
        final=final,
        final_obj=point_objective(final, config.couplings),
        iterations=rounds,
        trace=trace,
        converged=converged,
    )


def _examine_start(args: tuple[ControlPoint, SearchConfig]) -> GateRecord | None:
    start, config = args
    result = coordinate_descent(start, config)
    if result.final_obj <= config.obj_threshold:
        return None
    n, alpha, beta = build_n(result.final, config.couplings)
    n_unitary, proj_dist = project_unitary(n)
    cls = canonical_angles(n_unitary)
    angle = is_zz_class(cls, config.angle_tol)
    if angle is None:
        return None
    return GateRecord(
        point=result.final,
        couplings=config.couplings,
        objective_value=result.final_obj,
        leakage=point_leakage(result.final, config.couplings),
        cls=cls,
        zz_angle=float(angle),
        alpha=alpha,
        beta=beta,
        n_entries=(n[1, 1], n[1, 2], n[2, 1], n[2, 2]),
        projection_distance=proj_dist,
        descent_iterations=result.iterations,
    )


def _record_sort_key(rec: GateRecord):
    p = rec.point
    return (rec.zz_angle, p.energies.e1, p.energies.e2, p.energies.e3, p.tau)


def run_search(config: SearchConfig, progress=None) -> list[GateRecord]:
    """Run descents from every grid seed and collect accepted gate records.

    The output is sorted by (zz_angle, E1, E2, E3, tau) and is independent
    of the worker count; with ``jitter == 0`` it is fully deterministic.
    """
    starts = grid_points(config.range_l, config.density_m)
    if config.jitter > 0:
        rng = np.random.default_rng(config.seed)
        offsets = rng.uniform(-config.jitter, config.jitter, size=(len(starts), 4))
        starts = [
            ControlPoint.from_values(
                s.energies.e1 + d[0], s.energies.e2 + d[1],
                s.energies.e3 + d[2], max(s.tau + d[3], 1e-9),
            )
            for s, d in zip(starts, offsets)
        ]
    tasks = [(s, config) for s in starts]
    workers = config.workers or os.cpu_count() or 1
    records: list[GateRecord] = []
    done = 0
    if workers == 1:
        for task in tasks:
            rec = _examine_start(task)
            if rec is not None:
                records.append(rec)
            done += 1
            if progress:
                progress(done, len(tasks), len(records))
    else:
        chunk = max(1, len(tasks) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for rec in pool.map(_examine_start, tasks, chunksize=chunk):
                if rec is not None:
                    records.append(rec)
                done += 1
                if progress:
                    progress(done, len(tasks), len(records))
    records.sort(key=_record_sort_key)
    return records


def coverage_stats(records: list[GateRecord], bins: int = 50,
                   distinct_tol: float = 1e-6) -> CoverageStats:
    """Gap statistics of the recorded ZZ angles over [0, pi/2].

    Gaps are computed over sorted distinct angles and include the
    distances to the interval endpoints; an empty database reports the
    full interval pi/2 for both gap figures.
    """
    edges = list(np.linspace(0.0, HALF_PI, bins + 1))
    angles = sorted(r.zz_angle for r in records)
    if not angles:
        return CoverageStats(0, HALF_PI, HALF_PI, [0] * bins, edges)
    distinct = [angles[0]]
    for a in angles[1:]:
        if a - distinct[-1] >= distinct_tol:
            distinct.append(a)
    gaps = np.diff([0.0] + distinct + [HALF_PI])
    hist, _ = np.histogram(angles, bins=bins, range=(0.0, HALF_PI))
    return CoverageStats(
        count=len(records),
        max_gap=float(gaps.max()),
        mean_gap=float(gaps.mean()),
        angle_histogram=[int(x) for x in hist],
        bin_edges=edges,
    )


@dataclass(frozen=True)
class VerifyReport:
    leakage: float
    class_error: float
    conjecture_distance: float


def verify_record(record: GateRecord, config: SearchConfig) -> VerifyReport:
    """Replay a record through the independent 8x8 oracle.

    Reports the recomputed leakage, the distance of the conditional
    block's canonical class from (0, 0, zz_angle), and the max-entry
    distance between the block and ``e^{i c ZZ}`` minimized over global
    phase and single-qubit Z phases.

    Raises:
        ValueError: if the record's couplings differ from the config's.
    """
    if record.couplings != config.couplings:
        raise ValueError(
            f"coupling mismatch: record has {record.couplings}, "
            f"config has {config.couplings}"
        )
    point = record.point
    block = conditional_block(point.energies, config.couplings, point.tau)
    leak = point_leakage(point, config.couplings)
    unitary_block, _ = project_unitary(block)
    cls = canonical_angles(unitary_block)
    class_error = cls.distance(CanonicalClass(0.0, 0.0, record.zz_angle))
    return VerifyReport(
        leakage=leak,
        class_error=class_error,
        conjecture_distance=zz_distance(block, record.zz_angle),
    )


def zz_distance(block: np.ndarray, c: float) -> float:
    """Distance of a 4x4 block from ``e^{i c ZZ}``, minimized over the
    global-phase and single-qubit Z-phase freedom."""
    target = gate_of_class(CanonicalClass(0.0, 0.0, c))

    def residual(params):
        phi, a, b = params
        sa = np.array([1, 1, -1, -1])
        sb = np.array([1, -1, 1, -1])
        phases = np.exp(1j * (phi + a * sa + b * sb))
        return max_entry_norm(phases[:, None] * block - target)

    # closed-form start from the diagonal phases, then local refinement
    diag = np.diagonal(block)
    d = diag * np.exp(-1j * c * np.array([1, -1, -1, 1]))
    safe = np.abs(d) > 1e-12
    a1 = np.angle(d[0]) if safe[0] else 0.0
    a2 = np.angle(d[1]) if safe[1] else 0.0
    a3 = np.angle(d[2]) if safe[2] else 0.0
    b0 = (a2 - a1) / 2
    a0 = (a3 - a1) / 2
    phi0 = -a1 - a0 - b0
    from scipy.optimize import minimize

    best = min(
        (
            minimize(residual, x0, method="Nelder-Mead",
                     options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000})
            for x0 in ([phi0, a0, b0], [phi0 + np.pi, a0, b0])
        ),
        key=lambda r: r.fun,
    )
    return float(best.fun)


# ---------------------------------------------------------------------------
# database and stats files


def config_header(config: SearchConfig) -> dict:
    return {
        "kind": "chainsynth-db",
        "version": __version__,
        "j12": config.couplings.j12,
        "j23": config.couplings.j23,
        "range_l": config.range_l,
        "density_m": config.density_m,
        "conv_tol": config.conv_tol,
        "obj_threshold": config.obj_threshold,
        "angle_tol": config.angle_tol,
        "max_iterations": config.max_iterations,
        "jitter": config.jitter,
        "seed": config.seed,
        "tau_penalty": config.tau_penalty,
    }


def write_database(path, records: list[GateRecord], config: SearchConfig) -> None:
    """JSON-Lines database: one header line, then one record per line."""
    with open(path, "w") as fh:
        fh.write(json.dumps(config_header(config), sort_keys=True) + "\n")
        for rec in records:
            fh.write(json.dumps(rec.to_json_dict(), sort_keys=True) + "\n")


def read_database(path) -> tuple[list[GateRecord], SearchConfig]:
    """Read a database file back into records plus the producing config."""
    with open(path) as fh:
        lines = [line for line in fh if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty database file")
    header = json.loads(lines[0])
    if header.get("kind") != "chainsynth-db":
        raise ValueError(f"{path}: not a chainsynth database")
    config = SearchConfig(
        couplings=CouplingPair(header["j12"], header["j23"]),
        range_l=header["range_l"],
        density_m=header["density_m"],
        conv_tol=header["conv_tol"],
        obj_threshold=header["obj_threshold"],
        angle_tol=header["angle_tol"],
        max_iterations=header["max_iterations"],
        jitter=header["jitter"],
        seed=header["seed"],
        tau_penalty=header.get("tau_penalty", 0.0),
    )
    records = [GateRecord.from_json_dict(json.loads(line)) for line in lines[1:]]
    return records, config


def write_stats_csv(path, stats: CoverageStats) -> None:
    """Coverage CSV: summary line plus histogram rows."""
    with open(path, "w") as fh:
        fh.write("count,max_gap,mean_gap\n")
        fh.write(f"{stats.count},{stats.max_gap!r},{stats.mean_gap!r}\n")
        fh.write("bin_start,bin_end,count\n")
        for lo, hi, n in zip(stats.bin_edges[:-1], stats.bin_edges[1:],
                             stats.angle_histogram):
            fh.write(f"{lo!r},{hi!r},{n}\n")
