"""Dense gate-database generation in the deeply pinned regime.

With the middle qubit pinned by a large on-site energy (|E2| much larger
than the couplings), leakage is suppressed to O(J/E2) at every time, and
the conditional ZZ angle accumulates slowly through the virtual exchange
between the work qubits.  Sweeping tau therefore passes through every ZZ
angle, and near each target angle a short scan plus a damped least-squares
polish of the decoupling conditions lands on an exact decoupled point.

This complements the grid-seeded descent search: the search explores the
control space the hardware would use, while this sweep fills a database
densely for synthesis at a fraction of the cost.  The trade-off is long
relaxation times (tau grows like E2^2 / J^2 per radian of angle).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import least_squares, minimize_scalar

from chainsynth.canonical import (
    DEFAULT_ZZ_TOL,
    canonical_angles,
    is_zz_class,
    project_unitary,
)
from chainsynth.hamiltonian import (
    ControlPoint,
    CouplingPair,
    OnSiteEnergies,
    build_n,
    build_u,
    build_v,
    leakage as point_leakage,
    objective as point_objective,
)
from chainsynth.search import GateRecord, _record_sort_key

HALF_PI = math.pi / 2

DEFAULT_PIN = -200.0
DEFAULT_WORK = (1.3, -0.7)


def _propagator(energies: OnSiteEnergies, couplings: CouplingPair,
                tau: float, builder) -> np.ndarray:
    m = builder(energies, couplings).real
    w, q = np.linalg.eigh(m)
    return (q * np.exp(-1j * w * tau)) @ q.T


def _angle_estimate(x: np.ndarray, couplings: CouplingPair) -> float:
    """ZZ angle of the conditional gate from its diagonal phases.

    Exact for decoupled points with a diagonal middle block; used as a
    cheap tracker during the sweep (the recorded angle always comes from
    the full classifier).
    """
    energies = OnSiteEnergies(x[0], x[1], x[2])
    eu = _propagator(energies, couplings, x[3], build_u)
    ev = _propagator(energies, couplings, x[3], build_v)
    alpha_phase = -(x[0] + x[1] + x[2] + couplings.j12 + couplings.j23) * x[3]
    c = (alpha_phase - np.angle(eu[0, 0]) - np.angle(eu[2, 2])
         + np.angle(ev[1, 1])) / 4
    return float(c % HALF_PI)


def _decoupling_residuals(x: np.ndarray, couplings: CouplingPair) -> np.ndarray:
    """The eight real residuals whose zeros are exactly decoupled points:
    real and imaginary parts of the off-middle column entries of both
    subspace propagators."""
    if x[3] <= 0:
        return np.full(8, 1e3)
    energies = OnSiteEnergies(x[0], x[1], x[2])
    eu = _propagator(energies, couplings, x[3], build_u)
    ev = _propagator(energies, couplings, x[3], build_v)
    return np.array([
        eu[0, 1].real, eu[0, 1].imag, eu[2, 1].real, eu[2, 1].imag,
        ev[0, 1].real, ev[0, 1].imag, ev[2, 1].real, ev[2, 1].imag,
    ])


def polish_decoupling(point: ControlPoint, couplings: CouplingPair,
                      max_nfev: int = 2000) -> ControlPoint:
    """Refine a near-decoupled control point to the nearby exact zero of
    the decoupling residuals (Levenberg-Marquardt)."""
    x0 = np.array([point.energies.e1, point.energies.e2, point.energies.e3,
                   point.tau])
    fit = least_squares(_decoupling_residuals, x0, args=(couplings,),
                        method="lm", xtol=1e-15, ftol=1e-15,
                        max_nfev=max_nfev)
    return ControlPoint.from_values(*fit.x)


def _drift_rate(e1: float, e2: float, e3: float, tau: float,
                couplings: CouplingPair, span: float = 40.0) -> float:
    """Local d(angle)/d(tau), measured over a tau span."""
    a = _angle_estimate(np.array([e1, e2, e3, tau]), couplings)
    b = _angle_estimate(np.array([e1, e2, e3, tau + span]), couplings)
    d = (b - a + HALF_PI / 2) % HALF_PI - HALF_PI / 2
    return d / span


def _candidate_peaks(e1: float, e2: float, e3: float, tau_center: float,
                     couplings: CouplingPair, half_width: float,
                     step: float = 0.01, limit: int = 8) -> list[float]:
    """Local maxima of the decoupling objective near tau_center, refined
    to full precision and ordered best first."""
    taus = np.arange(tau_center - half_width, tau_center + half_width, step)
    taus = taus[taus > 0]
    if taus.size < 3:
        return []
    objs = np.array([point_objective(
        ControlPoint.from_values(e1, e2, e3, t), couplings) for t in taus])
    peak_idx = [
        i for i in range(1, len(objs) - 1)
        if objs[i] >= objs[i - 1] and objs[i] >= objs[i + 1]
    ]
    peak_idx.sort(key=lambda i: -objs[i])
    peaks = []
    for i in peak_idx[:limit]:
        refine = minimize_scalar(
            lambda t: -point_objective(
                ControlPoint.from_values(e1, e2, e3, t), couplings),
            bounds=(taus[i] - step, taus[i] + step), method="bounded",
            options={"xatol": 1e-12},
        )
        peaks.append(float(refine.x))
    return peaks


def _make_record(point: ControlPoint, couplings: CouplingPair,
                 obj_threshold: float, angle_tol: float) -> GateRecord | None:
    obj = point_objective(point, couplings)
    if obj <= obj_threshold:
        return None
    n, alpha, beta = build_n(point, couplings)
    n_unitary, proj_dist = project_unitary(n)
    cls = canonical_angles(n_unitary)
    angle = is_zz_class(cls, angle_tol)
    if angle is None:
        return None
    return GateRecord(
        point=point,
        couplings=couplings,
        objective_value=obj,
        leakage=point_leakage(point, couplings),
        cls=cls,
        zz_angle=float(angle),
        alpha=alpha,
        beta=beta,
        n_entries=(n[1, 1], n[1, 2], n[2, 1], n[2, 2]),
        projection_distance=proj_dist,
        descent_iterations=0,
    )


def pinned_database(couplings: CouplingPair, bins: int = 120,
                    pin: float = DEFAULT_PIN,
                    work: tuple[float, float] = DEFAULT_WORK,
                    tau_start: float = 60.0,
                    obj_threshold: float = 1.99995,
                    angle_tol: float = DEFAULT_ZZ_TOL,
                    calibration_step: float = 2.0) -> list[GateRecord]:
    """Sweep tau in the pinned regime and return a densely covering
    database of ZZ gate records, sorted like ``run_search`` output.

    ``bins`` sets the angle resolution: the sweep aims one record at the
    center of each of ``bins`` equal angle bins over [0, pi/2).  With the
    defaults the result covers the interval with gaps well under 0.01 pi.
    The function is deterministic.
    """
    e1, e3 = work
    rate = _drift_rate(e1, pin, e3, tau_start, couplings)
    if rate == 0:
        raise ValueError("angle does not drift; pinning energy degenerate")
    # calibration curve: unwrapped 4c(tau) sampled finely over one full
    # half-pi of drift, inverted below to aim each bin
    tau_end = tau_start + 1.2 * HALF_PI / abs(rate)
    taus = np.arange(tau_start, tau_end, calibration_step)
    cs = np.array([
        _angle_estimate(np.array([e1, pin, e3, t]), couplings) for t in taus
    ])
    unwrapped = np.unwrap(4.0 * cs) / 4.0

    centers = (np.arange(bins) + 0.5) * HALF_PI / bins
    best: dict[int, GateRecord] = {}

    def attempt(tau_center, want):
        hit = False
        for tau_peak in _candidate_peaks(e1, pin, e3, tau_center, couplings,
                                         half_width=1.5 * calibration_step):
            point = polish_decoupling(
                ControlPoint.from_values(e1, pin, e3, tau_peak), couplings)
            rec = _make_record(point, couplings, obj_threshold, angle_tol)
            if rec is None:
                continue
            k = int(rec.zz_angle / (HALF_PI / bins))
            if k >= bins:
                k = bins - 1
            kept = best.get(k)
            center = centers[k]
            if kept is None or abs(rec.zz_angle - center) < abs(kept.zz_angle - center):
                best[k] = rec
            if k == want:
                hit = True
                break
        return hit

    for k in range(bins):
        # every calibration-curve crossing of this bin center is a
        # candidate tau; try them until the bin is filled
        sign = 1.0 if unwrapped[-1] >= unwrapped[0] else -1.0
        delta0 = (sign * (centers[k] - unwrapped[0])) % HALF_PI
        laps = np.arange(0, 1 + int(abs(unwrapped[-1] - unwrapped[0]) / HALF_PI))
        target_set = unwrapped[0] + sign * (delta0 + HALF_PI * laps)
        for target in target_set:
            lo, hi = sorted((unwrapped[0], unwrapped[-1]))
            if not lo <= target <= hi:
                continue
            idx = int(np.argmin(np.abs(unwrapped - target)))
            if attempt(float(taus[idx]), k):
                break
    records = sorted(best.values(), key=_record_sort_key)
    return records
