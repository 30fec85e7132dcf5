"""Pure-numpy backend for the descent kernels.

Algorithmically identical to the Cython backend (``_fast.pyx``): keep the
two in sync.  The descent alternates a full inner descent over the {E_j}
block (tau fixed) with one over tau ({E_j} fixed), using central finite
differences and an expand-then-halve Armijo line search, until the
objective gain over a full round drops below the convergence tolerance.
"""

from __future__ import annotations

import numpy as np

FD_STEP = 1e-6
ARMIJO = 1e-4
MIN_STEP = 1e-14
INNER_CAP = 200
INNER_TOL_FACTOR = 1e-4


def _mid_term(a1, a2, a3, off12, off23, tau):
    """|[e^{-iM tau}]_22|^2 for the symmetric tridiagonal M."""
    m = np.array(
        [
            [a1, off12, 0.0],
            [off12, a2, off23],
            [0.0, off23, a3],
        ]
    )
    w, q = np.linalg.eigh(m)
    weights = q[1, :] ** 2
    re = float(np.sum(weights * np.cos(w * tau)))
    im = float(np.sum(weights * np.sin(w * tau)))
    return re * re + im * im


def objective_value(e1, e2, e3, tau, j12, j23):
    """Decoupling objective of a control point, in [0, 2]."""
    u = _mid_term(
        e1 + e2 - e3 + j12 - j23,
        e1 - e2 + e3 - j12 - j23,
        -e1 + e2 + e3 - j12 + j23,
        2 * j23, 2 * j12, tau,
    )
    v = _mid_term(
        -e1 - e2 + e3 + j12 - j23,
        -e1 + e2 - e3 - j12 - j23,
        e1 - e2 - e3 - j12 + j23,
        2 * j23, 2 * j12, tau,
    )
    return u + v


def descend(e1, e2, e3, tau, j12, j23, conv_tol, max_rounds, tau_penalty=0.0):
    """Alternating coordinate gradient ascent on the decoupling objective.

    Returns ``(e1, e2, e3, tau, value, rounds, converged, trace)`` where
    ``value`` is the final descent objective (including any -tau penalty)
    and ``trace`` holds the objective after the start and after each
    round; the trace is non-decreasing by construction.
    """

    def f(a, b, c, t):
        return objective_value(a, b, c, t, j12, j23) - tau_penalty * t

    cur = f(e1, e2, e3, tau)
    inner_tol = conv_tol * INNER_TOL_FACTOR
    trace = [cur]
    step_e = 1.0
    step_t = 1.0
    converged = False
    rounds = 0
    for _ in range(max_rounds):
        prev = cur
        # {E_j} block, tau fixed: conjugate-gradient ascent (Polak-Ribiere
        # with restart on non-ascent directions) until the block gain stalls
        p1 = p2 = p3 = 0.0
        og1 = og2 = og3 = 0.0
        ogn2 = 0.0
        for _inner in range(INNER_CAP):
            block_prev = cur
            g1 = (f(e1 + FD_STEP, e2, e3, tau) - f(e1 - FD_STEP, e2, e3, tau)) / (2 * FD_STEP)
            g2 = (f(e1, e2 + FD_STEP, e3, tau) - f(e1, e2 - FD_STEP, e3, tau)) / (2 * FD_STEP)
            g3 = (f(e1, e2, e3 + FD_STEP, tau) - f(e1, e2, e3 - FD_STEP, tau)) / (2 * FD_STEP)
            gn2 = g1 * g1 + g2 * g2 + g3 * g3
            if gn2 > 0.0:
                beta = 0.0
                if ogn2 > 0.0:
                    beta = (gn2 - (g1 * og1 + g2 * og2 + g3 * og3)) / ogn2
                    if beta < 0.0:
                        beta = 0.0
                p1 = g1 + beta * p1
                p2 = g2 + beta * p2
                p3 = g3 + beta * p3
                slope = g1 * p1 + g2 * p2 + g3 * p3
                if slope <= 0.0:
                    p1, p2, p3 = g1, g2, g3
                    slope = gn2
                t = step_e * 2.0
                while t > MIN_STEP:
                    cand = f(e1 + t * p1, e2 + t * p2, e3 + t * p3, tau)
                    if cand >= cur + ARMIJO * t * slope:
                        e1, e2, e3 = e1 + t * p1, e2 + t * p2, e3 + t * p3
                        cur = cand
                        step_e = t
                        break
                    t *= 0.5
                og1, og2, og3 = g1, g2, g3
                ogn2 = gn2
            if cur - block_prev < inner_tol:
                break
        # tau block, {E_j} fixed; steps crossing tau <= 0 are rejected
        for _inner in range(INNER_CAP):
            block_prev = cur
            gt = (f(e1, e2, e3, tau + FD_STEP) - f(e1, e2, e3, tau - FD_STEP)) / (2 * FD_STEP)
            if gt != 0.0:
                t = step_t * 2.0
                while t > MIN_STEP:
                    new_tau = tau + t * gt
                    if new_tau > 0.0:
                        cand = f(e1, e2, e3, new_tau)
                        if cand >= cur + ARMIJO * t * gt * gt:
                            tau = new_tau
                            cur = cand
                            step_t = t
                            break
                    t *= 0.5
            if cur - block_prev < inner_tol:
                break
        rounds += 1
        trace.append(cur)
        if cur - prev < conv_tol:
            converged = True
            break
    return e1, e2, e3, tau, cur, rounds, converged, np.array(trace)
