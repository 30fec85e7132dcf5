# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the descent kernels (LAPACK dsyev on the 3x3 blocks).

Keep the algorithm in sync with ``_pure.py``.
"""

from libc.math cimport cos, sin

import numpy as np

from scipy.linalg.cython_lapack cimport dsyev

DEF FD_STEP = 1e-6
DEF ARMIJO = 1e-4
DEF MIN_STEP = 1e-14
DEF INNER_CAP = 200
DEF INNER_TOL_FACTOR = 1e-4


cdef double _mid_term(double a1, double a2, double a3,
                      double off12, double off23, double tau) noexcept nogil:
    cdef double a[9]
    cdef double w[3]
    cdef double work[64]
    cdef int n = 3, lda = 3, lwork = 64, info = 0
    cdef char jobz = b'V', uplo = b'U'
    cdef int k
    cdef double wt, re = 0.0, im = 0.0
    # column-major symmetric storage
    a[0] = a1; a[4] = a2; a[8] = a3
    a[1] = off12; a[3] = off12
    a[5] = off23; a[7] = off23
    a[2] = 0.0; a[6] = 0.0
    dsyev(&jobz, &uplo, &n, a, &lda, w, work, &lwork, &info)
    if info != 0:
        return -1.0
    for k in range(3):
        # middle component of eigenvector k (Fortran column k)
        wt = a[3 * k + 1] * a[3 * k + 1]
        re += wt * cos(w[k] * tau)
        im += wt * sin(w[k] * tau)
    return re * re + im * im


cdef double _obj(double e1, double e2, double e3, double tau,
                 double j12, double j23) noexcept nogil:
    cdef double u = _mid_term(
        e1 + e2 - e3 + j12 - j23,
        e1 - e2 + e3 - j12 - j23,
        -e1 + e2 + e3 - j12 + j23,
        2.0 * j23, 2.0 * j12, tau)
    cdef double v = _mid_term(
        -e1 - e2 + e3 + j12 - j23,
        -e1 + e2 - e3 - j12 - j23,
        e1 - e2 - e3 - j12 + j23,
        2.0 * j23, 2.0 * j12, tau)
    return u + v


def objective_value(double e1, double e2, double e3, double tau,
                    double j12, double j23):
    """Decoupling objective of a control point, in [0, 2]."""
    return _obj(e1, e2, e3, tau, j12, j23)


def descend(double e1, double e2, double e3, double tau,
            double j12, double j23, double conv_tol, int max_rounds,
            double tau_penalty=0.0):
    """Alternating coordinate gradient ascent; see ``_pure.descend``."""
    cdef double[::1] trace = np.empty(max_rounds + 1)
    cdef double cur, prev, block_prev
    cdef double g1, g2, g3, gn2, gt, t, cand, new_tau
    cdef double p1, p2, p3, og1, og2, og3, ogn2, beta, slope
    cdef double step_e = 1.0, step_t = 1.0
    cdef double inner_tol = conv_tol * INNER_TOL_FACTOR
    cdef int rounds = 0, inner
    cdef bint converged = False

    with nogil:
        cur = _obj(e1, e2, e3, tau, j12, j23) - tau_penalty * tau
        trace[0] = cur
        while rounds < max_rounds:
            prev = cur
            # {E_j} block, tau fixed: conjugate-gradient ascent
            # (Polak-Ribiere, restart on non-ascent directions)
            p1 = p2 = p3 = 0.0
            og1 = og2 = og3 = 0.0
            ogn2 = 0.0
            for inner in range(INNER_CAP):
                block_prev = cur
                g1 = (_obj(e1 + FD_STEP, e2, e3, tau, j12, j23)
                      - _obj(e1 - FD_STEP, e2, e3, tau, j12, j23)) / (2.0 * FD_STEP)
                g2 = (_obj(e1, e2 + FD_STEP, e3, tau, j12, j23)
                      - _obj(e1, e2 - FD_STEP, e3, tau, j12, j23)) / (2.0 * FD_STEP)
                g3 = (_obj(e1, e2, e3 + FD_STEP, tau, j12, j23)
                      - _obj(e1, e2, e3 - FD_STEP, tau, j12, j23)) / (2.0 * FD_STEP)
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
                        p1 = g1; p2 = g2; p3 = g3
                        slope = gn2
                    t = step_e * 2.0
                    while t > MIN_STEP:
                        cand = (_obj(e1 + t * p1, e2 + t * p2, e3 + t * p3,
                                     tau, j12, j23) - tau_penalty * tau)
                        if cand >= cur + ARMIJO * t * slope:
                            e1 += t * p1
                            e2 += t * p2
                            e3 += t * p3
                            cur = cand
                            step_e = t
                            break
                        t *= 0.5
                    og1 = g1; og2 = g2; og3 = g3
                    ogn2 = gn2
                if cur - block_prev < inner_tol:
                    break
            # tau block, {E_j} fixed; steps crossing tau <= 0 are rejected
            for inner in range(INNER_CAP):
                block_prev = cur
                gt = ((_obj(e1, e2, e3, tau + FD_STEP, j12, j23)
                       - tau_penalty * (tau + FD_STEP))
                      - (_obj(e1, e2, e3, tau - FD_STEP, j12, j23)
                         - tau_penalty * (tau - FD_STEP))) / (2.0 * FD_STEP)
                if gt != 0.0:
                    t = step_t * 2.0
                    while t > MIN_STEP:
                        new_tau = tau + t * gt
                        if new_tau > 0.0:
                            cand = (_obj(e1, e2, e3, new_tau, j12, j23)
                                    - tau_penalty * new_tau)
                            if cand >= cur + ARMIJO * t * gt * gt:
                                tau = new_tau
                                cur = cand
                                step_t = t
                                break
                        t *= 0.5
                if cur - block_prev < inner_tol:
                    break
            rounds += 1
            trace[rounds] = cur
            if cur - prev < conv_tol:
                converged = True
                break

    return (e1, e2, e3, tau, cur, rounds, converged,
            np.asarray(trace[:rounds + 1]).copy())
