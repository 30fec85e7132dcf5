"""Canonical (classifying) angles of two-qubit gates.

A two-qubit gate factors as ``Q = S_l A S_r`` with local unitaries S_l,
S_r and

    A = exp(i c1 XX) exp(i c2 YY) exp(i c3 ZZ).

The triple (c1, c2, c3) is computed with the magic-basis method: transform
the gate to the magic basis, form ``m = G^T G`` there, and read the angles
off the arguments of the eigenvalues of ``m``.

Reporting convention
--------------------
Each angle is reported in [0, pi/2).  The (0, 0, c) and (0, 0, pi/2 - c)
readings of a ZZ-type gate have identical magic-basis spectra (the two
gates differ by a global phase times local unitaries), so the spectrum
alone cannot separate them.  The branch is fixed deterministically:

1. If the gate's own eigenvalue spectrum matches the spectrum of
   ``A(c1, c2, c3)`` up to a rigid rotation (true for any gate reachable
   from an A-form gate by conjugation and global phase), the matching
   reading is used.
2. Otherwise, if the gate is diagonal up to small leakage and some
   ZZ-like reading fits ``exp(i phi) (P_a x P_b) exp(i c ZZ)`` with
   single-qubit Z phases P, that reading is used.  This is the case for
   the decoupled chain gates, and it spreads their recorded angles over
   the whole of [0, pi/2) instead of folding at pi/4.
3. Otherwise the lexicographically smallest reading is used.

All three rules are functions of conjugation-invariant data, so the
reported class is invariant under global phase and under conjugation by
local unitaries.  Two-sided local equivalence additionally folds c with
pi/2 - c; that coarser relation is deliberately not applied.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from chainsynth.numerics import max_entry_norm

HALF_PI = np.pi / 2
UNITARITY_TOL = 1e-8
DEFAULT_ZZ_TOL = 0.0025 * np.pi

# Magic (Bell-like) basis, columns ordered so that XX, YY, ZZ are all
# diagonal with eigenvalue patterns (+,-,+,-), (-,+,+,-), (+,+,-,-).
MAGIC = np.array(
    [
        [1, 0, 0, 1j],
        [0, 1j, 1, 0],
        [0, 1j, -1, 0],
        [1, 0, 0, -1j],
    ],
    dtype=complex,
) / np.sqrt(2)

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)

_XX = np.kron(_SX, _SX)
_YY = np.kron(_SY, _SY)
_ZZ = np.kron(_SZ, _SZ)


class NotUnitaryError(ValueError):
    """Raised when a gate fails its unitarity precondition."""


@dataclass(frozen=True)
class CanonicalClass:
    """Classifying angles aligned with the (XX, YY, ZZ) axes, each in [0, pi/2)."""

    c1: float
    c2: float
    c3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3])

    def distance(self, other: "CanonicalClass") -> float:
        """Distance between the classes the two triples represent.

        Local Clifford conjugation relabels the (XX, YY, ZZ) axes, so any
        permutation of a triple, combined with a sign flip on a pair of
        coordinates, names the same class.  The distance is the max
        per-axis gap, wrapped on the pi/2 torus and minimized over that
        symmetry group.
        """
        a = self.as_array()
        b = other.as_array()
        flips = ((1, 1, 1), (-1, -1, 1), (-1, 1, -1), (1, -1, -1))
        best = np.inf
        for perm in permutations(range(3)):
            for f in flips:
                diff = np.abs(a - b[list(perm)] * f) % HALF_PI
                cost = float(np.max(np.minimum(diff, HALF_PI - diff)))
                if cost < best:
                    best = cost
        return best


def unitarity_defect(g: np.ndarray) -> float:
    g = np.asarray(g, dtype=complex)
    return max_entry_norm(g.conj().T @ g - np.eye(g.shape[0]))


def _require_unitary(g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=complex)
    defect = unitarity_defect(g)
    if defect > UNITARITY_TOL:
        raise NotUnitaryError(
            f"gate is not unitary: max |G^dag G - I| = {defect:.3e}"
        )
    return g


def project_unitary(g: np.ndarray) -> tuple[np.ndarray, float]:
    """Polar projection onto the nearest unitary.

    Returns the projected gate and the max-entry distance moved.
    """
    g = np.asarray(g, dtype=complex)
    w, _, vh = np.linalg.svd(g)
    u = w @ vh
    return u, max_entry_norm(g - u)


def gate_of_class(cls: CanonicalClass) -> np.ndarray:
    """The canonical representative A = e^{i c1 XX} e^{i c2 YY} e^{i c3 ZZ}."""
    # The three generators commute; exponentiate in the Bell eigenbasis.
    # Phases ordered to match the (XX, YY, ZZ) eigenvalue patterns of the
    # MAGIC columns: (+,-,+), (+,+,-), (-,-,-), (-,+,+).
    c1, c2, c3 = cls.c1, cls.c2, cls.c3
    mu = np.array([c1 - c2 + c3, c1 + c2 - c3, -c1 - c2 - c3, -c1 + c2 + c3])
    return MAGIC @ np.diag(np.exp(1j * mu)) @ MAGIC.conj().T


def _mu_of(c1: float, c2: float, c3: float) -> np.ndarray:
    """Bell-basis phases of A for the (+,-,+,-)/(-,+,+,-)/(+,+,-,-) patterns."""
    return np.array(
        [
            c1 - c2 + c3,
            -c1 + c2 + c3,
            c1 + c2 - c3,
            -c1 - c2 - c3,
        ]
    )


def _wrap_angle(x: np.ndarray) -> np.ndarray:
    """Wrap to (-pi, pi]."""
    return np.pi - (np.pi - np.asarray(x)) % (2 * np.pi)


def _spectrum_mismatch(args_a: np.ndarray, args_b: np.ndarray) -> float:
    """Distance between two phase multisets, minimized over rigid rotation.

    Both inputs are arrays of 4 angles.  Rotations aligning each pair of
    elements are tried; for each, the multisets are matched greedily after
    circular sorting.
    """
    a = np.sort(_wrap_angle(args_a))
    best = np.inf
    for anchor_a in args_a:
        for anchor_b in args_b:
            shifted = np.sort(_wrap_angle(args_b + (anchor_a - anchor_b)))
            # try the 4 cyclic pairings of two circularly sorted lists
            for roll in range(4):
                diff = _wrap_angle(a - np.roll(shifted, roll))
                cost = np.max(np.abs(diff))
                if cost < best:
                    best = cost
    return float(best)


def _candidate_triples(theta: np.ndarray) -> list[tuple[float, float, float]]:
    """All [0, pi/2)^3 readings consistent with magic-basis eigenphases."""
    out = set()
    flips = ((1, 1, 1), (-1, -1, 1), (-1, 1, -1), (1, -1, -1))
    for branch in (0.0, np.pi):
        mu = (theta + branch) / 2.0
        for perm in permutations(range(4)):
            m1, m2, m3 = mu[perm[0]], mu[perm[1]], mu[perm[2]]
            c = np.array([(m1 + m3) / 2, (m2 + m3) / 2, (m1 + m2) / 2])
            for f in flips:
                reduced = (c * f) % HALF_PI
                # snap to the cell boundary so pi/2 - eps and eps pair up
                reduced[reduced > HALF_PI - 1e-9] = 0.0
                reduced[np.abs(reduced) < 1e-9] = 0.0
                out.add(tuple(np.round(reduced, 9)))
    return sorted(out)


def _zz_phase_fit(g: np.ndarray, c: float) -> float:
    """Residual of fitting G ~ e^{i phi} (P_a x P_b) e^{i c ZZ} entrywise."""
    diag = np.diagonal(g)
    if np.any(np.abs(diag) < 0.5):
        return np.inf
    d = diag * np.exp(-1j * c * np.array([1, -1, -1, 1]))
    a1, a2, a3 = np.angle(d[0]), np.angle(d[1]), np.angle(d[2])
    b = (a1 - a2) / 2
    a = (a1 - a3) / 2
    phi = a1 - a - b
    signs_a = np.array([1, 1, -1, -1])
    signs_b = np.array([1, -1, 1, -1])
    model = np.diag(
        np.exp(1j * (phi + a * signs_a + b * signs_b + c * np.array([1, -1, -1, 1])))
    )
    return max_entry_norm(g - model)


def canonical_angles(g: np.ndarray) -> CanonicalClass:
    """Classifying angles of a 4x4 unitary, each reported in [0, pi/2).

    Raises:
        NotUnitaryError: if the input is not unitary to 1e-8.
    """
    g = _require_unitary(g)
    gb = MAGIC.conj().T @ g @ MAGIC
    det = np.linalg.det(gb)
    gb = gb / det ** 0.25
    m = gb.T @ gb
    theta = np.angle(np.linalg.eigvals(m))
    candidates = _candidate_triples(theta)

    gate_args = np.angle(np.linalg.eigvals(g))

    # rule 1: exact spectrum match (conjugation + global phase family)
    matches = []
    for cand in candidates:
        mismatch = _spectrum_mismatch(gate_args, _mu_of(*cand))
        if mismatch < 1e-6:
            matches.append(cand)
    if matches:
        return CanonicalClass(*min(matches))

    # rule 2: diagonal gate dressed with single-qubit Z phases
    zz_like = [
        cand for cand in candidates
        if max(min(cand[0], HALF_PI - cand[0]), min(cand[1], HALF_PI - cand[1])) < 0.05
    ]
    if zz_like:
        fits = [(_zz_phase_fit(g, cand[2]), cand) for cand in zz_like]
        best_fit, best_cand = min(fits, key=lambda t: (t[0], t[1]))
        if best_fit < 0.15:
            return CanonicalClass(*best_cand)

    # rule 3: deterministic fallback
    return CanonicalClass(*candidates[0])


def makhlin_invariants(g: np.ndarray) -> tuple[complex, float]:
    """Local invariants (g1, g2) of a two-qubit gate.

    Computed from ``m = G_B^T G_B`` in the magic basis:
    ``g1 = tr(m)^2 / (16 det G)`` and
    ``g2 = (tr(m)^2 - tr(m^2)) / (4 det G)``.
    Locally equivalent gates share both invariants.
    """
    g = _require_unitary(g)
    gb = MAGIC.conj().T @ g @ MAGIC
    m = gb.T @ gb
    det = np.linalg.det(g)
    tr = np.trace(m)
    g1 = tr ** 2 / (16 * det)
    g2 = (tr ** 2 - np.trace(m @ m)) / (4 * det)
    return complex(g1), float(np.real(g2))


def is_zz_class(cls: CanonicalClass, tol: float = DEFAULT_ZZ_TOL) -> float | None:
    """Return the ZZ angle c3 when the class is (0, 0, c) within ``tol``.

    Angles are compared on the pi/2 torus, so a coordinate just below pi/2
    counts as zero.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    worst = max(
        min(cls.c1, HALF_PI - cls.c1),
        min(cls.c2, HALF_PI - cls.c2),
    )
    if worst <= tol:
        return cls.c3
    return None


def local_rotation(axis: str) -> np.ndarray:
    """Work-qubit rotation conjugating ``e^{i c axis.axis}`` into ``e^{i c ZZ}``.

    ``local_rotation("X") @ XX(c) @ local_rotation("X")^dag == ZZ(c)`` and
    likewise for Y.  The X-factor conjugator is generated by sigma^Y and
    the Y-factor one by sigma^X (a rotation about an axis fixes it, so it
    cannot map its own two-qubit product onto ZZ).
    """
    r = local_rotation_factor(axis)
    return np.kron(r, r)


def local_rotation_factor(axis: str) -> np.ndarray:
    """The 2x2 factor r of the conjugator R = r (x) r."""
    axis = axis.upper()
    if axis == "X":
        return _one_qubit_rotation(_SY)
    if axis == "Y":
        return _one_qubit_rotation(_SX)
    raise ValueError(f"axis must be 'X' or 'Y', got {axis!r}")


def _one_qubit_rotation(pauli: np.ndarray) -> np.ndarray:
    return np.cos(np.pi / 4) * np.eye(2) + 1j * np.sin(np.pi / 4) * pauli
