"""Dense complex linear algebra for the small Hermitian matrices of the chain.

Everything here operates on plain ``numpy.ndarray`` values of shape
(n, n) with n <= 8.  Matrix exponentials go through an eigendecomposition:
all propagators in this project are ``exp(-i M t)`` with Hermitian ``M``,
so the eigenvector route is exactly unitary up to roundoff and one
eigensystem can be reused across many ``t`` values.
"""

from __future__ import annotations

import numpy as np

HERMITICITY_TOL = 1e-12


class NotHermitianError(ValueError):
    """Raised when a matrix that must be Hermitian is not."""


def hermiticity_defect(m: np.ndarray) -> float:
    """Max entry norm of ``M - M^dagger``."""
    return float(np.abs(m - m.conj().T).max())


def hermitian_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as columns, so ``m = Q diag(w) Q^dagger``.

    Raises:
        NotHermitianError: if the input fails the Hermiticity check; the
            message names the maximal asymmetry.
    """
    m = np.asarray(m, dtype=complex)
    defect = hermiticity_defect(m)
    if defect > HERMITICITY_TOL:
        raise NotHermitianError(
            f"matrix is not Hermitian: max |M_ij - conj(M_ji)| = {defect:.3e} "
            f"exceeds {HERMITICITY_TOL:.0e}"
        )
    w, q = np.linalg.eigh(m)
    return w, q


def expm_i_hermitian(m: np.ndarray, t: float) -> np.ndarray:
    """Unitary propagator ``exp(-i M t)`` for Hermitian ``M``."""
    w, q = hermitian_eig(m)
    phases = np.exp(-1j * w * t)
    return (q * phases) @ q.conj().T


def max_entry_norm(m: np.ndarray) -> float:
    """Largest modulus over the entries of ``M``."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.abs(m).max())
