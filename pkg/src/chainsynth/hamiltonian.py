"""Chain Hamiltonian, its invariant-subspace blocks, and the decoupling objective.

The three active qubits evolve under

    H = sum_j E_j sigma^Z_j + J12 s1.s2 + J23 s2.s3

with the sign convention ``sigma^Z |0> = +|0>`` and computational basis
ordered ``|q1 q2 q3>``.  H never mixes the four subspaces {|000>},
{|001>,|010>,|100>}, {|110>,|101>,|011>}, {|111>}; the two 3x3 blocks on
the single- and double-excitation subspaces are called U and V.  When the
middle qubit decouples after time tau, the conditional (q2 = |0>) action
on the work qubits (q1, q3) is the 4x4 gate N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from chainsynth.numerics import expm_i_hermitian, hermitian_eig

# Index of |010> within the U basis {|001>, |010>, |100>} and of |101>
# within the V basis {|110>, |101>, |011>}.
_MID = 1


@dataclass(frozen=True)
class CouplingPair:
    """Fixed chain couplings (J12, J23).  Both must be nonzero."""

    j12: float
    j23: float

    def __post_init__(self):
        if self.j12 == 0.0 or self.j23 == 0.0:
            raise ValueError("couplings must be nonzero")


@dataclass(frozen=True)
class OnSiteEnergies:
    e1: float
    e2: float
    e3: float

    def __post_init__(self):
        if not all(np.isfinite([self.e1, self.e2, self.e3])):
            raise ValueError("on-site energies must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.e1, self.e2, self.e3])


@dataclass(frozen=True)
class ControlPoint:
    """A candidate (E1, E2, E3, tau) in the four-dimensional search space."""

    energies: OnSiteEnergies
    tau: float

    @classmethod
    def from_values(cls, e1, e2, e3, tau) -> "ControlPoint":
        return cls(OnSiteEnergies(float(e1), float(e2), float(e3)), float(tau))


def build_u(energies: OnSiteEnergies, couplings: CouplingPair) -> np.ndarray:
    """3x3 block of H on the basis {|001>, |010>, |100>} (real symmetric)."""
    e1, e2, e3 = energies.e1, energies.e2, energies.e3
    j12, j23 = couplings.j12, couplings.j23
    a1 = e1 + e2 - e3 + j12 - j23
    a2 = e1 - e2 + e3 - j12 - j23
    a3 = -e1 + e2 + e3 - j12 + j23
    return np.array(
        [
            [a1, 2 * j23, 0.0],
            [2 * j23, a2, 2 * j12],
            [0.0, 2 * j12, a3],
        ]
    )


def build_v(energies: OnSiteEnergies, couplings: CouplingPair) -> np.ndarray:
    """3x3 block of H on the basis {|110>, |101>, |011>}.

    Entrywise this equals ``build_u`` with all on-site energies negated.
    """
    e1, e2, e3 = energies.e1, energies.e2, energies.e3
    return build_u(OnSiteEnergies(-e1, -e2, -e3), couplings)


_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


def _site_op(op: np.ndarray, site: int) -> np.ndarray:
    ops = [_I2, _I2, _I2]
    ops[site] = op
    return np.kron(np.kron(ops[0], ops[1]), ops[2])


def _dot_coupling(site_a: int, site_b: int) -> np.ndarray:
    total = np.zeros((8, 8), dtype=complex)
    for pauli in (_SX, _SY, _SZ):
        total += _site_op(pauli, site_a) @ _site_op(pauli, site_b)
    return total


def build_full_h(energies: OnSiteEnergies, couplings: CouplingPair) -> np.ndarray:
    """Full 8x8 chain Hamiltonian; the independent oracle for U, V, and N."""
    h = np.zeros((8, 8), dtype=complex)
    for site, e in enumerate((energies.e1, energies.e2, energies.e3)):
        h += e * _site_op(_SZ, site)
    h += couplings.j12 * _dot_coupling(0, 1)
    h += couplings.j23 * _dot_coupling(1, 2)
    return h


# Computational-basis indices |q1 q2 q3> for the conditional (q2 = 0) block,
# ordered by the work-qubit basis |q1 q3> in {|00>, |01>, |10>, |11>}.
_COND_IDX = np.array([0b000, 0b001, 0b100, 0b101])


def conditional_block(energies: OnSiteEnergies, couplings: CouplingPair,
                      tau: float) -> np.ndarray:
    """Entries <a 0 b| exp(-i H tau) |c 0 d> of the full propagator.

    A valid two-qubit gate exactly when the decoupling constraint holds;
    callers check unitarity.
    """
    prop = expm_i_hermitian(build_full_h(energies, couplings), tau)
    return prop[np.ix_(_COND_IDX, _COND_IDX)]


def build_n(point: ControlPoint, couplings: CouplingPair
            ) -> tuple[np.ndarray, complex, complex]:
    """Assemble the conditional two-qubit gate N from the 3x3 blocks.

    Returns ``(N, alpha, beta)``.  The |00> corner alpha is computed from
    the <000|H|000> diagonal of the full Hamiltonian, which carries +E3 in
    the exponent; N is returned regardless of decoupling quality.
    """
    energies = point.energies
    tau = point.tau
    eu = expm_i_hermitian(build_u(energies, couplings), tau)
    ev = expm_i_hermitian(build_v(energies, couplings), tau)
    e000 = (energies.e1 + energies.e2 + energies.e3
            + couplings.j12 + couplings.j23)
    alpha = complex(np.exp(-1j * e000 * tau))
    beta = complex(ev[_MID, _MID])
    n = np.zeros((4, 4), dtype=complex)
    n[0, 0] = alpha
    n[1, 1] = eu[0, 0]
    n[1, 2] = eu[0, 2]
    n[2, 1] = eu[2, 0]
    n[2, 2] = eu[2, 2]
    n[3, 3] = beta
    return n, alpha, beta


def _mid_entry(block: np.ndarray, tau: float) -> complex:
    w, q = hermitian_eig(block)
    weights = np.abs(q[_MID, :]) ** 2
    return complex(np.sum(weights * np.exp(-1j * w * tau)))


def objective(point: ControlPoint, couplings: CouplingPair) -> float:
    """Decoupling objective |[e^{-iU tau}]_22|^2 + |[e^{-iV tau}]_22|^2 in [0, 2]."""
    energies = point.energies
    mu = _mid_entry(build_u(energies, couplings), point.tau)
    mv = _mid_entry(build_v(energies, couplings), point.tau)
    return float(abs(mu) ** 2 + abs(mv) ** 2)


def leakage(point: ControlPoint, couplings: CouplingPair) -> float:
    """Worst residual amplitude connecting the middle qubit to the rest.

    Max modulus over the eight row/column-2 entries (excluding (2,2)) of
    the two 3x3 propagators; zero exactly when the objective equals 2.
    """
    energies = point.energies
    tau = point.tau
    worst = 0.0
    for block in (build_u(energies, couplings), build_v(energies, couplings)):
        prop = expm_i_hermitian(block, tau)
        for i, j in ((0, 1), (1, 0), (1, 2), (2, 1)):
            worst = max(worst, abs(prop[i, j]))
    return worst
