import numpy as np
import pytest

from chainsynth.hamiltonian import (
    ControlPoint,
    CouplingPair,
    OnSiteEnergies,
    build_full_h,
    build_n,
    build_u,
    build_v,
    conditional_block,
    leakage,
    objective,
)
from chainsynth.numerics import expm_i_hermitian, hermiticity_defect, max_entry_norm

COUPLINGS = CouplingPair(1.0, 0.9)

# Computational-basis indices of the single- and double-excitation
# subspaces, in block basis order.
U_IDX = [0b001, 0b010, 0b100]
V_IDX = [0b110, 0b101, 0b011]


def test_coupling_pair_rejects_zero():
    with pytest.raises(ValueError):
        CouplingPair(0.0, 1.0)
    with pytest.raises(ValueError):
        CouplingPair(1.0, 0.0)


def test_energies_must_be_finite():
    with pytest.raises(ValueError):
        OnSiteEnergies(1.0, np.inf, 0.0)


def test_build_u_reference_values():
    u = build_u(OnSiteEnergies(1.0, 2.0, 3.0), COUPLINGS)
    expected = np.array([
        [0.1, 1.8, 0.0],
        [1.8, 0.1, 2.0],
        [0.0, 2.0, 3.9],
    ])
    assert np.allclose(u, expected, atol=1e-12)


def test_build_v_reference_values():
    v = build_v(OnSiteEnergies(1.0, 2.0, 3.0), COUPLINGS)
    assert np.allclose(np.diag(v), [0.1, -3.9, -4.1], atol=1e-12)
    assert v[0, 1] == pytest.approx(1.8)
    assert v[1, 2] == pytest.approx(2.0)


def test_blocks_are_symmetric():
    rng = np.random.default_rng(11)
    for _ in range(5):
        e = OnSiteEnergies(*rng.uniform(-5, 5, size=3))
        for block in (build_u(e, COUPLINGS), build_v(e, COUPLINGS)):
            assert np.allclose(block, block.T)


def test_full_h_is_hermitian():
    h = build_full_h(OnSiteEnergies(1.0, -2.0, 0.5), COUPLINGS)
    assert hermiticity_defect(h) < 1e-14


def test_full_h_contains_u_and_v_blocks():
    rng = np.random.default_rng(13)
    for _ in range(5):
        e = OnSiteEnergies(*rng.uniform(-5, 5, size=3))
        h = build_full_h(e, COUPLINGS)
        assert np.allclose(h[np.ix_(U_IDX, U_IDX)], build_u(e, COUPLINGS))
        assert np.allclose(h[np.ix_(V_IDX, V_IDX)], build_v(e, COUPLINGS))
        # H never mixes excitation sectors.
        other = [i for i in range(8) if i not in U_IDX]
        assert max_entry_norm(h[np.ix_(U_IDX, other)]) == 0.0


def test_objective_matches_full_propagator():
    rng = np.random.default_rng(17)
    for _ in range(10):
        point = ControlPoint.from_values(*rng.uniform(-5, 5, size=3),
                                         rng.uniform(5, 20))
        prop = expm_i_hermitian(build_full_h(point.energies, COUPLINGS),
                                point.tau)
        expected = abs(prop[0b010, 0b010]) ** 2 + abs(prop[0b101, 0b101]) ** 2
        assert objective(point, COUPLINGS) == pytest.approx(expected, abs=1e-12)


def test_objective_bounds_and_tau_zero():
    point = ControlPoint.from_values(1.0, 2.0, 3.0, 0.0)
    assert objective(point, COUPLINGS) == pytest.approx(2.0)
    assert leakage(point, COUPLINGS) == pytest.approx(0.0)
    rng = np.random.default_rng(19)
    for _ in range(10):
        p = ControlPoint.from_values(*rng.uniform(-5, 5, size=3),
                                     rng.uniform(5, 20))
        assert 0.0 <= objective(p, COUPLINGS) <= 2.0


def test_build_n_matches_conditional_block():
    rng = np.random.default_rng(23)
    for _ in range(10):
        point = ControlPoint.from_values(*rng.uniform(-5, 5, size=3),
                                         rng.uniform(5, 20))
        n, alpha, beta = build_n(point, COUPLINGS)
        block = conditional_block(point.energies, COUPLINGS, point.tau)
        assert max_entry_norm(n - block) < 1e-12
        assert n[0, 0] == alpha
        assert n[3, 3] == beta
        assert abs(alpha) == pytest.approx(1.0)


def test_leakage_vanishes_iff_objective_is_two():
    # Middle-row/column amplitudes and the objective defect measure the
    # same failure: leakage^2 bounds 2 - objective from above.
    rng = np.random.default_rng(29)
    for _ in range(10):
        p = ControlPoint.from_values(*rng.uniform(-5, 5, size=3),
                                     rng.uniform(5, 20))
        defect = 2.0 - objective(p, COUPLINGS)
        assert defect <= 4 * leakage(p, COUPLINGS) ** 2 + 1e-12
