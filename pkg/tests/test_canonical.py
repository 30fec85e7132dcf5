import numpy as np
import pytest
import scipy.linalg
import scipy.stats

from chainsynth.canonical import (
    CanonicalClass,
    NotUnitaryError,
    canonical_angles,
    gate_of_class,
    is_zz_class,
    local_rotation,
    makhlin_invariants,
    project_unitary,
    unitarity_defect,
)

HALF_PI = np.pi / 2

CNOT = np.array([
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
], dtype=complex)

_ZZ = np.diag([1.0, -1.0, -1.0, 1.0])


def _zz_gate(c):
    return np.diag(np.exp(1j * c * np.diag(_ZZ)))


def _random_local(rng):
    u = scipy.stats.unitary_group.rvs(2, random_state=rng)
    v = scipy.stats.unitary_group.rvs(2, random_state=rng)
    return np.kron(u, v)


def test_identity_class():
    cls = canonical_angles(np.eye(4, dtype=complex))
    assert cls.as_array() == pytest.approx([0.0, 0.0, 0.0], abs=1e-12)


def test_cnot_class():
    cls = canonical_angles(CNOT)
    assert abs(cls.c1) <= 1e-9
    assert abs(cls.c2) <= 1e-9
    assert cls.c3 == pytest.approx(np.pi / 4, abs=1e-9)


def test_zz_gate_grid():
    for c in np.linspace(0.0, HALF_PI, 100, endpoint=False):
        cls = canonical_angles(_zz_gate(c))
        assert max(abs(cls.c1), abs(cls.c2)) <= 1e-8
        assert cls.c3 == pytest.approx(c, abs=1e-8)


def test_conjugation_invariance():
    rng = np.random.default_rng(31)
    g = _zz_gate(0.3)
    base = canonical_angles(g)
    for _ in range(20):
        s = _random_local(rng)
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
        cls = canonical_angles(phase * s @ g @ s.conj().T)
        assert cls.distance(base) <= 1e-8


def test_gate_of_class_round_trip():
    rng = np.random.default_rng(37)
    for _ in range(20):
        target = CanonicalClass(*rng.uniform(0.05, HALF_PI - 0.05, size=3))
        cls = canonical_angles(gate_of_class(target))
        assert cls.distance(target) <= 1e-8


def test_distance_is_a_class_distance():
    # Axis permutations and pair sign flips name the same class.
    a = CanonicalClass(0.3, 0.0, 0.0)
    assert a.distance(CanonicalClass(0.0, 0.0, 0.3)) == pytest.approx(0.0)
    assert a.distance(CanonicalClass(0.0, 0.3, 0.0)) == pytest.approx(0.0)
    assert a.distance(CanonicalClass(HALF_PI - 0.3, 0.0, 0.0)) \
        == pytest.approx(0.0, abs=1e-12)
    assert a.distance(CanonicalClass(0.0, 0.0, 0.4)) == pytest.approx(0.1)


def test_makhlin_invariants_separate_classes():
    rng = np.random.default_rng(41)
    g = gate_of_class(CanonicalClass(0.3, 0.2, 0.1))
    g1, g2 = makhlin_invariants(g)
    # invariant under local multiplication on either side
    s, t = _random_local(rng), _random_local(rng)
    h1, h2 = makhlin_invariants(s @ g @ t)
    assert h1 == pytest.approx(g1, abs=1e-10)
    assert h2 == pytest.approx(g2, abs=1e-10)
    # and different for a different class
    k1, k2 = makhlin_invariants(gate_of_class(CanonicalClass(0.4, 0.2, 0.1)))
    assert abs(k1 - g1) + abs(k2 - g2) > 1e-3


def test_is_zz_class():
    assert is_zz_class(CanonicalClass(0.0, 0.0, 0.3)) == pytest.approx(0.3)
    assert is_zz_class(CanonicalClass(1e-4, HALF_PI - 1e-4, 0.3)) \
        == pytest.approx(0.3)
    assert is_zz_class(CanonicalClass(0.1, 0.0, 0.3)) is None
    with pytest.raises(ValueError):
        is_zz_class(CanonicalClass(0.0, 0.0, 0.3), tol=0.0)


def test_local_rotation_conjugates_onto_zz():
    xx = np.kron([[0, 1], [1, 0]], [[0, 1], [1, 0]]).astype(complex)
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
    for axis, generator in (("X", xx), ("Y", yy)):
        r = local_rotation(axis)
        g = scipy.linalg.expm(1j * 0.3 * generator)
        assert np.allclose(r @ g @ r.conj().T, _zz_gate(0.3), atol=1e-12)
    with pytest.raises(ValueError):
        local_rotation("Z")


def test_non_unitary_rejected():
    with pytest.raises(NotUnitaryError):
        canonical_angles(np.eye(4) * 1.5)
    with pytest.raises(NotUnitaryError):
        makhlin_invariants(np.zeros((4, 4)))


def test_project_unitary():
    rng = np.random.default_rng(43)
    g = scipy.stats.unitary_group.rvs(4, random_state=rng)
    noisy = g + 1e-6 * rng.normal(size=(4, 4))
    u, dist = project_unitary(noisy)
    assert unitarity_defect(u) < 1e-12
    assert 0 < dist < 1e-5
