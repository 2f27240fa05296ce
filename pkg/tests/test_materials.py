import numpy as np
import pytest

from rveuq.materials import (TransverseIsotropicMaterial, engineering_from_stiffness,
                             isotropic, kelvin_matrix, rotate_stiffness,
                             stiffness_from_engineering)
from tests.conftest import lame_constants

# 6x6 stiffness of the matrix constants (E1=2.79, E2=2.76, nu12=0.3,
# G12=G23=1.1), frozen from a symbolic compliance inversion with exact
# rationals (nu23 = 14/55).
MATRIX_STIFFNESS = np.array([
    [3.665588174488, 1.459313624147, 1.459313624147, 0.0, 0.0, 0.0],
    [1.459313624147, 3.532189373579, 1.332189373579, 0.0, 0.0, 0.0],
    [1.459313624147, 1.332189373579, 3.532189373579, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.1, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 1.1, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 1.1],
])


def test_isotropic_collapse_to_lame():
    E, nu = 5.0, 0.3
    C = stiffness_from_engineering(isotropic(E, nu))
    lam, mu = lame_constants(E, nu)
    expected = np.zeros((6, 6))
    expected[:3, :3] = lam
    expected[np.diag_indices(3)] = lam + 2 * mu
    expected[3, 3] = expected[4, 4] = expected[5, 5] = mu
    assert np.allclose(C, expected, rtol=1e-12, atol=1e-12)


def test_matrix_constants_against_frozen_inversion(matrix_material):
    C = stiffness_from_engineering(matrix_material)
    assert np.allclose(C, MATRIX_STIFFNESS, rtol=1e-10)
    assert abs(matrix_material.nu23 - 14.0 / 55.0) < 1e-15


def test_fiber_constants_positive_definite_and_ordered(fiber_material):
    C = stiffness_from_engineering(fiber_material)
    assert np.linalg.eigvalsh(C).min() > 0
    assert C[0, 0] > C[1, 1]
    # independent check: invert the compliance assembled here
    S = np.linalg.inv(C)
    assert S[0, 0] == pytest.approx(1.0 / 31.0, rel=1e-12)


def test_inadmissible_constants_raise():
    bad = TransverseIsotropicMaterial(E1=1.0, E2=1.0, nu12=0.75, G12=0.5, G23=0.5)
    with pytest.raises(ValueError, match="positive-definite"):
        stiffness_from_engineering(bad)
    with pytest.raises(ValueError, match="positive"):
        TransverseIsotropicMaterial(E1=-1.0, E2=1.0, nu12=0.3, G12=0.5, G23=0.5)


def test_engineering_round_trip_is_involution(fiber_material):
    C = stiffness_from_engineering(fiber_material)
    back = engineering_from_stiffness(C)
    for name in ("E1", "E2", "nu12", "G12", "G23"):
        assert getattr(back, name) == pytest.approx(getattr(fiber_material, name),
                                                    rel=1e-10)


def test_rotation_identity_and_half_turn(fiber_material):
    C = stiffness_from_engineering(fiber_material)
    assert np.allclose(rotate_stiffness(C, 0.0), C, rtol=1e-14, atol=1e-14)
    assert np.allclose(rotate_stiffness(C, 180.0), C, rtol=1e-12, atol=1e-12)


def test_rotation_inverse_composition(fiber_material):
    C = stiffness_from_engineering(fiber_material)
    back = rotate_stiffness(rotate_stiffness(C, 37.5), -37.5)
    assert np.abs(back - C).max() <= 1e-12 * np.abs(C).max()


def test_rotation_preserves_tensor_eigenvalues(fiber_material):
    # The rotation invariants are the Kelvin (Mandel) eigenvalues; the
    # engineering-Voigt matrix eigenvalues are not tensor invariants.
    C = stiffness_from_engineering(fiber_material)
    for angle in (15.0, 45.0, 75.0, -60.0):
        Cr = rotate_stiffness(C, angle)
        ev = np.sort(np.linalg.eigvalsh(kelvin_matrix(C)))
        evr = np.sort(np.linalg.eigvalsh(kelvin_matrix(Cr)))
        assert np.abs(ev - evr).max() <= 1e-10 * np.abs(ev).max()


def test_rotation_preserves_symmetry_and_definiteness(matrix_material):
    C = stiffness_from_engineering(matrix_material)
    for angle in np.linspace(-90, 90, 7):
        Cr = rotate_stiffness(C, angle)
        assert np.abs(Cr - Cr.T).max() <= 1e-12 * np.abs(Cr).max()
        assert np.linalg.eigvalsh(Cr).min() > 0
