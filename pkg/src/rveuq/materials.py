"""Constituent materials and 6x6 Voigt stiffness algebra.

Voigt component order is (11, 22, 33, 23, 13, 12) everywhere, with
engineering shear strains (gamma = 2*eps) in all 6-vectors.
"""

from dataclasses import dataclass

import numpy as np

VOIGT_ORDER = ("11", "22", "33", "23", "13", "12")

# Scaling between engineering-Voigt and Kelvin (Mandel) matrices.
_KELVIN = np.diag([1.0, 1.0, 1.0, np.sqrt(2.0), np.sqrt(2.0), np.sqrt(2.0)])


@dataclass(frozen=True)
class TransverseIsotropicMaterial:
    """Engineering constants of a transversely isotropic solid.

    Axis 1 is the fiber (symmetry) axis; axes 2 and 3 span the isotropic
    transverse plane. The missing transverse Poisson ratio is derived as
    nu23 = E2 / (2*G23) - 1 so that the five constants determine the
    material completely.
    """

    E1: float
    E2: float
    nu12: float
    G12: float
    G23: float

    def __post_init__(self):
        for name in ("E1", "E2", "G12", "G23"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"modulus {name} must be strictly positive")

    @property
    def nu23(self) -> float:
        return self.E2 / (2.0 * self.G23) - 1.0


def isotropic(E: float, nu: float) -> TransverseIsotropicMaterial:
    """Isotropic special case, G = E / (2*(1 + nu))."""
    G = E / (2.0 * (1.0 + nu))
    return TransverseIsotropicMaterial(E1=E, E2=E, nu12=nu, G12=G, G23=G)


def compliance_from_engineering(mat: TransverseIsotropicMaterial) -> np.ndarray:
    """6x6 engineering-Voigt compliance of a transversely isotropic solid."""
    E1, E2, nu12, G12, G23 = mat.E1, mat.E2, mat.nu12, mat.G12, mat.G23
    nu23 = mat.nu23
    S = np.zeros((6, 6))
    S[0, 0] = 1.0 / E1
    S[1, 1] = S[2, 2] = 1.0 / E2
    S[0, 1] = S[1, 0] = S[0, 2] = S[2, 0] = -nu12 / E1
    S[1, 2] = S[2, 1] = -nu23 / E2
    S[3, 3] = 1.0 / G23
    S[4, 4] = S[5, 5] = 1.0 / G12
    return S


def stiffness_from_engineering(mat: TransverseIsotropicMaterial) -> np.ndarray:
    """Invert the compliance built from the engineering constants.

    Raises ValueError if the resulting stiffness is not symmetric positive
    definite, which signals a thermodynamically inadmissible constant set.
    """
    C = np.linalg.inv(compliance_from_engineering(mat))
    C = 0.5 * (C + C.T)
    if np.linalg.eigvalsh(C).min() <= 0.0:
        raise ValueError("engineering constants yield a non-positive-definite stiffness")
    return C


def engineering_from_stiffness(C: np.ndarray) -> TransverseIsotropicMaterial:
    """Recover engineering constants from a transversely isotropic stiffness."""
    S = np.linalg.inv(C)
    E1 = 1.0 / S[0, 0]
    E2 = 1.0 / S[1, 1]
    nu12 = -S[0, 1] * E1
    G12 = 1.0 / S[4, 4]
    G23 = 1.0 / S[3, 3]
    return TransverseIsotropicMaterial(E1=E1, E2=E2, nu12=nu12, G12=G12, G23=G23)


def _rotation_about_axis3(angle_deg: float) -> np.ndarray:
    t = np.deg2rad(angle_deg)
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _bond_stress_matrix(a: np.ndarray) -> np.ndarray:
    """6x6 Bond transformation for Voigt stress vectors, sigma' = M sigma."""
    return np.array([
        [a[0, 0] ** 2, a[0, 1] ** 2, a[0, 2] ** 2,
         2 * a[0, 1] * a[0, 2], 2 * a[0, 0] * a[0, 2], 2 * a[0, 0] * a[0, 1]],
        [a[1, 0] ** 2, a[1, 1] ** 2, a[1, 2] ** 2,
         2 * a[1, 1] * a[1, 2], 2 * a[1, 0] * a[1, 2], 2 * a[1, 0] * a[1, 1]],
        [a[2, 0] ** 2, a[2, 1] ** 2, a[2, 2] ** 2,
         2 * a[2, 1] * a[2, 2], 2 * a[2, 0] * a[2, 2], 2 * a[2, 0] * a[2, 1]],
        [a[1, 0] * a[2, 0], a[1, 1] * a[2, 1], a[1, 2] * a[2, 2],
         a[1, 1] * a[2, 2] + a[1, 2] * a[2, 1],
         a[1, 0] * a[2, 2] + a[1, 2] * a[2, 0],
         a[1, 0] * a[2, 1] + a[1, 1] * a[2, 0]],
        [a[0, 0] * a[2, 0], a[0, 1] * a[2, 1], a[0, 2] * a[2, 2],
         a[0, 1] * a[2, 2] + a[0, 2] * a[2, 1],
         a[0, 0] * a[2, 2] + a[0, 2] * a[2, 0],
         a[0, 0] * a[2, 1] + a[0, 1] * a[2, 0]],
        [a[0, 0] * a[1, 0], a[0, 1] * a[1, 1], a[0, 2] * a[1, 2],
         a[0, 1] * a[1, 2] + a[0, 2] * a[1, 1],
         a[0, 0] * a[1, 2] + a[0, 2] * a[1, 0],
         a[0, 0] * a[1, 1] + a[0, 1] * a[1, 0]],
    ])


def rotate_stiffness(C: np.ndarray, angle_deg: float) -> np.ndarray:
    """Rotate a Voigt stiffness by angle_deg about the ply-stacking axis (axis 3).

    Returns M(theta) C M(theta)^T with the Bond operator M, which equals an
    orthogonal conjugation in the Kelvin representation. The tensor
    invariants (Kelvin eigenvalues) are preserved exactly; the eigenvalues
    of the engineering-Voigt matrix itself are not rotation invariants.
    """
    M = _bond_stress_matrix(_rotation_about_axis3(angle_deg))
    Cr = M @ C @ M.T
    return 0.5 * (Cr + Cr.T)


def kelvin_matrix(C: np.ndarray) -> np.ndarray:
    """Kelvin (Mandel) form of an engineering-Voigt stiffness."""
    return _KELVIN @ C @ _KELVIN


def is_spd(C: np.ndarray, tol: float = 0.0) -> bool:
    return bool(np.linalg.eigvalsh(0.5 * (C + C.T)).min() > tol)
