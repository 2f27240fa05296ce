import numpy as np
import pytest

from rveuq.materials import TransverseIsotropicMaterial


@pytest.fixture(scope="session")
def fiber_material():
    return TransverseIsotropicMaterial(E1=31.0, E2=7.59, nu12=0.3, G12=3.52, G23=2.69)


@pytest.fixture(scope="session")
def matrix_material():
    return TransverseIsotropicMaterial(E1=2.79, E2=2.76, nu12=0.3, G12=1.1, G23=1.1)


def lame_constants(E, nu):
    mu = E / (2.0 * (1.0 + nu))
    lam = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))
    return lam, mu


def backus_laminate(E_bottom, E_top, nu, fraction=0.5):
    """Closed-form stiffness of a two-phase isotropic laminate layered along axis 3.

    Independent oracle: volume averages of the layer moduli following the
    classical layered-medium solution, written without any call into the
    package under test.
    """
    lam = np.array([lame_constants(E_bottom, nu)[0], lame_constants(E_top, nu)[0]])
    mu = np.array([lame_constants(E_bottom, nu)[1], lame_constants(E_top, nu)[1]])
    f = np.array([fraction, 1.0 - fraction])

    def avg(x):
        return float((f * x).sum())

    P = lam + 2.0 * mu
    C33 = 1.0 / avg(1.0 / P)
    C13 = avg(lam / P) * C33
    C11 = avg(4.0 * mu * (lam + mu) / P) + avg(lam / P) ** 2 * C33
    C12 = avg(2.0 * mu * lam / P) + avg(lam / P) ** 2 * C33
    C44 = 1.0 / avg(1.0 / mu)
    C66 = avg(mu)

    D = np.zeros((6, 6))
    D[0, 0] = D[1, 1] = C11
    D[2, 2] = C33
    D[0, 1] = D[1, 0] = C12
    D[0, 2] = D[2, 0] = D[1, 2] = D[2, 1] = C13
    D[3, 3] = D[4, 4] = C44
    D[5, 5] = C66
    return D


def ishigami(X, a=7.0, b=0.1):
    X = np.asarray(X)
    return (np.sin(X[:, 0]) + a * np.sin(X[:, 1]) ** 2
            + b * X[:, 2] ** 4 * np.sin(X[:, 0]))


def ishigami_analytic(a=7.0, b=0.1):
    """Closed-form variance decomposition of the Ishigami function."""
    pi4, pi8 = np.pi ** 4, np.pi ** 8
    V1 = 0.5 * (1.0 + b * pi4 / 5.0) ** 2
    V2 = a ** 2 / 8.0
    V13 = b ** 2 * pi8 * 8.0 / 225.0
    V = V1 + V2 + V13
    return {"V": V, "S1": V1 / V, "S2": V2 / V, "S3": 0.0, "ST3": V13 / V}
