import numpy as np
import pytest

import distvar as dv

J2 = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)


@pytest.fixture
def companion_psi_2():
    """Psi(z) = [[0, z], [1, 0]]: the curve w^2 = z."""
    coeffs = np.zeros((2, 2, 2), dtype=complex)
    coeffs[0, 1, 0] = 1.0
    coeffs[1, 0, 1] = 1.0
    return dv.from_polynomial(coeffs)


@pytest.fixture
def scalar_shift_psi():
    """Psi(z) = [z]."""
    return dv.from_polynomial(np.array([[[0.0]], [[1.0]]], dtype=complex))


@pytest.fixture
def j2_pair():
    return dv.validate_pair(J2, J2, require_pure=True)


def w2z_poly():
    """The polynomial w^2 - z."""
    return dv.Poly2([[0.0, 0.0, 1.0], [-1.0, 0.0, 0.0]])


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
