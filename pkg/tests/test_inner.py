import numpy as np
import pytest

import distvar as dv
from distvar.errors import NotPureRealization, NotUnitaryColligation
from conftest import random_unitary, w2z_poly


def test_constant_unitary_colligation():
    u = np.array([[0, 1], [1j, 0]], dtype=complex)
    psi = dv.from_colligation(np.zeros((0, 0)), None, None, u)
    assert np.allclose(dv.eval_psi(psi, 0.7j), u)


def test_scalar_shift_colligation():
    psi = dv.from_colligation([[0.0]], [[1.0]], [[1.0]], [[0.0]])
    for z in (0.0, 0.3, -0.9j):
        assert dv.eval_psi(psi, z)[0, 0] == pytest.approx(z)


def test_random_unitary_split_boundary_defect():
    rng = np.random.default_rng(7)
    u = random_unitary(rng, 4)
    psi = dv.from_colligation(u[:2, :2], u[:2, 2:], u[2:, :2], u[2:, 2:])
    assert dv.boundary_unitarity_defect(psi, 256) < 1e-10


def test_colligation_rejects_non_unitary():
    with pytest.raises(NotUnitaryColligation):
        dv.from_colligation([[0.5]], [[1.0]], [[1.0]], [[0.0]])


def test_colligation_rejects_non_pure_state():
    with pytest.raises(NotPureRealization):
        dv.from_colligation([[1.0]], [[0.0]], [[0.0]], [[1.0]])


def test_eval_psi_companion(companion_psi_2):
    assert np.allclose(
        dv.eval_psi(companion_psi_2, 0.0), np.array([[0, 0], [1, 0]])
    )
    v = dv.eval_psi(companion_psi_2, 1j)
    assert np.linalg.norm(v.conj().T @ v - np.eye(2), 2) < 1e-12


def test_eval_psi_scalar_identity():
    psi = dv.from_scalar_blaschke_identity(dv.BlaschkeProduct([(0.0, 1)]), 1)
    # factor convention (a - z)/(1 - conj(a) z): zero at the origin gives -z
    assert dv.eval_psi(psi, 0.3)[0, 0] == pytest.approx(-0.3)


def test_jet_scalar_shift(scalar_shift_psi):
    jet = dv.eval_psi_jet(scalar_shift_psi, 0.37 - 0.11j, 1)
    assert jet[0][0, 0] == pytest.approx(0.37 - 0.11j)
    assert jet[1][0, 0] == pytest.approx(1.0)


def test_jet_companion_linear(companion_psi_2):
    jet = dv.eval_psi_jet(companion_psi_2, 0.0, 1)
    assert np.allclose(jet[0], [[0, 0], [1, 0]])
    assert np.allclose(jet[1], [[0, 1], [0, 0]])


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_jet_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    u = random_unitary(rng, 5)
    psi = dv.from_colligation(u[:2, :2], u[:2, 2:], u[2:, :2], u[2:, 2:])
    lam = 0.31 - 0.22j
    jet = dv.eval_psi_jet(psi, lam, 2)
    f = lambda z: dv.eval_psi(psi, z)
    h = 1e-5
    fd1 = (f(lam + h) - f(lam - h)) / (2 * h)
    assert np.linalg.norm(jet[1] - fd1, 2) < 1e-9
    # 5-point stencil keeps the oracle's own roundoff below the tolerance
    h = 1e-3
    fd2 = (
        -f(lam + 2 * h) + 16 * f(lam + h) - 30 * f(lam)
        + 16 * f(lam - h) - f(lam - 2 * h)
    ) / (12 * h ** 2)
    assert np.linalg.norm(jet[2] - fd2, 2) < 1e-7


def test_bp_product_jet_matches_finite_differences():
    eye = np.eye(2)
    proj = np.array([[1.0, 0.0], [0.0, 0.0]])
    u = np.array([[0.6, 0.8], [-0.8, 0.6]])
    psi = dv.from_bp_factors([
        dv.BPFactor(0.2 + 0.1j, proj, u),
        dv.BPFactor(-0.3, eye, np.diag([1j, 1.0])),
    ])
    lam = -0.15 + 0.4j
    h = 1e-5
    jet = dv.eval_psi_jet(psi, lam, 1)
    f = lambda z: dv.eval_psi(psi, z)
    fd1 = (f(lam + h) - f(lam - h)) / (2 * h)
    assert np.linalg.norm(jet[1] - fd1, 2) < 1e-9
    assert np.allclose(jet[0], f(lam))


# ---------------------------------------------------------------------------
# variety polynomial


def test_variety_scalar_shift(scalar_shift_psi):
    v = dv.variety_polynomial(scalar_shift_psi)
    target = dv.Poly2([[0.0, 1.0], [-1.0, 0.0]])  # w - z
    assert dv.unit_distance(v.p, target) < 1e-12


def test_variety_companion(companion_psi_2):
    v = dv.variety_polynomial(companion_psi_2)
    assert dv.unit_distance(v.p, w2z_poly()) < 1e-12
    assert v.degw == 2


def test_variety_scalar_square():
    psi = dv.from_scalar_blaschke_identity(dv.BlaschkeProduct([(0.0, 2)]), 1)
    v = dv.variety_polynomial(psi)
    target = dv.Poly2([[0.0, 1.0], [0.0, 0.0], [-1.0, 0.0]])  # w - z^2
    assert dv.unit_distance(v.p, target) < 1e-12


def test_variety_colligation_consistency():
    rng = np.random.default_rng(11)
    u = random_unitary(rng, 5)
    psi = dv.from_colligation(u[:3, :3], u[:3, 3:], u[3:, :3], u[3:, 3:])
    v = dv.variety_polynomial(psi)
    worst = 0.0
    for _ in range(1000):
        z = rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        for w in dv.fiber(psi, z):
            worst = max(worst, abs(v.p(z, w)))
    assert worst < 1e-8 * v.p.scale


def test_fiber_values(companion_psi_2):
    got = dv.fiber(companion_psi_2, 0.25)
    assert np.allclose(got, [-0.5, 0.5], atol=1e-12)
    assert np.allclose(dv.fiber(companion_psi_2, 0.0), [0.0, 0.0], atol=1e-12)
    psi = dv.from_polynomial(np.array([np.zeros((2, 2)), np.eye(2)]))
    assert np.allclose(dv.fiber(psi, 0.3), [0.3, 0.3])


def test_fiber_continuity():
    rng = np.random.default_rng(5)
    u = random_unitary(rng, 4)
    psi = dv.from_colligation(u[:2, :2], u[:2, 2:], u[2:, :2], u[2:, 2:])
    for _ in range(100):
        z = 0.98 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        a = dv.fiber(psi, z)
        b = dv.fiber(psi, z + 1e-6)
        assert dv.matching_distance(a, b) < 1e-3


# ---------------------------------------------------------------------------
# certificates and invariants


def test_distinguished_scalar_and_companion(scalar_shift_psi, companion_psi_2):
    assert dv.distinguished_certificate(scalar_shift_psi, 128, 128).passed
    assert dv.distinguished_certificate(companion_psi_2, 128, 128).passed


def test_distinguished_fails_for_constant_unitary():
    psi = dv.from_colligation(np.zeros((0, 0)), None, None, [[1.0]])
    entry = dv.distinguished_certificate(psi, 128, 128)
    assert entry.status == "fail"
    assert not entry.data["conditions"]["meets_open_bidisc"]


def test_boundary_unitarity_invariant_2048(companion_psi_2, scalar_shift_psi):
    for psi in (companion_psi_2, scalar_shift_psi):
        assert dv.boundary_unitarity_defect(psi, 2048) < 1e-8


def test_interior_pureness_invariant():
    rng = np.random.default_rng(3)
    u = random_unitary(rng, 4)
    psi = dv.from_colligation(u[:2, :2], u[:2, 2:], u[2:, :2], u[2:, 2:])
    worst = 0.0
    for _ in range(1000):
        lam = rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        worst = max(worst, max(abs(v) for v in dv.fiber(psi, lam)))
    assert worst < 1.0


def test_taylor_at_zero_matches_eval(companion_psi_2):
    rng = np.random.default_rng(2)
    u = random_unitary(rng, 4)
    psis = [companion_psi_2,
            dv.from_colligation(u[:2, :2], u[:2, 2:], u[2:, :2], u[2:, 2:]),
            dv.from_scalar_blaschke_identity(dv.BlaschkeProduct([(0.3, 1)]), 2)]
    for psi in psis:
        coeffs = dv.taylor_at_zero(psi, 40)
        z = 0.41 - 0.17j
        acc = sum(coeffs[k] * z ** k for k in range(coeffs.shape[0]))
        assert np.linalg.norm(acc - dv.eval_psi(psi, z), 2) < 1e-12
