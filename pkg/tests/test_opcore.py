import numpy as np
import pytest

import distvar as dv
from distvar.errors import NonCommuting, NotContractive, NotPure
from conftest import J2, random_unitary


def _random_commuting_pair(seed, n=6):
    """Commuting contractions as polynomials of one normal matrix."""
    rng = np.random.default_rng(seed)
    u = random_unitary(rng, n)
    lam = 0.8 * rng.uniform(0.1, 1.0, n) * np.exp(2j * np.pi * rng.uniform(size=n))
    base = u @ np.diag(lam) @ u.conj().T
    c1 = rng.normal(size=3) + 1j * rng.normal(size=3)
    c2 = rng.normal(size=3) + 1j * rng.normal(size=3)
    t1 = sum(c * np.linalg.matrix_power(base, k) for k, c in enumerate(c1))
    t2 = sum(c * np.linalg.matrix_power(base, k) for k, c in enumerate(c2))
    t1 = t1 / (np.linalg.norm(t1, 2) * 1.05)
    t2 = t2 / (np.linalg.norm(t2, 2) * 1.05)
    return dv.validate_pair(t1, t2, require_pure=True)


# ---------------------------------------------------------------------------
# validation and defects


def test_validate_pair_j2(j2_pair):
    assert j2_pair.commutator_norm == 0.0
    assert j2_pair.norms == (1.0, 1.0)
    assert j2_pair.purity_margins == (1.0, 1.0)
    assert j2_pair.defect_ranks == (1, 1)


def test_validate_pair_diagonal():
    pair = dv.validate_pair(np.diag([0.1, 0.2]), np.diag([0.3, 0.4]),
                            require_pure=True)
    assert pair.purity_margins[0] == pytest.approx(0.8)
    assert pair.purity_margins[1] == pytest.approx(0.6)


def test_validate_pair_noncommuting():
    with pytest.raises(NonCommuting):
        dv.validate_pair([[0, 1], [0, 0]], [[0, 0], [1, 0]])


def test_validate_pair_not_contractive():
    with pytest.raises(NotContractive):
        dv.validate_pair(2 * np.eye(2), np.eye(2))


def test_validate_pair_not_pure():
    with pytest.raises(NotPure):
        dv.validate_pair(np.eye(2), 0.5 * np.eye(2), require_pure=True)


def test_defect_examples():
    droot, rank, basis = dv.defect(J2)
    assert np.allclose(droot, np.diag([1.0, 0.0]))
    assert rank == 1
    assert basis.shape == (2, 1)

    droot, rank, _ = dv.defect(np.zeros((3, 3)))
    assert rank == 3
    assert np.allclose(droot, np.eye(3))

    droot, rank, _ = dv.defect(np.eye(2)[[1, 0]].astype(complex))
    assert rank == 0
    assert np.linalg.norm(droot, 2) < 1e-12


# ---------------------------------------------------------------------------
# functional calculus


def test_poly_apply_difference_vanishes(j2_pair):
    p = dv.Poly2([[0.0, -1.0], [1.0, 0.0]])  # z - w
    assert np.linalg.norm(dv.poly_apply(p, j2_pair), 2) < 1e-15


def test_poly_apply_product_diagonal():
    pair = dv.validate_pair(np.diag([0.1, 0.2]), np.diag([0.3, 0.4]))
    got = dv.poly_apply(dv.Poly2([[0, 0], [0, 1]]), pair)  # zw
    assert np.allclose(got, np.diag([0.03, 0.08]))


def test_poly_apply_nilpotent_square(j2_pair):
    got = dv.poly_apply(dv.Poly2([[0], [0], [1]]), j2_pair)  # z^2
    assert np.linalg.norm(got, 2) < 1e-15


def test_analytic_apply_geometric_on_nilpotent(j2_pair):
    f = dv.AnalyticHandle(
        lambda i, j: 0.25 ** i if i == j else 0.0, 1.0, "1/(1-zw/4)"
    )
    got = dv.analytic_apply(f, j2_pair)
    assert np.allclose(got, np.eye(2), atol=1e-12)


def test_analytic_apply_agrees_with_poly():
    pair = _random_commuting_pair(4)
    rng = np.random.default_rng(0)
    p = dv.Poly2(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    a = dv.analytic_apply(dv.AnalyticHandle.from_poly2(p), pair)
    b = dv.poly_apply(p, pair)
    assert np.linalg.norm(a - b, 2) <= 1e-12 * p.scale * 10


def test_analytic_apply_coordinate():
    pair = dv.validate_pair(np.diag([0.1, 0.2]), np.diag([0.3, 0.4]),
                            require_pure=True)
    f = dv.AnalyticHandle(lambda i, j: 1.0 if (i, j) == (1, 0) else 0.0, 1.0, "z")
    assert np.allclose(dv.analytic_apply(f, pair), np.diag([0.1, 0.2]), atol=1e-12)


# ---------------------------------------------------------------------------
# joint spectra


def test_taylor_spectrum_diagonal():
    pair = dv.validate_pair(np.diag([0.1, 0.2]), np.diag([0.3, 0.4]))
    spec = dv.joint_spectrum_taylor(pair)
    assert dv.matching_distance(list(spec.points), [(0.1, 0.3), (0.2, 0.4)]) < 1e-10


def test_taylor_spectrum_nilpotent(j2_pair):
    spec = dv.joint_spectrum_taylor(j2_pair)
    assert len(spec.points) == 2
    assert max(abs(l) + abs(m) for l, m in spec.points) < 1e-7


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_taylor_spectrum_polynomial_oracle(seed):
    # T2 = q(T1) for normal T1: points must be (lambda, q(lambda))
    rng = np.random.default_rng(seed)
    n = 5
    u = random_unitary(rng, n)
    lam = 0.7 * rng.uniform(0.2, 1.0, n) * np.exp(2j * np.pi * rng.uniform(size=n))
    t1 = u @ np.diag(lam) @ u.conj().T
    q = dv.Poly1(rng.normal(size=3) + 1j * rng.normal(size=3))
    t2 = u @ np.diag(q(lam)) @ u.conj().T
    t2 = t2 / (np.linalg.norm(t2, 2) + 0.1)
    scale = 1.0 / (np.linalg.norm(u @ np.diag(q(lam)) @ u.conj().T, 2) + 0.1)
    pair = dv.validate_pair(t1, t2)
    spec = dv.joint_spectrum_taylor(pair)
    expected = [(l, scale * q(l)) for l in lam]
    assert dv.matching_distance(list(spec.points), expected) < 1e-8


def test_point_spectrum_diagonal():
    pair = dv.validate_pair(np.diag([0.1, 0.2]), np.diag([0.3, 0.4]))
    spec = dv.joint_point_spectrum(pair)
    assert dv.matching_distance(list(spec.points), [(0.1, 0.3), (0.2, 0.4)]) < 1e-10


def test_point_spectrum_nilpotent(j2_pair):
    spec = dv.joint_point_spectrum(j2_pair)
    assert dv.matching_distance(list(spec.points), [(0.0, 0.0)]) < 1e-10
    w = spec.witnesses[0]
    assert abs(abs(w[1]) - 1.0) < 1e-12 and abs(w[0]) < 1e-12


def test_point_spectrum_j2_identity():
    pair = dv.validate_pair(J2, np.eye(2))
    spec = dv.joint_point_spectrum(pair)
    assert dv.matching_distance(list(spec.points), [(0.0, 1.0)]) < 1e-10


def test_point_subset_of_taylor():
    for seed in range(4):
        pair = _random_commuting_pair(seed)
        tay = dv.joint_spectrum_taylor(pair)
        pt = dv.joint_point_spectrum(pair)
        for p in pt.points:
            assert min(
                max(abs(p[0] - q[0]), abs(p[1] - q[1])) for q in tay.points
            ) < 1e-8


# ---------------------------------------------------------------------------
# minimal Blaschke products


def test_minimal_blaschke_jordan():
    b = dv.minimal_blaschke(J2)
    assert b.zeros == ((0j, 2),)


def test_minimal_blaschke_diagonal():
    b = dv.minimal_blaschke(np.diag([0.0, 0.5]))
    assert sorted((a.real, m) for a, m in b.zeros) == [(0.0, 1), (0.5, 1)]


def test_minimal_blaschke_zero_matrix():
    b = dv.minimal_blaschke(np.zeros((4, 4)))
    assert b.zeros == ((0j, 1),)


def test_minimal_blaschke_annihilates_through_taylor_route():
    # the rational evaluation and the Taylor-series calculus must agree
    from math import factorial

    t = np.diag([0.2, -0.35 + 0.1j, 0.5j])
    b = dv.minimal_blaschke(t)
    taylor = b.derivative_at(0.0, 40)
    coeffs = [taylor[k] / factorial(k) for k in range(41)]
    f = dv.AnalyticHandle(
        lambda i, j: coeffs[i] if j == 0 and i <= 40 else 0.0, 1.0, "m1"
    )
    pair = dv.validate_pair(t, np.zeros((3, 3)), require_pure=True)
    via_series = dv.analytic_apply(f, pair)
    assert np.linalg.norm(via_series, 2) < 1e-8
    assert np.linalg.norm(via_series - dv.blaschke_apply(b, t), 2) < 1e-8


def test_minimal_blaschke_annihilates_and_is_minimal():
    rng = np.random.default_rng(9)
    u = random_unitary(rng, 5)
    lam = np.array([0.1, 0.1, -0.4, 0.3j, 0.3j])
    nil = np.zeros((5, 5), dtype=complex)
    nil[0, 1] = 1.0  # Jordan block on the repeated 0.1 eigenvalue
    t = u @ (np.diag(lam) + nil) @ u.conj().T
    t = t / (np.linalg.norm(t, 2) + 0.2)
    scale = 1.0 / (np.linalg.norm(u @ (np.diag(lam) + nil) @ u.conj().T, 2) + 0.2)
    b = dv.minimal_blaschke(t)
    assert np.linalg.norm(dv.blaschke_apply(b, t), 2) < 1e-8
    mults = dict()
    for a, m in b.zeros:
        mults[round(a.real, 6), round(a.imag, 6)] = m
    lam_s = lam * scale
    assert mults[round(lam_s[0].real, 6), round(lam_s[0].imag, 6)] == 2
    # dropping any zero (one multiplicity) must break annihilation
    for k, (a, m) in enumerate(b.zeros):
        reduced = [(x, mm) for x, mm in b.zeros if x != a]
        if m > 1:
            reduced.append((a, m - 1))
        if not reduced:
            continue
        res = np.linalg.norm(dv.blaschke_apply(dv.BlaschkeProduct(reduced), t), 2)
        assert res > 1e-4


# ---------------------------------------------------------------------------
# algebraic properties


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_poly_apply_is_homomorphism(seed):
    pair = _random_commuting_pair(seed)
    rng = np.random.default_rng(seed + 100)
    p = dv.Poly2(rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3)))
    q = dv.Poly2(rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2)))
    scale = max(p.scale, q.scale) ** 2
    prod = dv.poly_apply(p * q, pair)
    comp = dv.poly_apply(p, pair) @ dv.poly_apply(q, pair)
    assert np.linalg.norm(prod - comp, 2) <= 1e-10 * scale
    s = dv.poly_apply(p + q, pair)
    assert np.linalg.norm(
        s - dv.poly_apply(p, pair) - dv.poly_apply(q, pair), 2
    ) <= 1e-10 * scale


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_spectral_mapping(seed):
    pair = _random_commuting_pair(seed, n=6)
    rng = np.random.default_rng(seed + 50)
    p = dv.Poly2(rng.normal(size=(3, 3)))
    spec = dv.joint_spectrum_taylor(pair)
    expected = [p(l, m) for l, m in spec.points]
    got = list(np.linalg.eigvals(dv.poly_apply(p, pair)))
    assert dv.matching_distance(expected, got) < 1e-6
