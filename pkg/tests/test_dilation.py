import dataclasses
import numpy as np
import pytest

import distvar as dv
from distvar.dilation import _gram_entry
from distvar.errors import NoInnerSolution
from distvar.instances import make_instance, random_recipe
from conftest import J2, w2z_poly


# ---------------------------------------------------------------------------
# embedding


def test_embed_j2_is_exact_identity(j2_pair):
    j, n_trunc, _ = dv.embed_J(j2_pair, 1e-10)
    assert n_trunc == 1
    assert np.allclose(np.abs(j), np.eye(2))
    assert np.linalg.norm(j.conj().T @ j - np.eye(2), 2) < 1e-15


def test_embed_zero_matrix():
    pair = dv.validate_pair(np.zeros((3, 3)), np.zeros((3, 3)), require_pure=True)
    j, n_trunc, _ = dv.embed_J(pair, 1e-10)
    assert n_trunc == 0
    assert np.allclose(np.abs(j), np.eye(3))


def test_embed_geometric_column():
    pair = dv.validate_pair([[0.5]], [[0.5]], require_pure=True)
    j, n_trunc, _ = dv.embed_J(pair, 1e-10)
    expected = (np.sqrt(3) / 2) * 0.5 ** np.arange(n_trunc + 1)
    assert np.allclose(np.abs(j[:, 0]), expected)
    assert abs(np.linalg.norm(j) - 1.0) < 1e-10


# ---------------------------------------------------------------------------
# symbol construction


def test_construct_psi_shift_for_j2(j2_pair):
    psi = dv.construct_psi(j2_pair)
    coeffs = psi.data["coeffs"]
    assert coeffs.shape[0] == 2
    assert abs(coeffs[0][0, 0]) < 1e-10
    assert coeffs[1][0, 0] == pytest.approx(1.0)


def test_construct_psi_square_for_j2_zero():
    pair = dv.validate_pair(J2, np.zeros((2, 2)), require_pure=True)
    psi = dv.construct_psi(pair)
    coeffs = psi.data["coeffs"]
    assert coeffs.shape[0] == 3
    assert np.max(np.abs(coeffs[:2])) < 1e-8
    assert abs(abs(coeffs[2][0, 0]) - 1.0) < 1e-8


def test_construct_psi_for_compressed_pair(companion_psi_2):
    pair = dv.compress_pair(companion_psi_2, dv.BlaschkeProduct([(0.0, 2)]))
    psi = dv.construct_psi(pair)
    v = dv.variety_polynomial(psi)
    assert np.linalg.norm(dv.poly_apply(v.p, pair), 2) < 1e-10


def test_construct_psi_honest_failure():
    # scalar inner polynomials are c z^m, so psi(1/2) = 3/10 has no solution;
    # the search must report failure instead of returning a non-inner lift
    pair = dv.validate_pair(np.diag([0.5]), np.diag([0.3]), require_pure=True)
    with pytest.raises(NoInnerSolution):
        dv.construct_psi(pair, restarts=2, iters=100)


def test_construct_psi_rejects_mismatched_symbol(j2_pair):
    # Psi = z^2 cannot intertwine T2 = J2 through any co-extension
    psi = dv.from_polynomial(np.array([[[0.0]], [[0.0]], [[1.0]]], dtype=complex))
    with pytest.raises(NoInnerSolution):
        dv.coextension_embedding(j2_pair, psi)


# ---------------------------------------------------------------------------
# model compression


def test_compress_scalar_shift_square(scalar_shift_psi):
    pair = dv.compress_pair(scalar_shift_psi, dv.BlaschkeProduct([(0.0, 2)]))
    assert np.allclose(pair.t1, J2, atol=1e-12)
    assert np.allclose(pair.t2, J2, atol=1e-12)


def test_compress_scalar_shift_degree_one(scalar_shift_psi):
    pair = dv.compress_pair(scalar_shift_psi, dv.BlaschkeProduct([(0.0, 1)]))
    assert pair.n == 1
    assert abs(pair.t1[0, 0]) < 1e-14


def test_compress_companion_satisfies_curve(companion_psi_2):
    pair = dv.compress_pair(companion_psi_2, dv.BlaschkeProduct([(0.0, 2)]))
    assert pair.n == 4
    assert np.linalg.norm(dv.poly_apply(w2z_poly(), pair), 2) < 1e-12
    # T2^2 = T1 exactly on this instance
    assert np.linalg.norm(pair.t2 @ pair.t2 - pair.t1, 2) < 1e-12


# ---------------------------------------------------------------------------
# jet kernels


def _gram_series_oracle(lam, j, mu, i, n=600):
    ns = np.arange(n, dtype=float)

    def coeffs(a, order):
        fall = np.ones(n)
        for k in range(order):
            fall *= ns - k
        with np.errstate(invalid="ignore"):
            pows = np.where(
                ns - order >= 0, np.conj(a) ** np.clip(ns - order, 0, None), 0.0
            )
        return fall * pows

    ca = coeffs(lam, j)
    cb = coeffs(mu, i)
    return complex(np.sum(ca * np.conj(cb)))


@pytest.mark.parametrize("lam,j,mu,i", [
    (0.3 + 0.1j, 0, 0.3 + 0.1j, 0),
    (0.3 + 0.1j, 1, 0.3 + 0.1j, 0),
    (0.3 + 0.1j, 2, 0.3 + 0.1j, 1),
    (0.5j, 1, -0.4, 2),
    (0.0, 1, 0.2, 0),
])
def test_gram_entry_matches_series(lam, j, mu, i):
    got = _gram_entry(lam, j, mu, i)
    want = _gram_series_oracle(lam, j, mu, i)
    assert abs(got - want) < 1e-9 * max(1.0, abs(want))


def test_jet_basis_gram_positive_definite():
    basis = dv.jet_kernel_basis(
        dv.BlaschkeProduct([(0.2 + 0.1j, 2), (-0.5, 1)]), 2
    )
    vals = np.linalg.eigvalsh(basis.gram)
    assert vals.min() > 0
    assert basis.dimension == 6


# ---------------------------------------------------------------------------
# constrained co-extension


def test_constrained_j2_instance(scalar_shift_psi):
    pair = dv.compress_pair(scalar_shift_psi, dv.BlaschkeProduct([(0.0, 2)]))
    basis = dv.ann_generators(pair)
    bundle = dv.constrained_coextension(pair, scalar_shift_psi, basis.generators)
    assert bundle.kpsi_dim == 2
    assert np.allclose(bundle.s1, J2, atol=1e-10)
    assert np.allclose(bundle.s2, J2, atol=1e-10)


def test_constrained_diagonal_instance(scalar_shift_psi):
    theta = dv.BlaschkeProduct([(0.0, 1), (0.5, 1)])
    pair = dv.compress_pair(scalar_shift_psi, theta)
    basis = dv.ann_generators(pair)
    bundle = dv.constrained_coextension(pair, scalar_shift_psi, basis.generators)
    assert bundle.kpsi_dim == 2


@pytest.mark.parametrize("seed", [11, 12, 13, 14, 15, 16])
def test_kpsi_dimension_law(seed):
    # d = 1: dim K = deg m1; model compressions with d >= 2: dim = d * deg m1
    spec = random_recipe(seed)
    inst = make_instance(spec)
    basis = dv.ann_generators(inst.pair)
    bundle = dv.constrained_coextension(inst.pair, inst.psi, basis.generators)
    d = inst.psi.d
    assert bundle.kpsi_dim == d * bundle.m1.degree
    if d == 1:
        assert bundle.kpsi_dim == bundle.m1.degree


def test_bundle_contracts_on_random_instances():
    for seed in (0, 1, 2, 3, 4):
        inst = make_instance(random_recipe(seed))
        basis = dv.ann_generators(inst.pair)
        bundle = dv.constrained_coextension(inst.pair, inst.psi, basis.generators)
        r = bundle.residuals
        assert r["isometry"] <= 1e-10
        assert r["intertwine_shift"] <= 1e-9
        assert r["intertwine_symbol"] <= 1e-9
        assert r["s_commutator"] <= 1e-9
        assert r["s1_radius"] < 1.0 and r["s2_radius"] < 1.0


def test_verify_coextension_positive(companion_psi_2):
    pair = dv.compress_pair(companion_psi_2, dv.BlaschkeProduct([(0.0, 2)]))
    basis = dv.ann_generators(pair)
    bundle = dv.constrained_coextension(pair, companion_psi_2, basis.generators)
    variety = dv.variety_polynomial(companion_psi_2)
    entries = dv.verify_coextension(bundle, variety)
    assert all(e.status == "pass" for e in entries)


def test_verify_coextension_detects_corruption(companion_psi_2):
    pair = dv.compress_pair(companion_psi_2, dv.BlaschkeProduct([(0.0, 2)]))
    basis = dv.ann_generators(pair)
    bundle = dv.constrained_coextension(pair, companion_psi_2, basis.generators)
    variety = dv.variety_polynomial(companion_psi_2)
    bad_t2 = np.asarray(pair.t2).copy()
    bad_t2[0, 1] += 1e-3
    bad_pair = dv.validate_pair(pair.t1, bad_t2, strict=False)
    corrupted = dataclasses.replace(bundle, pair=bad_pair)
    entries = dv.verify_coextension(corrupted, variety)
    annih = [e for e in entries if e.name == "variety-annihilates"][0]
    assert annih.status == "fail"
    assert 1e-4 < annih.data["pair_norm"] < 1e-2


def test_calculus_consistency():
    rng = np.random.default_rng(21)
    for seed in (0, 2, 4):
        inst = make_instance(random_recipe(seed))
        p = dv.Poly2(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        res = dv.calculus_residual(inst.pair, inst.psi, p)
        assert res <= 1e-7 * p.scale


def test_ann_invariance_between_pair_and_constrained():
    for seed in (0, 1, 3):
        inst = make_instance(random_recipe(seed))
        basis = dv.ann_generators(inst.pair)
        bundle = dv.constrained_coextension(inst.pair, inst.psi, basis.generators)
        spair = dv.s_pair(bundle)
        sbasis = dv.ann_generators(spair)
        assert sbasis.box == basis.box
        assert len(sbasis.box_generators) == len(basis.box_generators)
        # mutual span containment of the box kernels
        from distvar.annvar import _span_matrix, _spans_equal

        d1, d2 = basis.box
        qa = _span_matrix(basis.box_generators, d1, d2)
        qb = _span_matrix(sbasis.box_generators, d1, d2)
        assert _spans_equal(qa, qb, tol=1e-7)
        # every generator of the pair annihilates the constrained pair
        for g in basis.generators:
            res = np.linalg.norm(dv.poly_apply(g, (bundle.s1, bundle.s2)), 2)
            assert res < 1e-7 * max(1.0, g.scale)
