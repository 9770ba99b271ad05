"""Rational matrix-valued inner functions on the disc and their varieties.

Three interchangeable representations are supported:

  * colligation:  Psi(z) = D + z C (I - zA)^{-1} B  with [[A,B],[C,D]] unitary,
  * bp_product:   ordered elementary factors U ((I-P) + b_a(z) P),
  * polynomial:   Psi(z) = sum_k coeffs[k] z^k with matrix coefficients.

The zero set {det(Psi(z) - wI) = 0} is produced as an honest bivariate
polynomial by sampling the determinant of the linear pencil
[[I - zA, zB], [-C, D - wI]] (or a denominator-cleared determinant) on a
tensor grid and interpolating.
"""

import numpy as np

from .errors import (
    NotPureRealization,
    NotUnitaryColligation,
    ResolventSingular,
    SpuriousFactorInDisc,
    TruncationNotConverged,
)
from .poly import (
    BlaschkeProduct,
    Poly2,
    _factor_taylor,
    fit_tensor_nodes,
    interpolation_nodes,
    normalize_unit,
)
from .report import FAIL, PASS, CertEntry
from .tolerances import DEFAULT

COLLIGATION = "colligation"
BP_PRODUCT = "bp_product"
POLYNOMIAL = "polynomial"


def _as_matrix(m, shape=None):
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1 and a.size == 0:
        a = a.reshape(0, 0)
    if a.ndim != 2:
        raise ValueError("expected a 2-d array")
    if shape is not None and a.shape != shape:
        raise ValueError(f"expected shape {shape}, got {a.shape}")
    return a


def _unitarity_defect(u):
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), 2))


class BPFactor:
    """Elementary factor U ((I - P) + b_a(z) P) with b_a(z) = (a-z)/(1-conj(a)z)."""

    __slots__ = ("zero", "projection", "unitary")

    def __init__(self, zero, projection, unitary, tol_unitary=None):
        tol_unitary = DEFAULT.tol_unitary if tol_unitary is None else tol_unitary
        zero = complex(zero)
        if abs(zero) >= 1.0:
            raise ValueError(f"factor zero {zero} is not in the open disc")
        p = _as_matrix(projection)
        u = _as_matrix(unitary, p.shape)
        if np.linalg.norm(p - p.conj().T, 2) > tol_unitary:
            raise ValueError("projection is not Hermitian")
        if np.linalg.norm(p @ p - p, 2) > tol_unitary:
            raise ValueError("projection is not idempotent")
        if _unitarity_defect(u) > tol_unitary:
            raise ValueError("factor unitary fails the unitarity test")
        object.__setattr__(self, "zero", zero)
        object.__setattr__(self, "projection", p)
        object.__setattr__(self, "unitary", u)

    def __setattr__(self, name, value):
        raise AttributeError("BPFactor is immutable")

    @property
    def rank(self):
        return int(round(float(np.trace(self.projection).real)))

    def value(self, z):
        d = self.projection.shape[0]
        b = (self.zero - z) / (1.0 - np.conj(self.zero) * z)
        return self.unitary @ (np.eye(d) - self.projection + b * self.projection)

    def taylor(self, z0, n):
        """First n Taylor coefficient matrices around z0."""
        d = self.projection.shape[0]
        bj = _factor_taylor(self.zero, z0, n)
        out = np.zeros((n, d, d), dtype=complex)
        out[0] = self.unitary @ (np.eye(d) - self.projection + bj[0] * self.projection)
        for k in range(1, n):
            out[k] = bj[k] * (self.unitary @ self.projection)
        return out


class MatrixInnerFunction:
    """Rational d x d inner function with a constructively verified representation."""

    __slots__ = ("kind", "d", "data", "boundary_defect", "realization_radius")

    def __init__(self, kind, d, data, boundary_defect, realization_radius):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "boundary_defect", float(boundary_defect))
        object.__setattr__(self, "realization_radius", float(realization_radius))

    def __setattr__(self, name, value):
        raise AttributeError("MatrixInnerFunction is immutable")

    def __call__(self, z):
        return eval_psi(self, z)

    def __repr__(self):
        return f"MatrixInnerFunction(kind={self.kind!r}, d={self.d})"


def from_colligation(A, B, C, D, tol_unitary=None, pure_tol=1e-9, boundary_n=512):
    """Build the transfer function of a unitary colligation.

    Checks that [[A, B], [C, D]] is unitary, that the state matrix has spectral
    radius strictly below 1, and records the boundary unitarity defect on a
    uniform grid of ``boundary_n`` circle points.
    """
    tol_unitary = DEFAULT.tol_unitary if tol_unitary is None else tol_unitary
    A = _as_matrix(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("A must be square")
    B = _as_matrix(B) if n else np.zeros((0, _as_matrix(D).shape[0]), dtype=complex)
    C = _as_matrix(C) if n else np.zeros((_as_matrix(D).shape[0], 0), dtype=complex)
    D = _as_matrix(D)
    d = D.shape[0]
    if D.shape != (d, d) or B.shape != (n, d) or C.shape != (d, n):
        raise ValueError("inconsistent colligation block sizes")
    block = np.block([[A, B], [C, D]])
    defect = _unitarity_defect(block)
    if defect > tol_unitary:
        raise NotUnitaryColligation(
            f"colligation unitarity defect {defect:.3e} exceeds {tol_unitary:.1e}"
        )
    radius = float(np.max(np.abs(np.linalg.eigvals(A)))) if n else 0.0
    if radius >= 1.0 - pure_tol:
        raise NotPureRealization(
            f"state spectral radius {radius:.12f} is not strictly inside the disc"
        )
    psi = MatrixInnerFunction(
        COLLIGATION, d, {"A": A, "B": B, "C": C, "D": D}, 0.0, radius
    )
    bdef = boundary_unitarity_defect(psi, boundary_n)
    return MatrixInnerFunction(COLLIGATION, d, psi.data, bdef, radius)


def from_bp_factors(factors, leading=None, tol_unitary=None, boundary_n=512):
    """Build a Blaschke-Potapov product; ``leading`` is an optional constant unitary."""
    tol_unitary = DEFAULT.tol_unitary if tol_unitary is None else tol_unitary
    factors = list(factors)
    if not factors and leading is None:
        raise ValueError("empty product; pass a constant via from_colligation")
    d = factors[0].projection.shape[0] if factors else _as_matrix(leading).shape[0]
    if leading is None:
        leading = np.eye(d)
    leading = _as_matrix(leading, (d, d))
    if _unitarity_defect(leading) > tol_unitary:
        raise ValueError("leading matrix fails the unitarity test")
    for f in factors:
        if f.projection.shape[0] != d:
            raise ValueError("factor dimensions disagree")
    radius = max((abs(f.zero) for f in factors), default=0.0)
    psi = MatrixInnerFunction(
        BP_PRODUCT, d, {"factors": tuple(factors), "leading": leading}, 0.0, radius
    )
    bdef = boundary_unitarity_defect(psi, boundary_n)
    return MatrixInnerFunction(BP_PRODUCT, d, psi.data, bdef, radius)


def from_scalar_blaschke_identity(b, d, boundary_n=512):
    """Psi(z) = b(z) I_d for a scalar finite Blaschke product b."""
    eye = np.eye(d)
    factors = []
    for a, m in b.zeros:
        for _ in range(m):
            factors.append(BPFactor(a, eye, eye))
    return from_bp_factors(factors, leading=b.constant * eye, boundary_n=boundary_n)


def from_polynomial(coeff_matrices, tol_unitary=None, boundary_n=512, check_inner=True):
    """Psi(z) = sum_k coeffs[k] z^k; inner-ness is certified on a boundary grid."""
    tol_unitary = DEFAULT.tol_unitary if tol_unitary is None else tol_unitary
    coeffs = np.asarray(coeff_matrices, dtype=complex)
    if coeffs.ndim == 2:
        coeffs = coeffs[None, :, :]
    if coeffs.ndim != 3 or coeffs.shape[1] != coeffs.shape[2]:
        raise ValueError("expected coefficient array of shape (deg+1, d, d)")
    # trim trailing zero coefficient matrices
    scale = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    k = coeffs.shape[0] - 1
    while k > 0 and np.max(np.abs(coeffs[k])) <= 1e-14 * max(scale, 1e-300):
        k -= 1
    coeffs = coeffs[: k + 1]
    d = coeffs.shape[1]
    psi = MatrixInnerFunction(POLYNOMIAL, d, {"coeffs": coeffs}, 0.0, 0.0)
    bdef = boundary_unitarity_defect(psi, boundary_n)
    if check_inner and bdef > tol_unitary:
        raise NotUnitaryColligation(
            f"polynomial symbol boundary defect {bdef:.3e} exceeds {tol_unitary:.1e}"
        )
    return MatrixInnerFunction(POLYNOMIAL, d, psi.data, bdef, 0.0)


def from_poly1_matrix(entries, **kwargs):
    """Build the polynomial representation from a 2-d grid of Poly1 entries."""
    d = len(entries)
    deg = 0
    for row in entries:
        if len(row) != d:
            raise ValueError("entry grid must be square")
        for p in row:
            deg = max(deg, p.degree)
    coeffs = np.zeros((deg + 1, d, d), dtype=complex)
    for i, row in enumerate(entries):
        for j, p in enumerate(row):
            coeffs[: p.coeffs.size, i, j] = p.coeffs
    return from_polynomial(coeffs, **kwargs)


def eval_psi(psi, lam, tol=1e-9):
    """Evaluate Psi at a point of the closed disc (slightly beyond is tolerated)."""
    lam = complex(lam)
    if abs(lam) > 1.0 + tol:
        raise ValueError(f"|lambda| = {abs(lam):.6f} is outside the closed disc")
    if psi.kind == COLLIGATION:
        A, B, C, D = (psi.data[k] for k in ("A", "B", "C", "D"))
        if A.shape[0] == 0:
            return D.copy()
        M = np.eye(A.shape[0]) - lam * A
        try:
            X = np.linalg.solve(M, B)
        except np.linalg.LinAlgError as exc:
            raise ResolventSingular(f"I - zA singular at z = {lam}") from exc
        return D + lam * (C @ X)
    if psi.kind == BP_PRODUCT:
        out = psi.data["leading"].copy()
        for f in psi.data["factors"]:
            out = out @ f.value(lam)
        return out
    coeffs = psi.data["coeffs"]
    out = coeffs[-1].copy()
    for k in range(coeffs.shape[0] - 2, -1, -1):
        out = lam * out + coeffs[k]
    return out


def eval_psi_jet(psi, lam, order):
    """Value and derivatives [Psi, Psi', ..., Psi^(order)] at an interior point."""
    lam = complex(lam)
    if order < 0:
        raise ValueError("order must be >= 0")
    if psi.kind == COLLIGATION:
        A, B, C, D = (psi.data[k] for k in ("A", "B", "C", "D"))
        if A.shape[0] == 0:
            return [D.copy()] + [np.zeros_like(D) for _ in range(order)]
        M = np.eye(A.shape[0]) - lam * A
        try:
            RB = np.linalg.solve(M, B)
        except np.linalg.LinAlgError as exc:
            raise ResolventSingular(f"I - zA singular at z = {lam}") from exc
        out = [D + lam * (C @ RB)]
        # Psi^(k) = k! C R^(k+1) A^(k-1) B for k >= 1, R = (I - lam A)^(-1)
        X = RB
        fact = 1.0
        for k in range(1, order + 1):
            X = np.linalg.solve(M, X) if k == 1 else np.linalg.solve(M, A @ X)
            fact *= k
            out.append(fact * (C @ X))
        return out
    n = order + 1
    if psi.kind == BP_PRODUCT:
        d = psi.d
        jet = np.zeros((n, d, d), dtype=complex)
        jet[0] = psi.data["leading"]
        for f in psi.data["factors"]:
            fj = f.taylor(lam, n)
            out = np.zeros_like(jet)
            for k in range(n):
                for i in range(k + 1):
                    out[k] += jet[i] @ fj[k - i]
            jet = out
    else:
        coeffs = psi.data["coeffs"]
        deg = coeffs.shape[0] - 1
        jet = np.zeros((n, psi.d, psi.d), dtype=complex)
        pows = lam ** np.arange(deg + 1)
        from math import comb

        for m in range(n):
            for k in range(m, deg + 1):
                jet[m] += comb(k, m) * pows[k - m] * coeffs[k]
    fact = 1.0
    out = []
    for k in range(n):
        if k > 0:
            fact *= k
        out.append(fact * jet[k])
    return out


def taylor_at_zero(psi, n):
    """First n Taylor coefficient matrices of Psi at the origin."""
    if psi.kind == COLLIGATION:
        A, B, C, D = (psi.data[k] for k in ("A", "B", "C", "D"))
        out = np.zeros((n, psi.d, psi.d), dtype=complex)
        out[0] = D
        if A.shape[0] and n > 1:
            X = B.copy()
            for k in range(1, n):
                out[k] = C @ X
                X = A @ X
        return out
    if psi.kind == POLYNOMIAL:
        coeffs = psi.data["coeffs"]
        out = np.zeros((n, psi.d, psi.d), dtype=complex)
        m = min(n, coeffs.shape[0])
        out[:m] = coeffs[:m]
        return out
    jet = eval_psi_jet(psi, 0.0, n - 1)
    fact = 1.0
    out = np.zeros((n, psi.d, psi.d), dtype=complex)
    for k in range(n):
        if k > 0:
            fact *= k
        out[k] = jet[k] / fact
    return out


def taylor_until(psi, tol=1e-14, nmax=4096):
    """Taylor coefficients at 0 until three consecutive ones fall below tol."""
    if psi.kind == POLYNOMIAL:
        return taylor_at_zero(psi, psi.data["coeffs"].shape[0])
    n = 8
    while n <= nmax:
        coeffs = taylor_at_zero(psi, n)
        norms = np.array([np.linalg.norm(c, 2) for c in coeffs])
        small = norms <= tol
        if n >= 4 and small[-3:].all():
            last = int(np.max(np.nonzero(~small)[0])) if (~small).any() else 0
            return coeffs[: last + 1]
        n *= 2
    raise TruncationNotConverged(
        f"Taylor series of the symbol did not reach {tol:.1e} within {nmax} terms"
    )


def boundary_unitarity_defect(psi, n=2048):
    """max_theta || Psi(e^{i theta})* Psi(e^{i theta}) - I || on a uniform grid."""
    worst = 0.0
    for t in np.arange(n) * (2.0 * np.pi / n):
        worst = max(worst, _unitarity_defect(eval_psi(psi, np.exp(1j * t))))
    return worst


def interior_disc_grid(n, radius=0.995):
    """Deterministic quasi-uniform points of the open disc (sunflower layout)."""
    k = np.arange(n)
    r = radius * np.sqrt((k + 0.5) / n)
    golden = np.pi * (3.0 - np.sqrt(5.0))
    return r * np.exp(1j * golden * k)


def interior_pureness(psi, n=512, radius=0.995):
    """Largest spectral radius of Psi over a deterministic interior grid."""
    worst, arg = -1.0, 0j
    for lam in interior_disc_grid(n, radius):
        rho = float(np.max(np.abs(np.linalg.eigvals(eval_psi(psi, lam)))))
        if rho > worst:
            worst, arg = rho, complex(lam)
    return worst, arg


def fiber(psi, z):
    """Eigenvalues of Psi(z) with multiplicity, sorted by (real, imag)."""
    vals = np.linalg.eigvals(eval_psi(psi, z))
    return sorted((complex(v) for v in vals), key=lambda v: (v.real, v.imag))


class VarietyDescription:
    """Defining polynomial of {det(Psi(z) - wI) = 0} on the closed bidisc."""

    __slots__ = ("psi", "p", "degz", "degw", "fit_residual", "fiber_check")

    def __init__(self, psi, p, degz, degw, fit_residual, fiber_check):
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "degz", int(degz))
        object.__setattr__(self, "degw", int(degw))
        object.__setattr__(self, "fit_residual", float(fit_residual))
        object.__setattr__(self, "fiber_check", float(fiber_check))

    def __setattr__(self, name, value):
        raise AttributeError("VarietyDescription is immutable")

    def __repr__(self):
        return f"VarietyDescription(bidegree={self.p.bidegree})"


def _pencil_sampler(psi):
    """Sampler g(z, w) for a polynomial with the same zeros as det(Psi(z)-wI)
    on the closed bidisc, together with the z-degree bound."""
    d = psi.d
    if psi.kind == COLLIGATION:
        A, B, C, D = (psi.data[k] for k in ("A", "B", "C", "D"))
        N = A.shape[0]
        if N and np.max(np.abs(np.linalg.eigvals(A))) >= 1.0 - 1e-12:
            raise SpuriousFactorInDisc("det(I - zA) vanishes on the closed disc")
        eyeN = np.eye(N)
        eyed = np.eye(d)

        def g(z, w):
            top = np.hstack([eyeN - z * A, z * B])
            bot = np.hstack([-C, D - w * eyed])
            return complex(np.linalg.det(np.vstack([top, bot])))

        return g, N
    if psi.kind == BP_PRODUCT:
        factors = psi.data["factors"]
        for f in factors:
            if abs(f.zero) >= 1.0 - 1e-12 and f.zero != 0:
                raise SpuriousFactorInDisc("cleared factor vanishes on the closed disc")
        degz = sum(f.rank for f in factors)
        eyed = np.eye(d)

        def g(z, w):
            q = 1.0 + 0j
            for f in factors:
                q *= (1.0 - np.conj(f.zero) * z) ** f.rank
            return complex(q * np.linalg.det(eval_psi(psi, z) - w * eyed))

        return g, degz
    coeffs = psi.data["coeffs"]
    degz = (coeffs.shape[0] - 1) * d
    eyed = np.eye(d)

    def g(z, w):
        return complex(np.linalg.det(eval_psi(psi, z) - w * eyed))

    return g, degz


def variety_polynomial(psi, tol_fit=None, check_fibers=200):
    """Bivariate defining polynomial of the variety of Psi, unit-normalized.

    The polynomial is obtained by evaluation-interpolation of the cleared
    pencil determinant; the cleared factor has no zeros on the closed disc.
    Agreement of the zero sets is asserted on sampled fibers.
    """
    g, degz = _pencil_sampler(psi)
    degw = psi.d
    zn, wn = interpolation_nodes(degz, degw)
    values = np.empty((degz + 1, degw + 1), dtype=complex)
    for i, z in enumerate(zn):
        for j, w in enumerate(wn):
            values[i, j] = g(z, w)
    p, residual = fit_tensor_nodes(zn, wn, values, tol_fit=tol_fit)
    p = normalize_unit(p)
    worst = 0.0
    if check_fibers:
        nz = max(4, check_fibers // 2)
        for ring in (0.35, 0.85):
            for t in np.arange(nz) * (2.0 * np.pi / nz):
                z = ring * np.exp(1j * t)
                for w in fiber(psi, z):
                    worst = max(worst, abs(p(z, w)))
        if worst > 1e-8 * p.scale * 10:
            raise SpuriousFactorInDisc(
                f"fiber residual {worst:.3e} inconsistent with the fitted polynomial"
            )
    return VarietyDescription(psi, p, degz, degw, residual, worst)


def distinguished_certificate(psi, boundary_n=512, disc_n=512, tol_unitary=None):
    """Certificate that the variety of Psi is distinguished.

    Conditions: (a) boundary fibers are unimodular, (b) interior fibers stay in
    the open disc, (c) the variety meets the open bidisc (witness recorded).
    """
    tol_unitary = DEFAULT.tol_unitary if tol_unitary is None else tol_unitary
    if boundary_n < 64 or disc_n < 64:
        raise ValueError("grid sizes must be at least 64")
    worst_boundary = 0.0
    for t in np.arange(boundary_n) * (2.0 * np.pi / boundary_n):
        vals = fiber(psi, np.exp(1j * t))
        worst_boundary = max(worst_boundary, max(abs(abs(v) - 1.0) for v in vals))
    cond_a = worst_boundary <= tol_unitary

    worst_interior = 0.0
    witness = None
    for lam in interior_disc_grid(disc_n):
        vals = fiber(psi, lam)
        m = max(abs(v) for v in vals)
        worst_interior = max(worst_interior, m)
        if witness is None and m < 1.0 - 1e-9:
            witness = (complex(lam), vals[int(np.argmax(np.abs(vals)))])
    # no uniform interior gap exists, so only a pointwise margin is sensible
    cond_b = worst_interior <= 1.0 - DEFAULT.pure_margin
    cond_c = witness is not None

    status = PASS if (cond_a and cond_b and cond_c) else FAIL
    margin = min(tol_unitary - worst_boundary, 1.0 - worst_interior)
    data = {
        "boundary_defect": worst_boundary,
        "interior_max_modulus": worst_interior,
        "conditions": {"boundary_unimodular": cond_a, "interior_strict": cond_b,
                       "meets_open_bidisc": cond_c},
    }
    if witness is not None:
        data["witness"] = [witness[0], witness[1]]
    return CertEntry(
        name="distinguished-variety",
        anchor="variety-exits-through-distinguished-boundary",
        status=status,
        margin=float(margin),
        data=data,
    )
