"""Spectral-set certificates: sup-norm sampling on varieties and checkers.

Sampling can only under-estimate a supremum, so every inequality entry
carries a slack term C_lip * h where C_lip is a sampled gradient bound of the
test polynomial on the closed bidisc and h measures the resolution of the
sample net on the variety; entries inside the slack band are inconclusive
rather than failed.
"""

import numpy as np

from .errors import ConstantSymbol, DenominatorVanishes
from .inner import distinguished_certificate, fiber
from .opcore import blaschke_apply, opnorm, poly_apply, spectral_radius
from .poly import BlaschkeProduct, Poly1
from .report import FAIL, INCONCLUSIVE, PASS, CertEntry
from .tolerances import DEFAULT


class VarietySamples:
    """Cached fiber samples of a variety over boundary and interior grids.

    Grids are nested under the refinement boundary_n -> 2*boundary_n and
    (nr, na) -> (2*nr + 1, 2*na), which makes sampled suprema monotone.
    """

    def __init__(self, variety, boundary_n=512, disc_grid=(16, 64)):
        if boundary_n < 64 or disc_grid[0] * disc_grid[1] < 64:
            raise ValueError("grid sizes must be at least 64")
        self.variety = variety
        self.boundary_n = int(boundary_n)
        self.disc_grid = (int(disc_grid[0]), int(disc_grid[1]))
        psi = variety.psi
        zs, ws = [], []
        for t in np.arange(boundary_n) * (2.0 * np.pi / boundary_n):
            z = np.exp(1j * t)
            for w in fiber(psi, z):
                zs.append(z)
                ws.append(w)
        self.boundary_z = np.array(zs)
        self.boundary_w = np.array(ws)
        zs, ws = [], []
        nr, na = self.disc_grid
        for r in (np.arange(1, nr + 1) / (nr + 1)):
            for t in np.arange(na) * (2.0 * np.pi / na):
                z = r * np.exp(1j * t)
                for w in fiber(psi, z):
                    zs.append(z)
                    ws.append(w)
        self.interior_z = np.array(zs)
        self.interior_w = np.array(ws)
        self._mesh = None

    def mesh(self):
        """Max distance between consecutive boundary samples in (z, w).

        Fibers of consecutive base points are compared by optimal matching,
        so branch reorderings do not inflate the estimate.
        """
        if self._mesh is not None:
            return self._mesh
        from .opcore import matching_distance

        d = self.variety.degw
        z = self.boundary_z.reshape(-1, d)
        w = self.boundary_w.reshape(-1, d)
        dz = float(np.abs(np.roll(z[:, 0], -1) - z[:, 0]).max())
        dw = 0.0
        rows = w.shape[0]
        for k in range(rows):
            dw = max(dw, matching_distance(list(w[k]), list(w[(k + 1) % rows])))
        self._mesh = dz + dw
        return self._mesh


def sup_on_variety(variety, q, boundary_n=512, disc_grid=(16, 64), samples=None):
    """Sampled sup of |q| over the closure of the variety.

    Monotone nondecreasing under the nested grid refinement; the maximum over
    the closure is attained on boundary fibers, which are always included.
    """
    if samples is None:
        samples = VarietySamples(variety, boundary_n, disc_grid)
    vals_b = np.abs(q(samples.boundary_z, samples.boundary_w))
    vals_i = (
        np.abs(q(samples.interior_z, samples.interior_w))
        if samples.interior_z.size
        else np.zeros(1)
    )
    return float(max(vals_b.max(), vals_i.max()))


def gradient_bound(q, n=24):
    """Sampled bound for |grad q| on the closed bidisc (torus grid suffices)."""
    qz, qw = q.dz(), q.dw()
    ts = np.exp(2j * np.pi * np.arange(n) / n)
    zz, ww = np.meshgrid(ts, ts)
    g = np.abs(qz(zz, ww)) + np.abs(qw(zz, ww))
    return float(g.max())


def slack(q, samples):
    """Discretization slack C_lip * h for the sampled supremum of |q|,
    floored at the double-precision headroom of the evaluations."""
    return gradient_bound(q) * samples.mesh() + 1e-12 * max(1.0, q.scale)


def vn_report(pair, variety, polys, boundary_n=512, disc_grid=(16, 64),
              rationals=None, tol=DEFAULT):
    """Inequality certificates ||q(T1,T2)|| <= sup_variety |q| + slack.

    The defining polynomial gets an annihilation entry; rational symbols
    q = p1/p2 are certified when |p2| stays above a margin on the samples.
    """
    samples = VarietySamples(variety, boundary_n, disc_grid)
    entries = []

    p = variety.p
    res = opnorm(poly_apply(p, pair))
    entries.append(CertEntry(
        name="defining-polynomial-annihilates",
        anchor="defining-polynomial-annihilates-pair",
        status=PASS if res <= tol.tol_ann else FAIL,
        margin=float(tol.tol_ann - res),
        data={"norm": res},
    ))

    for idx, q in enumerate(polys):
        nrm = opnorm(poly_apply(q, pair))
        sup = sup_on_variety(variety, q, samples=samples)
        sl = slack(q, samples)
        if nrm <= sup:
            status, margin = PASS, sup - nrm
        elif nrm <= sup + sl:
            status, margin = INCONCLUSIVE, sup + sl - nrm
        else:
            status, margin = FAIL, sup + sl - nrm
        entries.append(CertEntry(
            name=f"variety-dominates-q{idx}",
            anchor="polynomial-norm-bounded-by-variety-sup",
            status=status,
            margin=float(margin),
            data={"norm": nrm, "sup": sup, "slack": sl},
        ))

    for idx, (p1, p2) in enumerate(rationals or []):
        den_b = np.abs(p2(samples.boundary_z, samples.boundary_w))
        den_i = (
            np.abs(p2(samples.interior_z, samples.interior_w))
            if samples.interior_z.size
            else np.array([np.inf])
        )
        den_min = float(min(den_b.min(), den_i.min()))
        # a zero may hide between samples: demand clearance above the mesh slack
        den_margin = max(
            10 * tol.tol_zset * max(1.0, p2.scale),
            gradient_bound(p2) * samples.mesh(),
        )
        if den_min <= den_margin:
            raise DenominatorVanishes(
                f"min |denominator| = {den_min:.3e} is below the sampling "
                f"margin {den_margin:.3e} on the closure"
            )
        num_t = poly_apply(p1, pair)
        den_t = poly_apply(p2, pair)
        rat_t = num_t @ np.linalg.inv(den_t)
        nrm = opnorm(rat_t)
        vals = [
            float(max(
                (np.abs(p1(zv, wv)) / np.abs(p2(zv, wv))).max(),
                0.0,
            ))
            for zv, wv in (
                (samples.boundary_z, samples.boundary_w),
                (samples.interior_z, samples.interior_w),
            )
            if zv.size
        ]
        sup = max(vals)
        sl = (gradient_bound(p1) / den_min
              + sup * gradient_bound(p2) / den_min) * samples.mesh()
        if nrm <= sup:
            status, margin = PASS, sup - nrm
        elif nrm <= sup + sl:
            status, margin = INCONCLUSIVE, sup + sl - nrm
        else:
            status, margin = FAIL, sup + sl - nrm
        entries.append(CertEntry(
            name=f"variety-dominates-rational{idx}",
            anchor="rational-norm-bounded-by-variety-sup",
            status=status,
            margin=float(margin),
            data={"norm": nrm, "sup": sup, "slack": sl, "den_min": den_min},
        ))
    return entries


def _symbol_is_constant(sym):
    if isinstance(sym, Poly1):
        return sym.degree == 0
    if isinstance(sym, BlaschkeProduct):
        return sym.degree == 0
    if isinstance(sym, tuple):
        num, den = sym
        return num.degree == 0 and den.degree == 0
    raise TypeError(f"unsupported symbol type {type(sym)!r}")


def _symbol_matrix(sym, t):
    t = np.asarray(t, dtype=complex)
    if isinstance(sym, Poly1):
        out = sym.coeffs[-1] * np.eye(t.shape[0], dtype=complex)
        for k in range(sym.coeffs.size - 2, -1, -1):
            out = t @ out + sym.coeffs[k] * np.eye(t.shape[0])
        return out
    if isinstance(sym, BlaschkeProduct):
        return blaschke_apply(sym, t)
    num, den = sym
    for r in np.atleast_1d(np.roots(den.coeffs[::-1])) if den.degree else []:
        if abs(r) <= 1.0 + 1e-9:
            raise DenominatorVanishes(f"denominator root {r} inside the closed disc")
    return _symbol_matrix(num, t) @ np.linalg.inv(_symbol_matrix(den, t))


def _symbol_disc_sup(sym, n=2048):
    ts = np.exp(2j * np.pi * np.arange(n) / n)
    if isinstance(sym, Poly1):
        return float(np.abs(sym(ts)).max())
    if isinstance(sym, BlaschkeProduct):
        return float(max(abs(sym(z)) for z in ts))
    num, den = sym
    dv = np.abs(den(ts))
    if dv.min() <= 1e-12:
        raise DenominatorVanishes("denominator vanishes on the circle")
    return float((np.abs(num(ts)) / dv).max())


def min_conditions(pair, variety, phi1, phi2, tol=DEFAULT,
                   boundary_n=512, disc_n=512):
    """Hypothesis checks for minimality of the variety closure as a spectral set.

    Entry 1: the spectrum of T1 is inside the disc with margin; entry 2: both
    symbols have disc sup-norm 1 and the product attains norm 1 on the pair.
    The minimality verdict is conditional on the distinguished certificate.
    """
    if _symbol_is_constant(phi1) or _symbol_is_constant(phi2):
        raise ConstantSymbol("both symbols must be non-constant")
    entries = []

    rho = spectral_radius(pair.t1)
    if rho <= 1.0 - tol.margin_spec:
        st, margin = PASS, (1.0 - tol.margin_spec) - rho
    elif rho < 1.0:
        st, margin = INCONCLUSIVE, 1.0 - rho
    else:
        st, margin = FAIL, 1.0 - rho
    entries.append(CertEntry(
        name="spectrum-inside-disc",
        anchor="spectrum-of-t1-inside-open-disc",
        status=st,
        margin=float(margin),
        data={"spectral_radius": rho},
    ))

    sup1 = _symbol_disc_sup(phi1)
    sup2 = _symbol_disc_sup(phi2)
    attain = opnorm(_symbol_matrix(phi1, pair.t1) @ _symbol_matrix(phi2, pair.t2))
    defect = max(abs(sup1 - 1.0), abs(sup2 - 1.0), abs(attain - 1.0))
    entries.append(CertEntry(
        name="attainment",
        anchor="symbol-product-attains-norm-one",
        status=PASS if defect <= tol.tol_attain else FAIL,
        margin=float(tol.tol_attain - defect),
        data={"sup_phi1": sup1, "sup_phi2": sup2, "attained_norm": attain},
    ))

    dist = distinguished_certificate(variety.psi, boundary_n, disc_n,
                                     tol_unitary=tol.tol_unitary)
    entries.append(dist)

    hyp = [entries[0].status, entries[1].status, dist.status]
    if all(s == PASS for s in hyp):
        st = PASS
    elif FAIL in hyp:
        st = FAIL
    else:
        st = INCONCLUSIVE
    entries.append(CertEntry(
        name="minimality-certified",
        anchor="minimal-spectral-set-certified-conditionally",
        status=st,
        margin=float(min(e.margin for e in entries)),
        data={"note": "minimality is inferred from verified hypotheses, not computed"},
    ))
    return entries


def isometry_variant(pair, variety=None, tol=DEFAULT):
    """Minimality certificate when T2 is an isometry and ||T1|| = 1.

    Matrix isometries are unitary, so the pair is not pure; this certifies
    only the spectral-set minimality claim.
    """
    iso = opnorm(pair.t2.conj().T @ pair.t2 - np.eye(pair.n))
    norm1 = pair.norms[0]
    rho = spectral_radius(pair.t1)
    ok_iso = iso <= tol.tol_attain
    ok_norm = abs(norm1 - 1.0) <= tol.tol_attain
    ok_spec = rho <= 1.0 - tol.margin_spec
    margin = min(tol.tol_attain - iso, tol.tol_attain - abs(norm1 - 1.0),
                 (1.0 - tol.margin_spec) - rho)
    status = PASS if (ok_iso and ok_norm and ok_spec) else FAIL
    return CertEntry(
        name="isometry-commutant-minimality",
        anchor="norm-one-operator-commuting-with-isometry",
        status=status,
        margin=float(margin),
        data={
            "isometry_defect": iso,
            "norm_t1": norm1,
            "spectral_radius_t1": rho,
            "note": "matrix isometries are unitary; the pair is not pure and "
                    "the certificate covers the spectral-set claim only",
        },
    )


def williams_check(t, phi, tol=DEFAULT, boundary_n=2048):
    """Disc-case minimality hypotheses for a single contraction.

    Passes iff the spectrum is inside the disc with margin and ||phi(T)|| and
    the disc sup of |phi| both equal 1 within the attainment tolerance.
    """
    t = np.asarray(t, dtype=complex)
    if opnorm(t) > 1.0 + tol.tol_norm:
        raise ValueError("operator norm exceeds 1")
    if _symbol_is_constant(phi):
        raise ConstantSymbol("phi must be non-constant")
    rho = spectral_radius(t)
    sup = _symbol_disc_sup(phi, boundary_n)
    attained = opnorm(_symbol_matrix(phi, t))
    ok = (
        rho <= 1.0 - tol.margin_spec
        and abs(attained - 1.0) <= tol.tol_attain
        and abs(sup - 1.0) <= tol.tol_attain
    )
    margin = min(
        (1.0 - tol.margin_spec) - rho,
        tol.tol_attain - abs(attained - 1.0),
        tol.tol_attain - abs(sup - 1.0),
    )
    return CertEntry(
        name="disc-minimality",
        anchor="disc-is-minimal-spectral-set",
        status=PASS if ok else FAIL,
        margin=float(margin),
        data={"spectral_radius": rho, "attained_norm": attained, "disc_sup": sup},
    )
