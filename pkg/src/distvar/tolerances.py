"""Central tolerance table.

Every decision threshold used by the library lives here so that reports can
record the exact semantics under which they were produced.
"""

from dataclasses import dataclass, asdict, replace


@dataclass(frozen=True)
class Tolerances:
    # polynomial arithmetic
    tol_root: float = 1e-8          # residual bound for accepted roots
    tol_fit: float = 1e-10          # relative interpolation residual
    # inner functions
    tol_unitary: float = 1e-8       # boundary / block unitarity defect
    pure_margin: float = 1e-12      # interior spectral-radius gap for inner functions
    # pairs of matrices
    tol_commute: float = 1e-8       # commutator norm
    tol_norm: float = 1e-8          # contractivity slack on ||T||
    tol_rank: float = 1e-7          # relative numerical-rank threshold
    tol_eig: float = 1e-8           # eigenvector witness residual
    tol_ann: float = 1e-8           # annihilation norm for ideal membership
    tol_calc: float = 1e-10         # truncation target for analytic calculus
    # dilation machinery
    tol_trunc: float = 1e-10        # ||J*J - I|| after truncation
    tol_intertwine: float = 1e-7    # intertwining residuals
    kernel_rel: float = 1e-8        # relative SVD threshold for kernel cuts
    rank_guard: float = 10.0        # inconclusive band around rank thresholds
    # point-set semantics
    match_cap: float = 1e-6         # optimal-assignment distance cap for set equality
    cluster_warn: float = 1e-4      # closer clusters route to DegenerateCluster
    cluster_merge: float = 1e-7     # agglomerative merge radius for repeated points
    tol_zset: float = 1e-8          # vanishing threshold for zero-set membership
    # certificates
    tol_attain: float = 1e-6        # slack on the "= 1" attainment conditions
    margin_spec: float = 1e-2       # required spectral gap rho(T) <= 1 - margin

    def as_dict(self):
        return asdict(self)

    def override(self, **kwargs):
        return replace(self, **kwargs)


DEFAULT = Tolerances()
