"""Uplink support estimation and UL-to-DL support interpolation.

The BS stacks L noisy uplink pilot snapshots into Y and recovers a row-sparse
coefficient matrix X by l2,1-norm minimization over the Fourier dictionary
(an MMV problem).  Thresholding the row norms yields the UL support set; the
union of the corresponding angular intervals approximates the scattering
support, which maps to a DL support set through the DL carrier.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .channel import SupportSet, index_interval


@dataclass(frozen=True)
class UplinkSnapshotBlock:
    """L received UL pilot snapshots, one per column of Y (M x L)."""

    Y: np.ndarray
    sigma: float

    def __post_init__(self):
        if self.Y.ndim != 2 or self.Y.shape[1] < 1:
            raise ValueError("Y must be M x L with L >= 1")
        if not np.all(np.isfinite(self.Y)):
            raise ValueError("Y has non-finite entries")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    @property
    def L(self):
        return self.Y.shape[1]


@dataclass
class MmvSolution:
    """Row-sparse MMV solution with its diagnostics."""

    X: np.ndarray
    row_norms: np.ndarray
    iterations: int
    residual: float
    converged: bool
    objective_history: np.ndarray


@dataclass(frozen=True)
class MmvOptions:
    max_iter: int = 2000
    rel_tol: float = 1e-6
    feas_tol: float = 0.01
    # ADMM shrinkage step; None selects it from the ball radius (see _select_tau)
    tau: float = None


def _select_tau(row_norms, eps):
    """Shrinkage level whose l2,1 prox lands on the Frobenius-ball boundary.

    The constrained problem min ||X||_{2,1} s.t. ||X - Y||_F <= eps has the
    row-shrinkage form X_i = Y_i * max(1 - tau/||Y_i||, 0) where tau solves
    sum_i min(||Y_i||, tau)^2 = eps^2.  Using that tau as the ADMM step makes
    the first iterate optimal; the remaining iterations only polish.
    """
    lo, hi = 0.0, float(row_norms.max())
    target = eps * eps
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if float((np.minimum(row_norms, mid) ** 2).sum()) > target:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def solve_mmv(block, F, opts=None):
    """Constrained l2,1 recovery of the Fourier-domain snapshot matrix.

    Approximately solves

        min ||X||_{2,1}  subject to  ||Y - F X||_F <= sqrt(M L) sigma

    by ADMM with row-wise shrinkage and Frobenius-ball projection.  F unitary
    turns the constraint into a ball around F^H Y, so every step is closed
    form.  If the iteration cap is hit the best feasible iterate is returned
    with ``converged = False``.
    """
    opts = opts or MmvOptions()
    Y = block.Y
    M, L = Y.shape
    if F.shape != (M, M):
        raise ValueError(f"F must be {M}x{M}, got {F.shape}")
    eps = np.sqrt(M * L) * block.sigma
    Yt = F.conj().T @ Y

    norm_Yt = float(np.linalg.norm(Yt))
    if norm_Yt <= eps:
        # zero is feasible, and it minimizes the norm
        X = np.zeros_like(Yt)
        return MmvSolution(
            X=X,
            row_norms=np.zeros(M),
            iterations=0,
            residual=norm_Yt,
            converged=True,
            objective_history=np.zeros(1),
        )

    rn0 = np.linalg.norm(Yt, axis=1)
    tau = opts.tau if opts.tau is not None else _select_tau(rn0, eps)
    X, iters, converged, hist = kernels.l21_ball_admm(
        Yt,
        eps,
        tau,
        max_iter=opts.max_iter,
        rel_tol=opts.rel_tol,
        primal_tol=0.5 * opts.feas_tol * eps,
    )
    residual = float(np.linalg.norm(Yt - X))
    if residual > eps * (1.0 + opts.feas_tol):
        # cap hit far from feasibility: fall back to the ball projection
        X = Yt + (X - Yt) * (eps / residual)
        residual = eps
        converged = False
    return MmvSolution(
        X=X,
        row_norms=np.linalg.norm(X, axis=1),
        iterations=iters,
        residual=residual,
        converged=converged,
        objective_history=hist,
    )


# Relative row-norm threshold used when no explicit epsilon is given.  The
# Dirichlet side lobes of a cluster keep 15-20 % of the peak row norm alive
# just outside the true support, so the cut sits above them.
DEFAULT_THRESHOLD_FRACTION = 0.2


def threshold_support(sol, epsilon=None):
    """UL support set: rows of the MMV solution with norm >= epsilon.

    ``epsilon=None`` selects DEFAULT_THRESHOLD_FRACTION * max row norm, which
    is invariant to a joint rescaling of Y and sigma.  An explicit epsilon of
    0 returns all indices.
    """
    rn = sol.row_norms
    if epsilon is None:
        peak = float(rn.max()) if rn.size else 0.0
        if peak == 0.0:
            return SupportSet([], "ul")
        epsilon = DEFAULT_THRESHOLD_FRACTION * peak
    elif epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    return SupportSet(np.where(rn >= epsilon)[0], "ul", M=rn.size)


def merge_intervals(intervals, gap=1e-12):
    """Union of (lo, hi) pairs as maximal disjoint intervals."""
    ivs = sorted(intervals)
    out = []
    for lo, hi in ivs:
        if out and lo <= out[-1][1] + gap:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def interpolate_scattering_support(cfg, s_ul):
    """Angular support estimate from a UL support set.

    Returns the union of the per-index angular intervals, merged into
    maximal disjoint (lo, hi) pairs.  Empty input gives an empty union; the
    corresponding user cannot be probed downstream.
    """
    if s_ul.band != "ul":
        raise ValueError("expected a UL support set")
    ivs = []
    for i in s_ul:
        iv = index_interval(cfg, i, "ul")
        if iv is not None:
            ivs.append(iv)
    return merge_intervals(ivs)


def map_to_dl_support(cfg, x_hat):
    """DL support set: indices whose DL interval meets the angular estimate."""
    hits = []
    for i in range(cfg.M):
        iv = index_interval(cfg, i, "dl")
        if iv is None:
            continue
        if any(max(iv[0], lo) < min(iv[1], hi) for lo, hi in x_hat):
            hits.append(i)
    return SupportSet(hits, "dl", M=cfg.M)


def estimate_dl_support(cfg, block, F, opts=None, epsilon=None):
    """Full UL-to-DL chain for one user: MMV, threshold, interpolate, map."""
    sol = solve_mmv(block, F, opts)
    s_ul = threshold_support(sol, epsilon)
    x_hat = interpolate_scattering_support(cfg, s_ul)
    return map_to_dl_support(cfg, x_hat), s_ul, sol
