"""Downlink probing, analog feedback, and effective-channel estimation.

The BS broadcasts T random Gaussian pilot vectors through the
pre-beamforming matrix; each user feeds its T received symbols back
unchanged (analog feedback, modeled noiseless by default).  Knowing which
positions of the effective channel can be nonzero, the BS recovers them by
least squares on the corresponding probing columns.  A per-user orthogonal
matching pursuit over random Gaussian measurements serves as the
compressed-sensing baseline.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .channel import dft_matrix


@dataclass(frozen=True)
class ProbingMatrix:
    """T x n_beams complex probing matrix with exact per-row power P."""

    Psi: np.ndarray
    row_power: float

    @property
    def T(self):
        return self.Psi.shape[0]


@dataclass
class EffectiveChannelEstimate:
    h_eff_hat: np.ndarray
    omega: np.ndarray  # 1-based positions within the selected beam set
    user: int
    rank_deficient: bool = False


def _cn(rng, shape, var=1.0):
    return np.sqrt(var / 2.0) * (
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    )


def generate_probing(T, beam_count, P, rng):
    """i.i.d. complex Gaussian rows rescaled to squared norm exactly P."""
    if T < 1 or beam_count < 1:
        raise ValueError("T and beam_count must be >= 1")
    if P <= 0:
        raise ValueError("P must be positive")
    Psi = _cn(rng, (T, beam_count))
    norms = np.linalg.norm(Psi, axis=1, keepdims=True)
    Psi = Psi * (np.sqrt(P) / norms)
    return ProbingMatrix(Psi=Psi, row_power=float(P))


def receive_pilots(Psi, B, h_dl_spatial, noise_var=1.0, rng=None):
    """User-side pilot observation y = Psi B h + n.

    noise_var=0 is the noiseless test hook; otherwise the noise is
    circularly symmetric complex Gaussian with the given variance per entry.
    """
    if isinstance(Psi, ProbingMatrix):
        Psi = Psi.Psi
    y = Psi @ (B @ h_dl_spatial)
    if noise_var > 0:
        if rng is None:
            raise ValueError("rng required when noise_var > 0")
        y = y + _cn(rng, y.shape, noise_var)
    return y


def estimate_effective(y, Psi, omega, user=0):
    """Support-aware least squares on the probing columns in omega.

    omega holds 1-based positions within the selected beam set; entries of
    the estimate outside omega are exactly zero.  |omega| must not exceed T.
    A rank-deficient submatrix yields the minimum-norm solution, flagged.
    """
    if isinstance(Psi, ProbingMatrix):
        Psi = Psi.Psi
    T, n_beams = Psi.shape
    omega = np.asarray(omega, dtype=np.int64)
    h = np.zeros(n_beams, dtype=np.complex128)
    if omega.size == 0:
        return EffectiveChannelEstimate(h, omega, user)
    if omega.size > T:
        raise ValueError(f"|omega|={omega.size} exceeds pilot dimension T={T}")
    if omega.min() < 1 or omega.max() > n_beams:
        raise ValueError("omega positions must lie in 1..n_beams")
    cols = omega - 1
    sub = Psi[:, cols]
    coef, _, rank, _ = np.linalg.lstsq(sub, y, rcond=None)
    h[cols] = coef
    return EffectiveChannelEstimate(h, omega, user, rank_deficient=rank < omega.size)


def jomp_estimate(y_all, Phi, sparsity, joint_atoms=0):
    """Per-user OMP channel reconstruction from Gaussian measurements.

    y_all: list/array of K measurement vectors of length T, y = Phi h + n.
    Phi: T x M sensing matrix.  sparsity: per-user iteration counts (the
    true sparsity orders are fed to the baseline); values above T are
    clipped to T and flagged in the returned info dict.

    The optional joint stage pre-selects ``joint_atoms`` dictionary atoms by
    correlation summed across users before the per-user iterations; it is
    off by default since users need not share multipath clusters.

    Returns (estimates, info): estimates is a (K, M) array of spatial-domain
    channel estimates F x_hat, info holds the clipped-sparsity flags.
    """
    y_all = np.asarray(y_all)
    K = y_all.shape[0]
    T, M = Phi.shape
    F = dft_matrix(M)
    D = Phi @ F  # dictionary for the Fourier-domain coefficients
    sparsity = np.broadcast_to(np.asarray(sparsity, dtype=np.int64), (K,))
    clipped = sparsity > T
    info = {"clipped": clipped.copy()}

    shared = []
    if joint_atoms > 0:
        score = np.abs(D.conj().T @ y_all.T).sum(axis=1)
        shared = list(np.argsort(-score, kind="stable")[:joint_atoms])

    est = np.zeros((K, M), dtype=np.complex128)
    for k in range(K):
        s_k = int(min(sparsity[k], T))
        if s_k == 0 and not shared:
            continue
        if shared:
            x = _omp_with_seed(D, y_all[k], s_k, shared)
        else:
            x = kernels.omp_solve(D, y_all[k], s_k)
        est[k] = F @ x
    return est, info


def _omp_with_seed(D, y, s, seed_atoms):
    """OMP that starts from a fixed atom set (joint pre-selection stage)."""
    T, M = D.shape
    picked = list(dict.fromkeys(seed_atoms))[: min(s, T)]
    x = np.zeros(M, dtype=np.complex128)
    if picked:
        sub = D[:, picked]
        coef, *_ = np.linalg.lstsq(sub, y, rcond=None)
        r = y - sub @ coef
    else:
        coef, r = None, y.copy()
    while len(picked) < min(s, T):
        if np.linalg.norm(r) <= 1e-12 * max(np.linalg.norm(y), 1e-300):
            break
        score = np.abs(D.conj().T @ r)
        score[picked] = -1.0
        j = int(np.argmax(score))
        if score[j] <= 0:
            break
        picked.append(j)
        sub = D[:, picked]
        coef, *_ = np.linalg.lstsq(sub, y, rcond=None)
        r = y - sub @ coef
    if picked:
        x[picked] = coef
    return x
