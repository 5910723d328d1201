"""Greedy zero-forcing precoding and Monte-Carlo rate bounds."""

from dataclasses import dataclass

import numpy as np


@dataclass
class ZfPrecoder:
    """Unit-norm precoding columns for the served users."""

    columns: np.ndarray  # M x K'
    served: np.ndarray  # user ids, length K'

    @property
    def n_served(self):
        return int(self.served.size)


@dataclass
class RateBounds:
    """Per-user and sum rate bounds in bits per channel use."""

    lower: np.ndarray
    upper: np.ndarray
    sum_lower: float
    sum_upper: float
    prelog: float
    n_trials: int


def greedy_select(est_channels, tol=1e-6):
    """Maximal linearly independent subset of estimated channel vectors.

    est_channels: (M, K) matrix of column vectors.  Vectors are considered
    in order of decreasing norm; one joins the subset when its residual
    after projecting onto the span of the already-selected vectors exceeds
    tol times its own norm.  Returns sorted user indices.
    """
    est = np.asarray(est_channels)
    M, K = est.shape
    norms = np.linalg.norm(est, axis=0)
    order = np.argsort(-norms, kind="stable")
    basis = []
    chosen = []
    for k in order:
        v = est[:, k]
        nv = norms[k]
        if nv <= 0:
            continue
        r = v.copy()
        for q in basis:
            r = r - (q.conj() @ r) * q
        if np.linalg.norm(r) > tol * nv:
            basis.append(r / np.linalg.norm(r))
            chosen.append(int(k))
    return sorted(chosen)


def build_zf(est_matrix, user_ids=None, tol=1e-6):
    """Zero-forcing precoder from the estimated channel matrix (M x K').

    Columns are pinv(H^H) columns, normalized to unit norm.  Numerically
    rank-deficient inputs drop the dependent columns (re-running the greedy
    selection) before inverting.
    """
    H = np.asarray(est_matrix)
    M, Kp = H.shape
    if user_ids is None:
        user_ids = np.arange(Kp)
    user_ids = np.asarray(user_ids)
    if Kp == 0:
        return ZfPrecoder(np.zeros((M, 0), dtype=complex), user_ids)
    keep = greedy_select(H, tol)
    if len(keep) < Kp:
        return build_zf(H[:, keep], user_ids[keep], tol)
    Q = np.linalg.pinv(H.conj().T)  # M x K'
    cols = Q / np.linalg.norm(Q, axis=0, keepdims=True)
    return ZfPrecoder(columns=cols, served=user_ids)


def gains_matrix(true_channels, precoder, P):
    """g[k, j] = sqrt(P/K') h_k^H t_j for the served users.

    true_channels: (M, K') spatial channels of the served users, columns
    aligned with precoder.columns.
    """
    Kp = precoder.n_served
    if Kp == 0:
        return np.zeros((0, 0), dtype=complex)
    return np.sqrt(P / Kp) * (true_channels.conj().T @ precoder.columns)


def rate_bounds_from_gains(gains, T, N_c):
    """Sample-statistics rate bounds from per-trial gain matrices.

    gains: (n_trials, K', K') array of g_{k,k'} draws.  The upper bound is
    the prelog-weighted mean of log2(1 + |g_kk|^2 / (1 + interference)); the
    lower bound subtracts the channel-hardening penalty built from the
    per-pair gain variances.  Negative lower bounds clamp to zero.
    """
    if T > N_c:
        raise ValueError(f"T={T} exceeds N_c={N_c}")
    gains = np.asarray(gains)
    n, Kp, _ = gains.shape
    prelog = 1.0 - T / N_c
    if Kp == 0:
        return RateBounds(np.zeros(0), np.zeros(0), 0.0, 0.0, prelog, n)
    p2 = np.abs(gains) ** 2
    sig = p2[:, np.arange(Kp), np.arange(Kp)]
    interf = p2.sum(axis=2) - sig
    mean_log = np.log2(1.0 + sig / (1.0 + interf)).mean(axis=0)
    upper = prelog * mean_log
    ddof = 1 if n > 1 else 0
    var = gains.var(axis=0, ddof=ddof)  # complex variance E|g - Eg|^2
    penalty = (prelog / N_c) * np.log2(1.0 + N_c * var).sum(axis=1)
    lower = np.maximum(upper - penalty, 0.0)
    return RateBounds(
        lower=lower,
        upper=upper,
        sum_lower=float(lower.sum()),
        sum_upper=float(upper.sum()),
        prelog=prelog,
        n_trials=n,
    )


def evaluate_rates(cfg, true_channels_per_trial, precoder_per_trial, n_trials=None):
    """Rate bounds from per-trial true channels and precoders.

    true_channels_per_trial: sequence of (M, K') arrays (served users'
    spatial channels); precoder_per_trial: matching ZfPrecoder sequence.
    Users absent from a trial's precoder contribute zero gain columns, so
    the bookkeeping stays aligned when a degenerate trial drops a user.
    """
    rows = []
    served_ref = None
    for H, prec in zip(true_channels_per_trial, precoder_per_trial):
        if served_ref is None:
            served_ref = [int(v) for v in prec.served]
        gm = gains_matrix(H, prec, cfg.P)  # rows follow H's columns (ref order)
        trial_served = [int(v) for v in prec.served]
        if trial_served == served_ref:
            g = gm
        else:
            # a trial dropped users: their precoding columns contribute zero
            g = np.zeros((len(served_ref), len(served_ref)), dtype=complex)
            for j, uid in enumerate(trial_served):
                g[:, served_ref.index(uid)] = gm[:, j]
        rows.append(g)
        if n_trials is not None and len(rows) >= n_trials:
            break
    if not rows:
        raise ValueError("no trials provided")
    return rate_bounds_from_gains(np.asarray(rows), cfg.T, cfg.N_c)
