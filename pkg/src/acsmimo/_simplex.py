"""Dense two-phase simplex for small LPs with box-bounded variables.

Solves   maximize c'x   subject to   A x <= b,   lb <= x <= ub

with finite bounds on every structural variable.  This is the relaxation
engine for the beam-selection branch-and-bound: problems have at most a few
hundred variables, so a dense tableau with explicit pivoting is both simple
and fast.  Bland's rule kicks in after a run of degenerate pivots to rule
out cycling.
"""

from dataclasses import dataclass

import numpy as np

_LOWER, _UPPER, _BASIC = 0, 1, 2


class SimplexError(RuntimeError):
    pass


@dataclass
class LpResult:
    x: np.ndarray
    objective: float
    status: str  # 'optimal' or 'infeasible'
    iterations: int


def solve_lp(c, A, b, lb, ub, tol=1e-9, max_iter=50000):
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    lb = np.asarray(lb, dtype=float)
    ub = np.asarray(ub, dtype=float)
    m, n = A.shape
    if np.any(lb > ub + tol):
        return LpResult(np.full(n, np.nan), -np.inf, "infeasible", 0)

    # columns: n structurals | m slacks | up to m artificials
    slack_resid = b - A @ lb
    art_rows = np.where(slack_resid < -tol)[0]
    n_art = art_rows.size
    nt = n + m + n_art

    T = np.zeros((m, nt))
    T[:, :n] = A
    T[:, n : n + m] = np.eye(m)
    for j, r in enumerate(art_rows):
        T[r, n + m + j] = -1.0

    low = np.concatenate([lb, np.zeros(m), np.zeros(n_art)])
    upp = np.concatenate([ub, np.full(m, np.inf), np.full(n_art, np.inf)])

    status = np.full(nt, _LOWER, dtype=np.int8)
    basis = np.empty(m, dtype=np.int64)
    for i in range(m):
        basis[i] = n + i  # slack basic by default
    for j, r in enumerate(art_rows):
        status[n + r] = _LOWER  # slack nonbasic at 0
        basis[r] = n + m + j
    status[basis] = _BASIC

    rhs = b.astype(float).copy()
    # normalize rows that host an artificial so the basic coefficient is +1
    for j, r in enumerate(art_rows):
        T[r] *= -1.0
        rhs[r] *= -1.0

    iters = 0
    if n_art:
        c1 = np.zeros(nt)
        c1[n + m :] = -1.0
        iters += _run(T, rhs, c1, low, upp, status, basis, tol, max_iter)
        x_all = _point(T, rhs, low, upp, status, basis)
        if float(c1 @ x_all) < -1e-7:
            return LpResult(np.full(n, np.nan), -np.inf, "infeasible", iters)
        # freeze artificials at zero for phase 2
        low[n + m :] = 0.0
        upp[n + m :] = 0.0

    c2 = np.zeros(nt)
    c2[:n] = c
    iters += _run(T, rhs, c2, low, upp, status, basis, tol, max_iter)
    x_all = _point(T, rhs, low, upp, status, basis)
    x = x_all[:n]

    scale = 1.0 + np.abs(b).max(initial=0.0)
    if np.any(A @ x > b + 1e-6 * scale) or np.any(x < lb - 1e-7) or np.any(x > ub + 1e-7):
        raise SimplexError("optimal point failed feasibility verification")
    return LpResult(x, float(c @ x), "optimal", iters)


def _point(T, rhs, low, upp, status, basis):
    """Current solution: nonbasics at their bound, basics from the tableau."""
    nt = T.shape[1]
    x = np.where(status == _UPPER, upp, low)
    x[basis] = 0.0
    xb = rhs - T @ x
    x[basis] = xb
    return x


def _run(T, rhs, c, low, upp, status, basis, tol, max_iter):
    m, nt = T.shape
    degen = 0
    last_obj = -np.inf
    for it in range(max_iter):
        x = _point(T, rhs, low, upp, status, basis)
        obj = float(c @ x)
        degen = degen + 1 if obj <= last_obj + tol else 0
        last_obj = obj
        bland = degen > 2 * (m + nt)

        d = c - T.T @ c[basis]  # reduced costs (basic entries ~ 0)
        at_low = status == _LOWER
        at_up = status == _UPPER
        fixed = upp - low <= tol
        can_enter = ((at_low & (d > tol)) | (at_up & (d < -tol))) & ~fixed
        cand = np.where(can_enter)[0]
        if cand.size == 0:
            return it
        if bland:
            e = int(cand[0])
        else:
            e = int(cand[np.argmax(np.abs(d[cand]))])
        sigma = 1.0 if status[e] == _LOWER else -1.0
        col = T[:, e]

        # ratio test: entering moves by t >= 0 in direction sigma
        t_best = upp[e] - low[e]  # bound flip distance
        leave = -1
        leave_to = _LOWER
        xb = x[basis]
        for i in range(m):
            ci = sigma * col[i]
            if ci > tol:
                room = xb[i] - low[basis[i]]
                t_i = room / ci
                dest = _LOWER
            elif ci < -tol:
                if not np.isfinite(upp[basis[i]]):
                    continue
                room = upp[basis[i]] - xb[i]
                t_i = room / (-ci)
                dest = _UPPER
            else:
                continue
            t_i = max(t_i, 0.0)
            if t_i < t_best - tol or (
                t_i < t_best + tol
                and leave >= 0
                and abs(col[i]) > abs(col[leave])
            ):
                t_best = t_i
                leave = i
                leave_to = dest
        if not np.isfinite(t_best):
            raise SimplexError("LP unbounded")

        if leave < 0:
            # bound flip, basis unchanged
            status[e] = _UPPER if status[e] == _LOWER else _LOWER
            continue

        piv = T[leave, e]
        if abs(piv) < 1e-11:
            raise SimplexError("numerically singular pivot")
        out = basis[leave]
        T[leave] /= piv
        rhs[leave] /= piv
        for i in range(m):
            if i != leave and T[i, e] != 0.0:
                f = T[i, e]
                T[i] -= f * T[leave]
                rhs[i] -= f * rhs[leave]
        basis[leave] = e
        status[e] = _BASIC
        status[out] = leave_to
    raise SimplexError("simplex iteration limit reached")
