"""Pure-numpy kernels: reference implementations of the hot inner loops."""

import numpy as np


def omp_solve(D, y, s, rel_tol=1e-12):
    """Orthogonal matching pursuit on a complex dictionary.

    Runs at most ``s`` greedy atom selections, each followed by a
    least-squares refit on the selected columns.  Selection normalizes the
    correlations by column norms.  Stops early when the residual drops below
    rel_tol * ||y|| or when no usable atom remains.

    Parameters
    ----------
    D : (T, M) complex ndarray
    y : (T,) complex ndarray
    s : int, number of atoms to select.

    Returns
    -------
    x : (M,) complex ndarray with at most s nonzero entries.
    """
    T, M = D.shape
    x = np.zeros(M, dtype=np.complex128)
    if s <= 0:
        return x
    ynorm = np.linalg.norm(y)
    if ynorm == 0.0:
        return x
    col_norms = np.linalg.norm(D, axis=0)
    usable = col_norms > 0
    r = y.astype(np.complex128, copy=True)
    picked = []
    for _ in range(min(s, T, int(usable.sum()))):
        if np.linalg.norm(r) <= rel_tol * ynorm:
            break
        score = np.abs(D.conj().T @ r)
        score[~usable] = -1.0
        score[picked] = -1.0
        j = int(np.argmax(score / np.maximum(col_norms, 1e-300)))
        if score[j] <= 0.0:
            break
        picked.append(j)
        sub = D[:, picked]
        coef, *_ = np.linalg.lstsq(sub, y, rcond=None)
        r = y - sub @ coef
    if picked:
        x[picked] = coef
    return x


def l21_ball_admm(Y, eps, tau, max_iter=2000, rel_tol=1e-6, primal_tol=0.0):
    """ADMM for min ||X||_{2,1} subject to ||X - Y||_F <= eps.

    Alternates row-wise shrinkage (proximal of the l2,1 norm with step tau)
    with projection onto the Frobenius ball around Y.  Convergence is
    declared when the relative objective change falls below rel_tol and the
    split residual ||X - Z||_F is at most primal_tol.

    Returns (X, iterations, converged, objective_history).
    """
    # start at the prox of Y with dual U = X - Y: for the boundary-exact tau
    # this is already the ADMM fixed point, so the objective never climbs
    rn0 = np.linalg.norm(Y, axis=1)
    X = Y * np.maximum(1.0 - tau / np.maximum(rn0, 1e-300), 0.0)[:, None]
    Z = X.copy()
    U = X - Y
    obj = float(np.linalg.norm(X, axis=1).sum())
    hist = [obj]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        V = Z - U
        rn = np.linalg.norm(V, axis=1)
        X = V * np.maximum(1.0 - tau / np.maximum(rn, 1e-300), 0.0)[:, None]
        W = X + U
        dev = float(np.linalg.norm(W - Y))
        if dev > eps:
            Z = Y + (W - Y) * (eps / dev)
        else:
            Z = W.copy()
        U += X - Z
        new_obj = float(np.linalg.norm(X, axis=1).sum())
        hist.append(new_obj)
        if (
            abs(new_obj - obj) <= rel_tol * max(obj, 1e-30)
            and float(np.linalg.norm(X - Z)) <= primal_tol
        ):
            converged = True
            obj = new_obj
            break
        obj = new_obj
    return X, it, converged, np.asarray(hist)
