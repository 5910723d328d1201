# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython kernels: OMP inner loop and the l2,1-ball ADMM iteration.

Semantics match kernels._pure; see that module for the reference
implementations and docstrings.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

ctypedef double complex cplx


def omp_solve(D, y, s, double rel_tol=1e-12):
    """Orthogonal matching pursuit; see kernels._pure.omp_solve."""
    cdef cnp.ndarray[cplx, ndim=2] Dm = np.ascontiguousarray(D, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] yv = np.ascontiguousarray(y, dtype=np.complex128)
    cdef Py_ssize_t T = Dm.shape[0]
    cdef Py_ssize_t M = Dm.shape[1]
    cdef cnp.ndarray[cplx, ndim=1] x = np.zeros(M, dtype=np.complex128)
    cdef Py_ssize_t smax = s if s < T else T
    if smax <= 0:
        return x

    cdef double ynorm2 = 0.0
    cdef Py_ssize_t i, j, t, it, a, b
    for i in range(T):
        ynorm2 += yv[i].real * yv[i].real + yv[i].imag * yv[i].imag
    if ynorm2 == 0.0:
        return x

    cdef cnp.ndarray[double, ndim=1] cn2 = np.zeros(M)
    cdef double acc
    for j in range(M):
        acc = 0.0
        for i in range(T):
            acc += Dm[i, j].real * Dm[i, j].real + Dm[i, j].imag * Dm[i, j].imag
        cn2[j] = acc

    cdef cnp.ndarray[cplx, ndim=1] r = yv.copy()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] picked = np.empty(smax, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] used = np.zeros(M, dtype=np.uint8)
    # Cholesky factor (lower) of the Gram of the picked columns, plus D_S^H y
    cdef cnp.ndarray[cplx, ndim=2] Lc = np.zeros((smax, smax), dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] rhs = np.zeros(smax, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] w = np.zeros(smax, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] fs = np.zeros(smax, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=1] coef = np.zeros(smax, dtype=np.complex128)

    cdef Py_ssize_t n_picked = 0
    cdef double rnorm2, best, score, cr, ci, diag2
    cdef Py_ssize_t best_j
    cdef cplx z, g

    for it in range(smax):
        rnorm2 = 0.0
        for i in range(T):
            rnorm2 += r[i].real * r[i].real + r[i].imag * r[i].imag
        if rnorm2 <= rel_tol * rel_tol * ynorm2:
            break
        # argmax |D^H r|^2 / ||d||^2 over unused columns
        best = -1.0
        best_j = -1
        for j in range(M):
            if used[j] or cn2[j] <= 0.0:
                continue
            cr = 0.0
            ci = 0.0
            for i in range(T):
                # conj(D[i,j]) * r[i]
                cr += Dm[i, j].real * r[i].real + Dm[i, j].imag * r[i].imag
                ci += Dm[i, j].real * r[i].imag - Dm[i, j].imag * r[i].real
            score = (cr * cr + ci * ci) / cn2[j]
            if score > best:
                best = score
                best_j = j
        if best_j < 0 or best <= 0.0:
            break

        # grow the Cholesky factor with column best_j
        for t in range(n_picked):
            z = 0
            for i in range(T):
                z += Dm[i, picked[t]].conjugate() * Dm[i, best_j]
            w[t] = z
        # forward solve L fs = w
        for a in range(n_picked):
            z = w[a]
            for b in range(a):
                z -= Lc[a, b] * fs[b]
            fs[a] = z / Lc[a, a]
        diag2 = cn2[best_j]
        for a in range(n_picked):
            diag2 -= fs[a].real * fs[a].real + fs[a].imag * fs[a].imag
        if diag2 <= 1e-12 * cn2[best_j]:
            break  # numerically dependent column: no progress possible
        for a in range(n_picked):
            Lc[n_picked, a] = fs[a].conjugate()
        Lc[n_picked, n_picked] = sqrt(diag2)
        z = 0
        for i in range(T):
            z += Dm[i, best_j].conjugate() * yv[i]
        rhs[n_picked] = z
        picked[n_picked] = best_j
        used[best_j] = 1
        n_picked += 1

        # solve (L L^H) coef = rhs
        for a in range(n_picked):
            z = rhs[a]
            for b in range(a):
                z -= Lc[a, b] * fs[b]
            fs[a] = z / Lc[a, a]
        for a in range(n_picked - 1, -1, -1):
            z = fs[a]
            for b in range(a + 1, n_picked):
                z -= Lc[b, a].conjugate() * coef[b]
            coef[a] = z / Lc[a, a]

        # fresh residual r = y - D_S coef
        for i in range(T):
            z = yv[i]
            for t in range(n_picked):
                z -= Dm[i, picked[t]] * coef[t]
            r[i] = z

    for t in range(n_picked):
        x[picked[t]] = coef[t]
    return x


def l21_ball_admm(Y, double eps, double tau, int max_iter=2000,
                  double rel_tol=1e-6, double primal_tol=0.0):
    """ADMM for min ||X||_{2,1} s.t. ||X - Y||_F <= eps; see kernels._pure."""
    cdef cnp.ndarray[cplx, ndim=2] Ym = np.ascontiguousarray(Y, dtype=np.complex128)
    cdef Py_ssize_t M = Ym.shape[0]
    cdef Py_ssize_t L = Ym.shape[1]
    cdef cnp.ndarray[cplx, ndim=2] X = Ym.copy()
    cdef cnp.ndarray[cplx, ndim=2] Z = np.empty((M, L), dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=2] U = np.empty((M, L), dtype=np.complex128)
    cdef cnp.ndarray[double, ndim=1] hist = np.zeros(max_iter + 1)

    cdef Py_ssize_t i, j, it
    cdef double obj = 0.0, new_obj, rn, scale, dev2, split2
    cdef cplx v, w

    # start at the prox of Y with dual U = X - Y (fixed point for the
    # boundary-exact tau), matching kernels._pure
    for i in range(M):
        rn = 0.0
        for j in range(L):
            rn += Ym[i, j].real * Ym[i, j].real + Ym[i, j].imag * Ym[i, j].imag
        rn = sqrt(rn)
        scale = 0.0 if rn <= tau else 1.0 - tau / rn
        for j in range(L):
            X[i, j] = Ym[i, j] * scale
            Z[i, j] = X[i, j]
            U[i, j] = X[i, j] - Ym[i, j]
        obj += rn * scale
    hist[0] = obj

    cdef bint converged = False
    cdef Py_ssize_t n_it = 0
    for it in range(1, max_iter + 1):
        n_it = it
        new_obj = 0.0
        # X = rowshrink(Z - U, tau)
        for i in range(M):
            rn = 0.0
            for j in range(L):
                v = Z[i, j] - U[i, j]
                X[i, j] = v
                rn += v.real * v.real + v.imag * v.imag
            rn = sqrt(rn)
            scale = 0.0 if rn <= tau else 1.0 - tau / rn
            for j in range(L):
                X[i, j] = X[i, j] * scale
            new_obj += rn * scale if scale > 0.0 else 0.0
        # Z = project(X + U) onto ball(Y, eps); U += X - Z
        dev2 = 0.0
        for i in range(M):
            for j in range(L):
                w = X[i, j] + U[i, j] - Ym[i, j]
                Z[i, j] = w  # reuse as W - Y
                dev2 += w.real * w.real + w.imag * w.imag
        scale = 1.0 if dev2 <= eps * eps else eps / sqrt(dev2)
        split2 = 0.0
        for i in range(M):
            for j in range(L):
                v = Ym[i, j] + Z[i, j] * scale  # projected Z
                w = X[i, j] - v
                U[i, j] = U[i, j] + w
                Z[i, j] = v
                split2 += w.real * w.real + w.imag * w.imag
        hist[it] = new_obj
        if abs(new_obj - obj) <= rel_tol * max(obj, 1e-30) and sqrt(split2) <= primal_tol:
            converged = True
            obj = new_obj
            break
        obj = new_obj
    return np.asarray(X), n_it, converged, np.asarray(hist[: n_it + 1]).copy()
