"""Compiled and pure kernel backends must agree everywhere."""

import numpy as np
import pytest

from acsmimo import kernels
from acsmimo.kernels import available_backends

BACKENDS = available_backends()


def cn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def test_active_backend_exposed():
    assert kernels.BACKEND in BACKENDS


@pytest.mark.parametrize("name", sorted(BACKENDS))
class TestOmpPerBackend:
    def test_exact_sparse_recovery(self, name):
        mod = BACKENDS[name]
        rng = np.random.default_rng(0)
        D = cn(rng, (40, 128))
        x0 = np.zeros(128, complex)
        idx = rng.choice(128, 8, replace=False)
        x0[idx] = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        x = mod.omp_solve(D, D @ x0, 8)
        assert np.linalg.norm(x - x0) < 1e-9 * np.linalg.norm(x0)

    def test_zero_measurement(self, name):
        mod = BACKENDS[name]
        rng = np.random.default_rng(1)
        assert np.all(mod.omp_solve(cn(rng, (8, 16)), np.zeros(8, complex), 4) == 0)

    def test_zero_sparsity(self, name):
        mod = BACKENDS[name]
        rng = np.random.default_rng(2)
        assert np.all(mod.omp_solve(cn(rng, (8, 16)), cn(rng, 8), 0) == 0)

    def test_early_stop_on_exact_fit(self, name):
        # fewer atoms than requested when the residual hits zero
        mod = BACKENDS[name]
        rng = np.random.default_rng(3)
        D = cn(rng, (12, 24))
        x0 = np.zeros(24, complex)
        x0[5] = 1.0
        x = mod.omp_solve(D, D @ x0, 6)
        assert np.count_nonzero(np.abs(x) > 1e-12) == 1

    def test_duplicate_columns_no_stall(self, name):
        mod = BACKENDS[name]
        rng = np.random.default_rng(4)
        base = cn(rng, (10, 5))
        D = np.concatenate([base, base], axis=1)  # exact duplicates
        y = base @ (rng.standard_normal(5) + 1j * rng.standard_normal(5))
        x = mod.omp_solve(D, y, 8)
        assert np.linalg.norm(D @ x - y) < 1e-8 * np.linalg.norm(y)


def test_omp_backends_agree():
    rng = np.random.default_rng(5)
    for _ in range(20):
        T = int(rng.integers(4, 40))
        M = int(rng.integers(T, 96))
        s = int(rng.integers(1, min(T, 12)))
        D = cn(rng, (T, M))
        y = cn(rng, T)
        outs = [BACKENDS[n].omp_solve(D, y, s) for n in sorted(BACKENDS)]
        for a, b in zip(outs, outs[1:]):
            assert np.allclose(a, b, atol=1e-8)


def test_admm_backends_agree():
    rng = np.random.default_rng(6)
    for _ in range(10):
        M = int(rng.integers(8, 64))
        L = int(rng.integers(1, 12))
        Y = cn(rng, (M, L)) * 3.0
        eps = float(rng.uniform(0.1, 1.5))
        tau = float(rng.uniform(0.05, 1.0))
        outs = {}
        for n in sorted(BACKENDS):
            X, it, conv, hist = BACKENDS[n].l21_ball_admm(Y, eps, tau, 500, 1e-9, 1e-6)
            outs[n] = (X, it, conv, hist)
        names = sorted(outs)
        for a, b in zip(names, names[1:]):
            Xa, ia, ca, ha = outs[a]
            Xb, ib, cb, hb = outs[b]
            assert ia == ib and ca == cb
            assert np.allclose(Xa, Xb, atol=1e-10)
            assert np.allclose(ha, hb, atol=1e-10)
