"""MMV recovery, thresholding, and UL-to-DL support interpolation."""

import numpy as np
import pytest

from acsmimo import (
    MmvOptions,
    ScatteringProfile,
    UplinkSnapshotBlock,
    desk_config,
    dft_matrix,
    interpolate_scattering_support,
    map_to_dl_support,
    solve_mmv,
    table1_config,
    theoretical_support,
    threshold_support,
)
from acsmimo.channel import ChannelSampler, SupportSet, index_interval
from acsmimo.support import estimate_dl_support, merge_intervals


def oracle_shrinkage(Yt, eps):
    """Independent optimum of min ||X||_{2,1} s.t. ||X - Yt||_F <= eps.

    First-order conditions give a single shrinkage level tau with
    sum_i min(||Yt_i||, tau)^2 = eps^2; solved here by bisection on tau.
    """
    r = np.linalg.norm(Yt, axis=1)
    if np.linalg.norm(r) <= eps:
        return np.zeros_like(Yt)
    lo, hi = 0.0, float(r.max())
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float((np.minimum(r, mid) ** 2).sum()) > eps * eps:
            hi = mid
        else:
            lo = mid
    tau = 0.5 * (lo + hi)
    return Yt * np.maximum(1.0 - tau / np.maximum(r, 1e-300), 0.0)[:, None]


def random_block(rng, M=64, L=8, rows=6, sigma=0.05):
    F = dft_matrix(M)
    X0 = np.zeros((M, L), dtype=complex)
    idx = rng.choice(M, rows, replace=False)
    X0[idx] = (rng.standard_normal((rows, L)) + 1j * rng.standard_normal((rows, L))) / np.sqrt(2)
    noise = sigma * (rng.standard_normal((M, L)) + 1j * rng.standard_normal((M, L))) / np.sqrt(2)
    Y = F @ X0 + noise
    return UplinkSnapshotBlock(Y=Y, sigma=sigma), F, X0, idx


class TestSolveMmv:
    def test_zero_observations_give_zero_solution(self):
        M, L = 32, 4
        block = UplinkSnapshotBlock(Y=np.zeros((M, L), complex), sigma=0.1)
        sol = solve_mmv(block, dft_matrix(M))
        assert np.all(sol.X == 0)
        assert sol.row_norms.sum() == 0.0
        assert sol.converged

    def test_noiseless_single_row_recovery(self):
        M, L = 64, 6
        rng = np.random.default_rng(0)
        F = dft_matrix(M)
        X0 = np.zeros((M, L), dtype=complex)
        X0[17] = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        block = UplinkSnapshotBlock(Y=F @ X0, sigma=1e-8)
        sol = solve_mmv(block, F)
        assert sol.row_norms[17] >= 0.99 * sol.row_norms.sum()

    def test_feasibility_always_holds(self):
        rng = np.random.default_rng(1)
        for trial in range(8):
            block, F, _, _ = random_block(rng, sigma=float(rng.uniform(0.01, 0.5)))
            sol = solve_mmv(block, F)
            bound = np.sqrt(block.Y.size) * block.sigma
            assert np.linalg.norm(block.Y - F @ sol.X) <= 1.01 * bound
            assert sol.residual <= 1.01 * bound

    def test_matches_independent_oracle(self):
        rng = np.random.default_rng(2)
        for trial in range(6):
            block, F, _, _ = random_block(rng, sigma=float(rng.uniform(0.02, 0.3)))
            sol = solve_mmv(block, F)
            eps = np.sqrt(block.Y.size) * block.sigma
            ref = oracle_shrinkage(F.conj().T @ block.Y, eps)
            scale = max(np.linalg.norm(ref), 1e-12)
            assert np.linalg.norm(sol.X - ref) < 1e-3 * scale

    def test_generic_admm_step_converges_to_same_optimum(self):
        # a deliberately mismatched penalty still reaches the optimum
        rng = np.random.default_rng(3)
        block, F, _, _ = random_block(rng, sigma=0.1)
        eps = np.sqrt(block.Y.size) * block.sigma
        ref = oracle_shrinkage(F.conj().T @ block.Y, eps)
        sol = solve_mmv(block, F, MmvOptions(tau=0.01, max_iter=20000))
        assert np.linalg.norm(sol.X - ref) < 1e-2 * np.linalg.norm(ref)

    def test_objective_history_non_increasing(self):
        rng = np.random.default_rng(4)
        for trial in range(5):
            block, F, _, _ = random_block(rng, sigma=float(rng.uniform(0.02, 0.3)))
            sol = solve_mmv(block, F)
            h = sol.objective_history
            assert np.all(np.diff(h) <= 1e-9 * max(h[0], 1.0))

    def test_kkt_conditions_at_solution(self):
        # stationarity: all surviving rows are shrunk by one common level,
        # and every vanished row started below it
        rng = np.random.default_rng(5)
        block, F, _, _ = random_block(rng, sigma=0.1)
        sol = solve_mmv(block, F)
        Yt = F.conj().T @ block.Y
        r0 = np.linalg.norm(Yt, axis=1)
        shrink = r0 - sol.row_norms
        alive = sol.row_norms > 1e-8 * r0.max()
        taus = shrink[alive]
        assert taus.size > 0
        assert taus.max() - taus.min() < 1e-3 * r0.max()
        assert np.all(r0[~alive] <= taus.max() + 1e-3 * r0.max())

    def test_scaling_invariance(self):
        rng = np.random.default_rng(6)
        block, F, _, _ = random_block(rng, sigma=0.1)
        sol1 = solve_mmv(block, F)
        alpha = 7.5
        block2 = UplinkSnapshotBlock(Y=alpha * block.Y, sigma=alpha * block.sigma)
        sol2 = solve_mmv(block2, F)
        assert np.allclose(sol2.X, alpha * sol1.X, atol=1e-6 * np.linalg.norm(sol1.X))
        assert threshold_support(sol1) == threshold_support(sol2)


class TestThresholdSupport:
    def test_zero_epsilon_returns_everything(self):
        rng = np.random.default_rng(7)
        block, F, _, _ = random_block(rng)
        sol = solve_mmv(block, F)
        assert len(threshold_support(sol, 0.0)) == block.Y.shape[0]

    def test_epsilon_above_peak_returns_empty(self):
        rng = np.random.default_rng(8)
        block, F, _, _ = random_block(rng)
        sol = solve_mmv(block, F)
        assert len(threshold_support(sol, sol.row_norms.max() * 1.01)) == 0

    def test_adaptive_on_single_row(self):
        M, L = 64, 6
        rng = np.random.default_rng(9)
        F = dft_matrix(M)
        X0 = np.zeros((M, L), dtype=complex)
        X0[33] = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        sol = solve_mmv(UplinkSnapshotBlock(Y=F @ X0, sigma=1e-8), F)
        assert list(threshold_support(sol)) == [33]

    def test_monotone_in_epsilon(self):
        rng = np.random.default_rng(10)
        block, F, _, _ = random_block(rng)
        sol = solve_mmv(block, F)
        prev = None
        for eps in np.linspace(0, sol.row_norms.max() * 1.1, 13):
            cur = threshold_support(sol, float(eps)).as_set()
            if prev is not None:
                assert cur <= prev
            prev = cur


class TestInterpolation:
    def test_empty_support_gives_empty_union(self):
        cfg = desk_config()
        assert interpolate_scattering_support(cfg, SupportSet([], "ul")) == []

    def test_adjacent_indices_merge(self):
        cfg = desk_config()
        ivs = interpolate_scattering_support(cfg, SupportSet([20, 21], "ul"))
        assert len(ivs) == 1
        a = index_interval(cfg, 20, "ul")
        b = index_interval(cfg, 21, "ul")
        assert a[1] > b[0]  # the defining intervals overlap by construction
        assert ivs[0] == (a[0], b[1])

    def test_superset_of_true_support_under_perfect_thresholding(self):
        cfg = table1_config()
        w = 2 * cfg.theta_max / 10
        for center in (-0.8, -0.1, 0.52):
            prof = ScatteringProfile([(center, center + w, 1.0)])
            s_ul = theoretical_support(cfg, prof, "ul")
            x_hat = interpolate_scattering_support(cfg, s_ul)
            # one cluster: single merged interval covering it, with bounded excess
            assert len(x_hat) == 1
            lo, hi = x_hat[0]
            assert lo <= center and hi >= center + w
            iv_len = np.diff(index_interval(cfg, list(s_ul)[0], "ul"))[0]
            assert lo >= center - 2 * iv_len and hi <= center + w + 2 * iv_len

    def test_merge_intervals_helper(self):
        assert merge_intervals([(0, 1), (2, 3), (0.5, 2.2)]) == [(0, 3)]
        assert merge_intervals([]) == []


class TestDlMapping:
    def test_reciprocity_identity_when_carriers_match(self):
        # with matching carriers the DL mapping equals the UL support
        # regenerated from its own intervals (which dilates by the overlap
        # of neighboring index intervals, so it is not the raw input set)
        cfg = desk_config(f_dl=2.0e9)
        s_ul = SupportSet([10, 11, 12, 40], "ul")
        x_hat = interpolate_scattering_support(cfg, s_ul)
        s_dl = map_to_dl_support(cfg, x_hat)
        regen = set()
        for i in range(cfg.M):
            iv = index_interval(cfg, i, "ul")
            if iv and any(max(iv[0], lo) < min(iv[1], hi) for lo, hi in x_hat):
                regen.add(i)
        assert s_dl.as_set() == regen
        assert s_ul.as_set() <= regen

    def test_empty_union_maps_to_empty_set(self):
        cfg = desk_config()
        assert len(map_to_dl_support(cfg, [])) == 0

    def test_end_to_end_containment_sample(self):
        # light version of the acceptance criterion: 20 seeded geometries
        cfg = table1_config()
        w = 2 * cfg.theta_max / 10
        hits = 0
        for t in range(20):
            rng = np.random.default_rng(200 + t)
            c0 = float(rng.uniform(-cfg.theta_max, cfg.theta_max - w))
            prof = ScatteringProfile([(c0, c0 + w, 1.0)]).normalized()
            sampler = ChannelSampler(cfg, prof, "ul")
            sigma2 = 10 ** (-1.5)
            H = sampler.draw_spatial(rng, cfg.L)
            noise = np.sqrt(sigma2 / 2) * (
                rng.standard_normal((cfg.L, cfg.M)) + 1j * rng.standard_normal((cfg.L, cfg.M))
            )
            block = UplinkSnapshotBlock(Y=(H + noise).T, sigma=float(np.sqrt(sigma2)))
            s_dl, _, _ = estimate_dl_support(cfg, block, dft_matrix(cfg.M))
            hits += theoretical_support(cfg, prof, "dl").as_set() <= s_dl.as_set()
        assert hits >= 19
