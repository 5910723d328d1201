"""End-to-end experiment orchestration and report persistence.

One experiment sweeps the DL pilot dimension T and the DL SNR over a set of
random cluster geometries.  Per geometry seed the UL stage runs once (MMV
support estimation and DL support interpolation, as the supports depend only
on the slow geometry), the selection ILP runs once per T, and every (T, SNR)
cell evaluates both the proposed pipeline and the J-OMP baseline on the same
Monte-Carlo channel draws.  All randomness derives from the master seed
through tagged substreams, so a report is reproducible byte for byte.
"""

import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import ChannelSampler, ScatteringProfile, dft_matrix, theoretical_support
from .config import SystemConfig, desk_config, table1_config
from .precode import build_zf, gains_matrix, greedy_select, rate_bounds_from_gains
from .probe import generate_probing, jomp_estimate
from .sparsify import plan_for_supports
from .support import MmvOptions, UplinkSnapshotBlock, estimate_dl_support

PROPOSED = "proposed"
BASELINE = "jomp"

CSV_COLUMNS = (
    "method",
    "T",
    "dl_snr",
    "sum_lb",
    "sum_ub",
    "served_users",
    "selected_beams",
    "feedback_symbols",
    "seed",
)


def _tag_int(tag):
    return int.from_bytes(hashlib.sha256(repr(tag).encode()).digest()[:8], "little")


def derive_rng(master_seed, *tags):
    """Independent generator for (stage, user, trial, ...) tagged streams."""
    entropy = [int(master_seed)] + [_tag_int(t) for t in tags]
    return np.random.default_rng(np.random.SeedSequence(entropy))


@dataclass(frozen=True)
class ScenarioSpec:
    """Sweep definition on top of a SystemConfig.

    cluster_width=None selects 2*theta_max/10; T_list=None selects a sweep
    below and around the scenario's nominal maximum sparsity order.
    """

    cluster_count: int = 3
    cluster_width: float = None
    max_clusters_per_user: int = 3
    ul_snr_db: float = 15.0
    dl_snr_db: tuple = (0.0, 10.0)
    T_list: tuple = None
    n_rate_trials: int = 200
    n_geometry_seeds: int = 20
    master_seed: int = 12345
    jomp_joint_atoms: int = 0
    feedback_noise_var: float = 0.0
    canonical_ilp: bool = True

    def __post_init__(self):
        if self.n_rate_trials < 1 or self.n_geometry_seeds < 1:
            raise ValueError("trial counts must be >= 1")
        if self.cluster_count < 1:
            raise ValueError("cluster_count must be >= 1")

    def width(self, cfg):
        return self.cluster_width if self.cluster_width is not None else 2 * cfg.theta_max / 10

    def s_max(self, cfg):
        """Nominal maximum sparsity order: clusters x indices per cluster."""
        return self.cluster_count * int(round(cfg.M / 10))

    def pilot_dims(self, cfg):
        """Default sweep: below and around the nominal max sparsity order.

        Points under ~s/2 are omitted: there the beam budget forces plans
        with as many served users as probed beams and the zero-forcing
        stage degenerates for any estimator.
        """
        if self.T_list is not None:
            return tuple(int(t) for t in self.T_list)
        s = self.s_max(cfg)
        grid = sorted(
            {
                max(2, (2 * s) // 3),
                max(2, (5 * s) // 6),
                s,
                min(cfg.N_c, (4 * s) // 3),
                min(cfg.N_c, (5 * s) // 3),
            }
        )
        return tuple(grid)

    @property
    def ul_sigma2(self):
        return 10 ** (-self.ul_snr_db / 10.0)


def desk_spec(**overrides):
    base = dict(cluster_count=2, max_clusters_per_user=2, n_rate_trials=200, n_geometry_seeds=20)
    base.update(overrides)
    return ScenarioSpec(**base)


def paper_spec(**overrides):
    base = dict(cluster_count=3, max_clusters_per_user=3)
    base.update(overrides)
    return ScenarioSpec(**base)


@dataclass
class ReportRow:
    method: str
    T: int
    dl_snr: float
    sum_lb: float
    sum_ub: float
    served_users: int
    selected_beams: int
    feedback_symbols: int
    seed: int
    wall_time: float = 0.0  # not part of the deterministic CSV payload


@dataclass
class ExperimentReport:
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    master_seed: int = 0

    def sorted_rows(self):
        return sorted(self.rows, key=lambda r: (r.method, r.T, r.dl_snr, r.seed))


def unambiguous_range(cfg):
    """Largest angle whose DL spatial frequency stays in the principal period.

    The spacing d matches the UL carrier, so UL angles map one-to-one onto
    beamspace.  The higher DL carrier pushes |sin(theta)| beyond the period
    for extreme angles, where cluster energy would alias to opposite beam
    indices that no support-set definition accounts for.  Scenario clusters
    stay inside the common unambiguous range.
    """
    s = np.sin(cfg.theta_max) * cfg.f_ul / max(cfg.f_ul, cfg.f_dl)
    return float(np.arcsin(s))


def make_geometry(spec, cfg, seed):
    """Cluster intervals and per-user scattering profiles for one seed.

    Clusters are drawn uniformly inside the DL-unambiguous angular range and
    redrawn until pairwise disjoint, so the scenario really contains
    cluster_count separate multipath clusters and the nominal maximum
    sparsity order describes every user.
    """
    rng = derive_rng(spec.master_seed, "geometry", seed)
    w = spec.width(cfg)
    theta_a = unambiguous_range(cfg)
    lo = -theta_a
    hi = theta_a - w
    if hi <= lo:
        raise ValueError("cluster width exceeds the usable angular range")
    for _ in range(1000):
        starts = np.sort(rng.uniform(lo, hi, size=spec.cluster_count))
        if np.all(np.diff(starts) > w) or spec.cluster_count == 1:
            break
    else:
        raise RuntimeError("could not place disjoint clusters")
    clusters = [(float(c), float(c) + w) for c in starts]
    n_max = min(spec.max_clusters_per_user, spec.cluster_count)
    profiles = []
    for k in range(cfg.K):
        n_k = int(rng.integers(1, n_max + 1))
        pick = rng.choice(spec.cluster_count, size=n_k, replace=False)
        ivs = [(clusters[i][0], clusters[i][1], 1.0) for i in sorted(pick)]
        profiles.append(ScatteringProfile(ivs).normalized(1.0))
    return clusters, profiles


def run_uplink_stage(spec, cfg, seed, profiles):
    """Per-user UL pilots, MMV recovery, and DL support interpolation."""
    F = dft_matrix(cfg.M)
    sigma2 = spec.ul_sigma2
    est_supports = []
    for k, prof in enumerate(profiles):
        sampler = ChannelSampler(cfg, prof, "ul")
        ch_rng = derive_rng(spec.master_seed, "ul-chan", seed, k)
        nz_rng = derive_rng(spec.master_seed, "ul-noise", seed, k)
        H = sampler.draw_spatial(ch_rng, cfg.L)  # (L, M), fresh channel per pilot
        noise = np.sqrt(sigma2 / 2.0) * (
            nz_rng.standard_normal((cfg.L, cfg.M))
            + 1j * nz_rng.standard_normal((cfg.L, cfg.M))
        )
        block = UplinkSnapshotBlock(Y=(H + noise).T, sigma=float(np.sqrt(sigma2)))
        s_dl, _, _ = estimate_dl_support(cfg, block, F, MmvOptions())
        est_supports.append(s_dl)
    return est_supports


def _cn(rng, shape, var=1.0):
    return np.sqrt(var / 2.0) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _proposed_cell(spec, cfg, seed, plan, H_dl, T, snr_db):
    """Probe, estimate, precode, and bound the rates for one proposed cell."""
    P = cfg.M * 10 ** (snr_db / 10.0)
    planned = [int(k) for k in plan.served_users]
    nB = plan.selected_beams.size
    n_trials = spec.n_rate_trials
    psi = generate_probing(T, nB, P, derive_rng(spec.master_seed, "probe", seed, T, snr_db))
    PsiB = psi.Psi @ plan.B  # (T, M)

    # per-user LS operators on the known effective-support columns
    pinvs = {}
    for k in planned:
        cols = plan.omega[k] - 1
        pinvs[k] = (cols, np.linalg.pinv(psi.Psi[:, cols]))

    est_spatial = {}
    for k in planned:
        nz = derive_rng(spec.master_seed, "probe-noise", seed, T, snr_db, k)
        Y = H_dl[k] @ PsiB.T + _cn(nz, (n_trials, T))
        if spec.feedback_noise_var > 0:
            fb = derive_rng(spec.master_seed, "feedback-noise", seed, T, snr_db, k)
            Y = Y + _cn(fb, Y.shape, spec.feedback_noise_var)
        cols, pinv = pinvs[k]
        coef = Y @ pinv.T  # (n_trials, |omega|)
        h_eff = np.zeros((n_trials, nB), dtype=complex)
        h_eff[:, cols] = coef
        est_spatial[k] = h_eff @ plan.B.conj()  # B^H h_eff per trial

    # the rate statistics need one served set across trials; keep the greedy
    # maximal independent subset found on the first trial's estimates
    est0 = np.column_stack([est_spatial[k][0] for k in planned])
    served = [planned[i] for i in greedy_select(est0)]
    Kp = len(served)

    gains = np.zeros((n_trials, Kp, Kp), dtype=complex)
    cfg_cell = replace(cfg, T=T, P=P)
    for t in range(n_trials):
        est = np.column_stack([est_spatial[k][t] for k in served])
        keep = greedy_select(est)
        prec = build_zf(est[:, keep], np.asarray(served)[keep])
        Htrue = np.column_stack([H_dl[k][t] for k in served])
        gm = gains_matrix(Htrue, prec, P)
        if len(keep) == Kp:
            gains[t] = gm
        else:
            for j, uid in enumerate(prec.served):
                gains[t, :, served.index(int(uid))] = gm[:, j]
    bounds = rate_bounds_from_gains(gains, T, cfg.N_c)
    return bounds, Kp, nB, cfg_cell


def _baseline_cell(spec, cfg, seed, H_dl, sparsity, T, snr_db):
    """Gaussian sensing, J-OMP estimation, greedy ZF for one baseline cell."""
    P = cfg.M * 10 ** (snr_db / 10.0)
    K = cfg.K
    n_trials = spec.n_rate_trials
    phi = generate_probing(T, cfg.M, P, derive_rng(spec.master_seed, "jomp-sensing", seed, T, snr_db))
    Phi = phi.Psi
    noise = [
        _cn(derive_rng(spec.master_seed, "jomp-noise", seed, T, snr_db, k), (n_trials, T))
        for k in range(K)
    ]
    meas = [H_dl[k] @ Phi.T + noise[k] for k in range(K)]

    gains = np.zeros((n_trials, K, K), dtype=complex)
    for t in range(n_trials):
        y_all = np.stack([meas[k][t] for k in range(K)])
        est, _ = jomp_estimate(y_all, Phi, sparsity, joint_atoms=spec.jomp_joint_atoms)
        est = est.T  # (M, K)
        keep = greedy_select(est)
        prec = build_zf(est[:, keep], np.asarray(keep))
        Htrue = np.column_stack([H_dl[k][t] for k in range(K)])
        gm = gains_matrix(Htrue, prec, P)
        for j, uid in enumerate(prec.served):
            gains[t, :, int(uid)] = gm[:, j]
    bounds = rate_bounds_from_gains(gains, T, cfg.N_c)
    return bounds, K, cfg.M


def run_seed(spec, cfg, seed):
    """All sweep cells for one geometry seed.  Returns (rows, failures, timings)."""
    rows, failures = [], []
    timings = {"ul_estimation": 0.0, "ilp": 0.0, "proposed_cells": 0.0, "jomp_cells": 0.0}
    t0 = time.perf_counter()
    clusters, profiles = make_geometry(spec, cfg, seed)
    try:
        est_supports = run_uplink_stage(spec, cfg, seed, profiles)
    except Exception as exc:  # pragma: no cover - defensive
        failures.append((seed, None, None, "ul", repr(exc)))
        return rows, failures, timings
    timings["ul_estimation"] += time.perf_counter() - t0

    sparsity = [len(theoretical_support(cfg, p, "dl")) for p in profiles]
    H_dl = {}
    for k, prof in enumerate(profiles):
        rng = derive_rng(spec.master_seed, "dl-chan", seed, k)
        H_dl[k] = ChannelSampler(cfg, prof, "dl").draw_spatial(rng, spec.n_rate_trials)

    for T in spec.pilot_dims(cfg):
        t0 = time.perf_counter()
        try:
            _, sol, plan = plan_for_supports(est_supports, T, cfg.M, canonical=spec.canonical_ilp)
        except Exception as exc:
            for snr in spec.dl_snr_db:
                failures.append((seed, T, snr, PROPOSED, repr(exc)))
            plan = None
        timings["ilp"] += time.perf_counter() - t0

        for snr in spec.dl_snr_db:
            if plan is not None:
                t0 = time.perf_counter()
                try:
                    bounds, Kp, nB, _ = _proposed_cell(spec, cfg, seed, plan, H_dl, T, snr)
                    rows.append(
                        ReportRow(PROPOSED, T, snr, bounds.sum_lower, bounds.sum_upper,
                                  Kp, nB, T, seed, time.perf_counter() - t0)
                    )
                except Exception as exc:
                    failures.append((seed, T, snr, PROPOSED, repr(exc)))
                timings["proposed_cells"] += time.perf_counter() - t0

            t0 = time.perf_counter()
            try:
                bounds, K, nbeams = _baseline_cell(spec, cfg, seed, H_dl, sparsity, T, snr)
                rows.append(
                    ReportRow(BASELINE, T, snr, bounds.sum_lower, bounds.sum_upper,
                              K, nbeams, T, seed, time.perf_counter() - t0)
                )
            except Exception as exc:
                failures.append((seed, T, snr, BASELINE, repr(exc)))
            timings["jomp_cells"] += time.perf_counter() - t0
    return rows, failures, timings


def run_experiment(spec, cfg, n_jobs=1):
    """Full sweep over geometry seeds; deterministic given (spec, cfg)."""
    report = ExperimentReport(master_seed=spec.master_seed)
    seeds = list(range(spec.n_geometry_seeds))
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(lambda s: run_seed(spec, cfg, s), seeds))
    else:
        results = [run_seed(spec, cfg, s) for s in seeds]
    for rows, failures, timings in results:
        report.rows.extend(rows)
        report.failures.extend(failures)
        for k, v in timings.items():
            report.timings[k] = report.timings.get(k, 0.0) + v
    report.rows = report.sorted_rows()
    return report


# ---------------------------------------------------------------------------
# persistence


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def write_report(report, path, include_timing=False):
    """Fixed-header CSV, one row per sweep cell per method.

    Timing stays out of the default payload so identical (config, seed)
    runs produce byte-identical files; pass include_timing=True to append a
    wall_time column for profiling.
    """
    cols = CSV_COLUMNS + (("wall_time",) if include_timing else ())
    try:
        with open(path, "w", newline="") as fh:
            fh.write(",".join(cols) + "\n")
            for r in report.sorted_rows():
                vals = [getattr(r, c) for c in cols]
                fh.write(",".join(_fmt(v) for v in vals) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write report to {path!r}: {exc}") from exc


def read_report(path):
    """Parse a report CSV back into a list of dict rows."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{path!r} is empty")
        cols = header.split(",")
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            vals = line.split(",")
            row = {}
            for c, v in zip(cols, vals):
                if c in ("method",):
                    row[c] = v
                elif c in ("T", "served_users", "selected_beams", "feedback_symbols", "seed"):
                    row[c] = int(v)
                else:
                    row[c] = float(v)
            rows.append(row)
    return rows


def support_demo(cfg, spec=None, seed=0, user=0):
    """One-user UL to DL support walk-through (CLI `support` subcommand)."""
    spec = spec or desk_spec()
    clusters, profiles = make_geometry(spec, cfg, seed)
    prof = profiles[user % len(profiles)]
    est = run_uplink_stage(spec, cfg, seed, [prof])[0]
    true_ul = theoretical_support(cfg, prof, "ul")
    true_dl = theoretical_support(cfg, prof, "dl")
    return {
        "clusters": clusters,
        "profile": prof,
        "true_ul": true_ul,
        "true_dl": true_dl,
        "estimated_dl": est,
        "contains_true_dl": true_dl.as_set() <= est.as_set(),
        "excess": sorted(est.as_set() - true_dl.as_set()),
    }
