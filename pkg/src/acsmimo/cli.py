"""Command-line interface: run sweeps, demo support estimation, solve ILPs."""

import argparse
import sys
import time

import numpy as np

from . import harness
from .config import desk_config, table1_config
from .sparsify import build_graph, exhaustive_search, load_instance, solve_ilp
from .channel import (
    ChannelSampler,
    ScatteringProfile,
    SupportSet,
    to_fourier,
    variance_vector,
)


def load_config_file(path):
    """key = value lines; '#' starts a comment; values parse as python literals."""
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw.rstrip()}")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key] = _parse_value(val)
    return out


def _parse_value(text):
    if "," in text:
        return tuple(_parse_value(v.strip()) for v in text.split(",") if v.strip())
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    return text


_CFG_KEYS = ("M", "K", "T", "N_c", "L", "f_ul", "f_dl", "theta_max", "grid_size")
_SPEC_KEYS = (
    "cluster_count",
    "cluster_width",
    "max_clusters_per_user",
    "ul_snr_db",
    "dl_snr_db",
    "T_list",
    "n_rate_trials",
    "n_geometry_seeds",
    "master_seed",
    "jomp_joint_atoms",
    "feedback_noise_var",
    "canonical_ilp",
)


def _build_spec_cfg(args):
    options = {}
    if args.config:
        options.update(load_config_file(args.config))
    if args.seed is not None:
        options["master_seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        options["n_rate_trials"] = args.trials
    if getattr(args, "geometry_seeds", None) is not None:
        options["n_geometry_seeds"] = args.geometry_seeds
    if getattr(args, "T_list", None):
        options["T_list"] = tuple(int(v) for v in args.T_list.split(","))
    if getattr(args, "snr_list", None):
        options["dl_snr_db"] = tuple(float(v) for v in args.snr_list.split(","))

    cfg_over = {k: options.pop(k) for k in list(options) if k in _CFG_KEYS}
    spec_over = {k: options.pop(k) for k in list(options) if k in _SPEC_KEYS}
    if options:
        raise ValueError(f"unknown config keys: {sorted(options)}")
    if isinstance(spec_over.get("dl_snr_db"), (int, float)):
        spec_over["dl_snr_db"] = (spec_over["dl_snr_db"],)
    if isinstance(spec_over.get("T_list"), (int, float)):
        spec_over["T_list"] = (int(spec_over["T_list"]),)

    if args.profile == "paper":
        cfg = table1_config(**cfg_over)
        spec = harness.paper_spec(**spec_over)
    else:
        cfg = desk_config(**cfg_over)
        spec = harness.desk_spec(**spec_over)
    return spec, cfg


def cmd_run(args):
    spec, cfg = _build_spec_cfg(args)
    t0 = time.perf_counter()
    report = harness.run_experiment(spec, cfg, n_jobs=args.threads)
    elapsed = time.perf_counter() - t0
    harness.write_report(report, args.out, include_timing=args.with_timing)
    print(f"wrote {len(report.rows)} rows to {args.out} in {elapsed:.1f}s")
    for stage, secs in sorted(report.timings.items()):
        print(f"  {stage:16s} {secs:8.2f}s")
    if args.timings:
        with open(args.timings, "w") as fh:
            for stage, secs in sorted(report.timings.items()):
                fh.write(f"{stage},{secs:.3f}\n")
    if report.failures:
        for f in report.failures:
            print(f"FAILED cell {f}", file=sys.stderr)
        return 1
    return 0


def cmd_support(args):
    spec, cfg = _build_spec_cfg(args)
    out = harness.support_demo(cfg, spec, seed=args.seed or 0, user=args.user)
    print(f"clusters: {[(round(a, 3), round(b, 3)) for a, b in out['clusters']]}")
    print(f"user profile intervals: {[(round(l, 3), round(h, 3)) for l, h in out['profile'].support]}")
    print(f"true UL support  ({len(out['true_ul'])}): {list(out['true_ul'])}")
    print(f"true DL support  ({len(out['true_dl'])}): {list(out['true_dl'])}")
    print(f"estimated DL     ({len(out['estimated_dl'])}): {list(out['estimated_dl'])}")
    print(f"contains true DL support: {out['contains_true_dl']}, excess: {out['excess']}")
    return 0 if out["contains_true_dl"] else 1


def cmd_ilp(args):
    graph, T, M = load_instance(args.instance)
    sol = solve_ilp(graph, T, M)
    print(f"objective {sol.objective} ({'optimal' if sol.optimal else 'heuristic'}, {sol.nodes} nodes)")
    print(f"beams ({int(sol.z.sum())}): {graph.beams[sol.z == 1].tolist()}")
    print(f"users ({int(sol.u.sum())}): {np.where(sol.u == 1)[0].tolist()}")
    if args.brute_check:
        ref = exhaustive_search(graph, T)
        status = "OK" if ref == sol.objective else f"MISMATCH (exhaustive {ref})"
        print(f"exhaustive cross-check: {status}")
        return 0 if ref == sol.objective else 1
    return 0 if sol.optimal else 1


def cmd_oracle(args):
    rng = np.random.default_rng(args.seed or 0)
    failures = 0

    print(f"ILP cross-check on {args.ilp} random instances:")
    for i in range(args.ilp):
        nA = int(rng.integers(3, 11))
        K = int(rng.integers(1, min(9, 21 - nA)))
        W = (rng.random((nA, K)) < 0.45).astype(np.int8)
        W[rng.integers(0, nA), rng.integers(0, K)] = 1
        keep = W.sum(axis=1) > 0
        W = W[keep]
        if W.shape[0] == 0:
            continue
        graph = build_graph(
            [SupportSet(np.where(W[:, k] == 1)[0], "dl") for k in range(K)]
        )
        T = int(rng.integers(1, 5))
        sol = solve_ilp(graph, T, M=64)
        ref = exhaustive_search(graph, T)
        ok = sol.objective == ref and sol.optimal
        failures += not ok
        if not ok or args.verbose:
            print(f"  [{i}] bnb={sol.objective} exhaustive={ref} {'ok' if ok else 'FAIL'}")
    print(f"  {args.ilp - failures}/{args.ilp} matched")

    print("variance quadrature vs Monte Carlo:")
    cfg = desk_config()
    for i in range(args.variance):
        w = float(rng.uniform(0.05, 0.3))
        lo = float(rng.uniform(-cfg.theta_max, cfg.theta_max - w))
        prof = ScatteringProfile([(lo, lo + w, 1.0)]).normalized()
        v = variance_vector(cfg, prof, "ul")
        sampler = ChannelSampler(cfg, prof, "ul")
        H = sampler.draw_spatial(np.random.default_rng(1000 + i), 8000)
        emp = (np.abs(to_fourier(H)) ** 2).mean(axis=0)
        sig = v > 0.01 * v.max()
        rel = float((np.abs(emp[sig] - v[sig]) / v[sig]).max())
        ok = rel < 0.08
        failures += not ok
        print(f"  [{i}] max rel err {rel:.3f} {'ok' if ok else 'FAIL'}")

    return 1 if failures else 0


def main(argv=None):
    ap = argparse.ArgumentParser(prog="acsmimo", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value configuration file")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument(
        "--profile", choices=("desk", "paper"), default="desk", help="scale profile"
    )

    p = sub.add_parser("run", parents=[common], help="full (T, SNR) sweep to CSV")
    p.add_argument("--out", default="report.csv")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--trials", type=int, help="rate trials per cell")
    p.add_argument("--geometry-seeds", dest="geometry_seeds", type=int)
    p.add_argument("--T-list", dest="T_list", help="comma-separated pilot dims")
    p.add_argument("--snr-list", dest="snr_list", help="comma-separated DL SNRs (dB)")
    p.add_argument("--with-timing", action="store_true", help="append wall_time column")
    p.add_argument("--timings", help="write per-stage timing sidecar file")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("support", parents=[common], help="one-user UL to DL support demo")
    p.add_argument("--user", type=int, default=0)
    p.set_defaults(fn=cmd_support)

    p = sub.add_parser("ilp", help="solve a dumped beam-selection instance")
    p.add_argument("instance")
    p.add_argument("--brute-check", action="store_true")
    p.set_defaults(fn=cmd_ilp)

    p = sub.add_parser("oracle", help="brute-force cross checks")
    p.add_argument("--ilp", type=int, default=20, help="number of random ILP instances")
    p.add_argument("--variance", type=int, default=3, help="number of variance checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(fn=cmd_oracle)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
