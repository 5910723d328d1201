"""Experiment orchestration: reproducibility, report schema, bookkeeping."""

import numpy as np
import pytest

from acsmimo import (
    ScenarioSpec,
    SystemConfig,
    desk_config,
    desk_spec,
    paper_spec,
    read_report,
    run_experiment,
    table1_config,
    write_report,
)
from acsmimo.harness import (
    BASELINE,
    CSV_COLUMNS,
    PROPOSED,
    ExperimentReport,
    ReportRow,
    derive_rng,
    make_geometry,
    run_seed,
    support_demo,
)


def tiny_setup(**spec_overrides):
    cfg = SystemConfig(M=32, K=3, N_c=64, L=6, T=4)
    base = dict(
        cluster_count=2,
        max_clusters_per_user=2,
        dl_snr_db=(5.0,),
        T_list=(4, 8),
        n_rate_trials=16,
        n_geometry_seeds=2,
        master_seed=99,
    )
    base.update(spec_overrides)
    return ScenarioSpec(**base), cfg


class TestRngDerivation:
    def test_deterministic(self):
        a = derive_rng(7, "stage", 1, 2).standard_normal(4)
        b = derive_rng(7, "stage", 1, 2).standard_normal(4)
        assert np.array_equal(a, b)

    def test_tag_separation(self):
        a = derive_rng(7, "stage", 1, 2).standard_normal(4)
        b = derive_rng(7, "stage", 1, 3).standard_normal(4)
        c = derive_rng(7, "other", 1, 2).standard_normal(4)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)


class TestScenario:
    def test_table1_defaults(self):
        cfg = table1_config()
        assert (cfg.M, cfg.K, cfg.L, cfg.N_c) == (128, 20, 10, 128)
        assert cfg.f_dl == pytest.approx(1.1 * cfg.f_ul)
        lam = cfg.c / cfg.f_ul
        assert cfg.d == pytest.approx(lam / (2 * np.sin(cfg.theta_max)))
        assert 2 * cfg.theta_max == pytest.approx(2 * np.pi / 3)

    def test_nominal_max_sparsity(self):
        assert paper_spec().s_max(table1_config()) == 39
        assert desk_spec().s_max(desk_config()) == 12

    def test_geometry_within_range(self):
        spec, cfg = tiny_setup()
        clusters, profiles = make_geometry(spec, cfg, seed=0)
        for lo, hi in clusters:
            assert -cfg.theta_max <= lo < hi <= cfg.theta_max
        assert len(profiles) == cfg.K
        for p in profiles:
            p.validate_range(cfg.theta_max)
            assert p.total_power == pytest.approx(1.0)

    def test_geometry_deterministic(self):
        spec, cfg = tiny_setup()
        c1, _ = make_geometry(spec, cfg, seed=3)
        c2, _ = make_geometry(spec, cfg, seed=3)
        assert c1 == c2

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            ScenarioSpec(n_rate_trials=0)
        with pytest.raises(ValueError):
            ScenarioSpec(cluster_count=0)


@pytest.fixture(scope="module")
def report():
    spec, cfg = tiny_setup()
    return run_experiment(spec, cfg), spec, cfg


class TestRunExperiment:
    def test_row_count_and_schema(self, report):
        rep, spec, cfg = report
        assert not rep.failures
        expected = 2 * len(spec.T_list) * len(spec.dl_snr_db) * spec.n_geometry_seeds
        assert len(rep.rows) == expected
        methods = {r.method for r in rep.rows}
        assert methods == {PROPOSED, BASELINE}

    def test_bound_sandwich_every_row(self, report):
        rep, _, _ = report
        for r in rep.rows:
            assert r.sum_lb <= r.sum_ub + 1e-12
            assert r.sum_lb >= 0.0

    def test_feedback_symbols_equal_pilot_dim(self, report):
        rep, _, _ = report
        for r in rep.rows:
            assert r.feedback_symbols == r.T

    def test_baseline_reports_full_beam_space(self, report):
        rep, _, cfg = report
        for r in rep.rows:
            if r.method == BASELINE:
                assert r.selected_beams == cfg.M
                assert r.served_users == cfg.K

    def test_timings_recorded(self, report):
        rep, _, _ = report
        assert rep.timings["ul_estimation"] > 0
        assert rep.timings["ilp"] >= 0

    def test_deterministic_rows(self, report):
        rep, spec, cfg = report
        rep2 = run_experiment(spec, cfg)
        assert [vars(r) | {"wall_time": 0} for r in rep.rows] == [
            vars(r) | {"wall_time": 0} for r in rep2.rows
        ]

    def test_thread_pool_matches_serial(self, report):
        rep, spec, cfg = report
        rep2 = run_experiment(spec, cfg, n_jobs=2)
        a = [(r.method, r.T, r.dl_snr, r.seed, r.sum_lb, r.sum_ub) for r in rep.rows]
        b = [(r.method, r.T, r.dl_snr, r.seed, r.sum_lb, r.sum_ub) for r in rep2.rows]
        assert a == b

    def test_prelog_zero_row(self):
        spec, cfg = tiny_setup(T_list=(64,), n_geometry_seeds=1, n_rate_trials=8)
        rep = run_experiment(spec, cfg)
        assert rep.rows
        for r in rep.rows:
            assert r.sum_lb == 0.0 and r.sum_ub == 0.0


class TestReportIo:
    def test_empty_report_header_only(self, tmp_path):
        p = tmp_path / "empty.csv"
        write_report(ExperimentReport(), p)
        text = p.read_text()
        assert text == ",".join(CSV_COLUMNS) + "\n"

    def test_single_row_two_lines(self, tmp_path):
        p = tmp_path / "one.csv"
        rep = ExperimentReport(rows=[ReportRow("proposed", 8, 10.0, 1.234567, 2.0, 3, 14, 8, 0)])
        write_report(rep, p)
        lines = p.read_text().splitlines()
        assert len(lines) == 2
        assert lines[1] == "proposed,8,10,1.23457,2,3,14,8,0"

    def test_round_trip(self, tmp_path):
        spec, cfg = tiny_setup(n_geometry_seeds=1)
        rep = run_experiment(spec, cfg)
        p = tmp_path / "rt.csv"
        write_report(rep, p)
        rows = read_report(p)
        assert len(rows) == len(rep.rows)
        for parsed, orig in zip(rows, rep.sorted_rows()):
            assert parsed["method"] == orig.method
            assert parsed["T"] == orig.T
            assert parsed["sum_lb"] == pytest.approx(orig.sum_lb, rel=1e-5)
            assert parsed["sum_ub"] == pytest.approx(orig.sum_ub, rel=1e-5)

    def test_byte_identical_reruns(self, tmp_path):
        spec, cfg = tiny_setup(n_geometry_seeds=1, n_rate_trials=8)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_report(run_experiment(spec, cfg), p1)
        write_report(run_experiment(spec, cfg), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_timing_column_optional(self, tmp_path):
        spec, cfg = tiny_setup(n_geometry_seeds=1, n_rate_trials=8, T_list=(4,))
        rep = run_experiment(spec, cfg)
        p = tmp_path / "t.csv"
        write_report(rep, p, include_timing=True)
        header = p.read_text().splitlines()[0]
        assert header.endswith(",wall_time")

    def test_write_failure_has_path_context(self, tmp_path):
        with pytest.raises(OSError, match="no/such"):
            write_report(ExperimentReport(), tmp_path / "no" / "such" / "x.csv")


class TestSupportDemo:
    def test_demo_contains_truth(self):
        cfg = SystemConfig(M=64, K=4, N_c=128, L=8, T=4)
        out = support_demo(cfg, desk_spec(master_seed=5), seed=1, user=2)
        assert out["contains_true_dl"]
        assert out["true_dl"].as_set() <= out["estimated_dl"].as_set()
