import csv
import json
import math

import pytest

from densequery.detectors import DegreeConfig, ScanConfig
from densequery.errors import InfeasibleConfigError, ParameterError
from densequery.harness import (
    DEGREE,
    H0,
    H1,
    SCAN,
    SWEEP_CSV_FIELDS,
    TrialConfig,
    derive_trial_seed,
    estimate_risk,
    run_trial,
    sweep,
)
from densequery.model import ModelParams


def scan_config(n=100, k=50, p=1.0, q=0.5, M=12, eps=0.2, trials=40, seed=7,
                budget=None, label=""):
    det = ScanConfig(sample_size=M, epsilon=eps)
    return TrialConfig(
        params=ModelParams.bernoulli(n, k, p, q), detector=SCAN,
        detector_cfg=det, budget=budget or det.budget(), trials=trials,
        master_seed=seed, label=label,
    )


class TestSeedDerivation:
    def test_reproducible(self):
        assert derive_trial_seed(7, 0xA0, 3) == derive_trial_seed(7, 0xA0, 3)

    def test_pairwise_distinct(self):
        seeds = {derive_trial_seed(7, tag, i)
                 for tag in (0xA0, 0xA1, 0x57) for i in range(2000)}
        assert len(seeds) == 3 * 2000

    def test_master_seed_changes_everything(self):
        a = [derive_trial_seed(1, 0xA0, i) for i in range(100)]
        b = [derive_trial_seed(2, 0xA0, i) for i in range(100)]
        assert not set(a) & set(b)


class TestRunTrial:
    def test_deterministic(self):
        cfg = scan_config()
        v1, h1 = run_trial(cfg, H1, 5)
        v2, h2 = run_trial(cfg, H1, 5)
        assert v1 == v2 and h1 == h2

    def test_h0_has_no_hit_count(self):
        verdict, hits = run_trial(scan_config(), H0, 0)
        assert hits is None
        assert verdict.decision in (0, 1)

    def test_noiseless_separation(self):
        # p=1, q=0: the scan statistic is exactly the captured-clique pair count;
        # eps=0.7 puts the derived subset size at 2, which a 16-vertex panel
        # over a half-planted graph captures with overwhelming probability
        cfg = scan_config(p=1.0, q=0.0, M=16, eps=0.7)
        for idx in range(10):
            v1, _ = run_trial(cfg, H1, idx)
            v0, _ = run_trial(cfg, H0, idx)
            assert v1.decision == 1
            assert v0.decision == 0

    def test_budget_below_pattern_is_rejected(self):
        det = ScanConfig(sample_size=12, epsilon=0.2)
        with pytest.raises(InfeasibleConfigError):
            TrialConfig(params=ModelParams.bernoulli(100, 50, 1.0, 0.5),
                        detector=SCAN, detector_cfg=det,
                        budget=det.budget() - 1, trials=40, master_seed=0)

    def test_error_annotated_with_trial_identity(self):
        # epsilon so large the derived subset collapses below 2 at runtime
        det = ScanConfig(sample_size=12, epsilon=0.99)
        cfg = TrialConfig(params=ModelParams.bernoulli(1000, 4, 1.0, 0.5),
                          detector=SCAN, detector_cfg=det,
                          budget=det.budget(), trials=40, master_seed=0)
        with pytest.raises(InfeasibleConfigError, match="trial 3 under H1"):
            run_trial(cfg, H1, 3)


class TestEstimateRisk:
    def test_risk_identity_and_ranges(self):
        est = estimate_risk(scan_config(trials=40))
        assert est.risk == est.type1_rate + est.type2_rate
        assert 0.0 <= est.type1_rate <= 1.0
        assert 0.0 <= est.type2_rate <= 1.0
        assert est.trials == 40

    def test_minimum_trials_enforced(self):
        with pytest.raises(ParameterError):
            estimate_risk(scan_config(trials=29))

    def test_half_width_floor(self):
        est = estimate_risk(scan_config(p=1.0, q=0.0, M=16, eps=0.7, trials=40))
        assert est.risk == 0.0
        assert est.half_width_95_type1 == 1.0 / 80.0
        assert est.half_width_95_type2 == 1.0 / 80.0

    def test_parallel_matches_serial(self):
        cfg = scan_config(trials=40)
        serial = estimate_risk(cfg, threads=1)
        parallel = estimate_risk(cfg, threads=4)
        assert serial == parallel

    def test_planted_hit_stats_recorded(self):
        est = estimate_risk(scan_config(trials=40))
        assert not math.isnan(est.planted_hit_mean)
        assert est.planted_hit_max >= est.planted_hit_mean

    def test_config_echo_includes_everything(self):
        est = estimate_risk(scan_config(trials=40, label="unit"))
        assert est.config["label"] == "unit"
        assert est.config["params"]["n"] == 100
        assert est.config["detector_cfg"]["sample_size"] == 12

    def test_degree_detector_path(self):
        det = DegreeConfig(panel_size=200, probe_count=60, epsilon=0.2)
        cfg = TrialConfig(params=ModelParams.bernoulli(200, 60, 0.9, 0.3),
                          detector=DEGREE, detector_cfg=det,
                          budget=det.budget(), trials=30, master_seed=1)
        est = estimate_risk(cfg)
        assert est.risk <= 0.5


class TestSweep:
    def test_single_config_matches_estimate_risk(self, tmp_path):
        cfg = scan_config(trials=30)
        records = list(sweep([cfg]))
        assert len(records) == 1
        assert records[0] == estimate_risk(cfg)

    def test_csv_schema_and_round_trip(self, tmp_path):
        path = tmp_path / "out.csv"
        cfg = scan_config(trials=30, label="row0")
        records = list(sweep([cfg], csv_path=str(path)))
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert list(rows[0].keys()) == SWEEP_CSV_FIELDS
        assert float(rows[0]["risk"]) == records[0].risk
        assert float(rows[0]["planted_hit_mean"]) == records[0].planted_hit_mean

    def test_resumption_skips_completed(self, tmp_path):
        csv_path = str(tmp_path / "out.csv")
        manifest = str(tmp_path / "manifest.json")
        configs = [scan_config(trials=30, M=m, label=f"M={m}") for m in (10, 12)]
        first = list(sweep(configs[:1], csv_path=csv_path, manifest_path=manifest))
        resumed = list(sweep(configs, csv_path=csv_path, manifest_path=manifest))
        assert len(first) == 1 and len(resumed) == 1
        assert resumed[0].config["label"] == "M=12"
        with open(csv_path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["label"] for r in rows] == ["M=10", "M=12"]
        done = json.load(open(manifest))["completed"]
        assert len(done) == 2

    def test_per_config_error_recorded_not_raised(self, tmp_path):
        bad = scan_config(n=1000, k=4, eps=0.9, trials=30)  # n0 collapses
        good = scan_config(trials=30)
        records = list(sweep([bad, good]))
        assert records[0].error is not None
        assert math.isnan(records[0].risk)
        assert records[1].error is None

    def test_empty_grid_rejected(self):
        with pytest.raises(ParameterError):
            list(sweep([]))
