"""Monte Carlo risk estimation: paired null/alternative trials, error-rate
aggregation with confidence half-widths, and resumable parameter sweeps.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .detectors import DegreeConfig, DetectorVerdict, ScanConfig, degree_test, scan_test
from .errors import InfeasibleConfigError, ParameterError
from .model import H0, H1, ModelParams, mix64, sample_instance
from .oracle import BudgetedOracle

SCAN = "scan"
DEGREE = "degree"

_HYP_TAG = {H0: 0xA0, H1: 0xA1}
_STRATEGY_TAG = 0x57


def derive_trial_seed(master_seed: int, tag: int, trial_index: int) -> int:
    """Deterministic, pairwise-distinct per-trial seeds from the master seed."""
    h = mix64(np.uint64(master_seed & 0xFFFFFFFFFFFFFFFF) ^ np.uint64(tag))
    return int(mix64(h ^ np.uint64(trial_index)))


@dataclass(frozen=True)
class TrialConfig:
    params: ModelParams
    detector: str  # "scan" | "degree"
    detector_cfg: ScanConfig | DegreeConfig
    budget: int
    trials: int
    master_seed: int
    label: str = ""

    def __post_init__(self):
        if self.detector not in (SCAN, DEGREE):
            raise ParameterError(f"unknown detector {self.detector!r}")
        if self.trials < 1:
            raise ParameterError("trials must be at least 1")
        if self.detector_cfg.budget() > self.budget:
            raise InfeasibleConfigError(
                f"detector needs {self.detector_cfg.budget()} queries, "
                f"budget is {self.budget}"
            )

    def echo(self) -> dict:
        d = {
            "params": self.params.descriptor(),
            "detector": self.detector,
            "budget": self.budget,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "label": self.label,
        }
        cfg = self.detector_cfg
        if isinstance(cfg, ScanConfig):
            d["detector_cfg"] = {
                "sample_size": cfg.sample_size, "epsilon": cfg.epsilon,
                "gamma": cfg.gamma, "threshold_mode": cfg.threshold_mode,
                "search_mode": cfg.search_mode,
            }
        else:
            d["detector_cfg"] = {
                "panel_size": cfg.panel_size, "probe_count": cfg.probe_count,
                "epsilon": cfg.epsilon, "log_base": cfg.log_base,
            }
        return d

    def config_id(self) -> str:
        return json.dumps(self.echo(), sort_keys=True)


@dataclass(frozen=True)
class RiskEstimate:
    type1_rate: float
    type2_rate: float
    risk: float
    half_width_95_type1: float
    half_width_95_type2: float
    trials: int
    config: dict = field(default_factory=dict)
    planted_hit_mean: float = math.nan
    planted_hit_max: int = 0
    error: str | None = None

    def to_json(self) -> dict:
        return {
            "type1_rate": self.type1_rate,
            "type2_rate": self.type2_rate,
            "risk": self.risk,
            "half_width_95_type1": self.half_width_95_type1,
            "half_width_95_type2": self.half_width_95_type2,
            "trials": self.trials,
            "planted_hit_mean": self.planted_hit_mean,
            "planted_hit_max": self.planted_hit_max,
            "config": dict(self.config),
            "error": self.error,
        }


def run_trial(cfg: TrialConfig, hypothesis: str,
              trial_index: int) -> tuple[DetectorVerdict, int | None]:
    """One trial: seeded instance, fresh oracle, detector verdict.

    The detector seed is shared between the two hypotheses of a trial index
    (paired trials), the instance seed is not.
    """
    instance_seed = derive_trial_seed(cfg.master_seed, _HYP_TAG[hypothesis], trial_index)
    strategy_seed = derive_trial_seed(cfg.master_seed, _STRATEGY_TAG, trial_index)
    instance = sample_instance(cfg.params, hypothesis, instance_seed)
    oracle = BudgetedOracle(instance, cfg.budget)
    try:
        if cfg.detector == SCAN:
            verdict = scan_test(oracle, cfg.params, cfg.detector_cfg, strategy_seed)
        else:
            verdict = degree_test(oracle, cfg.params, cfg.detector_cfg, strategy_seed)
    except Exception as exc:
        raise type(exc)(
            f"trial {trial_index} under {hypothesis}: {exc}"
        ) from exc
    hits = oracle.planted_query_count() if hypothesis == H1 else None
    return verdict, hits


def half_width_95(rate: float, trials: int) -> float:
    """Normal-approximation 95% half-width, floored at 1/(2*trials) near 0/1."""
    width = 1.96 * math.sqrt(rate * (1.0 - rate) / trials)
    return max(width, 1.0 / (2.0 * trials))


def estimate_risk(cfg: TrialConfig, threads: int = 1) -> RiskEstimate:
    if cfg.trials < 30:
        raise ParameterError("need at least 30 trials for the normal-approximation CI")

    def one(task):
        hypothesis, idx = task
        return hypothesis, run_trial(cfg, hypothesis, idx)

    tasks = [(h, i) for i in range(cfg.trials) for h in (H0, H1)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, tasks))
    else:
        results = [one(t) for t in tasks]
    false_alarms = sum(v.decision == 1 for h, (v, _) in results if h == H0)
    misses = sum(v.decision == 0 for h, (v, _) in results if h == H1)
    hits = [c for h, (_, c) in results if h == H1]
    type1 = false_alarms / cfg.trials
    type2 = misses / cfg.trials
    return RiskEstimate(
        type1_rate=type1, type2_rate=type2, risk=type1 + type2,
        half_width_95_type1=half_width_95(type1, cfg.trials),
        half_width_95_type2=half_width_95(type2, cfg.trials),
        trials=cfg.trials, config=cfg.echo(),
        planted_hit_mean=float(np.mean(hits)), planted_hit_max=int(max(hits)),
    )


SWEEP_CSV_FIELDS = [
    "label", "n", "k", "detector", "budget", "trials", "master_seed",
    "detector_cfg", "type1_rate", "type2_rate", "risk",
    "half_width_95_type1", "half_width_95_type2",
    "planted_hit_mean", "planted_hit_max", "error",
]


def estimate_to_row(est: RiskEstimate) -> dict:
    cfg = est.config
    return {
        "label": cfg.get("label", ""),
        "n": cfg["params"]["n"],
        "k": cfg["params"]["k"],
        "detector": cfg["detector"],
        "budget": cfg["budget"],
        "trials": est.trials,
        "master_seed": cfg["master_seed"],
        "detector_cfg": json.dumps(cfg["detector_cfg"], sort_keys=True),
        "type1_rate": repr(est.type1_rate),
        "type2_rate": repr(est.type2_rate),
        "risk": repr(est.risk),
        "half_width_95_type1": repr(est.half_width_95_type1),
        "half_width_95_type2": repr(est.half_width_95_type2),
        "planted_hit_mean": repr(est.planted_hit_mean),
        "planted_hit_max": est.planted_hit_max,
        "error": est.error or "",
    }


class SweepManifest:
    """Completed-config ledger that makes interrupted sweeps resumable."""

    def __init__(self, path: str | None):
        self.path = path
        self.done: set[str] = set()
        if path and os.path.exists(path):
            with open(path) as fh:
                self.done = set(json.load(fh).get("completed", []))

    def mark(self, config_id: str) -> None:
        self.done.add(config_id)
        if self.path:
            tmp = self.path + ".tmp"
            with open(tmp, "w") as fh:
                json.dump({"completed": sorted(self.done)}, fh)
            os.replace(tmp, self.path)


def sweep(configs, csv_path: str | None = None, manifest_path: str | None = None,
          threads: int = 1, progress=None):
    """Evaluate configs in order, yielding RiskEstimate records.

    Per-config failures become records with the `error` field set; the sweep
    never aborts.  Configs already in the manifest are skipped.
    """
    configs = list(configs)
    if not configs:
        raise ParameterError("empty sweep grid")
    manifest = SweepManifest(manifest_path)
    writer = None
    csv_fh = None
    if csv_path:
        exists = os.path.exists(csv_path) and os.path.getsize(csv_path) > 0
        csv_fh = open(csv_path, "a", newline="")
        writer = csv.DictWriter(csv_fh, fieldnames=SWEEP_CSV_FIELDS)
        if not exists:
            writer.writeheader()
            csv_fh.flush()
    try:
        for cfg in configs:
            cid = cfg.config_id()
            if cid in manifest.done:
                continue
            if progress:
                progress(cfg)
            try:
                est = estimate_risk(cfg, threads=threads)
            except Exception as exc:
                est = RiskEstimate(
                    type1_rate=math.nan, type2_rate=math.nan, risk=math.nan,
                    half_width_95_type1=math.nan, half_width_95_type2=math.nan,
                    trials=cfg.trials, config=cfg.echo(), error=str(exc),
                )
            if writer:
                writer.writerow(estimate_to_row(est))
                csv_fh.flush()
            manifest.mark(cid)
            yield est
    finally:
        if csv_fh:
            csv_fh.close()
