"""Command-line surface: simulate, sweep, bounds, phase.

Exit codes: 0 success, 1 runtime failure, 2 usage or config validation failure.
Config precedence for simulate: flags override file values override defaults.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys

from .bounds import PhasePoint, classify_phase, budget_bounds
from .divergences import BernPair
from .errors import ParameterError
from .harness import DEGREE, SCAN, TrialConfig, estimate_risk, sweep
from .detectors import CHERNOFF_GAMMA, DegreeConfig, ScanConfig
from .model import ModelParams

OUTPUT_DIR_ENV = "DENSEQUERY_OUTPUT_DIR"

_BASES = {"natural": math.e, "2": 2.0}


def _output_path(path: str) -> str:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _fmt(x: float) -> str:
    return f"{x:.6g}"


class ConfigError(ParameterError):
    pass


def _check_keys(record: dict, allowed: set[str], where: str) -> None:
    unknown = set(record) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


def _require(record: dict, key: str, where: str):
    if key not in record:
        raise ConfigError(f"{where}: missing required field {key!r}")
    return record[key]


_EXPERIMENT_KEYS = {
    "schema_version", "model", "detector", "detector_cfg", "budget",
    "trials", "master_seed", "output", "log_base",
}
_MODEL_KEYS = {"n", "k", "p", "q"}
_SCAN_CFG_KEYS = {"M", "eps", "gamma", "threshold_mode", "search_mode"}
_DEGREE_CFG_KEYS = {"n_prime", "M", "eps"}
_OUTPUT_KEYS = {"csv", "manifest", "jsonl"}


def _axes(record: dict) -> list[tuple[str, list]]:
    return [(key, val if isinstance(val, list) else [val])
            for key, val in sorted(record.items())]


def load_experiment(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    _check_keys(raw, _EXPERIMENT_KEYS, path)
    if _require(raw, "schema_version", path) != 1:
        raise ConfigError(f"{path}: unsupported schema_version {raw['schema_version']}")
    model = _require(raw, "model", path)
    _check_keys(model, _MODEL_KEYS, f"{path}:model")
    detector = _require(raw, "detector", path)
    if detector not in (SCAN, DEGREE):
        raise ConfigError(f"{path}: detector must be 'scan' or 'degree'")
    det_cfg = _require(raw, "detector_cfg", path)
    allowed = _SCAN_CFG_KEYS if detector == SCAN else _DEGREE_CFG_KEYS
    _check_keys(det_cfg, allowed, f"{path}:detector_cfg")
    _check_keys(raw.get("output", {}), _OUTPUT_KEYS, f"{path}:output")
    if _require(raw, "trials", path) < 1:
        raise ConfigError(f"{path}: field 'trials' must be positive")
    _require(raw, "master_seed", path)
    return raw


def experiment_grid(raw: dict) -> list[TrialConfig]:
    """Expand list-valued model/detector_cfg/budget fields into a config grid."""
    base = _BASES[str(raw.get("log_base", "natural"))]
    model_axes = _axes(raw["model"])
    cfg_axes = _axes(raw["detector_cfg"])
    budgets = raw.get("budget")
    budget_axis = budgets if isinstance(budgets, list) else [budgets]
    grid = []
    for model_vals in itertools.product(*(v for _, v in model_axes)):
        model = dict(zip((k for k, _ in model_axes), model_vals))
        for cfg_vals in itertools.product(*(v for _, v in cfg_axes)):
            cfg = dict(zip((k for k, _ in cfg_axes), cfg_vals))
            for budget in budget_axis:
                grid.append(_build_config(
                    model, raw["detector"], cfg, budget,
                    raw["trials"], raw["master_seed"], base,
                ))
    return grid


def _build_config(model: dict, detector: str, det_cfg: dict, budget,
                  trials: int, master_seed: int, base: float) -> TrialConfig:
    params = ModelParams.bernoulli(model["n"], model["k"], model["p"], model["q"])
    if detector == SCAN:
        cfg = ScanConfig(
            sample_size=det_cfg["M"], epsilon=det_cfg["eps"],
            gamma=det_cfg.get("gamma"),
            threshold_mode=det_cfg.get("threshold_mode", CHERNOFF_GAMMA),
            search_mode=det_cfg.get("search_mode", "auto"),
        )
    else:
        cfg = DegreeConfig(
            panel_size=det_cfg["n_prime"], probe_count=det_cfg["M"],
            epsilon=det_cfg["eps"], log_base=base,
        )
    if budget is None:
        budget = cfg.budget()
    label = f"n={model['n']},k={model['k']},{detector},{json.dumps(det_cfg, sort_keys=True)}"
    return TrialConfig(params=params, detector=detector, detector_cfg=cfg,
                       budget=budget, trials=trials, master_seed=master_seed,
                       label=label)


def cmd_simulate(args) -> int:
    file_cfg = {}
    if args.config:
        file_cfg = load_experiment(args.config)

    def pick(flag, file_path: list[str], default=None):
        if flag is not None:
            return flag
        node = file_cfg
        for part in file_path:
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    n = pick(args.n, ["model", "n"])
    k = pick(args.k, ["model", "k"])
    p = pick(args.p, ["model", "p"])
    q = pick(args.q, ["model", "q"])
    detector = pick(args.detector, ["detector"])
    trials = pick(args.trials, ["trials"])
    seed = pick(args.seed, ["master_seed"])
    for name, val in [("--n", n), ("--k", k), ("--p", p), ("--q", q),
                      ("--detector", detector), ("--trials", trials),
                      ("--seed", seed)]:
        if val is None:
            raise ConfigError(f"missing required flag {name}")
    if trials < 1:
        raise ConfigError("--trials must be positive")
    model = {"n": n, "k": k, "p": p, "q": q}
    if detector == SCAN:
        m = pick(args.sample, ["detector_cfg", "M"])
        eps = pick(args.eps, ["detector_cfg", "eps"])
        if m is None or eps is None:
            raise ConfigError("scan detector needs --M and --eps")
        det_cfg = {"M": m, "eps": eps}
        if args.gamma is not None:
            det_cfg["gamma"] = args.gamma
        if args.threshold_mode is not None:
            det_cfg["threshold_mode"] = args.threshold_mode
    elif detector == DEGREE:
        n_prime = pick(args.n_prime, ["detector_cfg", "n_prime"])
        m = pick(args.sample, ["detector_cfg", "M"])
        eps = pick(args.eps, ["detector_cfg", "eps"])
        if n_prime is None or m is None or eps is None:
            raise ConfigError("degree detector needs --n-prime, --M and --eps")
        det_cfg = {"n_prime": n_prime, "M": m, "eps": eps}
    else:
        raise ConfigError(f"unknown detector {detector!r}")
    cfg = _build_config(model, detector, det_cfg, args.budget, trials, seed,
                        _BASES[args.base])
    est = estimate_risk(cfg, threads=args.threads)
    text = json.dumps(est.to_json(), sort_keys=True, indent=2)
    if args.json_out:
        with open(_output_path(args.json_out), "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_sweep(args) -> int:
    raw = load_experiment(args.config)
    grid = experiment_grid(raw)
    output = raw.get("output", {})
    csv_path = args.csv or output.get("csv")
    manifest_path = args.manifest or output.get("manifest")
    jsonl_path = output.get("jsonl")
    if csv_path:
        csv_path = _output_path(csv_path)
    if manifest_path:
        manifest_path = _output_path(manifest_path)
    jsonl_fh = open(_output_path(jsonl_path), "a") if jsonl_path else None

    def progress(cfg):
        print(f"running {cfg.label}", file=sys.stderr)

    count = 0
    try:
        for est in sweep(grid, csv_path=csv_path, manifest_path=manifest_path,
                         threads=args.threads, progress=progress):
            count += 1
            if jsonl_fh:
                jsonl_fh.write(json.dumps(est.to_json(), sort_keys=True) + "\n")
                jsonl_fh.flush()
    finally:
        if jsonl_fh:
            jsonl_fh.close()
    print(f"completed {count} of {len(grid)} configs", file=sys.stderr)
    return 0


def cmd_bounds(args) -> int:
    report = budget_bounds(
        n=args.n, k=args.k, pair=BernPair(args.p, args.q),
        epsilon=args.eps, delta=args.delta, chi_constant=args.C,
        degree_constant=args.degree_const, base=_BASES[args.base],
    )
    if args.json:
        print(json.dumps(report.to_json(), sort_keys=True, indent=2))
        return 0
    rows = [
        ("statistical_lower_Q", report.statistical_lower_Q),
        ("adaptive_lower_Q", report.adaptive_lower_Q),
        ("scan_sufficient_Q", report.scan_sufficient_Q),
        ("scan_sufficient_Q_chi", report.scan_sufficient_Q_chi),
        ("degree_sufficient_Q", report.degree_sufficient_Q),
        ("min_k", report.min_k),
    ]
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {_fmt(value)}")
    if report.log_n_variants:
        print("log(n) variants:")
        for name, value in sorted(report.log_n_variants.items()):
            print(f"  {name:<{width}}  {_fmt(value)}")
    return 0


def cmd_phase(args) -> int:
    print(classify_phase(PhasePoint(alpha=args.alpha, beta=args.beta)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="densequery",
        description="Query-budgeted planted dense subgraph detection experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="estimate detector risk for one configuration")
    sim.add_argument("--config", help="experiment JSON file (flags override it)")
    sim.add_argument("--n", type=int, help="vertex count")
    sim.add_argument("--k", type=int, help="planted set size")
    sim.add_argument("--p", type=float, help="planted edge density in [0,1]")
    sim.add_argument("--q", type=float, help="ambient edge density in [0,1]")
    sim.add_argument("--detector", choices=[SCAN, DEGREE], help="detector to run")
    sim.add_argument("--M", dest="sample", type=int,
                     help="scan panel size / degree probe count (vertices)")
    sim.add_argument("--n-prime", type=int, help="degree-test panel size (vertices)")
    sim.add_argument("--eps", type=float, help="capture slack in (0,1)")
    sim.add_argument("--gamma", type=float,
                     help="scan threshold level in [q,p] (default: near p)")
    sim.add_argument("--threshold-mode", choices=["chernoff_gamma", "bernstein_midpoint"],
                     help="scan threshold rule (default chernoff_gamma)")
    sim.add_argument("--budget", type=int,
                     help="oracle budget in unique pairs (default: pattern size)")
    sim.add_argument("--trials", type=int, help="Monte Carlo trials per hypothesis (>=30)")
    sim.add_argument("--seed", type=int, help="master seed for reproducibility")
    sim.add_argument("--base", choices=list(_BASES), default="natural",
                     help="log base for thresholds (default natural)")
    sim.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                     help="worker threads (default: machine parallelism)")
    sim.add_argument("--json-out", help="write the JSON estimate here instead of stdout")
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="run a parameter grid to CSV, resumably")
    sw.add_argument("--config", required=True, help="experiment JSON file with grid axes")
    sw.add_argument("--csv", help="override the output CSV path")
    sw.add_argument("--manifest", help="override the resume-manifest path")
    sw.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                    help="worker threads (default: machine parallelism)")
    sw.set_defaults(func=cmd_sweep)

    bd = sub.add_parser("bounds", help="print the query-complexity bound table")
    bd.add_argument("--n", type=int, required=True, help="vertex count")
    bd.add_argument("--k", type=int, required=True, help="planted set size")
    bd.add_argument("--p", type=float, required=True, help="planted edge density")
    bd.add_argument("--q", type=float, required=True, help="ambient edge density")
    bd.add_argument("--eps", type=float, default=0.0, help="slack epsilon (default 0)")
    bd.add_argument("--delta", type=float, default=1.0,
                    help="adaptive-bound confidence level (default 1)")
    bd.add_argument("--C", type=float, default=8.0,
                    help="chi-square scan-bound constant, >= 8 (default 8)")
    bd.add_argument("--degree-const", type=float, default=1.0,
                    help="degree-test bound constant (default 1, calibrated empirically)")
    bd.add_argument("--base", choices=list(_BASES), default="natural",
                    help="log base (default natural)")
    bd.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    bd.set_defaults(func=cmd_bounds)

    ph = sub.add_parser("phase", help="classify an exponent pair on the phase diagram")
    ph.add_argument("--alpha", type=float, required=True, help="query exponent in (0,2)")
    ph.add_argument("--beta", type=float, required=True, help="size exponent in (0,1)")
    ph.set_defaults(func=cmd_phase)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
