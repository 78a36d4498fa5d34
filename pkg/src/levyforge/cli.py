"""Command-line front end: simulate, calibrate, tune, forecast, evaluate,
pipeline.

A run takes a JSON config document (``--config``) whose values individual
flags override, and writes its artifacts into a fresh directory named
``<timestamp>_<seed>`` under the output root.  Exit codes: 0 success, 2 usage
or config validation, 3 data problems, 4 numeric or training failures.
"""

from __future__ import annotations

import argparse
import copy
import datetime as _dt
import json
import sys
from pathlib import Path

import numpy as np

from . import calibrate as _cal
from . import forecast as _fc
from .data import RawSeries, fit_minmax, fit_standard, load_csv, make_windows
from .errors import (
    DomainError,
    LevyForgeError,
    NumericalError,
    ParseError,
    SearchError,
    SizeError,
    TrainingError,
)
from .neural.io import save_lstm
from .neural.lstm import LstmHyper, train_lstm
from .optimizers import SearchConfig
from .processes import (
    HestonParams,
    MertonParams,
    SimGrid,
    simulate_compound_poisson,
    simulate_fractional_heston,
    simulate_gbm,
    simulate_merton_em,
    simulate_merton_jump_adapted,
)

__all__ = ["main", "DEFAULT_CONFIG"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

DEFAULT_CONFIG = {
    "version": 1,
    "seed": 0,
    "out": "runs",
    "data": {"path": None, "date_col": "date", "price_col": "price"},
    "simulate": {
        "model": "merton",
        "scheme": "jump_adapted",
        "n_paths": 100,
        "grid": {"t_end": 5.0, "n_steps": 1000, "s0": 100.0},
        "params": {"mu": 0.05, "sigma": 0.2, "lambda": 10.0, "m": 0.0, "delta": 0.1095},
    },
    "calibrate": {
        "method": "nn",
        "model": "merton",
        "regularization": {"lambda_reg": 0.0, "priors": None},
        "net": {"input_dim": 30, "hidden": [32, 32], "epochs": 600, "lr": 0.05},
        "search": {"population": 25, "iterations": 150},
    },
    "tune": {
        "box": {
            "hidden_size": [4, 16],
            "log10_lr": [-2.5, -1.2],
            "lookback": [2, 8],
            "epochs": [40, 150],
        },
        "gwo": {"population": 4, "iterations": 2},
    },
    "forecast": {
        "horizon": 50,
        "weight": 0.5,
        "n_mc_paths": 2000,
        "quantiles": [0.05, 0.95],
        "lstm": {"hidden_size": 8, "lr": 0.02, "epochs": 150, "lookback": 5},
    },
    "evaluate": {"forecast_csv": None},
}


class UsageError(LevyForgeError):
    pass


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _load_config(args: argparse.Namespace) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if args.config is not None:
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise UsageError("config root must be a JSON object")
        cfg = _deep_merge(cfg, file_cfg)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.out is not None:
        cfg["out"] = args.out
    if args.data is not None:
        cfg["data"]["path"] = args.data
    if args.date_col is not None:
        cfg["data"]["date_col"] = args.date_col
    if args.price_col is not None:
        cfg["data"]["price_col"] = args.price_col
    if args.method is not None:
        cfg["calibrate"]["method"] = args.method
    if args.model is not None:
        cfg["calibrate"]["model"] = args.model
        cfg["simulate"]["model"] = args.model
    if args.weight is not None:
        cfg["forecast"]["weight"] = args.weight
    return cfg


def _validate_common(cfg: dict) -> None:
    seed = cfg["seed"]
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise UsageError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    method = cfg["calibrate"]["method"]
    if method == "torchsde":
        raise UsageError(
            "calibration method 'torchsde' is out of scope for this toolkit; "
            "supported methods: nn, mpa"
        )
    if method not in ("nn", "mpa"):
        raise UsageError(f"unknown calibration method {method!r} (use nn or mpa)")
    model = cfg["calibrate"]["model"]
    if model not in ("merton", "fheston"):
        raise UsageError(f"unknown model {model!r} (use merton or fheston)")
    weight = cfg["forecast"]["weight"]
    if not isinstance(weight, (int, float)) or not 0.0 <= float(weight) <= 1.0:
        raise UsageError(f"ensemble weight must lie in [0, 1], got {weight!r}")
    horizon = cfg["forecast"]["horizon"]
    if not isinstance(horizon, int) or horizon < 0:
        raise UsageError(f"horizon must be a nonnegative integer, got {horizon!r}")


def _run_dir(cfg: dict) -> Path:
    stamp = _dt.datetime.now().strftime("%Y%m%dT%H%M%S%f")
    path = Path(cfg["out"]) / f"{stamp}_{cfg['seed']}"
    path.mkdir(parents=True, exist_ok=False)
    return path


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _require_data(cfg: dict) -> RawSeries:
    data = cfg["data"]
    if not data.get("path"):
        raise UsageError("no input data: pass --data or set data.path in the config")
    return load_csv(data["path"], date_col=data["date_col"], price_col=data["price_col"])


def _model_kind(cfg_model: str) -> str:
    return "merton" if cfg_model == "merton" else "fractional_heston"


def _merton_from_config(params: dict) -> MertonParams:
    try:
        return MertonParams(
            mu=float(params["mu"]),
            sigma=float(params["sigma"]),
            lam=float(params["lambda"]),
            m=float(params["m"]),
            delta=float(params["delta"]),
        )
    except (KeyError, TypeError, ValueError, DomainError) as exc:
        raise UsageError(f"bad Merton parameters: {exc}") from exc


def _heston_from_config(params: dict) -> HestonParams:
    try:
        return HestonParams(
            mu=float(params["mu"]),
            kappa=float(params["kappa"]),
            theta=float(params["theta"]),
            xi=float(params["xi"]),
            rho=float(params["rho"]),
            v0=float(params.get("v0", params["theta"])),
            hurst=float(params.get("hurst", 0.7)),
            beta=float(params.get("beta", 0.5)),
        )
    except (KeyError, TypeError, ValueError, DomainError) as exc:
        raise UsageError(f"bad Heston parameters: {exc}") from exc


def cmd_simulate(cfg: dict) -> int:
    section = cfg["simulate"]
    try:
        grid = SimGrid(
            t_end=float(section["grid"]["t_end"]),
            n_steps=int(section["grid"]["n_steps"]),
            s0=float(section["grid"]["s0"]),
        )
    except (KeyError, TypeError, ValueError, DomainError) as exc:
        raise UsageError(f"bad simulation grid: {exc}") from exc
    n_paths = int(section["n_paths"])
    if n_paths < 1:
        raise UsageError("n_paths must be >= 1")
    seed = cfg["seed"]
    model = section["model"]
    scheme = section.get("scheme", "jump_adapted")

    if model == "merton":
        params = _merton_from_config(section["params"])
        if scheme == "em":
            paths = simulate_merton_em(params, grid, n_paths, seed)
        elif scheme == "jump_adapted":
            paths = simulate_merton_jump_adapted(params, grid, n_paths, seed)
        else:
            raise UsageError(f"unknown merton scheme {scheme!r} (use em or jump_adapted)")
        manifest_params = section["params"]
    elif model == "fheston":
        params = _heston_from_config(section["params"])
        paths, _ = simulate_fractional_heston(params, grid, n_paths, seed)
        scheme = "full_truncation_fbm"
        manifest_params = section["params"]
    elif model == "gbm":
        params = section["params"]
        paths = simulate_gbm(float(params["mu"]), float(params["sigma"]), grid, n_paths, seed)
        scheme = "exact"
        manifest_params = {"mu": params["mu"], "sigma": params["sigma"]}
    elif model == "compound_poisson":
        params = section["params"]
        paths = simulate_compound_poisson(
            float(params["lambda"]), float(params["m"]), float(params["delta"]),
            grid, n_paths, seed,
        )
        scheme = "per_step_counts"
        manifest_params = section["params"]
    else:
        raise UsageError(f"unknown simulation model {model!r}")

    run = _run_dir(cfg)
    paths.to_csv(run / "paths.csv")
    _write_json(
        run / "manifest.json",
        {
            "command": "simulate",
            "model": model,
            "scheme": scheme,
            "seed": seed,
            "n_paths": n_paths,
            "grid": {"t_end": grid.t_end, "n_steps": grid.n_steps, "s0": grid.s0},
            "params": manifest_params,
        },
    )
    print(run / "paths.csv")
    return EXIT_OK


def _reg_from_config(section: dict) -> _cal.RegularizationConfig | None:
    reg = section.get("regularization") or {}
    lambda_reg = float(reg.get("lambda_reg", 0.0) or 0.0)
    priors_cfg = reg.get("priors")
    priors = None
    if priors_cfg:
        try:
            priors = _cal.LogNormalPriors(
                mu_lambda=float(priors_cfg["mu_lambda"]),
                sigma_lambda=float(priors_cfg["sigma_lambda"]),
                mu_k=float(priors_cfg["mu_k"]),
                sigma_k=float(priors_cfg["sigma_k"]),
            )
        except (KeyError, TypeError, ValueError, DomainError) as exc:
            raise UsageError(f"bad prior configuration: {exc}") from exc
    if lambda_reg == 0.0 and priors is None:
        return None
    return _cal.RegularizationConfig(lambda_reg=lambda_reg, priors=priors)


def _calibrate_series(series: RawSeries, cfg: dict) -> _cal.CalibrationResult:
    section = cfg["calibrate"]
    kind = _model_kind(section["model"])
    reg = _reg_from_config(section)
    seed = cfg["seed"]
    if section["method"] == "nn":
        net = section.get("net", {})
        net_config = _cal.NetConfig(
            input_dim=int(net.get("input_dim", 30)),
            hidden=tuple(net.get("hidden", (32, 32))),
            epochs=int(net.get("epochs", 600)),
            lr=float(net.get("lr", 0.05)),
        )
        return _cal.nn_calibrate(series, kind, net_config, reg, seed)
    search = section.get("search", {})
    search_config = SearchConfig(
        population=int(search.get("population", 25)),
        iterations=int(search.get("iterations", 150)),
        seed=seed,
    )
    return _cal.mpa_calibrate(series, kind, search_config, reg, seed)


def cmd_calibrate(cfg: dict) -> int:
    series = _require_data(cfg)
    result = _calibrate_series(series, cfg)
    run = _run_dir(cfg)
    (run / "calibration.json").write_text(result.to_json() + "\n", encoding="utf-8")
    print(run / "calibration.json")
    return EXIT_OK


def _scaled_windows(series: RawSeries, lookback: int):
    """Standard-scaled inputs, min-max-scaled targets, shared window slicing."""
    input_scaler = fit_standard(series)
    target_scaler = fit_minmax(series)
    x_scaled = input_scaler.transform(series)
    y_scaled = target_scaler.transform(series)
    x_windows = make_windows(x_scaled, lookback, 1)
    y_windows = make_windows(y_scaled, lookback, 1)
    from .data import WindowedDataset

    dataset = WindowedDataset(x_windows.inputs, y_windows.targets, lookback, 1)
    return dataset, (input_scaler, target_scaler)


def cmd_tune(cfg: dict) -> int:
    series = _require_data(cfg)
    section = cfg["tune"]
    box_cfg = section["box"]
    box = _fc.HyperBox(
        hidden_size=tuple(box_cfg["hidden_size"]),
        log10_lr=tuple(box_cfg["log10_lr"]),
        lookback=tuple(box_cfg["lookback"]),
        epochs=tuple(box_cfg["epochs"]),
    )
    gwo_cfg = section["gwo"]
    gwo = SearchConfig(
        population=int(gwo_cfg["population"]),
        iterations=int(gwo_cfg["iterations"]),
        seed=cfg["seed"],
    )
    max_lookback = box.lookback[1]
    dataset, _ = _scaled_windows(series, max_lookback)
    tuned = _fc.tune_lstm(dataset, box, gwo)
    run = _run_dir(cfg)
    _write_json(
        run / "tuned.json",
        {
            "hidden_size": tuned.hidden_size,
            "lr": tuned.lr,
            "lookback": tuned.lookback,
            "epochs": tuned.epochs,
            "validation_mse": tuned.validation_mse,
        },
    )
    print(run / "tuned.json")
    return EXIT_OK


def _stage_two(series: RawSeries, cfg: dict, hyper: LstmHyper, lookback: int, run: Path) -> None:
    """Train, calibrate, hybrid-forecast, and write all Stage II artifacts."""
    section = cfg["forecast"]
    horizon = int(section["horizon"])
    prices = series.prices
    if len(series) < lookback + horizon + 30:
        raise SizeError(
            f"series of length {len(series)} too short for lookback={lookback}, "
            f"horizon={horizon} plus a 30-point calibration window"
        )
    train_series = RawSeries(series.timestamps[: len(series) - horizon], prices[:-horizon])

    dataset, scalers = _scaled_windows(train_series, lookback)
    weights, trace = train_lstm(dataset, hyper)
    (run / "lstm_weights.json").write_text(save_lstm(weights) + "\n", encoding="utf-8")

    lstm_points = _fc.rolling_lstm_forecast(weights, scalers, series, horizon, lookback)
    calib_cfg = dict(cfg)
    calibration = _calibrate_series(train_series, calib_cfg)
    (run / "calibration.json").write_text(calibration.to_json() + "\n", encoding="utf-8")

    actual = prices[-horizon:]
    anchors = prices[-horizon - 1 : -1]
    if calibration.model_kind == "merton":
        merton = calibration.params
    else:
        # hybrid Monte Carlo runs on a Merton engine; a fractional Heston
        # calibration contributes its drift and stationary vol, no jumps
        merton = MertonParams(
            mu=calibration.params.mu,
            sigma=float(np.sqrt(calibration.params.theta)),
            lam=0.0,
            m=0.0,
            delta=0.0,
        )
    hybrid = _fc.hybrid_forecast(
        lstm_points,
        merton,
        anchors,
        _fc.HybridConfig(
            w=float(section["weight"]),
            n_mc_paths=int(section["n_mc_paths"]),
            quantiles=tuple(section["quantiles"]),
            seed=cfg["seed"],
        ),
    )
    hybrid.to_csv(run / "forecast_hybrid.csv", actual=actual)
    with open(run / "forecast_lstm.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("step,point,actual\n")
        for i in range(horizon):
            fh.write(f"{i},{lstm_points[i]!r},{actual[i]!r}\n")

    metrics = {
        "lstm": json.loads(_fc.compute_metrics(lstm_points, actual).to_json()),
        "hybrid": json.loads(_fc.compute_metrics(hybrid.point, actual).to_json()),
    }
    _write_json(run / "metrics.json", metrics)
    with open(run / "training_loss.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("epoch,mse\n")
        for i, value in enumerate(trace):
            fh.write(f"{i},{value!r}\n")


def cmd_forecast(cfg: dict) -> int:
    series = _require_data(cfg)
    lstm_cfg = cfg["forecast"]["lstm"]
    lookback = int(lstm_cfg["lookback"])
    hyper = LstmHyper(
        hidden_size=int(lstm_cfg["hidden_size"]),
        lr=float(lstm_cfg["lr"]),
        epochs=int(lstm_cfg["epochs"]),
        seed=cfg["seed"],
    )
    run = _run_dir(cfg)
    _stage_two(series, cfg, hyper, lookback, run)
    _write_json(run / "manifest.json", {"command": "forecast", "config": cfg})
    print(run / "metrics.json")
    return EXIT_OK


def cmd_evaluate(cfg: dict) -> int:
    csv_path = cfg["evaluate"].get("forecast_csv") or cfg["data"].get("path")
    if not csv_path:
        raise UsageError("evaluate needs a forecast CSV (evaluate.forecast_csv or --data)")
    try:
        rows = np.genfromtxt(csv_path, delimiter=",", names=True)
    except (OSError, ValueError) as exc:
        raise ParseError(f"cannot read forecast CSV {csv_path}: {exc}") from exc
    if rows.dtype.names is None or "point" not in rows.dtype.names or "actual" not in rows.dtype.names:
        raise ParseError(f"{csv_path}: need point and actual columns")
    point = np.atleast_1d(rows["point"])
    actual = np.atleast_1d(rows["actual"])
    metrics = _fc.compute_metrics(point, actual)
    run = _run_dir(cfg)
    (run / "metrics.json").write_text(metrics.to_json() + "\n", encoding="utf-8")
    print(run / "metrics.json")
    return EXIT_OK


def cmd_pipeline(cfg: dict) -> int:
    """Stage I (GWO-tuned LSTM) then Stage II (calibration + hybrid ensemble)."""
    series = _require_data(cfg)
    section = cfg["tune"]
    box_cfg = section["box"]
    box = _fc.HyperBox(
        hidden_size=tuple(box_cfg["hidden_size"]),
        log10_lr=tuple(box_cfg["log10_lr"]),
        lookback=tuple(box_cfg["lookback"]),
        epochs=tuple(box_cfg["epochs"]),
    )
    gwo = SearchConfig(
        population=int(section["gwo"]["population"]),
        iterations=int(section["gwo"]["iterations"]),
        seed=cfg["seed"],
    )
    horizon = int(cfg["forecast"]["horizon"])
    max_lookback = box.lookback[1]
    if len(series) < max_lookback + horizon + 30:
        raise SizeError("series too short for the requested tune/forecast split")
    train_series = RawSeries(
        series.timestamps[: len(series) - horizon], series.prices[:-horizon]
    )
    dataset, _ = _scaled_windows(train_series, max_lookback)
    tuned = _fc.tune_lstm(dataset, box, gwo)

    run = _run_dir(cfg)
    _write_json(
        run / "tuned.json",
        {
            "hidden_size": tuned.hidden_size,
            "lr": tuned.lr,
            "lookback": tuned.lookback,
            "epochs": tuned.epochs,
            "validation_mse": tuned.validation_mse,
        },
    )
    _stage_two(series, cfg, tuned.to_hyper(cfg["seed"]), tuned.lookback, run)
    _write_json(run / "manifest.json", {"command": "pipeline", "config": cfg})
    print(run / "metrics.json")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "calibrate": cmd_calibrate,
    "tune": cmd_tune,
    "forecast": cmd_forecast,
    "evaluate": cmd_evaluate,
    "pipeline": cmd_pipeline,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levyforge",
        description="Jump-diffusion simulation, calibration, and hybrid forecasting.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--seed", type=int, help="64-bit unsigned seed")
    parser.add_argument("--out", help="output root directory")
    parser.add_argument("--data", help="input price CSV")
    parser.add_argument("--date-col", help="date column name (default: date)")
    parser.add_argument("--price-col", help="price column name (default: price)")
    parser.add_argument("--method", help="calibration method: nn or mpa")
    parser.add_argument("--model", help="model: merton or fheston")
    parser.add_argument("--weight", type=float, help="ensemble weight in [0, 1]")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = _load_config(args)
        _validate_common(cfg)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SizeError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DomainError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalError, TrainingError, SearchError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
