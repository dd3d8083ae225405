"""``coocnet`` command-line front end.

Each subcommand reads one TOML config (optional), applies flag overrides
and writes tidy CSV/JSON outputs into ``out_dir``. Exit codes: 0 success,
1 config or I/O error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import contextlib
import copy
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np
import tomli_w

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

from . import __version__
from .cv import (
    aggregate,
    default_sizes,
    evaluate,
    subsample_curve,
    write_records_csv,
    write_summary_csv,
)
from .network import (
    GGM_CONVENTIONS,
    Network,
    association_matrix,
    edge_stats,
    export_network,
    median_network,
)
from .otu_io import (
    ORIENTATIONS,
    OtuTable,
    TableFormatError,
    generate_synthetic,
    load_otu_csv,
    validate_table,
    write_otu_csv,
)
from .predictors import FAMILIES, PredictorSpec
from .solvers import SingularCovarianceError
from .transform import MODES, apply_pipeline, fit_pipeline

logger = logging.getLogger("coocnet")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2

NETWORK_FORMATS = {"edge-list-csv": ".csv", "graph-json": ".json"}
CURVE_FIELDS = ["algorithm", "n", "mean_mse", "var_mse"]
EDGE_COUNT_FIELDS = ["algorithm", "positive", "negative", "total"]

DEFAULTS = {
    "out_dir": "coocnet-out",
    "workers": 0,
    "data": {"path": "", "orientation": "rows-are-samples"},
    "transform": {"mode": "yj-then-scale"},
    "cv": {"k": 3, "replicates": 3, "sizes": []},
    "network": {"ggm_convention": "raw-precision", "format": "edge-list-csv"},
    "simulate": {"d": 10, "n": 200, "edge_density": 0.2, "counts": False},
    "algorithms": [{"family": f} for f in FAMILIES],
}
_ALGO_KEYS = {"family", "name", "thresholds", "lambdas", "selection", "lambda_scope", "inner_fraction", "threshold"}


class ConfigError(ValueError):
    """Invalid or incomplete run configuration."""


class StageError(Exception):
    def __init__(self, stage: str, exc: BaseException, code: int):
        super().__init__(f"{stage}: {type(exc).__name__}: {exc}")
        self.stage = stage
        self.code = code


_IO_ERRORS = (OSError, TableFormatError, ConfigError, UnicodeDecodeError, tomllib.TOMLDecodeError)
_NUMERIC_ERRORS = (
    np.linalg.LinAlgError,
    FloatingPointError,
    ArithmeticError,
    SingularCovarianceError,
    ValueError,
)


@contextlib.contextmanager
def stage(name: str, numeric: bool = False):
    """Tag failures with ``module.operation`` and the exit code they map to.

    I/O-type errors always exit 1; any other ``ValueError`` or linear
    algebra failure exits 2 inside a numerical stage and 1 elsewhere.
    """
    try:
        yield
    except StageError:
        raise
    except _IO_ERRORS as exc:
        raise StageError(name, exc, EXIT_CONFIG) from exc
    except _NUMERIC_ERRORS as exc:
        raise StageError(name, exc, EXIT_NUMERIC if numeric else EXIT_CONFIG) from exc


# --------------------------------------------------------------------------
# configuration


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(path) -> dict:
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    unknown = set(raw) - set(DEFAULTS) - {"seed"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return raw


def resolve_config(args) -> dict:
    """Defaults, then the config file, then command-line overrides."""
    cfg = copy.deepcopy(DEFAULTS)
    config_path = getattr(args, "config", None)
    if config_path:
        raw = load_config(config_path)
        cfg = _merge(cfg, {k: v for k, v in raw.items() if k != "algorithms"})
        if "algorithms" in raw:
            cfg["algorithms"] = raw["algorithms"]
        if "seed" in raw:
            cfg["seed"] = raw["seed"]
        # relative data paths are taken relative to the config file
        data_path = raw.get("data", {}).get("path")
        if data_path and not Path(data_path).is_absolute():
            cfg["data"]["path"] = str(Path(config_path).parent / data_path)
    overrides = {
        "seed": getattr(args, "seed", None),
        "out_dir": getattr(args, "out_dir", None),
        "workers": getattr(args, "workers", None),
    }
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    if getattr(args, "orientation", None) is not None:
        cfg["data"]["orientation"] = args.orientation
    if getattr(args, "data", None) is not None:
        cfg["data"]["path"] = args.data
    if getattr(args, "mode", None) is not None:
        cfg["transform"]["mode"] = args.mode
    for key in ("d", "n", "edge_density"):
        value = getattr(args, f"sim_{key}", None)
        if value is not None:
            cfg["simulate"][key] = value
    if getattr(args, "counts", False):
        cfg["simulate"]["counts"] = True
    return cfg


def check_config(cfg: dict, command: str) -> None:
    seed = cfg.get("seed")
    if seed is None:
        raise ConfigError("a seed is required (set `seed = <int>` in the config or pass --seed)")
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")
    if cfg["data"]["orientation"] not in ORIENTATIONS:
        raise ConfigError(f"data.orientation must be one of {ORIENTATIONS}")
    if cfg["transform"]["mode"] not in MODES:
        raise ConfigError(f"transform.mode must be one of {MODES}")
    if not isinstance(cfg["workers"], int) or cfg["workers"] < 0:
        raise ConfigError("workers must be a non-negative integer (0 = all available cores)")
    k = cfg["cv"]["k"]
    if not isinstance(k, int) or k < 2:
        raise ConfigError(f"cv.k must be an integer >= 2, got {k!r}")
    if cfg["network"]["ggm_convention"] not in GGM_CONVENTIONS:
        raise ConfigError(f"network.ggm_convention must be one of {GGM_CONVENTIONS}")
    if cfg["network"]["format"] not in NETWORK_FORMATS:
        raise ConfigError(f"network.format must be one of {sorted(NETWORK_FORMATS)}")
    if command == "simulate":
        sim = cfg["simulate"]
        if not (isinstance(sim["d"], int) and sim["d"] >= 2 and isinstance(sim["n"], int) and sim["n"] >= 2):
            raise ConfigError(f"simulate.d and simulate.n must be integers >= 2, got d={sim['d']!r}, n={sim['n']!r}")
        if not 0 < float(sim["edge_density"]) < 1:
            raise ConfigError(f"simulate.edge_density must lie in (0, 1), got {sim['edge_density']!r}")
    else:
        path = cfg["data"]["path"]
        if not path:
            raise ConfigError("data.path is required (config `[data] path = ...` or --data)")
        if not Path(path).is_file():
            raise ConfigError(f"data file not found: {path}")
    if command in ("evaluate", "curve", "network"):
        specs_from_config(cfg)


def specs_from_config(cfg: dict) -> list[PredictorSpec]:
    algos = cfg.get("algorithms") or []
    if not algos:
        raise ConfigError("at least one [[algorithms]] entry is required")
    specs = []
    for entry in algos:
        unknown = set(entry) - _ALGO_KEYS
        if unknown:
            raise ConfigError(f"unknown algorithm keys {sorted(unknown)} in {entry}")
        if "family" not in entry:
            raise ConfigError(f"algorithm entry without a family: {entry}")
        kwargs = {k: entry[k] for k in ("selection", "lambda_scope", "inner_fraction", "name") if k in entry}
        for key in ("thresholds", "lambdas"):
            if key in entry:
                kwargs[key] = tuple(float(v) for v in entry[key])
        options = {"threshold": float(entry["threshold"])} if "threshold" in entry else {}
        try:
            specs.append(PredictorSpec(entry["family"], options=options, **kwargs))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    labels = [s.label for s in specs]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"algorithm labels must be unique; add `name` to repeated families: {labels}")
    return specs


def config_to_toml(cfg: dict) -> str:
    body = copy.deepcopy(cfg)
    seed = body.pop("seed", None)
    text = tomli_w.dumps(body)
    if seed is None:
        return "# seed = <int>  (required: no clock-based default)\n" + text
    return f"seed = {seed}\n" + text


def _workers(cfg) -> int:
    return cfg["workers"] or (os.cpu_count() or 1)


def _dataset_name(cfg) -> str:
    return Path(cfg["data"]["path"]).stem


def _load(cfg) -> OtuTable:
    with stage("otu_io.load_otu_csv"):
        table = load_otu_csv(cfg["data"]["path"], cfg["data"]["orientation"])
    report = validate_table(table)
    for kind, cols in (("zero variance", report.zero_variance_columns),
                       ("negative values", report.negative_columns)):
        if cols:
            names = ", ".join(table.taxa[j] for j in cols[:5]) + (", ..." if len(cols) > 5 else "")
            logger.warning("otu_io.validate_table: %d column(s) with %s: %s", len(cols), kind, names)
    if report.constant_rows:
        logger.warning("otu_io.validate_table: %d constant sample row(s)", len(report.constant_rows))
    return table


def _out_dir(cfg) -> Path:
    with stage("cli.out_dir"):
        out = Path(cfg["out_dir"])
        out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --------------------------------------------------------------------------
# commands


def cmd_transform(cfg) -> dict:
    table = _load(cfg)
    mode = cfg["transform"]["mode"]
    with stage("transform.fit_pipeline", numeric=True):
        fitted = fit_pipeline(table.counts, mode)
        Z = apply_pipeline(fitted, table.counts)
    out = _out_dir(cfg)
    paths = {"table": out / "transformed.csv", "params": out / "transform_params.json"}
    with stage("cli.write_transform"):
        write_otu_csv(OtuTable(table.samples, table.taxa, Z), paths["table"])
        _write_json({"taxa": list(table.taxa), **fitted.to_dict()}, paths["params"])
    return paths


def cmd_evaluate(cfg) -> dict:
    table = _load(cfg)
    specs = specs_from_config(cfg)
    with stage("cv.evaluate", numeric=True):
        records = evaluate(
            table,
            specs,
            cfg["transform"]["mode"],
            k=cfg["cv"]["k"],
            seed=cfg["seed"],
            dataset=_dataset_name(cfg),
            workers=_workers(cfg),
        )
    with stage("cv.aggregate", numeric=True):
        summary = aggregate(records)
    out = _out_dir(cfg)
    paths = {"records": out / "records.csv", "summary": out / "summary.csv"}
    with stage("cli.write_evaluate"):
        write_records_csv(records, paths["records"])
        write_summary_csv(summary, paths["summary"])
    return paths


def cmd_curve(cfg) -> dict:
    table = _load(cfg)
    specs = specs_from_config(cfg)
    sizes = list(cfg["cv"]["sizes"]) or default_sizes(table.n_samples)
    with stage("cv.subsample_curve", numeric=True):
        records = subsample_curve(
            table,
            sizes,
            specs,
            cfg["cv"]["replicates"],
            transform_mode=cfg["transform"]["mode"],
            k=cfg["cv"]["k"],
            seed=cfg["seed"],
            dataset=_dataset_name(cfg),
            workers=_workers(cfg),
        )
    with stage("cv.aggregate", numeric=True):
        summary = aggregate(records)
    out = _out_dir(cfg)
    paths = {"curve": out / "curve.csv", "records": out / "curve_records.csv"}
    with stage("cli.write_curve"):
        with open(paths["curve"], "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CURVE_FIELDS)
            for row in sorted(summary, key=lambda r: (r.n, r.algorithm)):
                writer.writerow([row.algorithm, row.n, repr(row.mean_mse), repr(row.var_mse)])
        write_records_csv(records, paths["records"])
    return paths


def _safe_label(label: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in label)


def cmd_network(cfg) -> dict:
    table = _load(cfg)
    specs = specs_from_config(cfg)
    convention = cfg["network"]["ggm_convention"]
    fmt = cfg["network"]["format"]
    with stage("cv.evaluate", numeric=True):
        _, results = evaluate(
            table,
            specs,
            cfg["transform"]["mode"],
            k=cfg["cv"]["k"],
            seed=cfg["seed"],
            dataset=_dataset_name(cfg),
            workers=_workers(cfg),
            return_results=True,
        )
    networks = {}
    for spec in specs:
        folds = sorted((r for r in results if r.algorithm == spec.label), key=lambda r: r.fold)
        with stage("network.median_network", numeric=True):
            failed = [r.fold for r in folds if r.model is None]
            if failed:
                raise ValueError(f"{spec.label}: model fit failed in fold(s) {failed}")
            if spec.family == "featureless":
                # the baseline has no associations: an empty network
                networks[spec.label] = Network(table.taxa, (), "featureless")
                continue
            mats = [association_matrix(r.model, table.taxa, convention) for r in folds]
            networks[spec.label] = median_network(mats)
    out = _out_dir(cfg)
    paths = {"edge_counts": out / "edge_counts.csv"}
    with stage("network.export_network"):
        for label, net in networks.items():
            stem = f"edges_{_safe_label(label)}"
            if net.convention:
                stem += f"_{net.convention}"
            path = out / (stem + NETWORK_FORMATS[fmt])
            export_network(net, path, fmt)
            paths[label] = path
        with open(paths["edge_counts"], "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(EDGE_COUNT_FIELDS)
            for label, net in networks.items():
                st = edge_stats(net)
                writer.writerow([label, st.positive, st.negative, st.total])
    return paths


def cmd_simulate(cfg) -> dict:
    sim = cfg["simulate"]
    with stage("otu_io.generate_synthetic", numeric=True):
        truth = generate_synthetic(
            int(sim["d"]), int(sim["n"]), float(sim["edge_density"]), cfg["seed"], bool(sim["counts"])
        )
    out = _out_dir(cfg)
    paths = {"table": out / "simulated.csv", "truth": out / "truth.json"}
    taxa = truth.table.taxa
    doc = {
        "d": int(sim["d"]),
        "n": int(sim["n"]),
        "edge_density": float(sim["edge_density"]),
        "seed": cfg["seed"],
        "counts": bool(sim["counts"]),
        "taxa": list(taxa),
        "precision": truth.precision.tolist(),
        "support": [[taxa[i], taxa[j]] for i, j in sorted(truth.support)],
    }
    with stage("cli.write_simulate"):
        write_otu_csv(truth.table, paths["table"])
        _write_json(doc, paths["truth"])
    return paths


COMMANDS = {
    "transform": cmd_transform,
    "evaluate": cmd_evaluate,
    "curve": cmd_curve,
    "network": cmd_network,
    "simulate": cmd_simulate,
}


# --------------------------------------------------------------------------
# argument parsing


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # shared by the top-level parser and every subparser so global flags
    # may appear before or after the subcommand
    default = argparse.SUPPRESS if suppress else None
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default=default, help="TOML run configuration")
    p.add_argument("--seed", type=int, default=default, help="master seed (required)")
    p.add_argument("--out-dir", dest="out_dir", default=default, help="output directory")
    p.add_argument("--workers", type=int, default=default, help="parallel workers; 0 = all cores")
    p.add_argument("--orientation", choices=ORIENTATIONS, default=default)
    p.add_argument("--print-config", dest="print_config", action="store_true",
                   default=argparse.SUPPRESS if suppress else False,
                   help="print the effective configuration as TOML and exit")
    p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS if suppress else False)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coocnet",
        description="Cross-validated co-occurrence network inference for abundance tables.",
        parents=[_global_flags(False)],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    shared = _global_flags(True)
    helps = {
        "transform": "fit and apply the abundance transform",
        "evaluate": "K-fold test error for every configured algorithm",
        "curve": "test error over subsample sizes",
        "network": "median-over-folds networks and edge counts",
        "simulate": "synthetic table from a sparse precision matrix",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, parents=[shared])
        if name != "simulate":
            p.add_argument("--data", default=None, help="input CSV (overrides data.path)")
        if name == "transform":
            p.add_argument("--mode", choices=MODES, default=None)
        if name == "simulate":
            p.add_argument("--d", dest="sim_d", type=int, default=None)
            p.add_argument("--n", dest="sim_n", type=int, default=None)
            p.add_argument("--density", dest="sim_edge_density", type=float, default=None)
            p.add_argument("--counts", action="store_true", default=False)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        with stage("cli.config"):
            cfg = resolve_config(args)
        if args.print_config:
            sys.stdout.write(config_to_toml(cfg))
            return EXIT_OK
        if not args.command:
            parser.print_usage(sys.stderr)
            sys.stderr.write("coocnet: error: a COMMAND is required\n")
            return EXIT_CONFIG
        with stage("cli.config"):
            check_config(cfg, args.command)
        paths = COMMANDS[args.command](cfg)
    except StageError as err:
        sys.stderr.write(f"coocnet: {err.stage} failed: {err.__cause__}\n")
        return err.code
    for label, path in paths.items():
        logger.info("wrote %s: %s", label, path)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
