"""Command-line experiment runner.

``multact-lab run CONFIG`` executes one experiment described by a JSON config
and writes a CSV of rows plus a JSON summary echoing the resolved
configuration, the seed, the library version, a config hash, and wall-clock
time.  Re-running with the same config and seed reproduces the CSV byte for
byte.  ``multact-lab list`` prints the registry; ``multact-lab sieve`` builds
and caches a smallest-prime-factor table.

Exit codes: 0 success, 1 computation error, 2 config/schema error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time

import jsonschema

from . import __version__
from ._backend import backend_name
from .errors import MultactError, SchemaError
from .experiments import experiment_names, registry
from .numtheory import FactorTable, build_factor_table, default_context

_TOP_SCHEMA = {
    "type": "object",
    "properties": {
        "experiment": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "params": {"type": "object"},
    },
    "required": ["experiment"],
    "additionalProperties": False,
}


def _apply_defaults(schema: dict, params: dict) -> dict:
    out = dict(params)
    for key, sub in schema.get("properties", {}).items():
        if key not in out and "default" in sub:
            out[key] = sub["default"]
    return out


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read config {path}: {exc}") from exc


def validate_config(config: dict) -> tuple[str, dict, int]:
    """Schema-check the config; returns (experiment, resolved params, seed)."""
    try:
        jsonschema.validate(config, _TOP_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"config rejected: {exc.message}") from exc
    name = config["experiment"]
    reg = registry()
    if name not in reg:
        raise SchemaError(
            f"unknown experiment {name!r}; known: {', '.join(experiment_names())}"
        )
    _, schema, _ = reg[name]
    params = _apply_defaults(schema, config.get("params", {}))
    try:
        jsonschema.validate(params, schema)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"params rejected for {name}: {exc.message}") from exc
    return name, params, int(config.get("seed", 0))


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def write_csv(path: str, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if not rows:
            fh.write("\n")
            return
        fields = list(rows[0].keys())
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _json_ready(obj):
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, float):
        return obj
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    return obj


def run_config(
    config: dict, out_dir: str, seed_override=None, plot: bool = False
) -> dict:
    """Validate, run, and write artifacts; returns the summary dict."""
    name, params, seed = validate_config(config)
    if seed_override is not None:
        seed = int(seed_override)
    runner, _, _ = registry()[name]
    ctx = default_context()
    resolved = {"experiment": name, "seed": seed, "params": params}
    started = time.time()
    rows, extras = runner(params, seed, ctx)
    elapsed = time.time() - started
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{name}.csv")
    write_csv(csv_path, rows)
    summary = {
        "experiment": name,
        "config": resolved,
        "config_hash": config_hash(resolved),
        "seed": seed,
        "library_version": __version__,
        "backend": backend_name(),
        "wall_clock_s": round(elapsed, 3),
        "rows": len(rows),
        "results": _json_ready(extras),
        "csv": csv_path,
    }
    summary_path = os.path.join(out_dir, f"{name}_summary.json")
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if plot:
        _emit_plot(rows, os.path.join(out_dir, f"{name}.svg"))
    return summary


def _emit_plot(rows: list[dict], path: str) -> None:
    if not rows:
        return
    try:
        import matplotlib

        matplotlib.use("svg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise MultactError(
            "plot emission needs matplotlib (install extra 'plots')"
        ) from exc
    numeric_cols = []
    for key in rows[0]:
        try:
            [float(r[key]) for r in rows]
            numeric_cols.append(key)
        except (TypeError, ValueError):
            continue
    if len(numeric_cols) < 2:
        return
    xkey = numeric_cols[0]
    xs = [float(r[xkey]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    for key in numeric_cols[1:6]:
        ax.plot(xs, [float(r[key]) for r in rows], marker="o", label=key)
    ax.set_xlabel(xkey)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _cmd_run(args) -> int:
    config = load_config(args.config)
    if args.sieve_cache and os.path.exists(args.sieve_cache):
        default_context().attach(FactorTable.load(args.sieve_cache))
    if args.threads:
        _cap_threads(args.threads)
    summary = run_config(
        config, args.out, seed_override=args.seed, plot=args.plot
    )
    print(json.dumps(summary["results"], sort_keys=True))
    print(f"wrote {summary['csv']}")
    return 0


def _cap_threads(threads: int) -> None:
    if backend_name() == "numba":
        import numba

        try:
            numba.set_num_threads(max(1, threads))
        except ValueError:
            pass


def _cmd_list(args) -> int:
    for name in experiment_names():
        _, _, desc = registry()[name]
        print(f"{name:34s} {desc}")
    return 0


def _cmd_sieve(args) -> int:
    table = build_factor_table(args.limit)
    table.save(args.sieve_cache)
    print(f"wrote spf table for limit {args.limit} to {args.sieve_cache}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multact-lab",
        description="reproducible experiments with multiplicative structures",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a JSON config")
    p_run.add_argument("config", help="path to the experiment config")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--threads", type=int, default=None, help="cap worker threads")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--sieve-cache", default=None, help="spf cache file to attach")
    p_run.add_argument("--plot", action="store_true", help="also emit an SVG chart")
    p_run.set_defaults(fn=_cmd_run)

    p_list = sub.add_parser("list", help="list the experiment registry")
    p_list.set_defaults(fn=_cmd_list)

    p_sieve = sub.add_parser("sieve", help="build and cache an spf table")
    p_sieve.add_argument("--limit", type=int, required=True)
    p_sieve.add_argument("--sieve-cache", required=True)
    p_sieve.set_defaults(fn=_cmd_sieve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SchemaError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except MultactError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
