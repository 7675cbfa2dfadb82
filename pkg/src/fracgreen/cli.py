"""Batch runner for verification scenarios.

Usage::

    fracgreen run config.json [--format json-lines|csv] [--out DIR]
                              [--seed N] [--jobs N] [--timing]
    fracgreen run --suite acceptance

A config is a JSON object ``{"seed": int, "scenarios": [...]}``; each
scenario is ``{"name": str, "kind": str, "params": {...}, "seed": int}``
with only ``kind`` required.  Records have the columns in :data:`COLUMNS`.
Floats are written with 17 significant digits and complex values as
``[re, im]``.  ``runtime_ms`` is null unless ``--timing`` is given, so
that repeated runs produce byte-identical files.  The exit status is 0
iff every check passes.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from .scenarios import Check, ConfigError, run_scenario, validate_params

COLUMNS = ("scenario", "check", "computed", "reference", "tolerance", "pass", "error_estimate", "runtime_ms")
TOP_KEYS = {"seed", "scenarios"}
SCENARIO_KEYS = {"name", "kind", "params", "seed"}
SUITES = ("acceptance",)


class UsageError(Exception):
    pass


# ----------------------------------------------------------------- config


def _line_of(text: str, pos: int) -> int:
    return text.count("\n", 0, pos) + 1


def load_config(text: str, source: str = "<config>") -> dict:
    """Parse and validate a config, returning normalized scenarios."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise UsageError(f"{source}: top level must be an object")
    unknown = sorted(set(raw) - TOP_KEYS)
    if unknown:
        raise UsageError(f"{source}: unknown top-level key(s) {unknown}; allowed: {sorted(TOP_KEYS)}")
    scenarios = raw.get("scenarios", [])
    if not isinstance(scenarios, list):
        raise UsageError(f"{source}: 'scenarios' must be a list")
    out = []
    for k, sc in enumerate(scenarios):
        where = f"{source}: scenarios[{k}]"
        if isinstance(sc, dict) and isinstance(sc.get("name"), str):
            pos = text.find(json.dumps(sc["name"]))
            if pos >= 0:
                where += f" (line {_line_of(text, pos)})"
        if not isinstance(sc, dict):
            raise UsageError(f"{where}: scenario must be an object")
        bad = sorted(set(sc) - SCENARIO_KEYS)
        if bad:
            raise UsageError(f"{where}: unknown key(s) {bad}; allowed: {sorted(SCENARIO_KEYS)}")
        if "kind" not in sc:
            raise UsageError(f"{where}: missing field 'kind'")
        try:
            params = validate_params(sc["kind"], sc.get("params", {}), where)
        except ConfigError as exc:
            raise UsageError(str(exc)) from None
        seed = sc.get("seed")
        if seed is not None and not isinstance(seed, int):
            raise UsageError(f"{where}: field 'seed' must be an integer")
        out.append({"name": sc.get("name", f"{sc['kind']}-{k}"), "kind": sc["kind"], "params": params, "seed": seed})
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise UsageError(f"{source}: field 'seed' must be an integer")
    return {"seed": seed, "scenarios": out}


def suite_text(name: str) -> str:
    if name not in SUITES:
        raise UsageError(f"unknown suite {name!r}; known: {list(SUITES)}")
    return resources.files("fracgreen").joinpath("suites", f"{name}.json").read_text()


# ------------------------------------------------------------------ running


def run(config: dict, seed: int | None = None, jobs: int = 1, timing: bool = False):
    """Yield ``(scenario, records)`` per scenario, in config order."""
    base = config["seed"] if seed is None else seed
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        for k, sc in enumerate(config["scenarios"]):
            s = sc["seed"] if sc["seed"] is not None else sc["params"].get("seed")
            rng = np.random.default_rng(np.random.SeedSequence([base, k] if s is None else [base, k, s]))
            params = {key: val for key, val in sc["params"].items() if key != "seed"}
            try:
                checks = run_scenario(sc["kind"], params, rng, pool, timing)
            except (ArithmeticError, ValueError) as exc:
                checks = [Check(f"error: {type(exc).__name__}: {exc}", None, None, 0.0, False)]
            yield sc, [record(sc["name"], c) for c in checks]


def record(name: str, c: Check) -> dict:
    return {
        "scenario": name,
        "check": c.check,
        "computed": c.computed,
        "reference": c.reference,
        "tolerance": c.tolerance,
        "pass": bool(c.passed),
        "error_estimate": c.error_estimate,
        "runtime_ms": c.runtime_ms,
    }


# ----------------------------------------------------------------- emitting


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def fmt_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(float(v))
    if isinstance(v, (complex, np.complexfloating)):
        return f"[{fmt_float(v.real)}, {fmt_float(v.imag)}]"
    if isinstance(v, str):
        return json.dumps(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def json_line(rec: dict) -> str:
    return "{" + ", ".join(f"{json.dumps(k)}: {fmt_value(rec[k])}" for k in COLUMNS) + "}"


def csv_row(rec: dict) -> list:
    row = []
    for k in COLUMNS:
        v = rec[k]
        if isinstance(v, str):
            row.append(v)
        elif v is None:
            row.append("")
        else:
            row.append(fmt_value(v).strip('"'))
    return row


class Emitter:
    def __init__(self, stream, fmt: str):
        self.stream = stream
        self.fmt = fmt
        if fmt == "csv":
            self.writer = csv.writer(stream, lineterminator="\n")
            self.writer.writerow(COLUMNS)

    def write(self, records) -> None:
        for rec in records:
            if self.fmt == "csv":
                self.writer.writerow(csv_row(rec))
            else:
                self.stream.write(json_line(rec) + "\n")
        self.stream.flush()


def summary_json(rows) -> str:
    status = "pass" if all(r["status"] == "pass" for r in rows) else "fail"
    return json.dumps({"status": status, "scenarios": rows}, indent=2) + "\n"


# --------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracgreen", description="Run boundary-symbol and Green-identity verification scenarios.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a config file or a built-in suite")
    r.add_argument("config", nargs="?", help="path to a JSON config")
    r.add_argument("--suite", choices=SUITES, help="run a built-in suite instead of a config file")
    r.add_argument("--format", choices=("json-lines", "csv"), default="json-lines")
    r.add_argument("--out", type=Path, help="directory for report and summary files (default: stdout)")
    r.add_argument("--seed", type=int, help="override the config seed")
    r.add_argument("--jobs", type=int, default=1, help="worker threads inside a scenario")
    r.add_argument("--timing", action="store_true", help="record wall-clock runtime_ms per scenario")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if (args.config is None) == (args.suite is None):
            raise UsageError("give exactly one of <config> or --suite")
        if args.suite:
            text, source = suite_text(args.suite), f"suite:{args.suite}"
        else:
            try:
                text, source = Path(args.config).read_text(), args.config
            except OSError as exc:
                raise UsageError(f"cannot read config: {exc}") from None
        config = load_config(text, source)
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
    except UsageError as exc:
        print(f"fracgreen: error: {exc}", file=sys.stderr)
        return 2

    ext = "csv" if args.format == "csv" else "jsonl"
    try:
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            stream = open(args.out / f"report.{ext}", "w", newline="")
        else:
            stream = sys.stdout
    except OSError as exc:
        print(f"fracgreen: error: cannot open output: {exc}", file=sys.stderr)
        return 3

    rows = []
    try:
        emitter = Emitter(stream, args.format)
        for sc, records in run(config, args.seed, args.jobs, args.timing):
            emitter.write(records)
            failed = sum(not r["pass"] for r in records)
            status = "fail" if failed else "pass"
            rows.append({"name": sc["name"], "kind": sc["kind"], "checks": len(records), "failed": failed, "status": status})
            print(f"[{status.upper()}] {sc['name']} ({sc['kind']}): {len(records) - failed}/{len(records)} checks", file=sys.stderr)
        if args.out is not None:
            (args.out / "summary.json").write_text(summary_json(rows))
    except OSError as exc:
        print(f"fracgreen: error: write failed: {exc}", file=sys.stderr)
        return 3
    finally:
        if stream is not sys.stdout:
            stream.close()
    return 0 if all(r["status"] == "pass" for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
