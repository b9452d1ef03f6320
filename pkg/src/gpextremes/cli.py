"""Command line front end.

Two subcommands, both driven by a single JSON config document:

``run CONFIG.json``
    Execute the experiment named in the config and write ``<slug>.csv``
    (deterministic) plus ``<slug>.json`` (sidecar with wall-clock time)
    to the output directory.  A failing statistical experiment is re-run
    once with an independent seed derived from the first by a fixed
    offset, and fails hard only when both runs fail; the deciding run's
    files keep the plain slug, the superseded first attempt is kept
    under ``<slug>-first-attempt.*``.  Exit status 0 when the deciding
    run passed, 1 otherwise.

``validate CONFIG.json``
    Check a config without running it.  An experiment config is
    resolved against its schema and echoed back.  A kernel document
    (``{"type": ...}``) is instead checked for membership in the valid
    family (conditional negative semidefiniteness per finiteness block)
    on the grid given in the document; exit status 1 when the kernel is
    rejected.

Configuration errors exit with status 2 and list every problem found.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .errors import ConfigError, GpxError
from .experiments import EXPERIMENTS, resolve_config, run_experiment, write_result
from .kernels import CustomMatrix, gamma_matrix, kernel_from_config, validate_negative_definite

# Offset between the first seed and the one independent retry allowed to a
# failing statistical run.  Fixed so that reruns of the same config+seed
# reproduce the retry too.
RETRY_SEED_OFFSET = 1_000_003


def _load_config(path: str) -> dict:
    try:
        with open(path, "r") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError([f"cannot read config file: {e}"]) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError([f"config file is not valid JSON: {e}"]) from None
    if not isinstance(doc, dict):
        raise ConfigError(["config document must be a JSON object"])
    return doc


def _split_experiment_config(doc: dict, seed_flag) -> tuple[str, int, dict]:
    doc = dict(doc)
    name = doc.pop("experiment")
    seed = seed_flag if seed_flag is not None else doc.pop("seed", None)
    doc.pop("seed", None)
    if seed is None:
        raise ConfigError(["seed is mandatory: set it in the config or pass --seed"])
    return name, seed, doc


def _show(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.6g" % v
    return str(v)


def _print_attempt(result) -> None:
    table = result.table
    print(f"experiment {result.slug}  seed {result.seed}  rows {len(table.rows)}  "
          f"runtime {result.runtime_seconds:.2f}s")
    for row in table.failures():
        pairs = ", ".join(f"{c}={_show(v)}" for c, v in zip(table.columns, row))
        print(f"  [FAIL] {pairs}")


def _cmd_run(args) -> int:
    doc = _load_config(args.config)
    if "experiment" not in doc:
        raise ConfigError(["run needs an experiment config with an 'experiment' key"])
    name, seed, overrides = _split_experiment_config(doc, args.seed)
    result = run_experiment(name, seed, overrides, workers=args.workers)
    _print_attempt(result)
    first = None
    if not result.all_passed and name != "kernel-check":
        first = result
        retry_seed = int(seed) + RETRY_SEED_OFFSET
        print(f"statistical failure at seed {seed}; retrying once with seed {retry_seed}")
        result = run_experiment(name, retry_seed, overrides, workers=args.workers)
        _print_attempt(result)
    if first is not None:
        write_result(dataclasses.replace(first, slug=f"{first.slug}-first-attempt"), args.out)
    csv_path, json_path = write_result(result, args.out)
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    verdict = "PASS" if result.all_passed else "FAIL"
    print(f"result: {verdict}")
    return 0 if result.all_passed else 1


def _kernel_grid(doc: dict, spec) -> list:
    if "grid" in doc:
        grid = doc["grid"]
        if not isinstance(grid, list) or not grid:
            raise ConfigError(["kernel 'grid' must be a nonempty JSON list"])
        return [tuple(x) if isinstance(x, list) else x for x in grid]
    if isinstance(spec, CustomMatrix):
        return list(spec.sites)
    raise ConfigError(["parametric kernels need a 'grid' to validate on"])


def _cmd_validate(args) -> int:
    doc = _load_config(args.config)
    if "experiment" in doc:
        name, seed, overrides = _split_experiment_config(doc, None)
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ConfigError([f"seed must be a nonnegative integer, got {seed!r}"])
        cfg = resolve_config(name, overrides)
        print(f"experiment {name}  seed {seed}")
        for key in sorted(cfg):
            print(f"  {key} = {_show(cfg[key])}")
        print("config ok")
        return 0
    if "type" in doc:
        spec = kernel_from_config({k: v for k, v in doc.items() if k not in ("grid", "tol")})
        grid = _kernel_grid(doc, spec)
        tol = args.tol if args.tol is not None else doc.get("tol")
        g = gamma_matrix(spec, grid)
        report = validate_negative_definite(g, tol=tol)
        print(f"sites {g.dim}  blocks {len(report.blocks)}  tol {report.tol:.3g}")
        for br in report.blocks:
            status = "PASS" if br.passed else "FAIL"
            print(f"  [{status}] block {list(br.indices)}  top eigenvalue {br.max_eigenvalue:.6g}")
        verdict = "valid" if report.passed else "NOT valid"
        print(f"result: kernel is {verdict} on this grid")
        return 0 if report.passed else 1
    raise ConfigError(["config must contain an 'experiment' key or a kernel 'type' key"])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gpextremes",
        description="Simulation and verification of extreme-value limits of Gaussian processes.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run the experiment described by a JSON config")
    runp.add_argument("config", help=f"JSON config naming one of: {', '.join(EXPERIMENTS)}")
    runp.add_argument("--seed", type=int, default=None,
                      help="override the config seed; the seed fully determines the CSV")
    runp.add_argument("--out", default="results", help="output directory (default: results)")
    runp.add_argument("--workers", type=int, default=1,
                      help="sampling threads; never changes output, only speed")

    valp = sub.add_parser("validate", help="check a config or kernel document without running")
    valp.add_argument("config", help="experiment config, or kernel document with a 'grid'")
    valp.add_argument("--tol", type=float, default=None,
                      help="kernel eigenvalue tolerance (default: scaled 1e-8)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_validate(args)
    except ConfigError as e:
        for line in str(e).splitlines():
            print(f"error: {line}", file=sys.stderr)
        return 2
    except GpxError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
