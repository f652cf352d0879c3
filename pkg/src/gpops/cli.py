"""Batch front-end: verification campaigns, ODE solves, and table dumps.

Subcommands
-----------
verify        run the Monte-Carlo verification and write report.json +
              deviations.csv; exit 0 on pass, 2 on tolerance failure.
solve         solve an operator equation by GP collocation and write
              solution.json + solution.csv; exit 2 when the configured
              error bound is exceeded.
sample        dump a seeded prior ensemble to ensemble.csv (+ meta).
kernel-table  tabulate k, T1 k, T2 k, T1 T2 k on the grid square.

All outputs are byte-deterministic given (config, seed); config parse errors
exit 1 with diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, load_config
from .conditioning import Observation, solve_linear_ode
from .errors import ConfigError, GpopsError
from .grids import Grid
from .linalg import cross_tabulate
from .operators import ARG1, ARG2, apply_arg
from .reportio import csv_lines, dumps_json
from .sampling import sample_paths
from .verify import verify_theorem

__all__ = ["main"]

EXIT_PASS = 0
EXIT_ERROR = 1
EXIT_TOLERANCE = 2


def _out_dir(cfg: RunConfig) -> Path:
    path = Path(cfg.output)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write(path: Path, text: str):
    path.write_bytes(text.encode("utf-8"))


def cmd_verify(cfg: RunConfig) -> int:
    """Run the Monte-Carlo verification campaign and write its report."""
    report = verify_theorem(
        cfg.prior, cfg.operator, cfg.grid, cfg.samples, cfg.seed, cfg.tolerances,
        expect_rejection=(cfg.expected == "rejection"), threads=cfg.threads,
        config_echo=dict(cfg.echo),
    )
    out = _out_dir(cfg)
    _write(out / "report.json", report.to_json())
    _write(out / "deviations.csv", report.to_csv())
    print(f"verify: mode={report.mode} passed={report.passed} -> {out/'report.json'}")
    return EXIT_PASS if report.passed else EXIT_TOLERANCE


def _boundary_observations(cfg: RunConfig):
    from .config import parse_operator_spec

    out = []
    for spec in cfg.problem["boundary"]:
        op = parse_operator_spec(spec.get("operator"))
        out.append(Observation(operator=op, location=float(spec["location"]),
                               value=float(spec["value"]),
                               noise_sd=float(spec.get("noise_sd", 0.0))))
    return out


def cmd_solve(cfg: RunConfig) -> int:
    """Solve the configured operator equation by GP collocation."""
    if cfg.problem is None:
        raise ConfigError("solve needs a 'problem' section in the config")
    rhs = cfg.problem["rhs_fn"]
    count = cfg.problem["collocation_count"]
    collocation = None
    if count:
        pts = np.linspace(cfg.grid.points[0], cfg.grid.points[-1], count)
        collocation = Grid(pts)
    posterior = solve_linear_ode(
        cfg.operator, rhs, _boundary_observations(cfg), cfg.grid, cfg.prior,
        collocation=collocation,
        collocation_noise_sd=float(cfg.problem["collocation_noise_sd"]),
    )
    doc = posterior.to_dict()
    exit_code = EXIT_PASS
    if cfg.problem.get("reference_fn") is not None:
        ref = cfg.problem["reference_fn"](cfg.grid.points)
        max_err = float(np.max(np.abs(posterior.mean - ref)))
        doc["reference"] = cfg.problem["reference"]
        doc["max_abs_error"] = max_err
        bound = cfg.problem.get("max_error")
        if bound is not None:
            doc["max_error_bound"] = float(bound)
            doc["passed"] = bool(max_err <= bound)
            if not doc["passed"]:
                exit_code = EXIT_TOLERANCE
    out = _out_dir(cfg)
    _write(out / "solution.json", dumps_json(doc))
    _write(out / "solution.csv", posterior.to_csv())
    print(f"solve: log_marginal={posterior.log_marginal:.6g} -> {out/'solution.json'}")
    return exit_code


def cmd_sample(cfg: RunConfig) -> int:
    """Dump a seeded prior ensemble."""
    ensemble = sample_paths(cfg.prior, cfg.grid, cfg.samples, cfg.seed,
                            threads=cfg.threads)
    header = ["path"] + [f"x{i}" for i in range(len(cfg.grid))]
    rows = [[i] + [float(v) for v in row] for i, row in enumerate(ensemble.paths)]
    meta = {
        "schema_version": 1,
        "kind": "ensemble",
        "grid": [float(v) for v in cfg.grid.points],
        "n_paths": ensemble.n_paths,
        "seed": ensemble.seed,
    }
    out = _out_dir(cfg)
    _write(out / "ensemble.csv", csv_lines(header, rows))
    _write(out / "ensemble.json", dumps_json(meta))
    print(f"sample: {ensemble.n_paths} paths on {len(cfg.grid)} points -> {out/'ensemble.csv'}")
    return EXIT_PASS


def cmd_kernel_table(cfg: RunConfig) -> int:
    """Tabulate the kernel and its operator transforms on the grid square."""
    k = cfg.kernel
    op = cfg.operator
    t2k = apply_arg(op, ARG2, k)
    t1k = apply_arg(op, ARG1, k)
    t1t2k = apply_arg(op, ARG1, t2k)
    g = cfg.grid
    tables = [cross_tabulate(fn, g, g) for fn in
              (lambda a, b: k(a, b), t2k, t1k, t1t2k)]
    rows = []
    x = g.points
    for i in range(len(g)):
        for j in range(len(g)):
            rows.append((float(x[i]), float(x[j]), float(tables[0][i, j]),
                         float(tables[2][i, j]), float(tables[1][i, j]),
                         float(tables[3][i, j])))
    out = _out_dir(cfg)
    _write(out / "kernel_table.csv",
           csv_lines(("x1", "x2", "k", "T1k", "T2k", "T1T2k"), rows))
    print(f"kernel-table: {len(rows)} rows -> {out/'kernel_table.csv'}")
    return EXIT_PASS


_COMMANDS = {
    "verify": cmd_verify,
    "solve": cmd_solve,
    "sample": cmd_sample,
    "kernel-table": cmd_kernel_table,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gpops",
        description="Gaussian process priors under linear differential operators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", required=True, help="path to the YAML run config")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="override the output directory")
        p.add_argument("--threads", type=int, default=None, help="override thread count")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, seed=args.seed, output=args.out,
                          threads=args.threads)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except GpopsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
