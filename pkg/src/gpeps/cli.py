"""Command-line front end.

Exit codes: 0 success, 1 computation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import ENGINE_VERSION
from .analysis import (ChiSeries, abs_error_curve, extrapolate_chi, read_records, read_series,
                       records_to_csv, records_to_json, resolve_graph, run_sweep)
from .config import ExperimentConfig, read_config_file
from .errors import GpepsError, InvalidArgument
from .lattice import girth, is_bipartite, to_edge_list
from .plot import line_plot

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _add_experiment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value file; flags override its entries")
    p.add_argument("--size", help="eagle127, osprey433, condor1121, infinite or fixture:<name>")
    p.add_argument("--theta", help="value, comma list, grid:N or range:a:b:N")
    p.add_argument("--steps", type=int)
    p.add_argument("--chi", help="bond dimension or comma list")
    p.add_argument("--obs", nargs="+", action="extend",
                   help="avg_z, z@<site>, w10@n<k>, w17@n<k>, cw@<site>@n<k>, pauli:X1,Y2")
    p.add_argument("--bp", action="store_const", const=True, default=None,
                   help="belief-propagation re-gauging after every step")
    p.add_argument("--bp-tol", type=float)
    p.add_argument("--bp-iters", type=int)
    p.add_argument("--every-step", action="store_const", const=True, default=None,
                   help="record observables after every Trotter step")
    p.add_argument("--workers", type=int, help="parallel processes")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--json", help="JSON mirror output path")


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        cfg.update(read_config_file(args.config))
    cfg.update({
        "size": args.size, "theta": args.theta, "steps": args.steps, "chi": args.chi,
        "observables": args.obs, "bp": args.bp, "bp_tol": args.bp_tol,
        "bp_iters": args.bp_iters, "every_step": args.every_step, "workers": args.workers,
        "out": args.out, "json": args.json,
    })
    return cfg


def cmd_simulate(args, engine: str = "gpeps") -> int:
    cfg = _load_config(args)
    plan = cfg.to_plan(engine)
    records = run_sweep(plan)
    _write(records_to_csv(records), cfg.out)
    if cfg.json:
        Path(cfg.json).write_text(records_to_json(records))
    failed = [r for r in records if r.error]
    for r in failed:
        print(f"error at theta_h={r.theta_h} chi={r.chi} {r.observable}: {r.error}", file=sys.stderr)
    return EXIT_COMPUTE if failed else EXIT_OK


def cmd_lattice(args) -> int:
    g = resolve_graph(args.size)
    _write(to_edge_list(g), args.out)
    if args.stats:
        print(f"m={g.num_vertices} edges={len(g.edges)} max_degree={g.max_degree()} "
              f"girth={girth(g)} bipartite={is_bipartite(g)}", file=sys.stderr)
    return EXIT_OK


def cmd_compare(args) -> int:
    test = read_series(args.test, args.observable, args.chi, args.steps)
    ref = read_series(args.reference, args.observable, args.ref_chi, args.steps)
    curve = abs_error_curve(test, ref)
    lines = ["theta_h,abs_error"] + [f"{t!r},{e!r}" for t, e in curve]
    _write("\n".join(lines) + "\n", args.out)
    errs = [e for _, e in curve]
    print(f"points={len(errs)} max_abs_error={max(errs):.6e} mean_abs_error={sum(errs) / len(errs):.6e}",
          file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_extrapolate(args) -> int:
    recs = read_records(args.input)
    if args.observable:
        recs = [r for r in recs if r.observable == args.observable]
    if args.steps is not None:
        recs = [r for r in recs if r.steps == args.steps]
    groups: dict[tuple, dict[int, float]] = {}
    for r in recs:
        groups.setdefault((r.observable, r.steps, r.theta_h), {})[r.chi] = r.value
    if not groups:
        raise InvalidArgument("no rows to extrapolate")
    print("observable,steps,theta_h,intercept,slope,residual,chis")
    markers, fits = {}, {}
    for (obs, steps, theta), by_chi in sorted(groups.items()):
        series = ChiSeries(list(by_chi), list(by_chi.values()))
        fit = extrapolate_chi(series, args.k)
        print(f"{obs},{steps},{theta!r},{fit.intercept!r},{fit.slope!r},{fit.residual!r},"
              f"{' '.join(map(str, fit.chis_used))}")
        key = f"{obs} theta={theta:.4g}"
        markers[key] = [(1.0 / c, v) for c, v in zip(series.chis, series.values)]
        x_min = 1.0 / fit.chis_used[-1]
        fits[key] = [(0.0, fit.intercept), (1.0 / fit.chis_used[0], fit.intercept + fit.slope / fit.chis_used[0]),
                     (x_min, fit.intercept + fit.slope * x_min)]
    if args.svg:
        Path(args.svg).write_text(line_plot(fits, "1/chi", "value", "bond-dimension extrapolation",
                                            markers=markers))
    return EXIT_OK


def _parse_plot_spec(spec: str) -> dict[str, str]:
    out = {}
    for item in spec.split(","):
        if "=" not in item:
            raise UsageError(f"bad plot spec item {item!r}; use x=<col>,y=<col>[,group=<col>]")
        k, v = (s.strip() for s in item.split("=", 1))
        if k not in ("x", "y", "group", "where", "title"):
            raise UsageError(f"unknown plot spec key {k!r}")
        out[k] = v
    if "x" not in out or "y" not in out:
        raise UsageError("plot spec needs x= and y=")
    return out


def cmd_plot(args) -> int:
    import csv

    spec = _parse_plot_spec(args.spec)
    with open(args.input, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise UsageError("input CSV has no rows")
    cols = rows[0].keys()
    for k in ("x", "y", "group"):
        if k in spec and spec[k] not in cols:
            raise UsageError(f"column {spec[k]!r} not in {list(cols)}")
    if "where" in spec:
        col, _, val = spec["where"].partition(":")
        if col not in cols:
            raise UsageError(f"column {col!r} not in {list(cols)}")
        rows = [r for r in rows if r[col] == val]
    series: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        key = r[spec["group"]] if "group" in spec else spec["y"]
        try:
            series.setdefault(key, []).append((float(r[spec["x"]]), float(r[spec["y"]])))
        except ValueError:
            raise UsageError(f"non-numeric value in row {r}") from None
    series = {k: v for k, v in sorted(series.items())}
    xlabel = "theta_h" if spec["x"] == "theta_h" else spec["x"]
    svg = line_plot(series, xlabel, spec["y"], spec.get("title", ""))
    _write(svg, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gpeps", description="Graph PEPS kicked-Ising simulator")
    parser.add_argument("--version", action="version", version=ENGINE_VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice", help="export a connectivity graph as an edge list")
    p.add_argument("--size", required=True)
    p.add_argument("--out")
    p.add_argument("--stats", action="store_true", help="print counts, degree and girth to stderr")
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("simulate", help="run a gPEPS sweep")
    _add_experiment_args(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="run the exact statevector reference (<= 22 qubits)")
    _add_experiment_args(p)
    p.set_defaults(func=lambda a: cmd_simulate(a, engine="oracle"))

    p = sub.add_parser("compare", help="absolute-error curve between two theta series")
    p.add_argument("test")
    p.add_argument("reference")
    p.add_argument("--observable")
    p.add_argument("--chi", type=int, help="filter rows of the test file")
    p.add_argument("--ref-chi", type=int, help="filter rows of the reference file")
    p.add_argument("--steps", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("extrapolate", help="fit value against 1/chi")
    p.add_argument("input")
    p.add_argument("--k", type=int, default=5, help="number of largest chi values used")
    p.add_argument("--observable")
    p.add_argument("--steps", type=int)
    p.add_argument("--svg")
    p.set_defaults(func=cmd_extrapolate)

    p = sub.add_parser("plot", help="static SVG plot of a result CSV")
    p.add_argument("input")
    p.add_argument("--spec", default="x=theta_h,y=value,group=observable",
                   help="x=<col>,y=<col>[,group=<col>][,where=<col>:<value>][,title=<text>]")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, InvalidArgument, FileNotFoundError, KeyError) as exc:
        print(f"gpeps {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GpepsError as exc:
        print(f"gpeps {args.command}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
