"""Sweep orchestration, error curves and 1/chi extrapolation."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import ENGINE_VERSION
from .bp import bp_gauge
from .circuit import (INFINITE, AverageZ, CliffordWeightN, Direction, Observable, PauliString, SingleZ,
                      check_observable, parse_observable)
from .errors import GpepsError, InvalidArgument
from .lattice import FIXTURES, Graph, HeavyHexSize, build_heavy_hex, build_unit_cell, load_fixture
from .peps import (average_magnetization, clifford_weight_measure, init_product_state, measure_site,
                   trotter_step)
from .tensor import DEFAULT_FLOOR

CSV_FIELDS = ["size", "theta_h", "steps", "chi", "observable", "site", "value",
              "max_trunc_err", "wall_time_s", "config_hash", "engine_version", "error"]


@dataclass
class ResultRecord:
    size: str
    theta_h: float
    steps: int
    chi: int
    observable: str
    site: int | None
    value: float
    max_trunc_err: float
    wall_time_s: float
    config_hash: str = ""
    engine_version: str = ENGINE_VERSION
    error: str = ""

    def sort_key(self):
        return (self.theta_h, self.chi, self.observable, self.steps,
                -1 if self.site is None else self.site)


@dataclass
class ChiSeries:
    chis: list[int]
    values: list[float]

    def __post_init__(self):
        if len(self.chis) != len(self.values):
            raise InvalidArgument("chis and values differ in length")
        order = np.argsort(self.chis, kind="stable")
        self.chis = [int(self.chis[i]) for i in order]
        self.values = [float(self.values[i]) for i in order]
        if any(b <= a for a, b in zip(self.chis, self.chis[1:])):
            raise InvalidArgument("chi values must be distinct")


@dataclass(frozen=True)
class ChiFit:
    intercept: float
    slope: float
    residual: float
    chis_used: tuple[int, ...]


def extrapolate_chi(series: ChiSeries, k: int = 5) -> ChiFit:
    """Least-squares fit of value = intercept + slope / chi over the k largest chi.

    ``residual`` is the root-mean-square deviation of the fitted points.
    """
    if k < 2:
        raise InvalidArgument("fit window k must be >= 2")
    if len(series.chis) < k:
        raise InvalidArgument(f"need at least {k} chi values, got {len(series.chis)}")
    chis = np.array(series.chis[-k:], dtype=float)
    vals = np.array(series.values[-k:])
    design = np.column_stack([np.ones_like(chis), 1.0 / chis])
    coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
    resid = vals - design @ coef
    return ChiFit(float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid**2))),
                  tuple(int(c) for c in chis))


def abs_error_curve(test: Sequence[tuple[float, float]], reference: Sequence[tuple[float, float]],
                    atol: float = 1e-9) -> list[tuple[float, float]]:
    """Pointwise ``|test - reference|`` on a shared theta grid."""
    test = sorted(test)
    reference = sorted(reference)
    if len(test) != len(reference) or any(
        abs(a[0] - b[0]) > atol for a, b in zip(test, reference)
    ):
        raise InvalidArgument("theta grids of test and reference do not match")
    return [(t[0], abs(t[1] - r[1])) for t, r in zip(test, reference)]


# ------------------------------------------------------------------ sweeps

SIZES = tuple(s.value for s in HeavyHexSize) + (INFINITE,)


def resolve_graph(size: str) -> Graph:
    if size in SIZES[:-1]:
        return build_heavy_hex(size)
    if size == INFINITE:
        return build_unit_cell().quotient()
    if size.startswith("fixture:"):
        return load_fixture(size.split(":", 1)[1])
    raise InvalidArgument(f"unknown size {size!r}; choose from {SIZES} or fixture:{{{','.join(FIXTURES)}}}")


@dataclass
class SweepPlan:
    size: str
    thetas: list[float]
    steps: int
    chis: list[int]
    observables: list[str]
    bp: tuple[float, int] | None = None
    every_step: bool = False
    engine: str = "gpeps"
    lambda_floor: float = DEFAULT_FLOOR
    workers: int = 1
    _parsed: list = field(default=None, init=False, repr=False, compare=False)

    def validate(self) -> None:
        """Check every field; raises ``InvalidArgument`` before any work is done."""
        if self.engine not in ("gpeps", "oracle"):
            raise InvalidArgument(f"unknown engine {self.engine!r}")
        g = resolve_graph(self.size)
        if self.engine == "oracle" and self.size == INFINITE:
            raise InvalidArgument("the oracle cannot run the infinite lattice")
        if self.steps < 0:
            raise InvalidArgument("steps must be >= 0")
        if not self.thetas:
            raise InvalidArgument("empty theta grid")
        for th in self.thetas:
            if not (0.0 <= th <= math.pi / 2 + 1e-12) or not math.isfinite(th):
                raise InvalidArgument(f"theta_h={th} outside [0, pi/2]")
        if not self.chis or any(c < 1 for c in self.chis):
            raise InvalidArgument("chi values must be >= 1")
        if not self.observables:
            raise InvalidArgument("no observables requested")
        if self.bp is not None and (self.bp[0] <= 0 or self.bp[1] < 1):
            raise InvalidArgument("bp needs tol > 0 and iters >= 1")
        if self.bp is not None and self.size == INFINITE:
            raise InvalidArgument("bp gauging is only available on finite graphs")
        if self.workers < 1:
            raise InvalidArgument("workers must be >= 1")
        parsed = []
        for text in self.observables:
            obs = parse_observable(text, self.size, default_steps=self.steps)
            check_observable(obs, g)
            if self.engine == "gpeps" and isinstance(obs, PauliString) and obs.weight > 1:
                raise InvalidArgument(
                    f"{text}: multi-site Pauli strings are measured through the Clifford "
                    "protocol (w10/w17/cw@...) on the gPEPS engine")
            parsed.append(obs)
        self._parsed = parsed

    def identity(self) -> dict:
        """Fields that determine the computed values."""
        return {
            "size": self.size, "thetas": [float(t) for t in self.thetas], "steps": self.steps,
            "chis": list(self.chis), "observables": list(self.observables),
            "bp": list(self.bp) if self.bp else None, "every_step": self.every_step,
            "engine": self.engine, "lambda_floor": self.lambda_floor,
        }

    def config_hash(self) -> str:
        blob = json.dumps(self.identity(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _site_of(obs: Observable) -> int | None:
    if isinstance(obs, SingleZ):
        return obs.site
    if isinstance(obs, CliffordWeightN):
        return obs.anchor
    if isinstance(obs, PauliString) and obs.weight == 1:
        return obs.terms[0][0]
    return None


def _measure_gpeps(state, obs: Observable) -> float:
    if isinstance(obs, AverageZ):
        return average_magnetization(state)
    if isinstance(obs, SingleZ):
        return measure_site(state, obs.site, "Z")
    if isinstance(obs, PauliString):
        (site, letter), = obs.terms
        return measure_site(state, site, letter)
    return clifford_weight_measure(state, obs.back_steps, obs.anchor)


def _measure_oracle(sv, g: Graph, obs: Observable) -> float:
    from . import oracle

    if isinstance(obs, AverageZ):
        return oracle.average_magnetization_exact(sv)
    if isinstance(obs, SingleZ):
        return oracle.expect_pauli(sv, PauliString(((obs.site, "Z"),)))
    if isinstance(obs, PauliString):
        return oracle.expect_pauli(sv, obs)
    omega = oracle.evolve_exact(g, math.pi / 2, obs.back_steps, Direction.ADJOINT, initial=sv)
    return oracle.expect_pauli(omega, PauliString(((obs.anchor, "Z"),)))


def _run_unit(args) -> list[ResultRecord]:
    plan, theta, chi = args
    g = resolve_graph(plan.size)
    chash = plan.config_hash()
    observables = plan._parsed
    record_steps = range(1, plan.steps + 1) if plan.every_step else [plan.steps]
    out = []

    def emit(step, obs, fn, t_evolve, trunc):
        t0 = time.perf_counter()
        try:
            val, err = float(fn()), ""
        except GpepsError as exc:
            val, err = float("nan"), f"{type(exc).__name__}: {exc}"
        out.append(ResultRecord(
            plan.size, float(theta), step, chi, obs.label, _site_of(obs), val, trunc,
            t_evolve + time.perf_counter() - t0, chash, ENGINE_VERSION, err))

    if plan.engine == "oracle":
        from .oracle import StateVector, trotter_step_exact

        t0 = time.perf_counter()
        sv = StateVector.zeros(g.num_vertices)
        for step in range(0, plan.steps + 1):
            if step > 0:
                trotter_step_exact(sv, g, theta)
            if step in record_steps or (plan.steps == 0 and step == 0):
                elapsed = time.perf_counter() - t0
                for obs in observables:
                    emit(step, obs, lambda o=obs: _measure_oracle(sv, g, o), elapsed, 0.0)
                t0 = time.perf_counter()
        return out

    t0 = time.perf_counter()
    state = init_product_state(g, chi, plan.lambda_floor)
    failure = ""
    trunc = 0.0
    for step in range(0, plan.steps + 1):
        if step > 0 and not failure:
            try:
                trunc = max(trunc, trotter_step(state, theta))
                if plan.bp is not None:
                    bp_gauge(state, *plan.bp)
            except GpepsError as exc:
                failure = f"{type(exc).__name__}: {exc}"
        if step in record_steps or (plan.steps == 0 and step == 0):
            elapsed = time.perf_counter() - t0
            for obs in observables:
                if failure:
                    out.append(ResultRecord(plan.size, float(theta), step, chi, obs.label,
                                            _site_of(obs), float("nan"), trunc, elapsed,
                                            chash, ENGINE_VERSION, failure))
                else:
                    emit(step, obs, lambda o=obs: _measure_gpeps(state, o), elapsed, trunc)
            t0 = time.perf_counter()
    return out


def run_sweep(plan: SweepPlan) -> list[ResultRecord]:
    """Evaluate every (theta, chi, observable) point of ``plan``.

    Each (theta, chi) pair is evolved once and all observables are measured
    on it. Points are independent, so ``plan.workers > 1`` runs them in
    separate processes without changing any value. A failing point yields
    records with ``value = nan`` and a filled ``error`` field.
    """
    plan.validate()
    chis = [0] if plan.engine == "oracle" else list(plan.chis)
    units = [(plan, th, chi) for th in plan.thetas for chi in chis]
    if plan.workers > 1 and len(units) > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            chunks = list(pool.map(_run_unit, units))
    else:
        chunks = [_run_unit(u) for u in units]
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=ResultRecord.sort_key)
    return records


def chi_convergence_report(records: Iterable[ResultRecord], observable: str) -> dict[int, dict[int, float]]:
    """``{steps: {chi: |value(chi) - value(chi_max)|}}`` for one observable."""
    table: dict[int, dict[int, float]] = {}
    for r in records:
        if r.observable == observable:
            table.setdefault(r.steps, {})[r.chi] = r.value
    report = {}
    for step, by_chi in sorted(table.items()):
        ref = by_chi[max(by_chi)]
        report[step] = {chi: abs(v - ref) for chi, v in sorted(by_chi.items())}
    return report


# ------------------------------------------------------------------ I/O


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def records_to_csv(records: Iterable[ResultRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        d = asdict(r)
        writer.writerow([_fmt(d[k]) for k in CSV_FIELDS])
    return buf.getvalue()


def records_to_json(records: Iterable[ResultRecord]) -> str:
    rows = []
    for r in records:
        d = asdict(r)
        rows.append({k: (None if isinstance(d[k], float) and math.isnan(d[k]) else d[k])
                     for k in CSV_FIELDS})
    return json.dumps(rows, indent=1) + "\n"


def read_records(path: str | Path) -> list[ResultRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        out.append(ResultRecord(
            size=row.get("size", ""),
            theta_h=float(row["theta_h"]),
            steps=int(row.get("steps") or 0),
            chi=int(row.get("chi") or 0),
            observable=row.get("observable", ""),
            site=int(row["site"]) if row.get("site") else None,
            value=float(row["value"]),
            max_trunc_err=float(row.get("max_trunc_err") or 0.0),
            wall_time_s=float(row.get("wall_time_s") or 0.0),
            config_hash=row.get("config_hash", ""),
            engine_version=row.get("engine_version", ""),
            error=row.get("error", ""),
        ))
    return out


def read_series(path: str | Path, observable: str | None = None, chi: int | None = None,
                steps: int | None = None) -> list[tuple[float, float]]:
    """Load a ``(theta_h, value)`` series, optionally filtered.

    Plain two-column ``theta_h,value`` reference files are accepted as is.
    """
    recs = read_records(path)
    if observable is not None:
        recs = [r for r in recs if r.observable == observable]
    if chi is not None:
        recs = [r for r in recs if r.chi == chi]
    if steps is not None:
        recs = [r for r in recs if r.steps == steps]
    thetas = [r.theta_h for r in recs]
    if len(set(thetas)) != len(thetas):
        raise InvalidArgument(f"{path}: several rows per theta_h; filter by observable/chi/steps")
    return [(r.theta_h, r.value) for r in recs]
