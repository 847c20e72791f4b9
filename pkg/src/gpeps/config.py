"""Experiment configuration: key-value files merged with command-line flags."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import SweepPlan
from .bp import DEFAULT_MAX_ITERS, DEFAULT_TOL
from .errors import InvalidArgument

DEFAULT_GRID_POINTS = 17

_PI_EXPR = re.compile(r"^(?:(?P<num>[0-9.]+)\s*\*?\s*)?pi(?:\s*/\s*(?P<den>[0-9.]+))?$")


def parse_angle(text: str) -> float:
    t = text.strip().lower()
    m = _PI_EXPR.match(t)
    if m:
        num = float(m.group("num")) if m.group("num") else 1.0
        den = float(m.group("den")) if m.group("den") else 1.0
        return num * math.pi / den
    try:
        return float(t)
    except ValueError:
        raise InvalidArgument(f"cannot parse angle {text!r}") from None


def parse_thetas(text: str) -> list[float]:
    """``0.7``, ``0.3,0.7,pi/4``, ``grid:17`` (evenly spaced on [0, pi/2]) or
    ``range:a:b:n``."""
    t = text.strip().lower()
    if t.startswith("grid"):
        n = int(t.split(":", 1)[1]) if ":" in t else DEFAULT_GRID_POINTS
        if n < 1:
            raise InvalidArgument("grid needs at least one point")
        if n == 1:
            return [0.0]
        return [i * (math.pi / 2) / (n - 1) for i in range(n)]
    if t.startswith("range:"):
        parts = t.split(":")
        if len(parts) != 4:
            raise InvalidArgument("range spec is range:start:stop:count")
        a, b, n = parse_angle(parts[1]), parse_angle(parts[2]), int(parts[3])
        if n < 2:
            return [a]
        return [a + (b - a) * i / (n - 1) for i in range(n)]
    return [parse_angle(x) for x in t.split(",") if x.strip()]


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise InvalidArgument(f"expected comma-separated integers, got {text!r}") from None


def parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off", ""):
        return False
    raise InvalidArgument(f"expected a boolean, got {text!r}")


@dataclass
class ExperimentConfig:
    size: str = ""
    theta: str = "grid:17"
    steps: int = 5
    chi: str = "32"
    observables: list[str] = field(default_factory=lambda: ["avg_z"])
    bp: bool = False
    bp_tol: float = DEFAULT_TOL
    bp_iters: int = DEFAULT_MAX_ITERS
    every_step: bool = False
    workers: int = 1
    out: str | None = None
    json: str | None = None

    KEYS = ("size", "theta", "steps", "chi", "observables", "bp", "bp_tol", "bp_iters",
            "every_step", "workers", "out", "json")

    def update(self, values: dict) -> None:
        for key, raw in values.items():
            if raw is None:
                continue
            key = key.replace("-", "_")
            if key in ("obs", "observable"):
                key = "observables"
            if key not in self.KEYS:
                raise InvalidArgument(f"unknown config key {key!r}")
            try:
                if key in ("steps", "bp_iters", "workers"):
                    val = int(raw)
                elif key == "bp_tol":
                    val = float(raw)
                elif key in ("bp", "every_step"):
                    val = raw if isinstance(raw, bool) else parse_bool(raw)
                elif key == "observables":
                    val = list(raw) if isinstance(raw, (list, tuple)) else [
                        s.strip() for s in str(raw).split(";") if s.strip()]
                else:
                    val = str(raw)
            except ValueError:
                raise InvalidArgument(f"bad value for {key}: {raw!r}") from None
            setattr(self, key, val)

    def to_plan(self, engine: str = "gpeps") -> SweepPlan:
        if not self.size:
            raise InvalidArgument("size is required")
        plan = SweepPlan(
            size=self.size,
            thetas=parse_thetas(self.theta),
            steps=self.steps,
            chis=parse_int_list(self.chi),
            observables=list(self.observables),
            bp=(self.bp_tol, self.bp_iters) if self.bp else None,
            every_step=self.every_step,
            engine=engine,
            workers=self.workers,
        )
        plan.validate()
        return plan


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Observables may be given as ``observables = avg_z; z@62``.
    """
    values = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgument(f"{path}:{n}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key] = val
    return values
