"""Kicked-Ising Trotter step and observable definitions."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidArgument, UndefinedObservable
from .lattice import Graph

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}

ZZ_ANGLE = np.pi / 4


class Direction(str, Enum):
    FORWARD = "forward"
    ADJOINT = "adjoint"


@dataclass(frozen=True)
class KickedIsingParams:
    """Only ``theta_h`` enters the circuit; ``J`` and ``h`` are kept as labels."""

    theta_h: float
    J: float = 1.0
    h: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.theta_h <= np.pi / 2 + 1e-12:
            raise InvalidArgument(f"theta_h={self.theta_h} outside [0, pi/2]")


def zz_gate() -> np.ndarray:
    """exp(i pi/4 Z Z) in the |00>, |01>, |10>, |11> basis."""
    p = np.exp(1j * ZZ_ANGLE)
    return np.diag([p, p.conjugate(), p.conjugate(), p])


def x_rotation(theta_h: float) -> np.ndarray:
    return np.cos(theta_h / 2) * I2 - 1j * np.sin(theta_h / 2) * X


@dataclass(frozen=True)
class TrotterSchedule:
    """One Trotter step as two layers, listed in application order.

    ``layers`` is ``(x_layer, zz_layer)`` for the forward direction and
    ``(zz_layer, x_layer)`` for the adjoint.
    """

    x_layer: tuple[tuple[int, np.ndarray], ...]
    zz_layer: tuple[tuple[tuple[int, int], np.ndarray], ...]
    direction: Direction

    def operations(self):
        """Yield ``(kind, target, gate)`` in application order."""
        singles = [("1q", s, g) for s, g in self.x_layer]
        doubles = [("2q", e, g) for e, g in self.zz_layer]
        if self.direction is Direction.FORWARD:
            yield from singles
            yield from doubles
        else:
            yield from doubles
            yield from singles


def build_schedule(g: Graph, theta_h: float, direction: Direction | str = Direction.FORWARD) -> TrotterSchedule:
    direction = Direction(direction)
    rx = x_rotation(theta_h)
    zz = zz_gate()
    if direction is Direction.ADJOINT:
        rx = rx.conj().T
        zz = zz.conj().T
    x_layer = tuple((v, rx) for v in range(g.num_vertices))
    zz_layer = tuple((e, zz) for e in sorted(g.edges))
    return TrotterSchedule(x_layer, zz_layer, direction)


# ---------------------------------------------------------------- observables


@dataclass(frozen=True)
class SingleZ:
    site: int

    @property
    def label(self) -> str:
        return f"z@{self.site}"


@dataclass(frozen=True)
class AverageZ:
    @property
    def label(self) -> str:
        return "avg_z"


@dataclass(frozen=True)
class PauliString:
    """Product of single-site Paulis, stored as sorted ``(site, letter)`` pairs."""

    terms: tuple[tuple[int, str], ...]

    def __post_init__(self):
        if not self.terms:
            raise InvalidArgument("Pauli string must be nonempty")
        sites = [s for s, _ in self.terms]
        if len(set(sites)) != len(sites):
            raise InvalidArgument("repeated site in Pauli string")
        for _, letter in self.terms:
            if letter not in "XYZ":
                raise InvalidArgument(f"bad Pauli letter {letter!r}")
        object.__setattr__(self, "terms", tuple(sorted(self.terms)))

    @classmethod
    def from_groups(cls, **groups: tuple[int, ...]) -> PauliString:
        return cls(tuple((s, letter) for letter, sites in groups.items() for s in sites))

    @property
    def weight(self) -> int:
        return len(self.terms)

    def letter(self, site: int) -> str:
        return dict(self.terms).get(site, "I")

    @property
    def label(self) -> str:
        return "pauli:" + ",".join(f"{p}{s}" for s, p in self.terms)


@dataclass(frozen=True)
class CliffordWeightN:
    """Z on ``anchor`` after ``back_steps`` adjoint Trotter steps at theta = pi/2."""

    anchor: int
    back_steps: int
    name: str = ""

    @property
    def label(self) -> str:
        if self.name:
            return f"{self.name}@n{self.back_steps}"
        return f"cw@{self.anchor}@n{self.back_steps}"


Observable = SingleZ | AverageZ | PauliString | CliffordWeightN


def w_observables_127() -> tuple[PauliString, PauliString]:
    w10 = PauliString.from_groups(X=(13, 29, 31), Y=(9, 30), Z=(8, 12, 17, 28, 32))
    w17 = PauliString.from_groups(
        X=(37, 41, 52, 56, 57, 58, 62, 79), Y=(75,), Z=(38, 40, 42, 63, 72, 80, 90, 91)
    )
    return w10, w17


INFINITE = "infinite"

# anchor sites of the single-Z form of the weight-10 / weight-17 observables
_ANCHORS = {
    10: {"eagle127": 13, "osprey433": 25, "condor1121": 41},
    17: {"eagle127": 62, "osprey433": 181, "condor1121": 505, INFINITE: 2},
}
_SIZE_ALIASES = {127: "eagle127", 433: "osprey433", 1121: "condor1121",
                 "127": "eagle127", "433": "osprey433", "1121": "condor1121",
                 "inf": INFINITE, "∞": INFINITE, float("inf"): INFINITE}


def anchor_site(size, weight: int) -> int:
    key = _SIZE_ALIASES.get(size, size)
    key = getattr(key, "value", key)
    try:
        return _ANCHORS[weight][key]
    except KeyError:
        raise UndefinedObservable(f"no weight-{weight} anchor for size {size!r}") from None


_PAULI_TERM = re.compile(r"^([XYZ])(\d+)$")


def parse_observable(text: str, size: str | None = None, default_steps: int | None = None) -> Observable:
    """Parse a CLI observable string.

    Accepted forms: ``avg_z``, ``z@62``, ``w10@n5``, ``w17@n5`` (anchor looked
    up for ``size``), ``cw@<site>@n<k>``, ``pauli:X13,Y9,Z8``.
    """
    t = text.strip()
    low = t.lower()
    if low == "avg_z":
        return AverageZ()
    if m := re.fullmatch(r"z@(\d+)", low):
        return SingleZ(int(m.group(1)))
    if m := re.fullmatch(r"(w10|w17)(?:@n(\d+))?", low):
        weight = int(m.group(1)[1:])
        steps = int(m.group(2)) if m.group(2) else default_steps
        if steps is None:
            raise InvalidArgument(f"{text!r}: back-step count missing")
        return CliffordWeightN(anchor_site(size, weight), steps, name=m.group(1))
    if m := re.fullmatch(r"cw@(\d+)@n(\d+)", low):
        return CliffordWeightN(int(m.group(1)), int(m.group(2)))
    if low.startswith("pauli:"):
        terms = []
        for item in t[6:].split(","):
            pm = _PAULI_TERM.match(item.strip().upper())
            if not pm:
                raise InvalidArgument(f"bad Pauli term {item!r} in {text!r}")
            terms.append((int(pm.group(2)), pm.group(1)))
        return PauliString(tuple(terms))
    raise InvalidArgument(f"unrecognised observable {text!r}")


def observable_sites(obs: Observable) -> list[int]:
    if isinstance(obs, SingleZ):
        return [obs.site]
    if isinstance(obs, PauliString):
        return [s for s, _ in obs.terms]
    if isinstance(obs, CliffordWeightN):
        return [obs.anchor]
    return []


def check_observable(obs: Observable, g: Graph) -> None:
    for s in observable_sites(obs):
        if not 0 <= s < g.num_vertices:
            raise InvalidArgument(f"{obs.label}: site {s} outside graph of {g.num_vertices}")
