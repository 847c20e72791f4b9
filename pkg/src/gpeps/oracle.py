"""Brute-force statevector reference for small graphs.

Qubit 0 is the most significant bit of the amplitude index. Gates act by
reshaping the amplitude vector around the target axes, so no 2^m x 2^m
matrix is ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import PAULI, Direction, PauliString, build_schedule
from .errors import CapacityError, InvalidArgument
from .lattice import Graph

MAX_QUBITS = 22


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    @classmethod
    def zeros(cls, m: int) -> StateVector:
        if m > MAX_QUBITS:
            raise CapacityError(f"{m} qubits exceeds the oracle cap of {MAX_QUBITS}")
        amp = np.zeros(2**m, dtype=complex)
        amp[0] = 1.0
        return cls(m, amp)

    def copy(self) -> StateVector:
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def apply_1q(sv: StateVector, q: int, gate: np.ndarray) -> None:
    m = sv.num_qubits
    view = sv.amplitudes.reshape(2**q, 2, 2 ** (m - q - 1))
    view[:] = np.einsum("ij,ajb->aib", gate, view)


def apply_2q(sv: StateVector, a: int, b: int, gate: np.ndarray) -> None:
    """Apply a 4x4 gate whose row index is ``2 * bit_a + bit_b``."""
    m = sv.num_qubits
    g4 = gate.reshape(2, 2, 2, 2)
    if a > b:
        a, b = b, a
        g4 = g4.transpose(1, 0, 3, 2)
    view = sv.amplitudes.reshape(2**a, 2, 2 ** (b - a - 1), 2, 2 ** (m - b - 1))
    if np.count_nonzero(gate - np.diag(np.diag(gate))) == 0:
        d = np.einsum("ijij->ij", g4)
        view *= d[None, :, None, :, None]
    else:
        view[:] = np.einsum("ijkl,akblc->aibjc", g4, view)


def trotter_step_exact(sv: StateVector, g: Graph, theta_h: float, direction=Direction.FORWARD) -> None:
    for kind, target, gate in build_schedule(g, theta_h, direction).operations():
        if kind == "1q":
            apply_1q(sv, target, gate)
        else:
            apply_2q(sv, target[0], target[1], gate)


def evolve_exact(g: Graph, theta_h: float, n: int, direction=Direction.FORWARD,
                 initial: StateVector | None = None) -> StateVector:
    sv = initial.copy() if initial is not None else StateVector.zeros(g.num_vertices)
    if sv.num_qubits != g.num_vertices:
        raise InvalidArgument("initial state size does not match graph")
    for _ in range(n):
        trotter_step_exact(sv, g, theta_h, direction)
    return sv


def apply_pauli(sv: StateVector, p: PauliString) -> StateVector:
    out = sv.copy()
    for site, letter in p.terms:
        if not 0 <= site < sv.num_qubits:
            raise InvalidArgument(f"site {site} out of range")
        apply_1q(out, site, PAULI[letter])
    return out


def expect_pauli(sv: StateVector, p: PauliString) -> float:
    return float(np.vdot(sv.amplitudes, apply_pauli(sv, p).amplitudes).real)


def z_expectations(sv: StateVector) -> np.ndarray:
    """All single-site <Z_i> in one pass over the probabilities."""
    probs = np.abs(sv.amplitudes.reshape((2,) * sv.num_qubits)) ** 2
    out = np.empty(sv.num_qubits)
    for q in range(sv.num_qubits):
        marg = probs.sum(axis=tuple(i for i in range(sv.num_qubits) if i != q))
        out[q] = marg[0] - marg[1]
    return out


def average_magnetization_exact(sv: StateVector) -> float:
    return float(np.mean(z_expectations(sv)))


def expect_omega_protocol(g: Graph, theta_h: float, n: int, anchor: int) -> float:
    """<psi| U^n(pi/2) Z_anchor U^dag(pi/2)^n |psi> with psi = U(theta_h)^n |0...0>."""
    psi = evolve_exact(g, theta_h, n)
    omega = evolve_exact(g, np.pi / 2, n, Direction.ADJOINT, initial=psi)
    return expect_pauli(omega, PauliString(((anchor, "Z"),)))
