"""Belief-propagation re-gauging of a finite graph PEPS.

Message ``msgs[(v, w)]`` is the environment seen by the leg of ``w`` that
points at ``v``: the double-layer contraction of site ``v`` with every other
incoming message, sandwiched by the bond vector of ``(v, w)``. On a tree in
simple-update gauge the fixed point is ``diag(lambda**2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InvalidArgument
from .peps import PepsState, _edge

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITERS = 500


@dataclass
class BpResult:
    messages: dict[tuple[int, int], np.ndarray]
    sweeps: int
    residual: float


def _apply_leg(t: np.ndarray, axis: int, mat: np.ndarray) -> np.ndarray:
    """Contract ``mat`` (ket index first) into ``t`` along ``axis``."""
    out = np.tensordot(t, mat, axes=([axis], [0]))
    return np.moveaxis(out, -1, axis)


def _inner_environment(state: PepsState, v: int, w: int, msgs) -> np.ndarray:
    """Double-layer contraction of site ``v`` with all incoming messages except
    the one from ``w``; the leg toward ``w`` stays open (no bond weight)."""
    t = state.tensors[v]
    closed = t
    for u in state.graph.adjacency[v]:
        if u != w:
            closed = _apply_leg(closed, state.leg(v, u), msgs[(u, v)])
    ax = state.leg(v, w)
    others = [i for i in range(t.ndim) if i != ax]
    return np.tensordot(closed, t.conj(), axes=(others, others))


def _normalize(m: np.ndarray) -> np.ndarray:
    m = 0.5 * (m + m.conj().T)
    return m / np.trace(m).real


def bp_messages(state: PepsState, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS,
                initial=None) -> BpResult:
    """Parallel (Jacobi) message passing to a fixed point.

    ``sweeps`` counts the sweeps needed to reach the fixed point; the sweep
    that confirms convergence is not included.
    """
    if state.is_infinite:
        raise InvalidArgument("belief propagation is only defined for finite graphs")
    g = state.graph
    directed = [(u, v) for u, v in g.edges] + [(v, u) for u, v in g.edges]
    if initial is None:
        msgs = {}
        for v, w in directed:
            d = state.bond_dim(v, w)
            msgs[(v, w)] = np.eye(d, dtype=complex) / d
    else:
        msgs = dict(initial)
    residual = np.inf
    for it in range(1, max_iters + 1):
        new = {}
        for v, w in directed:
            lam = state.weights[_edge(v, w)]
            env = _inner_environment(state, v, w, msgs)
            new[(v, w)] = _normalize(lam[:, None] * env * lam[None, :])
        residual = max(float(np.max(np.abs(new[k] - msgs[k]))) for k in directed) if directed else 0.0
        msgs = new
        if residual < tol:
            return BpResult(msgs, it - 1, residual)
    raise ConvergenceError(f"BP did not converge in {max_iters} sweeps", residual)


def _psd_sqrt_and_pinv_sqrt(m: np.ndarray, floor: float):
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    w = np.clip(w, 0.0, None)
    keep = w > floor * max(w.max(), 0.0)
    sq = np.sqrt(w)
    inv = np.zeros_like(sq)
    inv[keep] = 1.0 / sq[keep]
    return (v * sq) @ v.conj().T, (v * inv) @ v.conj().T


def bp_gauge(state: PepsState, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS) -> PepsState:
    """Bring ``state`` into the BP (Vidal-like) gauge in place.

    For each bond, the fixed-point Gram matrices of the two half-networks are
    square-rooted, and the SVD of their product gives the new bond vector and
    the gauge transforms of both legs. The represented state changes only by a
    global factor.
    """
    res = bp_messages(state, tol, max_iters)
    msgs = res.messages
    floor = state.lambda_floor
    transforms: dict[tuple[int, int], np.ndarray] = {}
    new_weights = {}
    for v, w in state.graph.edges:
        lam = state.weights[(v, w)]
        # Gram matrices <L_a|L_b> are the complex conjugates of the messages
        gram_left = msgs[(v, w)].conj()
        gram_right = _inner_environment(state, w, v, msgs).conj()
        gram_right = gram_right / np.trace(gram_right).real
        sq_l, isq_l = _psd_sqrt_and_pinv_sqrt(gram_left, floor)
        sq_r, isq_r = _psd_sqrt_and_pinv_sqrt(gram_right, floor)
        u, s, vh = np.linalg.svd(sq_l @ sq_r.T)
        keep = max(1, int(np.count_nonzero(s >= floor * s[0])))
        u, s, vh = u[:, :keep], s[:keep], vh[:keep]
        transforms[(v, w)] = lam[:, None] * (isq_l @ u)
        transforms[(w, v)] = isq_r @ vh.T
        new_weights[(v, w)] = s / s[0]
    for v in range(state.graph.num_vertices):
        t = state.tensors[v]
        for u in state.graph.adjacency[v]:
            t = _apply_leg(t, state.leg(v, u), transforms[(v, u)])
        state.tensors[v] = t
    state.weights = new_weights
    return state
