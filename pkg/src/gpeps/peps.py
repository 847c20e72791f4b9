"""Graph PEPS in Vidal form: simple-update gate application and
mean-field (bond-weight environment) measurement."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from .circuit import PAULI, Direction, build_schedule
from .errors import InvalidArgument, NumericError
from .lattice import Edge, Graph
from .tensor import DEFAULT_FLOOR, svd_truncate


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass
class PepsState:
    """Site tensors ``tensors[v]`` have axes ``(phys, *legs)`` with legs ordered
    as ``graph.adjacency[v]``; ``weights[(u, v)]`` (u < v) is the bond vector.

    Every bond vector is kept sorted descending with its maximum equal to 1.
    """

    graph: Graph
    tensors: list[np.ndarray]
    weights: dict[Edge, np.ndarray]
    chi_max: int = 32
    lambda_floor: float = DEFAULT_FLOOR
    step_count: int = 0
    theta_history: list[float] = field(default_factory=list)
    last_truncation_error: float = 0.0
    max_truncation_error: float = 0.0

    def leg(self, v: int, u: int) -> int:
        """Axis of ``tensors[v]`` that carries the bond to ``u``."""
        return 1 + self.graph.adjacency[v].index(u)

    def bond_dim(self, u: int, v: int) -> int:
        return len(self.weights[_edge(u, v)])

    def max_bond_dim(self) -> int:
        return max((len(w) for w in self.weights.values()), default=1)

    def copy(self) -> PepsState:
        return copy.deepcopy(self)

    @property
    def is_infinite(self) -> bool:
        return self.graph.name == "infinite"


def init_product_state(g: Graph, chi_max: int = 32, lambda_floor: float = DEFAULT_FLOOR) -> PepsState:
    tensors = []
    for v in range(g.num_vertices):
        t = np.zeros((2,) + (1,) * g.degree(v), dtype=complex)
        t[(0,) * t.ndim] = 1.0
        tensors.append(t)
    weights = {e: np.ones(1) for e in g.edges}
    return PepsState(g, tensors, weights, chi_max=chi_max, lambda_floor=lambda_floor)


def _broadcast(vec: np.ndarray, axis: int, ndim: int) -> np.ndarray:
    shape = [1] * ndim
    shape[axis] = len(vec)
    return vec.reshape(shape)


def _pinv_weights(lam: np.ndarray, floor: float) -> np.ndarray:
    out = np.zeros_like(lam)
    mask = lam >= floor * lam.max()
    out[mask] = 1.0 / lam[mask]
    return out


def apply_single_site(state: PepsState, site: int, gate: np.ndarray) -> PepsState:
    if not 0 <= site < state.graph.num_vertices:
        raise InvalidArgument(f"site {site} not in graph")
    state.tensors[site] = np.tensordot(gate, state.tensors[site], axes=(1, 0))
    return state


def _split_off_bond(state: PepsState, v: int, w: int):
    """Weight the external legs of ``v`` and QR-reduce it.

    Returns ``(q, r, ext_shape, ext_axes)`` where ``r`` has axes
    ``(reduced, phys, bond)`` and ``q`` maps the reduced index back to the
    flattened external legs.
    """
    t = state.tensors[v]
    nbrs = state.graph.adjacency[v]
    bond_axis = state.leg(v, w)
    for u in nbrs:
        if u != w:
            ax = state.leg(v, u)
            t = t * _broadcast(state.weights[_edge(v, u)], ax, t.ndim)
    ext_axes = [ax for ax in range(1, t.ndim) if ax != bond_axis]
    t = np.transpose(t, ext_axes + [0, bond_axis])
    ext_shape = t.shape[:-2]
    dext = int(np.prod(ext_shape))
    mat = t.reshape(dext, -1)
    if dext > mat.shape[1]:
        q, r = np.linalg.qr(mat)
    else:
        q, r = None, mat
    return q, r.reshape(r.shape[0], 2, t.shape[-1]), ext_shape, ext_axes


def _restore(state: PepsState, v: int, w: int, q, core: np.ndarray, ext_shape, ext_axes) -> np.ndarray:
    """Undo ``_split_off_bond`` for the updated ``core`` (axes reduced, phys, bond)."""
    k = core.shape[-1]
    mat = core.reshape(core.shape[0], -1)
    if q is not None:
        mat = q @ mat
    t = mat.reshape(tuple(ext_shape) + (2, k))
    ndim = t.ndim
    for pos, ax in enumerate(ext_axes):
        u = state.graph.adjacency[v][ax - 1]
        inv = _pinv_weights(state.weights[_edge(v, u)], state.lambda_floor)
        t = t * _broadcast(inv, pos, ndim)
    # axes are now (ext..., phys, bond); put them back in adjacency order
    bond_axis = state.leg(v, w)
    order = [0] * ndim
    order[0] = ndim - 2
    order[bond_axis] = ndim - 1
    for pos, ax in enumerate(ext_axes):
        order[ax] = pos
    return np.ascontiguousarray(np.transpose(t, order))


def apply_two_site_simple_update(state: PepsState, edge: tuple[int, int], gate: np.ndarray) -> PepsState:
    """Simple update of bond ``edge = (a, b)``.

    ``gate`` is 4x4 with row index ``2 * s_a + s_b``. The shared bond vector is
    absorbed once, every other incident bond vector fully; after the SVD the
    external weights are divided back out.
    """
    a, b = edge
    if not state.graph.has_edge(a, b):
        raise InvalidArgument(f"edge {edge} not in graph")
    if not (np.all(np.isfinite(state.tensors[a])) and np.all(np.isfinite(state.tensors[b]))):
        raise NumericError(f"non-finite tensor on edge {edge}")
    lam = state.weights[_edge(a, b)]
    qa, ra, sha, axa = _split_off_bond(state, a, b)
    qb, rb, shb, axb = _split_off_bond(state, b, a)
    g4 = gate.reshape(2, 2, 2, 2)
    # theta[x, s', y, t'] = sum ra[x,s,k] lam[k] rb[y,t,k] g[s',t',s,t]
    theta = np.einsum("xsk,k,ytk->xsyt", ra, lam, rb, optimize=True)
    theta = np.einsum("xsyt,uvst->xuyv", theta, g4)
    res = svd_truncate(theta, 2, state.chi_max, state.lambda_floor)
    s = res.singular_values
    new_lam = s / s[0]
    core_a = res.left
    core_b = np.transpose(res.right, (1, 2, 0))
    state.weights[_edge(a, b)] = new_lam
    state.tensors[a] = _restore(state, a, b, qa, core_a, sha, axa)
    state.tensors[b] = _restore(state, b, a, qb, core_b, shb, axb)
    # values dropped only by the floor are numerically null and not counted
    err = res.truncation_error if res.chi_limited else 0.0
    state.last_truncation_error = err
    state.max_truncation_error = max(state.max_truncation_error, err)
    return state


def trotter_step(state: PepsState, theta_h: float, direction: Direction | str = Direction.FORWARD) -> float:
    """Apply one Trotter step in place; returns the largest truncation error."""
    worst = 0.0
    for kind, target, gate in build_schedule(state.graph, theta_h, direction).operations():
        if kind == "1q":
            apply_single_site(state, target, gate)
        else:
            apply_two_site_simple_update(state, target, gate)
            worst = max(worst, state.last_truncation_error)
    state.step_count += 1
    state.theta_history.append(float(theta_h) if Direction(direction) is Direction.FORWARD else -float(theta_h))
    return worst


def site_density_matrix(state: PepsState, site: int) -> np.ndarray:
    """Unnormalized 2x2 reduced density matrix in the bond-weight environment."""
    t = state.tensors[site]
    for u in state.graph.adjacency[site]:
        ax = state.leg(site, u)
        t = t * _broadcast(state.weights[_edge(site, u)], ax, t.ndim)
    mat = t.reshape(2, -1)
    return mat @ mat.conj().T


def measure_site(state: PepsState, site: int, pauli: str | np.ndarray = "Z") -> float:
    if not 0 <= site < state.graph.num_vertices:
        raise InvalidArgument(f"site {site} not in graph")
    op = PAULI[pauli] if isinstance(pauli, str) else pauli
    rho = site_density_matrix(state, site)
    norm = np.trace(rho).real
    if not norm > 0:
        raise NumericError(f"non-positive norm {norm} at site {site}")
    return float(np.trace(rho @ op).real / norm)


def z_profile(state: PepsState) -> np.ndarray:
    return np.array([measure_site(state, v, "Z") for v in range(state.graph.num_vertices)])


def average_magnetization(state: PepsState) -> float:
    return float(np.mean(z_profile(state)))


def clifford_weight_measure(state: PepsState, n_back: int, anchor: int) -> float:
    """<Z_anchor> on a copy of ``state`` evolved by ``n_back`` adjoint steps at pi/2."""
    omega = state.copy()
    for _ in range(n_back):
        trotter_step(omega, np.pi / 2, Direction.ADJOINT)
    return measure_site(omega, anchor, "Z")


def evolve(g: Graph, theta_h: float, n: int, chi: int, lambda_floor: float = DEFAULT_FLOOR,
           bp=None) -> PepsState:
    """Product state evolved by ``n`` forward steps; ``bp`` is an optional
    ``(tol, max_iters)`` pair enabling belief-propagation re-gauging after
    every step."""
    from .bp import bp_gauge

    state = init_product_state(g, chi, lambda_floor)
    for _ in range(n):
        trotter_step(state, theta_h)
        if bp is not None:
            bp_gauge(state, *bp)
    return state


def to_statevector(state: PepsState) -> np.ndarray:
    """Contract the whole network into a 2^m amplitude vector (small graphs only).

    Each bond vector is folded into the lower-labelled endpoint; vertices
    are absorbed in label order, so qubit 0 is the most significant bit.
    """
    g = state.graph
    if g.num_vertices > 22:
        raise InvalidArgument("exact contraction limited to 22 sites")
    acc = np.ones(1, dtype=complex).reshape(())
    open_edges: list[Edge] = []
    nphys = 0
    for v in range(g.num_vertices):
        t = state.tensors[v]
        for u in g.adjacency[v]:
            if u > v:
                t = t * _broadcast(state.weights[_edge(v, u)], state.leg(v, u), t.ndim)
        shared = [(nphys + open_edges.index(_edge(u, v)), state.leg(v, u))
                  for u in g.adjacency[v] if u < v]
        acc = np.tensordot(acc, t, axes=([p[0] for p in shared], [p[1] for p in shared]))
        open_edges = [e for e in open_edges if v not in e]
        new_edges = [_edge(v, u) for u in g.adjacency[v] if u > v]
        # axes now: phys_0..phys_{v-1}, remaining open, phys_v, new legs
        n_rem = len(open_edges)
        order = (list(range(nphys)) + [nphys + n_rem]
                 + list(range(nphys, nphys + n_rem))
                 + list(range(nphys + n_rem + 1, acc.ndim)))
        acc = np.transpose(acc, order)
        nphys += 1
        open_edges = open_edges + new_edges
    return acc.reshape(-1)
