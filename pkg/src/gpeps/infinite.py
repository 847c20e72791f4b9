"""Translation-invariant evolution on the infinite heavy-hex lattice.

All cells share the same ten tensors, so an inter-cell bond couples a site to
the translated copy of its partner inside the same cell. Folding those bonds
back gives a 10-vertex, 12-edge cell graph on which simple update and
mean-field measurement run unchanged, one bond vector per edge class.
"""

from __future__ import annotations

from .lattice import UnitCellGraph, build_unit_cell
from .peps import PepsState, average_magnetization, init_product_state, trotter_step
from .tensor import DEFAULT_FLOOR


def init_cell_state(cell: UnitCellGraph | None = None, chi: int = 32,
                    lambda_floor: float = DEFAULT_FLOOR) -> PepsState:
    cell = cell or build_unit_cell()
    return init_product_state(cell.quotient(), chi, lambda_floor)


def evolve_infinite(cell_state: PepsState, theta_h: float, n: int, chi: int) -> PepsState:
    cell_state.chi_max = chi
    for _ in range(n):
        trotter_step(cell_state, theta_h)
    return cell_state


def cell_magnetization(cell_state: PepsState) -> float:
    """Average <Z> over the ten cell sites, i.e. per site of the infinite lattice."""
    return average_magnetization(cell_state)
