"""Dense complex tensor kernel.

Tensors are plain ``numpy.ndarray`` objects (row-major, last index fastest).
The helpers here add argument validation and the truncated SVD used by every
bond update.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import InvalidArgument, NumericError

DEFAULT_FLOOR = 1e-12


@dataclass(frozen=True)
class SvdResult:
    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray
    truncation_error: float
    # True when chi, not the floor, decided how many values were kept
    chi_limited: bool = False


def permute(t: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    axes = tuple(int(a) for a in axes)
    if sorted(axes) != list(range(t.ndim)):
        raise InvalidArgument(f"axes {axes} is not a permutation of 0..{t.ndim - 1}")
    return np.ascontiguousarray(np.transpose(t, axes))


def contract(a: np.ndarray, b: np.ndarray, pairs: Sequence[tuple[int, int]]) -> np.ndarray:
    """Sum over paired axes; free axes of ``a`` come first, then those of ``b``."""
    axes_a = [p[0] for p in pairs]
    axes_b = [p[1] for p in pairs]
    if len(set(axes_a)) != len(axes_a) or len(set(axes_b)) != len(axes_b):
        raise InvalidArgument("an axis appears in more than one pair")
    for i, j in pairs:
        if not (0 <= i < a.ndim and 0 <= j < b.ndim):
            raise InvalidArgument(f"axis pair {(i, j)} out of range")
        if a.shape[i] != b.shape[j]:
            raise InvalidArgument(
                f"dimension mismatch on pair {(i, j)}: {a.shape[i]} != {b.shape[j]}"
            )
    return np.tensordot(a, b, axes=(axes_a, axes_b))


def _svd(mat: np.ndarray):
    try:
        return np.linalg.svd(mat, full_matrices=False)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails to converge where gesvd does not
        return scipy.linalg.svd(mat, full_matrices=False, lapack_driver="gesvd")


def svd_truncate(
    t: np.ndarray,
    split: int | tuple[Sequence[int], Sequence[int]],
    chi: int,
    floor: float = DEFAULT_FLOOR,
) -> SvdResult:
    """Truncated SVD of ``t`` matricized over ``split``.

    ``split`` is either the number of leading axes forming the row index, or an
    explicit ``(row_axes, col_axes)`` partition. At most ``chi`` values are
    kept, and values below ``floor * s_max`` are always dropped.

    ``left`` has shape ``row_dims + (k,)`` and ``right`` has shape
    ``(k,) + col_dims``.
    """
    if chi < 1:
        raise InvalidArgument(f"chi must be >= 1, got {chi}")
    if isinstance(split, int):
        rows, cols = list(range(split)), list(range(split, t.ndim))
    else:
        rows, cols = list(split[0]), list(split[1])
    if sorted(rows + cols) != list(range(t.ndim)):
        raise InvalidArgument(f"split {split} does not partition {t.ndim} axes")
    if not np.all(np.isfinite(t)):
        raise NumericError("svd_truncate received non-finite entries")

    tp = np.transpose(t, rows + cols)
    row_dims = tp.shape[: len(rows)]
    col_dims = tp.shape[len(rows):]
    mat = tp.reshape(int(np.prod(row_dims)), int(np.prod(col_dims)))
    try:
        u, s, vh = _svd(mat)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"SVD failed: {exc}") from exc

    total = float(np.sum(s**2))
    above_floor = int(np.count_nonzero(s >= floor * s[0])) if len(s) and s[0] > 0 else len(s)
    keep = max(min(chi, above_floor), 1)
    discarded = float(np.sum(s[keep:] ** 2))
    err = float(np.sqrt(discarded / total)) if total > 0 and discarded > 0 else 0.0
    return SvdResult(
        left=u[:, :keep].reshape(row_dims + (keep,)),
        singular_values=s[:keep].copy(),
        right=vh[:keep].reshape((keep,) + col_dims),
        truncation_error=err,
        chi_limited=above_floor > chi,
    )
