"""Relative error norms on dense uniform test grids."""

from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from .errors import UsageError

GRID_1D = 400
GRID_2D = 64


class EvalTime(str, Enum):
    FINAL = "final"
    SPACE_TIME_MAX = "space_time_max"


@dataclass(frozen=True)
class ErrorReport:
    l2_rel: float
    linf_rel: float
    max_abs: float
    grid_shape: tuple[int, ...]
    eval_time: EvalTime | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grid_shape"] = list(self.grid_shape)
        d["eval_time"] = None if self.eval_time is None else self.eval_time.value
        return d


def uniform_grid(dim: int, n: int | None = None) -> tuple[np.ndarray, tuple[int, ...]]:
    """Uniform test grid on [0,1]^dim (endpoints included), x index slowest."""
    if dim == 1:
        n = n or GRID_1D
        return np.linspace(0.0, 1.0, n)[:, None], (n,)
    if dim == 2:
        n = n or GRID_2D
        g = np.linspace(0.0, 1.0, n)
        gx, gy = np.meshgrid(g, g, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel()]), (n, n)
    raise UsageError(f"test grids are 1D or 2D, got dim={dim}")


def trapezoid_weights(shape: tuple[int, ...]) -> np.ndarray:
    """Tensor trapezoid weights on the uniform grid of ``shape``."""
    w = None
    for n in shape:
        a = np.full(n, 1.0 / (n - 1))
        a[0] = a[-1] = 0.5 / (n - 1)
        w = a if w is None else np.multiply.outer(w, a)
    return np.ravel(w)


def relative_errors(u_num, u_exact, grid_weights=None, grid_shape=None,
                    eval_time: EvalTime | None = None) -> ErrorReport:
    """RMS-ratio relative L2 and max-ratio relative Linf errors.

    With ``grid_weights`` the L2 norms become weighted sums instead of plain
    means (the Linf part is unaffected).
    """
    u_num = np.asarray(u_num, dtype=np.float64).ravel()
    u_exact = np.asarray(u_exact, dtype=np.float64).ravel()
    if u_num.shape != u_exact.shape:
        raise UsageError(f"field lengths differ: {u_num.shape[0]} vs {u_exact.shape[0]}")
    err = u_num - u_exact
    if grid_weights is None:
        num, den = float(np.sum(err * err)), float(np.sum(u_exact * u_exact))
    else:
        w = np.asarray(grid_weights, dtype=np.float64).ravel()
        if w.shape != u_exact.shape:
            raise UsageError(f"{w.shape[0]} weights for {u_exact.shape[0]} grid values")
        num, den = float(w @ (err * err)), float(w @ (u_exact * u_exact))
    peak = float(np.max(np.abs(u_exact), initial=0.0))
    if not (den > 0 and peak > 0):
        raise UsageError("exact field has zero norm; relative error undefined")
    max_abs = float(np.max(np.abs(err)))
    shape = tuple(grid_shape) if grid_shape is not None else (u_exact.shape[0],)
    return ErrorReport(float(np.sqrt(num / den)), max_abs / peak, max_abs, shape, eval_time)


def space_time_max(u_num_slices, u_exact_slices, grid_shape) -> ErrorReport:
    """Errors over a stack of time slices; l2/linf relative over the whole stack."""
    num = np.concatenate([np.ravel(a) for a in u_num_slices])
    ex = np.concatenate([np.ravel(a) for a in u_exact_slices])
    shape = (len(u_exact_slices),) + tuple(grid_shape)
    return relative_errors(num, ex, grid_shape=shape, eval_time=EvalTime.SPACE_TIME_MAX)
