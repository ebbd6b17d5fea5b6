"""Chebyshev polynomials of the first kind and the Dirichlet-satisfying basis.

Everything is evaluated with the three-term recurrence (and its
differentiated forms); the trigonometric form is only used in tests.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, UsageError

_CLAMP = 1e-12


class BasisKind(str, Enum):
    CHEBYSHEV_FULL = "chebyshev_full"
    DIRICHLET_CHEB = "dirichlet_cheb"


@dataclass(frozen=True)
class BasisBlock:
    """One-dimensional basis evaluated at a point set.

    ``values[i, k]`` is mode ``k`` at point ``i``; ``d1``/``d2`` are derivatives
    with respect to the physical coordinate (``None`` when not requested).
    """

    values: np.ndarray
    d1: np.ndarray | None
    d2: np.ndarray | None
    kind: BasisKind
    interval: tuple[float, float]

    @property
    def n_points(self) -> int:
        return self.values.shape[0]

    @property
    def n_modes(self) -> int:
        return self.values.shape[1]


def _checked_points(points, lo: float, hi: float) -> np.ndarray:
    x = np.atleast_1d(np.asarray(points, dtype=np.float64))
    if x.ndim != 1:
        raise UsageError(f"points must be a 1D array, got shape {x.shape}")
    bad = np.flatnonzero(~((x >= lo - _CLAMP) & (x <= hi + _CLAMP)))
    if bad.size:
        i = int(bad[0])
        raise DomainError(f"point {i} = {x[i]!r} lies outside [{lo}, {hi}]")
    # quadrature maps can overshoot the endpoints by rounding
    x = x.copy()
    x[np.abs(x - lo) <= _CLAMP] = lo
    x[np.abs(x - hi) <= _CLAMP] = hi
    return x


def _recurrence(xi: np.ndarray, max_degree: int, order: int) -> list[np.ndarray]:
    """Return [T, T', T''] (up to ``order``) as M x (max_degree+1) arrays."""
    m = xi.shape[0]
    k = max_degree + 1
    t = np.empty((m, k))
    t[:, 0] = 1.0
    if k > 1:
        t[:, 1] = xi
    for n in range(1, k - 1):
        t[:, n + 1] = 2.0 * xi * t[:, n] - t[:, n - 1]
    out = [t]
    if order >= 1:
        dt = np.zeros((m, k))
        if k > 1:
            dt[:, 1] = 1.0
        # T'_{n+1} = 2 T_n + 2 xi T'_n - T'_{n-1}
        for n in range(1, k - 1):
            dt[:, n + 1] = 2.0 * t[:, n] + 2.0 * xi * dt[:, n] - dt[:, n - 1]
        out.append(dt)
    if order >= 2:
        d2t = np.zeros((m, k))
        # T''_{n+1} = 4 T'_n + 2 xi T''_n - T''_{n-1}
        for n in range(1, k - 1):
            d2t[:, n + 1] = 4.0 * dt[:, n] + 2.0 * xi * d2t[:, n] - d2t[:, n - 1]
        out.append(d2t)
    return out


def eval_chebyshev(points, max_degree: int) -> np.ndarray:
    """T_0..T_max_degree at points in [-1, 1], shape (M, max_degree + 1)."""
    if max_degree < 0:
        raise UsageError(f"max_degree must be >= 0, got {max_degree}")
    xi = _checked_points(points, -1.0, 1.0)
    return _recurrence(xi, max_degree, 0)[0]


def eval_chebyshev_derivs(points, max_degree: int, order: int) -> np.ndarray:
    """First or second derivative of T_k with respect to the reference variable."""
    if order not in (1, 2):
        raise UsageError(f"derivative order must be 1 or 2, got {order}")
    if max_degree < 0:
        raise UsageError(f"max_degree must be >= 0, got {max_degree}")
    xi = _checked_points(points, -1.0, 1.0)
    return _recurrence(xi, max_degree, order)[order]


def dirichlet_basis(points, n_modes: int, with_derivs: bool = True) -> BasisBlock:
    """phi_k(x) = T_{k+2}(2x - 1) - T_k(2x - 1) on [0, 1], k = 0..n_modes-1.

    Every mode vanishes at x = 0 and x = 1.
    """
    if n_modes < 1:
        raise UsageError(f"n_modes must be >= 1, got {n_modes}")
    x = _checked_points(points, 0.0, 1.0)
    xi = 2.0 * x - 1.0
    blocks = _recurrence(xi, n_modes + 1, 2 if with_derivs else 0)

    def combine(a):
        return a[:, 2:] - a[:, :-2]

    values = combine(blocks[0])
    d1 = d2 = None
    if with_derivs:
        d1 = 2.0 * combine(blocks[1])
        d2 = 4.0 * combine(blocks[2])
    return BasisBlock(values, d1, d2, BasisKind.DIRICHLET_CHEB, (0.0, 1.0))


def time_basis(points, n_modes: int, horizon: float = 1.0, with_derivs: bool = True) -> BasisBlock:
    """chi_m(t) = T_m(2t/T - 1) on [0, T], m = 0..n_modes-1."""
    if not horizon > 0:
        raise UsageError(f"horizon must be > 0, got {horizon}")
    if n_modes < 1:
        raise UsageError(f"n_modes must be >= 1, got {n_modes}")
    t = _checked_points(points, 0.0, horizon)
    xi = np.clip(2.0 * t / horizon - 1.0, -1.0, 1.0)
    blocks = _recurrence(xi, n_modes - 1, 2 if with_derivs else 0)
    d1 = d2 = None
    if with_derivs:
        s = 2.0 / horizon
        d1 = s * blocks[1]
        d2 = s * s * blocks[2]
    return BasisBlock(blocks[0], d1, d2, BasisKind.CHEBYSHEV_FULL, (0.0, float(horizon)))
