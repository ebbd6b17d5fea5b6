"""Gauss-Legendre rules, Chebyshev node sets and tensor-product rules."""

from dataclasses import dataclass
from enum import Enum
from functools import reduce

import numpy as np

from .errors import SolverError, UsageError


@dataclass(frozen=True)
class QuadratureRule1D:
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    @property
    def order(self) -> int:
        return self.nodes.shape[0]


@dataclass(frozen=True)
class TensorRule:
    """Tensor product of 1D rules, flattened with the last axis fastest."""

    axes: tuple[QuadratureRule1D, ...]
    flattened_nodes: np.ndarray
    flattened_weights: np.ndarray

    @property
    def size(self) -> int:
        return self.flattened_weights.shape[0]

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.order for a in self.axes)

    def integrate(self, values) -> float:
        return float(np.dot(self.flattened_weights, values))


class CollocationPurpose(str, Enum):
    DIAGNOSTIC = "diagnostic"
    INITIAL_CONDITION = "initial_condition"


@dataclass(frozen=True)
class CollocationSet:
    nodes: np.ndarray
    purpose: CollocationPurpose

    @property
    def size(self) -> int:
        return self.nodes.shape[0]


def _legendre_with_derivative(order: int, z: np.ndarray):
    p0 = np.ones_like(z)
    p1 = z.copy()
    if order == 0:
        return p0, np.zeros_like(z)
    for n in range(1, order):
        p0, p1 = p1, ((2 * n + 1) * z * p1 - n * p0) / (n + 1)
    # P'_n = n (z P_n - P_{n-1}) / (z^2 - 1)
    dp = order * (z * p1 - p0) / (z * z - 1.0)
    return p1, dp


def gauss_legendre(order: int) -> QuadratureRule1D:
    """Gauss-Legendre nodes and weights on [-1, 1].

    Nodes are the roots of P_order found by Newton iteration from the
    Chebyshev-like guesses cos(pi (q - 1/4) / (order + 1/2)).
    """
    if order < 1:
        raise UsageError(f"quadrature order must be >= 1, got {order}")
    q = np.arange(1, order + 1)
    z = np.cos(np.pi * (q - 0.25) / (order + 0.5))
    for _ in range(100):
        p, dp = _legendre_with_derivative(order, z)
        step = p / dp
        z = z - step
        if np.max(np.abs(step)) <= 1e-15:
            break
    else:
        raise SolverError(f"Legendre root iteration did not converge for order {order}")
    _, dp = _legendre_with_derivative(order, z)
    w = 2.0 / ((1.0 - z * z) * dp * dp)
    order_idx = np.argsort(z)
    z, w = z[order_idx], w[order_idx]
    # exact symmetry about the origin
    z = 0.5 * (z - z[::-1])
    w = 0.5 * (w + w[::-1])
    return QuadratureRule1D(z, w, (-1.0, 1.0))


def map_rule(rule: QuadratureRule1D, a: float, b: float) -> QuadratureRule1D:
    """Affinely map a rule from its interval onto [a, b]."""
    if not b > a:
        raise UsageError(f"interval must satisfy b > a, got [{a}, {b}]")
    lo, hi = rule.interval
    scale = (b - a) / (hi - lo)
    nodes = a + scale * (rule.nodes - lo)
    return QuadratureRule1D(nodes, scale * rule.weights, (float(a), float(b)))


def gauss_legendre_on(order: int, a: float, b: float) -> QuadratureRule1D:
    return map_rule(gauss_legendre(order), a, b)


def tensor_rule(axes) -> TensorRule:
    axes = tuple(axes)
    if not axes:
        raise UsageError("tensor_rule needs at least one axis")
    if len(axes) > 3:
        raise UsageError(f"at most 3 axes are supported, got {len(axes)}")
    grids = np.meshgrid(*[a.nodes for a in axes], indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    weights = reduce(np.multiply.outer, [a.weights for a in axes]).ravel()
    return TensorRule(axes, nodes, weights)


def chebyshev_interior(m: int) -> np.ndarray:
    """Images of the Chebyshev-Gauss points in (0, 1), ascending."""
    if m < 1:
        raise UsageError(f"number of interior nodes must be >= 1, got {m}")
    j = np.arange(1, m + 1)
    return 0.5 * (1.0 - np.cos(np.pi * (2 * j - 1) / (2 * m)))


def lobatto_nodes(n: int) -> np.ndarray:
    """Chebyshev-Lobatto nodes (cos(pi j / n) + 1) / 2, ascending, n + 1 points."""
    if n < 2:
        raise UsageError(f"Lobatto grid needs n >= 2, got {n}")
    # sin form is symmetric to rounding, unlike (cos + 1) / 2
    j = np.arange(n, -1, -1)
    x = 0.5 * (1.0 + np.sin(np.pi * (n - 2 * j) / (2 * n)))
    x[0], x[-1] = 0.0, 1.0
    return x


def interior_grid(m: int, dim: int, purpose=CollocationPurpose.DIAGNOSTIC) -> CollocationSet:
    """Tensor grid of Chebyshev interior nodes in (0, 1)^dim."""
    x = chebyshev_interior(m)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    return CollocationSet(np.stack([g.ravel() for g in grids], axis=1), CollocationPurpose(purpose))
