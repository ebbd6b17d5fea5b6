"""Tensor-product space-time feature matrices.

Coefficient index convention: n = m + n_t * (j + n_y * i), i.e. the x mode
``i`` varies slowest and the time mode ``m`` fastest.  Absent axes (n_y = 0 or
n_t = 0) simply drop out of the product.
"""

from dataclasses import dataclass, field

import numpy as np

from .chebyshev import BasisBlock, dirichlet_basis, time_basis
from .errors import UsageError

DERIVATIVES = ("x", "y", "t", "xx", "yy")


@dataclass(frozen=True)
class BasisSpec:
    n_x: int
    n_y: int = 0
    n_t: int = 0
    horizon: float = 1.0

    def __post_init__(self):
        if self.n_x < 1:
            raise UsageError(f"n_x must be >= 1, got {self.n_x}")
        if self.n_y < 0 or self.n_t < 0:
            raise UsageError("n_y and n_t must be >= 0")
        if self.n_t > 0 and not self.horizon > 0:
            raise UsageError(f"horizon must be > 0, got {self.horizon}")

    @property
    def space_dim(self) -> int:
        return 2 if self.n_y > 0 else 1

    @property
    def has_time(self) -> bool:
        return self.n_t > 0

    @property
    def dim(self) -> int:
        return self.space_dim + int(self.has_time)

    @property
    def mode_count(self) -> int:
        return self.n_x * max(self.n_y, 1) * max(self.n_t, 1)

    @property
    def shape(self) -> tuple[int, ...]:
        s = [self.n_x]
        if self.n_y:
            s.append(self.n_y)
        if self.n_t:
            s.append(self.n_t)
        return tuple(s)

    def flat_index(self, i: int, j: int = 0, m: int = 0) -> int:
        return m + max(self.n_t, 1) * (j + max(self.n_y, 1) * i)


@dataclass(frozen=True)
class FeatureBundle:
    """Basis (and derivative) matrices at a fixed node set, each M x N."""

    phi: np.ndarray
    derivs: dict = field(default_factory=dict)

    @property
    def node_count(self) -> int:
        return self.phi.shape[0]

    @property
    def mode_count(self) -> int:
        return self.phi.shape[1]

    def matrix(self, which: str = "field") -> np.ndarray:
        if which in ("field", "u", ""):
            return self.phi
        try:
            return self.derivs[which]
        except KeyError:
            raise UsageError(
                f"derivative {which!r} was not assembled (have: {sorted(self.derivs)})"
            ) from None

    def __getattr__(self, name):
        # phi_x, phi_xx, ... convenience accessors
        if name.startswith("phi_") and name[4:] in DERIVATIVES:
            return self.derivs.get(name[4:])
        raise AttributeError(name)


def _row_kron(blocks: list[np.ndarray]) -> np.ndarray:
    """Row-wise Kronecker product: out[r] = kron(b0[r], b1[r], ...)."""
    out = blocks[0]
    for b in blocks[1:]:
        out = (out[:, :, None] * b[:, None, :]).reshape(out.shape[0], -1)
    return out


def _axis_blocks(spec: BasisSpec, nodes: np.ndarray) -> list[BasisBlock]:
    cols = 0
    blocks = [dirichlet_basis(nodes[:, cols], spec.n_x, with_derivs=True)]
    cols += 1
    if spec.n_y:
        blocks.append(dirichlet_basis(nodes[:, cols], spec.n_y, with_derivs=True))
        cols += 1
    if spec.n_t:
        blocks.append(time_basis(nodes[:, cols], spec.n_t, spec.horizon, with_derivs=True))
    return blocks


def assemble_features(spec: BasisSpec, nodes, derivs=()) -> FeatureBundle:
    """Evaluate the tensor basis and the requested derivatives at ``nodes``.

    ``nodes`` is M x d with columns ordered (x[, y][, t]).
    """
    nodes = np.asarray(nodes, dtype=np.float64)
    if nodes.ndim == 1:
        nodes = nodes[:, None]
    if nodes.shape[1] != spec.dim:
        raise UsageError(
            f"nodes have {nodes.shape[1]} columns but the basis expects {spec.dim}"
        )
    derivs = tuple(dict.fromkeys(derivs))
    axis_of = {"x": 0, "xx": 0}
    if spec.n_y:
        axis_of.update(y=1, yy=1)
    if spec.n_t:
        axis_of["t"] = spec.space_dim
    for d in derivs:
        if d not in DERIVATIVES:
            raise UsageError(f"unknown derivative {d!r}; choose from {DERIVATIVES}")
        if d not in axis_of:
            raise UsageError(f"derivative {d!r} requested but that axis is absent from the basis")

    blocks = _axis_blocks(spec, nodes)
    values = [b.values for b in blocks]
    phi = _row_kron(values)
    out = {}
    for d in derivs:
        ax = axis_of[d]
        parts = list(values)
        parts[ax] = blocks[ax].d2 if len(d) == 2 else blocks[ax].d1
        out[d] = _row_kron(parts)
    return FeatureBundle(phi, out)


def evaluate(c, bundle: FeatureBundle, which: str = "field") -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    if c.shape != (bundle.mode_count,):
        raise UsageError(
            f"coefficient vector has shape {c.shape}, expected ({bundle.mode_count},)"
        )
    return bundle.matrix(which) @ c
