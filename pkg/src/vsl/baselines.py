"""Classical Chebyshev-Lobatto collocation solvers used as references.

All solvers work on the tensor Lobatto grid of [0, 1] (or [0, 1]^2) with
homogeneous Dirichlet data; only interior values are unknowns.
"""

from dataclasses import dataclass, field

import numpy as np

from . import problems as pb
from .errors import SolverError, UsageError
from .linalg import lu_factor, lu_solve, solve_dense
from .problems import ProblemId, ProblemSpec
from .quadrature import lobatto_nodes

NEWTON_TOL = 1e-11
NEWTON_MAX_ITER = 50
MAX_HALVINGS = 20


@dataclass(frozen=True)
class DiffMatrices:
    d1: np.ndarray
    d2: np.ndarray
    nodes: np.ndarray

    @property
    def n(self) -> int:
        return self.nodes.shape[0] - 1


@dataclass
class NodalSolution:
    """Nodal values on a (tensor) Lobatto grid, boundary included."""

    problem: ProblemId
    nodes: np.ndarray              # 1D Lobatto nodes, shared by every axis
    values: np.ndarray             # (n+1,) or (n+1, n+1), x index first
    dim: int
    time: float | None = None
    iterations: int = 0
    residual_norm: float = 0.0
    residual_history: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)   # (t, values) pairs, CN only

    def interpolate(self, points) -> np.ndarray:
        """Evaluate the collocation polynomial at ``points`` (M x dim)."""
        points = np.asarray(points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]
        return interpolate_nodal(self.nodes, self.values, points[:, : self.dim])


def diff_matrices(n: int) -> DiffMatrices:
    """Chebyshev differentiation matrices on n+1 Lobatto nodes of [0, 1]."""
    if n < 2:
        raise UsageError(f"differentiation matrix needs n >= 2, got {n}")
    x = lobatto_nodes(n)
    xi = 2.0 * x - 1.0
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n + 1)
    dx = xi[:, None] - xi[None, :]
    d = np.outer(c, 1.0 / c) / (dx + np.eye(n + 1))
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))
    d1 = 2.0 * d
    return DiffMatrices(d1, d1 @ d1, x)


def _grid(nodes: np.ndarray, dim: int) -> np.ndarray:
    if dim == 1:
        return nodes[:, None]
    gx, gy = np.meshgrid(nodes, nodes, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def _interior_mask(n: int, dim: int) -> np.ndarray:
    inner = np.zeros(n + 1, dtype=bool)
    inner[1:-1] = True
    if dim == 1:
        return inner
    return np.logical_and.outer(inner, inner).ravel()


def _operators(dm: DiffMatrices, dim: int):
    """Full-grid (d_x, d_y, laplacian) for x-major flattening."""
    if dim == 1:
        return dm.d1, None, dm.d2
    eye = np.eye(dm.n + 1)
    dx = np.kron(dm.d1, eye)
    dy = np.kron(eye, dm.d1)
    lap = np.kron(dm.d2, eye) + np.kron(eye, dm.d2)
    return dx, dy, lap


def _check_dim(dim: int):
    if dim not in (1, 2):
        raise UsageError(f"dim must be 1 or 2, got {dim}")


def solve_poisson(n: int, dim: int = 1, spec: ProblemSpec | None = None) -> NodalSolution:
    """-Laplace(u) = f on the interior nodes, u = 0 on the boundary."""
    _check_dim(dim)
    if n < 4:
        raise UsageError(f"Poisson collocation needs n >= 4, got {n}")
    pid = ProblemId.POISSON1D if dim == 1 else ProblemId.POISSON2D
    spec = spec or pb.make_problem(pid)
    if spec.id is not pid:
        raise UsageError(f"expected a {pid.value} problem, got {spec.id.value}")
    dm = diff_matrices(n)
    _, _, lap = _operators(dm, dim)
    inner = _interior_mask(n, dim)
    f = pb.forcing(spec, _grid(dm.nodes, dim))
    u = np.zeros(inner.shape[0])
    u[inner] = solve_dense(-lap[np.ix_(inner, inner)], f[inner])
    return NodalSolution(pid, dm.nodes, _shape(u, n, dim), dim)


def _shape(u: np.ndarray, n: int, dim: int) -> np.ndarray:
    return u if dim == 1 else u.reshape(n + 1, n + 1)


def crank_nicolson_heat(n_space: int, n_steps: int, spec: ProblemSpec,
                        keep_snapshots: bool = False) -> NodalSolution:
    """Crank-Nicolson in time, Lobatto collocation in space, up to t = 1."""
    if not spec.id.time_dependent:
        raise UsageError(f"Crank-Nicolson needs a heat problem, got {spec.id.value}")
    if n_steps < 1:
        raise UsageError(f"n_steps must be >= 1, got {n_steps}")
    if n_space < 2:
        raise UsageError(f"n_space must be >= 2, got {n_space}")
    dim = spec.id.space_dim
    dm = diff_matrices(n_space)
    _, _, lap = _operators(dm, dim)
    inner = _interior_mask(n_space, dim)
    space = _grid(dm.nodes, dim)[inner]
    l_int = spec.nu * lap[np.ix_(inner, inner)]
    dt = 1.0 / n_steps
    eye = np.eye(l_int.shape[0])
    lhs = lu_factor(eye - 0.5 * dt * l_int)
    rhs_op = eye + 0.5 * dt * l_int

    def f_at(t):
        return pb.forcing(spec, np.column_stack([space, np.full(space.shape[0], t)]))

    u = pb.initial_condition(spec, space)
    f_old = f_at(0.0)
    snaps = []
    full = np.zeros(inner.shape[0])
    if keep_snapshots:
        full[inner] = u
        snaps.append((0.0, _shape(full.copy(), n_space, dim)))
    for k in range(n_steps):
        t_new = (k + 1) * dt
        f_new = f_at(t_new)
        u = lu_solve(lhs, rhs_op @ u + 0.5 * dt * (f_new + f_old))
        f_old = f_new
        if keep_snapshots:
            full[inner] = u
            snaps.append((t_new, _shape(full.copy(), n_space, dim)))
    full[inner] = u
    return NodalSolution(spec.id, dm.nodes, _shape(full, n_space, dim), dim,
                         time=1.0, iterations=n_steps, snapshots=snaps)


def burgers_residual(u_int: np.ndarray, ops, f_int: np.ndarray, nu: float):
    """Interior residual and Jacobian of nu Lap(u) - u (u_x [+ u_y]) - f."""
    inner, dx, dy, lap = ops
    u = np.zeros(inner.shape[0])
    u[inner] = u_int
    grad = dx if dy is None else dx + dy
    adv = (grad @ u)[inner]
    r = nu * (lap @ u)[inner] - u_int * adv - f_int
    g_int = grad[np.ix_(inner, inner)]
    jac = nu * lap[np.ix_(inner, inner)] - np.diag(adv) - u_int[:, None] * g_int
    return r, jac


def newton_burgers(n: int, dim: int, spec: ProblemSpec | None = None,
                   tol: float = NEWTON_TOL, max_iter: int = NEWTON_MAX_ITER) -> NodalSolution:
    """Damped Newton on the collocation equations, started from u = 0.

    Each step is halved (at most 20 times) until the residual max-norm
    strictly decreases; a step that never decreases it is a solver error.
    """
    _check_dim(dim)
    if n < 8:
        raise UsageError(f"Burgers collocation needs n >= 8, got {n}")
    pid = ProblemId.BURGERS1D if dim == 1 else ProblemId.BURGERS2D
    spec = spec or pb.make_problem(pid)
    if spec.id is not pid:
        raise UsageError(f"expected a {pid.value} problem, got {spec.id.value}")
    dm = diff_matrices(n)
    dx, dy, lap = _operators(dm, dim)
    inner = _interior_mask(n, dim)
    ops = (inner, dx, dy, lap)
    f_int = pb.forcing(spec, _grid(dm.nodes, dim))[inner]

    u = np.zeros(int(inner.sum()))
    r, jac = burgers_residual(u, ops, f_int, spec.nu)
    norm = float(np.max(np.abs(r)))
    history = [norm]
    it = 0
    while norm > tol:
        if it == max_iter:
            raise SolverError(
                f"Newton did not reach |r|_inf <= {tol:g} in {max_iter} iterations "
                f"(last {norm:.3e})", history)
        step = solve_dense(jac, -r, check=False)
        s = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = u + s * step
            r_new, jac_new = burgers_residual(trial, ops, f_int, spec.nu)
            norm_new = float(np.max(np.abs(r_new)))
            if norm_new < norm:
                break
            s *= 0.5
        else:
            raise SolverError(
                f"line search failed at Newton iteration {it + 1}: no step decreased "
                f"|r|_inf = {norm:.3e}", history)
        u, r, jac, norm = trial, r_new, jac_new, norm_new
        history.append(norm)
        it += 1

    full = np.zeros(inner.shape[0])
    full[inner] = u
    return NodalSolution(pid, dm.nodes, _shape(full, n, dim), dim,
                         iterations=it, residual_norm=norm, residual_history=history)


def barycentric_weights(n: int) -> np.ndarray:
    w = (-1.0) ** np.arange(n + 1)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def barycentric_matrix(nodes, queries) -> np.ndarray:
    """Matrix B with (B v)_q = interpolant of nodal values v at query q."""
    nodes = np.asarray(nodes, dtype=np.float64)
    queries = np.asarray(queries, dtype=np.float64).ravel()
    w = barycentric_weights(nodes.shape[0] - 1)
    diff = queries[:, None] - nodes[None, :]
    exact = diff == 0.0
    hit = exact.any(axis=1)
    diff[exact] = 1.0
    terms = w / diff
    b = terms / terms.sum(axis=1, keepdims=True)
    b[hit] = exact[hit].astype(np.float64)
    return b


def barycentric_interpolate(nodes, values, queries) -> np.ndarray:
    """Second-form barycentric interpolation through Chebyshev-Lobatto data."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape[0] != np.shape(nodes)[0]:
        raise UsageError(f"{values.shape[0]} values for {np.shape(nodes)[0]} nodes")
    return barycentric_matrix(nodes, queries) @ values


def interpolate_nodal(nodes, values, points) -> np.ndarray:
    """Tensor barycentric interpolation of 1D or 2D nodal data at scattered points."""
    values = np.asarray(values, dtype=np.float64)
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    bx = barycentric_matrix(nodes, points[:, 0])
    if values.ndim == 1:
        return bx @ values
    by = barycentric_matrix(nodes, points[:, 1])
    return np.einsum("qi,ij,qj->q", bx, values, by)
