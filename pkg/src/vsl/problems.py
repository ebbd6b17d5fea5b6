"""The six manufactured-solution benchmarks.

Each problem carries its exact solution together with the exact derivatives
of that solution, so the forcing formulas can be checked by substitution.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .basis import BasisSpec, FeatureBundle
from .errors import DomainError, UsageError

PI = np.pi


def sinpi(x):
    """sin(pi x), exactly zero at x = 0 and x = 1."""
    x = np.asarray(x, dtype=np.float64)
    return np.sin(PI * np.where(x > 0.5, 1.0 - x, x))


class ProblemId(str, Enum):
    POISSON1D = "poisson1d"
    POISSON2D = "poisson2d"
    HEAT1D = "heat1d"
    HEAT2D = "heat2d"
    BURGERS1D = "burgers1d"
    BURGERS2D = "burgers2d"

    @property
    def family(self) -> str:
        return self.value[:-2]

    @property
    def space_dim(self) -> int:
        return int(self.value[-2])

    @property
    def time_dependent(self) -> bool:
        return self.family == "heat"

    @property
    def linear(self) -> bool:
        return self.family != "burgers"

    @property
    def has_nu(self) -> bool:
        return self.family != "poisson"


DEFAULT_NU = {
    ProblemId.HEAT1D: 1.0,
    ProblemId.HEAT2D: 0.1,
    ProblemId.BURGERS1D: 0.1,
    ProblemId.BURGERS2D: 0.1,
}

DEFAULT_BASIS = {
    ProblemId.POISSON1D: BasisSpec(16),
    ProblemId.POISSON2D: BasisSpec(8, 8),
    ProblemId.HEAT1D: BasisSpec(8, 0, 8, 1.0),
    ProblemId.HEAT2D: BasisSpec(6, 6, 6, 1.0),
    ProblemId.BURGERS1D: BasisSpec(16),
    ProblemId.BURGERS2D: BasisSpec(8, 8),
}

# which fields each strong residual consumes
REQUIRED_FIELDS = {
    ProblemId.POISSON1D: ("u_xx",),
    ProblemId.POISSON2D: ("u_xx", "u_yy"),
    ProblemId.HEAT1D: ("u_t", "u_xx"),
    ProblemId.HEAT2D: ("u_t", "u_xx", "u_yy"),
    ProblemId.BURGERS1D: ("u", "u_x", "u_xx"),
    ProblemId.BURGERS2D: ("u", "u_x", "u_y", "u_xx", "u_yy"),
}


@dataclass(frozen=True)
class ProblemSpec:
    id: ProblemId
    basis: BasisSpec
    nu: float | None = None
    quad_orders: tuple[int, ...] = field(default=())

    def __post_init__(self):
        pid = ProblemId(self.id)
        object.__setattr__(self, "id", pid)
        if pid.has_nu:
            if self.nu is None or not self.nu > 0:
                raise UsageError(f"{pid.value} needs a viscosity/diffusivity nu > 0")
        elif self.nu is not None:
            raise UsageError(f"{pid.value} takes no nu")
        if self.basis.space_dim != pid.space_dim:
            raise UsageError(
                f"{pid.value} is {pid.space_dim}D in space but basis has n_y={self.basis.n_y}"
            )
        if pid.time_dependent and self.basis.n_t < 1:
            raise UsageError(f"{pid.value} needs n_t >= 1")
        if not pid.time_dependent and self.basis.n_t != 0:
            raise UsageError(f"{pid.value} is stationary; n_t must be 0")
        if pid.time_dependent and self.basis.horizon != 1.0:
            raise UsageError(f"{pid.value} is posed on t in [0, 1]; horizon must be 1")
        if self.quad_orders and len(self.quad_orders) != self.basis.dim:
            raise UsageError(
                f"quad_orders has {len(self.quad_orders)} entries, expected {self.basis.dim}"
            )

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def resolved_quad_orders(self) -> tuple[int, ...]:
        if self.quad_orders:
            return tuple(self.quad_orders)
        return tuple(n + 8 for n in self.basis.shape)


def make_problem(pid, basis: BasisSpec | None = None, nu: float | None = None,
                 quad_orders=()) -> ProblemSpec:
    pid = ProblemId(pid)
    if nu is None:
        nu = DEFAULT_NU.get(pid)
    return ProblemSpec(pid, basis or DEFAULT_BASIS[pid], nu, tuple(quad_orders))


@dataclass(frozen=True)
class FieldSamples:
    nodes: np.ndarray
    u_exact: np.ndarray
    forcing: np.ndarray
    u0: np.ndarray | None = None


def _split(spec: ProblemSpec, nodes):
    nodes = np.asarray(nodes, dtype=np.float64)
    if nodes.ndim == 1:
        nodes = nodes[:, None]
    if nodes.shape[1] != spec.dim:
        raise UsageError(f"nodes have {nodes.shape[1]} columns, {spec.id.value} needs {spec.dim}")
    tol = 1e-12
    if np.any(nodes < -tol) or np.any(nodes > 1.0 + tol):
        i = int(np.flatnonzero(np.any((nodes < -tol) | (nodes > 1 + tol), axis=1))[0])
        raise DomainError(f"node {i} = {nodes[i].tolist()} lies outside the problem domain")
    x = nodes[:, 0]
    y = nodes[:, 1] if spec.id.space_dim == 2 else None
    t = nodes[:, -1] if spec.id.time_dependent else None
    return nodes, x, y, t


def exact_fields(spec: ProblemSpec, nodes) -> dict:
    """u* and its closed-form derivatives at ``nodes``."""
    _, x, y, t = _split(spec, nodes)
    sx, cx = sinpi(x), np.cos(PI * x)
    if y is None:
        sy, cy = np.ones_like(x), np.zeros_like(x)
    else:
        sy, cy = sinpi(y), np.cos(PI * y)
    amp = 1.0 / PI**2 if spec.id is ProblemId.POISSON1D else 1.0
    decay = np.exp(-t) if t is not None else 1.0
    base = amp * decay
    u = base * sx * sy
    out = {
        "u": u,
        "u_x": base * PI * cx * sy,
        "u_xx": -PI**2 * u,
    }
    if y is not None:
        out["u_y"] = base * PI * sx * cy
        out["u_yy"] = -PI**2 * u
    if t is not None:
        out["u_t"] = -u
    return out


def forcing(spec: ProblemSpec, nodes) -> np.ndarray:
    _, x, y, t = _split(spec, nodes)
    sx, cx = sinpi(x), np.cos(PI * x)
    nu = spec.nu
    pid = spec.id
    if pid is ProblemId.POISSON1D:
        return sx
    if y is not None:
        sy, cy = sinpi(y), np.cos(PI * y)
    if pid is ProblemId.POISSON2D:
        return 2.0 * PI**2 * sx * sy
    if pid is ProblemId.HEAT1D:
        return (nu * PI**2 - 1.0) * np.exp(-t) * sx
    if pid is ProblemId.HEAT2D:
        return (2.0 * nu * PI**2 - 1.0) * np.exp(-t) * sx * sy
    if pid is ProblemId.BURGERS1D:
        return -nu * PI**2 * sx - PI * sx * cx
    # burgers2d
    return -2.0 * nu * PI**2 * sx * sy - PI * sx * sy * (cx * sy + sx * cy)


def initial_condition(spec: ProblemSpec, space_nodes) -> np.ndarray:
    """u0 at spatial nodes (M x space_dim)."""
    if not spec.id.time_dependent:
        raise UsageError(f"{spec.id.value} has no initial condition")
    space_nodes = np.asarray(space_nodes, dtype=np.float64)
    if space_nodes.ndim == 1:
        space_nodes = space_nodes[:, None]
    nodes = np.column_stack([space_nodes, np.zeros(space_nodes.shape[0])])
    return exact_fields(spec, nodes)["u"]


def manufactured(spec: ProblemSpec, nodes) -> FieldSamples:
    nodes, *_ = _split(spec, nodes)
    u0 = None
    if spec.id.time_dependent:
        u0 = initial_condition(spec, nodes[:, :-1])
    return FieldSamples(nodes, exact_fields(spec, nodes)["u"], forcing(spec, nodes), u0)


def strong_residual(spec: ProblemSpec, fields: dict, f) -> np.ndarray:
    """Pointwise strong residual given field values and the forcing."""
    for name in REQUIRED_FIELDS[spec.id]:
        if fields.get(name) is None:
            raise UsageError(f"strong residual for {spec.id.value} needs field {name!r}")
    f = np.asarray(f, dtype=np.float64)
    g = fields
    pid = spec.id
    nu = spec.nu
    if pid is ProblemId.POISSON1D:
        return -g["u_xx"] - f
    if pid is ProblemId.POISSON2D:
        return -(g["u_xx"] + g["u_yy"]) - f
    if pid is ProblemId.HEAT1D:
        return g["u_t"] - nu * g["u_xx"] - f
    if pid is ProblemId.HEAT2D:
        return g["u_t"] - nu * (g["u_xx"] + g["u_yy"]) - f
    if pid is ProblemId.BURGERS1D:
        return nu * g["u_xx"] - g["u"] * g["u_x"] - f
    return nu * (g["u_xx"] + g["u_yy"]) - g["u"] * g["u_x"] - g["u"] * g["u_y"] - f


def required_derivatives(spec: ProblemSpec) -> tuple[str, ...]:
    """Feature-bundle derivative keys the residual of ``spec`` needs."""
    return tuple(name[2:] for name in REQUIRED_FIELDS[spec.id] if name != "u")


def fields_from_coefficients(c, bundle: FeatureBundle, spec: ProblemSpec) -> dict:
    fields = {"u": bundle.phi @ c}
    for d in required_derivatives(spec):
        fields["u_" + d] = bundle.matrix(d) @ c
    return fields


def linear_operator(spec: ProblemSpec, bundle: FeatureBundle) -> np.ndarray:
    """Matrix A with residual r = A c - f (linear problems only)."""
    pid = spec.id
    if not pid.linear:
        raise UsageError(f"{pid.value} is nonlinear")
    lap = bundle.matrix("xx")
    if pid.space_dim == 2:
        lap = lap + bundle.matrix("yy")
    if pid.family == "poisson":
        return -lap
    return bundle.matrix("t") - spec.nu * lap


def residual_and_jacobian(spec: ProblemSpec, c, bundle: FeatureBundle, f):
    """Strong residual r(c) at the bundle nodes and its Jacobian dr/dc."""
    c = np.asarray(c, dtype=np.float64)
    if spec.id.linear:
        a = linear_operator(spec, bundle)
        return a @ c - f, a
    nu = spec.nu
    phi = bundle.phi
    u = phi @ c
    px = bundle.matrix("x")
    ux = px @ c
    visc = bundle.matrix("xx")
    adv = ux
    dadv = px
    if spec.id.space_dim == 2:
        py = bundle.matrix("y")
        visc = visc + bundle.matrix("yy")
        adv = ux + py @ c
        dadv = px + py
    r = nu * (visc @ c) - u * adv - f
    jac = nu * visc - adv[:, None] * phi - u[:, None] * dadv
    return r, jac
