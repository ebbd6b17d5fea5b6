"""Discrete energies in coefficient space and their exact gradients.

All energies are evaluated on a tensor Gauss-Legendre rule.  Gradients are
assembled from analytic residual Jacobians:

* strong:  E = 1/2 r^T W r,              grad = J^T W r
* weak:    E = 1/2 ||R||^2,              grad = (dR/dc)^T R
  - Poisson uses the integrated-by-parts moments R = K c - Phi^T W f
  - heat / Burgers use the moment form R = Phi^T W r(c)
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import problems as pb
from .basis import FeatureBundle, assemble_features
from .errors import UsageError
from .linalg import solve_dense
from .problems import ProblemSpec
from .quadrature import (
    CollocationPurpose,
    CollocationSet,
    TensorRule,
    gauss_legendre_on,
    interior_grid,
    tensor_rule,
)


class Form(str, Enum):
    STRONG = "strong"
    WEAK = "weak"


class ICWeighting(str, Enum):
    MEAN = "mean"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class ObjectiveConfig:
    form: Form = Form.WEAK
    lambda_ic: float = 10.0
    lambda_reg: float = 1e-8
    ic_weighting: ICWeighting = ICWeighting.MEAN

    def __post_init__(self):
        object.__setattr__(self, "form", Form(self.form))
        object.__setattr__(self, "ic_weighting", ICWeighting(self.ic_weighting))
        if self.lambda_ic < 0 or self.lambda_reg < 0:
            raise UsageError("lambda_ic and lambda_reg must be >= 0")


@dataclass(frozen=True)
class EnergyValue:
    value: float
    gradient: np.ndarray

    def __add__(self, other: "EnergyValue") -> "EnergyValue":
        return EnergyValue(self.value + other.value, self.gradient + other.gradient)

    def scaled(self, s: float) -> "EnergyValue":
        return EnergyValue(s * self.value, s * self.gradient)


@dataclass(frozen=True)
class ICData:
    collocation: CollocationSet
    features: FeatureBundle      # basis at (x, 0)
    u0: np.ndarray
    weights: np.ndarray | None   # quadrature weights, None for the mean convention


@dataclass(frozen=True)
class DiagnosticData:
    collocation: CollocationSet
    features: FeatureBundle
    forcing: np.ndarray
    operator: np.ndarray | None = None   # linear problems: r = A c - f


@dataclass(frozen=True)
class AssembledEnergy:
    """Everything constant during training, precomputed once."""

    quad: TensorRule
    features: FeatureBundle
    forcing: np.ndarray
    ic: ICData | None
    diagnostic: DiagnosticData | None
    # linear problems: r = A c - f at quadrature nodes
    operator: np.ndarray | None
    # weak form: R = G c - g (linear problems only)
    weak_matrix: np.ndarray | None
    weak_rhs: np.ndarray | None

    @property
    def weights(self) -> np.ndarray:
        return self.quad.flattened_weights

    @property
    def test_features(self) -> FeatureBundle:
        return self.features


def quadrature_for(spec: ProblemSpec) -> TensorRule:
    orders = spec.resolved_quad_orders
    bounds = [(0.0, 1.0)] * spec.id.space_dim
    if spec.id.time_dependent:
        bounds.append((0.0, spec.basis.horizon))
    return tensor_rule([gauss_legendre_on(q, a, b) for q, (a, b) in zip(orders, bounds)])


def _ic_data(spec: ProblemSpec, cfg: ObjectiveConfig, n_nodes: int) -> ICData:
    d = spec.id.space_dim
    if cfg.ic_weighting is ICWeighting.MEAN:
        colloc = interior_grid(n_nodes, d, CollocationPurpose.INITIAL_CONDITION)
        weights = None
    else:
        rule = tensor_rule([gauss_legendre_on(n_nodes, 0.0, 1.0)] * d)
        colloc = CollocationSet(rule.flattened_nodes, CollocationPurpose.INITIAL_CONDITION)
        weights = rule.flattened_weights
    nodes = np.column_stack([colloc.nodes, np.zeros(colloc.size)])
    feats = assemble_features(spec.basis, nodes)
    return ICData(colloc, feats, pb.initial_condition(spec, colloc.nodes), weights)


def diagnostic_set(spec: ProblemSpec, per_axis: int = 32) -> CollocationSet:
    """Chebyshev interior grid over the space(-time) domain."""
    colloc = interior_grid(per_axis, spec.dim)
    if spec.id.time_dependent:
        nodes = colloc.nodes.copy()
        nodes[:, -1] *= spec.basis.horizon
        colloc = CollocationSet(nodes, colloc.purpose)
    return colloc


def _diagnostic_data(spec: ProblemSpec, colloc: CollocationSet) -> DiagnosticData:
    feats = assemble_features(spec.basis, colloc.nodes, pb.required_derivatives(spec) + _first_derivs(spec))
    op = pb.linear_operator(spec, feats) if spec.id.linear else None
    return DiagnosticData(colloc, feats, pb.forcing(spec, colloc.nodes), op)


def _first_derivs(spec: ProblemSpec) -> tuple[str, ...]:
    return ("x", "y") if spec.id.space_dim == 2 else ("x",)


def assemble(spec: ProblemSpec, cfg: ObjectiveConfig | None = None,
             ic_nodes: int = 32, diagnostic_nodes: int = 32) -> AssembledEnergy:
    cfg = cfg or ObjectiveConfig()
    if not spec.id.time_dependent and cfg.lambda_ic != 0:
        raise UsageError(f"lambda_ic must be 0 for the stationary problem {spec.id.value}")
    quad = quadrature_for(spec)
    derivs = pb.required_derivatives(spec) + _first_derivs(spec)
    feats = assemble_features(spec.basis, quad.flattened_nodes, derivs)
    f = pb.forcing(spec, quad.flattened_nodes)
    w = quad.flattened_weights

    operator = weak_matrix = weak_rhs = None
    if spec.id.linear:
        operator = pb.linear_operator(spec, feats)
        phi_w = feats.phi.T * w
        weak_rhs = phi_w @ f
        if spec.id.family == "poisson":
            weak_matrix = (feats.matrix("x").T * w) @ feats.matrix("x")
            if spec.id.space_dim == 2:
                weak_matrix = weak_matrix + (feats.matrix("y").T * w) @ feats.matrix("y")
        else:
            weak_matrix = phi_w @ operator

    ic = _ic_data(spec, cfg, ic_nodes) if spec.id.time_dependent else None
    diag = _diagnostic_data(spec, diagnostic_set(spec, diagnostic_nodes)) if diagnostic_nodes else None
    return AssembledEnergy(quad, feats, f, ic, diag, operator, weak_matrix, weak_rhs)


def _residual(c, asm: AssembledEnergy, spec: ProblemSpec):
    if asm.operator is not None:
        return asm.operator @ c - asm.forcing, asm.operator
    return pb.residual_and_jacobian(spec, c, asm.features, asm.forcing)


def quadrature_residual(c, asm: AssembledEnergy, spec: ProblemSpec) -> np.ndarray:
    return _residual(np.asarray(c, dtype=np.float64), asm, spec)[0]


def _check(c, asm: AssembledEnergy) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    if c.shape != (asm.features.mode_count,):
        raise UsageError(f"coefficient vector has shape {c.shape}, expected ({asm.features.mode_count},)")
    return c


def strong_energy(c, asm: AssembledEnergy, spec: ProblemSpec) -> EnergyValue:
    c = _check(c, asm)
    r, jac = _residual(c, asm, spec)
    wr = asm.weights * r
    return EnergyValue(0.5 * float(r @ wr), jac.T @ wr)


def weak_residual(c, asm: AssembledEnergy, spec: ProblemSpec):
    """Galerkin moments R(c) and dR/dc."""
    c = _check(c, asm)
    if asm.weak_matrix is not None:
        return asm.weak_matrix @ c - asm.weak_rhs, asm.weak_matrix
    r, jac = _residual(c, asm, spec)
    phi_w = asm.features.phi.T * asm.weights
    return phi_w @ r, phi_w @ jac


def weak_energy(c, asm: AssembledEnergy, spec: ProblemSpec) -> EnergyValue:
    big_r, dr = weak_residual(c, asm, spec)
    return EnergyValue(0.5 * float(big_r @ big_r), dr.T @ big_r)


def ic_loss(c, asm: AssembledEnergy, cfg: ObjectiveConfig) -> EnergyValue:
    if asm.ic is None:
        raise UsageError("initial-condition loss requested for a stationary problem")
    c = _check(c, asm)
    p = asm.ic.features.phi
    delta = p @ c - asm.ic.u0
    if cfg.ic_weighting is ICWeighting.MEAN:
        m = delta.shape[0]
        return EnergyValue(float(delta @ delta) / m, (2.0 / m) * (p.T @ delta))
    wd = asm.ic.weights * delta
    return EnergyValue(0.5 * float(delta @ wd), p.T @ wd)


def regularization(c) -> EnergyValue:
    c = np.asarray(c, dtype=np.float64)
    return EnergyValue(0.5 * float(c @ c), c.copy())


def form_energy(c, asm: AssembledEnergy, spec: ProblemSpec, form) -> EnergyValue:
    if Form(form) is Form.STRONG:
        return strong_energy(c, asm, spec)
    return weak_energy(c, asm, spec)


@dataclass(frozen=True)
class ObjectiveParts:
    total: EnergyValue
    energy: float
    ic: float


def objective_parts(c, asm: AssembledEnergy, spec: ProblemSpec, cfg: ObjectiveConfig) -> ObjectiveParts:
    c = _check(c, asm)
    e = form_energy(c, asm, spec, cfg.form)
    total = e
    ic_value = 0.0
    if asm.ic is not None and cfg.lambda_ic:
        ic = ic_loss(c, asm, cfg)
        ic_value = ic.value
        total = total + ic.scaled(cfg.lambda_ic)
    if cfg.lambda_reg:
        total = total + regularization(c).scaled(cfg.lambda_reg)
    return ObjectiveParts(total, e.value, ic_value)


def total_objective(c, asm: AssembledEnergy, spec: ProblemSpec, cfg: ObjectiveConfig) -> EnergyValue:
    """J = E_form + lambda_ic L_ic + lambda_reg ||c||^2 / 2."""
    return objective_parts(c, asm, spec, cfg).total


def diagnostic_residual(c, spec: ProblemSpec, colloc: CollocationSet | DiagnosticData) -> float:
    """Mean squared strong residual on a collocation set (never differentiated)."""
    data = colloc if isinstance(colloc, DiagnosticData) else None
    if data is None:
        if colloc.size == 0:
            raise UsageError("diagnostic collocation set is empty")
        data = _diagnostic_data(spec, colloc)
    c = np.asarray(c, dtype=np.float64)
    if data.operator is not None:
        r = data.operator @ c - data.forcing
    else:
        r = pb.strong_residual(spec, pb.fields_from_coefficients(c, data.features, spec), data.forcing)
    return float(np.mean(r * r))


def quadratic_system(asm: AssembledEnergy, spec: ProblemSpec, cfg: ObjectiveConfig):
    """Stacked least-squares system (M, y) with J(c) = 1/2 ||M c - y||^2 + const.

    Only defined for linear problems, where the objective is a convex quadratic.
    """
    if asm.operator is None:
        raise UsageError(f"{spec.id.value} is nonlinear; its objective is not quadratic")
    rows, rhs = [], []
    if cfg.form is Form.STRONG:
        sw = np.sqrt(asm.weights)
        rows.append(sw[:, None] * asm.operator)
        rhs.append(sw * asm.forcing)
    else:
        rows.append(asm.weak_matrix)
        rhs.append(asm.weak_rhs)
    if asm.ic is not None and cfg.lambda_ic:
        p = asm.ic.features.phi
        if cfg.ic_weighting is ICWeighting.MEAN:
            s = np.full(p.shape[0], np.sqrt(2.0 * cfg.lambda_ic / p.shape[0]))
        else:
            s = np.sqrt(cfg.lambda_ic * asm.ic.weights)
        rows.append(s[:, None] * p)
        rhs.append(s * asm.ic.u0)
    if cfg.lambda_reg:
        n = asm.features.mode_count
        rows.append(np.sqrt(cfg.lambda_reg) * np.eye(n))
        rhs.append(np.zeros(n))
    return np.vstack(rows), np.concatenate(rhs)


def direct_minimizer(asm: AssembledEnergy, spec: ProblemSpec, cfg: ObjectiveConfig) -> np.ndarray:
    """Exact minimizer of the (quadratic) total objective of a linear problem."""
    m, y = quadratic_system(asm, spec, cfg)
    c, *_ = np.linalg.lstsq(m, y, rcond=None)
    return c


def galerkin_solve(asm: AssembledEnergy, spec: ProblemSpec) -> np.ndarray:
    """Solve the weak system R(c) = 0 directly (linear problems)."""
    if asm.weak_matrix is None:
        raise UsageError(f"{spec.id.value} is nonlinear; no linear Galerkin system")
    return solve_dense(asm.weak_matrix, asm.weak_rhs)
