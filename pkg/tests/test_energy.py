import numpy as np
import pytest

from vsl import energy as en
from vsl import problems as pb
from vsl.basis import BasisSpec, assemble_features
from vsl.errors import UsageError
from vsl.quadrature import chebyshev_interior, interior_grid

ALL = list(pb.ProblemId)
SMALL = {
    "poisson1d": BasisSpec(6),
    "poisson2d": BasisSpec(4, 3),
    "heat1d": BasisSpec(4, 0, 3),
    "heat2d": BasisSpec(3, 3, 3),
    "burgers1d": BasisSpec(6),
    "burgers2d": BasisSpec(4, 3),
}


def _setup(pid, form="weak", weighting="mean", lambda_ic=None):
    spec = pb.make_problem(pid, SMALL[pid])
    if lambda_ic is None:
        lambda_ic = 10.0 if spec.id.time_dependent else 0.0
    cfg = en.ObjectiveConfig(form, lambda_ic, 1e-8, weighting)
    return spec, cfg, en.assemble(spec, cfg, ic_nodes=8, diagnostic_nodes=8)


def _fd_grad(fun, c, h=1e-6):
    g = np.empty_like(c)
    for n in range(c.size):
        e = np.zeros_like(c)
        e[n] = h
        g[n] = (fun(c + e) - fun(c - e)) / (2 * h)
    return g


@pytest.mark.parametrize("pid", ALL)
@pytest.mark.parametrize("form", ["strong", "weak"])
def test_objective_gradient_finite_difference(pid, form):
    spec, cfg, asm = _setup(pid, form)
    c = np.random.default_rng(1).normal(scale=0.3, size=spec.basis.mode_count)
    g = en.total_objective(c, asm, spec, cfg).gradient
    fd = _fd_grad(lambda v: en.total_objective(v, asm, spec, cfg).value, c)
    assert np.all(np.abs(g - fd) <= max(1e-6, 1e-4 * np.linalg.norm(g)))


def test_strong_energy_is_weighted_square_sum():
    spec, cfg, asm = _setup("heat1d", "strong")
    c = np.linspace(-1, 1, spec.basis.mode_count)
    nodes = asm.quad.flattened_nodes
    f = assemble_features(spec.basis, nodes, ("t", "xx"))
    r = f.phi_t @ c - spec.nu * (f.phi_xx @ c) - pb.forcing(spec, nodes)
    assert np.isclose(en.strong_energy(c, asm, spec).value, 0.5 * np.sum(asm.weights * r * r), rtol=1e-13)


def test_weak_poisson_uses_integration_by_parts():
    spec, cfg, asm = _setup("poisson1d")
    c = np.linspace(0.1, 0.6, spec.basis.mode_count)
    f = asm.features
    w = asm.weights
    u_x = f.phi_x @ c
    big_r = f.phi_x.T @ (w * u_x) - f.phi.T @ (w * asm.forcing)
    assert np.allclose(en.weak_residual(c, asm, spec)[0], big_r, atol=1e-14)
    # exact for polynomials: integrated form equals the strong moment form
    strong_moments = f.phi.T @ (w * (-(f.phi_xx @ c) - asm.forcing))
    assert np.allclose(big_r, strong_moments, atol=1e-12)


def test_weak_moment_form_for_burgers():
    spec, cfg, asm = _setup("burgers1d")
    c = np.linspace(0.1, 0.6, spec.basis.mode_count)
    r = en.quadrature_residual(c, asm, spec)
    assert np.allclose(en.weak_residual(c, asm, spec)[0], asm.features.phi.T @ (asm.weights * r))


def test_ic_loss_conventions():
    spec, cfg, asm = _setup("heat1d")
    c = np.zeros(spec.basis.mode_count)
    x = chebyshev_interior(8)
    u0 = np.sin(np.pi * x)
    assert np.isclose(en.ic_loss(c, asm, cfg).value, np.mean(u0**2), rtol=1e-14)
    spec_q, cfg_q, asm_q = _setup("heat1d", weighting="quadrature")
    # 1/2 int_0^1 sin^2(pi x) dx = 1/4
    assert np.isclose(en.ic_loss(c, asm_q, cfg_q).value, 0.25, rtol=1e-10)


def test_ic_loss_rejected_for_stationary():
    spec, cfg, asm = _setup("poisson1d")
    with pytest.raises(UsageError):
        en.ic_loss(np.zeros(6), asm, cfg)
    with pytest.raises(UsageError, match="lambda_ic"):
        en.assemble(spec, en.ObjectiveConfig(lambda_ic=1.0))


def test_regularization_and_total():
    spec, cfg, asm = _setup("heat1d")
    c = np.ones(spec.basis.mode_count)
    parts = en.objective_parts(c, asm, spec, cfg)
    expected = parts.energy + cfg.lambda_ic * parts.ic + cfg.lambda_reg * 0.5 * c @ c
    assert np.isclose(parts.total.value, expected, rtol=1e-14)
    assert en.regularization(c).value == 0.5 * c.size


def test_galerkin_solution_is_stationary():
    for pid in ("poisson1d", "poisson2d"):
        spec = pb.make_problem(pid)
        asm = en.assemble(spec, en.ObjectiveConfig(lambda_ic=0.0))
        c = en.galerkin_solve(asm, spec)
        g = en.weak_energy(c, asm, spec).gradient
        assert np.linalg.norm(g) <= 1e-10 * (1 + np.linalg.norm(asm.weak_matrix))


def test_direct_minimizer_zero_gradient():
    spec, cfg, asm = _setup("heat2d", "strong")
    c = en.direct_minimizer(asm, spec, cfg)
    g = en.total_objective(c, asm, spec, cfg).gradient
    assert np.linalg.norm(g) <= 1e-9


def test_direct_minimizer_needs_linear_problem():
    spec, cfg, asm = _setup("burgers1d")
    with pytest.raises(UsageError):
        en.direct_minimizer(asm, spec, cfg)
    with pytest.raises(UsageError):
        en.galerkin_solve(asm, spec)


@pytest.mark.parametrize("pid", ALL)
def test_diagnostic_set_and_zero_field_residual(pid):
    spec = pb.make_problem(pid)
    colloc = en.diagnostic_set(spec, 6)
    assert colloc.size == 6**spec.dim
    assert en.diagnostic_residual(np.zeros(spec.basis.mode_count), spec, colloc) > 0.01


def test_diagnostic_operator_path_matches_fields():
    spec = pb.make_problem("heat2d", SMALL["heat2d"])
    data = en._diagnostic_data(spec, en.diagnostic_set(spec, 5))
    c = np.random.default_rng(2).normal(size=spec.basis.mode_count)
    fields = pb.fields_from_coefficients(c, data.features, spec)
    r = pb.strong_residual(spec, fields, data.forcing)
    assert np.isclose(en.diagnostic_residual(c, spec, data), np.mean(r * r), rtol=1e-12)


def test_diagnostic_residual_empty_set():
    spec = pb.make_problem("poisson1d")
    empty = interior_grid(1, 1)
    empty = type(empty)(np.empty((0, 1)), empty.purpose)
    with pytest.raises(UsageError):
        en.diagnostic_residual(np.zeros(16), spec, empty)


def test_coefficient_length_checked():
    spec, cfg, asm = _setup("poisson1d")
    with pytest.raises(UsageError, match="shape"):
        en.strong_energy(np.zeros(3), asm, spec)


def test_config_validation():
    with pytest.raises(ValueError):
        en.ObjectiveConfig(form="mixed")
    with pytest.raises(UsageError):
        en.ObjectiveConfig(lambda_reg=-1.0)
