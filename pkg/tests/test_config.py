import json

import pytest

from vsl import config as cf
from vsl.errors import ConfigError


def _resolve(text):
    return cf.resolve(cf.parse_text(text))


def test_defaults_per_problem():
    c = _resolve("problem = heat2d")
    assert (c["basis.n_x"], c["basis.n_y"], c["basis.n_t"]) == (6, 6, 6)
    assert c["problem.nu"] == 0.1 and c["objective.lambda_ic"] == 10.0
    assert c["quadrature.orders"] == (14, 14, 14)
    assert c["baseline.n"] == 32 and c["test.grid"] == 64
    assert c["output.dir"] == "out/heat2d"
    p = _resolve("problem = poisson1d")
    assert p["problem.nu"] is None and p["objective.lambda_ic"] == 0.0
    assert p.problem_spec().basis.mode_count == 16


def test_typed_values_and_comments():
    c = _resolve("""
        # comment line
        problem = burgers1d   # trailing comment
        optimizer.eta0 = 2e-3
        optimizer.restore_best = no
        quadrature.orders = 30
        solvers = vsl_weak, vsl_strong
        objective.lambda_reg =
    """)
    assert c["optimizer.eta0"] == 2e-3 and c["optimizer.restore_best"] is False
    assert c["quadrature.orders"] == (30,)
    assert c.vsl_forms() == [("vsl_weak", "weak"), ("vsl_strong", "strong")]
    assert not c.use_collocation
    assert c["objective.lambda_reg"] == 1e-8


@pytest.mark.parametrize("text,field", [
    ("problem = poisson1d\nbasis.n_t = 4", "basis.n_t"),
    ("problem = heat1d\nbasis.n_t = 0", "basis.n_t"),
    ("problem = poisson2d\nbasis.n_y = 0", "basis.n_y"),
    ("problem = poisson1d\nproblem.nu = 0.5", "problem.nu"),
    ("problem = burgers1d\nproblem.nu = -1", "problem.nu"),
    ("problem = poisson1d\nobjective.lambda_ic = 1", "objective.lambda_ic"),
    ("problem = poisson1d\nobjective.form = mixed", "objective.form"),
    ("problem = heat1d\nquadrature.orders = 8", "quadrature.orders"),
    ("problem = poisson1d\nsolvers = pinn", "solvers"),
    ("problem = poisson1d\nsolvers =  vsl, vsl", "solvers"),
    ("problem = burgers1d\nbaseline.n = 6", "baseline.n"),
    ("problem = poisson1d\noptimizer.beta1 = 1.5", "optimizer"),
    ("problem = poisson1d\noptimizer.t0 = 0", "optimizer"),
    ("problem = poisson1d\noptimizer.max_epochs = ten", "optimizer.max_epochs"),
    ("problem = poisson1d\nbogus.key = 1", "bogus.key"),
    ("problem = poisson1d\nproblem = heat1d", "problem"),
    ("problem = laplace3d", "problem"),
    ("basis.n_x = 4", "problem"),
])
def test_errors_name_the_field(text, field):
    with pytest.raises(ConfigError) as err:
        _resolve(text)
    assert err.value.field == field
    assert field in str(err.value)


def test_malformed_line():
    with pytest.raises(ConfigError, match="key = value"):
        cf.parse_text("problem poisson1d")


def test_text_round_trip():
    c = _resolve("problem = heat1d\noptimizer.eta0 = 0.1\nsolvers = vsl_strong, collocation")
    text = c.to_text()
    assert len(text.splitlines()) == len(cf.SCHEMA)
    assert cf.resolve(cf.parse_text(text)) == c


def test_echo_round_trip(tmp_path):
    c = _resolve("problem = burgers2d\noptimizer.stop_tol = 1e-300")
    path = tmp_path / "report.json"
    path.write_text(json.dumps({"config": c.to_dict()}))
    back = cf.load(path)
    assert back == c and back["optimizer.stop_tol"] == 1e-300


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        cf.load(tmp_path / "missing.cfg")
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="config"):
        cf.load(bad)


def test_shipped_configs_resolve():
    from pathlib import Path

    files = sorted(Path(__file__).parents[1].joinpath("configs").glob("*.cfg"))
    assert files
    for f in files:
        cf.load(f)
