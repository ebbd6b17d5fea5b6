import csv
import json

import numpy as np
import pytest

from vsl import __version__, runner
from vsl.cli import main
from vsl.errors import SolverError

HEADER = "epoch,lr,objective,energy,ic_loss,diag_residual,grad_norm"


def _write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.fixture
def outdir(tmp_path, monkeypatch):
    d = tmp_path / "out"
    monkeypatch.setenv(runner.OUTPUT_ENV, str(d))
    return d


def _report(d):
    return json.loads((d / "report.json").read_text())


def _strip_timing(report):
    for entry in report["solvers"].values():
        entry.pop("wall_seconds")
    return report


SMALL_P1 = "problem = poisson1d\noptimizer.max_epochs = 40\noutput.figures = false\n"


def test_run_writes_outputs(tmp_path, outdir, capsys):
    cfg = _write(tmp_path, SMALL_P1)
    assert main(["run", cfg]) == 0
    assert "l2_rel=" in capsys.readouterr().out
    lines = (outdir / "history.csv").read_text().splitlines()
    assert lines[0] == HEADER and len(lines) == 41
    rep = _report(outdir)
    assert rep["version"] == __version__ and rep["problem"] == "poisson1d"
    assert set(rep["solvers"]) == {"vsl", "collocation"}
    assert rep["solvers"]["collocation"]["l2_rel"] <= 8.5e-8
    assert rep["solvers"]["vsl"]["epochs"] == 40
    with open(outdir / "solution.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "u_exact", "u_vsl", "u_baseline", "abs_err_vsl", "abs_err_baseline"]
    assert len(rows) == 401
    assert not list(outdir.glob("*.png"))


def test_run_renders_figures(tmp_path, outdir):
    cfg = _write(tmp_path, "problem = heat1d\nbasis.n_x = 4\nbasis.n_t = 4\n"
                           "optimizer.max_epochs = 10\nsolvers = vsl, collocation\n"
                           "baseline.n = 8\nbaseline.steps = 8\n")
    assert main(["run", cfg]) == 0
    assert {p.name for p in outdir.glob("*.png")} == {"solution.png", "history.png"}
    rep = _report(outdir)
    assert rep["eval_time"] == 1.0
    assert rep["solvers"]["vsl"]["space_time"]["grid_shape"] == [33, 400]
    assert rep["solvers"]["collocation"]["space_time"]["grid_shape"] == [9, 400]


def test_runs_are_bitwise_reproducible(tmp_path, monkeypatch):
    cfg = _write(tmp_path, "problem = burgers1d\nbasis.n_x = 6\noptimizer.max_epochs = 30\n"
                           "optimizer.init = uniform\noptimizer.init_scale = 0.1\n"
                           "output.figures = false\n")
    reports, histories = [], []
    for name in ("a", "b"):
        monkeypatch.setenv(runner.OUTPUT_ENV, str(tmp_path / name))
        assert main(["run", cfg]) == 0
        reports.append(_strip_timing(_report(tmp_path / name)))
        histories.append((tmp_path / name / "history.csv").read_bytes())
    assert histories[0] == histories[1]
    assert reports[0] == reports[1]


def test_replay_from_report(tmp_path, monkeypatch):
    cfg = _write(tmp_path, SMALL_P1 + "solvers = vsl_strong\n")
    monkeypatch.setenv(runner.OUTPUT_ENV, str(tmp_path / "first"))
    assert main(["run", cfg]) == 0
    first = tmp_path / "first"
    monkeypatch.setenv(runner.OUTPUT_ENV, str(tmp_path / "second"))
    assert main(["run", str(first / "report.json")]) == 0
    second = tmp_path / "second"
    assert (first / "history.csv").read_bytes() == (second / "history.csv").read_bytes()
    assert (first / "solution.csv").read_bytes() == (second / "solution.csv").read_bytes()
    assert _strip_timing(_report(first)) == _strip_timing(_report(second))


def test_compare_table(tmp_path, outdir):
    cfg = _write(tmp_path, "problem = poisson1d\noptimizer.max_epochs = 20\n"
                           "solvers = vsl_weak, vsl_strong, collocation\n")
    assert main(["compare", cfg]) == 0
    with open(outdir / "compare.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["solver", "l2_rel", "linf_rel", "wall_seconds"]
    assert [r[0] for r in rows[1:]] == ["vsl_weak", "vsl_strong", "collocation"]
    assert float(rows[3][1]) <= 8.5e-8
    assert (outdir / "history_vsl_strong.csv").exists()
    assert {"compare.png", "history.png", "history_vsl_strong.png"} <= \
        {p.name for p in outdir.glob("*.png")}


def test_compare_single_solver_is_config_error(tmp_path, outdir, capsys):
    cfg = _write(tmp_path, SMALL_P1 + "solvers = vsl\n")
    assert main(["compare", cfg]) == 2
    assert "solvers" in capsys.readouterr().err


def test_invalid_field_exit_code(tmp_path, outdir, capsys):
    cfg = _write(tmp_path, "problem = poisson1d\nbasis.n_t = 8\n")
    assert main(["run", cfg]) == 2
    assert "basis.n_t" in capsys.readouterr().err
    assert not outdir.exists()


def test_missing_file_exit_code(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.cfg")]) == 2


def test_solver_error_exit_code(tmp_path, outdir, monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise SolverError("Newton did not converge", [1.0, 0.5])

    monkeypatch.setattr(runner.bl, "newton_burgers", boom)
    cfg = _write(tmp_path, "problem = burgers1d\nsolvers = collocation\n")
    assert main(["run", cfg]) == 3
    assert "Newton" in capsys.readouterr().err


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_diverged_training_exit_code(tmp_path, outdir, capsys):
    cfg = _write(tmp_path, "problem = poisson1d\noptimizer.eta0 = 1e300\n"
                           "optimizer.clip_norm = 1e308\noptimizer.max_epochs = 50\n"
                           "solvers = vsl\noutput.figures = false\n")
    assert main(["run", cfg]) == 3
    assert "diverged" in capsys.readouterr().err
    assert _report(outdir)["solvers"]["vsl"]["stop_reason"] == "non_finite"


def test_quadrature_table(capsys):
    assert main(["quadrature-table", "--order", "3", "--a", "0", "--b", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "index,node,weight" and len(lines) == 4
    nodes = np.array([float(l.split(",")[1]) for l in lines[1:]])
    weights = np.array([float(l.split(",")[2]) for l in lines[1:]])
    assert abs(weights.sum() - 1.0) <= 1e-15
    assert abs(nodes[1] - 0.5) <= 1e-15
    assert main(["quadrature-table", "--order", "0"]) == 2


def test_list_problems(capsys):
    assert main(["list-problems"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("problem,") and len(out) == 7
    assert any(l.startswith("heat2d,") and ",0.1," in l for l in out)
