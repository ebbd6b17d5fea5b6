"""Run orchestration: solve, evaluate on the test grid, write reports."""

from dataclasses import dataclass, field
import csv
import json
import math
import os
from pathlib import Path
import time

import numpy as np

from . import __version__
from . import baselines as bl
from . import energy as en
from . import problems as pb
from .basis import assemble_features
from .config import RunConfig
from .errors import ConfigError, SolverError
from .metrics import EvalTime, relative_errors, space_time_max, uniform_grid
from .optimizer import HISTORY_COLUMNS, StopReason, TrainingHistory, train

OUTPUT_ENV = "VSL_OUTPUT_DIR"
COMPARE_COLUMNS = ("solver", "l2_rel", "linf_rel", "wall_seconds")


def fmt(x) -> str:
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


@dataclass
class SolverResult:
    label: str
    values: np.ndarray            # on the test grid (final time for heat)
    errors: object                # ErrorReport
    wall_seconds: float
    space_time: object = None     # ErrorReport over all time levels
    history: TrainingHistory | None = None
    details: dict = field(default_factory=dict)


@dataclass
class RunOutcome:
    config: RunConfig
    spec: pb.ProblemSpec
    points: np.ndarray            # spatial test points
    grid_shape: tuple
    u_exact: np.ndarray
    results: list

    def result(self, label: str) -> SolverResult:
        for r in self.results:
            if r.label == label:
                return r
        raise KeyError(label)


def _with_time(points: np.ndarray, t: float) -> np.ndarray:
    return np.column_stack([points, np.full(points.shape[0], t)])


def _time_levels(cfg: RunConfig) -> np.ndarray:
    return np.linspace(0.0, 1.0, cfg["test.time_levels"])


def _exact(spec, points, t=None):
    nodes = points if t is None else _with_time(points, t)
    return pb.exact_fields(spec, nodes)["u"]


def run_vsl(cfg: RunConfig, spec: pb.ProblemSpec, form: str) -> tuple:
    """Train one VSL model; returns (coefficients, history, assembled energy)."""
    ocfg = cfg.objective(form)
    asm = en.assemble(spec, ocfg, ic_nodes=cfg["objective.ic_nodes"],
                      diagnostic_nodes=cfg["objective.diagnostic_nodes"])
    hist = train(spec, asm, ocfg, cfg.optimizer())
    return hist.coefficients, hist, asm


def _vsl_result(cfg, spec, label, form, points, grid_shape, u_exact) -> SolverResult:
    t0 = time.perf_counter()
    c, hist, _ = run_vsl(cfg, spec, form)
    wall = time.perf_counter() - t0
    timed = spec.id.time_dependent

    def field_at(t):
        nodes = _with_time(points, t) if timed else points
        return assemble_features(spec.basis, nodes).phi @ c

    values = field_at(1.0)
    errors = relative_errors(values, u_exact, grid_shape=grid_shape,
                             eval_time=EvalTime.FINAL if timed else None)
    st = None
    if timed:
        ts = _time_levels(cfg)
        st = space_time_max([field_at(t) for t in ts], [_exact(spec, points, t) for t in ts],
                            grid_shape)
    final = hist.final
    details = {
        "form": form,
        "epochs": len(hist),
        "stop_reason": hist.stop_reason.value,
        "returned_epoch": hist.best_epoch,
        "final_objective": final.get("objective"),
        "final_diag_residual": final.get("diag_residual"),
        "min_diag_residual": float(np.nanmin(hist.column("diag_residual"))) if len(hist) else None,
        "coefficients": [float(v) for v in c],
    }
    return SolverResult(label, values, errors, wall, st, hist, details)


def _collocation_result(cfg, spec, points, grid_shape, u_exact) -> SolverResult:
    pid = spec.id
    n = cfg["baseline.n"]
    dim = pid.space_dim
    t0 = time.perf_counter()
    if pid.family == "poisson":
        sol = bl.solve_poisson(n, dim, spec)
        method = "chebyshev_collocation"
    elif pid.family == "heat":
        sol = bl.crank_nicolson_heat(n, cfg["baseline.steps"], spec, keep_snapshots=True)
        method = "crank_nicolson"
    else:
        sol = bl.newton_burgers(n, dim, spec)
        method = "damped_newton"
    wall = time.perf_counter() - t0
    values = sol.interpolate(points)
    timed = pid.time_dependent
    errors = relative_errors(values, u_exact, grid_shape=grid_shape,
                             eval_time=EvalTime.FINAL if timed else None)
    st = None
    details = {"method": method, "n": n, "iterations": sol.iterations}
    if timed:
        # the baseline is compared at its own step times
        st = space_time_max([bl.interpolate_nodal(sol.nodes, v, points) for _, v in sol.snapshots],
                            [_exact(spec, points, t) for t, _ in sol.snapshots], grid_shape)
        details["steps"] = cfg["baseline.steps"]
    else:
        details["residual_norm"] = sol.residual_norm
        details["residual_history"] = list(sol.residual_history)
    return SolverResult("collocation", values, errors, wall, st, None, details)


def execute(cfg: RunConfig) -> RunOutcome:
    spec = cfg.problem_spec()
    points, shape = uniform_grid(spec.id.space_dim, cfg["test.grid"])
    u_exact = _exact(spec, points, 1.0 if spec.id.time_dependent else None)
    results = []
    for label, form in cfg.vsl_forms():
        results.append(_vsl_result(cfg, spec, label, form, points, shape, u_exact))
    if cfg.use_collocation:
        results.append(_collocation_result(cfg, spec, points, shape, u_exact))
    return RunOutcome(cfg, spec, points, shape, u_exact, results)


def output_dir(cfg: RunConfig) -> Path:
    return Path(os.environ.get(OUTPUT_ENV) or cfg["output.dir"])


def report_dict(out: RunOutcome) -> dict:
    solvers = {}
    for r in out.results:
        entry = r.errors.to_dict()
        if r.space_time is not None:
            entry["space_time"] = r.space_time.to_dict()
        entry["wall_seconds"] = r.wall_seconds
        entry.update(r.details)
        solvers[r.label] = entry
    return {
        "version": __version__,
        "problem": out.spec.id.value,
        "config": out.config.to_dict(),
        "test_grid": list(out.grid_shape),
        "eval_time": 1.0 if out.spec.id.time_dependent else None,
        "solvers": solvers,
    }


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_history(path: Path, hist: TrainingHistory):
    _write_csv(path, HISTORY_COLUMNS, hist.records)


def _column_name(label: str) -> str:
    return "baseline" if label == "collocation" else label


def write_solution(path: Path, out: RunOutcome):
    coords = ["x", "y"][: out.spec.id.space_dim]
    cols = list(coords)
    data = [out.points[:, i] for i in range(len(coords))]
    if out.spec.id.time_dependent:
        cols.append("t")
        data.append(np.ones(out.points.shape[0]))
    cols.append("u_exact")
    data.append(out.u_exact)
    for r in out.results:
        cols.append("u_" + _column_name(r.label))
        data.append(r.values)
    for r in out.results:
        cols.append("abs_err_" + _column_name(r.label))
        data.append(np.abs(r.values - out.u_exact))
    _write_csv(path, cols, zip(*data))


def write_compare(path: Path, out: RunOutcome):
    rows = [(r.label, r.errors.l2_rel, r.errors.linf_rel, r.wall_seconds) for r in out.results]
    _write_csv(path, COMPARE_COLUMNS, rows)


def write_outputs(out: RunOutcome, directory: Path, compare: bool = False) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    report = directory / "report.json"
    report.write_text(json.dumps(report_dict(out), indent=2) + "\n")
    written.append(report)
    vsl = [r for r in out.results if r.history is not None]
    for i, r in enumerate(vsl):
        p = directory / ("history.csv" if i == 0 else f"history_{r.label}.csv")
        write_history(p, r.history)
        written.append(p)
    sol = directory / "solution.csv"
    write_solution(sol, out)
    written.append(sol)
    if compare:
        p = directory / "compare.csv"
        write_compare(p, out)
        written.append(p)
    if out.config["output.figures"]:
        from .plotting import render_figures
        written.extend(render_figures(out, directory, compare=compare))
    return written


def check_finite(out: RunOutcome):
    """Divergence is a solver failure even when an earlier finite iterate was returned."""
    for r in out.results:
        if r.details.get("stop_reason") == StopReason.NON_FINITE.value:
            raise SolverError(f"{r.label}: training diverged at epoch {r.details['epochs']}")
        if not math.isfinite(r.errors.l2_rel):
            raise SolverError(f"{r.label}: non-finite solution")


def run(cfg: RunConfig, compare: bool = False) -> tuple[RunOutcome, list[Path]]:
    if compare and len(cfg["solvers"]) < 2:
        raise ConfigError("compare needs at least two solvers", field="solvers")
    out = execute(cfg)
    written = write_outputs(out, output_dir(cfg), compare=compare)
    check_finite(out)
    return out, written
