"""Run configuration: a flat ``key = value`` text format with dotted keys.

Example::

    problem = heat1d
    basis.n_x = 8
    basis.n_t = 8
    objective.form = strong
    solvers = vsl, collocation

Unset keys take problem-dependent defaults; ``RunConfig.to_text`` writes every
key explicitly so an echoed config reproduces the run.
"""

from dataclasses import dataclass
import json
from pathlib import Path

from .basis import BasisSpec
from .energy import Form, ICWeighting, ObjectiveConfig
from .errors import ConfigError, UsageError
from .optimizer import Init, OptimizerConfig, ScheduleConfig
from .problems import DEFAULT_BASIS, DEFAULT_NU, ProblemId, ProblemSpec

SOLVERS = ("vsl", "vsl_strong", "vsl_weak", "collocation")

BASELINE_N = {
    ProblemId.POISSON1D: 32,
    ProblemId.POISSON2D: 25,
    ProblemId.HEAT1D: 32,
    ProblemId.HEAT2D: 32,
    ProblemId.BURGERS1D: 32,
    ProblemId.BURGERS2D: 24,
}


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(p) for p in text.split(",") if p.strip())


def _words(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


# key -> (parser, default); None means "resolved from the problem"
SCHEMA = {
    "problem": (str, None),
    "problem.nu": (float, None),
    "basis.n_x": (int, None),
    "basis.n_y": (int, None),
    "basis.n_t": (int, None),
    "quadrature.orders": (_ints, None),
    "objective.form": (str, "weak"),
    "objective.lambda_ic": (float, None),
    "objective.lambda_reg": (float, 1e-8),
    "objective.ic_weighting": (str, "mean"),
    "objective.ic_nodes": (int, 32),
    "objective.diagnostic_nodes": (int, 32),
    "optimizer.eta0": (float, 1e-3),
    "optimizer.alpha": (float, 0.01),
    "optimizer.t0": (int, 400),
    "optimizer.t_mul": (float, 2.0),
    "optimizer.m_mul": (float, 1.0),
    "optimizer.beta1": (float, 0.9),
    "optimizer.beta2": (float, 0.999),
    "optimizer.epsilon": (float, 1e-8),
    "optimizer.clip_norm": (float, 1.0),
    "optimizer.max_epochs": (int, 3000),
    "optimizer.stop_tol": (float, 1e-10),
    "optimizer.seed": (int, 0),
    "optimizer.init": (str, "zero"),
    "optimizer.init_scale": (float, 0.0),
    "optimizer.restore_best": (_bool, True),
    "solvers": (_words, ("vsl", "collocation")),
    "baseline.n": (int, None),
    "baseline.steps": (int, 64),
    "test.grid": (int, None),
    "test.time_levels": (int, 33),
    "output.dir": (str, None),
    "output.figures": (_bool, True),
}


def parse_text(text: str, source: str = "<config>") -> dict:
    """Parse raw ``key = value`` lines into typed values (no defaults applied)."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key", field=key)
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key", field=key)
        if value == "":
            continue  # explicit "use the default"
        parser = SCHEMA[key][0]
        try:
            raw[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}", field=key) from None
    return raw


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration; every key of SCHEMA has a concrete value."""

    values: dict

    def __getitem__(self, key: str):
        return self.values[key]

    @property
    def problem_id(self) -> ProblemId:
        return ProblemId(self.values["problem"])

    def problem_spec(self) -> ProblemSpec:
        v = self.values
        basis = BasisSpec(v["basis.n_x"], v["basis.n_y"], v["basis.n_t"])
        return ProblemSpec(self.problem_id, basis, v["problem.nu"], v["quadrature.orders"])

    def objective(self, form: str | None = None) -> ObjectiveConfig:
        v = self.values
        return ObjectiveConfig(form or v["objective.form"], v["objective.lambda_ic"],
                               v["objective.lambda_reg"], v["objective.ic_weighting"])

    def optimizer(self) -> OptimizerConfig:
        v = self.values
        sched = ScheduleConfig(v["optimizer.eta0"], v["optimizer.alpha"], v["optimizer.t0"],
                               v["optimizer.t_mul"], v["optimizer.m_mul"])
        return OptimizerConfig(
            sched, v["optimizer.beta1"], v["optimizer.beta2"], v["optimizer.epsilon"],
            v["optimizer.clip_norm"], v["optimizer.max_epochs"], v["optimizer.stop_tol"],
            v["optimizer.seed"], v["optimizer.init"], v["optimizer.init_scale"],
            v["optimizer.restore_best"],
        )

    def vsl_forms(self) -> list[tuple[str, str]]:
        """(solver label, energy form) for each VSL solver selected."""
        out = []
        for s in self.values["solvers"]:
            if s == "vsl":
                out.append((s, self.values["objective.form"]))
            elif s.startswith("vsl_"):
                out.append((s, s[4:]))
        return out

    @property
    def use_collocation(self) -> bool:
        return "collocation" in self.values["solvers"]

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in self.values.items()}

    def to_text(self) -> str:
        lines = []
        for key in SCHEMA:
            value = self.values[key]
            lines.append(f"{key} = {'' if value is None else _fmt(value)}".rstrip())
        return "\n".join(lines) + "\n"


def _require(cond: bool, key: str, message: str):
    if not cond:
        raise ConfigError(message, field=key)


def resolve(raw: dict) -> RunConfig:
    """Apply defaults and validate against the problem before any computation."""
    _require("problem" in raw, "problem", "missing required key")
    try:
        pid = ProblemId(raw["problem"])
    except ValueError:
        names = ", ".join(p.value for p in ProblemId)
        raise ConfigError(f"unknown problem {raw['problem']!r} (choose from {names})",
                          field="problem") from None
    v = {k: d for k, (_, d) in SCHEMA.items()}
    v.update(raw)
    v["problem"] = pid.value

    base = DEFAULT_BASIS[pid]
    if v["basis.n_x"] is None:
        v["basis.n_x"] = base.n_x
    if v["basis.n_y"] is None:
        v["basis.n_y"] = base.n_y
    elif pid.space_dim == 1:
        _require(v["basis.n_y"] == 0, "basis.n_y", f"{pid.value} is 1D in space; n_y must be 0")
    if pid.space_dim == 2:
        _require(v["basis.n_y"] >= 1, "basis.n_y", f"{pid.value} needs n_y >= 1")
    if v["basis.n_t"] is None:
        v["basis.n_t"] = base.n_t
    elif not pid.time_dependent:
        _require(v["basis.n_t"] == 0, "basis.n_t", f"{pid.value} is stationary; n_t must not be set")
    if pid.time_dependent:
        _require(v["basis.n_t"] >= 1, "basis.n_t", f"{pid.value} needs n_t >= 1")
    _require(v["basis.n_x"] >= 1, "basis.n_x", "n_x must be >= 1")

    if pid.has_nu:
        if v["problem.nu"] is None:
            v["problem.nu"] = DEFAULT_NU[pid]
        _require(v["problem.nu"] > 0, "problem.nu", "nu must be > 0")
    else:
        _require(v["problem.nu"] is None, "problem.nu", f"{pid.value} takes no nu")

    shape = [v["basis.n_x"]] + ([v["basis.n_y"]] if pid.space_dim == 2 else [])
    if pid.time_dependent:
        shape.append(v["basis.n_t"])
    if v["quadrature.orders"] is None:
        v["quadrature.orders"] = tuple(n + 8 for n in shape)
    q = v["quadrature.orders"]
    _require(len(q) == len(shape) and all(o >= 1 for o in q), "quadrature.orders",
             f"need {len(shape)} positive orders (one per axis), got {list(q)}")

    for key, enum in (("objective.form", Form), ("objective.ic_weighting", ICWeighting),
                      ("optimizer.init", Init)):
        choices = [e.value for e in enum]
        _require(v[key] in choices, key, f"{v[key]!r} is not one of {choices}")
    if v["objective.lambda_ic"] is None:
        v["objective.lambda_ic"] = 10.0 if pid.time_dependent else 0.0
    if not pid.time_dependent:
        _require(v["objective.lambda_ic"] == 0.0, "objective.lambda_ic",
                 f"{pid.value} has no initial condition; lambda_ic must be 0")
    _require(v["objective.lambda_ic"] >= 0, "objective.lambda_ic", "must be >= 0")
    _require(v["objective.lambda_reg"] >= 0, "objective.lambda_reg", "must be >= 0")
    _require(v["objective.ic_nodes"] >= 1, "objective.ic_nodes", "must be >= 1")
    _require(v["objective.diagnostic_nodes"] >= 1, "objective.diagnostic_nodes", "must be >= 1")

    _require(len(v["solvers"]) >= 1, "solvers", "select at least one solver")
    for s in v["solvers"]:
        _require(s in SOLVERS, "solvers", f"unknown solver {s!r} (choose from {', '.join(SOLVERS)})")
    _require(len(set(v["solvers"])) == len(v["solvers"]), "solvers", "solvers are listed twice")

    if v["baseline.n"] is None:
        v["baseline.n"] = BASELINE_N[pid]
    minimum = 8 if pid.family == "burgers" else 4 if pid.family == "poisson" else 2
    _require(v["baseline.n"] >= minimum, "baseline.n", f"must be >= {minimum} for {pid.value}")
    _require(v["baseline.steps"] >= 1, "baseline.steps", "must be >= 1")
    if v["test.grid"] is None:
        v["test.grid"] = 400 if pid.space_dim == 1 else 64
    _require(v["test.grid"] >= 2, "test.grid", "must be >= 2")
    _require(v["test.time_levels"] >= 2, "test.time_levels", "must be >= 2")
    if v["output.dir"] is None:
        v["output.dir"] = f"out/{pid.value}"

    cfg = RunConfig(v)
    # remaining range checks live in the domain constructors
    for key, build in (("basis", cfg.problem_spec), ("objective", cfg.objective),
                       ("optimizer", cfg.optimizer)):
        try:
            build()
        except UsageError as exc:
            raise ConfigError(str(exc), field=key) from None
    return cfg


def load(path) -> RunConfig:
    """Read a config file, or the config echoed inside a report.json."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    if path.suffix == ".json":
        return from_echo(text, str(path))
    return resolve(parse_text(text, str(path)))


def from_echo(text: str, source: str = "<report>") -> RunConfig:
    try:
        echo = json.loads(text)["config"]
    except (ValueError, KeyError, TypeError):
        raise ConfigError(f"{source}: not a report with a 'config' section") from None
    raw = {}
    for key, value in echo.items():
        if key not in SCHEMA:
            raise ConfigError(f"{source}: unknown key", field=key)
        if value is None:
            continue
        parser = SCHEMA[key][0]
        if parser in (_ints, _words):
            value = tuple(value)
        elif parser is float:
            value = float(value)
        raw[key] = value
    return resolve(raw)
