"""Adam with cosine-decay-with-restarts and gradient clipping."""

from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from .energy import AssembledEnergy, ObjectiveConfig, diagnostic_residual, objective_parts
from .errors import UsageError
from .problems import ProblemSpec


@dataclass(frozen=True)
class ScheduleConfig:
    eta0: float = 1e-3
    alpha: float = 0.01
    t0: int = 400
    t_mul: float = 2.0
    m_mul: float = 1.0

    def __post_init__(self):
        if not self.eta0 > 0:
            raise UsageError(f"eta0 must be > 0, got {self.eta0}")
        if not 0 <= self.alpha < 1:
            raise UsageError(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.t0 < 1:
            raise UsageError(f"t0 must be >= 1, got {self.t0}")
        if not (self.t_mul > 0 and self.m_mul > 0):
            raise UsageError("t_mul and m_mul must be > 0")


class Init(str, Enum):
    ZERO = "zero"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class OptimizerConfig:
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    clip_norm: float = 1.0
    max_epochs: int = 3000
    stop_tol: float = 1e-10
    seed: int = 0
    init: Init = Init.ZERO
    init_scale: float = 0.0
    restore_best: bool = True

    def __post_init__(self):
        object.__setattr__(self, "init", Init(self.init))
        for name in ("beta1", "beta2"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise UsageError(f"{name} must lie in (0, 1), got {v}")
        if not self.epsilon > 0:
            raise UsageError(f"epsilon must be > 0, got {self.epsilon}")
        if not self.clip_norm > 0:
            raise UsageError(f"clip_norm must be > 0, got {self.clip_norm}")
        if self.max_epochs < 0:
            raise UsageError(f"max_epochs must be >= 0, got {self.max_epochs}")
        if not self.stop_tol >= 0:
            raise UsageError(f"stop_tol must be >= 0, got {self.stop_tol}")
        if self.init_scale < 0:
            raise UsageError(f"init_scale must be >= 0, got {self.init_scale}")


def _cycle(step: int, cfg: ScheduleConfig) -> tuple[int, int, float]:
    """(cycle index j, cycle start S_j, cycle length T_j) containing ``step``."""
    j, start, length = 0, 0, float(cfg.t0)
    if cfg.t_mul == 1.0:
        j = step // cfg.t0
        return j, j * cfg.t0, float(cfg.t0)
    while step >= start + length:
        start += length
        j += 1
        length = cfg.t0 * cfg.t_mul**j
    return j, start, length


def learning_rate(step: int, cfg: ScheduleConfig) -> float:
    if step < 0:
        raise UsageError(f"step must be >= 0, got {step}")
    j, start, length = _cycle(step, cfg)
    tau = (step - start) / length
    peak = cfg.eta0 * cfg.m_mul**j
    return peak * (cfg.alpha + 0.5 * (1.0 - cfg.alpha) * (1.0 + math.cos(math.pi * tau)))


class NonFiniteGradient(ArithmeticError):
    pass


def clip(gradient, g_max: float) -> np.ndarray:
    """Rescale ``gradient`` onto the ball of radius ``g_max`` if it lies outside."""
    g = np.asarray(gradient, dtype=np.float64)
    norm = float(np.linalg.norm(g))
    if not np.isfinite(norm):
        raise NonFiniteGradient("gradient contains non-finite entries")
    if norm > g_max:
        return (g_max / norm) * g
    return g


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(np.zeros(n), np.zeros(n), 0)


def adam_step(state: AdamState, g, eta: float, cfg: OptimizerConfig) -> tuple[AdamState, np.ndarray]:
    g = np.asarray(g, dtype=np.float64)
    t = state.t + 1
    m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * g
    v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * g * g
    m_hat = m / (1.0 - cfg.beta1**t)
    v_hat = v / (1.0 - cfg.beta2**t)
    delta = -eta * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
    return AdamState(m, v, t), delta


class StopReason(str, Enum):
    MAX_EPOCHS = "max_epochs"
    RESIDUAL_TOL = "residual_tol"
    NON_FINITE = "non_finite"


HISTORY_COLUMNS = ("epoch", "lr", "objective", "energy", "ic_loss", "diag_residual", "grad_norm")


@dataclass
class TrainingHistory:
    records: list = field(default_factory=list)
    coefficients: np.ndarray | None = None
    stop_reason: StopReason = StopReason.MAX_EPOCHS
    best_epoch: int | None = None  # epoch whose coefficients were returned

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        i = HISTORY_COLUMNS.index(name)
        return np.array([r[i] for r in self.records], dtype=np.float64)

    @property
    def final(self) -> dict:
        return dict(zip(HISTORY_COLUMNS, self.records[-1])) if self.records else {}


def initial_coefficients(n: int, cfg: OptimizerConfig) -> np.ndarray:
    if cfg.init is Init.ZERO:
        return np.zeros(n)
    rng = np.random.default_rng(cfg.seed)
    return rng.uniform(-cfg.init_scale, cfg.init_scale, size=n)


def train(spec: ProblemSpec, asm: AssembledEnergy, ocfg: ObjectiveConfig,
          cfg: OptimizerConfig, c0=None, callback=None) -> TrainingHistory:
    """Full-batch Adam on the total objective.

    One record per epoch holds the state *before* that epoch's update.  The
    loop stops when the diagnostic residual reaches ``stop_tol`` (an infinite
    tolerance disables this test), after
    ``max_epochs`` updates, or on the first non-finite value.  With
    ``restore_best`` the returned coefficients are those with the smallest
    diagnostic residual seen (the final iterate is also a candidate).
    """
    n = asm.features.mode_count
    c = initial_coefficients(n, cfg) if c0 is None else np.array(c0, dtype=np.float64)
    state = AdamState.zeros(n)
    hist = TrainingHistory()
    has_diag = asm.diagnostic is not None
    best_c, best_diag, best_epoch = None, math.inf, None
    epoch = 0
    while True:
        parts = objective_parts(c, asm, spec, ocfg)
        diag = diagnostic_residual(c, spec, asm.diagnostic) if has_diag else math.nan
        g = parts.total.gradient
        gnorm = float(np.linalg.norm(g))
        lr = learning_rate(epoch, cfg.schedule)
        row = (epoch, lr, parts.total.value, parts.energy, parts.ic, diag, gnorm)
        finite = all(math.isfinite(v) for v in row[2:5] + (gnorm,)) and (
            not has_diag or math.isfinite(diag))
        if not finite:
            hist.records.append(row)
            hist.stop_reason = StopReason.NON_FINITE
            break
        if has_diag and diag < best_diag:
            best_c, best_diag, best_epoch = c, diag, epoch
        if epoch == cfg.max_epochs:
            # state after the last update: evaluated for the stop test, not recorded
            break
        hist.records.append(row)
        if callback is not None:
            callback(epoch, c, row)
        if math.isfinite(cfg.stop_tol) and diag <= cfg.stop_tol:
            hist.stop_reason = StopReason.RESIDUAL_TOL
            break
        state, delta = adam_step(state, clip(g, cfg.clip_norm), lr, cfg)
        c = c + delta
        epoch += 1
    if cfg.restore_best and best_c is not None:
        hist.coefficients, hist.best_epoch = best_c, best_epoch
    else:
        hist.coefficients, hist.best_epoch = c, epoch
    return hist
