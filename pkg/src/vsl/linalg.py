"""Dense LU factorization with partial pivoting."""

from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrixError, SolverError, UsageError

PIVOT_RTOL = 1e-14
RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True)
class LUFactors:
    lu: np.ndarray      # unit-lower L below the diagonal, U on and above
    perm: np.ndarray    # row permutation: (P A)[i] = A[perm[i]]
    norm_inf: float

    @property
    def n(self) -> int:
        return self.lu.shape[0]


def lu_factor(a) -> LUFactors:
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise UsageError(f"matrix must be square, got shape {a.shape}")
    n = a.shape[0]
    norm = float(np.max(np.sum(np.abs(a), axis=1))) if n else 0.0
    tiny = PIVOT_RTOL * norm
    perm = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) <= tiny or not np.isfinite(a[p, k]):
            raise SingularMatrixError(
                f"pivot {abs(a[p, k]):.3e} in column {k} is below {tiny:.3e}; matrix is singular"
            )
        if p != k:
            a[[k, p]] = a[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        a[k + 1:, k] /= a[k, k]
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
    return LUFactors(a, perm, norm)


def lu_solve(factors: LUFactors, b) -> np.ndarray:
    b = np.asarray(b, dtype=np.float64)
    if b.shape[0] != factors.n:
        raise UsageError(f"right-hand side has length {b.shape[0]}, expected {factors.n}")
    lu = factors.lu
    y = b[factors.perm].copy()
    n = factors.n
    for i in range(1, n):
        y[i] -= lu[i, :i] @ y[:i]
    for i in range(n - 1, -1, -1):
        y[i] = (y[i] - lu[i, i + 1:] @ y[i + 1:]) / lu[i, i]
    return y


def solve_dense(a, b, check: bool = True) -> np.ndarray:
    """Solve A x = b by LU with partial pivoting.

    With ``check`` the result must satisfy
    ||Ax - b||_inf <= 1e-10 (||A||_inf ||x||_inf + ||b||_inf).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    factors = lu_factor(a)
    x = lu_solve(factors, b)
    if check:
        res = float(np.max(np.abs(a @ x - b))) if b.size else 0.0
        bound = RESIDUAL_RTOL * (factors.norm_inf * float(np.max(np.abs(x), initial=0.0))
                                 + float(np.max(np.abs(b), initial=0.0)))
        if not res <= bound:
            raise SolverError(f"dense solve residual {res:.3e} exceeds {bound:.3e}")
    return x
