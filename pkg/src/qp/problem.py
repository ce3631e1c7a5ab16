# src/qp/problem.py

from enum import Enum
from typing import NamedTuple, Optional, Sequence, Tuple
import numpy as np


class QpStatus(str, Enum):
    OPTIMAL = 'Optimal'
    INFEASIBLE = 'Infeasible'


class QpProblem:
    """
    Выпуклая QP: min ½xᵀHx + Bᵀx + constant при a_iᵀx ≤ b_i

    constant не влияет на минимизатор и нужна только для отчета о стоимости.
    """

    def __init__(
        self,
        H: np.ndarray,
        B: np.ndarray,
        rows: Sequence[Tuple[Sequence[float], float]] = (),
        constant: float = 0.0
    ):
        self.H = np.array(H, dtype=float, ndmin=2)
        self.B = np.array(B, dtype=float, ndmin=1)
        self.n = self.B.size
        self.constant = float(constant)

        if self.H.shape != (self.n, self.n):
            raise ValueError(f"Размер H {self.H.shape} не согласован с B ({self.n})")

        if rows:
            self.A = np.array([np.asarray(a, dtype=float) for a, _ in rows], ndmin=2)
            self.b = np.array([float(b) for _, b in rows])
        else:
            self.A = np.zeros((0, self.n))
            self.b = np.zeros(0)

        if self.A.shape[1] != self.n:
            raise ValueError(f"Строки ограничений должны иметь длину {self.n}")

        scale = max(float(np.max(np.abs(self.H))), np.finfo(float).tiny)
        if np.max(np.abs(self.H - self.H.T)) > 1e-12 * scale:
            raise ValueError("Матрица H несимметрична")

        trace = float(np.trace(self.H))
        if np.min(np.linalg.eigvalsh(self.H)) < -1e-10 * max(abs(trace), np.finfo(float).tiny):
            raise ValueError("Матрица H не положительно полуопределена")

    @property
    def m(self) -> int:
        return self.b.size

    @property
    def rows(self):
        return [(self.A[i], float(self.b[i])) for i in range(self.m)]

    def objective(self, x: np.ndarray) -> float:
        return float(0.5 * x @ self.H @ x + self.B @ x + self.constant)

    def is_feasible(self, x: np.ndarray, tol: float = 1e-8) -> bool:
        if self.m == 0:
            return True
        return bool(np.all(self.A @ x <= self.b + tol * (1.0 + np.abs(self.b))))


class QpSolution(NamedTuple):
    x: np.ndarray
    objective: float
    active_set: Tuple[int, ...]
    status: QpStatus
    multipliers: Optional[np.ndarray] = None
    regularized: bool = False


class ScaledProblem(NamedTuple):
    """Уравновешенная задача: x = S·x̃, строки нормированы"""

    H: np.ndarray
    B: np.ndarray
    A: np.ndarray
    b: np.ndarray
    var_scale: np.ndarray
    row_scale: np.ndarray

    def unscale(self, x_tilde: np.ndarray, lam_tilde: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        return self.var_scale * x_tilde, lam_tilde / self.row_scale


def equilibrate(problem: QpProblem) -> ScaledProblem:
    """
    Диагональное уравновешивание: единичная диагональ H и единичные нормы строк

    Диагональ H контроллера меняется от 1e-12 до 1e8, без масштабирования
    KKT системы теряют точность.
    """
    diag = np.diag(problem.H)
    var_scale = np.where(diag > np.finfo(float).tiny, 1.0 / np.sqrt(np.maximum(diag, np.finfo(float).tiny)), 1.0)

    H = problem.H * np.outer(var_scale, var_scale)
    B = problem.B * var_scale
    A = problem.A * var_scale

    row_scale = np.linalg.norm(A, axis=1) if problem.m else np.zeros(0)
    row_scale = np.where(row_scale > 0.0, row_scale, 1.0)

    return ScaledProblem(
        H=0.5 * (H + H.T),
        B=B,
        A=A / row_scale[:, None] if problem.m else A,
        b=problem.b / row_scale,
        var_scale=var_scale,
        row_scale=row_scale
    )


def kkt_residual(problem: QpProblem, x: np.ndarray, multipliers: np.ndarray) -> float:
    """Невязка стационарности ‖Hx + B + Aᵀλ‖∞"""
    gradient = problem.H @ x + problem.B
    if problem.m:
        gradient = gradient + problem.A.T @ multipliers
    return float(np.max(np.abs(gradient))) if gradient.size else 0.0
