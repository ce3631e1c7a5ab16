# src/qp/active_set.py

from itertools import combinations
from typing import List, Optional, Tuple
import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from src.qp.problem import QpProblem, QpSolution, QpStatus, ScaledProblem, equilibrate
from src.utils.errors import IllConditioned, Infeasible
from src.utils.logger import get_logger

logger = get_logger(__name__)

FEASIBILITY_TOL = 1e-9
STEP_TOL = 1e-12
DUAL_TOL = 1e-10
DECREASE_TOL = 1e-14
COND_LIMIT = 1e12
REGULARIZATION = 1e-12


class _RankDeficient(Exception):
    """Активные строки почти линейно зависимы"""


def _factorize(H: np.ndarray) -> Tuple[tuple, bool]:
    """Разложение Холецкого H; при неудаче H регуляризуется на 1e-12·trace(H)·I"""
    try:
        return cho_factor(H), False
    except LinAlgError:
        shift = REGULARIZATION * max(float(np.trace(H)), 1.0)
        logger.warning(f"Разложение Холецкого не удалось, H регуляризована на {shift:.3e}·I")

    try:
        return cho_factor(H + shift * np.eye(H.shape[0])), True
    except LinAlgError as e:
        raise IllConditioned(f"H вырождена даже после регуляризации: {e}")


def _schur(factor: tuple, A_W: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Возвращает H⁻¹A_Wᵀ и дополнение Шура A_W·H⁻¹·A_Wᵀ"""
    Hinv_At = cho_solve(factor, A_W.T)
    S = A_W @ Hinv_At
    if np.linalg.cond(S) > COND_LIMIT:
        raise _RankDeficient()
    return Hinv_At, S


def _equality_point(sp: ScaledProblem, factor: tuple, W: List[int]) -> np.ndarray:
    """Минимизатор при A_W·x = b_W"""
    Hinv_B = cho_solve(factor, sp.B)
    if not W:
        return -Hinv_B

    A_W = sp.A[W]
    Hinv_At, S = _schur(factor, A_W)
    lam = np.linalg.solve(S, -(sp.b[W] + A_W @ Hinv_B))
    return -(Hinv_B + Hinv_At @ lam)


def _direction(sp: ScaledProblem, factor: tuple, W: List[int], g: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Шаг p и множители λ подзадачи min ½pᵀHp + gᵀp при A_W·p = 0"""
    Hinv_g = cho_solve(factor, g)
    if not W:
        return -Hinv_g, np.zeros(0)

    A_W = sp.A[W]
    Hinv_At, S = _schur(factor, A_W)
    lam = np.linalg.solve(S, -(A_W @ Hinv_g))
    return -(Hinv_g + Hinv_At @ lam), lam


def _is_feasible(sp: ScaledProblem, x: np.ndarray) -> bool:
    return bool(np.all(sp.A @ x <= sp.b + FEASIBILITY_TOL * (1.0 + np.abs(sp.b))))


def _negligible_step(sp: ScaledProblem, x: np.ndarray, p: np.ndarray) -> bool:
    """Шаг нулевой по длине или по уменьшению стоимости ½pᵀHp"""
    if np.linalg.norm(p) <= STEP_TOL * (1.0 + np.linalg.norm(x)):
        return True
    cost = 0.5 * x @ sp.H @ x + sp.B @ x
    return bool(0.5 * p @ sp.H @ p <= DECREASE_TOL * (1.0 + abs(cost)))


def _initial_point(sp: ScaledProblem, factor: tuple) -> Tuple[np.ndarray, List[int]]:
    """
    Допустимая стартовая точка и рабочее множество

    Сначала безусловный минимум, затем минимумы на гранях из 1..n строк;
    на первом уровне с допустимыми точками берется лучшая по стоимости.
    """
    x = _equality_point(sp, factor, [])
    if _is_feasible(sp, x):
        return x, []

    m, n = sp.A.shape
    for size in range(1, min(n, m) + 1):
        best: Optional[Tuple[float, np.ndarray, List[int]]] = None

        for subset in combinations(range(m), size):
            W = list(subset)
            try:
                x = _equality_point(sp, factor, W)
            except _RankDeficient:
                continue

            if not _is_feasible(sp, x):
                continue

            cost = 0.5 * x @ sp.H @ x + sp.B @ x
            if best is None or cost < best[0]:
                best = (cost, x, W)

        if best is not None:
            return best[1], best[2]

    raise Infeasible("Ограничения QP несовместны")


def solve(problem: QpProblem) -> QpSolution:
    """
    Прямой метод активного множества для малой плотной выпуклой QP

    Args:
        problem: Задача с положительно определенной (или полуопределенной) H

    Returns:
        QpSolution со статусом Optimal и множителями λ ≥ 0 (Hx + B + Σλ_i·a_i = 0)

    Raises:
        Infeasible: Если ограничения несовместны
        IllConditioned: Если KKT система вырождена или итерации не завершились
    """
    sp = equilibrate(problem)
    factor, regularized = _factorize(sp.H)

    x, W = _initial_point(sp, factor)
    m = problem.m
    max_changes = 2 ** max(m, 8)
    lam = np.zeros(len(W))
    grad_scale = 1.0 + float(np.linalg.norm(sp.B))
    # после полного шага без блокировки x уже минимум на грани W
    at_face_minimum = False

    for _ in range(max_changes):
        g = sp.H @ x + sp.B

        try:
            p, lam = _direction(sp, factor, W, g)
        except _RankDeficient:
            dropped = W.pop()
            logger.debug(f"Плохо обусловленное рабочее множество, строка {dropped} удалена")
            at_face_minimum = False
            continue

        if at_face_minimum or _negligible_step(sp, x, p):
            at_face_minimum = False
            if not W or np.min(lam) >= -DUAL_TOL * (grad_scale + np.linalg.norm(g)):
                break

            W.pop(int(np.argmin(lam)))
            continue

        alpha = 1.0
        blocking = None
        Ap = sp.A @ p
        slack = sp.b - sp.A @ x
        for i in range(m):
            if i in W or Ap[i] <= STEP_TOL * np.linalg.norm(p):
                continue
            step = max(slack[i], 0.0) / Ap[i]
            if step < alpha:
                alpha = step
                blocking = i

        x = x + alpha * p
        if blocking is not None:
            W.append(blocking)
        else:
            at_face_minimum = True
    else:
        raise IllConditioned(f"Метод активного множества не завершился за {max_changes} смен")

    lam_full = np.zeros(m)
    if W:
        lam_full[W] = np.maximum(lam, 0.0)

    x_out, multipliers = sp.unscale(x, lam_full)

    return QpSolution(
        x=x_out,
        objective=problem.objective(x_out),
        active_set=tuple(sorted(W)),
        status=QpStatus.OPTIMAL,
        multipliers=multipliers,
        regularized=regularized
    )
