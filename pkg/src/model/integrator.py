# src/model/integrator.py

from typing import Callable, Tuple
import numpy as np
from src.model.params import ModelParams
from src.model.seiar import dynamics
from src.utils.errors import NonFinite
from src.utils.logger import get_logger

logger = get_logger(__name__)


def rk4_advance(rhs: Callable[[np.ndarray], np.ndarray], x: np.ndarray, dt: float) -> np.ndarray:
    """
    Один шаг классического Рунге-Кутты 4-го порядка для автономной правой части

    Args:
        rhs: Правая часть dx/dt = rhs(x) (входы удерживаются постоянными на шаге)
        x: Текущее состояние
        dt: Шаг, сутки

    Returns:
        Состояние через dt
    """
    k1 = rhs(x)
    k2 = rhs(x + 0.5 * dt * k1)
    k3 = rhs(x + 0.5 * dt * k2)
    k4 = rhs(x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step(
    z: np.ndarray,
    u: np.ndarray,
    params: ModelParams,
    w: np.ndarray,
    dt: float
) -> Tuple[np.ndarray, int]:
    """
    Продвигает SEIAR модель на один шаг RK4 с постоянным шумом процесса w

    Args:
        z: Состояние [S, E, I, A, R]
        u: Управление, удерживается на шаге
        params: Параметры объекта
        w: Шум процесса (человек/сут), добавляется к производной
        dt: Шаг, сутки

    Returns:
        (новое состояние, число компонент, обрезанных до нуля)

    Raises:
        NonFinite: Если в состоянии появились NaN/Inf
    """
    if dt <= 0.0:
        raise ValueError(f"Шаг интегрирования должен быть положительным, получено {dt}")

    z_next = rk4_advance(lambda x: dynamics(x, u, params) + w, z, dt)

    if not np.all(np.isfinite(z_next)):
        raise NonFinite(f"Состояние объекта стало неконечным: {z_next}")

    negative = z_next < 0.0
    clamp_events = int(np.count_nonzero(negative))
    if clamp_events:
        logger.debug(f"Обрезка отрицательных компартментов до нуля: {np.flatnonzero(negative).tolist()}")
        z_next = np.where(negative, 0.0, z_next)

    return z_next, clamp_events
