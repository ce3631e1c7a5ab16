# src/model/params.py

from typing import Tuple
import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from src.utils.logger import get_logger

logger = get_logger(__name__)

FRACTION_FIELDS = ('epsilon', 'q', 'delta', 'p', 'zeta')

FLU_PARAMS = {
    'epsilon': 0.0,
    'q': 0.5,
    'delta': 1.0,
    'kappa': 0.526,
    'p': 0.667,
    'alpha': 0.244,
    'eta': 0.244,
    'zeta': 0.98,
}


class ModelParams(BaseModel):
    """Параметры SEIAR модели Θ плюс скорость заражения beta"""

    model_config = ConfigDict(frozen=True, extra='forbid')

    beta: float = Field(ge=0.0, description="Скорость заражения, 1/(чел·сут)")
    epsilon: float = Field(ge=0.0, le=1.0)
    q: float = Field(ge=0.0, le=1.0)
    delta: float = Field(ge=0.0, le=1.0)
    kappa: float = Field(ge=0.0)
    p: float = Field(ge=0.0, le=1.0)
    alpha: float = Field(ge=0.0)
    eta: float = Field(ge=0.0)
    zeta: float = Field(ge=0.0, le=1.0)

    @classmethod
    def flu(cls, beta: float) -> 'ModelParams':
        """Параметры гриппа с заданной beta"""
        return cls(beta=beta, **FLU_PARAMS)

    def perturbed(self, fraction: float) -> 'ModelParams':
        """
        Возвращает параметры, отклоненные на fraction от номинала

        Доли (epsilon, q, delta, p, zeta) после масштабирования обрезаются до [0, 1].

        Args:
            fraction: Относительное отклонение, например +0.5 или -0.5

        Returns:
            Новый экземпляр ModelParams
        """
        if fraction <= -1.0:
            raise ValueError(f"Отклонение должно быть больше -100%, получено {fraction:+.0%}")

        scaled = {}
        for name, value in self.model_dump().items():
            value = value * (1.0 + fraction)
            if name in FRACTION_FIELDS:
                value = min(max(value, 0.0), 1.0)
            scaled[name] = value

        clipped = [name for name in FRACTION_FIELDS if getattr(self, name) * (1.0 + fraction) > 1.0]
        if clipped:
            logger.debug(f"Отклонение {fraction:+.0%}: доли {clipped} обрезаны до 1")

        return ModelParams(**scaled)


class SeiarState(BaseModel):
    """Численности компартментов S, E, I, A, R (человек)"""

    model_config = ConfigDict(frozen=True, extra='forbid')

    s: float = Field(ge=0.0)
    e: float = Field(ge=0.0)
    i: float = Field(ge=0.0)
    a: float = Field(ge=0.0)
    r: float = Field(ge=0.0)

    @classmethod
    def from_array(cls, z) -> 'SeiarState':
        s, e, i, a, r = (float(v) for v in z)
        return cls(s=s, e=e, i=i, a=a, r=r)

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.e, self.i, self.a, self.r], dtype=float)

    @property
    def total(self) -> float:
        return self.s + self.e + self.i + self.a + self.r


class ControlInput(BaseModel):
    """Нормированные скорости вакцинации u1 и противовирусной терапии u2"""

    model_config = ConfigDict(frozen=True, extra='forbid')

    u1: float = Field(ge=0.0, le=1.0)
    u2: float = Field(ge=0.0, le=1.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.u1, self.u2], dtype=float)


def _next_generation_matrix(params: ModelParams, n0: float) -> Tuple[np.ndarray, np.ndarray]:
    """Матрицы F (новые заражения) и V (переходы) для подсистемы (E, I, A) в точке S = n0"""
    b = params.beta * n0
    f_matrix = np.array([
        [b * params.epsilon, b * (1.0 - params.q), b * params.delta],
        [0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0],
    ])
    v_matrix = np.array([
        [params.kappa, 0.0, 0.0],
        [-params.p * params.kappa, params.alpha, 0.0],
        [-(1.0 - params.p) * params.kappa, 0.0, params.eta],
    ])
    return f_matrix, v_matrix


def basic_reproduction_number(params: ModelParams, n0: float) -> float:
    """
    Базовое репродуктивное число R0 через спектральный радиус F·V^-1

    Args:
        params: Параметры модели
        n0: Численность популяции в свободном от болезни состоянии

    Returns:
        R0 (совпадает с beta·n0·(eps/kappa + p(1-q)/alpha + (1-p)delta/eta))
    """
    if min(params.kappa, params.alpha, params.eta) <= 0.0:
        raise ValueError("R0 определено только при kappa, alpha, eta > 0")

    f_matrix, v_matrix = _next_generation_matrix(params, n0)
    eigenvalues = np.linalg.eigvals(f_matrix @ np.linalg.inv(v_matrix))
    return float(np.max(np.abs(eigenvalues)))


def calibrate_beta(params: ModelParams, n0: float, r0: float) -> float:
    """
    Подбирает beta так, чтобы R0 совпало с целевым значением

    R0 линейно по beta, поэтому достаточно одного вычисления при beta = 1.

    Args:
        params: Параметры модели (значение beta игнорируется)
        n0: Численность популяции
        r0: Целевое R0

    Returns:
        Откалиброванная beta
    """
    unit = basic_reproduction_number(params.model_copy(update={'beta': 1.0}), n0)
    beta = r0 / unit
    logger.debug(f"Калибровка beta: R0={r0} при N0={n0:.0f} -> beta={beta:.6e}")
    return beta
