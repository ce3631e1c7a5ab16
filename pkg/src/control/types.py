# src/control/types.py

from enum import Enum
from typing import Literal, NamedTuple, Optional, Tuple
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from src.qp.problem import QpStatus


class ControlLaw(str, Enum):
    QP = 'qp'
    PWMC = 'pwmc'


class ClfConfig(BaseModel):
    """Настройки RCLF регулятора: скорость λ, робастный коэффициент, штраф c и границы u"""

    model_config = ConfigDict(frozen=True, extra='forbid', populate_by_name=True)

    lam: float = Field(gt=0.0, alias='lambda')
    k_r: float = Field(ge=0.0)
    c: float = Field(gt=0.0)
    u_min: Tuple[float, float] = (0.0, 0.0)
    u_max: Tuple[float, float] = (1.0, 1.0)
    z_floor: float = Field(default=1e-6, gt=0.0)
    law: ControlLaw = ControlLaw.QP

    @model_validator(mode='after')
    def _check_box(self):
        for lo, hi in zip(self.u_min, self.u_max):
            if not 0.0 <= lo <= hi <= 1.0:
                raise ValueError("0 ≤ u_min ≤ u_max ≤ 1")
        return self

    @property
    def u_min_array(self) -> np.ndarray:
        return np.asarray(self.u_min, dtype=float)

    @property
    def u_max_array(self) -> np.ndarray:
        return np.asarray(self.u_max, dtype=float)

    @property
    def relaxation_ceiling(self) -> float:
        """
        Верхняя граница h при неактивных границах u

        Тогда h = (λV + K_r‖e‖)/(1 + c‖e‖²) <= λ/(2c) + K_r/(2√c); первое слагаемое
        достигается при большой ошибке, второе при ‖e‖ около 1/√c.
        """
        return self.lam / (2.0 * self.c) + self.k_r / (2.0 * np.sqrt(self.c))


class DesiredTrajectory(BaseModel):
    """Желаемые значения [S, I]: тождественный ноль или экспоненциальный спад от z0"""

    model_config = ConfigDict(frozen=True, extra='forbid')

    law: Literal['constant_zero', 'exp_decay'] = 'exp_decay'
    gamma: float = Field(default=0.3, ge=0.0)
    z0: Optional[Tuple[float, float]] = None

    def resolved(self, z_hat0: np.ndarray) -> 'DesiredTrajectory':
        """Подставляет [ẑ1(0), ẑ3(0)] как z0, если он не задан явно"""
        if self.z0 is not None:
            return self
        return self.model_copy(update={'z0': (float(z_hat0[0]), float(z_hat0[2]))})

    def value(self, t: float) -> np.ndarray:
        if self.law == 'constant_zero':
            return np.zeros(2)
        if self.z0 is None:
            raise ValueError("Для exp_decay нужен z0 (см. resolved)")
        return np.asarray(self.z0, dtype=float) * np.exp(-self.gamma * t)

    def rate(self, t: float) -> np.ndarray:
        return -self.gamma * self.value(t) if self.law == 'exp_decay' else np.zeros(2)


class ClfTerms(NamedTuple):
    V: float
    LfV: float
    LgV: np.ndarray
    phi0: float
    phi0_rob: float
    phi1: np.ndarray
    e: np.ndarray
    y_hat: np.ndarray
    z_e_hat: np.ndarray
    z_d: np.ndarray
    z_d_dot: np.ndarray


class ControlDecision(NamedTuple):
    """Решение на шаге: релаксация h, управление u и диагностика CLF"""

    h: float
    u: np.ndarray
    terms: ClfTerms
    objective: float
    status: QpStatus
    mu: np.ndarray
    active_set: Tuple[int, ...] = ()
    law: ControlLaw = ControlLaw.QP
