# src/simulation/types.py

from typing import Any, NamedTuple, Optional, Tuple
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from src.config.validation import build_model
from src.control.types import ClfConfig, DesiredTrajectory
from src.filtering.emckf import FilterMode, check_covariance
from src.model.params import ModelParams, SeiarState
from src.noise.generator import NoiseConfig
from src.qp.problem import QpStatus
from src.utils.errors import BadCovariance

Matrix5 = Tuple[
    Tuple[float, float, float, float, float],
    Tuple[float, float, float, float, float],
    Tuple[float, float, float, float, float],
    Tuple[float, float, float, float, float],
    Tuple[float, float, float, float, float],
]


class ScenarioConfig(BaseModel):
    """Полное описание эксперимента"""

    model_config = ConfigDict(frozen=True, extra='forbid')

    horizon: float = Field(gt=0.0)
    dt: float = Field(gt=0.0)
    plant_params: ModelParams
    filter_params: ModelParams
    z0: SeiarState
    z_hat0: SeiarState
    P0: Matrix5
    noise: NoiseConfig
    filter_mode: FilterMode = FilterMode.EMCKF
    sigma: float = Field(gt=0.0)
    kernel_literal: bool = False
    clf: ClfConfig
    traj: DesiredTrajectory = DesiredTrajectory()
    seed: int = Field(ge=0, lt=2 ** 64)
    record_stride: int = Field(default=10, ge=1)
    n0: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode='after')
    def _check_invariants(self):
        steps = self.horizon / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValueError("horizon/dt должно быть целым")

        if self.n0 is not None and abs(self.z0.total - self.n0) > 1e-9 * self.n0:
            raise ValueError(f"сумма z0 ({self.z0.total:g}) должна равняться N0 ({self.n0:g})")

        if self.noise.horizon != self.horizon:
            raise ValueError("noise.horizon должен совпадать с horizon")
        if self.noise.seed != self.seed:
            raise ValueError("noise.seed должен совпадать с seed")

        try:
            check_covariance(np.array(self.P0, dtype=float))
        except BadCovariance as e:
            raise ValueError(f"P0: {e}")

        return self

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    @property
    def population(self) -> float:
        return self.n0 if self.n0 is not None else self.z0.total

    @property
    def p0_matrix(self) -> np.ndarray:
        return np.array(self.P0, dtype=float)

    def replaced(self, **changes: Any) -> 'ScenarioConfig':
        """
        Копия с измененными полями и повторной валидацией

        horizon и seed синхронно меняются и в настройках шума.
        """
        data = self.model_dump()
        noise = dict(data['noise'])
        if 'horizon' in changes:
            noise['horizon'] = changes['horizon']
        if 'seed' in changes:
            noise['seed'] = changes['seed']
        if 'noise' in changes:
            noise.update(changes.pop('noise'))
        data.update(changes)
        data['noise'] = noise
        return build_model(ScenarioConfig, data)


class StepRecord(NamedTuple):
    t: float
    z: np.ndarray
    z_hat: np.ndarray
    y: np.ndarray
    u: np.ndarray
    h: float
    nu: float
    V: float
    e: np.ndarray
    objective: float
    clamp_events: int
    z_d: np.ndarray
    correction: float
    shot: bool
    status: QpStatus


class RunMetrics(BaseModel):
    """Сводные показатели прогона"""

    model_config = ConfigDict(frozen=True)

    rmse_tracking: Tuple[float, float]
    rmse_estimation: Tuple[float, float]
    u_max: Tuple[float, float]
    u_rms: float
    h_max: float
    converge_day: Optional[float]
    clamp_total: int
    u_tv_late: float
    max_correction_at_shots: float
    delta_max: float
    qp_status_all_optimal: bool
    steps: int
