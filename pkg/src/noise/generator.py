# src/noise/generator.py

from typing import NamedTuple, Optional, Sequence, Tuple
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from src.utils.logger import get_logger

logger = get_logger(__name__)

BOTH_CHANNELS: Tuple[int, ...] = (0, 1)


class NoiseConfig(BaseModel):
    """Ковариации гауссовых шумов и параметры импульсного (shot) шума измерений"""

    model_config = ConfigDict(frozen=True, extra='forbid')

    q_diag: Tuple[float, float, float, float, float]
    r_diag: Tuple[float, float]
    shot_count: int = Field(ge=0)
    shot_magnitude: float
    seed: int = Field(ge=0, lt=2 ** 64)
    horizon: float = Field(gt=0.0)
    continuous_scaling: bool = False
    enabled: bool = True

    @field_validator('q_diag', 'r_diag')
    @classmethod
    def _nonnegative(cls, value):
        if any(v < 0.0 for v in value):
            raise ValueError("диагональ ковариации должна быть неотрицательной")
        return value

    @model_validator(mode='after')
    def _positive_r(self):
        if any(v <= 0.0 for v in self.r_diag):
            raise ValueError("r_diag > 0: ковариация шума измерений должна быть обратимой")
        return self


class NoiseStreams(NamedTuple):
    """Независимые подпотоки одного seed: шум процесса, шум измерений, расписание импульсов"""

    process: np.random.Generator
    measurement: np.random.Generator
    shots: np.random.Generator

    @classmethod
    def create(cls, seed: int) -> 'NoiseStreams':
        children = np.random.SeedSequence(seed).spawn(3)
        return cls(*(np.random.Generator(np.random.Philox(child)) for child in children))


class ShotSchedule:
    """Моменты импульсов (сутки), их величина и задетые каналы измерений"""

    def __init__(self, times: Sequence[float], magnitude: float, channels: Sequence[Tuple[int, ...]]):
        if len(times) != len(channels):
            raise ValueError("Число моментов импульсов и наборов каналов не совпадает")

        self.times = np.asarray(sorted(times), dtype=float)
        self.magnitude = float(magnitude)
        self.channels = tuple(tuple(c) for c in channels)

    @classmethod
    def empty(cls) -> 'ShotSchedule':
        return cls([], 0.0, [])

    def __len__(self) -> int:
        return len(self.times)

    def impulse(self, t: float, dt: float) -> np.ndarray:
        """Суммарный импульс по каналам для окна [t, t+dt)"""
        impulse = np.zeros(2)
        lo = np.searchsorted(self.times, t, side='left')
        hi = np.searchsorted(self.times, t + dt, side='left')
        for idx in range(lo, hi):
            for channel in self.channels[idx]:
                impulse[channel] += self.magnitude
        return impulse

    def hits(self, t: float, dt: float) -> bool:
        lo = np.searchsorted(self.times, t, side='left')
        hi = np.searchsorted(self.times, t + dt, side='left')
        return hi > lo


def build_schedule(cfg: NoiseConfig, dt: Optional[float] = None) -> ShotSchedule:
    """
    Строит расписание импульсов из подпотока shots

    При заданном dt каждый импульс попадает в отдельный шаг сетки, поэтому ровно
    shot_count шагов получают импульс. Если импульсов больше, чем шагов, шаги
    выбираются с повторением и импульсы одного шага суммируются. Без dt моменты
    равномерны на [0, horizon).

    Args:
        cfg: Настройки шума
        dt: Шаг сетки симуляции (сутки) или None

    Returns:
        ShotSchedule с импульсами на оба канала
    """
    if cfg.shot_count == 0:
        return ShotSchedule.empty()

    gen = NoiseStreams.create(cfg.seed).shots

    if dt is None:
        times = gen.uniform(0.0, cfg.horizon, size=cfg.shot_count)
    else:
        n_slots = max(int(round(cfg.horizon / dt)), 1)
        crowded = cfg.shot_count > n_slots
        if crowded:
            logger.info(f"shot_count={cfg.shot_count} больше числа шагов {n_slots}, часть шагов получит несколько импульсов")

        slots = np.sort(gen.choice(n_slots, size=cfg.shot_count, replace=crowded))
        offsets = gen.random(cfg.shot_count)
        times = (slots + offsets) * dt
        # внутри своего шага и строго меньше horizon
        times = np.minimum(times, np.nextafter((slots + 1) * dt, 0.0))
        times = np.minimum(times, np.nextafter(cfg.horizon, 0.0))

    schedule = ShotSchedule(times.tolist(), cfg.shot_magnitude, [BOTH_CHANNELS] * cfg.shot_count)
    logger.debug(f"Расписание импульсов: {len(schedule)} шт. по {cfg.shot_magnitude:g}, "
                 f"моменты {np.round(schedule.times, 3).tolist()}")
    return schedule


def sample_process_noise(
    gen: np.random.Generator,
    q_diag: Sequence[float],
    dt: float,
    continuous_scaling: bool = False
) -> np.ndarray:
    """Гауссов шум процесса на шаг (дисперсия q_diag, либо q_diag/dt при continuous_scaling)"""
    if dt <= 0.0:
        raise ValueError(f"dt должен быть положительным, получено {dt}")

    variance = np.asarray(q_diag, dtype=float)
    if continuous_scaling:
        variance = variance / dt
    return gen.standard_normal(variance.size) * np.sqrt(variance)


def sample_measurement_noise(
    gen: np.random.Generator,
    r_diag: Sequence[float],
    schedule: ShotSchedule,
    t: float,
    dt: float,
    continuous_scaling: bool = False
) -> np.ndarray:
    """
    Шум измерений: гауссова составляющая плюс импульсы, попавшие в окно [t, t+dt)

    Args:
        gen: Подпоток measurement
        r_diag: Диагональ R
        schedule: Расписание импульсов
        t: Начало окна, сутки
        dt: Ширина окна, сутки
        continuous_scaling: Использовать R/dt вместо R

    Returns:
        Вектор шума для каналов [E, I]
    """
    variance = np.asarray(r_diag, dtype=float)
    if continuous_scaling:
        variance = variance / dt
    return gen.standard_normal(variance.size) * np.sqrt(variance) + schedule.impulse(t, dt)
