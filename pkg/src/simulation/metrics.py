# src/simulation/metrics.py

from typing import Callable, Optional, Sequence, Tuple
import numpy as np
from src.qp.problem import QpStatus
from src.simulation.types import RunMetrics, StepRecord
from src.utils.errors import EmptyWindow

Selector = Callable[[StepRecord], Tuple[np.ndarray, np.ndarray]]

STEADY_WINDOW = (25.0, 40.0)
CONVERGENCE_FRACTION = 0.01
LATE_PHASE_DAY = 20.0


def tracking_pair(record: StepRecord) -> Tuple[np.ndarray, np.ndarray]:
    """Истинные [S, I] против желаемых"""
    return np.array([record.z[0], record.z[2]]), record.z_d


def estimation_pair(record: StepRecord) -> Tuple[np.ndarray, np.ndarray]:
    return record.z, record.z_hat


def rmse(
    records: Sequence[StepRecord],
    selector: Selector,
    window: Optional[Tuple[float, float]] = None
) -> float:
    """
    Среднеквадратичная норма ошибки выбранного канала

    Args:
        records: Записи прогона
        selector: Функция, возвращающая пару (a, b) для записи
        window: Окно [t0, t1] по времени (включительно) или None для всего прогона

    Returns:
        sqrt(mean ‖a - b‖²)

    Raises:
        EmptyWindow: Если в окно не попала ни одна запись
    """
    if window is not None:
        t0, t1 = window
        records = [r for r in records if t0 <= r.t <= t1]

    if not records:
        raise EmptyWindow(f"Нет записей в окне {window}")

    squared = []
    for record in records:
        a, b = selector(record)
        diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
        squared.append(float(diff @ diff))

    return float(np.sqrt(np.mean(squared)))


def converge_day(records: Sequence[StepRecord], population: float) -> Optional[float]:
    """Первый момент, когда S + I < 1% популяции, или None"""
    threshold = CONVERGENCE_FRACTION * population
    for record in records:
        if record.z[0] + record.z[2] < threshold:
            return record.t
    return None


def control_total_variation(records: Sequence[StepRecord], after: float = LATE_PHASE_DAY) -> float:
    """Полная вариация u (сумма по каналам) на t ≥ after"""
    late = np.array([r.u for r in records if r.t >= after])
    if len(late) < 2:
        return 0.0
    return float(np.sum(np.abs(np.diff(late, axis=0))))


def compute_metrics(
    records: Sequence[StepRecord],
    population: float,
    horizon: float,
    delta_max: float = 0.0
) -> RunMetrics:
    """Сводка по полной (не прореженной) последовательности записей"""
    if not records:
        raise EmptyWindow("Прогон не содержит записей")

    window = (STEADY_WINDOW[0], min(STEADY_WINDOW[1], horizon))
    steady_available = any(window[0] <= r.t <= window[1] for r in records)

    def split(selector: Selector) -> Tuple[float, float]:
        full = rmse(records, selector)
        steady = rmse(records, selector, window) if steady_available else 0.0
        return full, steady

    u = np.array([r.u for r in records])
    shot_corrections = [r.correction for r in records if r.shot]
    day = converge_day(records, population)

    return RunMetrics(
        rmse_tracking=split(tracking_pair),
        rmse_estimation=split(estimation_pair),
        u_max=(float(np.max(u[:, 0])), float(np.max(u[:, 1]))),
        u_rms=float(np.sqrt(np.mean(np.sum(u * u, axis=1)))),
        h_max=max(0.0, float(max(r.h for r in records))),
        converge_day=day if day is None or day <= horizon else None,
        clamp_total=int(records[-1].clamp_events),
        u_tv_late=control_total_variation(records),
        max_correction_at_shots=float(max(shot_corrections)) if shot_corrections else 0.0,
        delta_max=float(delta_max),
        qp_status_all_optimal=all(r.status == QpStatus.OPTIMAL for r in records),
        steps=len(records)
    )
