# src/simulation/batch.py

import asyncio
from typing import List, NamedTuple, Sequence, Tuple
from src.filtering.emckf import FilterMode
from src.simulation.runner import run
from src.simulation.types import RunMetrics, ScenarioConfig, StepRecord
from src.utils.logger import get_logger

logger = get_logger(__name__)

RunResult = Tuple[List[StepRecord], RunMetrics]


class FilterComparison(NamedTuple):
    emckf: RunResult
    ekf: RunResult


async def _run_all(configs: Sequence[ScenarioConfig]) -> List[RunResult]:
    return list(await asyncio.gather(*(asyncio.to_thread(run, cfg) for cfg in configs)))


def run_batch(configs: Sequence[ScenarioConfig]) -> List[RunResult]:
    """
    Выполняет независимые прогоны параллельно в рабочих потоках

    Каждый прогон владеет своими подпотоками шума, фильтром и записями,
    поэтому результат не зависит от числа потоков. Порядок результатов
    совпадает с порядком configs.
    """
    if not configs:
        return []

    logger.info(f"Пакет из {len(configs)} прогонов")
    return asyncio.run(_run_all(configs))


def compare_filters(cfg: ScenarioConfig) -> FilterComparison:
    """Прогоны EMCKF и EKF с одинаковым seed и одним расписанием импульсов"""
    emckf_result, ekf_result = run_batch([
        cfg.replaced(filter_mode=FilterMode.EMCKF),
        cfg.replaced(filter_mode=FilterMode.EKF),
    ])

    logger.info(
        f"Сравнение фильтров: RMSE оценки EMCKF={emckf_result[1].rmse_estimation[0]:.2f}, "
        f"EKF={ekf_result[1].rmse_estimation[0]:.2f}"
    )
    return FilterComparison(emckf=emckf_result, ekf=ekf_result)
