# src/monitoring/run_monitor.py

from typing import Optional, TYPE_CHECKING
import numpy as np
from src.config.manager import config_manager
from src.filtering.emckf import FilterState, check_covariance
from src.utils.errors import BadCovariance
from src.utils.logger import get_logger

if TYPE_CHECKING:
    from src.simulation.types import RunMetrics, ScenarioConfig, StepRecord

logger = get_logger(__name__)


class RunMonitor:
    """Мониторинг прогона: прогресс, здоровье ковариации, счетчики аномалий"""

    def __init__(self, interval_days: float = 5.0, debug_checks: bool = False):
        self.interval_days = interval_days
        self.debug_checks = debug_checks

        self.label = ''
        self.next_report = 0.0
        self.covariance_violations = 0
        self.clamp_events = 0
        self.qp_regularizations = 0
        self.pwmc_fallbacks = 0
        self.relaxation_ceiling = float('inf')
        self.relaxation_excess = 0
        self.last_record: Optional['StepRecord'] = None

    @classmethod
    def from_config(cls) -> 'RunMonitor':
        """Монитор с настройками MONITOR_INTERVAL_DAYS и DEBUG_CHECKS"""
        monitor_config = config_manager.get_monitor_config()
        return cls(
            interval_days=monitor_config['interval_days'],
            debug_checks=monitor_config['debug_checks']
        )

    def on_start(self, cfg: 'ScenarioConfig'):
        self.label = cfg.filter_mode.value.upper()
        self.next_report = self.interval_days
        self.relaxation_ceiling = cfg.clf.relaxation_ceiling
        self.relaxation_excess = 0
        logger.info(
            f"[{self.label}] Старт прогона: {cfg.horizon:g} сут, dt={cfg.dt:g}, seed={cfg.seed}, "
            f"импульсов {cfg.noise.shot_count if cfg.noise.enabled else 0}, закон {cfg.clf.law.value}"
        )

    def on_step(self, record: 'StepRecord', fs: FilterState):
        """Вызывается на каждом шаге; пишет прогресс раз в interval_days"""
        self.last_record = record
        self.clamp_events = record.clamp_events

        if self.debug_checks:
            self._check_covariance(record.t, fs)

        # выше потолка h бывает только при упоре u в границы
        if record.h > self.relaxation_ceiling * (1.0 + 1e-9):
            self.relaxation_excess += 1
            logger.debug(f"[{self.label}] t={record.t:.2f}: h={record.h:.3e} выше потолка {self.relaxation_ceiling:.3e}")

        if record.t + 1e-9 >= self.next_report:
            self.next_report += self.interval_days
            logger.info(
                f"[{self.label}] t={record.t:5.1f} | S+I={record.z[0] + record.z[2]:9.1f} | "
                f"ν={record.nu:.2e} | u=({record.u[0]:.3f}, {record.u[1]:.3f}) | h={record.h:.2e}"
            )

    def on_finish(self, metrics: 'RunMetrics', qp_regularizations: int = 0, pwmc_fallbacks: int = 0):
        self.qp_regularizations = qp_regularizations
        self.pwmc_fallbacks = pwmc_fallbacks

        converged = f"{metrics.converge_day:.2f}" if metrics.converge_day is not None else "нет"
        logger.info(
            f"[{self.label}] Прогон завершен: сходимость {converged} сут, "
            f"RMSE оценки {metrics.rmse_estimation[0]:.2f}, u_max=({metrics.u_max[0]:.3f}, {metrics.u_max[1]:.3f}), "
            f"h_max={metrics.h_max:.3e}"
        )

        if self.clamp_events:
            logger.warning(f"[{self.label}] Обрезок отрицательных компартментов: {self.clamp_events}")
        if self.qp_regularizations:
            logger.warning(f"[{self.label}] Регуляризаций H в QP: {self.qp_regularizations}")
        if self.pwmc_fallbacks:
            logger.info(f"[{self.label}] Переходов с PWMC на QP: {self.pwmc_fallbacks}")
        if self.relaxation_excess:
            logger.warning(
                f"[{self.label}] Шагов с h выше потолка {self.relaxation_ceiling:.3e} (u на границе): {self.relaxation_excess}"
            )
        if self.covariance_violations:
            logger.warning(f"[{self.label}] Нарушений здоровья ковариации: {self.covariance_violations}")

    def _check_covariance(self, t: float, fs: FilterState):
        try:
            check_covariance(fs.P)
        except BadCovariance as e:
            self.covariance_violations += 1
            logger.warning(
                f"[{self.label}] t={t:.2f}: {e} (λmin={np.min(np.linalg.eigvalsh(fs.P)):.3e})"
            )
