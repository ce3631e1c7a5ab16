# src/simulation/runner.py

from typing import List, Optional, Tuple
import numpy as np
from src.control.clf_strategy.step6_uncertainty_residual import UncertaintyResidual
from src.control.clf_strategy.strategy import ClfController
from src.filtering.filter_selection import create_filter
from src.model.integrator import rk4_step
from src.model.seiar import STATE_DIM, measurement
from src.monitoring.run_monitor import RunMonitor
from src.noise.generator import (
    NoiseStreams,
    ShotSchedule,
    build_schedule,
    sample_measurement_noise,
    sample_process_noise
)
from src.simulation.metrics import compute_metrics
from src.simulation.types import RunMetrics, ScenarioConfig, StepRecord
from src.utils.errors import SimulationError
from src.utils.logger import get_logger

logger = get_logger(__name__)


def run(cfg: ScenarioConfig, monitor: Optional[RunMonitor] = None) -> Tuple[List[StepRecord], RunMetrics]:
    """
    Замкнутый прогон: регулятор, объект, шумы и фильтр на каждом шаге

    Порядок шага k: управление по оценке ẑ_k и запись; шумы; RK4 объекта;
    измерение y_{k+1} = h(z_{k+1}) + v с окном импульсов [t_k, t_k + dt); шаг фильтра.

    Args:
        cfg: Сценарий
        monitor: Монитор прогона (по умолчанию из настроек окружения)

    Returns:
        (записи с шагом record_stride, метрики по всем шагам)

    Raises:
        SimulationError: Численные сбои с прикрепленным индексом шага
    """
    monitor = monitor or RunMonitor.from_config()
    noise = cfg.noise
    dt = cfg.dt
    n_steps = cfg.n_steps

    streams = NoiseStreams.create(cfg.seed)
    schedule = build_schedule(noise, dt=dt) if noise.enabled else ShotSchedule.empty()

    kalman = create_filter(cfg)
    controller = ClfController(cfg.filter_params, cfg.clf, cfg.traj, cfg.z_hat0.as_array())

    z = cfg.z0.as_array()
    fs = kalman.initialize(cfg.z_hat0.as_array(), cfg.p0_matrix)
    y = measurement(z)

    records: List[StepRecord] = []
    clamp_total = 0
    delta_max = 0.0
    shot = False
    e_prev: Optional[np.ndarray] = None
    mu_prev: Optional[np.ndarray] = None

    monitor.on_start(cfg)

    for k in range(n_steps + 1):
        t = k * dt

        try:
            decision = controller.decide(fs.z_hat, t)
        except SimulationError as e:
            logger.error(f"Сбой регулятора на шаге {k} (t={t:.2f}): {e}")
            raise e.at_step(k)

        terms = decision.terms
        if e_prev is not None:
            delta = UncertaintyResidual.execute(e_prev, terms.e, mu_prev, dt)
            delta_max = max(delta_max, float(np.max(np.abs(delta))))
        e_prev, mu_prev = terms.e, decision.mu

        record = StepRecord(
            t=t,
            z=z,
            z_hat=fs.z_hat,
            y=y,
            u=decision.u,
            h=decision.h,
            nu=fs.nu,
            V=terms.V,
            e=terms.e,
            objective=decision.objective,
            clamp_events=clamp_total,
            z_d=terms.z_d,
            correction=fs.correction,
            shot=shot,
            status=decision.status
        )
        records.append(record)
        monitor.on_step(record, fs)

        if k == n_steps:
            break

        if noise.enabled:
            w = sample_process_noise(streams.process, noise.q_diag, dt, noise.continuous_scaling)
            v = sample_measurement_noise(
                streams.measurement, noise.r_diag, schedule, t, dt, noise.continuous_scaling
            )
            shot = schedule.hits(t, dt)
        else:
            w = np.zeros(STATE_DIM)
            v = np.zeros(2)

        try:
            z, clamped = rk4_step(z, decision.u, cfg.plant_params, w, dt)
            clamp_total += clamped
            y = measurement(z) + v
            fs = kalman.step(fs, y, decision.u, dt)
        except SimulationError as e:
            logger.error(f"Численный сбой на шаге {k} (t={t:.2f}): {e}")
            raise e.at_step(k)

    metrics = compute_metrics(records, cfg.population, cfg.horizon, delta_max)
    monitor.on_finish(metrics, controller.qp_regularizations, controller.pwmc_fallbacks)

    return records[::cfg.record_stride], metrics
