# tests/conftest.py

import numpy as np
import pytest
from src.cli.presets import POPULATION, build_preset
from src.control.types import DesiredTrajectory
from src.filtering.emckf import FilterMode
from src.model.params import ModelParams, calibrate_beta
from src.model.seiar import measurement
from src.monitoring.run_monitor import RunMonitor
from src.qp.problem import QpStatus
from src.simulation.runner import run
from src.simulation.types import StepRecord

NOMINAL_STATE = np.array([15000.0, 200.0, 500.0, 300.0, 0.0])
ESTIMATE_STATE = np.array([11000.0, 800.0, 1000.0, 700.0, 2500.0])


def make_record(t, z=NOMINAL_STATE, z_hat=ESTIMATE_STATE, u=(0.0, 0.0), z_d=(0.0, 0.0), **overrides) -> StepRecord:
    """Синтетическая запись шага для проверок метрик и вывода"""
    data = dict(
        t=t,
        z=np.asarray(z, dtype=float),
        z_hat=np.asarray(z_hat, dtype=float),
        y=measurement(np.asarray(z, dtype=float)),
        u=np.asarray(u, dtype=float),
        h=0.0,
        nu=1.0,
        V=0.0,
        e=np.zeros(2),
        objective=0.0,
        clamp_events=0,
        z_d=np.asarray(z_d, dtype=float),
        correction=0.0,
        shot=False,
        status=QpStatus.OPTIMAL,
    )
    data.update(overrides)
    return StepRecord(**data)


@pytest.fixture(scope='session')
def beta() -> float:
    return calibrate_beta(ModelParams.flu(beta=0.0), POPULATION, 1.8)


@pytest.fixture(scope='session')
def params(beta) -> ModelParams:
    return ModelParams.flu(beta=beta)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240501)


@pytest.fixture
def quiet_monitor() -> RunMonitor:
    return RunMonitor(interval_days=1e9)


def _full_run(cfg):
    return run(cfg.replaced(record_stride=1), RunMonitor(interval_days=1e9))


@pytest.fixture(scope='session')
def nominal_config(beta):
    return build_preset('nominal', seed=42, beta=beta)


@pytest.fixture(scope='session')
def nominal_run(nominal_config):
    return _full_run(nominal_config)


@pytest.fixture(scope='session')
def ekf_run(nominal_config):
    return _full_run(nominal_config.replaced(filter_mode=FilterMode.EKF))


@pytest.fixture(scope='session')
def perturb_plus_run(beta):
    return _full_run(build_preset('perturb_plus50', seed=42, beta=beta))


@pytest.fixture(scope='session')
def perturb_minus_run(beta):
    return _full_run(build_preset('perturb_minus50', seed=42, beta=beta))


@pytest.fixture(scope='session')
def noise_free_run(beta):
    return _full_run(build_preset('noise_free', seed=42, beta=beta))


@pytest.fixture(scope='session')
def regulation_run(beta):
    """Без шума, точная модель и точное начальное состояние, z_d ≡ 0"""
    cfg = build_preset('noise_free', seed=42, beta=beta)
    return _full_run(cfg.replaced(traj=DesiredTrajectory(law='constant_zero')))
