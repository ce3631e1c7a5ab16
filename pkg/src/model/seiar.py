# src/model/seiar.py

import numpy as np
from src.model.params import ModelParams

STATE_DIM = 5
MEASUREMENT_DIM = 2

MEASUREMENT_JACOBIAN = np.array([
    [0.0, 1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0, 0.0],
])
MEASUREMENT_JACOBIAN.setflags(write=False)


def dynamics(z: np.ndarray, u: np.ndarray, params: ModelParams) -> np.ndarray:
    """
    Правая часть SEIAR модели с управлением

    Args:
        z: Состояние [S, E, I, A, R]
        u: Управление [u1, u2]
        params: Параметры модели

    Returns:
        Производная состояния (человек/сут); сумма компонент равна -alpha(1-zeta)·I
    """
    s, e, i, a, _ = z
    u1, u2 = u

    force = params.beta * (params.epsilon * e + (1.0 - params.q) * i + params.delta * a)
    infection = s * force
    vaccinated = s * u1
    treated = i * u2

    return np.array([
        -infection - vaccinated,
        infection - params.kappa * e,
        params.p * params.kappa * e - params.alpha * i - treated,
        (1.0 - params.p) * params.kappa * e - params.eta * a,
        params.alpha * params.zeta * i + vaccinated + treated + params.eta * a,
    ])


def state_jacobian(z: np.ndarray, u: np.ndarray, params: ModelParams) -> np.ndarray:
    """Матрица A = df/dz в точке z (аналитически)"""
    s, e, i, a, _ = z
    u1, u2 = u
    beta = params.beta

    force = beta * (params.epsilon * e + (1.0 - params.q) * i + params.delta * a)
    d_e = s * beta * params.epsilon
    d_i = s * beta * (1.0 - params.q)
    d_a = s * beta * params.delta
    kappa = params.kappa

    return np.array([
        [-force - u1, -d_e, -d_i, -d_a, 0.0],
        [force, d_e - kappa, d_i, d_a, 0.0],
        [0.0, params.p * kappa, -params.alpha - u2, 0.0, 0.0],
        [0.0, (1.0 - params.p) * kappa, 0.0, -params.eta, 0.0],
        [u1, 0.0, params.alpha * params.zeta + u2, params.eta, 0.0],
    ])


def measurement(z: np.ndarray) -> np.ndarray:
    """Измеряемые численности [E, I]"""
    return np.array([z[1], z[2]])


def population_rate(z: np.ndarray, params: ModelParams) -> float:
    """Скорость изменения общей численности dN/dt = -alpha(1-zeta)·I"""
    return -params.alpha * (1.0 - params.zeta) * z[2]
