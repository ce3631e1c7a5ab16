# src/filtering/emckf.py

from enum import Enum
from typing import NamedTuple, Sequence
import numpy as np
from src.model.integrator import rk4_advance
from src.model.params import ModelParams
from src.model.seiar import MEASUREMENT_JACOBIAN, STATE_DIM, dynamics, measurement, state_jacobian
from src.utils.errors import BadCovariance, NonFinite, SingularR
from src.utils.logger import get_logger

logger = get_logger(__name__)

NU_FLOOR = np.finfo(float).tiny
SYMMETRY_TOL = 1e-9
PSD_TOL = 1e-9


class FilterMode(str, Enum):
    EMCKF = 'emckf'
    EKF = 'ekf'


class FilterState(NamedTuple):
    """Оценка состояния, ковариация ошибки и последний вес корэнтропии"""

    z_hat: np.ndarray
    P: np.ndarray
    nu: float
    sigma: float
    correction: float = 0.0


def kernel(x: float, sigma: float) -> float:
    """Гауссово ядро exp(-x²/(2σ²))"""
    if sigma <= 0.0:
        raise ValueError(f"Ширина ядра должна быть положительной, получено {sigma}")
    return float(np.exp(-(x * x) / (2.0 * sigma * sigma)))


def _inverse(R: np.ndarray) -> np.ndarray:
    R = np.atleast_2d(np.asarray(R, dtype=float))
    try:
        if np.linalg.cond(R) > 1.0 / np.finfo(float).eps:
            raise SingularR(f"Ковариация шума измерений необратима: {R.tolist()}")
        return np.linalg.inv(R)
    except np.linalg.LinAlgError as e:
        raise SingularR(f"Ковариация шума измерений необратима: {e}")


def correntropy_weight(
    y: np.ndarray,
    z_hat: np.ndarray,
    R: np.ndarray,
    sigma: float,
    literal: bool = False
) -> float:
    """
    Вес ν по невязке измерения

    Квадратичная форма rᵀR⁻¹r играет роль квадрата нормы; при literal=True
    она подставляется в ядро как норма и возводится в квадрат.

    Returns:
        ν ∈ (0, 1], снизу ограничен наименьшим положительным float
    """
    residual = np.asarray(y, dtype=float) - MEASUREMENT_JACOBIAN @ z_hat
    quadratic = float(residual @ _inverse(R) @ residual)

    if literal:
        nu = kernel(quadratic, sigma)
    else:
        nu = float(np.exp(-quadratic / (2.0 * sigma * sigma)))

    return max(nu, NU_FLOOR)


def gain(P: np.ndarray, C: np.ndarray, R: np.ndarray, nu: float) -> np.ndarray:
    """K = ν·P·Cᵀ·R⁻¹"""
    return nu * (P @ C.T @ _inverse(R))


def check_covariance(P: np.ndarray) -> None:
    """
    Проверяет симметричность и положительную полуопределенность P

    Raises:
        BadCovariance: При нарушении допусков
    """
    P = np.asarray(P, dtype=float)
    if P.shape != (STATE_DIM, STATE_DIM) or not np.all(np.isfinite(P)):
        raise BadCovariance(f"Ковариация должна быть конечной матрицей {STATE_DIM}×{STATE_DIM}")

    scale = max(float(np.max(np.abs(P))), np.finfo(float).tiny)
    if np.max(np.abs(P - P.T)) > SYMMETRY_TOL * scale:
        raise BadCovariance("Ковариация несимметрична")

    trace = float(np.trace(P))
    if np.min(np.linalg.eigvalsh(0.5 * (P + P.T))) < -PSD_TOL * max(abs(trace), np.finfo(float).tiny):
        raise BadCovariance("Ковариация не положительно полуопределена")


def initialize(z_hat0: Sequence[float], P0: np.ndarray, sigma: float) -> FilterState:
    """Начальное состояние фильтра с ν = 1"""
    P0 = np.array(P0, dtype=float)
    check_covariance(P0)
    return FilterState(z_hat=np.array(z_hat0, dtype=float), P=0.5 * (P0 + P0.T), nu=1.0, sigma=sigma)


def filter_step(
    fs: FilterState,
    y: np.ndarray,
    u: np.ndarray,
    theta_hat: ModelParams,
    dt: float,
    Q: np.ndarray,
    R: np.ndarray,
    mode: FilterMode = FilterMode.EMCKF,
    kernel_literal: bool = False
) -> FilterState:
    """
    Один шаг RK4 совместной системы оценки и уравнения Риккати

    ν вычисляется по невязке в начале шага и удерживается; y и u тоже постоянны.
    Член PCᵀR⁻¹CP в уравнении Риккати от ν не зависит.

    Args:
        fs: Текущее состояние фильтра
        y: Измерение [E, I]
        u: Управление, удерживаемое на шаге
        theta_hat: Параметры модели фильтра
        dt: Шаг, сутки
        Q: Ковариация шума процесса (5×5)
        R: Ковариация шума измерений (2×2)
        mode: EMCKF или EKF (ν ≡ 1)
        kernel_literal: Буквальная форма ядра

    Returns:
        Новое FilterState

    Raises:
        NonFinite: Если оценка или ковариация стали неконечными
        SingularR: Если R необратима
    """
    if dt <= 0.0:
        raise ValueError(f"Шаг фильтра должен быть положительным, получено {dt}")

    C = MEASUREMENT_JACOBIAN
    R_inv = _inverse(R)
    y = np.asarray(y, dtype=float)

    if mode == FilterMode.EKF:
        nu = 1.0
    else:
        nu = correntropy_weight(y, fs.z_hat, R, fs.sigma, kernel_literal)

    Ct_Rinv = C.T @ R_inv
    information = Ct_Rinv @ C

    def rhs(x: np.ndarray) -> np.ndarray:
        z_hat = x[:STATE_DIM]
        P = x[STATE_DIM:].reshape(STATE_DIM, STATE_DIM)
        A = state_jacobian(z_hat, u, theta_hat)
        K = nu * (P @ Ct_Rinv)
        dz = dynamics(z_hat, u, theta_hat) + K @ (y - measurement(z_hat))
        dP = A @ P + P @ A.T + Q - P @ information @ P
        return np.concatenate([dz, dP.ravel()])

    start_gain = nu * (fs.P @ Ct_Rinv)
    correction = float(np.linalg.norm(start_gain @ (y - measurement(fs.z_hat)))) * dt

    x_next = rk4_advance(rhs, np.concatenate([fs.z_hat, fs.P.ravel()]), dt)

    if not np.all(np.isfinite(x_next)):
        raise NonFinite("Оценка фильтра или ковариация стали неконечными")

    P_next = x_next[STATE_DIM:].reshape(STATE_DIM, STATE_DIM)

    return FilterState(
        z_hat=x_next[:STATE_DIM],
        P=0.5 * (P_next + P_next.T),
        nu=nu,
        sigma=fs.sigma,
        correction=correction
    )


class CorrentropyKalmanFilter:
    """Фильтр одного прогона: параметры модели фильтра, Q, R, режим и ядро"""

    def __init__(
        self,
        theta_hat: ModelParams,
        q_diag: Sequence[float],
        r_diag: Sequence[float],
        sigma: float,
        mode: FilterMode = FilterMode.EMCKF,
        kernel_literal: bool = False
    ):
        if sigma <= 0.0:
            raise ValueError(f"Ширина ядра должна быть положительной, получено {sigma}")

        self.theta_hat = theta_hat
        self.Q = np.diag(np.asarray(q_diag, dtype=float))
        self.R = np.diag(np.asarray(r_diag, dtype=float))
        _inverse(self.R)
        self.sigma = sigma
        self.mode = FilterMode(mode)
        self.kernel_literal = kernel_literal

    def initialize(self, z_hat0: Sequence[float], P0: np.ndarray) -> FilterState:
        return initialize(z_hat0, P0, self.sigma)

    def step(self, fs: FilterState, y: np.ndarray, u: np.ndarray, dt: float) -> FilterState:
        return filter_step(
            fs, y, u, self.theta_hat, dt, self.Q, self.R,
            mode=self.mode,
            kernel_literal=self.kernel_literal
        )
