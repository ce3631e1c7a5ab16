# src/filtering/filter_selection.py

from typing import TYPE_CHECKING
from src.filtering.emckf import CorrentropyKalmanFilter, FilterMode
from src.utils.logger import get_logger

if TYPE_CHECKING:
    from src.simulation.types import ScenarioConfig

logger = get_logger(__name__)


def create_filter(cfg: 'ScenarioConfig') -> CorrentropyKalmanFilter:
    """
    Создает фильтр прогона по режиму из сценария

    Returns:
        CorrentropyKalmanFilter в режиме EMCKF или EKF

    Raises:
        ValueError: Если режим фильтра не поддерживается
    """
    mode = FilterMode(cfg.filter_mode)

    if mode == FilterMode.EMCKF:
        logger.debug(f"Создан EMCKF фильтр (sigma={cfg.sigma:g}, kernel_literal={cfg.kernel_literal})")
    elif mode == FilterMode.EKF:
        logger.debug("Создан EKF фильтр (ν ≡ 1)")
    else:
        raise ValueError(f"Неподдерживаемый режим фильтра: {mode}")

    return CorrentropyKalmanFilter(
        theta_hat=cfg.filter_params,
        q_diag=cfg.noise.q_diag,
        r_diag=cfg.noise.r_diag,
        sigma=cfg.sigma,
        mode=mode,
        kernel_literal=cfg.kernel_literal
    )
