# src/control/clf_strategy/step6_uncertainty_residual.py

import numpy as np
from src.control.types import ClfTerms


class UncertaintyResidual:
    """Эмпирическая невязка Δ = ė - μ, только для диагностики"""

    @staticmethod
    def virtual_input(terms: ClfTerms, u: np.ndarray) -> np.ndarray:
        """μ = Ŷ - ż_d - Ẑ_e·u"""
        return terms.y_hat - terms.z_d_dot - terms.z_e_hat * u

    @staticmethod
    def execute(e_prev: np.ndarray, e_now: np.ndarray, mu: np.ndarray, dt: float) -> np.ndarray:
        if dt <= 0.0:
            raise ValueError(f"dt должен быть положительным, получено {dt}")
        return (np.asarray(e_now) - np.asarray(e_prev)) / dt - np.asarray(mu)
