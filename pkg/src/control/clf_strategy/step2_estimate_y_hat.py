# src/control/clf_strategy/step2_estimate_y_hat.py

import numpy as np
from src.model.params import ModelParams


class ComputeYHat:
    """Неуправляемая часть динамики [S, I] по оценке состояния"""

    @staticmethod
    def execute(z_hat: np.ndarray, theta_hat: ModelParams) -> np.ndarray:
        """
        Ŷ1 = -β̂ẑ1(ε̂ẑ2 + (1-q̂)ẑ3 + δ̂ẑ4), Ŷ2 = p̂κ̂ẑ2 - α̂ẑ3

        Args:
            z_hat: Оценка состояния
            theta_hat: Параметры модели регулятора

        Returns:
            Вектор Ŷ из двух компонент
        """
        s, e, i, a, _ = z_hat
        force = theta_hat.epsilon * e + (1.0 - theta_hat.q) * i + theta_hat.delta * a

        return np.array([
            -theta_hat.beta * s * force,
            theta_hat.p * theta_hat.kappa * e - theta_hat.alpha * i,
        ])
