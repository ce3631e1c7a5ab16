# src/control/clf_strategy/step3_clf_terms.py

import numpy as np
from src.control.types import ClfConfig, ClfTerms


class ComputeClfTerms:
    """Функция Ляпунова ошибки слежения и коэффициенты RCLF ограничения"""

    @staticmethod
    def execute(
        z_hat: np.ndarray,
        y_hat: np.ndarray,
        z_d: np.ndarray,
        z_d_dot: np.ndarray,
        cfg: ClfConfig
    ) -> ClfTerms:
        """
        Строит V, LfV, LgV, φ0, φ0_rob и φ1 для ошибки e = [ẑ1, ẑ3] - z_d

        Ограничение имеет вид φ0_rob + φ1ᵀu ≤ h.

        Args:
            z_hat: Оценка состояния
            y_hat: Ŷ из ComputeYHat
            z_d: Желаемое значение
            z_d_dot: Производная желаемого значения
            cfg: Настройки регулятора

        Returns:
            ClfTerms
        """
        z_e_hat = np.array([z_hat[0], z_hat[2]])
        e = z_e_hat - z_d

        V = 0.5 * float(e @ e)
        LfV = float(e @ (y_hat - z_d_dot))
        LgV = -e * z_e_hat
        phi0 = LfV + cfg.lam * V

        return ClfTerms(
            V=V,
            LfV=LfV,
            LgV=LgV,
            phi0=phi0,
            phi0_rob=phi0 + cfg.k_r * float(np.linalg.norm(e)),
            phi1=LgV.copy(),
            e=e,
            y_hat=np.asarray(y_hat, dtype=float),
            z_e_hat=z_e_hat,
            z_d=np.asarray(z_d, dtype=float),
            z_d_dot=np.asarray(z_d_dot, dtype=float)
        )
