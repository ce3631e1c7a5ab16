# src/control/clf_strategy/step5_assemble_qp.py

import numpy as np
from src.control.types import ClfConfig, ClfTerms
from src.qp.problem import QpProblem


class AssembleQp:
    """QP по x = (h, u1, u2): стоимость μᵀμ + c·h², RCLF строка и границы u"""

    @staticmethod
    def execute(terms: ClfTerms, cfg: ClfConfig) -> QpProblem:
        """
        Собирает H, B и строки ограничений

        H = 2·diag(c, ẑ1², ẑ3²) с полом z_floor² на диагонали,
        B = 2·(0, ẑ1(ż_d1 - Ŷ1), ẑ3(ż_d2 - Ŷ2)). Постоянная часть
        ‖ż_d - Ŷ‖² добавляется, чтобы стоимость в точке (h, u) равнялась μᵀμ + c·h².

        Строки: [-1, φ1ᵀ]·x ≤ -φ0_rob, u_i ≤ u_max_i, -u_i ≤ -u_min_i.
        """
        z1, z3 = terms.z_e_hat
        floor_sq = cfg.z_floor * cfg.z_floor
        drift = terms.z_d_dot - terms.y_hat

        H = 2.0 * np.diag([cfg.c, max(z1 * z1, floor_sq), max(z3 * z3, floor_sq)])
        B = 2.0 * np.array([0.0, z1 * drift[0], z3 * drift[1]])

        rows = [
            (np.array([-1.0, terms.phi1[0], terms.phi1[1]]), -terms.phi0_rob),
            (np.array([0.0, 1.0, 0.0]), cfg.u_max[0]),
            (np.array([0.0, 0.0, 1.0]), cfg.u_max[1]),
            (np.array([0.0, -1.0, 0.0]), -cfg.u_min[0]),
            (np.array([0.0, 0.0, -1.0]), -cfg.u_min[1]),
        ]

        return QpProblem(H, B, rows, constant=float(drift @ drift))
