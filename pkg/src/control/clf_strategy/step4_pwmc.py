# src/control/clf_strategy/step4_pwmc.py

import numpy as np
from src.control.types import ClfTerms
from src.utils.errors import DegenerateDirection


class PointwiseMinNorm:
    """Закон минимальной нормы для робастного CLF ограничения (без ограничений на u)"""

    @staticmethod
    def execute(terms: ClfTerms, z_floor: float = 1e-6) -> np.ndarray:
        """
        u = -φ0_rob·φ1/‖φ1‖² при φ0_rob > 0, иначе u = 0

        Raises:
            DegenerateDirection: Если φ0_rob > 0, а φ1 вырожден (ẑ1 или ẑ3 около нуля)
        """
        if terms.phi0_rob <= 0.0:
            return np.zeros(2)

        norm_sq = float(terms.phi1 @ terms.phi1)
        norm = np.sqrt(norm_sq)
        if norm_sq == 0.0 or norm < z_floor * float(np.linalg.norm(terms.e)):
            raise DegenerateDirection(
                f"‖φ1‖={norm:.3e} слишком мал при φ0_rob={terms.phi0_rob:.3e}"
            )

        return -terms.phi0_rob * terms.phi1 / norm_sq
