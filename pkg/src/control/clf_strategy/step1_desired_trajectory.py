# src/control/clf_strategy/step1_desired_trajectory.py

from typing import Tuple
import numpy as np
from src.control.types import DesiredTrajectory


class DesiredTrajectoryPoint:
    """Желаемое значение z_d(t) и его производная"""

    @staticmethod
    def execute(traj: DesiredTrajectory, t: float) -> Tuple[np.ndarray, np.ndarray]:
        return traj.value(t), traj.rate(t)
