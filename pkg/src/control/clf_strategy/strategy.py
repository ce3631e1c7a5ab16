# src/control/clf_strategy/strategy.py

import numpy as np
from src.control.types import ClfConfig, ClfTerms, ControlDecision, ControlLaw, DesiredTrajectory
from src.model.params import ModelParams
from src.qp.active_set import solve
from src.qp.problem import QpProblem, QpStatus
from src.utils.errors import DegenerateDirection, SimulationError
from src.utils.logger import get_logger

from src.control.clf_strategy.step1_desired_trajectory import DesiredTrajectoryPoint
from src.control.clf_strategy.step2_estimate_y_hat import ComputeYHat
from src.control.clf_strategy.step3_clf_terms import ComputeClfTerms
from src.control.clf_strategy.step4_pwmc import PointwiseMinNorm
from src.control.clf_strategy.step5_assemble_qp import AssembleQp
from src.control.clf_strategy.step6_uncertainty_residual import UncertaintyResidual

logger = get_logger(__name__)


def y_hat(z_hat: np.ndarray, theta_hat: ModelParams) -> np.ndarray:
    return ComputeYHat.execute(z_hat, theta_hat)


def clf_terms(
    z_hat: np.ndarray,
    theta_hat: ModelParams,
    traj: DesiredTrajectory,
    t: float,
    cfg: ClfConfig
) -> ClfTerms:
    z_d, z_d_dot = DesiredTrajectoryPoint.execute(traj, t)
    return ComputeClfTerms.execute(z_hat, ComputeYHat.execute(z_hat, theta_hat), z_d, z_d_dot, cfg)


def pwmc(terms: ClfTerms, z_floor: float = 1e-6) -> np.ndarray:
    return PointwiseMinNorm.execute(terms, z_floor)


def assemble_qp(terms: ClfTerms, cfg: ClfConfig) -> QpProblem:
    return AssembleQp.execute(terms, cfg)


class ClfController:
    """QP-RCLF регулятор: по оценке состояния выдает (h, u1, u2) на шаг"""

    def __init__(
        self,
        theta_hat: ModelParams,
        cfg: ClfConfig,
        traj: DesiredTrajectory,
        z_hat0: np.ndarray
    ):
        self.theta_hat = theta_hat
        self.cfg = cfg
        self.traj = traj.resolved(np.asarray(z_hat0, dtype=float))

        self.u_min = cfg.u_min_array
        self.u_max = cfg.u_max_array

        self.pwmc_fallbacks = 0
        self.qp_regularizations = 0

        logger.debug(
            f"Регулятор: закон={cfg.law.value}, λ={cfg.lam}, K_r={cfg.k_r}, c={cfg.c}, "
            f"траектория={self.traj.law} (γ={self.traj.gamma}, z0={self.traj.z0})"
        )

    def decide(self, z_hat: np.ndarray, t: float) -> ControlDecision:
        """
        Вычисляет управление для текущей оценки

        Args:
            z_hat: Оценка состояния в начале шага
            t: Время, сутки

        Returns:
            ControlDecision с u внутри заданных границ
        """
        z_d, z_d_dot = DesiredTrajectoryPoint.execute(self.traj, t)
        terms = ComputeClfTerms.execute(
            z_hat,
            ComputeYHat.execute(z_hat, self.theta_hat),
            z_d,
            z_d_dot,
            self.cfg
        )
        problem = AssembleQp.execute(terms, self.cfg)

        if self.cfg.law == ControlLaw.PWMC:
            try:
                return self._pwmc_decision(terms, problem)
            except DegenerateDirection as e:
                self.pwmc_fallbacks += 1
                logger.debug(f"t={t:.2f}: {e}, управление из QP")

        return self._qp_decision(terms, problem)

    def _qp_decision(self, terms: ClfTerms, problem: QpProblem) -> ControlDecision:
        try:
            solution = solve(problem)
        except SimulationError as e:
            logger.error(f"Ошибка решения QP: {e}")
            raise

        if solution.regularized:
            self.qp_regularizations += 1

        u = np.clip(solution.x[1:], self.u_min, self.u_max)

        return ControlDecision(
            h=float(solution.x[0]),
            u=u,
            terms=terms,
            objective=solution.objective,
            status=solution.status,
            mu=UncertaintyResidual.virtual_input(terms, u),
            active_set=solution.active_set,
            law=ControlLaw.QP
        )

    def _pwmc_decision(self, terms: ClfTerms, problem: QpProblem) -> ControlDecision:
        u = np.clip(PointwiseMinNorm.execute(terms, self.cfg.z_floor), self.u_min, self.u_max)
        h = max(0.0, terms.phi0_rob + float(terms.phi1 @ u))
        x = np.array([h, u[0], u[1]])

        return ControlDecision(
            h=h,
            u=u,
            terms=terms,
            objective=problem.objective(x),
            status=QpStatus.OPTIMAL,
            mu=UncertaintyResidual.virtual_input(terms, u),
            law=ControlLaw.PWMC
        )
