# src/qp/kkt_oracle.py

from itertools import combinations
import numpy as np
from src.qp.problem import QpProblem, QpSolution, QpStatus, equilibrate
from src.utils.errors import Infeasible

FEASIBILITY_TOL = 1e-9
DUAL_TOL = 1e-9


def kkt_enumerate_oracle(problem: QpProblem) -> QpSolution:
    """
    Эталонное решение перебором всех активных множеств

    Для каждого подмножества линейно независимых строк решается полная KKT система,
    остаются точки, допустимые по прямым и двойственным условиям; выбирается
    минимальная по стоимости. Только для малых задач (n ≤ 4, строк ≤ 10).
    """
    if problem.n > 4 or problem.m > 10:
        raise ValueError(f"Перебор рассчитан на n ≤ 4 и ≤ 10 строк, получено n={problem.n}, m={problem.m}")

    sp = equilibrate(problem)
    n, m = problem.n, problem.m

    best = None
    for size in range(0, min(n, m) + 1):
        for subset in combinations(range(m), size):
            W = list(subset)
            A_W = sp.A[W]

            if size and np.linalg.matrix_rank(A_W) < size:
                continue

            kkt = np.zeros((n + size, n + size))
            kkt[:n, :n] = sp.H
            kkt[:n, n:] = A_W.T
            kkt[n:, :n] = A_W
            rhs = np.concatenate([-sp.B, sp.b[W]])

            try:
                solution = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                continue

            x, lam = solution[:n], solution[n:]

            if m and np.any(sp.A @ x > sp.b + FEASIBILITY_TOL * (1.0 + np.abs(sp.b))):
                continue
            if size and np.min(lam) < -DUAL_TOL * (1.0 + np.linalg.norm(sp.B)):
                continue

            cost = 0.5 * x @ sp.H @ x + sp.B @ x
            if best is None or cost < best[0]:
                best = (cost, x, lam, tuple(W))

    if best is None:
        raise Infeasible("Перебор не нашел допустимой KKT точки")

    _, x_tilde, lam, W = best
    lam_full = np.zeros(m)
    if W:
        lam_full[list(W)] = np.maximum(lam, 0.0)

    x_out, multipliers = sp.unscale(x_tilde, lam_full)

    return QpSolution(
        x=x_out,
        objective=problem.objective(x_out),
        active_set=W,
        status=QpStatus.OPTIMAL,
        multipliers=multipliers
    )
