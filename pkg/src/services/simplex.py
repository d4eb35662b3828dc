"""Box-constrained Nelder-Mead minimizer."""

from collections.abc import Callable

import numpy as np
from numpy.typing import NDArray

from ..models.optimization import OptimizationStatus, SimplexResult

Cost = Callable[[NDArray[np.float64]], float]


def _diameter(vertices: NDArray[np.float64]) -> float:
    return float(np.max(np.linalg.norm(vertices[1:] - vertices[0], axis=1)))


def nelder_mead(
    func: Cost,
    x_start: NDArray[np.float64],
    lower: NDArray[np.float64],
    upper: NDArray[np.float64],
    step: NDArray[np.float64] | float,
    tolerance: float = 1e-9,
    stall_iterations: int = 150,
    max_evaluations: int = 20_000,
    improvement: float = 1e-15,
    alpha: float = 1.0,
    gamma: float = 2.0,
    beta: float = 0.5,
    delta: float = 0.5,
) -> SimplexResult:
    """Minimize ``func`` inside [lower, upper].

    Vertices move freely. ``func`` is only called at a vertex's projection
    onto the box, and the squared distance to the box is added to its cost,
    so vertices outside never tie with the face they project onto and the
    simplex keeps its volume at a boundary optimum. The reported point is the
    projected best vertex.

    The run is converged once the simplex diameter drops below ``tolerance``
    or the best cost has not improved by more than ``improvement`` for
    ``stall_iterations`` iterations; it is stalled when the evaluation budget
    runs out first.
    """
    lower = np.asarray(lower, dtype=np.float64)
    upper = np.asarray(upper, dtype=np.float64)
    dim = len(x_start)
    evaluations = 0

    def evaluate(x: NDArray[np.float64]) -> tuple[NDArray[np.float64], float]:
        nonlocal evaluations
        inside = np.clip(x, lower, upper)
        evaluations += 1
        value = float(func(inside))
        if not np.isfinite(value):
            return x, np.inf
        return x, value + float(np.sum((x - inside) ** 2))

    # Initial simplex, stepping inwards where the box edge is close
    steps = np.broadcast_to(np.asarray(step, dtype=np.float64), (dim,))
    start, start_cost = evaluate(
        np.clip(np.asarray(x_start, dtype=np.float64), lower, upper)
    )
    vertices = [start]
    costs = [start_cost]
    for i in range(dim):
        x = start.copy()
        x[i] = x[i] + steps[i] if x[i] + steps[i] <= upper[i] else x[i] - steps[i]
        x, value = evaluate(x)
        vertices.append(x)
        costs.append(value)

    simplex = np.array(vertices)
    values = np.array(costs)
    prev_best = np.inf
    no_improve = 0
    iterations = 0

    while True:
        order = np.argsort(values, kind="stable")
        simplex = simplex[order]
        values = values[order]

        diameter = _diameter(simplex)
        if diameter < tolerance:
            status = OptimizationStatus.CONVERGED
            break

        if values[0] < prev_best - improvement:
            prev_best = values[0]
            no_improve = 0
        else:
            no_improve += 1
        if no_improve >= stall_iterations:
            status = OptimizationStatus.CONVERGED
            break

        if evaluations >= max_evaluations:
            status = OptimizationStatus.STALLED
            break
        iterations += 1

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]

        # Reflection
        xr, rcost = evaluate(centroid + alpha * (centroid - worst))
        if values[0] <= rcost < values[-2]:
            simplex[-1], values[-1] = xr, rcost
            continue

        # Expansion
        if rcost < values[0]:
            xe, ecost = evaluate(centroid + gamma * (centroid - worst))
            if ecost < rcost:
                simplex[-1], values[-1] = xe, ecost
            else:
                simplex[-1], values[-1] = xr, rcost
            continue

        # Contraction towards the better of worst and reflected
        if rcost < values[-1]:
            xc, ccost = evaluate(centroid + beta * (xr - centroid))
            if ccost <= rcost:
                simplex[-1], values[-1] = xc, ccost
                continue
        else:
            xc, ccost = evaluate(centroid + beta * (worst - centroid))
            if ccost < values[-1]:
                simplex[-1], values[-1] = xc, ccost
                continue

        # Shrink
        for i in range(1, dim + 1):
            simplex[i], values[i] = evaluate(simplex[0] + delta * (simplex[i] - simplex[0]))

    return SimplexResult(
        x=np.clip(simplex[0], lower, upper),
        cost=float(values[0]),
        iterations=iterations,
        evaluations=evaluations,
        diameter=diameter,
        status=status,
    )
