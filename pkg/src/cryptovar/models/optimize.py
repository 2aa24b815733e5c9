"""Derivative-free Nelder-Mead simplex minimizer.

Model fitting runs in-process on small parameter vectors (2-4 dims), so a
compact simplex implementation is owned here rather than delegated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass
class OptimResult:
    x: np.ndarray
    fval: float
    iterations: int
    converged: bool


def nelder_mead(
    fn: Callable[[np.ndarray], float],
    x0: Sequence[float],
    max_iter: int = 2000,
    ftol: float = 1e-8,
    initial_step: float = 0.25,
) -> OptimResult:
    """Minimize ``fn`` starting from ``x0``.

    Convergence is declared when the simplex function-value spread falls
    below ``ftol``. ``fn`` may return +inf to mark infeasible points.
    """
    x0 = np.asarray(x0, dtype=float)
    n = len(x0)
    alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5

    simplex = [x0]
    for i in range(n):
        vertex = x0.copy()
        vertex[i] += initial_step if vertex[i] == 0 else initial_step * abs(vertex[i]) + 0.05
        simplex.append(vertex)
    simplex = np.array(simplex)
    fvals = np.array([fn(v) for v in simplex])

    iterations = 0
    converged = False
    while iterations < max_iter:
        order = np.argsort(fvals)
        simplex, fvals = simplex[order], fvals[order]
        spread = fvals[-1] - fvals[0]
        if np.isfinite(spread) and spread < ftol:
            converged = True
            break
        iterations += 1

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]

        reflected = centroid + alpha * (centroid - worst)
        f_reflected = fn(reflected)
        if fvals[0] <= f_reflected < fvals[-2]:
            simplex[-1], fvals[-1] = reflected, f_reflected
            continue
        if f_reflected < fvals[0]:
            expanded = centroid + gamma * (reflected - centroid)
            f_expanded = fn(expanded)
            if f_expanded < f_reflected:
                simplex[-1], fvals[-1] = expanded, f_expanded
            else:
                simplex[-1], fvals[-1] = reflected, f_reflected
            continue
        contracted = centroid + rho * (worst - centroid)
        f_contracted = fn(contracted)
        if f_contracted < fvals[-1]:
            simplex[-1], fvals[-1] = contracted, f_contracted
            continue
        # shrink toward the best vertex
        for i in range(1, n + 1):
            simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0])
            fvals[i] = fn(simplex[i])

    best = int(np.argmin(fvals))
    return OptimResult(
        x=simplex[best].copy(),
        fval=float(fvals[best]),
        iterations=iterations,
        converged=converged,
    )
