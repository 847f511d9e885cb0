"""Divided-difference operators for scalars and maps on R^m.

All variants return an m x m matrix H satisfying (up to rounding or
quadrature error) the interpolatory identity H(x - y) = F(x) - F(y).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problems import Problem, as_point

COINCIDENT_TOL = 1e-14
DEFAULT_QUAD_NODES = 8

VARIANTS = ("scalar", "componentwise", "integral")


@dataclass(frozen=True)
class DividedDifference:
    """Choice of operator: scalar quotient, componentwise telescope, or
    Gauss-Legendre quadrature of the Jacobian along the segment."""

    variant: str = "componentwise"
    quad_nodes: int = DEFAULT_QUAD_NODES

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "integral" and self.quad_nodes < 2:
            raise ValueError("integral variant needs at least 2 nodes")

    def __call__(self, problem: Problem, x, y) -> np.ndarray:
        if self.variant == "scalar":
            return np.array([[scalar_dd(problem, float(np.atleast_1d(x)[0]),
                                        float(np.atleast_1d(y)[0]))]])
        if self.variant == "integral":
            return integral_dd(problem, x, y, self.quad_nodes)
        return componentwise_dd(problem, x, y)


def _coincident(xj: float, yj: float) -> bool:
    return abs(yj - xj) < COINCIDENT_TOL * max(1.0, abs(xj))


def scalar_dd(problem: Problem, x: float, y: float) -> float:
    """(f(x) - f(y)) / (x - y); falls back to f'(x) on coincident nodes."""
    if problem.dimension != 1:
        raise ValueError("scalar_dd requires a scalar problem")
    if _coincident(x, y):
        return float(problem.jac([x])[0, 0])
    fx = problem.evaluate([x])[0]
    fy = problem.evaluate([y])[0]
    return float((fx - fy) / (x - y))


def componentwise_dd(problem: Problem, x, y) -> np.ndarray:
    """Telescoping componentwise operator.

    Column j is the difference quotient of F in the j-th coordinate after the
    first j-1 coordinates have already been moved from x to y, so the columns
    telescope and the interpolatory identity holds exactly up to rounding.
    Columns with y_j = x_j (to 1e-14 relative) take the Jacobian column.
    """
    m = problem.dimension
    x = as_point(x, m)
    y = as_point(y, m)
    H = np.empty((m, m))
    jac = None
    for j in range(m):
        if _coincident(x[j], y[j]):
            if jac is None:
                jac = problem.jac(x)
            H[:, j] = jac[:, j]
            continue
        za = np.concatenate([y[:j + 1], x[j + 1:]])
        zb = np.concatenate([y[:j], x[j:]])
        H[:, j] = (problem.evaluate(za) - problem.evaluate(zb)) / (y[j] - x[j])
    return H


def integral_dd(problem: Problem, x, y, q: int = DEFAULT_QUAD_NODES) -> np.ndarray:
    """Gauss-Legendre quadrature of F'(x + theta (y - x)) over theta in [0,1]."""
    m = problem.dimension
    x = as_point(x, m)
    y = as_point(y, m)
    nodes, weights = np.polynomial.legendre.leggauss(q)
    theta = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    H = np.zeros((m, m))
    for t, wi in zip(theta, w):
        H += wi * problem.jac(x + t * (y - x))
    return H


def verify_interpolatory(H: np.ndarray, problem: Problem, x, y) -> float:
    """Relative residual of H(x-y) = F(x) - F(y)."""
    m = problem.dimension
    x = as_point(x, m)
    y = as_point(y, m)
    H = np.atleast_2d(np.asarray(H, dtype=float))
    dF = problem.evaluate(x) - problem.evaluate(y)
    r = problem.vector_norm(H @ (x - y) - dF)
    return float(r / max(1.0, problem.vector_norm(dF)))
