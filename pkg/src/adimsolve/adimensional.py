"""Adimensional forms of polynomials and of nonlinear maps.

The form of F at a base point x0 is G(y) = F(x)/||F(x0)|| in the variable
y = T x with T = -F'(x0)/||F(x0)||.  By construction ||G(y0)|| = 1 and
G'(y0) = -I, and G is unchanged by linear rescalings of x and F.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .problems import (AlreadyAtRootError, Problem, RCOND_FLOOR,
                       SingularOperatorError, as_point, rcond)


@dataclass(frozen=True)
class AdimensionalForm:
    """The transform y = T x (T = -F'(x0)/sigma) and the wrapped map G.

    T is kept as an LU factorization; back-transforms solve T x = y rather
    than forming T^{-1}.
    """

    problem: Problem
    x0: np.ndarray
    sigma: float
    T: np.ndarray
    y0: np.ndarray
    g: Problem = field(repr=False)
    _lu: tuple = field(repr=False)

    def to_adimensional(self, x) -> np.ndarray:
        x = as_point(x, self.problem.dimension)
        return self.T @ x

    def to_original(self, y) -> np.ndarray:
        y = as_point(y, self.problem.dimension)
        return lu_solve(self._lu, y)


def adimensionalize(problem: Problem, x0,
                    normalization_tol: float = 1e-12,
                    derivative_tol: float = 1e-8) -> AdimensionalForm:
    """Build the adimensional form at x0, verifying the normalization.

    Raises AlreadyAtRootError when F(x0) = 0 and SingularOperatorError when
    F'(x0) is singular; fails loudly when the constructed form does not
    satisfy ||G(y0)|| = 1 and G'(y0) = -I (finite-difference check).
    """
    m = problem.dimension
    x0 = as_point(x0, m)
    fx0 = problem.evaluate(x0)
    sigma = problem.vector_norm(fx0)
    if sigma < 1e-300:
        raise AlreadyAtRootError("already at root: F(x0) = 0")
    J0 = problem.jac(x0)
    if rcond(J0) < RCOND_FLOOR:
        raise SingularOperatorError("derivative singular at x0")
    T = -J0 / sigma
    lu = lu_factor(T)

    def g_eval(y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        x = lu_solve(lu, y)
        return problem.evaluate(x) / sigma

    g_jac = None
    if problem.has_analytic_jacobian():
        def g_jac(y):
            y = np.atleast_1d(np.asarray(y, dtype=float))
            x = lu_solve(lu, y)
            # G'(y) = F'(x) T^{-1} / sigma, applied column-by-column
            Jf = problem.jac(x)
            return np.linalg.solve(T.T, Jf.T).T / sigma

    g = Problem(f=(lambda y: g_eval(np.atleast_1d(y))) if m > 1 else
                (lambda y: g_eval([y])[0]),
                jacobian=None if g_jac is None else
                ((lambda y: g_jac(np.atleast_1d(y))) if m > 1 else
                 (lambda y: g_jac([y])[0, 0])),
                dimension=m, norm=problem.norm,
                name=f"adim({problem.name})")

    y0 = T @ x0
    form = AdimensionalForm(problem=problem, x0=x0, sigma=sigma, T=T, y0=y0,
                            g=g, _lu=lu)
    report = check_normalization(form)
    if report["value_residual"] > normalization_tol:
        raise ValueError("adimensional form violates ||G(y0)|| = 1: "
                         f"residual {report['value_residual']:.3e}")
    if report["derivative_residual"] > derivative_tol:
        raise ValueError("adimensional form violates G'(y0) = -I: "
                         f"residual {report['derivative_residual']:.3e}")
    return form


def check_normalization(obj) -> dict:
    """Residuals of the two normalization conditions.

    For an AdimensionalForm: | ||G(y0)|| - 1 | and ||G'(y0) + I|| with the
    derivative taken by finite differences.  For an AdimensionalPolynomial:
    |q(0) - 1| and |q'(0) + 1|.
    """
    if isinstance(obj, AdimensionalPolynomial):
        return {"value_residual": abs(obj(0.0) - 1.0),
                "derivative_residual": abs(obj.derivative(0.0) + 1.0)}
    form: AdimensionalForm = obj
    g, y0 = form.g, form.y0
    value_res = abs(g.vector_norm(g.evaluate(y0)) - 1.0)
    Jg = g.fd_jacobian(y0)
    deriv_res = g.operator_norm(Jg + np.eye(g.dimension))
    return {"value_residual": float(value_res),
            "derivative_residual": float(deriv_res)}


# -- adimensional polynomials ----------------------------------------------

@dataclass(frozen=True)
class AdimensionalPolynomial:
    """q(s) = (b/6)s^3 + (a/2)s^2 - s + 1 (degree 2 when b is omitted)."""

    a: float
    b: float = 0.0
    degree: int = 2

    def __post_init__(self):
        if self.a < 0.0 or self.b < 0.0:
            raise ValueError("a and b must be nonnegative")
        if self.degree not in (2, 3):
            raise ValueError("degree must be 2 or 3")
        if self.degree == 2 and self.b != 0.0:
            raise ValueError("degree-2 polynomial cannot carry b")

    def __call__(self, s: float) -> float:
        return ((self.b / 6.0) * s ** 3 + (self.a / 2.0) * s ** 2 - s + 1.0)

    def derivative(self, s: float) -> float:
        return (self.b / 2.0) * s ** 2 + self.a * s - 1.0

    def second_derivative(self, s: float) -> float:
        return self.b * s + self.a

    def as_problem(self, norm: str = "euclidean") -> Problem:
        return Problem(f=self.__call__, jacobian=self.derivative,
                       d2f=self.second_derivative, dimension=1, norm=norm,
                       name=f"q(a={self.a},b={self.b})")


def adimensional_polynomial(k2: float, B: float, eta: float,
                            k3: Optional[float] = None) -> AdimensionalPolynomial:
    """Adimensional form of the majorizing polynomial: a = K2*B*eta and,
    for the cubic, b = K3*B*eta^2."""
    if B <= 0.0 or eta <= 0.0:
        raise ValueError("B and eta must be positive")
    if k2 < 0.0:
        raise ValueError("k2 must be nonnegative")
    a = k2 * B * eta
    if k3 is None:
        return AdimensionalPolynomial(a=a)
    if k3 < 0.0:
        raise ValueError("k3 must be nonnegative")
    return AdimensionalPolynomial(a=a, b=k3 * B * eta * eta, degree=3)
