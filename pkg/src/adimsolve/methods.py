"""Iteration engines: bisection, fixed-slope, damped first order, Newton,
secant, Steffensen (plain and damped), the adimensional h-family, and the
scale-invariant Steffensen driver run on the adimensional form.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .adimensional import AdimensionalForm, adimensionalize
from .divdiff import DividedDifference
from .problems import (DomainError, Problem, SingularOperatorError, as_point,
                       solve_linear)

DIVERGENCE_NORM = 1e12
DIVERGENCE_RESIDUAL_GROWTH = 1e6


# -- stopping criteria and traces -------------------------------------------

@dataclass(frozen=True)
class StoppingCriteria:
    step_tol: float = 1e-15
    residual_tol: float = 1e-15
    max_iter: int = 100

    def __post_init__(self):
        if self.step_tol < 0.0 or self.residual_tol < 0.0:
            raise ValueError("tolerances must be nonnegative")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass
class IterationTrace:
    """Full record of one solver run."""

    iterates: List[np.ndarray] = field(default_factory=list)
    residual_norms: List[float] = field(default_factory=list)
    step_norms: List[float] = field(default_factory=list)
    status: str = "max-iter"
    n_evals: int = 0
    n_jac_evals: int = 0
    used_fd_jacobian: bool = False
    warnings: List[str] = field(default_factory=list)

    @property
    def x_final(self) -> np.ndarray:
        return self.iterates[-1]

    @property
    def n_steps(self) -> int:
        return len(self.iterates) - 1

    def errors(self, root) -> np.ndarray:
        """Norms ||x_n - root|| (Euclidean)."""
        root = np.atleast_1d(np.asarray(root, dtype=float))
        return np.array([np.linalg.norm(x - root) for x in self.iterates])

    def to_rows(self):
        rows = []
        for n, x in enumerate(self.iterates):
            step = "" if n == 0 else repr(float(self.step_norms[n - 1]))
            rows.append([n] + [repr(float(v)) for v in x]
                        + [repr(float(self.residual_norms[n])), step])
        return rows

    def to_csv(self) -> str:
        m = len(self.iterates[0]) if self.iterates else 0
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n"] + [f"x{i}" for i in range(m)] + ["res_norm", "step_norm"])
        w.writerows(self.to_rows())
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "iterates": [list(x) for x in self.iterates],
            "residual_norms": self.residual_norms,
            "step_norms": self.step_norms,
            "status": self.status,
            "n_evals": self.n_evals,
            "n_jac_evals": self.n_jac_evals,
            "used_fd_jacobian": self.used_fd_jacobian,
            "warnings": self.warnings,
        }, indent=2)


# -- method descriptions -----------------------------------------------------

@dataclass(frozen=True)
class Bisection:
    lo: float
    hi: float


@dataclass(frozen=True)
class FixedSlope:
    c: float


@dataclass(frozen=True)
class DampedFirstOrder:
    lam: float


@dataclass(frozen=True)
class Newton:
    pass


@dataclass(frozen=True)
class Secant:
    x_prev: float


@dataclass(frozen=True)
class Steffensen:
    dd: DividedDifference = DividedDifference("componentwise")


@dataclass(frozen=True)
class DampedSteffensen:
    lam: float
    dd: DividedDifference = DividedDifference("componentwise")


@dataclass(frozen=True)
class HFamily:
    h: Callable = None  # adimensional correction factor h(L)


@dataclass(frozen=True)
class ASIS:
    dd: DividedDifference = DividedDifference("componentwise")


METHOD_NAMES = {
    Bisection: "bisection",
    FixedSlope: "fixed-slope",
    DampedFirstOrder: "damped-first-order",
    Newton: "newton",
    Secant: "secant",
    Steffensen: "steffensen",
    DampedSteffensen: "damped-steffensen",
    HFamily: "h-family",
    ASIS: "asis",
}


# -- single steps ------------------------------------------------------------

def newton_step(problem: Problem, x) -> np.ndarray:
    x = as_point(x, problem.dimension)
    return x - solve_linear(problem.jac(x), problem.evaluate(x))


def steffensen_step(problem: Problem, x,
                    dd: DividedDifference = DividedDifference("componentwise")
                    ) -> np.ndarray:
    """x - F[x + F(x), x]^{-1} F(x); nodes in that order.

    Square problems only: the node sum x + F(x) is what makes the classic
    method dimension- and scale-sensitive.
    """
    x = as_point(x, problem.dimension)
    fx = problem.evaluate(x)
    node = x + fx
    H = dd(problem, node, x)
    return x - solve_linear(H, fx)


def damped_steffensen_step(problem: Problem, x, lam: float,
                           x0=None,
                           dd: DividedDifference = DividedDifference("componentwise")
                           ) -> np.ndarray:
    """Steffensen step with node x + lam*F(x)/f'(x0) (scalar) or
    x + lam*F(x)/||F'(x0)|| (vectors); lam is adimensional."""
    x = as_point(x, problem.dimension)
    x0 = x if x0 is None else as_point(x0, problem.dimension)
    fx = problem.evaluate(x)
    if problem.dimension == 1:
        scale = problem.jac(x0)[0, 0]
    else:
        scale = problem.operator_norm(problem.jac(x0))
    if scale == 0.0:
        raise SingularOperatorError("F'(x0) vanishes; damped node undefined")
    node = x + lam * fx / scale
    H = dd(problem, node, x)
    return x - solve_linear(H, fx)


def secant_step(problem: Problem, x_prev, x,
                dd: DividedDifference = DividedDifference("componentwise")
                ) -> np.ndarray:
    x = as_point(x, problem.dimension)
    x_prev = as_point(x_prev, problem.dimension)
    H = dd(problem, x_prev, x)
    return x - solve_linear(H, problem.evaluate(x))


def logarithmic_convexity(problem: Problem, x) -> float:
    """L_f = f'' f / f'^2, the adimensional degree of logarithmic convexity."""
    if problem.dimension != 1:
        raise ValueError("logarithmic_convexity is scalar-only")
    x = as_point(x, 1)
    fp = problem.jac(x)[0, 0]
    if fp == 0.0:
        raise SingularOperatorError("f'(x) = 0")
    f = problem.evaluate(x)[0]
    fpp = problem.second_derivative(x)
    return float(fpp * f / (fp * fp))


def h_family_step(problem: Problem, x, h: Callable) -> np.ndarray:
    """x - h(L_f(x)) * f(x)/f'(x): Newton for h = 1, Halley for 1/(1-L/2)."""
    if problem.dimension != 1:
        raise ValueError("h_family_step is scalar-only")
    x = as_point(x, 1)
    fp = problem.jac(x)[0, 0]
    if fp == 0.0:
        raise SingularOperatorError("f'(x) = 0")
    L = logarithmic_convexity(problem, x)
    f = problem.evaluate(x)[0]
    return x - h(L) * f / fp


# -- solve driver ------------------------------------------------------------

def _counting_copy(problem: Problem, counts: dict) -> Problem:
    base_f = problem.f
    base_jac = problem.jacobian

    def f(x):
        counts["f"] += 1
        return base_f(x)

    jac = None
    if base_jac is not None:
        def jac(x):
            counts["jac"] += 1
            return base_jac(x)

    return dataclasses.replace(problem, f=f, jacobian=jac)


def solve(problem: Problem, method, x0, stop: StoppingCriteria) -> IterationTrace:
    """Run an iteration to the stopping criteria; never raises on failure,
    the trace status reports what happened."""
    counts = {"f": 0, "jac": 0}
    p = _counting_copy(problem, counts)
    trace = IterationTrace(used_fd_jacobian=not problem.has_analytic_jacobian())

    if isinstance(method, Bisection):
        _solve_bisection(p, method, stop, trace)
        trace.n_evals = counts["f"]
        trace.n_jac_evals = counts["jac"]
        return trace

    x = as_point(x0, problem.dimension)
    state = {"x_prev": None}
    if isinstance(method, Secant):
        state["x_prev"] = as_point(method.x_prev, problem.dimension)
    if isinstance(method, (DampedFirstOrder,)):
        state["J0"] = p.jac(x)
    if isinstance(method, DampedSteffensen):
        state["x0"] = x.copy()

    def one_step(x):
        if isinstance(method, Newton):
            return newton_step(p, x)
        if isinstance(method, Steffensen):
            return steffensen_step(p, x, method.dd)
        if isinstance(method, DampedSteffensen):
            x_new = damped_steffensen_step(p, x, method.lam, state["x0"],
                                           method.dd)
            return x_new
        if isinstance(method, Secant):
            x_new = secant_step(p, state["x_prev"], x)
            state["x_prev"] = x
            return x_new
        if isinstance(method, FixedSlope):
            return x - method.c * p.evaluate(x)
        if isinstance(method, DampedFirstOrder):
            step = solve_linear(state["J0"], p.evaluate(x))
            if problem.dimension == 1:
                ratio = abs(method.lam * p.jac(x)[0, 0] / state["J0"][0, 0])
                if not 0.0 < ratio < 2.0:
                    msg = f"damping contract violated: |lam f'(x)/f'(x0)| = {ratio:.3g}"
                    if msg not in trace.warnings:
                        trace.warnings.append(msg)
            return x - method.lam * step
        if isinstance(method, HFamily):
            return h_family_step(p, x, method.h)
        raise TypeError(f"unknown method {method!r}")

    try:
        res = p.vector_norm(p.evaluate(x))
    except DomainError:
        trace.iterates.append(x)
        trace.residual_norms.append(float("nan"))
        trace.status = "domain-failure"
        trace.n_evals = counts["f"]
        return trace

    trace.iterates.append(x.copy())
    trace.residual_norms.append(res)
    min_res = res
    status = "max-iter"

    for _ in range(stop.max_iter):
        try:
            x_new = one_step(x)
            res_new = p.vector_norm(p.evaluate(x_new))
        except SingularOperatorError:
            status = "singular-operator"
            break
        except DomainError:
            status = "domain-failure"
            break
        step_norm = p.vector_norm(x_new - x)
        trace.iterates.append(x_new.copy())
        trace.residual_norms.append(res_new)
        trace.step_norms.append(step_norm)
        x = x_new
        min_res = min(min_res, res_new)
        if res_new <= stop.residual_tol:
            status = "converged-by-residual"
            break
        if step_norm <= stop.step_tol:
            status = "converged-by-step"
            break
        if (np.linalg.norm(x) > DIVERGENCE_NORM
                or res_new > DIVERGENCE_RESIDUAL_GROWTH * max(min_res, 1e-300)):
            status = "diverged"
            break

    trace.status = status
    trace.n_evals = counts["f"]
    trace.n_jac_evals = counts["jac"]
    return trace


def _solve_bisection(p: Problem, method: Bisection, stop: StoppingCriteria,
                     trace: IterationTrace) -> None:
    """Scalar interval bisection recording midpoints; ties toward lo."""
    if p.dimension != 1:
        trace.status = "domain-failure"
        trace.warnings.append("bisection is scalar-only")
        return
    lo, hi = float(method.lo), float(method.hi)
    flo = p.evaluate([lo])[0]
    fhi = p.evaluate([hi])[0]
    if flo == 0.0:
        hi = lo
    elif fhi == 0.0:
        lo = hi
    elif flo * fhi > 0.0:
        trace.status = "domain-failure"
        trace.warnings.append("bracket does not change sign")
        return
    mid = 0.5 * (lo + hi)
    fmid = p.evaluate([mid])[0]
    trace.iterates.append(np.array([mid]))
    trace.residual_norms.append(abs(fmid))
    status = "max-iter"
    for _ in range(stop.max_iter):
        if fmid == 0.0 or flo * fmid <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
        new_mid = 0.5 * (lo + hi)
        fmid = p.evaluate([new_mid])[0]
        step = abs(new_mid - mid)
        mid = new_mid
        trace.iterates.append(np.array([mid]))
        trace.residual_norms.append(abs(fmid))
        trace.step_norms.append(step)
        if abs(fmid) <= stop.residual_tol:
            status = "converged-by-residual"
            break
        if step <= stop.step_tol:
            status = "converged-by-step"
            break
    trace.status = status


# -- scale-invariant Steffensen ----------------------------------------------

@dataclass
class AsisResult:
    """ASIS run: the adimensional trace, its back-transform, and the form."""

    x_trace: IterationTrace
    y_trace: IterationTrace
    form: AdimensionalForm


def asis_solve(problem: Problem, x0, stop: StoppingCriteria,
               dd: DividedDifference = DividedDifference("componentwise")
               ) -> AsisResult:
    """Steffensen on the adimensional form, iterates mapped back to x-space."""
    form = adimensionalize(problem, x0)
    y_trace = solve(form.g, Steffensen(dd=dd), form.y0, stop)
    x_trace = IterationTrace(status=y_trace.status,
                             n_evals=y_trace.n_evals,
                             n_jac_evals=y_trace.n_jac_evals,
                             used_fd_jacobian=y_trace.used_fd_jacobian,
                             warnings=list(y_trace.warnings))
    prev = None
    for y, res in zip(y_trace.iterates, y_trace.residual_norms):
        x = form.to_original(y)
        x_trace.iterates.append(x)
        try:
            x_trace.residual_norms.append(problem.vector_norm(problem.evaluate(x)))
        except DomainError:
            x_trace.residual_norms.append(float("nan"))
        if prev is not None:
            x_trace.step_norms.append(problem.vector_norm(x - prev))
        prev = x
    return AsisResult(x_trace=x_trace, y_trace=y_trace, form=form)
