"""Scalar and finite-dimensional nonlinear problems F(x)=0.

A Problem bundles the map, an optional analytic Jacobian, an optional
second-derivative norm bound, and the norm used for vectors and operators.
Everything is immutable after construction and safe to share.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

FD_STEP = 1e-7
RCOND_FLOOR = 1e-14


class DomainError(Exception):
    """The map produced a non-finite value."""


class SingularOperatorError(Exception):
    """A linear operator required by the iteration is numerically singular."""


class AlreadyAtRootError(Exception):
    """F(x0) = 0, so quantities scaled by ||F(x0)|| are undefined."""


def as_point(x, m: int) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (m,):
        raise ValueError(f"expected point of dimension {m}, got shape {x.shape}")
    return x


@dataclass(frozen=True)
class Problem:
    """A nonlinear map F: R^m -> R^m with optional derivative information.

    f may return a scalar when m == 1; evaluations are normalized to
    shape-(m,) arrays.  If `jacobian` is missing a central finite-difference
    Jacobian is substituted (and flagged by solvers in their traces).
    `d2f` is a scalar-only second derivative used by h-family steps.
    """

    f: Callable
    dimension: int = 1
    jacobian: Optional[Callable] = None
    d2f: Optional[Callable] = None
    k2: Optional[float] = None
    norm: str = "euclidean"
    name: str = ""

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be a positive integer")
        if self.norm not in ("euclidean", "max"):
            raise ValueError(f"unknown norm {self.norm!r}")
        if self.k2 is not None and self.k2 < 0:
            raise ValueError("k2 must be nonnegative")

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, x) -> np.ndarray:
        x = as_point(x, self.dimension)
        if not np.all(np.isfinite(x)):
            raise DomainError("non-finite input point")
        fx = np.atleast_1d(np.asarray(self.f(x if self.dimension > 1 else x[0]),
                                      dtype=float))
        if fx.shape != (self.dimension,):
            raise ValueError("evaluator output has wrong dimension")
        if not np.all(np.isfinite(fx)):
            raise DomainError("domain failure: non-finite value of F")
        return fx

    def jac(self, x) -> np.ndarray:
        x = as_point(x, self.dimension)
        if self.jacobian is not None:
            J = np.atleast_2d(np.asarray(
                self.jacobian(x if self.dimension > 1 else x[0]), dtype=float))
            if J.shape != (self.dimension, self.dimension):
                raise ValueError("Jacobian has wrong shape")
        else:
            J = self.fd_jacobian(x)
        if not np.all(np.isfinite(J)):
            raise DomainError("domain failure: non-finite Jacobian")
        return J

    def fd_jacobian(self, x) -> np.ndarray:
        """Central finite differences, step h = max(1e-7, 1e-7*|x_j|)."""
        x = as_point(x, self.dimension)
        m = self.dimension
        J = np.empty((m, m))
        for j in range(m):
            h = max(FD_STEP, FD_STEP * abs(x[j]))
            xp = x.copy(); xp[j] += h
            xm = x.copy(); xm[j] -= h
            J[:, j] = (self.evaluate(xp) - self.evaluate(xm)) / (2.0 * h)
        return J

    def second_derivative(self, x) -> float:
        """Scalar second derivative; finite differences of f' as fallback."""
        if self.dimension != 1:
            raise ValueError("second_derivative is scalar-only")
        x = as_point(x, 1)
        if self.d2f is not None:
            return float(self.d2f(x[0]))
        h = max(1e-5, 1e-5 * abs(x[0]))
        jp = self.jac(x + h)[0, 0]
        jm = self.jac(x - h)[0, 0]
        return float((jp - jm) / (2.0 * h))

    # -- norms --------------------------------------------------------------

    def vector_norm(self, v) -> float:
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if self.norm == "euclidean":
            return float(np.linalg.norm(v))
        return float(np.linalg.norm(v, np.inf))

    def operator_norm(self, A) -> float:
        A = np.atleast_2d(np.asarray(A, dtype=float))
        if self.norm == "max":
            return float(np.max(np.sum(np.abs(A), axis=1)))
        return spectral_norm(A)

    def has_analytic_jacobian(self) -> bool:
        return self.jacobian is not None


def spectral_norm(A: np.ndarray, tol: float = 1e-12, max_sweeps: int = 200) -> float:
    """2-norm by power iteration on A^T A."""
    A = np.atleast_2d(A)
    m = A.shape[0]
    if m == 1:
        return abs(float(A[0, 0]))
    B = A.T @ A
    v = np.ones(m) / np.sqrt(m)
    lam = 0.0
    for _ in range(max_sweeps):
        w = B @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v_new = w / nw
        lam_new = float(v_new @ B @ v_new)
        if abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)):
            lam = lam_new
            break
        v, lam = v_new, lam_new
    return float(np.sqrt(max(lam, 0.0)))


def rcond(A: np.ndarray) -> float:
    """Reciprocal condition estimate (smallest/largest singular value)."""
    A = np.atleast_2d(A)
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0.0
    return float(s[-1] / s[0])


def solve_linear(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dense solve with partial pivoting; raises when rcond < 1e-14."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if rcond(A) < RCOND_FLOOR:
        raise SingularOperatorError("singular linear operator (rcond < 1e-14)")
    return np.linalg.solve(A, b)


# -- linear rescalings ------------------------------------------------------

@dataclass(frozen=True)
class LinearScaling:
    """x-scale c and value-scale k: the scaled problem is x -> k*F(c*x)."""

    c: float
    k: float

    def __post_init__(self):
        if self.c == 0.0 or self.k == 0.0:
            raise ValueError("scaling factors must be nonzero")

    def inverse(self) -> "LinearScaling":
        return LinearScaling(1.0 / self.c, 1.0 / self.k)


def apply_scaling(problem: Problem, s: LinearScaling) -> Problem:
    """Problem x -> k*F(c*x) with consistently transformed derivatives."""
    c, k = s.c, s.k
    base_f, base_jac = problem.f, problem.jacobian
    m = problem.dimension

    def f_scaled(x):
        return k * np.atleast_1d(np.asarray(base_f(x * c), dtype=float))

    jac_scaled = None
    if base_jac is not None:
        def jac_scaled(x):
            return (k * c) * np.atleast_2d(np.asarray(base_jac(x * c), dtype=float))

    d2_scaled = None
    if problem.d2f is not None:
        base_d2 = problem.d2f
        def d2_scaled(x):
            return k * c * c * base_d2(x * c)

    k2_scaled = None if problem.k2 is None else abs(k) * c * c * problem.k2
    return dataclasses.replace(problem, f=f_scaled, jacobian=jac_scaled,
                               d2f=d2_scaled, k2=k2_scaled,
                               name=f"{problem.name}(scaled c={c},k={k})")


# -- Kantorovich data -------------------------------------------------------

@dataclass(frozen=True)
class KantorovichData:
    """The bounds (K2, B, eta) and the adimensional product a = K2*B*eta."""

    k2: float
    B: float
    eta: float

    @property
    def a(self) -> float:
        return self.k2 * self.B * self.eta


def kantorovich_data(problem: Problem, x0, mode: str = "newton",
                     k2: Optional[float] = None,
                     radius: Optional[float] = None) -> KantorovichData:
    """Compute (K2, B, eta, a) at x0.

    mode="newton": eta bounds ||F'(x0)^-1 F(x0)||.
    mode="asis":   eta = B * ||F(x0)||.
    K2 is taken explicit (argument, then problem.k2) or estimated as the max
    of finite-difference Jacobian-variation norms sampled over the ball
    B(x0, radius), default radius 2*eta.
    """
    if mode not in ("newton", "asis"):
        raise ValueError(f"unknown mode {mode!r}")
    x0 = as_point(x0, problem.dimension)
    fx0 = problem.evaluate(x0)
    nf0 = problem.vector_norm(fx0)
    if nf0 < 1e-300:
        raise AlreadyAtRootError("already at root: F(x0) = 0")
    J0 = problem.jac(x0)
    if rcond(J0) < RCOND_FLOOR:
        raise SingularOperatorError("derivative singular at x0")
    J0inv = np.linalg.inv(J0)
    B = problem.operator_norm(J0inv)
    if mode == "newton":
        eta = problem.vector_norm(solve_linear(J0, fx0))
    else:
        eta = B * nf0
    if k2 is None:
        k2 = problem.k2
    if k2 is None:
        R = 2.0 * eta if radius is None else radius
        k2 = sample_k2(problem, x0, R)
    return KantorovichData(k2=float(k2), B=float(B), eta=float(eta))


def sample_k2(problem: Problem, x0, radius: float, n_samples: int = 24,
              delta: float = 1e-5) -> float:
    """Max sampled ||F''|| proxy over the ball B(x0, radius).

    The proxy at x is the largest operator norm of the per-coordinate
    finite-difference variation of the Jacobian.  Deterministic sample set:
    center, axis points at the full radius, and a fixed seeded cloud.
    """
    x0 = as_point(x0, problem.dimension)
    m = problem.dimension
    pts = [x0]
    for j in range(m):
        e = np.zeros(m); e[j] = radius
        pts.append(x0 + e)
        pts.append(x0 - e)
    rng = np.random.default_rng(20240817)
    for _ in range(n_samples):
        u = rng.standard_normal(m)
        u /= max(np.linalg.norm(u), 1e-30)
        pts.append(x0 + radius * rng.uniform(0.0, 1.0) * u)
    best = 0.0
    for x in pts:
        for j in range(m):
            e = np.zeros(m); e[j] = delta
            D = (problem.jac(x + e) - problem.jac(x - e)) / (2.0 * delta)
            best = max(best, problem.operator_norm(D))
    return best


# -- bundled problems -------------------------------------------------------

def f1_problem(norm: str = "euclidean") -> Problem:
    """exp(x-1) - 1 = 0, root 1."""
    return Problem(f=lambda x: np.exp(x - 1.0) - 1.0,
                   jacobian=lambda x: np.exp(x - 1.0),
                   d2f=lambda x: np.exp(x - 1.0),
                   dimension=1, norm=norm, name="f1")


def f2_problem(norm: str = "euclidean") -> Problem:
    """exp(2x-1) - 1 = 0, root 1/2 (f1 with the variable doubled)."""
    return Problem(f=lambda x: np.exp(2.0 * x - 1.0) - 1.0,
                   jacobian=lambda x: 2.0 * np.exp(2.0 * x - 1.0),
                   d2f=lambda x: 4.0 * np.exp(2.0 * x - 1.0),
                   dimension=1, norm=norm, name="f2")


def example3_problem(norm: str = "euclidean") -> Problem:
    """2-variable system from unconstrained minimization; root (1, -1)."""
    def f(v):
        x, y = v
        return np.array([-4.0 * x * (y - x * x + 2.0) - 2.0 * (1.0 - x),
                         2.0 * (y - x * x + 2.0)])

    def jac(v):
        x, y = v
        return np.array([[-4.0 * (y - x * x + 2.0) + 8.0 * x * x + 2.0, -4.0 * x],
                         [-4.0 * x, 2.0]])

    return Problem(f=f, jacobian=jac, dimension=2, norm=norm, name="example3")


def zigzag_problem(b: float, norm: str = "euclidean") -> Problem:
    """Gradient system (x, b*y) = 0 of the ill-conditioned quadratic bowl."""
    if not 0.0 < b:
        raise ValueError("b must be positive")
    return Problem(f=lambda v: np.array([v[0], b * v[1]]),
                   jacobian=lambda v: np.array([[1.0, 0.0], [0.0, b]]),
                   dimension=2, norm=norm, name=f"zigzag(b={b})")


BUILTIN_PROBLEMS = {
    "f1": f1_problem,
    "f2": f2_problem,
    "example3": example3_problem,
    "zigzag": zigzag_problem,
}


def builtin_problem(name: str, **params) -> Problem:
    if name not in BUILTIN_PROBLEMS:
        raise ValueError(f"unknown problem {name!r}; "
                         f"choices: {sorted(BUILTIN_PROBLEMS)}")
    return BUILTIN_PROBLEMS[name](**params)
