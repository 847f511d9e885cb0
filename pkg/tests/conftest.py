import numpy as np
import pytest

from adimsolve.problems import Problem, builtin_problem


@pytest.fixture
def f1():
    return builtin_problem("f1")


@pytest.fixture
def f2():
    return builtin_problem("f2")


@pytest.fixture
def example3():
    return builtin_problem("example3")


def linear_problem(A, b=None, norm="euclidean"):
    """F(x) = A x - b with exact Jacobian A."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m = A.shape[0]
    b = np.zeros(m) if b is None else np.asarray(b, dtype=float)
    if m == 1:
        return Problem(f=lambda x: A[0, 0] * x - b[0],
                       jacobian=lambda x: A[0, 0],
                       d2f=lambda x: 0.0, k2=0.0,
                       dimension=1, norm=norm, name="linear")
    return Problem(f=lambda x: A @ x - b, jacobian=lambda x: A, k2=0.0,
                   dimension=m, norm=norm, name="linear")


def random_quadratic_problem(rng, m):
    """F_i(x) = (A x)_i + x^T Q_i x + c_i with analytic Jacobian."""
    A = rng.uniform(-1.0, 1.0, (m, m)) + 2.0 * np.eye(m)
    Q = rng.uniform(-0.5, 0.5, (m, m, m))
    Q = (Q + np.swapaxes(Q, 1, 2)) / 2.0
    c = rng.uniform(-0.5, 0.5, m)

    def f(x):
        x = np.atleast_1d(x)
        return A @ x + np.einsum("ijk,j,k->i", Q, x, x) + c

    def jac(x):
        x = np.atleast_1d(x)
        return A + 2.0 * np.einsum("ijk,k->ij", Q, x)

    if m == 1:
        return Problem(f=lambda x: f([x])[0], jacobian=lambda x: jac([x])[0, 0],
                       dimension=1, name="rand-quadratic")
    return Problem(f=f, jacobian=jac, dimension=m, name="rand-quadratic")
