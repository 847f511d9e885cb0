import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adimsolve.problems import (AlreadyAtRootError, LinearScaling,
                                SingularOperatorError, apply_scaling,
                                builtin_problem, kantorovich_data,
                                spectral_norm)

from conftest import linear_problem

E = math.e
# Kantorovich threshold for f1: a = 1/2 exactly when K2 = 1
X0_THRESHOLD = 1.0 - math.log((1.0 + math.sqrt(3.0)) / 2.0)


class TestEvaluate:
    def test_f1_at_root(self, f1):
        assert f1.evaluate(1.0)[0] == 0.0

    def test_f1_at_zero(self, f1):
        assert f1.evaluate(0.0)[0] == pytest.approx(1.0 / E - 1.0, abs=1e-15)

    def test_linear_map_zero(self):
        p = builtin_problem("zigzag", b=0.3)
        assert np.all(p.evaluate([0.0, 0.0]) == 0.0)

    def test_dimension_mismatch(self, example3):
        with pytest.raises(ValueError):
            example3.evaluate([1.0])


class TestJacobian:
    def test_example3_origin(self, example3):
        J = example3.jac([0.0, 0.0])
        assert np.allclose(J, np.diag([-6.0, 2.0]))

    def test_f1_at_zero(self, f1):
        assert f1.jac(0.0)[0, 0] == pytest.approx(1.0 / E, rel=1e-15)

    def test_linear_map(self):
        A = np.array([[2.0, -1.0], [0.5, 3.0]])
        p = linear_problem(A)
        for x in ([0.0, 0.0], [1.0, -2.0], [10.0, 3.0]):
            assert np.allclose(p.jac(x), A)

    @pytest.mark.parametrize("name,x", [
        ("f1", [0.3]), ("f2", [0.7]), ("example3", [0.2, -0.4]),
    ])
    def test_finite_differences_match_analytic(self, name, x):
        p = builtin_problem(name)
        J = p.jac(x)
        Jfd = p.fd_jacobian(np.asarray(x))
        assert np.allclose(Jfd, J, rtol=1e-5, atol=1e-7)


class TestScaling:
    def test_f1_doubled_is_f2(self, f1, f2):
        scaled = apply_scaling(f1, LinearScaling(c=2.0, k=1.0))
        for x in np.linspace(-1.0, 1.5, 11):
            assert scaled.evaluate(x)[0] == pytest.approx(f2.evaluate(x)[0],
                                                          rel=1e-14, abs=1e-15)
        assert scaled.evaluate(0.5)[0] == 0.0

    def test_identity_scaling(self, f1):
        same = apply_scaling(f1, LinearScaling(1.0, 1.0))
        for x in (-0.5, 0.0, 1.0, 2.0):
            assert same.evaluate(x)[0] == f1.evaluate(x)[0]

    def test_value_scaling_keeps_roots(self, f1):
        scaled = apply_scaling(f1, LinearScaling(c=1.0, k=3.0))
        assert scaled.evaluate(1.0)[0] == 0.0

    def test_round_trip(self, example3):
        s = LinearScaling(c=-1.7, k=0.4)
        back = apply_scaling(apply_scaling(example3, s), s.inverse())
        for x in ([0.0, 0.0], [0.5, -0.3], [1.0, -1.0]):
            orig = example3.evaluate(x)
            again = back.evaluate(x)
            assert np.allclose(again, orig, rtol=1e-15, atol=1e-16)

    def test_jacobian_transform(self, f1):
        s = LinearScaling(c=2.0, k=5.0)
        scaled = apply_scaling(f1, s)
        x = 0.3
        assert scaled.jac(x)[0, 0] == pytest.approx(
            10.0 * f1.jac(2.0 * x)[0, 0], rel=1e-14)

    def test_zero_factor_rejected(self):
        with pytest.raises(ValueError):
            LinearScaling(0.0, 1.0)


class TestKantorovichData:
    def test_threshold_gives_a_half(self, f1):
        data = kantorovich_data(f1, X0_THRESHOLD, mode="newton", k2=1.0)
        assert data.a == pytest.approx(0.5, abs=1e-12)

    def test_linear_problem_a_zero(self):
        p = linear_problem(np.array([[2.0, 0.3], [0.1, 1.5]]), b=[1.0, 1.0])
        data = kantorovich_data(p, [0.0, 0.0], mode="newton")
        assert data.a == 0.0
        assert data.k2 == 0.0

    def test_brute_force_oracle(self, f1):
        # independent computation of B and eta by dense inversion
        x0 = 0.9
        fp = math.exp(x0 - 1.0)
        B_oracle = 1.0 / fp
        eta_oracle = abs((math.exp(x0 - 1.0) - 1.0) / fp)
        k2 = math.exp(0.0)
        data = kantorovich_data(f1, x0, mode="newton", k2=k2)
        assert data.B == pytest.approx(B_oracle, abs=1e-12)
        assert data.eta == pytest.approx(eta_oracle, abs=1e-12)
        assert data.a == pytest.approx(k2 * B_oracle * eta_oracle, abs=1e-12)

    def test_asis_mode_eta(self, f1):
        x0 = 0.9
        d_newton = kantorovich_data(f1, x0, mode="newton", k2=1.0)
        d_asis = kantorovich_data(f1, x0, mode="asis", k2=1.0)
        # scalar case: |f/f'| = |1/f'| * |f| so the two etas coincide
        assert d_asis.eta == pytest.approx(d_newton.eta, rel=1e-12)

    def test_already_at_root(self, f1):
        with pytest.raises(AlreadyAtRootError):
            kantorovich_data(f1, 1.0, k2=1.0)

    def test_singular_derivative(self):
        p = linear_problem(np.array([[1.0, 0.0], [0.0, 0.0]]), b=[1.0, 0.0])
        with pytest.raises(SingularOperatorError):
            kantorovich_data(p, [0.0, 0.0])

    def test_sampled_k2_close_to_true_bound(self, f1):
        # f1'' = exp(x-1) so the sampled bound over B(0.9, R) is about
        # exp(0.9 + R - 1)
        x0 = 0.9
        data = kantorovich_data(f1, x0, mode="newton")
        eta = data.eta
        expected = math.exp(x0 + 2.0 * eta - 1.0)
        assert data.k2 == pytest.approx(expected, rel=1e-2)

    @given(c=st.floats(0.1, 10.0), k=st.floats(0.1, 10.0))
    @settings(max_examples=30, deadline=None)
    def test_a_is_scale_invariant(self, c, k):
        f1 = builtin_problem("f1")
        x0 = 0.8
        k2 = math.exp(x0 - 1.0 + 0.5)  # explicit local bound
        base = kantorovich_data(f1, x0, mode="newton", k2=k2)
        scaled_p = apply_scaling(f1, LinearScaling(c=c, k=k))
        data = kantorovich_data(scaled_p, x0 / c, mode="newton",
                                k2=k * c * c * k2)
        assert data.a == pytest.approx(base.a, abs=1e-10)


class TestNorms:
    def test_spectral_norm_matches_svd(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            A = rng.standard_normal((4, 4))
            assert spectral_norm(A) == pytest.approx(
                np.linalg.norm(A, 2), rel=1e-10)

    def test_max_norm_row_sum(self):
        p = builtin_problem("example3", norm="max")
        A = np.array([[1.0, -2.0], [3.0, 0.5]])
        assert p.operator_norm(A) == 3.5

    def test_vector_norms(self):
        p_e = builtin_problem("example3")
        p_m = builtin_problem("example3", norm="max")
        v = [3.0, -4.0]
        assert p_e.vector_norm(v) == 5.0
        assert p_m.vector_norm(v) == 4.0
