import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hnormal import CongruenceKind, congruence_canonical_2x2, f_rho, solve_rho
from hnormal.congr2 import cosquare, triangular_form
from hnormal.errors import OutOfDomain
from hnormal.families import SQRT3, W60

reals = st.floats(-3, 3, allow_nan=False)


def congruent(A, seed):
    rng = np.random.default_rng(seed)
    T = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return T @ A @ T.conj().T


def same_class(f, g, tol=1e-6):
    if f.kind is not g.kind:
        return False
    return all(abs(a - b) <= tol for a, b in zip(f.params(), g.params()))


class TestRho:
    def test_branch_point_is_exact(self):
        assert f_rho(SQRT3) == -1.0

    def test_solve_branch_point(self):
        assert solve_rho(-1.0) == pytest.approx(SQRT3, abs=1e-15)

    def test_closed_form_value(self):
        assert solve_rho(-3.0) == pytest.approx(math.sqrt(13 / 3), rel=1e-14)
        assert solve_rho(-3.0) == pytest.approx(2.081666, abs=1e-6)

    def test_f_at_two(self):
        assert f_rho(2.0) == pytest.approx((-3 - math.sqrt(5)) / 2, rel=1e-15)

    def test_domain(self):
        with pytest.raises(OutOfDomain):
            f_rho(1.0)
        with pytest.raises(OutOfDomain):
            solve_rho(-0.5)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-1e6, -1.0))
    def test_round_trip(self, s):
        assert f_rho(solve_rho(s)) == pytest.approx(s, rel=1e-10)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(SQRT3, 1e3))
    def test_f_is_decreasing_and_below_minus_one(self, rho):
        assert f_rho(rho) <= -1.0
        assert f_rho(rho + 0.01) < f_rho(rho)


class TestCanonicalForms:
    def test_identity(self):
        cf = congruence_canonical_2x2(np.eye(2))
        assert cf.kind is CongruenceKind.DIAGONAL
        assert cf.z1 == pytest.approx(1) and cf.z2 == pytest.approx(1)

    def test_diagonal_order(self):
        cf = congruence_canonical_2x2(np.diag([1j, 1]))
        assert cf.kind is CongruenceKind.DIAGONAL
        assert cf.z1 == pytest.approx(1, abs=1e-12) and cf.z2 == pytest.approx(1j, abs=1e-12)

    def test_triangular_at_two(self):
        A = np.array([[0, 1], [W60 * f_rho(2.0), 0]])
        cf = congruence_canonical_2x2(A)
        assert cf.kind is CongruenceKind.TRIANGULAR
        assert cf.rho == pytest.approx(2.0, abs=1e-10)
        assert cf.z == pytest.approx(1, abs=1e-10)

    def test_transform_reproduces_form(self):
        A = np.array([[1 + 2j, -0.5], [0.3j, 2 - 1j]])
        cf = congruence_canonical_2x2(A)
        np.testing.assert_allclose(cf.T @ A @ cf.T.conj().T, cf.form, atol=1e-10)
        assert cf.residual <= 1e-8

    def test_branch_point_form_is_fixed(self):
        cf = congruence_canonical_2x2(triangular_form(cmath.exp(0.4j), SQRT3))
        assert cf.kind is CongruenceKind.TRIANGULAR
        assert cf.rho == pytest.approx(SQRT3, abs=1e-9)

    def test_cosquare_invariant(self):
        A = np.array([[2, 1j], [0.5, -1]])
        B = congruent(A, 4)
        ea = np.sort_complex(np.linalg.eigvals(cosquare(A)))
        eb = np.sort_complex(np.linalg.eigvals(cosquare(B)))
        np.testing.assert_allclose(ea, eb, atol=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(reals, min_size=8, max_size=8), st.integers(0, 2**31))
    def test_invariant_under_congruence(self, v, seed):
        A = np.array(v[:4]).reshape(2, 2) + 1j * np.array(v[4:]).reshape(2, 2)
        if np.linalg.svd(A, compute_uv=False)[-1] < 1e-2:
            return
        f = congruence_canonical_2x2(A)
        g = congruence_canonical_2x2(congruent(A, seed))
        # near the kind boundary either side is a valid reading; skip those
        if f.kind is CongruenceKind.TRIANGULAR and f.rho < SQRT3 + 1e-3:
            return
        assert same_class(f, g)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0, math.pi - 0.01), st.floats(SQRT3 + 0.01, 6))
    def test_triangular_forms_are_fixed_points(self, t, rho):
        z = cmath.exp(1j * t)
        cf = congruence_canonical_2x2(triangular_form(z, rho))
        assert cf.kind is CongruenceKind.TRIANGULAR
        assert cf.rho == pytest.approx(rho, abs=1e-8)
        assert cf.z == pytest.approx(z, abs=1e-8)
