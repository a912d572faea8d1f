import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import d
from hnormal import IndefinitePair, conjugate_pair, h_adjoint, is_h_normal, is_h_unitary, signature
from hnormal.errors import NearSingular, NotHermitian, SingularT
from hnormal.families import FamilyTag, record, template
from hnormal.matcore import Signature, frame_h, max_abs


def random_complex(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


class TestSignature:
    def test_secondary_diagonal(self):
        assert signature(d(4)) == Signature(2, 2)

    def test_identity(self):
        assert signature(np.eye(3)) == Signature(0, 3)

    def test_diagonal_readout(self):
        assert signature(np.diag([1.0, -1.0, 5.0])) == Signature(1, 2)

    def test_rank_is_smaller_count(self):
        s = signature(np.diag([1.0, -1.0, 5.0]))
        assert s.rank == 1 and s.n == 3

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            signature(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_singular(self):
        with pytest.raises(NearSingular):
            signature(np.diag([1.0, 0.0]))


class TestAdjoint:
    def test_identity_metric_gives_conjugate_transpose(self):
        A = random_complex(np.random.default_rng(0), 3)
        np.testing.assert_allclose(h_adjoint(A, np.eye(3)), A.conj().T)

    def test_jordan_block_against_flip(self):
        lam = 0.3 - 1.2j
        A = np.array([[lam, 1], [0, lam]])
        expected = np.array([[np.conj(lam), 1], [0, np.conj(lam)]])
        np.testing.assert_allclose(h_adjoint(A, d(2)), expected, atol=1e-15)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 6))
    def test_involution(self, seed, n):
        rng = np.random.default_rng(seed)
        A = random_complex(rng, n)
        S = random_complex(rng, n)
        H = S + S.conj().T + np.diag(rng.choice([-3.0, 3.0], size=n)) * n
        np.testing.assert_allclose(h_adjoint(h_adjoint(A, H), H), A, atol=1e-8 * max(1, max_abs(A)))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_adjoint_reverses_products(self, seed):
        rng = np.random.default_rng(seed)
        A, B = random_complex(rng, 4), random_complex(rng, 4)
        H = d(4)
        np.testing.assert_allclose(h_adjoint(A @ B, H), h_adjoint(B, H) @ h_adjoint(A, H), atol=1e-10)


class TestNormality:
    def test_diagonal_in_definite_space(self):
        assert is_h_normal(IndefinitePair(np.diag([1, 2j, -3]), np.eye(3)))

    def test_four_dimensional_canonical_block(self):
        N, H = template(FamilyTag.D1_IND_N4, record(lambda1=0, z=1, r1=0, r2=0))
        assert np.array_equal(H, d(4))
        assert is_h_normal(IndefinitePair(N, H))

    def test_nilpotent_in_definite_space_is_not_normal(self):
        assert not is_h_normal(IndefinitePair(np.array([[0, 1], [0, 0]]), np.eye(2)))


class TestUnitary:
    def test_identity(self):
        assert is_h_unitary(np.eye(4), d(4))

    def test_ordinary_unitary(self):
        Q, _ = np.linalg.qr(random_complex(np.random.default_rng(3), 4))
        assert is_h_unitary(Q, np.eye(4))

    def test_hyperbolic_scaling(self):
        assert is_h_unitary(np.diag([2.0, 0.5]), d(2))

    def test_plain_scaling_is_not(self):
        assert not is_h_unitary(np.diag([2.0, 2.0]), d(2))


class TestConjugate:
    def test_identity_leaves_pair(self):
        p = IndefinitePair(np.array([[0, 1], [0, 0]]), d(2))
        q = conjugate_pair(p, np.eye(2))
        assert np.array_equal(q.N, p.N) and np.array_equal(q.H, p.H)

    def test_scalar_conjugation_scales_metric(self):
        p = IndefinitePair(np.array([[1, 1], [0, 1]]), d(2))
        c = 2.0 - 1.0j
        q = conjugate_pair(p, c * np.eye(2))
        np.testing.assert_allclose(q.N, p.N)
        np.testing.assert_allclose(q.H, abs(c) ** 2 * p.H)

    def test_singular_transform_rejected(self):
        p = IndefinitePair(np.eye(2), np.eye(2))
        with pytest.raises(SingularT):
            conjugate_pair(p, np.array([[1, 1], [1, 1]]))

    def test_frame_metric_shape(self):
        H = frame_h(1, np.array([[-1.0]]))
        expected = np.array([[0, 0, 1], [0, -1, 0], [1, 0, 0]])
        np.testing.assert_array_equal(H.real, expected)


class TestPairValidation:
    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            IndefinitePair(np.eye(2), np.eye(3))

    def test_non_finite(self):
        with pytest.raises(ValueError):
            IndefinitePair(np.array([[np.nan]]), np.eye(1))

    def test_matrices_are_read_only(self):
        p = IndefinitePair(np.eye(2), np.eye(2))
        with pytest.raises(ValueError):
            p.N[0, 0] = 5
