import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpg import linalg as la


class TestProj:
    def test_standard_basis_vector(self):
        P = la.proj([1.0, 0.0])
        np.testing.assert_allclose(P, [[1, 0], [0, 0]], atol=1e-15)

    def test_symmetric_vector(self):
        P = la.proj(np.array([1.0, 1.0]) / np.sqrt(2))
        np.testing.assert_allclose(P, [[0.5, 0.5], [0.5, 0.5]], atol=1e-12)

    def test_zero_vector_gives_zero_matrix(self):
        P = la.proj(np.zeros(3))
        np.testing.assert_array_equal(P, np.zeros((3, 3)))

    def test_complex_vector_is_projection(self):
        # oracle: multiply the claimed projector out by hand
        v = np.array([1.0, 1j]) / np.sqrt(2)
        P = la.proj(v)
        expected = np.array([[0.5, -0.5j], [0.5j, 0.5]])
        np.testing.assert_allclose(P, expected, atol=1e-12)
        assert la.is_projection(P, 1e-9)

    def test_rejects_empty_and_unnormalized(self):
        with pytest.raises(ValueError):
            la.proj(np.zeros(0))
        with pytest.raises(ValueError):
            la.proj([2.0, 0.0])

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(-1, 1), min_size=2, max_size=8).filter(lambda v: any(abs(x) > 1e-3 for x in v)))
    def test_projection_property_and_unit_trace(self, raw):
        v = np.asarray(raw) / np.linalg.norm(raw)
        P = la.proj(v)
        assert la.is_projection(P, 1e-9)
        assert abs(np.trace(P) - 1.0) <= 1e-9


class TestIsProjection:
    def test_identity(self):
        assert la.is_projection(np.eye(2), 1e-9)

    def test_nilpotent_is_not(self):
        assert not la.is_projection(np.array([[0.0, 1.0], [0.0, 0.0]]), 1e-9)

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            la.is_projection(np.zeros((2, 3)))


class TestHaarUnitary:
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_unitarity(self, n):
        U = la.haar_unitary(n, rng_seed=123)
        assert la.max_abs(U.conj().T @ U - np.eye(n)) <= 1e-10

    def test_dimension_one_is_a_phase(self):
        U = la.haar_unitary(1, rng_seed=5)
        assert abs(abs(U[0, 0]) - 1.0) <= 1e-12

    def test_reproducible_from_seed(self):
        A = la.haar_unitary(4, rng_seed=99)
        B = la.haar_unitary(4, rng_seed=99)
        np.testing.assert_array_equal(A, B)
        assert la.max_abs(A - la.haar_unitary(4, rng_seed=100)) > 1e-3

    def test_trace_second_moment(self):
        # Monte Carlo oracle: E |Tr U|^2 = 1 over the unitary group
        M = 100_000
        us = la.haar_unitaries(2, M, rng_seed=7)
        vals = np.abs(np.einsum("mii->m", us)) ** 2
        stderr = vals.std() / np.sqrt(M)
        assert abs(vals.mean() - 1.0) <= 3 * stderr

    def test_rejects_dimension_zero(self):
        with pytest.raises(ValueError):
            la.haar_unitary(0, rng_seed=1)


class TestGram:
    def test_orthonormal_pair(self):
        G = la.gram([[1, 0], [0, 1]])
        np.testing.assert_allclose(G, np.eye(2), atol=1e-15)

    def test_repeated_vector(self):
        G = la.gram([[1, 0], [1, 0]])
        np.testing.assert_allclose(G, np.ones((2, 2)), atol=1e-15)

    def test_fourier_rows_orthonormal(self):
        # oracle: explicit summation of the inner products
        w = np.exp(2j * np.pi / 4)
        rows = [np.array([w ** (j * k) for k in range(4)]) / 2.0 for j in range(4)]
        expected = np.empty((4, 4), dtype=complex)
        for a in range(4):
            for b in range(4):
                expected[a, b] = sum(rows[a][l].conjugate() * rows[b][l] for l in range(4))
        np.testing.assert_allclose(expected, np.eye(4), atol=1e-12)
        np.testing.assert_allclose(la.gram(rows), expected, atol=1e-12)

    def test_linear_in_second_argument(self):
        u = np.array([1.0, 1j]) / np.sqrt(2)
        v = np.array([1.0, 0.0])
        G = la.gram([u, v])
        assert abs(G[0, 1] - np.sum(u.conj() * v)) <= 1e-15

    def test_mixed_dimensions_rejected(self):
        with pytest.raises(ValueError):
            la.gram([[1, 0], [1, 0, 0]])

    @settings(max_examples=30, deadline=None)
    @given(
        st.integers(1, 5),
        st.integers(2, 5),
        st.integers(0, 2**31 - 1),
    )
    def test_positive_semidefinite(self, count, dim, seed):
        rng = np.random.default_rng(seed)
        vs = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
        G = la.gram(list(vs))
        assert np.linalg.eigvalsh(G).min() >= -1e-8


class TestMatrixJson:
    def test_roundtrip(self, tmp_path):
        M = np.array([[1 + 2j, 0.5], [-1j, 3.0]])
        path = tmp_path / "m.json"
        la.save_matrix(path, M)
        np.testing.assert_array_equal(la.load_matrix(path), M)

    def test_row_major_layout(self):
        d = la.matrix_to_json_dict(np.array([[1.0, 2.0], [3.0, 4.0]]))
        assert [e[0] for e in d["entries"]] == [1.0, 2.0, 3.0, 4.0]

    def test_malformed_rejected(self):
        with pytest.raises(ValueError):
            la.matrix_from_json_dict({"rows": 2, "cols": 2, "entries": [[1, 0]]})


def test_mc_tolerance():
    assert la.mc_tolerance(10_000) == pytest.approx(0.05)


def test_parallel_map_preserves_order(monkeypatch):
    monkeypatch.setenv("QPG_THREADS", "4")
    assert la.parallel_map(lambda x: x * x, range(10)) == [x * x for x in range(10)]
