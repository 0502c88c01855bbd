import numpy as np
import pytest

from conftest import assert_close
from qpg import hadamard as hd
from qpg import models as me
from qpg import permgroup as pg
from qpg.errors import InvalidInputError
from qpg.linalg import haar_unitary, max_abs


class TestValidate:
    def test_f2(self):
        ok, diag = hd.validate_hadamard(np.array([[1, 1], [1, -1]], dtype=complex), 1e-9)
        assert ok and diag["worst_modulus_deviation"] == 0

    def test_all_ones_fails_orthogonality(self):
        ok, diag = hd.validate_hadamard(np.ones((2, 2), dtype=complex), 1e-9)
        assert not ok
        assert diag["worst_offdiagonal_row_product"] == pytest.approx(2.0)

    def test_f4_with_direct_inner_products(self):
        H = hd.fourier_matrix([4]).matrix
        # oracle: row inner products computed by explicit summation
        for a in range(4):
            for b in range(4):
                ip = sum(H[a, l] * H[b, l].conjugate() for l in range(4))
                assert abs(ip - (4.0 if a == b else 0.0)) <= 1e-12
        ok, _ = hd.validate_hadamard(H, 1e-9)
        assert ok


class TestFourierMatrix:
    def test_f2(self):
        assert_close(hd.fourier_matrix([2]).matrix, [[1, 1], [1, -1]])

    def test_f4_second_row(self):
        assert_close(hd.fourier_matrix([4]).matrix[1], [1, 1j, -1, -1j])

    def test_tensor_square_by_hand(self):
        expected = np.array(
            [
                [1, 1, 1, 1],
                [1, -1, 1, -1],
                [1, 1, -1, -1],
                [1, -1, -1, 1],
            ],
            dtype=complex,
        )
        assert_close(hd.fourier_matrix([2, 2]).matrix, expected)

    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            hd.fourier_matrix([])
        with pytest.raises(ValueError):
            hd.fourier_matrix([0, 2])


class TestDitaDeform:
    def test_trivial_fiber_is_fourier(self):
        H = hd.dita_deform([2], [3], np.ones((2, 3)))
        assert_close(H.matrix, hd.fourier_matrix([2, 3]).matrix)

    def test_random_q_is_hadamard(self):
        for k in range(5):
            Q = hd.random_unimodular((2, 2), seed=k)
            ok, _ = hd.validate_hadamard(hd.dita_deform([2], [2], Q).matrix, 1e-9)
            assert ok

    def test_f6_up_to_index_maps(self):
        # oracle: CRT index maps between Z6 and Z2 x Z3 derived from
        # kl/6 = kl/2 + 2kl/3 (mod 1)
        F6 = hd.fourier_matrix([6]).matrix
        T = hd.dita_deform([2], [3], np.ones((2, 3))).matrix
        rho = [3 * (k % 2) + (2 * k) % 3 for k in range(6)]
        gam = [3 * (l % 2) + l % 3 for l in range(6)]
        assert_close(F6, T[np.ix_(rho, gam)], tol=1e-12)

    def test_rejects_non_unimodular(self):
        with pytest.raises(InvalidInputError):
            hd.dita_deform([2], [2], np.full((2, 2), 2.0))

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            hd.dita_deform([2], [3], np.ones((3, 2)))


class TestMagicBasis:
    def test_f2_vectors(self):
        basis = hd.magic_from_hadamard(hd.fourier_matrix([2]))
        r = 1 / np.sqrt(2)
        assert_close(basis.vectors[0, 0], [r, r])
        assert_close(basis.vectors[1, 1], [r, r])
        assert_close(basis.vectors[0, 1], [r, -r])
        assert_close(basis.vectors[1, 0], [r, -r])

    def test_row_inner_products_are_kronecker(self):
        H = hd.dita_deform([2], [3], hd.random_unimodular((2, 3), seed=3))
        V = hd.magic_from_hadamard(H).vectors
        n = H.size
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    ip = np.sum(V[i, j].conj() * V[i, k])
                    assert abs(ip - (1.0 if j == k else 0.0)) <= 1e-12

    def test_f4_grid_is_magic(self):
        basis = hd.magic_from_hadamard(hd.fourier_matrix([4]))
        grid = me.magic_unitary_from_vectors(basis.vectors)
        assert me.validate_magic(grid, 1e-10).passed


class TestHadamardType:
    def test_roundtrip_f4(self):
        H = hd.fourier_matrix([4])
        res = hd.magic_basis_is_hadamard_type(hd.magic_from_hadamard(H))
        assert res.is_hadamard_type
        assert_close(res.hadamard.matrix, H.matrix, tol=1e-10)  # F4 is already dephased

    def test_roundtrip_deformed_up_to_dephasing(self):
        H = hd.dita_deform([2], [2], hd.random_unimodular((2, 2), seed=11))
        res = hd.magic_basis_is_hadamard_type(hd.magic_from_hadamard(H))
        assert res.is_hadamard_type
        assert_close(res.hadamard.matrix, hd.dephase(H).matrix, tol=1e-10)

    def test_random_frame_basis_is_not_hadamard_type(self):
        G = pg.cyclic_group(4)
        L = pg.LatinSquare.from_rows(G.elements)
        model = me.latin_square_model(G, L, haar_unitary(4, rng_seed=2))
        basis = hd.MagicBasis(4, 4, model.vectors[0])
        res = hd.magic_basis_is_hadamard_type(basis)
        assert not res.is_hadamard_type
        # direct evaluation: after forcing the rescaling, the product
        # identity xi_01 xi_12 = xi_02 fails
        R = basis.vectors * 2.0
        R = R / R[:, :, :1]
        dev = max_abs(R[0, 1] * R[1, 2] - R[0, 2])
        assert dev > 1e-3

    def test_zero_entry_reported(self):
        basis = hd.MagicBasis(2, 2, me.regular_model(pg.cyclic_group(2)).vectors[0])
        res = hd.magic_basis_is_hadamard_type(basis)
        assert not res.is_hadamard_type
        assert "zero entry" in res.reason

    def test_requires_square_dimension(self):
        V = np.zeros((2, 2, 3), dtype=complex)
        with pytest.raises(ValueError):
            hd.magic_basis_is_hadamard_type(hd.MagicBasis(2, 3, V))


class TestDephase:
    def test_first_row_and_column(self):
        H = hd.dita_deform([2], [3], hd.random_unimodular((2, 3), seed=8))
        D = hd.dephase(H)
        assert_close(D.matrix[0], np.ones(6), tol=1e-12)
        assert_close(D.matrix[:, 0], np.ones(6), tol=1e-12)
        ok, _ = hd.validate_hadamard(D.matrix, 1e-9)
        assert ok


class TestZ2nFourier:
    def test_generator_image_n1(self):
        assert_close(hd.z2n_fourier_inverse([0.0, 1.0]), [1.0, -1.0])

    def test_delta_at_identity_n2(self):
        assert_close(hd.z2n_fourier_forward([1.0, 0, 0, 0]), [0.25] * 4)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_roundtrip(self, n):
        rng = np.random.default_rng(n)
        f = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
        assert_close(hd.z2n_fourier_inverse(hd.z2n_fourier_forward(f)), f, tol=1e-12)
        assert_close(hd.z2n_fourier_forward(hd.z2n_fourier_inverse(f)), f, tol=1e-12)

    def test_kernel_matches_tensor_power(self):
        for n in (1, 2, 3):
            assert_close(hd.z2n_kernel(n), hd.fourier_matrix([2] * n).matrix, tol=1e-12)

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            hd.z2n_fourier_forward(np.ones(3))


class TestHadamardIO:
    def test_roundtrip(self, tmp_path):
        H = hd.fourier_matrix([3])
        d = hd.hadamard_to_json_dict(H)
        assert d["kind"] == "hadamard"
        H2 = hd.hadamard_from_json_dict(d)
        assert_close(H2.matrix, H.matrix, tol=1e-15)

    def test_kind_required(self):
        d = hd.hadamard_to_json_dict(hd.fourier_matrix([2]))
        del d["kind"]
        with pytest.raises(InvalidInputError):
            hd.hadamard_from_json_dict(d)
