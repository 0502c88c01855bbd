"""Complex Hadamard matrices and the magic bases they generate.

A complex Hadamard matrix is a square matrix with unimodular entries and
pairwise orthogonal rows (so ``H H* = N I``).  The entrywise ratios of its
rows give an ``N x N`` grid of unit vectors whose rank-1 projectors form a
flat magic unitary; conversely a magic basis arises this way exactly when it
is entrywise unimodular (after rescaling) and multiplicative under the
entrywise product.  This module builds Fourier matrices of finite abelian
groups, their Dita deformations, and the Fourier transform pair over
``Z_2^n``; the model-level machinery lives in ``qpg.models``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, max_abs
from .errors import InvalidInputError


@dataclass(frozen=True)
class HadamardMatrix:
    """Unnormalized complex Hadamard matrix: entries on the unit circle,
    ``H H* = N I``.  (The unitary is ``H / sqrt(N)``.)"""

    size: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.matrix.shape != (self.size, self.size):
            raise ValueError("matrix shape disagrees with size")


@dataclass(frozen=True)
class MagicBasis:
    """An ``N x N`` grid of vectors in ``C^K``, orthogonal along each row and
    each column, every vector of norm 0 or 1."""

    size: int
    dim: int
    vectors: np.ndarray  # shape (N, N, K)

    def __post_init__(self):
        if self.vectors.shape != (self.size, self.size, self.dim):
            raise ValueError("vectors must have shape (N, N, K)")


@dataclass(frozen=True)
class HadamardTypeResult:
    """Outcome of the Hadamard-type test on a magic basis: the reconstructed
    matrix on success, otherwise the first violated condition."""

    hadamard: HadamardMatrix | None
    reason: str | None

    @property
    def is_hadamard_type(self) -> bool:
        return self.hadamard is not None


def validate_hadamard(M, tol: float = DEFAULT_TOL):
    """Check the two Hadamard invariants; returns ``(ok, diagnostics)``.

    Diagnostics report the worst entry-modulus deviation from 1 and the worst
    row inner product deviation from ``N * delta_{ij}``.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    n = M.shape[0]
    modulus_dev = max_abs(np.abs(M) - 1.0)
    G = M @ M.conj().T
    offdiag = G - np.diag(np.diag(G))
    diagnostics = {
        "size": n,
        "worst_modulus_deviation": modulus_dev,
        "worst_offdiagonal_row_product": max_abs(offdiag),
        "worst_row_norm_deviation": max_abs(np.diag(G).real - n),
    }
    ok = (
        modulus_dev <= tol
        and diagnostics["worst_offdiagonal_row_product"] <= n * tol
        and diagnostics["worst_row_norm_deviation"] <= n * tol
    )
    return ok, diagnostics


def fourier_matrix(cycle_sizes) -> HadamardMatrix:
    """Fourier matrix of ``Z_{N_1} x ... x Z_{N_s}`` as a tensor product of
    cyclic Fourier matrices ``F_N = (w^{jk})`` with ``w = exp(2 pi i / N)``.

    Rows and columns are indexed row-major by group-element tuples, first
    cycle most significant.
    """
    sizes = [int(n) for n in cycle_sizes]
    if not sizes or any(n < 1 for n in sizes):
        raise ValueError("cycle sizes must be positive integers")
    M = np.ones((1, 1), dtype=complex)
    for n in sizes:
        j = np.arange(n)
        F = np.exp(2j * np.pi * np.outer(j, j) / n)
        M = np.kron(M, F)
    return HadamardMatrix(M.shape[0], M)


def random_unimodular(shape, seed: int) -> np.ndarray:
    """Entrywise ``exp(2 pi i u)`` with u uniform; avoids root-of-unity
    coincidences almost surely."""
    rng = np.random.default_rng(seed)
    return np.exp(2j * np.pi * rng.random(shape))


def dita_deform(left, right, Q) -> HadamardMatrix:
    """Dita deformation of ``F_G (x) F_H``: entries ``Q[i, b] F_G[i, j] F_H[a, b]``
    at row ``(i, a)``, column ``(j, b)``, double indices flattened row-major
    with the left-group index most significant.

    ``Q`` must be an ``|G| x |H|`` array of unimodular entries; the fiber at
    ``Q = 1`` is the Fourier matrix of the product group.
    """
    FG = fourier_matrix(left).matrix
    FH = fourier_matrix(right).matrix
    m, n = FG.shape[0], FH.shape[0]
    Q = np.asarray(Q, dtype=complex)
    if Q.shape != (m, n):
        raise ValueError(f"Q must have shape ({m}, {n}), got {Q.shape}")
    if max_abs(np.abs(Q) - 1.0) > DEFAULT_TOL:
        raise InvalidInputError("deformation parameter Q must be entrywise unimodular")
    M = np.einsum("ib,ij,ab->iajb", Q, FG, FH).reshape(m * n, m * n)
    return HadamardMatrix(m * n, M)


def magic_from_hadamard(H: HadamardMatrix) -> MagicBasis:
    """Magic basis of row ratios: ``xi_ij = (H_i / H_j) / sqrt(N)``.

    Row orthogonality ``<xi_ij, xi_ik> = delta_jk`` (and its column analogue)
    makes the associated rank-1 projector grid a flat magic unitary.
    """
    M = H.matrix
    n = H.size
    vectors = (M[:, None, :] / M[None, :, :]) / np.sqrt(n)
    return MagicBasis(n, n, vectors)


def dephase(H: HadamardMatrix) -> HadamardMatrix:
    """Equivalent Hadamard matrix with all-ones first row and first column.

    This is the normalization the basis-level reconstruction lands on:
    ``H'[i, j] = H[i, j] H[0, 0] / (H[i, 0] H[0, j])``.
    """
    M = H.matrix
    out = M * M[0, 0] / (M[:, :1] * M[:1, :])
    return HadamardMatrix(H.size, out)


def magic_basis_is_hadamard_type(basis: MagicBasis, tol: float = 1e-8) -> HadamardTypeResult:
    """Decide whether a magic basis consists of Hadamard row ratios.

    The test rescales by ``sqrt(N)`` and gauges every vector so its first
    entry is 1, then requires: entrywise unimodularity, all-one diagonal
    vectors, and the two multiplicativity identities under the entrywise
    product, ``xi_ij xi_jk = xi_ik`` and ``xi_ij xi_kl = xi_il xi_kj``.  On
    success the rows ``H_i = xi_i1`` rebuild the matrix in dephased form
    (all-ones first row and column).  Any zero entry makes the rescaling
    impossible and fails the test immediately.
    """
    if basis.size != basis.dim:
        raise ValueError("Hadamard-type test needs K = N")
    n = basis.size
    R = basis.vectors * np.sqrt(n)
    if float(np.min(np.abs(R))) <= tol:
        return HadamardTypeResult(None, "zero entry: rescaling to the torus is impossible")
    if max_abs(np.abs(R) - 1.0) > tol:
        return HadamardTypeResult(None, "entries not unimodular after rescaling")
    R = R / R[:, :, :1]  # gauge: first entry of every vector becomes 1
    if max_abs(R[np.arange(n), np.arange(n)] - 1.0) > tol:
        return HadamardTypeResult(None, "diagonal vectors are not all-one after rescaling")
    triple = np.einsum("ijl,jkl->ijkl", R, R) - R[:, None, :, :]
    if max_abs(triple) > tol:
        return HadamardTypeResult(None, "product identity xi_ij xi_jk = xi_ik fails")
    lhs = np.einsum("ijm,klm->ijklm", R, R)
    rhs = np.einsum("ilm,kjm->ijklm", R, R)
    if max_abs(lhs - rhs) > tol:
        return HadamardTypeResult(None, "exchange identity xi_ij xi_kl = xi_il xi_kj fails")
    H = HadamardMatrix(n, R[:, 0, :].copy())
    ok, _ = validate_hadamard(H.matrix, tol)
    if not ok:
        return HadamardTypeResult(None, "reconstructed rows are not Hadamard")
    return HadamardTypeResult(H, None)


# -- Fourier transform pair over Z_2^n ----------------------------------------


def z2n_kernel(n: int) -> np.ndarray:
    """Sign kernel ``B[i, j] = (-1)^{<i, j>}`` over bit strings of length n;
    equals the entrywise-real Fourier matrix of ``Z_2^n``."""
    size = 1 << n
    i = np.arange(size)
    bits = ((i[:, None] & i[None, :])[..., None] >> np.arange(n)) & 1
    return np.where(bits.sum(axis=-1) % 2, -1.0, 1.0)


def _n_from_length(length: int) -> int:
    n = int(length).bit_length() - 1
    if length <= 0 or 1 << n != length:
        raise ValueError(f"length {length} is not a power of two")
    return n


def z2n_fourier_forward(f) -> np.ndarray:
    """Delta-basis coefficients to group-basis coefficients: kernel
    ``(-1)^{<i, j>} / 2^n``."""
    f = np.asarray(f, dtype=complex)
    n = _n_from_length(f.size)
    return (z2n_kernel(n) @ f) / (1 << n)


def z2n_fourier_inverse(f) -> np.ndarray:
    """Group-basis coefficients back to delta-basis: kernel ``(-1)^{<i, j>}``."""
    f = np.asarray(f, dtype=complex)
    n = _n_from_length(f.size)
    return z2n_kernel(n) @ f


# -- file format ---------------------------------------------------------------


def hadamard_to_json_dict(H: HadamardMatrix) -> dict:
    from .linalg import matrix_to_json_dict

    d = matrix_to_json_dict(H.matrix)
    d["kind"] = "hadamard"
    return d


def hadamard_from_json_dict(d: dict) -> HadamardMatrix:
    from .linalg import matrix_from_json_dict

    if d.get("kind") != "hadamard":
        raise InvalidInputError('expected a matrix object with "kind": "hadamard"')
    M = matrix_from_json_dict(d)
    if M.shape[0] != M.shape[1]:
        raise InvalidInputError("Hadamard matrices are square")
    return HadamardMatrix(M.shape[0], M)
