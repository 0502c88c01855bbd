"""Weyl matrix models from clock-and-shift bases.

For a finite abelian group ``H`` of order ``n`` (a product of cycles), the
``n^2`` unitaries ``g_(i,a) = S^i C^a`` (shift and clock powers, tensored
over the cycles) form a trace-orthogonal projective basis of ``M_n``: the
generalized Pauli matrices.  Conjugating by a unitary parameter ``x`` and
projecting, ``u_ij -> Proj(g_i x g_j*)``, gives a flat model of size
``N = n^2``; the multiplication cocycle of the basis lets the moment
matrices and character moments be computed in closed form from the scalar
traces ``tr(g_a x g_b x*)`` alone, which this module cross-checks against
the generic model engine.

The basis is defined concretely and its cocycle is *extracted* from the
matrices (``sigma(k, l) = tr(g_{kl}* g_k g_l)``) rather than assumed, so
every sign convention downstream is computed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .linalg import DEFAULT_TOL, haar_unitaries, max_abs, parallel_map
from .models import (
    DEFAULT_MAX_SIDE,
    FlatModel,
    MomentTensor,
    _check_side,
    _chunk_t_from_factors,
    t_matrix_from_stream,
)

#: Sample rows per batched chunk.
_CHUNK = 2048


@dataclass(frozen=True)
class WeylBasis:
    """Trace-orthogonal unitary basis of ``M_n`` indexed by ``H x H^``.

    ``elements[k]`` is the matrix for the pair ``index_pairs[k] = (i, a)``
    (flat row-major, shift coordinate most significant); ``mul`` and ``inv``
    are the multiplication and inverse tables of the underlying abelian group
    of order ``N = n^2``.
    """

    cycle_sizes: tuple[int, ...]
    n: int
    size: int  # N = n^2
    elements: np.ndarray  # (N, n, n)
    index_pairs: tuple[tuple[int, int], ...]
    mul: np.ndarray  # (N, N) int
    inv: np.ndarray  # (N,) int

    @property
    def identity_index(self) -> int:
        return 0


@dataclass(frozen=True)
class Cocycle:
    """Unit-modulus 2-cocycle table with ``sigma(g, 1) = sigma(1, g) = 1``."""

    group_order: int
    table: np.ndarray  # (N, N) complex

    def identity_residual(self, mul: np.ndarray, inv: np.ndarray) -> float:
        """Worst violation of ``sigma(gh,k) sigma(g,h) = sigma(g,hk) sigma(h,k)``."""
        s = self.table
        N = self.group_order
        g, h, k = np.ogrid[:N, :N, :N]
        lhs = s[mul[g, h], k] * s[g, h]
        rhs = s[g, mul[h, k]] * s[h, k]
        return max_abs(lhs - rhs)


def _clock(m: int) -> np.ndarray:
    return np.diag(np.exp(2j * np.pi * np.arange(m) / m))


def _shift(m: int) -> np.ndarray:
    S = np.zeros((m, m), dtype=complex)
    S[(np.arange(m) + 1) % m, np.arange(m)] = 1.0
    return S


def weyl_basis(cycle_sizes) -> WeylBasis:
    """Clock-and-shift basis for ``H = Z_{n_1} x ... x Z_{n_s}``.

    For ``H = Z_2`` the four elements are exactly the Pauli-type matrices
    ``1, diag(1,-1), [[0,1],[1,0]], [[0,-1],[1,0]]``.
    """
    sizes = tuple(int(m) for m in cycle_sizes)
    if not sizes or any(m < 1 for m in sizes):
        raise ValueError("cycle sizes must be positive integers")
    n = int(np.prod(sizes))
    N = n * n

    clocks = [_clock(m) for m in sizes]
    shifts = [_shift(m) for m in sizes]

    def h_tuples():
        return np.indices(sizes).reshape(len(sizes), -1).T  # row-major

    tuples = h_tuples()
    elements = np.empty((N, n, n), dtype=complex)
    pairs = []
    for i_flat, i_vec in enumerate(tuples):
        for a_flat, a_vec in enumerate(tuples):
            g = np.ones((1, 1), dtype=complex)
            for t, m in enumerate(sizes):
                g = np.kron(g, np.linalg.matrix_power(shifts[t], int(i_vec[t]))
                            @ np.linalg.matrix_power(clocks[t], int(a_vec[t])))
            elements[i_flat * n + a_flat] = g
            pairs.append((i_flat, a_flat))

    # componentwise addition on (i, a) pairs of H-tuples
    digits = np.stack([np.concatenate([tuples[k // n], tuples[k % n]]) for k in range(N)])
    mods = np.array(sizes * 2)
    flat = {tuple(d): k for k, d in enumerate(digits)}
    mul = np.empty((N, N), dtype=int)
    inv = np.empty(N, dtype=int)
    for a in range(N):
        inv[a] = flat[tuple((-digits[a]) % mods)]
        summed = (digits[a] + digits) % mods
        mul[a] = [flat[tuple(row)] for row in summed]
    return WeylBasis(sizes, n, N, elements, tuple(pairs), mul, inv)


def extract_cocycle(B: WeylBasis, tol: float = DEFAULT_TOL) -> Cocycle:
    """Read the cocycle off the basis: ``sigma(k, l) = tr(g_{kl}* g_k g_l)``.

    Each product ``g_k g_l`` must be a unit-modulus multiple of ``g_{kl}``;
    a modulus away from 1 means the basis is not projectively closed.
    """
    N, n = B.size, B.n
    prods = np.einsum("aij,bjk->abik", B.elements, B.elements)
    # tr(g_{kl}^* g_k g_l) = sum_{ij} conj(g_{kl}[i, j]) (g_k g_l)[i, j]
    table = np.einsum("abij,abij->ab", B.elements[B.mul].conj(), prods) / n
    if max_abs(np.abs(table) - 1.0) > tol:
        raise InvalidInputError("basis is not projectively closed: |tr(g_kl* g_k g_l)| != 1")
    # identity row and column are exactly 1 by construction; snap the roundoff
    if max_abs(table[0, :] - 1.0) > tol or max_abs(table[:, 0] - 1.0) > tol:
        raise InvalidInputError("cocycle is not normalized at the identity")
    table[0, :] = 1.0
    table[:, 0] = 1.0
    return Cocycle(N, table)


def _as_samples(samples):
    """Normalize sample input to (xs (M, n, n), weights (M,))."""
    if isinstance(samples, np.ndarray):
        xs = samples
        ws = np.full(len(xs), 1.0 / len(xs))
    else:
        pairs = list(samples)
        xs = np.stack([np.asarray(x, dtype=complex) for x, _ in pairs])
        ws = np.array([float(w) for _, w in pairs])
    if abs(float(ws.sum()) - 1.0) > 1e-9 or np.any(ws <= 0):
        raise InvalidInputError("sample weights must be positive and sum to 1")
    return xs, ws


def _check_unitary(xs, n: int, tol: float = 1e-8):
    if xs.shape[1:] != (n, n):
        raise InvalidInputError(f"samples must be {n} x {n} matrices")
    eye = np.eye(n)
    dev = max_abs(np.einsum("zji,zjk->zik", xs.conj(), xs) - eye)
    if dev > tol:
        raise InvalidInputError(f"sample is not unitary (defect {dev:.2e})")


def model_vectors(B: WeylBasis, xs: np.ndarray) -> np.ndarray:
    """Grid vectors ``vec(g_i x g_j*) / sqrt(n)`` for a batch of parameters."""
    conj_els = B.elements.conj().transpose(0, 2, 1)
    gx = np.einsum("aij,zjk->zaik", B.elements, xs)
    V = np.einsum("zaik,bkl->zabil", gx, conj_els)
    return V.reshape(len(xs), B.size, B.size, B.n * B.n) / np.sqrt(B.n)


def weyl_model(B: WeylBasis, samples) -> FlatModel:
    """Flat model ``u_ij -> Proj(g_i x g_j*)`` over the given weighted samples."""
    xs, ws = _as_samples(samples)
    _check_unitary(xs, B.n)
    return FlatModel(B.size, B.n * B.n, ws, model_vectors(B, xs))


def haar_weyl_model(B: WeylBasis, count: int, seed: int) -> FlatModel:
    """Weyl model over ``count`` Haar-distributed parameters."""
    return weyl_model(B, haar_unitaries(B.n, count, seed))


def weyl_t_matrix_mc(B: WeylBasis, p: int, count: int, seed: int,
                     max_side: int = DEFAULT_MAX_SIDE) -> MomentTensor:
    """Monte Carlo ``T_p`` over Haar samples, streamed in chunks.

    Equivalent to ``t_matrix(haar_weyl_model(...))`` but never materializes
    the whole model, so large sample counts stay cheap in memory.
    """

    def chunks():
        done = 0
        while done < count:
            c = min(_CHUNK, count - done)
            xs = haar_unitaries(B.n, c, seed + done)
            yield np.full(c, 1.0 / count), model_vectors(B, xs)
            done += c

    return t_matrix_from_stream(chunks(), B.size, B.n * B.n, p, max_side)


# -- closed-form moment matrices -------------------------------------------------


def _pair_tables(B: WeylBasis):
    """Index tables ``A[a, c] = a^-1 c`` and ``D[b, d] = d^-1 b``."""
    X = B.mul[B.inv[:, None], np.arange(B.size)[None, :]]  # X[a, c] = a^-1 c
    return X, X.T


def cocycle_prefactor(B: WeylBasis, sigma: Cocycle, p: int) -> np.ndarray:
    """The product of conjugated cocycle values attached to a ``T_p`` entry.

    Row chain ``prod_t conj sigma(i_t, i_t^-1 i_{t+1})`` times column chain
    ``prod_t conj sigma(j_{t+1}, j_{t+1}^-1 j_t)``, indices cyclic; returned
    as an ``(N,)*2p`` tensor aligned with the moment-tensor axes.
    """
    N = B.size
    A, D = _pair_tables(B)
    sbar = sigma.table.conj()
    a = np.arange(N)
    Si = sbar[a[:, None], A]  # Si[a, c] = conj sigma(a, a^-1 c)
    Sj = sbar[a[None, :], D]  # Sj[b, d] = conj sigma(d, d^-1 b)
    factor = (Si[:, None, :, None] * Sj[None, :, None, :])[None]  # (1, it, jt, it1, jt1)
    return _chunk_t_from_factors(lambda t: factor, np.ones(1), p, N)


def t_matrix_closed_form(B: WeylBasis, sigma: Cocycle, samples, p: int,
                         max_side: int = DEFAULT_MAX_SIDE) -> MomentTensor:
    """``T_p`` from the cocycle and the scalar traces ``tr(g_a x g_b x*)``.

    Entry ``[(i_1..i_p), (j_1..j_p)]`` is the cocycle prefactor times
    ``(1/N) avg_x prod_t tr(g_{i_t^-1 i_{t+1}} x g_{j_{t+1}^-1 j_t} x*)``
    with all indices cyclic.  Agrees entrywise with the generic moment
    matrix of ``weyl_model`` on identical samples: the two formulas are the
    same algebra organized differently.
    """
    _check_side(B.size, p, max_side)
    N, n = B.size, B.n
    xs, ws = _as_samples(samples)
    _check_unitary(xs, n)
    A, D = _pair_tables(B)
    pref = cocycle_prefactor(B, sigma, p)

    acc = np.zeros((N,) * (2 * p), dtype=complex)
    for lo in range(0, len(xs), _CHUNK):
        x = xs[lo : lo + _CHUNK]
        w = ws[lo : lo + _CHUNK]
        gx = np.einsum("aij,zjk->zaik", B.elements, x)
        gxs = np.einsum("bij,zkj->zbik", B.elements, x.conj())  # g_b x^*
        W = np.einsum("zaik,zbki->zab", gx, gxs) / n  # tr(g_a x g_b x^*)
        Wfac = W[:, A[:, None, :, None], D[None, :, None, :]]  # (z, it, jt, it1, jt1)
        acc = acc + _chunk_t_from_factors(lambda t: Wfac, w, p, N)
    T = pref * acc / N
    return MomentTensor(N, p, T.reshape(N**p, N**p))


def weyl_character_moments(B: WeylBasis, sigma: Cocycle, samples, p_max: int):
    """Character moments ``c_p = sum over j_1..j_p with j_1...j_p = 1 of
    avg_x prod_t tr(g_{j_t} x g_{j_t}* x*)``.

    Returns ``(estimates, stderrs)`` for ``p = 1..p_max``.  The constrained
    sum is evaluated per sample by ``p``-fold group convolution of the trace
    vector, so the cost is ``O(M p N^2)``.  For a transitive model
    ``c_1 = 1`` identically.
    """
    xs, ws = _as_samples(samples)
    _check_unitary(xs, B.n)
    N = B.size
    Minv = B.mul[B.inv[:, None], np.arange(N)[None, :]]  # (a, k) -> a^-1 k

    def eval_chunk(chunk):
        x, w = chunk
        gx = np.einsum("aij,zjk->zaik", B.elements, x)
        gs = np.einsum("aij,zkj->zaik", B.elements.conj().transpose(0, 2, 1), x.conj())
        D = np.einsum("zaik,zaki->za", gx, gs) / B.n  # tr(g_a x g_a^* x^*)
        vals = np.empty((len(x), p_max))
        cur = D
        vals[:, 0] = cur[:, B.identity_index].real
        for p in range(2, p_max + 1):
            cur = np.einsum("za,zak->zk", cur, D[:, Minv])
            vals[:, p - 1] = cur[:, B.identity_index].real
        return w, vals

    chunks = [(xs[lo : lo + _CHUNK], ws[lo : lo + _CHUNK]) for lo in range(0, len(xs), _CHUNK)]
    parts = parallel_map(eval_chunk, chunks)
    w_all = np.concatenate([w for w, _ in parts])
    vals = np.concatenate([v for _, v in parts])
    means = vals.T @ w_all
    stderrs = np.sqrt(((vals - means[None, :]) ** 2).T @ (w_all**2))
    return tuple(float(m) for m in means), tuple(float(s) for s in stderrs)
