"""Flat matrix models and their moment analysis.

A flat model is a finite weighted family of "magic bases": ``N x N`` grids
of vectors in ``C^K``, orthogonal along rows and columns, each of norm 0 or
1.  The rank-1 projectors of such a grid form a magic unitary, and the model
functional ``psi = (tr (x) int) pi`` is encoded by the moment matrices

    ``T_p[(i_1..i_p), (j_1..j_p)] = avg_x (1/K) <xi_{i1 j1}, xi_{i2 j2}> ... <xi_{ip jp}, xi_{i1 j1}>``

whose matrix powers give convolution powers of ``psi``.  Stationarity is
idempotency ``T_p^2 = T_p``; Cesaro averages of powers estimate Haar
integrals; diagonal sums give character moments.  Classical permutation
groups enter through Latin-square models, regular models, and ``K = 1``
permutation-grid models, all of which are cross-checked against exact group
enumeration in the tests.

Tuple indices are always flattened row-major with the first index most
significant; this one convention is shared with the Hadamard and Weyl
modules.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import permgroup as pg
from .errors import CapExceededError, CheckFailedError, InvalidInputError
from .hadamard import MagicBasis
from .linalg import DEFAULT_TOL, max_abs, parallel_map

#: Largest admissible side N^p of a moment matrix.
DEFAULT_MAX_SIDE = 4096

#: Target cell count for one batched chunk of point evaluations.
_CHUNK_CELLS = 1 << 22


@dataclass(frozen=True)
class MagicUnitary:
    """An ``N x N`` grid of ``K x K`` projections with all row and column sums
    equal to the identity."""

    size: int
    dim: int
    grid: np.ndarray  # shape (N, N, K, K)

    def __post_init__(self):
        if self.grid.shape != (self.size, self.size, self.dim, self.dim):
            raise ValueError("grid must have shape (N, N, K, K)")


@dataclass(frozen=True)
class FlatModel:
    """Weighted sample of magic bases; points are stacked along axis 0."""

    size: int
    dim: int
    weights: np.ndarray  # shape (P,)
    vectors: np.ndarray  # shape (P, N, N, K)

    def __post_init__(self):
        P = self.weights.shape[0]
        if self.vectors.shape != (P, self.size, self.size, self.dim):
            raise ValueError("vectors must have shape (P, N, N, K)")

    @property
    def n_points(self) -> int:
        return self.weights.shape[0]

    def points(self):
        """Iterate ``(weight, vectors)`` pairs."""
        for w, v in zip(self.weights, self.vectors):
            yield float(w), v

    def point_basis(self, index: int) -> MagicBasis:
        return MagicBasis(self.size, self.dim, self.vectors[index])


@dataclass(frozen=True)
class MomentTensor:
    """The ``N^p x N^p`` moment matrix ``T_p`` of a model."""

    size: int
    order: int
    matrix: np.ndarray

    def __post_init__(self):
        side = self.size**self.order
        if self.matrix.shape != (side, side):
            raise ValueError("matrix side must be N^p")


@dataclass(frozen=True)
class CharacterLaw:
    """Moments of the normalized character under a convolution power.

    ``moments[p-1]`` is the estimate of the ``p``-th moment of ``chi / N``
    under ``psi^{*r}``; ``stderrs`` carries Monte Carlo standard errors when
    they are meaningful (single-convolution order over sampled points),
    otherwise ``None``.  When the tensor-product cross-check ran,
    ``gram_moments`` holds the independent Gram-matrix evaluation and
    ``cross_check_deviation`` the worst disagreement.
    """

    r: int
    moments: tuple[float, ...]
    stderrs: tuple
    gram_moments: tuple[float, ...] | None = None
    cross_check_deviation: float | None = None


def flat_model(points, size: int | None = None, dim: int | None = None) -> FlatModel:
    """Assemble a model from ``(weight, vectors)`` pairs."""
    points = list(points)
    if not points:
        raise ValueError("a model needs at least one point")
    ws = np.array([float(w) for w, _ in points])
    vs = np.stack([np.asarray(v, dtype=complex) for _, v in points])
    n, k = vs.shape[1], vs.shape[3]
    return FlatModel(size or n, dim or k, ws, vs)


def single_point_model(vectors) -> FlatModel:
    vectors = np.asarray(vectors, dtype=complex)
    return FlatModel(vectors.shape[0], vectors.shape[2], np.array([1.0]), vectors[None])


def model_from_basis(basis: MagicBasis) -> FlatModel:
    return single_point_model(basis.vectors)


def magic_unitary_from_vectors(vectors) -> MagicUnitary:
    """Rank-1 projector grid ``P_ij = xi_ij xi_ij*`` of a magic basis."""
    V = np.asarray(vectors, dtype=complex)
    grid = np.einsum("ijk,ijl->ijkl", V, V.conj())
    return MagicUnitary(V.shape[0], V.shape[2], grid)


# -- validation ----------------------------------------------------------------


@dataclass(frozen=True)
class MagicDiagnostics:
    size: int
    dim: int
    worst_projection_defect: float
    worst_row_sum_defect: float
    worst_col_sum_defect: float
    tol: float

    @property
    def passed(self) -> bool:
        return (
            self.worst_projection_defect <= self.tol
            and self.worst_row_sum_defect <= self.tol
            and self.worst_col_sum_defect <= self.tol
        )


def validate_magic(M: MagicUnitary, tol: float = DEFAULT_TOL) -> MagicDiagnostics:
    """Worst projection defect and worst row/column-sum defect of a grid."""
    G = M.grid
    eye = np.eye(M.dim)
    proj_defect = max(
        max_abs(np.einsum("ijkl,ijlm->ijkm", G, G) - G),
        max_abs(G - G.conj().transpose(0, 1, 3, 2)),
    )
    row_defect = max_abs(G.sum(axis=1) - eye)
    col_defect = max_abs(G.sum(axis=0) - eye)
    return MagicDiagnostics(M.size, M.dim, proj_defect, row_defect, col_defect, tol)


def validate_model(model: FlatModel, tol: float = DEFAULT_TOL) -> MagicDiagnostics:
    """Magic diagnostics over all points at once, computed at the vector level.

    Vector norms must all be 0 or 1 within ``tol`` (this makes every grid
    entry a projection), and the row/column projector sums must equal the
    identity.  Weights must be positive and sum to 1.
    """
    w, V = model.weights, model.vectors
    if np.any(w <= 0) or abs(float(w.sum()) - 1.0) > tol:
        raise InvalidInputError("point weights must be positive and sum to 1")
    norms = np.linalg.norm(V, axis=3)
    norm_defect = float(np.max(np.minimum(norms, np.abs(norms - 1.0))))
    eye = np.eye(model.dim)
    rows = np.einsum("pijk,pijl->pikl", V, V.conj()) - eye
    cols = np.einsum("pijk,pijl->pjkl", V, V.conj()) - eye
    return MagicDiagnostics(
        model.size, model.dim, norm_defect, max_abs(rows), max_abs(cols), tol
    )


@dataclass(frozen=True)
class FlatnessReport:
    verdict: str  # "flat" | "quasi-flat" | "neither"
    ranks: np.ndarray


def flatness(M: MagicUnitary) -> FlatnessReport:
    """Classify a grid by the numerical ranks of its entries.

    Ranks count eigenvalues of the Hermitian part above 1/2, which is the
    robust threshold for near-projections.  All ranks 1 means flat; ranks in
    {0, 1} with a zero present means quasi-flat; anything else is neither.
    """
    H = (M.grid + M.grid.conj().transpose(0, 1, 3, 2)) / 2.0
    evals = np.linalg.eigvalsh(H)
    ranks = (evals > 0.5).sum(axis=-1)
    return FlatnessReport(_rank_verdict(ranks), ranks)


def model_flatness(model: FlatModel) -> FlatnessReport:
    """Flatness across every point of a model (stacked rank table)."""
    ranks = np.stack([flatness(magic_unitary_from_vectors(v)).ranks for v in model.vectors])
    return FlatnessReport(_rank_verdict(ranks), ranks)


def _rank_verdict(ranks: np.ndarray) -> str:
    if np.all(ranks == 1):
        return "flat"
    if np.all(ranks <= 1):
        return "quasi-flat"
    return "neither"


# -- moment matrices -----------------------------------------------------------


def _check_side(n: int, p: int, max_side: int):
    if p < 1:
        raise ValueError("order p must be >= 1")
    if n**p > max_side:
        raise CapExceededError(f"moment matrix side {n}**{p} exceeds cap {max_side}")


def _chunk_t_from_factors(factors, w, p: int, n: int) -> np.ndarray:
    """Weighted cyclic product of per-point factor tensors.

    Each factor has shape ``(c, n, n, n, n)`` with axes ``(point, i_t, j_t,
    i_{t+1}, j_{t+1})``; the result is the ``(n,)*2p`` tensor
    ``sum_z w_z prod_t F[z, i_t, j_t, i_t+1, j_t+1]``.
    """
    if p == 1:
        diag = np.einsum("zabab->zab", factors(0))
        return np.tensordot(w, diag, axes=(0, 0))
    prod = None
    for t in range(p):
        tpos = [0, 1 + t, 1 + p + t, 1 + (t + 1) % p, 1 + p + (t + 1) % p]
        order = np.argsort(tpos)
        F = factors(t).transpose(tuple(order))
        shape = [1] * (1 + 2 * p)
        for ax, pos in enumerate(sorted(tpos)):
            shape[pos] = F.shape[ax]
        F = F.reshape(shape)
        prod = F if prod is None else prod * F
    return np.tensordot(w, prod, axes=(0, 0))


def t_matrix_from_stream(chunks, size: int, dim: int, p: int,
                         max_side: int = DEFAULT_MAX_SIDE) -> MomentTensor:
    """Accumulate ``T_p`` from a stream of ``(weights, vectors)`` chunks.

    Each chunk carries vectors of shape ``(c, N, N, K)``; the Gram matrices
    of the flattened grids are formed per chunk and multiplied cyclically, so
    memory stays bounded regardless of the total number of points.  The
    stream's weights must sum to 1 overall.
    """
    _check_side(size, p, max_side)
    n = size
    acc = np.zeros((n,) * (2 * p), dtype=complex)

    def eval_chunk(chunk):
        w, V = chunk
        V = V.reshape(V.shape[0], n * n, dim)
        G = np.einsum("zak,zbk->zab", V.conj(), V)
        Gr = G.reshape(V.shape[0], n, n, n, n)
        return _chunk_t_from_factors(lambda t: Gr, np.asarray(w, dtype=float), p, n)

    for part in parallel_map(eval_chunk, chunks):
        acc = acc + part
    return MomentTensor(n, p, acc.reshape(n**p, n**p) / dim)


def _model_chunks(model: FlatModel, p: int):
    cells = max(1, model.size ** (2 * p))
    step = max(1, _CHUNK_CELLS // cells)
    for lo in range(0, model.n_points, step):
        yield model.weights[lo : lo + step], model.vectors[lo : lo + step]


def t_matrix(model: FlatModel, p: int, max_side: int = DEFAULT_MAX_SIDE) -> MomentTensor:
    """Moment matrix ``T_p`` of a model, via the rank-1 inner-product form."""
    return t_matrix_from_stream(_model_chunks(model, p), model.size, model.dim, p, max_side)


@dataclass(frozen=True)
class StationarityReport:
    p_max: int
    tol: float
    defects: tuple[float, ...]

    @property
    def stationary(self) -> bool:
        """Stationary on the image, up to ``tol``, up to order ``p_max``."""
        return all(d <= self.tol for d in self.defects)


def stationarity_test(model: FlatModel, p_max: int, tol: float = DEFAULT_TOL,
                      max_side: int = DEFAULT_MAX_SIDE) -> StationarityReport:
    """Idempotency defects ``max |T_p^2 - T_p|`` for ``p = 1..p_max``."""
    defects = []
    for p in range(1, p_max + 1):
        T = t_matrix(model, p, max_side).matrix
        defects.append(max_abs(T @ T - T))
    return StationarityReport(p_max, tol, tuple(defects))


@dataclass(frozen=True)
class CesaroResult:
    order: int
    averages: list  # MomentTensor per k
    diffs: tuple[float, ...]  # successive-average distances
    stopped_early: bool

    @property
    def last(self) -> MomentTensor:
        return self.averages[-1]


def cesaro_moments(model: FlatModel, p: int, r_max: int, tol: float = DEFAULT_TOL,
                   max_side: int = DEFAULT_MAX_SIDE) -> CesaroResult:
    """Cesaro averages ``(1/k) sum_{r<=k} T_p^r`` for ``k <= r_max``.

    Iteration stops once successive averages differ by less than ``tol/10``
    (the convergence rate is not known in general, so the diagnostic is
    reported rather than assumed); for stationary models every average
    equals ``T_p``.
    """
    T = t_matrix(model, p, max_side).matrix
    power = T.copy()
    cesaro = T.copy()
    averages = [MomentTensor(model.size, p, cesaro.copy())]
    diffs = []
    stopped = False
    for k in range(2, r_max + 1):
        power = power @ T
        cesaro = cesaro * ((k - 1) / k) + power / k
        diffs.append(max_abs(cesaro - averages[-1].matrix))
        averages.append(MomentTensor(model.size, p, cesaro.copy()))
        if diffs[-1] < tol / 10.0:
            stopped = True
            break
    return CesaroResult(p, averages, tuple(diffs), stopped)


def transitivity_estimate(model: FlatModel, r_max: int = 64, tol: float = DEFAULT_TOL):
    """Cesaro estimate of ``int u_ij``; transitive iff all entries are 1/N."""
    res = cesaro_moments(model, 1, r_max, tol)
    estimates = res.last.matrix.real
    deviation = max_abs(estimates - 1.0 / model.size)
    return {
        "estimates": estimates,
        "deviation": deviation,
        "transitive": bool(deviation <= tol),
        "cesaro_diffs": res.diffs,
    }


# -- character laws --------------------------------------------------------------


def character_law(model: FlatModel, r: int, p_max: int,
                  max_side: int = DEFAULT_MAX_SIDE,
                  cross_check_cap: int = 4096) -> CharacterLaw:
    """Moments of ``chi / N`` under ``psi^{*r}``.

    The primary path sums the diagonal of ``T_p^r`` and scales by ``N^-p``.
    When the product parameter space is small enough, the same moments are
    recomputed from the Gram matrices of the cyclic tensor vectors
    ``xi_{i_1 i_2} (x) ... (x) xi_{i_r i_1} / sqrt(K)`` and the worst
    disagreement is reported; the two routes are independent implementations
    of one law.
    """
    if r < 1:
        raise ValueError("convolution order r must be >= 1")
    n = model.size
    moments, stderrs = [], []
    for p in range(1, p_max + 1):
        T = t_matrix(model, p, max_side).matrix
        Tr = np.linalg.matrix_power(T, r)
        moments.append(float(np.trace(Tr).real) / n**p)
        stderrs.append(_diag_stderr(model, p) if r == 1 else None)

    gram_moments = None
    deviation = None
    if model.dim**r <= cross_check_cap and model.n_points**r <= cross_check_cap and n**r <= cross_check_cap:
        gram_moments = _gram_character_moments(model, r, p_max)
        deviation = max(abs(a - b) for a, b in zip(moments, gram_moments))
    return CharacterLaw(r, tuple(moments), tuple(stderrs), gram_moments, deviation)


def _diag_stderr(model: FlatModel, p: int):
    """Standard error of the diagonal moment over the point sample (r = 1)."""
    n, K = model.size, model.dim
    V = model.vectors.reshape(model.n_points, n * n, K)
    G = np.einsum("zak,zbk->zab", V.conj(), V).reshape(model.n_points, n, n, n, n)
    d = np.einsum("zaabb->zab", G)
    m = d.copy()
    for _ in range(p - 1):
        m = np.einsum("zab,zbc->zac", m, d)
    s = np.einsum("zaa->z", m).real / (K * n**p)
    w = model.weights
    mean = float(np.dot(w, s))
    return float(np.sqrt(np.dot(w**2, (s - mean) ** 2)))


def _gram_character_moments(model: FlatModel, r: int, p_max: int) -> tuple[float, ...]:
    """Character moments via Gram matrices of r-fold cyclic tensor vectors."""
    n, K = model.size, model.dim
    out = np.zeros(p_max)
    point_pairs = list(model.points())
    for combo in np.ndindex(*(len(point_pairs),) * r):
        weight = 1.0
        vecs = []
        for idx in combo:
            weight *= point_pairs[idx][0]
        for tup in np.ndindex(*(n,) * r):
            v = np.ones(1, dtype=complex)
            for a in range(r):
                xi = point_pairs[combo[a]][1][tup[a], tup[(a + 1) % r]]
                v = np.kron(v, xi)
            vecs.append(v / np.sqrt(K))
        V = np.stack(vecs)
        G = V.conj() @ V.T
        Gp = np.eye(G.shape[0], dtype=complex)
        for p in range(1, p_max + 1):
            Gp = Gp @ G
            out[p - 1] += weight * float(np.trace(Gp).real) / K**r
    return tuple(float(x) for x in out)


# -- orbits, orbitals, double transitivity ---------------------------------------


@dataclass(frozen=True)
class OrbitReport:
    k: int
    relation: np.ndarray  # boolean (N^k, N^k)
    classes: list | None  # tuples of 1-based k-tuples, None if not transitive
    is_equivalence: bool
    support_tol: float


def orbit_relations(obj, k: int, support_tol: float = 10 * DEFAULT_TOL) -> OrbitReport:
    """Orbit (k=1), orbital (k=2) or triple (k=3) relation of a model or grid.

    Tuples are related when the corresponding product of magic entries has
    sup norm above ``support_tol`` at some point of the model.  For k <= 2
    reflexivity, symmetry and transitivity are asserted (a violation raises
    ``CheckFailedError``: the support detection broke down); for k = 3
    transitivity is only reported, and classes are returned just when the
    relation happens to be transitive.
    """
    if k not in (1, 2, 3):
        raise ValueError("k must be 1, 2 or 3")
    if isinstance(obj, FlatModel):
        strength = _support_strength_model(obj, k)
        n = obj.size
    elif isinstance(obj, MagicUnitary):
        strength = _support_strength_grid(obj, k)
        n = obj.size
    else:
        raise TypeError("expected a FlatModel or MagicUnitary")
    rel = strength > support_tol

    reflexive = bool(np.all(np.diag(rel)))
    symmetric = bool(np.all(rel == rel.T))
    closed = not np.any((rel @ rel) & ~rel)
    is_eq = reflexive and symmetric and closed
    if k <= 2 and not is_eq:
        raise CheckFailedError(
            f"orbit relation at k={k} is not an equivalence "
            f"(reflexive={reflexive}, symmetric={symmetric}, transitive={closed})"
        )
    classes = _relation_classes(rel, n, k) if is_eq else None
    return OrbitReport(k, rel, classes, is_eq, support_tol)


def _support_strength_model(model: FlatModel, k: int) -> np.ndarray:
    n, K = model.size, model.dim
    V = model.vectors.reshape(model.n_points, n * n, K)
    amax = np.abs(V).max(axis=2)  # sup norm of each vector
    if k == 1:
        s = (amax**2).max(axis=0)
        return s.reshape(n, n)
    G = np.abs(np.einsum("zak,zbk->zab", V.conj(), V))
    if k == 2:
        s = (G * amax[:, :, None] * amax[:, None, :]).max(axis=0)
        M = s.reshape(n, n, n, n)  # axes (i1, j1, i2, j2)
        return M.transpose(0, 2, 1, 3).reshape(n * n, n * n)
    s = np.einsum("zab,zbc->zabc", G, G)
    s = (s * amax[:, :, None, None] * amax[:, None, None, :]).max(axis=0)
    M = s.reshape(n, n, n, n, n, n)  # axes (i1, j1, i2, j2, i3, j3)
    return M.transpose(0, 2, 4, 1, 3, 5).reshape(n**3, n**3)


def _support_strength_grid(M: MagicUnitary, k: int) -> np.ndarray:
    n = M.size
    G = M.grid.reshape(n * n, M.dim, M.dim)
    if k == 1:
        return np.abs(G).max(axis=(1, 2)).reshape(n, n)
    prod2 = np.einsum("akl,blm->abkm", G, G)
    if k == 2:
        s = np.abs(prod2).max(axis=(2, 3)).reshape(n, n, n, n)
        return s.transpose(0, 2, 1, 3).reshape(n * n, n * n)
    prod3 = np.einsum("abkl,clm->abckm", prod2, G)
    s = np.abs(prod3).max(axis=(3, 4)).reshape(n, n, n, n, n, n)
    return s.transpose(0, 2, 4, 1, 3, 5).reshape(n**3, n**3)


def _relation_classes(rel: np.ndarray, n: int, k: int) -> list:
    classes, seen = [], set()
    for a in range(rel.shape[0]):
        if a in seen:
            continue
        members = np.flatnonzero(rel[a])
        seen.update(int(m) for m in members)
        classes.append(
            tuple(tuple(int(t) + 1 for t in np.unravel_index(int(m), (n,) * k)) for m in members)
        )
    return classes


def _double_transitivity_table(n: int, i, j, kk, ll) -> float:
    if i == kk and j == ll:
        return 1.0 / n
    if i == kk or j == ll:
        return 0.0
    return 1.0 / (n * (n - 1))


@dataclass(frozen=True)
class DoubleTransitivityReport:
    doubly_flat: bool
    doubly_flat_deviation: float
    doubly_transitive: bool
    doubly_transitive_deviation: float
    estimates: np.ndarray  # (N, N, N, N) Cesaro estimates of int u_ij u_kl
    tol: float


def double_transitivity_test(model: FlatModel, r_max: int = 64,
                             tol: float = DEFAULT_TOL) -> DoubleTransitivityReport:
    """Check the doubly-transitive integral table two ways.

    Doubly flat: ``tr(P_ij P_kl)`` matches the table at every single point.
    Doubly transitive: the Cesaro limit of ``T_2`` powers matches the table.
    Double flatness of the model implies double transitivity of the
    underlying quantum permutation group; the converse is not asserted.
    """
    n, K = model.size, model.dim
    table = np.fromfunction(
        np.vectorize(lambda i, j, kk, ll: _double_transitivity_table(n, i, j, kk, ll)),
        (n, n, n, n),
    )
    V = model.vectors.reshape(model.n_points, n * n, K)
    G = np.abs(np.einsum("zak,zbk->zab", V.conj(), V)) ** 2 / K
    pointwise = G.reshape(model.n_points, n, n, n, n)  # (z, i, j, k, l)
    flat_dev = max_abs(pointwise - table[None])

    res = cesaro_moments(model, 2, r_max, tol)
    est = res.last.matrix.real.reshape(n, n, n, n).transpose(0, 2, 1, 3)  # (i, j, k, l)
    trans_dev = max_abs(est - table)
    return DoubleTransitivityReport(
        bool(flat_dev <= tol), flat_dev, bool(trans_dev <= tol), trans_dev, est, tol
    )


# -- classical constructions -----------------------------------------------------


def latin_square_model(G: pg.PermGroup, L: pg.LatinSquare, frame) -> FlatModel:
    """Single-point flat model of a classical group from a Latin square.

    The rows of ``L`` must be elements of ``G`` (checked; the offending row
    is named otherwise) and then automatically form a Latin-square tuple:
    their columns evaluate to distinct values.  Entry ``(i, j)`` of the model
    is the projection onto frame vector number ``t`` where row ``t`` of ``L``
    maps ``j`` to ``i``.  ``frame`` is a unitary matrix whose columns are the
    frame; column orthonormality is what makes the grid magic.
    """
    n = G.degree
    if L.order != n:
        raise InvalidInputError("Latin square order must match the group degree")
    U = np.asarray(frame, dtype=complex)
    if U.shape != (n, n) or max_abs(U.conj().T @ U - np.eye(n)) > 1e-8:
        raise InvalidInputError("frame must be an N x N unitary matrix")
    members = set(G.elements)
    for t, row in enumerate(L.rows_as_permutations(), start=1):
        if row not in members:
            raise InvalidInputError(f"row {t} of the Latin square is not an element of the group")
    tidx = np.empty((n, n), dtype=int)
    for t, row in enumerate(L.entries):
        for j, i in enumerate(row):
            tidx[i - 1, j] = t
    vectors = U.T[tidx]  # (N, N, K): frame column t at grid position (i, j)
    return single_point_model(vectors)


def universal_classical_model(G: pg.PermGroup, frames, tuple_cap: int = 10000) -> FlatModel:
    """Mixture over every Latin-square tuple of ``G`` and the given frames.

    This is the full classical flat model space of ``G`` with its natural
    measure (uniform over tuples, the supplied sample standing in for the
    frame manifold); it is stationary whenever the tuple set is nonempty.
    """
    tuples = pg.enumerate_L_G(G, tuple_cap)
    if not tuples:
        raise InvalidInputError("the group admits no Latin-square tuple")
    if len(tuples) == tuple_cap:
        raise CapExceededError(f"more than {tuple_cap} Latin-square tuples")
    frames = list(frames)
    points = []
    w = 1.0 / (len(tuples) * len(frames))
    for tup in tuples:
        L = pg.LatinSquare.from_rows(tup)
        for U in frames:
            points.append((w, latin_square_model(G, L, U).vectors[0]))
    return flat_model(points)


def regular_model(G: pg.PermGroup) -> FlatModel:
    """Single-point flat model of a group acting on itself by translation.

    Requires a regular action: degree ``|G|``, transitive, every non-identity
    element fixed-point free.  Entry ``(i, j)`` projects onto the standard
    basis vector indexed by the unique element mapping ``j`` to ``i``; the
    resulting model is stationary exactly.
    """
    n = G.degree
    if n != G.order:
        raise InvalidInputError(f"regular action needs degree = |G| ({G.order}), got {n}")
    if not pg.is_transitive(G):
        raise InvalidInputError("regular action must be transitive")
    if any(s.fixed_points() for s in G.elements if s != pg.identity(n)):
        raise InvalidInputError("action is not regular: a non-identity element has fixed points")
    L = pg.LatinSquare.from_rows(G.elements)
    return latin_square_model(G, L, np.eye(n))


def classical_model(G: pg.PermGroup) -> FlatModel:
    """``K = 1`` permutation-grid model: one point per group element.

    Entry ``(i, j)`` at the point of ``sigma`` is 1 when ``sigma(j) = i``.
    Quasi-flat (not flat unless N = 1); its moment matrices reproduce exact
    group averages.
    """
    n = G.degree
    P = G.order
    vectors = np.zeros((P, n, n, 1), dtype=complex)
    for z, s in enumerate(G.elements):
        for j in range(1, n + 1):
            vectors[z, s(j) - 1, j - 1, 0] = 1.0
    weights = np.full(P, 1.0 / P)
    return FlatModel(n, 1, weights, vectors)


# -- combinations ----------------------------------------------------------------


def tensor_model(A: FlatModel, B: FlatModel) -> FlatModel:
    """Tensor product model on product samples: sizes and dims multiply,
    weights multiply, vectors are Kronecker products (left factor most
    significant).  Flat x flat stays flat; stationary x stationary stays
    stationary."""
    weights = np.outer(A.weights, B.weights).reshape(-1)
    vectors = np.einsum("pijk,qabl->pqiajbkl", A.vectors, B.vectors).reshape(
        A.n_points * B.n_points,
        A.size * B.size,
        A.size * B.size,
        A.dim * B.dim,
    )
    return FlatModel(A.size * B.size, A.dim * B.dim, weights, vectors)


def direct_sum_model(A: FlatModel, B: FlatModel) -> FlatModel:
    """Block-diagonal sum over a common fiber ``C^K``: grid entries of ``A``
    and ``B`` occupy the diagonal blocks, off-blocks are zero vectors.

    Row and column sums stay the identity because each block's grid is
    already magic on the shared fiber.  The result is quasi-flat (zero
    entries) and non-transitive, with one orbit per summand.
    """
    if A.dim != B.dim:
        raise InvalidInputError("direct sum needs a common fiber dimension K")
    n, k = A.size + B.size, A.dim
    P = A.n_points * B.n_points
    vectors = np.zeros((P, n, n, k), dtype=complex)
    vectors[:, : A.size, : A.size] = np.repeat(A.vectors, B.n_points, axis=0)
    vectors[:, A.size :, A.size :] = np.tile(B.vectors, (A.n_points, 1, 1, 1))
    weights = np.outer(A.weights, B.weights).reshape(-1)
    return FlatModel(n, k, weights, vectors)


def mixture(models, weights=None) -> FlatModel:
    """Convex combination of models over one size and dimension."""
    models = list(models)
    n, k = models[0].size, models[0].dim
    if any(m.size != n or m.dim != k for m in models):
        raise ValueError("mixture components must share size and dim")
    if weights is None:
        weights = [1.0 / len(models)] * len(models)
    ws = np.concatenate([w * m.weights for w, m in zip(weights, models)])
    vs = np.concatenate([m.vectors for m in models])
    return FlatModel(n, k, ws, vs)


# -- file format -----------------------------------------------------------------
#
# {"size": N, "dim": K, "points": [{"weight": w, "vectors": [[[re, im], ...], ...]}]}
# where "vectors" lists the N*N grid vectors row-major, each as K [re, im]
# pairs.


def model_to_json_dict(model: FlatModel) -> dict:
    points = []
    for w, V in model.points():
        flat = V.reshape(model.size * model.size, model.dim)
        points.append(
            {
                "weight": w,
                "vectors": [[[float(z.real), float(z.imag)] for z in vec] for vec in flat],
            }
        )
    return {"size": model.size, "dim": model.dim, "points": points}


def model_from_json_dict(d: dict) -> FlatModel:
    try:
        n, k = int(d["size"]), int(d["dim"])
        points = []
        for pt in d["points"]:
            vecs = np.array(
                [[complex(re, im) for re, im in vec] for vec in pt["vectors"]], dtype=complex
            )
            points.append((float(pt["weight"]), vecs.reshape(n, n, k)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed model object: {exc}") from exc
    return flat_model(points, n, k)


def save_model(path, model: FlatModel) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_json_dict(model), fh)
        fh.write("\n")


def load_model(path) -> FlatModel:
    with open(path) as fh:
        return model_from_json_dict(json.load(fh))
