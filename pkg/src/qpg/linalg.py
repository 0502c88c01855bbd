"""Dense complex linear algebra substrate.

Matrices are plain ``numpy`` arrays of ``complex128``; a "unit vector" is a
1-d array whose norm is either 0 or 1 up to tolerance.  Everything here is
pure and allocation-only, so it is safe to call from worker threads; random
sampling takes an explicit integer seed and owns its generator.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

#: Default tolerance for algebraically exact constructions (roundoff only).
DEFAULT_TOL = 1e-9


def mc_tolerance(samples: int) -> float:
    """Tolerance ``5 / sqrt(M)`` for a Monte Carlo figure based on M samples."""
    return 5.0 / np.sqrt(samples)


def max_abs(a) -> float:
    """Largest entrywise modulus, as a float; 0.0 for empty input."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def almost_equal(a, b, tol: float = DEFAULT_TOL) -> bool:
    """Entrywise comparison: max modulus of the difference at most ``tol``."""
    return max_abs(np.asarray(a) - np.asarray(b)) <= tol


def norm_class(v, tol: float = DEFAULT_TOL) -> str:
    """Classify a vector as ``"zero"`` or ``"unit"``; anything else raises."""
    v = np.asarray(v)
    n = float(np.linalg.norm(v))
    if n <= tol:
        return "zero"
    if abs(n - 1.0) <= tol:
        return "unit"
    raise ValueError(f"vector norm {n} is neither 0 nor 1 within {tol}")


def proj(v, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Rank-1 orthogonal projector onto the span of ``v``.

    Returns ``v v* / |v|^2`` for a unit vector and the zero matrix for a zero
    vector; other norms are rejected.
    """
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("proj expects a nonempty 1-d vector")
    if norm_class(v, tol) == "zero":
        return np.zeros((v.size, v.size), dtype=complex)
    return np.outer(v, v.conj()) / float(np.vdot(v, v).real)


def is_projection(P, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``P^2 = P = P*`` entrywise within ``tol``."""
    P = np.asarray(P, dtype=complex)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("is_projection expects a square matrix")
    return max_abs(P @ P - P) <= tol and max_abs(P - P.conj().T) <= tol


def gram(vectors) -> np.ndarray:
    """Gram matrix ``G[a, b] = <v_a, v_b>``, linear in the second argument."""
    vs = [np.asarray(v, dtype=complex) for v in vectors]
    if not vs:
        return np.zeros((0, 0), dtype=complex)
    dim = vs[0].size
    if any(v.size != dim for v in vs):
        raise ValueError("gram requires vectors of a common dimension")
    V = np.stack(vs)
    return V.conj() @ V.T


def haar_unitary(n: int, rng_seed: int) -> np.ndarray:
    """One Haar-distributed ``n x n`` unitary, reproducible from the seed.

    Samples a complex Ginibre matrix, takes its QR decomposition and fixes
    the phase ambiguity by rescaling the columns with the phases of
    ``diag(R)``.  The result is exactly Haar distributed.
    """
    return haar_unitaries(n, 1, rng_seed)[0]


def haar_unitaries(n: int, count: int, rng_seed: int) -> np.ndarray:
    """``count`` independent Haar unitaries from one seeded stream, shape (count, n, n)."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    rng = np.random.default_rng(rng_seed)
    z = (rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n)))
    z /= np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.einsum("mii->mi", r)
    q *= (d / np.abs(d))[:, None, :]
    return q


def thread_count() -> int:
    """Worker cap from ``QPG_THREADS`` (default 1, i.e. serial)."""
    raw = os.environ.get("QPG_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Map preserving order, threaded when ``QPG_THREADS`` allows it.

    The reduction order seen by the caller is the input order regardless of
    the worker count, so weighted sums built from the result are
    reproducible.
    """
    workers = thread_count()
    items = list(items)
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- JSON matrix format ------------------------------------------------------
#
# {"rows": n, "cols": m, "entries": [[re, im], ...]} with entries row-major.
# Every module that reads or writes matrices uses this format.


def matrix_to_json_dict(M) -> dict:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    flat = M.reshape(-1)
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json_dict(d: dict) -> np.ndarray:
    try:
        rows, cols = int(d["rows"]), int(d["cols"])
        entries = d["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    if len(entries) != rows * cols:
        raise ValueError(f"matrix claims {rows}x{cols} but carries {len(entries)} entries")
    flat = np.array([complex(re, im) for re, im in entries], dtype=complex)
    return flat.reshape(rows, cols)


def save_matrix(path, M, extra: dict | None = None) -> None:
    d = matrix_to_json_dict(M)
    if extra:
        d.update(extra)
    with open(path, "w") as fh:
        json.dump(d, fh, indent=2)
        fh.write("\n")


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_json_dict(json.load(fh))
