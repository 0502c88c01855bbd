"""Shared helpers: independent brute-force oracles the tests check against."""

from itertools import permutations

import numpy as np


def all_permutations(n):
    """Every element of the full symmetric group, as 1-based image tuples."""
    return [tuple(p) for p in permutations(range(1, n + 1))]


def brute_force_haar_average(elements, pairs):
    """Fraction of image tuples sigma with sigma(j) = i for all (i, j) in pairs."""
    hits = sum(1 for s in elements if all(s[j - 1] == i for i, j in pairs))
    return hits / len(elements)


def assert_close(a, b, tol=1e-12):
    dev = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
    assert dev <= tol, f"max deviation {dev:.3e} > {tol:.1e}"
