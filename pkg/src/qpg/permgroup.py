"""Finite permutation groups on ``{1..N}``.

Provides closure from generators, orbit/transitivity analysis, derangement
combinatorics (transitivity level, strongest-transitivity certificates,
Latin-square tuples, deranging subgroups), the ``PGL_2(p)`` family acting on
the projective line, and exact character spectral measures over rationals.

Everything here is exact: permutations are tuples in one-line notation with
values ``1..N``, and measures are ``fractions.Fraction`` weighted.  The
algorithms are designed for desk-scale groups (orders up to a few hundred,
degrees up to about 8 for the exact searches).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .errors import GroupTooLargeError, InvalidInputError

#: Hard ceiling on the number of elements a closure may produce.
CLOSURE_CAP = 10**6


@dataclass(frozen=True)
class Permutation:
    """A permutation of ``{1..N}`` in one-line notation: ``images[i-1] = sigma(i)``."""

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {self.images}")

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition ``(a*b)(i) = a(b(i))``."""
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        return Permutation(tuple(self.images[j - 1] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, j in enumerate(self.images, start=1):
            inv[j - 1] = i
        return Permutation(tuple(inv))

    def fixed_points(self) -> tuple[int, ...]:
        return tuple(i for i, j in enumerate(self.images, start=1) if i == j)

    def is_derangement(self) -> bool:
        return not self.fixed_points()

    def order(self) -> int:
        n = 1
        for c in self.cycles():
            n = n * len(c) // gcd(n, len(c))
        return n

    def cycles(self) -> tuple[tuple[int, ...], ...]:
        seen, out = set(), []
        for start in range(1, self.degree + 1):
            if start in seen:
                continue
            cyc, i = [], start
            while i not in seen:
                seen.add(i)
                cyc.append(i)
                i = self(i)
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return tuple(out)


def identity(degree: int) -> Permutation:
    return Permutation(tuple(range(1, degree + 1)))


@dataclass(frozen=True)
class PermGroup:
    """A permutation group given by its full, canonically sorted element list."""

    degree: int
    elements: tuple[Permutation, ...]
    generators: tuple[Permutation, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, sigma: Permutation) -> bool:
        return sigma.degree == self.degree and sigma in set(self.elements)

    def index_of(self, sigma: Permutation) -> int:
        """Position of ``sigma`` in the canonical element list (0-based)."""
        return self.elements.index(sigma)


def closure(generators, degree: int | None = None, cap: int = CLOSURE_CAP) -> PermGroup:
    """Group generated by ``generators``, elements sorted canonically.

    ``generators`` may be ``Permutation`` objects or raw image tuples.  An
    empty generator list needs an explicit ``degree`` and yields the trivial
    group.  Exceeding ``cap`` elements raises ``GroupTooLargeError``.
    """
    gens = [g if isinstance(g, Permutation) else Permutation(tuple(g)) for g in generators]
    if not gens:
        if degree is None:
            raise ValueError("empty generator list needs an explicit degree")
        return PermGroup(degree, (identity(degree),), ())
    n = gens[0].degree
    if degree is not None and degree != n:
        raise ValueError("degree disagrees with generators")
    if any(g.degree != n for g in gens):
        raise ValueError("generators must share one degree")

    seen = {identity(n).images}
    frontier = [identity(n).images]
    while frontier:
        new = []
        for h in frontier:
            for g in gens:
                prod = tuple(g.images[j - 1] for j in h)
                if prod not in seen:
                    seen.add(prod)
                    new.append(prod)
                    if len(seen) > cap:
                        raise GroupTooLargeError(f"group closure exceeded cap of {cap} elements")
        frontier = new
    elements = tuple(Permutation(t) for t in sorted(seen))
    return PermGroup(n, elements, tuple(gens))


def derangements(G: PermGroup) -> list[Permutation]:
    """The fixed-point-free elements of ``G``, in canonical order."""
    return [s for s in G.elements if s.is_derangement()]


def orbits(G: PermGroup) -> list[tuple[int, ...]]:
    """Orbit partition of the natural action on ``{1..N}``."""
    remaining = set(range(1, G.degree + 1))
    out = []
    while remaining:
        start = min(remaining)
        orbit = {start}
        frontier = [start]
        while frontier:
            i = frontier.pop()
            for g in G.generators or G.elements:
                j = g(i)
                if j not in orbit:
                    orbit.add(j)
                    frontier.append(j)
        out.append(tuple(sorted(orbit)))
        remaining -= orbit
    return out


def is_transitive(G: PermGroup) -> bool:
    return len(orbits(G)) == 1


# -- derangement combinatorics ------------------------------------------------
#
# The searches below all work on "pair masks": sigma covers the pair (i, j)
# when sigma(j) = i, encoded as bit (j-1)*N + i-1 of an N^2-bit integer.  Two
# permutations disagree everywhere iff their masks are disjoint, so tuples
# whose columns stay pairwise distinct are exactly sets of pairwise-disjoint
# masks.


def _pair_mask(sigma: Permutation) -> int:
    m = 0
    for j, i in enumerate(sigma.images):
        m |= 1 << (j * sigma.degree + i - 1)
    return m


def transitivity_level(G: PermGroup) -> int:
    """Minimal size of ``S subset G`` whose graphs cover all pairs ``(i, j)``.

    Exact branch-and-bound set cover over the ``N^2`` pairs, with a greedy
    upper bound for pruning.  Always at least ``N``; raises on non-transitive
    input.
    """
    if not is_transitive(G):
        raise ValueError("transitivity level is defined for transitive groups only")
    n = G.degree
    full = (1 << n * n) - 1
    masks = [_pair_mask(s) for s in G.elements]

    # greedy upper bound
    covered, greedy = 0, 0
    while covered != full:
        best = max(masks, key=lambda m: bin(m & ~covered).count("1"))
        covered |= best
        greedy += 1
    if greedy == n:
        return n  # n is a hard floor for transitive groups

    best_size = greedy
    by_bit = [[m for m in masks if m >> b & 1] for b in range(n * n)]

    def dfs(covered: int, count: int):
        nonlocal best_size
        if covered == full:
            best_size = min(best_size, count)
            return
        remaining = bin(full & ~covered).count("1")
        if count + -(-remaining // n) >= best_size:
            return
        # branch on the uncovered pair with the fewest covering elements
        bit = min(
            (b for b in range(n * n) if not covered >> b & 1),
            key=lambda b: sum(1 for m in by_bit[b] if not m & covered),
        )
        options = sorted(
            (m for m in by_bit[bit]),
            key=lambda m: -bin(m & ~covered).count("1"),
        )
        for m in options:
            dfs(covered | m, count + 1)

    dfs(0, 0)
    return best_size


def strongest_transitive_certificate(G: PermGroup):
    """``N`` elements of ``G`` with every quotient ``sigma_i^-1 sigma_j`` a derangement.

    Returns such a tuple (first found, starting with the identity, which is
    always possible up to left translation) or ``None`` when an exhaustive
    search shows none exists.  Existence is equivalent to ``l(G) = N`` and to
    the Latin-square tuple set being nonempty.
    """
    if not is_transitive(G):
        raise ValueError("certificates are defined for transitive groups only")
    n = G.degree
    ders = derangements(G)
    masks = [_pair_mask(s) for s in ders]
    chosen: list[int] = []

    def dfs(used: int, start: int) -> bool:
        if len(chosen) == n - 1:
            return True
        for idx in range(start, len(ders)):
            m = masks[idx]
            if m & used:
                continue
            chosen.append(idx)
            if dfs(used | m, idx + 1):
                return True
            chosen.pop()
        return False

    if dfs(_pair_mask(identity(n)), 0):
        return (identity(n), *(ders[i] for i in chosen))
    return None


def enumerate_L_G(G: PermGroup, limit: int) -> list[tuple[Permutation, ...]]:
    """Up to ``limit`` ordered tuples ``(sigma_1..sigma_N)`` from ``G`` whose
    column evaluations ``sigma_1(i), ..., sigma_N(i)`` are distinct for every
    ``i``.

    Tuples come out in lexicographic order with respect to the canonical
    element order.  A group that cannot realize any such tuple (in
    particular any non-transitive group) yields the empty list.
    """
    n = G.degree
    masks = [_pair_mask(s) for s in G.elements]
    out: list[tuple[Permutation, ...]] = []
    prefix: list[int] = []

    def dfs(used: int) -> bool:
        if len(prefix) == n:
            out.append(tuple(G.elements[i] for i in prefix))
            return len(out) >= limit
        for idx, m in enumerate(masks):
            if m & used:
                continue
            prefix.append(idx)
            if dfs(used | m):
                return True
            prefix.pop()
        return False

    if limit > 0:
        dfs(0)
    return out


def deranging_subgroups(G: PermGroup, order: int) -> list[PermGroup]:
    """All subgroups of the given order whose non-identity elements are all
    derangements.  The search is exhaustive (cyclic extension inside the
    derangement set), so an empty result is a proof of absence.
    """
    if order < 1 or G.order % order:
        raise ValueError(f"order {order} does not divide |G| = {G.order}")
    e = identity(G.degree)
    if order == 1:
        return [PermGroup(G.degree, (e,), ())]

    allowed = {s for s in G.elements if s.is_derangement()}
    allowed.add(e)

    def generated_within(base: frozenset, extra: Permutation):
        """Closure of base + extra, aborting once it leaves ``allowed`` or ``order``."""
        els = set(base) | {extra}
        frontier = [extra]
        while frontier:
            new = []
            for h in frontier:
                for g in list(els):
                    for prod in (g * h, h * g):
                        if prod not in els:
                            if prod not in allowed or len(els) >= order:
                                return None
                            els.add(prod)
                            new.append(prod)
            frontier = new
        return frozenset(els)

    candidates = [
        s
        for s in sorted(allowed - {e}, key=lambda p: p.images)
        if order % s.order() == 0
    ]
    seen = {frozenset({e})}
    stack = [frozenset({e})]
    results = set()
    while stack:
        S = stack.pop()
        for c in candidates:
            if c in S:
                continue
            T = generated_within(S, c)
            if T is None or T in seen:
                continue
            seen.add(T)
            if len(T) == order:
                results.add(T)
            elif order % len(T) == 0:
                stack.append(T)

    groups = []
    for els in sorted(results, key=lambda s: sorted(p.images for p in s)):
        sorted_els = tuple(sorted(els, key=lambda p: p.images))
        groups.append(PermGroup(G.degree, sorted_els, sorted_els))
    return groups


def all_subgroups(G: PermGroup) -> list[PermGroup]:
    """Every subgroup of ``G``, by breadth-first closure extension.

    Intended for small groups (|G| up to a few dozen); the subgroup lattice
    is walked exhaustively.
    """
    e = identity(G.degree)
    trivial = frozenset({e})
    seen = {trivial}
    stack = [trivial]
    while stack:
        S = stack.pop()
        for c in G.elements:
            if c in S:
                continue
            els = set(S)
            frontier = [c]
            els.add(c)
            while frontier:
                new = []
                for h in frontier:
                    for g in list(els):
                        for prod in (g * h, h * g):
                            if prod not in els:
                                els.add(prod)
                                new.append(prod)
                frontier = new
            T = frozenset(els)
            if T not in seen:
                seen.add(T)
                stack.append(T)
    groups = []
    for els in sorted(seen, key=lambda s: (len(s), sorted(p.images for p in s))):
        sorted_els = tuple(sorted(els, key=lambda p: p.images))
        groups.append(PermGroup(G.degree, sorted_els, sorted_els))
    return groups


# -- the PGL_2(p) family -------------------------------------------------------


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def pgl2(p: int) -> PermGroup:
    """``PGL_2(p)`` acting on the projective line over ``F_p``.

    The ``p + 1`` points are labelled ``[0:1], [1:0], [1:1], ..., [1:p-1]``
    in that order.  The group is built by closing the permutations induced
    by generators of ``GL_2(p)`` and has order ``(p-1)p(p+1)``.
    """
    if not _is_prime(p) or p < 3:
        raise ValueError("p must be an odd prime >= 3")
    points = [(0, 1)] + [(1, t) for t in range(p)]
    index = {pt: k + 1 for k, pt in enumerate(points)}

    def normalize(x: int, y: int):
        x, y = x % p, y % p
        if x:
            return (1, y * pow(x, p - 2, p) % p)
        return (0, 1)

    def as_permutation(mat) -> Permutation:
        (a, b), (c, d) = mat
        images = []
        for x, y in points:
            images.append(index[normalize(a * x + b * y, c * x + d * y)])
        return Permutation(tuple(images))

    g = next(r for r in range(2, p) if all(pow(r, (p - 1) // q, p) != 1 for q in _prime_factors(p - 1)))
    gens = [
        as_permutation(((1, 1), (0, 1))),
        as_permutation(((g, 0), (0, 1))),
        as_permutation(((0, 1), (1, 0))),
    ]
    return closure(gens)


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- character spectral measure -----------------------------------------------


@dataclass(frozen=True)
class SpectralMeasure:
    """Atomic law of the main character: exact weights ``c_0..c_N`` on ``{0..N}``."""

    degree: int
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.weights) != self.degree + 1:
            raise ValueError("need exactly degree + 1 weights")
        if sum(self.weights) != 1:
            raise ValueError("weights must sum to 1 exactly")

    def moment(self, p: int) -> Fraction:
        return sum((Fraction(i) ** p) * c for i, c in enumerate(self.weights))


def character_measure(G: PermGroup) -> SpectralMeasure:
    """Law of the fixed-point count over ``G``, as exact fractions.

    Satisfies ``c_0 = |D_G| / |G|``, ``c_{N-1} = 0`` (no permutation fixes
    exactly ``N - 1`` points) and ``c_N = 1 / |G|``.
    """
    counts = [0] * (G.degree + 1)
    for s in G.elements:
        counts[len(s.fixed_points())] += 1
    weights = tuple(Fraction(c, G.order) for c in counts)
    return SpectralMeasure(G.degree, weights)


# -- Latin squares --------------------------------------------------------------


@dataclass(frozen=True)
class LatinSquare:
    """An ``N x N`` array over ``{1..N}`` whose rows and columns are permutations."""

    order: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = self.order
        want = list(range(1, n + 1))
        if len(self.entries) != n or any(len(r) != n for r in self.entries):
            raise ValueError("entries must be an N x N array")
        for r in self.entries:
            if sorted(r) != want:
                raise ValueError(f"row {r} is not a permutation of 1..{n}")
        for j in range(n):
            col = sorted(r[j] for r in self.entries)
            if col != want:
                raise ValueError(f"column {j + 1} is not a permutation of 1..{n}")

    @classmethod
    def from_rows(cls, perms) -> "LatinSquare":
        perms = tuple(perms)
        return cls(perms[0].degree, tuple(p.images for p in perms))

    def rows_as_permutations(self) -> tuple[Permutation, ...]:
        return tuple(Permutation(r) for r in self.entries)

    def transpose(self) -> "LatinSquare":
        n = self.order
        return LatinSquare(n, tuple(tuple(self.entries[i][j] for i in range(n)) for j in range(n)))


# -- exact classical oracles -----------------------------------------------------


def exact_group_t_matrix(G: PermGroup, p: int) -> np.ndarray:
    """Haar averages ``int u_{i_1 j_1} .. u_{i_p j_p}`` by direct enumeration.

    Entry ``[(i_1..i_p), (j_1..j_p)]`` (row-major tuple flattening) is the
    fraction of group elements with ``sigma(j_t) = i_t`` for every ``t``.
    """
    n = G.degree
    size = n**p
    T = np.zeros((size, size))
    cols = np.indices((n,) * p).reshape(p, -1)  # 0-based j tuples
    col_flat = np.ravel_multi_index(tuple(cols), (n,) * p)
    w = 1.0 / G.order
    for s in G.elements:
        img = np.array(s.images) - 1
        row_flat = np.ravel_multi_index(tuple(img[cols]), (n,) * p)
        T[row_flat, col_flat] += w
    return T


def classical_orbitals(G: PermGroup, k: int) -> list[frozenset]:
    """Equivalence classes of ``k``-tuples under the diagonal action of ``G``."""
    n = G.degree
    seen, classes = set(), []
    for tup in np.ndindex(*(n,) * k):
        tup = tuple(t + 1 for t in tup)
        if tup in seen:
            continue
        cls = {tuple(s(t) for t in tup) for s in G.elements}
        seen |= cls
        classes.append(frozenset(cls))
    return classes


# -- named families and file I/O -------------------------------------------------


def cyclic_group(n: int) -> PermGroup:
    if n == 1:
        return closure([], degree=1)
    cyc = Permutation(tuple(list(range(2, n + 1)) + [1]))
    return closure([cyc])


def symmetric_group(n: int) -> PermGroup:
    if n == 1:
        return closure([], degree=1)
    swap = Permutation((2, 1) + tuple(range(3, n + 1)))
    if n == 2:
        return closure([swap])
    cyc = Permutation(tuple(list(range(2, n + 1)) + [1]))
    return closure([swap, cyc])


def hyperoctahedral_segments(n: int) -> PermGroup:
    """Symmetry group of ``n`` disjoint segments, as signed permutations on
    ``2n`` points; segment ``i`` occupies points ``{2i-1, 2i}``.  Order
    ``2^n n!``.
    """
    if n < 1:
        raise ValueError("need at least one segment")
    if n == 1:
        return closure([Permutation((2, 1))])
    flip = Permutation((2, 1) + tuple(range(3, 2 * n + 1)))
    swap01 = Permutation((3, 4, 1, 2) + tuple(range(5, 2 * n + 1)))
    shift = Permutation(tuple(i + 2 for i in range(1, 2 * n - 1)) + (1, 2))
    return closure([flip, swap01, shift])


def regular_action(G: PermGroup) -> PermGroup:
    """The left-translation action of ``G`` on itself, as a permutation group
    of degree ``|G|`` (points numbered by the canonical element order)."""
    els = G.elements
    index = {s: i + 1 for i, s in enumerate(els)}
    gens = [
        Permutation(tuple(index[g * s] for s in els)) for g in (G.generators or G.elements)
    ]
    out = closure(gens, degree=G.order)
    if out.order != G.order:
        raise InvalidInputError("translation action degenerated; generators do not act faithfully")
    return out


def group_from_family(name: str) -> PermGroup:
    """Resolve a named family: ``cyclic:N``, ``symmetric:N``, ``pgl2:p`` or
    ``hyperoctahedral-segments:n``."""
    try:
        family, _, arg = name.partition(":")
        k = int(arg)
    except ValueError as exc:
        raise InvalidInputError(f"bad group family spec {name!r}") from exc
    builders = {
        "cyclic": cyclic_group,
        "symmetric": symmetric_group,
        "pgl2": pgl2,
        "hyperoctahedral-segments": hyperoctahedral_segments,
    }
    if family not in builders:
        raise InvalidInputError(f"unknown group family {family!r}")
    try:
        return builders[family](k)
    except ValueError as exc:
        raise InvalidInputError(str(exc)) from exc


def group_to_json_dict(G: PermGroup) -> dict:
    gens = G.generators or G.elements
    return {"degree": G.degree, "generators": [list(g.images) for g in gens]}


def group_from_json_dict(d: dict) -> PermGroup:
    try:
        degree = int(d["degree"])
        gens = [Permutation(tuple(int(i) for i in g)) for g in d["generators"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed group object: {exc}") from exc
    return closure(gens, degree=degree)


def save_group(path, G: PermGroup) -> None:
    with open(path, "w") as fh:
        json.dump(group_to_json_dict(G), fh, indent=2)
        fh.write("\n")


def load_group(path) -> PermGroup:
    with open(path) as fh:
        return group_from_json_dict(json.load(fh))
