from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from conftest import all_permutations, brute_force_haar_average
from qpg import permgroup as pg
from qpg.errors import GroupTooLargeError, InvalidInputError


class TestClosure:
    def test_single_swap(self):
        G = pg.closure([(2, 1)])
        assert G.order == 2

    def test_three_cycle(self):
        G = pg.closure([(2, 3, 1)])
        assert G.order == 3

    def test_s4_against_brute_force(self):
        G = pg.closure([(2, 1, 3, 4), (2, 3, 4, 1)])
        assert {s.images for s in G.elements} == set(all_permutations(4))

    def test_cap(self):
        with pytest.raises(GroupTooLargeError):
            pg.closure([tuple(list(range(2, 40)) + [1])], cap=10)

    def test_lagrange_on_suite(self):
        import math

        for G in [pg.symmetric_group(4), pg.pgl2(5), pg.hyperoctahedral_segments(2)]:
            assert math.factorial(G.degree) % G.order == 0


class TestDerangements:
    def test_trivial_group(self):
        assert pg.derangements(pg.closure([], degree=3)) == []

    def test_s3_two_three_cycles(self):
        # oracle: filter the full symmetric group by hand
        expected = {s for s in all_permutations(3) if all(s[i - 1] != i for i in (1, 2, 3))}
        got = {s.images for s in pg.derangements(pg.symmetric_group(3))}
        assert got == expected == {(2, 3, 1), (3, 1, 2)}

    def test_s4_count(self):
        expected = [s for s in all_permutations(4) if all(s[i - 1] != i for i in range(1, 5))]
        assert len(expected) == 9
        assert len(pg.derangements(pg.symmetric_group(4))) == 9


class TestOrbits:
    def test_trivial_group(self):
        G = pg.closure([], degree=3)
        assert pg.orbits(G) == [(1,), (2,), (3,)]
        assert not pg.is_transitive(G)

    def test_cyclic_is_transitive(self):
        G = pg.cyclic_group(4)
        assert pg.orbits(G) == [(1, 2, 3, 4)]
        assert pg.is_transitive(G)

    def test_partial_swap(self):
        G = pg.closure([(2, 1, 3, 4)])
        assert pg.orbits(G) == [(1, 2), (3,), (4,)]


class TestTransitivityLevel:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_cyclic_equals_degree(self, n):
        assert pg.transitivity_level(pg.cyclic_group(n)) == n

    def test_s4(self):
        assert pg.transitivity_level(pg.symmetric_group(4)) == 4

    def test_s3_against_exhaustive_cover(self):
        # oracle: try every subset of the 6 elements as a cover
        G = pg.symmetric_group(3)
        elements = [s.images for s in G.elements]
        pairs = [(i, j) for i in (1, 2, 3) for j in (1, 2, 3)]

        def covers(subset):
            return all(any(s[j - 1] == i for s in subset) for i, j in pairs)

        brute = min(
            size
            for size in range(1, 7)
            for subset in combinations(elements, size)
            if covers(subset)
        )
        assert brute == 3
        assert pg.transitivity_level(G) == 3

    def test_rejects_non_transitive(self):
        with pytest.raises(ValueError):
            pg.transitivity_level(pg.closure([(2, 1, 3)]))


class TestCertificate:
    @pytest.mark.parametrize("n", [2, 3, 5, 6])
    def test_cyclic_certificate_is_valid(self, n):
        cert = pg.strongest_transitive_certificate(pg.cyclic_group(n))
        assert cert is not None and len(cert) == n
        for a in range(n):
            for b in range(n):
                if a != b:
                    assert (cert[a].inverse() * cert[b]).is_derangement()

    def test_pgl2_5(self):
        assert pg.strongest_transitive_certificate(pg.pgl2(5)) is not None

    def test_all_transitive_subgroups_of_s4(self):
        subs = [H for H in pg.all_subgroups(pg.symmetric_group(4)) if pg.is_transitive(H)]
        assert len(subs) == 9
        assert all(pg.strongest_transitive_certificate(H) is not None for H in subs)

    def test_level_n_iff_certificate_iff_tuples(self):
        for G in [pg.cyclic_group(4), pg.symmetric_group(3), pg.symmetric_group(4),
                  pg.closure([(2, 1, 4, 3), (3, 4, 1, 2)])]:
            has_cert = pg.strongest_transitive_certificate(G) is not None
            assert has_cert == (pg.transitivity_level(G) == G.degree)
            assert has_cert == bool(pg.enumerate_L_G(G, 1))


class TestLatinSquareTuples:
    def test_z2_both_orders(self):
        G = pg.cyclic_group(2)
        tuples = pg.enumerate_L_G(G, 10)
        images = [tuple(s.images for s in t) for t in tuples]
        assert images == [((1, 2), (2, 1)), ((2, 1), (1, 2))]

    def test_non_transitive_group_has_none(self):
        assert pg.enumerate_L_G(pg.closure([(2, 1, 3)]), 5) == []

    def test_limit_respected(self):
        assert len(pg.enumerate_L_G(pg.symmetric_group(4), 4)) == 4

    def test_s4_column_squares_and_reduced_forms(self):
        # All 576 tuples give Latin squares; the reduced ones among the
        # column-evaluation squares are exactly the four normalized squares
        # of order 4.
        tuples = pg.enumerate_L_G(pg.symmetric_group(4), 1000)
        assert len(tuples) == 576
        reduced = set()
        for t in tuples:
            colsq = tuple(tuple(s(i) for s in t) for i in range(1, 5))
            pg.LatinSquare(4, colsq)  # validity
            if colsq[0] == (1, 2, 3, 4) and tuple(r[0] for r in colsq) == (1, 2, 3, 4):
                reduced.add(colsq)
        assert reduced == {
            ((1, 2, 3, 4), (2, 1, 4, 3), (3, 4, 1, 2), (4, 3, 2, 1)),
            ((1, 2, 3, 4), (2, 1, 4, 3), (3, 4, 2, 1), (4, 3, 1, 2)),
            ((1, 2, 3, 4), (2, 3, 4, 1), (3, 4, 1, 2), (4, 1, 2, 3)),
            ((1, 2, 3, 4), (2, 4, 1, 3), (3, 1, 4, 2), (4, 3, 2, 1)),
        }


class TestDerangingSubgroups:
    def test_segment_group_order_4(self):
        H2 = pg.hyperoctahedral_segments(2)
        found = pg.deranging_subgroups(H2, 4)
        assert len(found) == 2  # Z4 and the Klein group
        for H in found:
            assert H.order == 4
            assert all(s.is_derangement() for s in H.elements if s != pg.identity(4))
            members = set(H.elements)
            assert all(a * b in members for a in members for b in members)

    def test_prime_cycle_is_its_own_deranging_subgroup(self):
        G = pg.cyclic_group(5)
        found = pg.deranging_subgroups(G, 5)
        assert len(found) == 1
        assert set(found[0].elements) == set(G.elements)

    def test_pgl2_5_order_6_search_is_exhaustive_and_sound(self):
        # 10 cyclic Z6 (3-cycle times complementary transposition in the S5
        # picture) and 10 S3 copies; every hit is independently re-verified.
        found = pg.deranging_subgroups(pg.pgl2(5), 6)
        assert len(found) == 20
        abelian = 0
        for H in found:
            members = set(H.elements)
            assert len(members) == 6
            assert all(a * b in members for a in members for b in members)
            assert all(s.is_derangement() for s in members if s != pg.identity(6))
            abelian += all(a * b == b * a for a in members for b in members)
        assert abelian == 10

    def test_order_must_divide(self):
        with pytest.raises(ValueError):
            pg.deranging_subgroups(pg.cyclic_group(4), 3)

    def test_implication_deranging_gives_certificate(self):
        for G in [pg.cyclic_group(4), pg.hyperoctahedral_segments(2), pg.pgl2(5)]:
            if pg.deranging_subgroups(G, G.degree):
                assert pg.strongest_transitive_certificate(G) is not None


class TestPgl2:
    @pytest.mark.parametrize("p,order", [(3, 24), (5, 120), (7, 336)])
    def test_orders(self, p, order):
        G = pg.pgl2(p)
        assert (G.degree, G.order) == (p + 1, order)
        assert pg.is_transitive(G)

    def test_p3_is_symmetric_group(self):
        assert {s.images for s in pg.pgl2(3).elements} == set(all_permutations(4))

    def test_rejects_non_prime(self):
        for bad in (4, 9, 1, 2):
            with pytest.raises(ValueError):
                pg.pgl2(bad)


class TestCharacterMeasure:
    def test_trivial_group_is_point_mass_at_degree(self):
        mu = pg.character_measure(pg.closure([], degree=3))
        assert mu.weights == (0, 0, 0, 1)

    def test_s3_exact(self):
        # oracle: enumerate the 6 permutations and count fixed points
        counts = [0, 0, 0, 0]
        for s in all_permutations(3):
            counts[sum(1 for i in (1, 2, 3) if s[i - 1] == i)] += 1
        assert [Fraction(c, 6) for c in counts] == [
            Fraction(1, 3), Fraction(1, 2), Fraction(0), Fraction(1, 6)
        ]
        mu = pg.character_measure(pg.symmetric_group(3))
        assert mu.weights == (Fraction(1, 3), Fraction(1, 2), 0, Fraction(1, 6))

    def test_pgl2_3_matches_closed_formula(self):
        mu = pg.character_measure(pg.pgl2(3))
        assert mu.weights[0] == Fraction(3, 8)
        assert mu.weights[1] == Fraction(1, 3)
        assert mu.weights[2] == Fraction(1, 4)
        assert mu.weights[4] == Fraction(1, 24)

    def test_structural_identities(self):
        for G in [pg.symmetric_group(4), pg.pgl2(5), pg.hyperoctahedral_segments(3),
                  pg.cyclic_group(6)]:
            mu = pg.character_measure(G)
            n = G.degree
            assert sum(mu.weights) == 1
            assert mu.weights[n - 1] == 0
            assert mu.weights[0] == Fraction(len(pg.derangements(G)), G.order)
            assert mu.weights[n] == Fraction(1, G.order)

    def test_derangement_weight_inequality_under_certificate(self):
        for G in [pg.cyclic_group(5), pg.symmetric_group(4), pg.pgl2(5)]:
            assert pg.strongest_transitive_certificate(G) is not None
            mu = pg.character_measure(G)
            assert len(pg.derangements(G)) >= G.degree - 1
            assert mu.weights[0] >= (G.degree - 1) * mu.weights[G.degree]

    def test_moment(self):
        mu = pg.character_measure(pg.symmetric_group(3))
        assert mu.moment(1) == 1  # transitivity: average fixed-point count is 1


class TestLatinSquareType:
    def test_validation(self):
        pg.LatinSquare(2, ((1, 2), (2, 1)))
        with pytest.raises(ValueError):
            pg.LatinSquare(2, ((1, 2), (1, 2)))

    def test_from_rows_and_transpose(self):
        G = pg.cyclic_group(3)
        L = pg.LatinSquare.from_rows(G.elements)
        assert L.transpose().order == 3
        assert L.rows_as_permutations() == G.elements


class TestExactOracles:
    def test_t_matrix_z2_by_hand(self):
        T = pg.exact_group_t_matrix(pg.cyclic_group(2), 2)
        expected = 0.5 * np.array(
            [[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]], dtype=float
        )
        np.testing.assert_allclose(T, expected, atol=1e-15)

    def test_t_matrix_matches_pair_counts(self):
        G = pg.symmetric_group(3)
        T = pg.exact_group_t_matrix(G, 2)
        elements = [s.images for s in G.elements]
        for i1, i2, j1, j2 in [(1, 2, 1, 2), (1, 1, 2, 2), (3, 2, 1, 2)]:
            want = brute_force_haar_average(elements, [(i1, j1), (i2, j2)])
            row = (i1 - 1) * 3 + (i2 - 1)
            col = (j1 - 1) * 3 + (j2 - 1)
            assert T[row, col] == pytest.approx(want, abs=1e-15)

    def test_classical_orbitals_z4(self):
        classes = pg.classical_orbitals(pg.cyclic_group(4), 2)
        assert len(classes) == 4
        # classes are the constant-difference sets
        for cls in classes:
            diffs = {(b - a) % 4 for a, b in cls}
            assert len(diffs) == 1


class TestFamiliesAndIO:
    def test_hyperoctahedral_orders(self):
        import math

        for n in (1, 2, 3):
            G = pg.hyperoctahedral_segments(n)
            assert G.degree == 2 * n
            assert G.order == 2**n * math.factorial(n)

    def test_family_parsing(self):
        assert pg.group_from_family("cyclic:4").order == 4
        assert pg.group_from_family("symmetric:4").order == 24
        assert pg.group_from_family("pgl2:3").order == 24
        assert pg.group_from_family("hyperoctahedral-segments:2").order == 8
        with pytest.raises(InvalidInputError):
            pg.group_from_family("dihedral:4")
        with pytest.raises(InvalidInputError):
            pg.group_from_family("cyclic:x")

    def test_group_json_roundtrip(self, tmp_path):
        G = pg.symmetric_group(3)
        path = tmp_path / "g.json"
        pg.save_group(path, G)
        H = pg.load_group(path)
        assert H.elements == G.elements

    def test_regular_action(self):
        R = pg.regular_action(pg.symmetric_group(3))
        assert (R.degree, R.order) == (6, 6)
        assert pg.is_transitive(R)
        assert all(s.is_derangement() for s in R.elements if s != pg.identity(6))


class TestPermutation:
    def test_compose_and_inverse(self):
        a = pg.Permutation((2, 3, 1))
        b = pg.Permutation((2, 1, 3))
        assert (a * b).images == (3, 2, 1)
        assert (a * a.inverse()).images == (1, 2, 3)

    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            pg.Permutation((1, 1, 3))

    def test_cycles_and_order(self):
        s = pg.Permutation((2, 1, 4, 5, 3))
        assert s.cycles() == ((1, 2), (3, 4, 5))
        assert s.order() == 6
