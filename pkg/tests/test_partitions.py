import math
from fractions import Fraction

import pytest

from qzonal.errors import DomainError
from qzonal.partitions import (
    BigRational,
    Partition,
    gen_pochhammer,
    lex_compare,
    monomial_orbit_size,
    partitions_of,
    qgamma,
    qgamma_kappa,
    qgamma_log,
    rho,
)


def brute_force_partition_count(k):
    """Independent enumerator: count weakly decreasing positive tuples."""
    def count(remaining, cap):
        if remaining == 0:
            return 1
        return sum(count(remaining - p, p) for p in range(min(cap, remaining), 0, -1))
    return count(k, k)


class TestPartitionsOf:
    def test_k4_order_matches_reference(self):
        got = [p.parts for p in partitions_of(4, 4)]
        assert got == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]

    def test_k0(self):
        assert [p.parts for p in partitions_of(0, 3)] == [()]

    def test_k5_two_parts(self):
        got = [p.parts for p in partitions_of(5, 2)]
        assert got == [(5,), (4, 1), (3, 2)]

    @pytest.mark.parametrize("k,expected", [(0, 1), (1, 1), (2, 2), (3, 3),
                                            (4, 5), (5, 7), (6, 11)])
    def test_cardinality_small(self, k, expected):
        assert len(partitions_of(k, max(k, 1))) == expected

    def test_cardinality_vs_brute_force(self):
        for k in range(9):
            assert len(partitions_of(k, max(k, 1))) == brute_force_partition_count(k)

    def test_part_cap_filters(self):
        full = {p.parts for p in partitions_of(6, 6)}
        capped = {p.parts for p in partitions_of(6, 2)}
        assert capped == {p for p in full if len(p) <= 2}

    def test_invalid_args(self):
        with pytest.raises(DomainError):
            partitions_of(-1, 2)
        with pytest.raises(DomainError):
            partitions_of(3, 0)


class TestPartitionType:
    def test_trailing_zeros_trimmed(self):
        assert Partition((3, 1, 0, 0)).parts == (3, 1)

    def test_padded_indexing(self):
        p = Partition((2, 1))
        assert (p[0], p[1], p[2], p[5]) == (2, 1, 0, 0)

    def test_rejects_ascending(self):
        with pytest.raises(DomainError):
            Partition((1, 2))

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            Partition((2, -1))


class TestLexCompare:
    def test_reference_order_k4(self):
        assert lex_compare((3, 1), (2, 2)) == 1
        assert lex_compare((2, 1, 1), (1, 1, 1, 1)) == 1

    def test_equal(self):
        assert lex_compare((2, 1), (2, 1)) == 0

    def test_antisymmetric(self):
        parts = partitions_of(6, 6)
        for a in parts:
            for b in parts:
                assert lex_compare(a, b) == -lex_compare(b, a)

    def test_consistent_with_enumeration_order(self):
        for k in range(1, 8):
            plist = partitions_of(k, k)
            for a, b in zip(plist, plist[1:]):
                assert lex_compare(a, b) == 1

    def test_unequal_weight_rejected(self):
        with pytest.raises(DomainError):
            lex_compare((2,), (1,))


class TestRho:
    @pytest.mark.parametrize("kappa,expected", [
        ((4,), 0), ((3, 1), -10), ((2, 2), -16), ((2, 1, 1), -22),
        ((1, 1, 1, 1), -36),
    ])
    def test_reference_values(self, kappa, expected):
        assert rho(kappa) == expected

    def test_empty(self):
        assert rho(()) == 0

    def test_ties_exist_at_k6(self):
        # (4,1,1) and (3,3) share rho = -18; the coefficient recursion must
        # never divide across this pair (they are dominance-incomparable)
        assert rho((4, 1, 1)) == rho((3, 3)) == -18


class TestGenPochhammer:
    def test_single_part_is_base(self):
        assert gen_pochhammer(Fraction(7, 3), (1,)) == Fraction(7, 3)

    def test_two_unit_parts(self):
        assert gen_pochhammer(5, (1, 1)) == 15

    def test_empty_partition(self):
        assert gen_pochhammer(3.7, ()) == 1

    def test_exact_rational(self):
        v = gen_pochhammer(Fraction(1, 2), (2, 1))
        assert v == Fraction(1, 2) * Fraction(3, 2) * Fraction(-3, 2)

    def test_float_matches_exact(self):
        exact = gen_pochhammer(Fraction(5, 2), (3, 2, 1))
        approx = gen_pochhammer(2.5, (3, 2, 1))
        assert math.isclose(float(exact), approx, rel_tol=1e-13)


class TestQGamma:
    def test_reduces_to_scalar_gamma(self):
        assert math.isclose(qgamma(1, 4.0), 6.0, rel_tol=1e-13)

    def test_m2_integer(self):
        assert math.isclose(qgamma(2, 5.0), 48 * math.pi ** 2, rel_tol=1e-12)

    def test_m2_half_integer(self):
        want = math.pi ** 2 * math.gamma(4.5) * math.gamma(2.5)
        assert math.isclose(qgamma(2, 4.5), want, rel_tol=1e-12)

    def test_log_variant(self):
        assert math.isclose(qgamma_log(2, 5.0), math.log(qgamma(2, 5.0)),
                            rel_tol=1e-12)

    def test_pole_rejected(self):
        with pytest.raises(DomainError):
            qgamma(2, 2.0)


class TestQGammaKappa:
    def test_empty_partition_reduces(self):
        assert math.isclose(qgamma_kappa(2, 5.0, ()), qgamma(2, 5.0), rel_tol=1e-12)

    def test_scalar_shift(self):
        assert math.isclose(qgamma_kappa(1, 3.0, (2,)), 24.0, rel_tol=1e-13)

    def test_ratio_identity(self):
        import random
        rng = random.Random(5)
        for _ in range(25):
            m = rng.randint(1, 3)
            k = rng.randint(0, 5)
            kappa = rng.choice(partitions_of(k, m))
            a = rng.randint(4 * m - 3, 18) / 2  # stays right of the pole 2(m-1)
            ratio = qgamma_kappa(m, a, kappa) / qgamma(m, a)
            direct = float(gen_pochhammer(Fraction(a), kappa))
            assert math.isclose(ratio, direct, rel_tol=1e-12)

    def test_pole_rejected(self):
        with pytest.raises(DomainError):
            qgamma_kappa(2, 1.0, (1, 1))


class TestMonomialOrbitSize:
    def test_single_box(self):
        assert monomial_orbit_size((1,), 3) == 3

    def test_full_column(self):
        assert monomial_orbit_size((1, 1), 2) == 1

    def test_mixed(self):
        assert monomial_orbit_size((2, 1), 3) == 6

    def test_too_many_parts(self):
        with pytest.raises(DomainError):
            monomial_orbit_size((1, 1, 1), 2)


def test_bigrational_interops_with_fraction():
    x = BigRational(3) / BigRational(7)
    assert x == Fraction(3, 7)
    assert Fraction(x.numerator, x.denominator) == Fraction(3, 7)
