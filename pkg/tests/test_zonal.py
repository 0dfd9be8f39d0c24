import json
import random
from fractions import Fraction

import pytest

from qzonal.errors import DomainError
from qzonal.partitions import BigRational, partitions_of
from qzonal.validate import REFERENCE_TABLES
from qzonal.zonal import (
    apply_operator_check,
    build_table,
    eval_zonal,
    eval_zonal_rational,
    get_table,
    load_table,
    save_table,
    zonal_at_identity,
)


def as_fraction(x):
    return Fraction(int(x.numerator), int(x.denominator))


def rand_rationals(rng, count, distinct=False, positive=False):
    out = []
    while len(out) < count:
        v = Fraction(rng.randint(1 if positive else -9, 30 if positive else 9),
                     rng.randint(1, 9))
        if distinct and v in out:
            continue
        out.append(v)
    return out


class TestBuildTable:
    def test_k2_coefficients(self):
        t = build_table(2, 2)
        assert as_fraction(t.coefficient((2,), (2,))) == 1
        assert as_fraction(t.coefficient((2,), (1, 1))) == Fraction(4, 3)
        assert as_fraction(t.coefficient((1, 1), (1, 1))) == Fraction(2, 3)
        assert t.coefficient((1, 1), (2,)) == 0

    @pytest.mark.parametrize("k", [2, 3, 4, 5])
    def test_reference_tables(self, k):
        t = build_table(k, k)
        got = {(kap.parts, lam.parts): as_fraction(c) for kap, lam, c in t.items()}
        want = {pair: Fraction(v) for pair, v in REFERENCE_TABLES[k].items()}
        assert got == want

    def test_worked_example_entry(self):
        assert as_fraction(build_table(4, 4).coefficient((4,), (3, 1))) == Fraction(8, 5)

    def test_k0_and_k1(self):
        t0 = build_table(0, 1)
        assert as_fraction(t0.coefficient((), ())) == 1
        t1 = build_table(1, 1)
        assert as_fraction(t1.coefficient((1,), (1,))) == 1

    def test_part_cap_consistency(self):
        for k in range(1, 8):
            full = build_table(k, k)
            for cap in (1, 2, 3):
                sub = build_table(k, cap)
                for kap, lam, c in sub.items():
                    assert as_fraction(c) == as_fraction(full.coefficient(kap, lam))
                # the restricted table carries every pair the full one has
                have = {(kap.parts, lam.parts) for kap, lam, _ in sub.items()}
                for kap, lam, c in full.items():
                    if len(kap) <= cap and len(lam) <= cap:
                        assert (kap.parts, lam.parts) in have

    def test_nonnegativity_up_to_k8(self):
        for k in range(1, 9):
            for kap, lam, c in build_table(k, min(k, 5)).items():
                assert c >= 0

    def test_support_zero_pattern_k5(self):
        # stored entries are never zero and never attach a lambda with fewer
        # parts than kappa (the observed support pattern of the tables)
        for k in range(1, 6):
            for kap, lam, c in build_table(k, k).items():
                assert c > 0
                assert len(lam) >= len(kap)

    def test_leading_coefficients_positive(self):
        for k in range(1, 8):
            t = build_table(k, k)
            for kap in t.partitions:
                assert t.coefficient(kap, kap) > 0

    def test_rho_tie_pair_has_zero_coefficient(self):
        # rho((4,1,1)) == rho((3,3)); the recursion must produce a zero sum
        # there rather than divide by the vanishing gap
        t = build_table(6, 6)
        assert t.coefficient((4, 1, 1), (3, 3)) == 0

    def test_invalid_args(self):
        with pytest.raises(DomainError):
            build_table(-1, 2)
        with pytest.raises(DomainError):
            build_table(3, 0)


class TestEvalZonal:
    def test_degree_one_is_trace(self):
        t = get_table(1, 1)
        assert eval_zonal(t, (1,), [0.3, 1.7, -2.0]) == pytest.approx(0.0, abs=1e-12)

    def test_k2_known_point(self):
        t = get_table(2, 2)
        assert eval_zonal(t, (2,), [1.0, 2.0]) == pytest.approx(23 / 3, rel=1e-13)
        exact = eval_zonal_rational(t, (2,), [1, 2])
        assert as_fraction(exact) == Fraction(23, 3)

    def test_column_partition_needs_enough_variables(self):
        t = get_table(2, 2)
        assert eval_zonal(t, (1, 1), [1.0, 0.0]) == pytest.approx(0.0, abs=1e-14)

    def test_rational_matches_float(self):
        rng = random.Random(3)
        for k in (2, 3, 4):
            t = get_table(k, 3)
            ys = rand_rationals(rng, 3)
            for kap in t.partitions:
                exact = eval_zonal_rational(t, kap, ys)
                approx = eval_zonal(t, kap, [float(y) for y in ys])
                assert approx == pytest.approx(float(exact), rel=1e-12, abs=1e-12)

    def test_homogeneous_zero(self):
        t = get_table(3, 2)
        assert eval_zonal_rational(t, (2, 1), [0, 0]) == 0

    def test_sum_over_partitions_is_trace_power(self):
        t = get_table(2, 2)
        total = sum(eval_zonal_rational(t, kap, [1, 2]) for kap in t.partitions)
        assert total == 9

    def test_normalization_random_rational(self):
        rng = random.Random(11)
        for k in range(1, 6):
            m = min(k, 4)
            t = get_table(k, m)
            ys = rand_rationals(rng, m)
            total = sum(eval_zonal_rational(t, kap, ys) for kap in t.partitions)
            assert total == sum(ys) ** k

    def test_too_many_parts_rejected(self):
        t = get_table(2, 2)
        with pytest.raises(DomainError):
            eval_zonal(t, (1, 1), [1.0])

    def test_restricted_table_cannot_serve_more_variables(self):
        t = get_table(5, 2)
        with pytest.raises(DomainError):
            eval_zonal(t, (5,), [1.0, 2.0, 3.0])


class TestZonalAtIdentity:
    def test_trace(self):
        t = get_table(1, 1)
        assert zonal_at_identity(t, (1,), 5) == 5

    def test_k2(self):
        t = get_table(2, 2)
        assert as_fraction(zonal_at_identity(t, (2,), 2)) == Fraction(10, 3)

    def test_more_parts_than_variables(self):
        t = get_table(3, 3)
        assert zonal_at_identity(t, (1, 1, 1), 2) == 0

    def test_matches_eval_at_ones(self):
        for k in (2, 3, 4):
            t = get_table(k, 3)
            for kap in t.partitions:
                direct = eval_zonal_rational(t, kap, [1, 1, 1])
                assert zonal_at_identity(t, kap, 3) == direct


class TestOperatorCheck:
    def test_degree_one(self):
        t = get_table(1, 1)
        lhs, rhs = apply_operator_check(t, (1,), [Fraction(1), Fraction(2)])
        assert lhs == rhs
        # C_(1)(1,2) = 3 with operator eigenvalue rho + k(4m-1) = -3 + 7 = 4
        assert lhs == 12

    def test_k2_point(self):
        t = get_table(2, 2)
        lhs, rhs = apply_operator_check(t, (2,), [Fraction(2), Fraction(3)])
        assert lhs == rhs
        value = eval_zonal_rational(t, (2,), [Fraction(2), Fraction(3)])
        assert rhs == (-4 + 2 * 7) * value

    def test_column_partition_m3(self):
        t = get_table(2, 2)
        lhs, rhs = apply_operator_check(
            t, (1, 1), [Fraction(1), Fraction(2), Fraction(4)])
        assert lhs == rhs
        value = eval_zonal_rational(t, (1, 1), [Fraction(1), Fraction(2), Fraction(4)])
        assert rhs == (-10 + 2 * 11) * value

    def test_exact_for_all_kappa_up_to_4(self):
        rng = random.Random(17)
        for k in range(1, 5):
            for m in (2, 3):
                t = get_table(k, min(k, m))
                for kap in t.partitions:
                    ys = rand_rationals(rng, m, distinct=True, positive=True)
                    lhs, rhs = apply_operator_check(t, kap, ys)
                    assert lhs == rhs

    def test_repeated_points_rejected(self):
        t = get_table(2, 2)
        with pytest.raises(DomainError):
            apply_operator_check(t, (2,), [Fraction(1), Fraction(1)])


class TestTableCache:
    def test_json_roundtrip(self, tmp_path):
        t = build_table(4, 3)
        path = tmp_path / "t.json"
        save_table(t, path)
        loaded = load_table(path)
        assert loaded.k == t.k and loaded.part_cap == t.part_cap
        got = {(a.parts, b.parts): as_fraction(c) for a, b, c in loaded.items()}
        want = {(a.parts, b.parts): as_fraction(c) for a, b, c in t.items()}
        assert got == want

    def test_schema_fields(self, tmp_path):
        t = build_table(2, 2)
        path = tmp_path / "t.json"
        save_table(t, path)
        doc = json.loads(path.read_text())
        assert doc["k"] == 2 and doc["part_cap"] == 2
        row = doc["rows"][0]
        assert row["kappa"] == [2]
        assert {"lambda", "num", "den"} <= set(row["entries"][0])
        assert isinstance(row["entries"][0]["num"], str)

    def test_memo_returns_same_object(self):
        a = get_table(3, 2)
        b = get_table(3, 2)
        assert a is b

    def test_disk_cache_roundtrip(self, tmp_path, monkeypatch):
        import qzonal.zonal as zonal_mod

        monkeypatch.setenv("QZONAL_TABLE_CACHE_DIR", str(tmp_path))
        zonal_mod.clear_cache()
        t1 = get_table(4, 2)
        assert (tmp_path / "zonal_k4_cap2.json").is_file()
        zonal_mod.clear_cache()
        t2 = get_table(4, 2)  # served from disk
        got = {(a.parts, b.parts): as_fraction(c) for a, b, c in t2.items()}
        want = {(a.parts, b.parts): as_fraction(c) for a, b, c in t1.items()}
        assert got == want
        zonal_mod.clear_cache()


def test_partitions_property_rho_not_monotone_but_build_succeeds():
    # ties in rho exist from degree 6 on; the build must still succeed
    # because no admitted move crosses a tied pair
    for k in range(6, 9):
        build_table(k, min(k, 5))
