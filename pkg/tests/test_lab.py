import csv
import io
import json
from fractions import Fraction

import pytest

from regbip import lab
from regbip.lab import (
    CapacityError,
    HypothesisError,
    NonIntegralProgression,
    OracleMismatch,
    Progression,
    Proportional,
    Vanishing,
    check_proportional,
    check_vanishing,
    coefficient_identity_check,
    density_scan,
    instantiate_family,
    reports_to_csv,
    reports_to_json,
    verify,
    verify_all,
)
from regbip.partitions import brute_force_B
from regbip.series import TruncatedSeries


def factor_of(r):
    return r.progression.form.factor


class TestTypes:
    def test_invariants(self):
        with pytest.raises(ValueError):
            Progression(2, 0, 1, 4)
        with pytest.raises(ValueError):
            Progression(2, 1, -1, 4)
        with pytest.raises(ValueError):
            Progression(2, 1, 0, 1)
        p = Progression(4, 9, 2, 4, Proportional(1, 0, -9))
        assert p.form.factor == 3


class TestChecks:
    def test_vanishing_examples(self):
        assert check_vanishing(4, 9, 5, 4, 4000).holds
        assert check_vanishing(2, 25, 7, 4, 4000).holds
        r = check_vanishing(2, 1, 0, 4, 100)
        assert not r.holds and r.witness_n == 0 and r.lhs == 1

    def test_identity_progression(self):
        for ell, M in [(2, 4), (3, 9), (5, 2)]:
            assert check_proportional(ell, 1, 0, 1, M, 100).holds

    def test_b2_square_progression_sign(self):
        # B_2(25n + 2) against B_2(n) mod 4: the factor that holds is -1
        stated = check_proportional(2, 25, 2, 1, 4, 4000)
        assert not stated.holds and stated.witness_n == 0
        assert (stated.lhs, stated.rhs) == (brute_force_B(2, 2) % 4, brute_force_B(2, 0) % 4)
        assert check_proportional(2, 25, 2, 3, 4, 4000).holds

    def test_b4_square_progression_sign(self):
        assert not check_proportional(4, 9, 2, 3, 4, 4000).holds
        assert check_proportional(4, 9, 2, 1, 4, 4000).holds

    def test_witness_reproducible(self):
        r = check_vanishing(3, 5, 1, 3, 500)
        assert not r.holds
        n = r.witness_n
        assert brute_force_B(3, 5 * n + 1) % 3 == r.lhs != 0
        for k in range(n):
            assert brute_force_B(3, 5 * k + 1) % 3 == 0

    def test_truncation_independent(self):
        for args in [(2, 25, 7, 4), (4, 9, 5, 4), (3, 5, 1, 3), (2, 3, 2, 2)]:
            a = check_vanishing(*args, 300)
            b = check_vanishing(*args, 600)
            if a.holds:
                assert b.holds or b.witness_n > 300
            else:
                assert (b.witness_n, b.lhs) == (a.witness_n, a.lhs)

    def test_lacunary_route_used(self):
        r = check_vanishing(4, 11**4, 11**3 + (11**4 - 1) // 4, 4, 200)
        assert r.holds and r.route == "lacunary"

    def test_capacity(self):
        with pytest.raises(CapacityError):
            check_vanishing(3, 10**6, 0, 3, 5)

    def test_oracle_catches_corruption(self, monkeypatch):
        real = lab.series_table.get

        def corrupt(ell, M, n):
            s = real(ell, M, n)
            arr = s.coeffs.copy()
            arr[1::2] = (arr[1::2] + 1) % M
            return TruncatedSeries(arr, M)

        monkeypatch.setattr(lab.series_table, "get", corrupt)
        with pytest.raises(OracleMismatch):
            check_vanishing(7, 2, 1, 5, 400)

    def test_batch_order(self):
        progs = [Progression(2, 25, 7, 4), Progression(2, 1, 0, 4), Progression(4, 9, 5, 4)]
        serial = verify_all(progs, 500)
        threaded = verify_all(progs, 500, workers=3)
        assert [r.to_dict() for r in serial] == [r.to_dict() for r in threaded]
        assert [r.holds for r in serial] == [True, False, True]


class TestFamilies:
    def test_examples(self):
        assert instantiate_family("cor6.2", dict(p=5, k=0, j=1))[0] == Progression(
            2, 25, 7, 4, Vanishing(), "cor6.2", (("p", 5), ("k", 0), ("j", 1))
        )
        p = instantiate_family("cor8.2", dict(p=3, k=0, j=1))[0]
        assert (p.ell, p.A, p.B, p.M, p.form) == (4, 9, 5, 4, Vanishing())
        assert p.B == (7 * 3 - 1) // 4

    def test_aliases(self):
        assert instantiate_family("b2-vanish", dict(p=5, k=0, j=1)) == instantiate_family(
            "cor6.2", dict(p=5, k=0, j=1)
        )
        with pytest.raises(KeyError):
            instantiate_family("thm9.9", {})

    def test_non_integral(self):
        with pytest.raises(NonIntegralProgression) as err:
            instantiate_family("cor6.2", dict(p=2, k=0, j=1))
        assert "(2^2-1)/12" in err.value.expression

    @pytest.mark.parametrize(
        "fid,params",
        [
            ("cor6.2", dict(p=13, k=0, j=1)),
            ("cor6.2", dict(p=9, k=0, j=1)),
            ("cor6.2", dict(p=5, k=0, j=5)),
            ("cor8.2", dict(p=5, k=0, j=1)),
            ("thm6.1", dict(primes="5,13", j=1)),
            ("thm8.1", dict(primes="3,7", j=7)),
            ("thm6.3", dict(p=5, k=1, r=1)),
            ("thm6.3", dict(p=13, k=1, r=0)),
            ("thm6.3", dict(p=5, k=0, r=0)),
            ("thm6.3", dict(p=5, k=1, r=0, t=7)),
            ("thm8.3", dict(p=3, k=1, r=1)),
            ("cor8.4", dict(p=5, k=1)),
            ("cor6.2", dict(p=5, k=0)),
            ("cor6.2", dict(p=5, k=0, j=1, x=3)),
        ],
    )
    def test_hypothesis_violations(self, fid, params):
        with pytest.raises(HypothesisError):
            instantiate_family(fid, params)

    def test_multi_prime_offsets(self):
        (p,) = instantiate_family("thm6.1", dict(primes="5,7", j=2))
        assert p.A == 25 * 49 and p.B == (25 * 7 * (24 + 7) - 1) // 12
        (q,) = instantiate_family("thm8.1", dict(primes=[3, 3], j=1))
        assert q.A == 81 and q.B == (9 * 3 * 7 - 1) // 4

    def test_variants_emitted(self):
        v = instantiate_family("thm6.3", dict(p=5, k=1, r=0))
        assert [factor_of_p.form.factor for factor_of_p in v] == [1, 3]
        v = instantiate_family("thm8.3", dict(p=3, k=1, r=0))
        assert [x.form.factor for x in v] == [3, 1]
        assert (v[0].A, v[0].B, v[0].form.target_A, v[0].form.target_B) == (9, 2, 1, 0)
        v = instantiate_family("cor8.4", dict(p=3, k=1))
        assert sorted(x.form.factor for x in v) == [1, 3]
        v = instantiate_family("cor8.4", dict(p=7, k=2))
        assert [x.form.factor for x in v] == [1, 3]


N_MAX = 2000


class TestFamilySuite:
    def test_thm61(self):
        for j in range(1, 5):
            for prog in instantiate_family("thm6.1", dict(primes="5,5", j=j)):
                assert verify(prog, N_MAX).holds

    @pytest.mark.parametrize("p", [5, 7, 11])
    def test_cor62(self, p):
        for j in range(1, p):
            (prog,) = instantiate_family("cor6.2", dict(p=p, k=0, j=j))
            assert verify(prog, N_MAX).holds

    @pytest.mark.parametrize("p", [3, 7, 11])
    def test_cor82(self, p):
        for j in range(1, p):
            (prog,) = instantiate_family("cor8.2", dict(p=p, k=0, j=j))
            assert verify(prog, N_MAX).holds

    @pytest.mark.parametrize("primes", ["3", "7", "3,3", "3,7", "7,3", "3,3,3"])
    def test_thm81(self, primes):
        last = int(primes.split(",")[-1])
        for j in (1, 2, last + 1):
            (prog,) = instantiate_family("thm8.1", dict(primes=primes, j=j))
            assert verify(prog, N_MAX).holds

    @pytest.mark.parametrize("p,expected", [(5, 3), (7, 1), (11, 1), (17, 3), (19, 1), (23, 1)])
    def test_thm63_adjudicated(self, p, expected):
        r = next(r for r in range(p) if (12 * r + p % 12) % p == 0)
        reports = [verify(x, N_MAX) for x in instantiate_family("thm6.3", dict(p=p, k=1, r=r))]
        holding = [factor_of(x) for x in reports if x.holds]
        assert holding == [expected]

    @pytest.mark.parametrize("p", [5, 7, 11])
    def test_cor64_adjudicated(self, p):
        reports = [verify(x, N_MAX) for x in instantiate_family("cor6.4", dict(p=p, k=1))]
        holding = [factor_of(x) for x in reports if x.holds]
        assert holding == [3 if p % 12 == 5 else 1]
        for rep in reports:
            if not rep.holds:
                n = rep.witness_n
                prog = rep.progression
                assert (rep.lhs, rep.rhs) == (
                    brute_force_B(2, prog.A * n + prog.B) % 4,
                    factor_of(rep) * brute_force_B(2, n) % 4,
                )

    @pytest.mark.parametrize("p", [3, 7])
    def test_thm83_cor84_adjudicated(self, p):
        r = next(r for r in range(p) if (4 * r + 3) % p == 0)
        reports = [verify(x, N_MAX) for x in instantiate_family("thm8.3", dict(p=p, k=1, r=r))]
        assert [(factor_of(x), x.holds) for x in reports] == [(3, False), (1, True)]
        for k in (1, 2):
            reports = [verify(x, N_MAX) for x in instantiate_family("cor8.4", dict(p=p, k=k))]
            assert {factor_of(x) for x in reports if x.holds} == {1}


class TestIdentities:
    def test_b4d(self):
        (r,) = coefficient_identity_check("B4-d", 5000)
        assert r.holds and r.modulus == 4

    def test_b2c(self):
        reports = coefficient_identity_check("B2-c", 5000)
        assert [(r.modulus, r.holds) for r in reports] == [(2, True), (4, True)]

    def test_b2c_first_term(self):
        from regbip.eta import EtaQuotient, q_expansion

        assert brute_force_B(2, 1) == 2
        assert q_expansion(EtaQuotient({12: 2}), 13)[13] == -2
        assert (-2) % 4 == brute_force_B(2, 1) % 4

    def test_unknown(self):
        with pytest.raises(KeyError):
            coefficient_identity_check("B3-x")


class TestDensity:
    @pytest.mark.parametrize("ell,M", [(4, 2), (2, 4)])
    def test_trend(self, ell, M):
        rep = density_scan(ell, M, [10**3, 10**4, 10**5])
        counts = [c for _, c, _ in rep.rows()]
        ratios = [r for _, _, r in rep.rows()]
        assert counts == sorted(counts)
        assert all(0 <= r <= 1 for r in ratios)
        if (ell, M) == (4, 2):
            assert ratios == sorted(ratios)

    def test_single_point(self):
        for ell, M in [(2, 2), (3, 3), (4, 4), (5, 2)]:
            (row,) = density_scan(ell, M, [1]).rows()
            assert row[2] in (0, 1)
            assert row[1] == (1 if brute_force_B(ell, 1) % M == 0 else 0)

    def test_exact_counts(self):
        rep = density_scan(3, 3, [50, 300])
        for x, count, ratio in rep.rows():
            assert count == sum(1 for n in range(1, x + 1) if brute_force_B(3, n) % 3 == 0)
            assert ratio == Fraction(count, x)

    def test_errors(self):
        with pytest.raises(ValueError):
            density_scan(2, 2, [])
        with pytest.raises(ValueError):
            density_scan(2, 2, [100, 10])
        with pytest.raises(CapacityError):
            density_scan(2, 2, [10**6 + 1])


class TestSerialization:
    def test_csv_and_json(self):
        progs = instantiate_family("thm8.3", dict(p=3, k=1, r=0))
        reports = [verify(p, 200) for p in progs]
        text = reports_to_csv(reports)
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["family", "parameters", "A", "B", "M", "form", "verdict", "witness_n"]
        assert rows[1][:5] == ["thm8.3", "p=3;k=1;r=0;variant=stated", "9", "2", "4"]
        assert rows[1][6:] == ["fails", "0"] and rows[2][6:] == ["holds", ""]
        doc = json.loads(reports_to_json(reports))
        assert doc[0]["verdict"] == "fails" and doc[0]["witness_n"] == 0
        assert doc[1]["parameters"]["variant"] == "unit"
        assert reports_to_json(reports) == reports_to_json([verify(p, 200) for p in progs])
