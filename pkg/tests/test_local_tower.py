"""Division towers: torsion polynomials, exact valuations,
discriminants, point division and the ramified-step conductor."""

import random

import pytest

from cmtower.errors import InvariantError, ValidationError
from cmtower.local_tower import (DivisionState, EisensteinTower,
                                 LocalElement, character_conductor_floor,
                                 divide_point, division_conductor,
                                 e_invariant, elem_ord, filtration_step,
                                 level_disc, torsion_poly)
from cmtower.lubin_tate import LTSeed
from cmtower.padic import PadicInt, newton_polygon


def tower(p, N=40, kind="standard", trunc=None):
    if trunc is None:
        trunc = p + 2
    make = LTSeed.standard if kind == "standard" else LTSeed.multiplicative
    return EisensteinTower(make(p, N, trunc))


class TestTorsionPolys:
    def test_degrees(self):
        for p in (3, 5):
            t = tower(p)
            for n in (1, 2):
                h = torsion_poly(t, n)
                assert h.degree == p ** (n - 1) * (p - 1)

    def test_h1_polygon(self):
        for p in (3, 5):
            for kind in ("standard", "multiplicative"):
                t = tower(p, kind=kind)
                poly = newton_polygon(torsion_poly(t, 1))
                assert poly.single_slope() is not None
                assert poly.single_slope().denominator == p - 1
                assert poly.single_slope().numerator == 1

    def test_constant_terms_are_uniformizers(self):
        for p in (3, 5):
            t = tower(p, kind="multiplicative")
            for n in (1, 2):
                assert torsion_poly(t, n).coefficient(0).valuation() == 1

    def test_multiplicative_h1_is_cyclotomic(self):
        # for (1+t)^p - 1 the level-1 polynomial is the shifted
        # cyclotomic polynomial: h_1(t) = ((1+t)^p - 1)/t
        from math import comb

        p = 5
        t = tower(p, kind="multiplicative")
        h = torsion_poly(t, 1)
        assert [c for c in h.coeffs] == [comb(p, k + 1) for k in range(p)]

    def test_nonpolynomial_seed_rejected(self):
        seed = LTSeed.from_coeffs(3, 20, 8, [0, 3, 0, 1, 3])
        with pytest.raises(ValidationError):
            EisensteinTower(seed).build(1)


class TestValuations:
    def test_examples(self):
        t = tower(5)
        assert elem_ord(t.lam(1)) == 1
        assert elem_ord(t.element(1, [5])) == 4
        assert elem_ord(t.element(2, [0, 0, 5])) == 22

    def test_base_case(self):
        t = tower(5)
        assert elem_ord(PadicInt(5, 40, 75)) == 2
        assert elem_ord(t.element(1, [])) is None

    def test_multiplicative_law_random(self):
        rng = random.Random(41)
        p = 3
        t = tower(p)
        t.build(2)
        cap = t.degree(2) * (t.N - 4)
        for _ in range(150):
            a = t.element(2, [rng.randrange(3 ** 20) for _ in range(6)])
            b = t.element(2, [rng.randrange(3 ** 20) for _ in range(6)])
            va, vb = elem_ord(a), elem_ord(b)
            if va is None or vb is None or va + vb >= cap:
                continue
            assert elem_ord(a * b) == va + vb
            s = elem_ord(a + b)
            if va != vb:
                assert s == min(va, vb)
            else:
                assert s is None or s >= va

    def test_defining_relation(self):
        # h_n(lambda_n) = 0 in the level-n ring
        for p in (3, 5):
            t = tower(p)
            for n in (1, 2):
                h = torsion_poly(t, n)
                lam = t.lam(n)
                acc = t.element(n, [])
                for c in reversed(h.coeffs):
                    acc = acc * lam + c
                assert acc.is_zero()


class TestFiltration:
    def test_step_adds_one_base_unit(self):
        rng = random.Random(43)
        for p in (3, 5):
            t = tower(p)
            t.build(2)
            d = t.degree(2)
            for _ in range(30):
                coeffs = [p * rng.randrange(1, p ** 10) for _ in range(d)]
                x = t.element(2, coeffs)
                v = elem_ord(x)
                if v is None or v >= d * (t.N - 3):
                    continue
                assert elem_ord(filtration_step(t, x)) == v + d

    def test_rejects_unit_points(self):
        t = tower(3)
        t.build(1)
        with pytest.raises(ValidationError):
            filtration_step(t, t.element(1, [1]))


class TestDiscriminant:
    def test_values(self):
        for p in (3, 5):
            for kind in ("standard", "multiplicative"):
                t = tower(p, kind=kind)
                assert level_disc(t) == p * (p - 1)
                assert character_conductor_floor(t) == p

    def test_floor_units(self):
        t = tower(3)
        assert character_conductor_floor(t) == 3


class TestDivide:
    def test_depth_invariant(self):
        assert e_invariant(PadicInt(5, 40, 25)) == 2
        with pytest.raises(ValidationError):
            e_invariant(PadicInt(5, 40, 2))
        with pytest.raises(ValidationError):
            e_invariant(PadicInt(5, 40, 0))

    def test_immediate_ramification(self):
        t = tower(5)
        st = DivisionState.start(PadicInt(5, 40, 5))
        st = divide_point(t, st, 3)
        assert st.ramified_at == 1 and st.level == 1
        assert st.history == ()

    def test_split_then_ramify(self):
        t = tower(5)
        st = DivisionState.start(PadicInt(5, 40, 25))
        st1 = divide_point(t, st, 1)
        assert st1.ramified_at is None and len(st1.history) == 1
        # the division value actually divides: d(root) = t0
        root = st1.history[0]
        d = t.seed.to_poly()
        assert d.evaluate(root).congruent(st.t0, t.N - 2)
        assert root.valuation() == 1
        st2 = divide_point(t, st1, 5)
        assert st2.ramified_at == 2

    def test_cannot_continue_past_ramification(self):
        t = tower(3)
        st = divide_point(t, DivisionState.start(PadicInt(3, 40, 3)), 1)
        with pytest.raises(ValidationError):
            divide_point(t, st, 2)


class TestConductor:
    def test_all_jumps_two(self):
        for p in (3, 5):
            for kind in ("standard", "multiplicative"):
                t = tower(p)
                st = divide_point(
                    t, DivisionState.start(PadicInt(p, 40, p)), 1)
                rep = division_conductor(t, st)
                assert set(rep.deltas.values()) == {2}
                assert rep.disc_exponent == 2 * (p - 1)
                assert rep.conductor_exponent == 2
                assert rep.break_value == 1

    def test_depth_two(self):
        p = 5
        t = tower(p)
        st = divide_point(
            t, DivisionState.start(PadicInt(p, 40, p * p)), 5)
        rep = division_conductor(t, st)
        assert rep.e == 2 and rep.conductor_exponent == 2
        assert any("assumption" in line for line in rep.provenance)

    def test_kummer_cross_check(self):
        # independent route for the multiplicative seed: dividing the
        # point w = 1 + t0 is a Kummer extension of the cyclotomic
        # field, whose conductor exponent is p - m + 1 where m is the
        # lambda-valuation of w - 1 = t0
        for p in (3, 5):
            t = tower(p, kind="multiplicative")
            t0 = PadicInt(p, 40, p)
            st = divide_point(t, DivisionState.start(t0), 1)
            rep = division_conductor(t, st)
            m = elem_ord(t.element(1, [t0]))
            assert m == (p - 1) * t0.valuation()
            assert rep.conductor_exponent == p - m + 1

    def test_prime_exponent_broadcast(self):
        t = tower(3)
        st = divide_point(t, DivisionState.start(PadicInt(3, 40, 3)), 1)
        rep = division_conductor(t, st, ramified_primes={0, 2})
        assert rep.prime_exponents == {0: 2, 2: 2}

    def test_requires_ramified_state(self):
        t = tower(3)
        with pytest.raises(ValidationError):
            division_conductor(t, DivisionState.start(PadicInt(3, 40, 9)))
