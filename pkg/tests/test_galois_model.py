"""Finite Galois model: triangular matrix group, congruence subgroups,
division-field indices."""

import random

import pytest

from cmtower.errors import ValidationError
from cmtower.galois_model import (SubgroupSpec, TriElement, compose,
                                  element_order, enumerate_group, identity,
                                  tower_indices)


class TestTriElement:
    def test_unit_required(self):
        with pytest.raises(ValidationError):
            TriElement(3, 2, 1, 3)

    def test_group_axioms_random(self):
        rng = random.Random(47)
        p, m = 5, 2
        mod = p ** m

        def rand():
            b = rng.randrange(1, mod)
            while b % p == 0:
                b = rng.randrange(1, mod)
            return TriElement(p, m, rng.randrange(mod), b)

        e = identity(p, m)
        for _ in range(100):
            x, y, z = rand(), rand(), rand()
            assert compose(compose(x, y), z) == compose(x, compose(y, z))
            assert compose(x, e) == x and compose(e, x) == x
            assert compose(x, x.inverse()) == e

    def test_noncommutative_witness(self):
        x = TriElement(3, 2, 1, 1)
        y = TriElement(3, 2, 0, 2)
        assert compose(x, y) != compose(y, x)

    def test_element_order_divides_group_order(self):
        p, m = 3, 2
        order = p ** m * p ** (m - 1) * (p - 1)
        for g in enumerate_group(p, m):
            assert order % element_order(g) == 0


class TestSubgroups:
    def test_full_group_order(self):
        # p = 3, m = 2: 9 choices of a, 6 units b
        assert len(enumerate_group(3, 2)) == 54
        assert SubgroupSpec(3, 2, 0, 0).order() == 54

    def test_orders_by_formula(self):
        for p in (3, 5):
            for m in (1, 2):
                for j in range(m + 1):
                    for k in range(m + 1):
                        spec = SubgroupSpec(p, m, j, k)
                        assert len(spec.elements()) == spec.order()

    def test_closure_violation_impossible(self):
        # spot check: products of subgroup elements stay inside
        spec = SubgroupSpec(3, 2, 1, 1)
        els = spec.elements()
        for x in els:
            for y in els:
                assert spec.contains(compose(x, y))

    def test_bad_levels_rejected(self):
        with pytest.raises(ValidationError):
            SubgroupSpec(3, 2, 3, 0)


class TestTowerIndices:
    def test_full_order_example(self):
        out = tower_indices(3, 2, 1)
        assert out["order_full"] == 54
        assert out["order_small_variant"] == 18

    def test_indices_are_p_power_and_cyclic(self):
        for p in (3, 5):
            for m in (1, 2, 3):
                for n in range(1, m + 1):
                    out = tower_indices(p, m, n)
                    assert out["index"] == p ** n
                    assert out["cyclic"]
                    assert out["generator_order"] == p ** n

    def test_bad_level_rejected(self):
        with pytest.raises(ValidationError):
            tower_indices(3, 2, 3)
        with pytest.raises(ValidationError):
            tower_indices(3, 2, 0)
