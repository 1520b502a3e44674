"""Split CM fields: CRT coordinates, uniformizer search, type-norm
shapes, product groups and kernel location."""

import random

import pytest

from cmtower.cm_split import (CMField, ProductGroup, embed, kernel_locate,
                              pick_pi, product_cm_endo, ramified_set,
                              type_norm_check)
from cmtower.errors import InvariantError, ValidationError
from cmtower.padic import PadicPoly, resultant_valuation


def gauss_field(p=5, N=14):
    """Q(i) with the default automorphism pair {identity, conjugation}."""
    return CMField([1, 0, 1], p, N, conj=[0, -1], cm_type=[0])


def cyclotomic5_field(N=14):
    """The degree-4 field on x^4 + x^3 + x^2 + x + 1 at p = 11, with
    automorphisms x -> x^k and CM type {1, 2}."""
    return CMField(
        [1, 1, 1, 1, 1], 11, N,
        conj=[0, 0, 0, 0, 1],
        cm_type=[1, 2],
        autos=[[0, 1], [0, 0, 1], [0, 0, 0, 1], [0, 0, 0, 0, 1]],
    )


class TestCMField:
    def test_gauss_roots(self):
        K = gauss_field()
        assert [r.residue(1) for r in K.roots] == [2, 3]
        assert K.roots[0].residue(3) == 57
        assert K.roots[1].residue(3) == 68

    def test_inert_prime_rejected(self):
        # x^2 + 1 is irreducible mod 7
        with pytest.raises(ValidationError):
            CMField([1, 0, 1], 7, 14, conj=[0, -1], cm_type=[0])

    def test_conj_must_be_involution(self):
        with pytest.raises(ValidationError):
            CMField([1, 0, 1], 5, 14, conj=[0, 1], cm_type=[0])

    def test_cm_type_conjugate_pair_rejected(self):
        with pytest.raises(ValidationError):
            CMField(
                [1, 1, 1, 1, 1], 11, 14,
                conj=[0, 0, 0, 0, 1],
                cm_type=[0, 1],  # labels 0 and 1 are a conjugate pair
                autos=[[0, 1], [0, 0, 1], [0, 0, 0, 1], [0, 0, 0, 0, 1]],
            )

    def test_degree4_labels_and_orbits(self):
        K = cyclotomic5_field()
        assert [r.residue(1) for r in K.roots] == [3, 4, 5, 9]
        assert set(K.auto_by_label) == {0, 1, 2, 3}
        assert K.type_labels() == [1, 2]

    def test_perms_compose_like_automorphisms(self):
        K = cyclotomic5_field()
        # the permutations form a group: composing two labeled perms
        # gives another labeled perm
        perms = set(K.perm_by_label.values())
        for a in perms:
            for b in perms:
                assert tuple(a[b[i]] for i in range(4)) in perms


class TestEmbed:
    def test_example_valuations(self):
        K = gauss_field()
        vec = embed(K, K.element([2, 1]))
        assert [x.valuation() for x in vec] == [0, 1]

    def test_ring_homomorphism_random(self):
        rng = random.Random(31)
        K = cyclotomic5_field()
        for _ in range(200):
            a = K.element([rng.randrange(-50, 50) for _ in range(4)])
            b = K.element([rng.randrange(-50, 50) for _ in range(4)])
            ea, eb = embed(K, a), embed(K, b)
            for x, y, z in zip(embed(K, a + b), ea, eb):
                assert x == y + z
            for x, y, z in zip(embed(K, a * b), ea, eb):
                assert x == y * z

    def test_valuation_sum_matches_resultant(self):
        # sum of coordinate valuations of alpha = ord Res(f, alpha)
        rng = random.Random(37)
        K = gauss_field(N=18)
        f = PadicPoly(K.p, K.N, K.f)
        for _ in range(40):
            coeffs = [rng.randrange(-30, 30), rng.randrange(-30, 30)]
            if not any(coeffs):
                continue
            alpha = K.element(coeffs)
            vals = [x.valuation() for x in embed(K, alpha)]
            g = PadicPoly(K.p, K.N, list(coeffs))
            want = resultant_valuation(f, g)
            if None in vals or want is None:
                continue
            assert sum(vals) == want


class TestPickPi:
    def test_gauss_uniformizers(self):
        K = gauss_field()
        for idx in (0, 1):
            pi = pick_pi(K, idx)
            vec = [x.valuation() for x in embed(K, pi)]
            assert vec[idx] == 1
            assert all(v == 0 for i, v in enumerate(vec) if i != idx)

    def test_deterministic(self):
        K = gauss_field()
        assert pick_pi(K, 0).coeffs == pick_pi(K, 0).coeffs

    def test_degree4(self):
        K = cyclotomic5_field()
        pi = pick_pi(K, 2, bound=2)
        vec = [x.valuation() for x in embed(K, pi)]
        assert vec[2] == 1 and vec.count(0) == 3


class TestTypeNorm:
    def test_rational_p_fails(self):
        # p has valuation 1 at every prime: too big a support
        K = gauss_field()
        ok, vec = type_norm_check(K, K.element([K.p]), 0)
        assert not ok and vec == [1, 1]

    def test_unit_fails(self):
        K = gauss_field()
        ok, vec = type_norm_check(K, K.element([1]), 0)
        assert not ok and vec == [0, 0]

    def test_gauss_frobenius_shape(self):
        K = gauss_field()
        ok, vec = type_norm_check(K, K.element([2, 1]), 1)
        assert ok and vec == [0, 1]

    def test_degree4_frobenius_shape(self):
        K = cyclotomic5_field()
        ok, vec = type_norm_check(K, K.element([-2, 2, 1]), 0)
        assert ok
        assert sorted(i for i, v in enumerate(vec) if v == 1) == \
            sorted(K.apply_auto(l, 0) for l in K.type_labels())


class TestRamifiedSet:
    def test_degree4(self):
        K = cyclotomic5_field()
        assert ramified_set(K, 0) == {1, 3}

    def test_partition_over_primes(self):
        # as fp_index varies, the ramified sets are the inverse-type
        # images and each has size g
        K = cyclotomic5_field()
        for idx in range(4):
            assert len(ramified_set(K, idx)) == K.g


class TestProductGroup:
    def test_gauss_group(self):
        K = gauss_field()
        G = ProductGroup(K, K.element([2, 1]), 1, trunc=10)
        assert G.g == 1 and len(G.seeds) == 1
        assert G.seeds[0].pi_val.valuation() == 1

    def test_rejects_non_frobenius(self):
        K = gauss_field()
        with pytest.raises(ValidationError):
            ProductGroup(K, K.element([K.p]), 0, trunc=10)

    def test_degree4_group_and_endo(self):
        K = cyclotomic5_field()
        alpha = K.element([-2, 2, 1])
        G = ProductGroup(K, alpha, 0, trunc=12)
        assert G.g == 2 and len(G.law.law) == 2
        # CM action is multiplicative: [b][c] = [b*c] coordinate-wise
        b, c = K.element([1, 1]), K.element([2, 0, 1])
        eb = product_cm_endo(G, b)
        ec = product_cm_endo(G, c)
        ebc = product_cm_endo(G, b * c)
        for sb, sc, sbc in zip(eb, ec, ebc):
            assert sb.compose([sc]).congruent(sbc)

    def test_cm_endo_jacobian_is_embedding(self):
        K = cyclotomic5_field()
        G = ProductGroup(K, K.element([-2, 2, 1]), 0, trunc=12,
                         build_law=False)
        beta = K.element([3, 1])
        mults = G.embed_at_coords(beta)
        for s, m in zip(product_cm_endo(G, beta), mults):
            assert s.coefficient((1,)) == m


class TestKernelLocate:
    def test_degree4_kernels(self):
        K = cyclotomic5_field()
        G = ProductGroup(K, K.element([-2, 2, 1]), 0, trunc=12,
                         build_law=False)
        for j, idx in enumerate(G.coord_index):
            pi = pick_pi(K, idx, bound=2)
            assert kernel_locate(G, pi) == j
            # the location is independent of the power
            assert kernel_locate(G, pi, n=2) == j

    def test_prime_outside_orbit_has_no_kernel(self):
        K = cyclotomic5_field()
        G = ProductGroup(K, K.element([-2, 2, 1]), 0, trunc=12,
                         build_law=False)
        outside = [i for i in range(4) if i not in G.coord_index]
        pi = pick_pi(K, outside[0], bound=2)
        with pytest.raises(InvariantError):
            kernel_locate(G, pi)
