"""Finite model of the tower's Galois groups.

The group at depth m consists of matrices (1 a; 0 b) with a in Z/p^m and
b a unit of Z/p^m; a acts as translation by torsion, b as the character
on torsion.  The division-field degrees fall out of counting congruence
subgroups: the fixer of the n-th torsion field is {b = 1 mod p^n}, the
fixer of the n-th division field additionally has {a = 0 mod p^n}, and
the index between them is p^n with cyclic quotient.

The a-entry ranges over all of Z/p^m (group order p^m * p^(m-1)(p-1));
a smaller variant with a confined to one additive line (order
p * p^(m-1)(p-1)) would break the index bookkeeping below, so it is not
used, but tower_indices reports both orders to keep the choice visible.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import InvariantError, ValidationError


@dataclass(frozen=True)
class TriElement:
    """The matrix (1 a; 0 b) over Z/p^m, b a unit."""

    p: int
    m: int
    a: int
    b: int

    def __post_init__(self):
        mod = self.p ** self.m
        object.__setattr__(self, "a", self.a % mod)
        object.__setattr__(self, "b", self.b % mod)
        if gcd(self.b, self.p) != 1:
            raise ValidationError("lower-right entry must be a unit")

    def inverse(self) -> "TriElement":
        mod = self.p ** self.m
        binv = pow(self.b, -1, mod)
        return TriElement(self.p, self.m, -self.a * binv, binv)

    def is_identity(self) -> bool:
        return self.a == 0 and self.b % (self.p ** self.m) == 1


def identity(p: int, m: int) -> TriElement:
    return TriElement(p, m, 0, 1)


def compose(x: TriElement, y: TriElement) -> TriElement:
    """Matrix product: (1 a; 0 b)(1 a'; 0 b') = (1, a' + a b'; 0, b b')."""
    if (x.p, x.m) != (y.p, y.m):
        raise ValidationError("elements live at different levels")
    return TriElement(x.p, x.m, y.a + x.a * y.b, x.b * y.b)


def element_order(x: TriElement) -> int:
    acc = x
    n = 1
    bound = (x.p ** x.m) ** 2
    while not acc.is_identity():
        acc = compose(acc, x)
        n += 1
        if n > bound:
            raise InvariantError("element order exceeded the group order")
    return n


def enumerate_group(p: int, m: int, a_mod: int = 0, b_mod: int = 0):
    """All elements with a = 0 mod p^a_mod and b = 1 mod p^b_mod."""
    mod = p ** m
    astep = p ** a_mod
    bstep = p ** b_mod
    out = []
    for a in range(0, mod, astep):
        for b in range(1, mod, 1):
            if b % p == 0:
                continue
            if (b - 1) % bstep == 0:
                out.append(TriElement(p, m, a, b))
    return out


@dataclass(frozen=True)
class SubgroupSpec:
    """Congruence subgroup {a = 0 mod p^j, b = 1 mod p^k}."""

    p: int
    m: int
    j: int
    k: int

    def __post_init__(self):
        if not (0 <= self.j <= self.m and 0 <= self.k <= self.m):
            raise ValidationError("congruence levels must lie in [0, m]")
        # closure is automatic: a'' = a' + a b' and b'' = b b' preserve
        # both congruences; verified by enumeration when small
        if self.order() <= 2000:
            els = self.elements()
            idx = {(e.a, e.b) for e in els}
            for x in els[: min(len(els), 40)]:
                for y in els[: min(len(els), 40)]:
                    z = compose(x, y)
                    if (z.a, z.b) not in idx:
                        raise InvariantError("congruence set is not closed")

    def contains(self, x: TriElement) -> bool:
        return (x.a % self.p ** self.j == 0
                and (x.b - 1) % self.p ** self.k == 0)

    def elements(self):
        return enumerate_group(self.p, self.m, self.j, self.k)

    def order(self) -> int:
        p, m = self.p, self.m
        # b ranges over units congruent to 1 mod p^k: all units when
        # k = 0, a pro-p slice otherwise
        b_count = p ** (m - 1) * (p - 1) if self.k == 0 else p ** (m - self.k)
        return p ** (m - self.j) * b_count


def tower_indices(p: int, m: int, n: int) -> dict:
    """Counting argument for the division-field degree at level n of a
    depth-m model: index p^n with cyclic quotient, certified by element
    orders."""
    if not (1 <= n <= m):
        raise ValidationError("need 1 <= n <= m")
    full = SubgroupSpec(p, m, 0, 0)
    fix_tors = SubgroupSpec(p, m, 0, n)   # fixes the n-th torsion field
    fix_div = SubgroupSpec(p, m, n, n)    # additionally fixes division values

    order_full = len(full.elements())
    order_tors = len(fix_tors.elements())
    order_div = len(fix_div.elements())
    if order_full != p ** m * p ** (m - 1) * (p - 1):
        raise InvariantError("full group order does not match the count")
    if order_tors != p ** (2 * m - n) or order_div != p ** (2 * m - 2 * n):
        raise InvariantError("subgroup orders do not match the counts")
    index = order_tors // order_div

    # normality of fix_div in fix_tors: conjugation sends (alpha, beta)
    # to (b^-1 (alpha + a(beta-1)), beta), which preserves both
    # congruences; spot-check it
    sample = fix_tors.elements()
    for x in sample[:: max(1, len(sample) // 25)]:
        for g in fix_div.elements()[:: max(1, order_div // 10)]:
            conj = compose(compose(x, g), x.inverse())
            if not fix_div.contains(conj):
                raise InvariantError("division fixer is not normal")

    # cyclicity: the coset of (1, 1) generates; its order in the
    # quotient is the first power landing in fix_div
    gen = TriElement(p, m, 1, 1)
    acc = gen
    order_q = 1
    while not fix_div.contains(acc):
        acc = compose(acc, gen)
        order_q += 1
        if order_q > index:
            raise InvariantError("generator order exceeded the index")
    if order_q != index:
        raise InvariantError(
            f"quotient is not cyclic of order {index}: generator order "
            f"{order_q}"
        )
    if index != p ** n:
        raise InvariantError(f"index {index} != p^{n}")
    return {
        "order_full": order_full,
        "order_small_variant": p * p ** (m - 1) * (p - 1),
        "order_fix_torsion": order_tors,
        "order_fix_division": order_div,
        "index": index,
        "cyclic": True,
        "generator_order": order_q,
    }
