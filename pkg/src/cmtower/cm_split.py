"""CM fields split at p, realized through CRT coordinates.

A degree-2g field K = Q[x]/(f) with p split completely is handled
entirely through the 2g Hensel-lifted roots of f: embeddings become
coordinate evaluations, primes over p become root indices, and field
automorphisms become permutations of the roots.

Automorphisms are supplied as polynomials h(x) with f(h(x)) = 0 mod f
and labeled by root indices: the automorphism sending the base root
(index 0) to root i gets label i.  The CM type is a set of g labels
containing one label from each complex-conjugation orbit.
"""

from __future__ import annotations

import itertools

from .errors import InvariantError, ValidationError
from .lubin_tate import FormalGroupLaw, LTSeed, endo
from .padic import PadicInt, PadicPoly, TruncSeries, hensel_root


# ---------------------------------------------------------------------------
# integer polynomial arithmetic mod a monic f
# ---------------------------------------------------------------------------

def _ztrim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _zreduce(c, f):
    """Reduce an integer coefficient list mod monic f, exactly over Z."""
    c = list(c)
    d = len(f) - 1
    for i in range(len(c) - 1, d - 1, -1):
        q = c[i]
        if q:
            for j in range(d + 1):
                c[i - d + j] -= q * f[j]
    return _ztrim(c[:d])


def _zmulmod(a, b, f):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _zreduce(out, f)


def _zcompose_mod(outer, inner, f):
    """outer(inner(x)) mod f, exactly over Z."""
    acc = []
    for c in reversed(outer):
        acc = _zmulmod(acc, inner, f)
        if c:
            if acc:
                acc[0] += c
                acc = _ztrim(acc)
            else:
                acc = [c]
    return acc


class FieldElement:
    """An element of Q[x]/(f) with integer coefficients, kept reduced."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: "CMField", coeffs):
        self.field = field
        self.coeffs = tuple(_zreduce(list(coeffs), field.f))

    def __add__(self, other):
        a, b = list(self.coeffs), list(other.coeffs)
        n = max(len(a), len(b))
        a += [0] * (n - len(a))
        b += [0] * (n - len(b))
        return FieldElement(self.field, [x + y for x, y in zip(a, b)])

    def __neg__(self):
        return FieldElement(self.field, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return FieldElement(self.field, [other * x for x in self.coeffs])
        return FieldElement(self.field, _zmulmod(self.coeffs, other.coeffs,
                                                 self.field.f))

    def __pow__(self, n: int):
        if n < 0:
            raise ValidationError("negative powers are not available")
        acc = FieldElement(self.field, [1])
        base = self
        while n:
            if n & 1:
                acc = acc * base
            n >>= 1
            if n:
                base = base * base
        return acc

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field is other.field and self.coeffs == other.coeffs

    def __repr__(self):
        return f"FieldElement({list(self.coeffs)})"

    def to_json(self):
        return list(self.coeffs)


class CMField:
    """A degree-2g field with p split completely, automorphism data and
    a CM type.

    ``f`` is the monic defining polynomial (integer coefficient list,
    constant first).  ``autos`` is the full list of 2g automorphism
    polynomials; for g = 1 it defaults to [x, conj].  ``cm_type`` is a
    set of g automorphism labels, one per conjugation orbit.
    """

    __slots__ = ("f", "p", "N", "g", "roots", "conj", "cm_type",
                 "autos", "auto_by_label", "perm_by_label")

    def __init__(self, f, p, N, conj, cm_type, autos=None):
        f = list(f)
        if not f or f[-1] != 1:
            raise ValidationError("defining polynomial must be monic")
        deg = len(f) - 1
        if deg < 2 or deg % 2:
            raise ValidationError("defining polynomial must have even degree >= 2")
        self.f = f
        self.g = deg // 2
        self.p = p
        self.N = N

        # split p completely: 2g distinct simple roots mod p, Hensel-lifted
        fp = PadicPoly(p, N, f)
        residues = [r for r in range(p)
                    if sum(c * pow(r, i, p) for i, c in enumerate(f)) % p == 0]
        if len(residues) != deg:
            raise ValidationError(
                f"p = {p} does not split completely: {len(residues)} roots "
                f"mod p, need {deg}"
            )
        roots = []
        for r in sorted(residues):
            roots.append(hensel_root(fp, PadicInt(p, N, r)))
        self.roots = roots

        conj = _zreduce(list(conj), f)
        if _ztrim(_zcompose_mod(f, conj, f)):
            raise ValidationError("conjugation polynomial is not an automorphism")
        cc = _zcompose_mod(conj, conj, f)
        if cc != [0, 1]:
            raise ValidationError("conjugation is not an involution")
        self.conj = conj

        if autos is None:
            if self.g != 1:
                raise ValidationError(
                    "automorphism list is required for fields of degree > 2"
                )
            autos = [[0, 1], conj]
        autos = [_zreduce(list(h), f) for h in autos]
        if len(autos) != deg:
            raise ValidationError(f"need {deg} automorphisms, got {len(autos)}")
        self.autos = autos

        self.auto_by_label = {}
        self.perm_by_label = {}
        for h in autos:
            if _ztrim(_zcompose_mod(f, h, f)):
                raise ValidationError(f"{h} is not an automorphism")
            perm = tuple(self.root_index(self._eval_poly_at_root(h, i))
                         for i in range(deg))
            label = perm[0]
            if label in self.auto_by_label:
                raise ValidationError("duplicate automorphism label")
            self.auto_by_label[label] = h
            self.perm_by_label[label] = perm
        if set(self.auto_by_label) != set(range(deg)):
            raise ValidationError("automorphisms do not act transitively on roots")

        conj_perm = self.perm_by_label[self.root_index(
            self._eval_poly_at_root(conj, 0))]
        if any(conj_perm[i] == i for i in range(deg)):
            raise ValidationError("conjugation fixes a prime over p")

        cm_type = frozenset(cm_type)
        if len(cm_type) != self.g:
            raise ValidationError(f"CM type must have {self.g} labels")
        # conjugate of the label-i embedding has label conj_perm-of-i
        # computed on the base root
        covered = set()
        for i in cm_type:
            if i not in self.auto_by_label:
                raise ValidationError(f"unknown automorphism label {i}")
            j = self.root_index(self._eval_poly_at_root(
                _zcompose_mod(conj, self.auto_by_label[i], f), 0))
            if j in cm_type:
                raise ValidationError(
                    f"CM type contains a conjugate pair ({i}, {j})"
                )
            covered.update((i, j))
        if covered != set(range(deg)):
            raise ValidationError("CM type does not cover all conjugate orbits")
        self.cm_type = cm_type

    # -- root bookkeeping ---------------------------------------------

    def _eval_poly_at_root(self, coeffs, idx: int) -> PadicInt:
        acc = PadicInt(self.p, self.N, 0)
        r = self.roots[idx]
        for c in reversed(coeffs):
            acc = acc * r + c
        return acc

    def root_index(self, value: PadicInt) -> int:
        """Index of the root congruent to value mod p (roots are distinct
        mod p, so the residue determines the index)."""
        for i, r in enumerate(self.roots):
            if r.residue(1) == value.residue(1):
                return i
        raise InvariantError(f"value {value.value} is not near any root")

    def apply_auto(self, label: int, root_idx: int) -> int:
        """Index of h_label applied to root root_idx."""
        return self.perm_by_label[label][root_idx]

    def element(self, coeffs) -> FieldElement:
        return FieldElement(self, coeffs)

    def type_labels(self):
        return sorted(self.cm_type)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def embed(K: CMField, alpha: FieldElement):
    """The 2g CRT coordinates of alpha: component i is alpha at root i."""
    if alpha.field is not K:
        raise ValidationError("element does not belong to this field")
    return [K._eval_poly_at_root(alpha.coeffs, i) for i in range(2 * K.g)]


def pick_pi(K: CMField, fp_index: int, bound=None) -> FieldElement:
    """An element with valuation exactly 1 at the prime of fp_index and
    0 at every other prime over p, found by searching small-coefficient
    elements (existence is a CRT fact)."""
    if bound is None:
        bound = K.p
    deg = 2 * K.g
    ranges = [range(-bound, bound + 1)] * deg
    cands = itertools.product(*ranges)
    if (2 * bound + 1) ** deg <= 30000:
        # small boxes: search smallest coefficients first
        cands = sorted(cands, key=lambda c: (sum(map(abs, c)), c))
    for coeffs in cands:
        if not any(coeffs):
            continue
        alpha = K.element(coeffs)
        vec = [x.valuation() for x in embed(K, alpha)]
        if vec[fp_index] == 1 and all(
            v == 0 for i, v in enumerate(vec) if i != fp_index
        ):
            return alpha
    raise ValidationError(
        f"no uniformizer found with coefficients bounded by {bound}; "
        "enlarge the search box"
    )


def type_norm_check(K: CMField, alpha: FieldElement, P_index: int, cm_type=None):
    """Whether alpha's valuation vector is the indicator of the inverse
    CM type applied to the prime of P_index (the shape of a Frobenius
    element).  Returns (bool, valuation vector); the vector uses None
    for precision-capped entries."""
    if alpha.is_zero():
        raise ValidationError("type-norm check needs a nonzero element")
    labels = sorted(cm_type) if cm_type is not None else K.type_labels()
    support = {K.apply_auto(l, P_index) for l in labels}
    vec = [x.valuation() for x in embed(K, alpha)]
    ok = len(support) == len(labels) and all(
        (v == 1 if i in support else v == 0) for i, v in enumerate(vec)
    )
    return ok, vec


def ramified_set(K: CMField, fp_index: int, cm_type=None):
    """The root indices of the primes that ramify in the division tower:
    the images of the fp_index prime under the CM-type embeddings.

    The label-l embedding sends the prime of index k to the prime of
    index fp_index exactly when h_l maps root k to root fp_index."""
    labels = sorted(cm_type) if cm_type is not None else K.type_labels()
    out = set()
    for l in labels:
        perm = K.perm_by_label[l]
        out.add(perm.index(fp_index))
    return out


class ProductGroup:
    """Product of g one-dimensional Lubin-Tate groups over the completion
    at the prime of P_index, indexed by the CM type.

    Coordinate for label l uses the seed m_l*t + t^p where m_l is the
    image of the Frobenius-type element alpha under the label-l
    embedding, read off in the P_index completion.  The type-norm shape
    of alpha makes every m_l a uniformizer.
    """

    __slots__ = ("K", "alpha", "P_index", "labels", "coord_index",
                 "seeds", "trunc", "law")

    def __init__(self, K: CMField, alpha: FieldElement, P_index: int,
                 trunc: int, build_law=True):
        ok, vec = type_norm_check(K, alpha, P_index)
        if not ok:
            raise ValidationError(
                f"element does not have type-norm valuations at prime "
                f"{P_index}: {vec}"
            )
        self.K = K
        self.alpha = alpha
        self.P_index = P_index
        self.trunc = trunc
        self.labels = K.type_labels()
        # label-l embedding read in the P_index completion evaluates at
        # the image root h_l(r_P)
        self.coord_index = [K.apply_auto(l, P_index) for l in self.labels]
        avec = embed(K, alpha)
        self.seeds = []
        for idx in self.coord_index:
            m = avec[idx]
            if m.valuation() != 1:
                raise InvariantError("coordinate multiplier is not a uniformizer")
            self.seeds.append(LTSeed.standard(K.p, K.N, trunc, pi=m.value))
        self.law = self._assemble_law() if build_law else None

    @property
    def g(self):
        return self.K.g

    def embed_at_coords(self, beta: FieldElement):
        """The g images of beta under the CM-type embeddings, read in
        the P_index completion."""
        vec = embed(self.K, beta)
        return [vec[idx] for idx in self.coord_index]

    def _assemble_law(self) -> FormalGroupLaw:
        from .lubin_tate import group_law

        g = self.g
        laws = []
        for j, seed in enumerate(self.seeds):
            F = group_law(seed).F  # 2 variables: this coordinate's X, Y
            laws.append(F.map_vars(2 * g, [j, g + j]))
        return FormalGroupLaw(g, laws, tuple(self.seeds))


def product_cm_endo(G: ProductGroup, beta: FieldElement):
    """The coordinate endomorphism series of the CM action of beta:
    coordinate j is the [m]-endomorphism of seed j with m the label-j
    image of beta.  The jacobian is the diagonal of those images."""
    mults = G.embed_at_coords(beta)
    return [endo(seed, m) for seed, m in zip(G.seeds, mults)]


def kernel_locate(G: ProductGroup, pi: FieldElement, n: int = 1) -> int:
    """The unique coordinate where the pi^n action has non-unit linear
    coefficient (its kernel carries all the torsion); every other
    coordinate must act by an automorphism."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    mults = G.embed_at_coords(pi ** n)
    bad = [j for j, m in enumerate(mults) if not m.is_unit()]
    if len(bad) != 1:
        raise InvariantError(
            f"expected exactly one non-unit coordinate, found {bad} "
            f"(valuations {[m.valuation() for m in mults]})"
        )
    return bad[0]
