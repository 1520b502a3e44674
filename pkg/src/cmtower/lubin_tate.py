"""One-dimensional Lubin-Tate formal groups.

A seed is a series d(t) = pi*t + ... with d(t) = t^p mod p.  Group laws,
[a]-endomorphisms and strict isomorphisms between seeds all come out of
one degree-by-degree recursion: the unique series phi with prescribed
linear part intertwining two seeds.  Each degree divides by pi^k - pi
(valuation exactly 1), so one digit of effective precision is spent per
degree; seeds are built with guard digits to absorb this.
"""

from __future__ import annotations

from .errors import InvariantError, ValidationError
from .padic import PadicInt, PadicPoly, TruncSeries, compositional_inverse


class LTSeed:
    """A Lubin-Tate seed: uniformizer pi_val and one-variable series d."""

    __slots__ = ("p", "N", "pi_val", "d")

    def __init__(self, pi_val: PadicInt, d: TruncSeries):
        if d.nvars != 1:
            raise ValidationError("seed series must be one-variable")
        if pi_val.p != d.p or pi_val.N != d.N:
            raise ValidationError("pi and d disagree on (p, N)")
        if pi_val.valuation() != 1:
            raise ValidationError("uniformizer must have valuation exactly 1")
        p = d.p
        if d.trunc < p:
            raise ValidationError(
                f"truncation degree {d.trunc} is below p = {p}; the seed "
                "congruence d = t^p mod p is not expressible"
            )
        if not d.constant_term().is_zero():
            raise ValidationError("seed has a constant term")
        if d.coefficient((1,)) != pi_val:
            raise ValidationError("linear coefficient of d must equal pi")
        for (k,), c in d.coeffs.items():
            if k == p:
                if c % p != 1:
                    raise ValidationError(
                        "coefficient of t^p must be 1 mod p"
                    )
            elif k >= 2 and c % p != 0:
                raise ValidationError(
                    f"coefficient of t^{k} must vanish mod p"
                )
        if d.coeffs.get((p,), 0) % p != 1:
            raise ValidationError("d must reduce to t^p mod p")
        self.p = p
        self.N = d.N
        self.pi_val = pi_val
        self.d = d

    @property
    def trunc(self) -> int:
        return self.d.trunc

    @property
    def is_polynomial(self) -> bool:
        """True when d has no term beyond degree p; torsion-polynomial
        work (local_tower) requires this."""
        return all(k <= self.p for (k,) in self.d.coeffs)

    def to_poly(self) -> PadicPoly:
        if not self.is_polynomial:
            raise ValidationError("seed is not polynomial of degree p")
        coeffs = [0] * (self.p + 1)
        for (k,), c in self.d.coeffs.items():
            coeffs[k] = c
        return PadicPoly(self.p, self.N, coeffs)

    @classmethod
    def from_coeffs(cls, p, N, trunc, coeffs):
        """Seed from a dense coefficient list [0, pi, a2, ...]."""
        d = TruncSeries.from_coeff_list(p, N, trunc, coeffs)
        return cls(d.coefficient((1,)), d)

    @classmethod
    def multiplicative(cls, p, N, trunc):
        """The seed (1+t)^p - 1, whose group law is X + Y + XY."""
        from math import comb

        return cls.from_coeffs(
            p, N, trunc, [0] + [comb(p, k) for k in range(1, p + 1)]
        )

    @classmethod
    def standard(cls, p, N, trunc, pi=None):
        """The seed pi*t + t^p (pi defaults to p)."""
        coeffs = [0, p if pi is None else pi] + [0] * (p - 2) + [1]
        return cls.from_coeffs(p, N, trunc, coeffs)

    def __repr__(self):
        return f"LTSeed(p={self.p}, pi={self.pi_val.value}, d={self.d!r})"


class FormalGroupLaw:
    """A g-dimensional formal group law: g series in 2g variables with
    linear part X_j + Y_j.  Built one-dimensionally here; cm_split
    assembles products."""

    __slots__ = ("nvars", "law", "seeds")

    def __init__(self, nvars, law, seeds):
        self.nvars = nvars
        self.law = tuple(law)
        self.seeds = tuple(seeds)
        if len(self.law) != nvars:
            raise ValidationError("law must have one series per dimension")

    @property
    def F(self) -> TruncSeries:
        if self.nvars != 1:
            raise ValidationError("F shortcut is one-dimensional only")
        return self.law[0]

    def add(self, xs, ys):
        """Formal sum of two coordinate tuples of series (each in some
        common ambient variable space)."""
        args = list(xs) + list(ys)
        return tuple(Fj.compose(args) for Fj in self.law)


class FglHom:
    """Homomorphism of formal group laws: series tuple plus its jacobian
    (matrix of linear coefficients)."""

    __slots__ = ("domain", "codomain", "series", "jacobian")

    def __init__(self, domain: FormalGroupLaw, codomain: FormalGroupLaw,
                 series, verify=True):
        self.domain = domain
        self.codomain = codomain
        self.series = tuple(series)
        g = domain.nvars
        if len(self.series) != codomain.nvars:
            raise ValidationError("series count must match codomain dimension")
        jac = []
        for s in self.series:
            if s.nvars != g:
                raise ValidationError("series arity must match domain dimension")
            if not s.constant_term().is_zero():
                raise ValidationError("homomorphism series has a constant term")
            row = []
            for i in range(g):
                e = tuple(1 if k == i else 0 for k in range(g))
                row.append(s.coefficient(e))
            jac.append(row)
        self.jacobian = jac
        if verify:
            self._verify_hom()

    def _verify_hom(self):
        # phi(F(X,Y)) = G(phi X, phi Y) through the truncation degree
        g = self.domain.nvars
        s0 = self.series[0]
        xs = [TruncSeries.variable(s0.p, s0.N, 2 * g, s0.trunc, i)
              for i in range(g)]
        ys = [TruncSeries.variable(s0.p, s0.N, 2 * g, s0.trunc, g + i)
              for i in range(g)]
        fxy = [Fj.compose(xs + ys) for Fj in self.domain.law]
        lhs = [s.compose(fxy) for s in self.series]
        phix = [s.compose(xs) for s in self.series]
        phiy = [s.compose(ys) for s in self.series]
        rhs = [Gj.compose(phix + phiy) for Gj in self.codomain.law]
        for a, b in zip(lhs, rhs):
            if not a.congruent(b):
                raise InvariantError("series do not intertwine the group laws")

    def det_jacobian(self) -> PadicInt:
        g = len(self.jacobian)
        if g == 1:
            return self.jacobian[0][0]
        from .padic import ring_det

        p, N = self.jacobian[0][0].p, self.jacobian[0][0].N
        return ring_det(self.jacobian, PadicInt(p, N, 0), PadicInt(p, N, 1))

    def is_invertible(self) -> bool:
        return self.det_jacobian().is_unit()

    def inverse(self) -> "FglHom":
        """Compositional inverse; fails unless the jacobian determinant
        is a unit."""
        if not self.is_invertible():
            raise ValidationError(
                "homomorphism is not invertible: jacobian determinant "
                "is not a unit"
            )
        if self.domain.nvars != 1:
            raise ValidationError("inverse implemented for dimension 1 only")
        inv = compositional_inverse(self.series[0])
        return FglHom(self.codomain, self.domain, (inv,), verify=False)


# ---------------------------------------------------------------------------
# The fundamental recursion
# ---------------------------------------------------------------------------

def _lt_solve(linear: TruncSeries, src: LTSeed, dst: LTSeed) -> TruncSeries:
    """The unique phi = linear + higher with dst.d(phi) = phi(src.d per
    variable), solved degree by degree.

    Degree k corrects by R_k / (pi^k - pi); the divisor has valuation
    exactly 1 and the obstruction must be divisible by pi, else the
    seeds fail the defining congruences.
    """
    if src.p != dst.p or src.N != dst.N:
        raise ValidationError("seeds disagree on (p, N)")
    if src.pi_val != dst.pi_val:
        raise ValidationError("seeds have different uniformizers")
    p, N = src.p, src.N
    n = linear.nvars
    D = linear.trunc
    pi = src.pi_val
    mod = p ** N
    src_args = [
        TruncSeries(p, N, n, D,
                    {tuple(k if j == i else 0 for j in range(n)): c
                     for (k,), c in src.d.coeffs.items()})
        for i in range(n)
    ]
    phi = linear
    for k in range(2, D + 1):
        lhs = dst.d.compose([phi], trunc=k)
        rhs = phi.compose(src_args, trunc=k)
        diff = lhs - rhs
        divisor = pi ** k - pi
        if divisor.valuation() != 1:
            raise InvariantError("correction divisor lost valuation 1")
        new_coeffs = dict(phi.coeffs)
        for e, c in diff.homogeneous_part(k).items():
            ce = PadicInt(p, N, c)
            if ce.is_zero():
                continue
            if ce.valuation() == 0:
                raise InvariantError(
                    f"obstruction at degree {k} is a unit: input is not a "
                    "valid Lubin-Tate seed pair"
                )
            corr = ce.divide_exact(divisor)
            v = (new_coeffs.get(e, 0) + corr.value) % mod
            if v:
                new_coeffs[e] = v
            elif e in new_coeffs:
                del new_coeffs[e]
        phi = TruncSeries(p, N, n, D, new_coeffs, phi.eff_prec - 1)
    return phi


def solve_intertwine(a: PadicInt, src: LTSeed, dst: LTSeed) -> TruncSeries:
    """The unique series phi = a*t + higher with dst.d(phi(t)) =
    phi(src.d(t)).  a must be integral (it is, as a PadicInt)."""
    linear = TruncSeries(src.p, src.N, 1, src.trunc, {(1,): a.value})
    if a.is_zero():
        return TruncSeries(src.p, src.N, 1, src.trunc, {})
    return _lt_solve(linear, src, dst)


def group_law(seed: LTSeed) -> FormalGroupLaw:
    """The unique F(X, Y) = X + Y + higher with F(d(X), d(Y)) = d(F(X, Y))."""
    p, N, D = seed.p, seed.N, seed.trunc
    linear = TruncSeries(p, N, 2, D, {(1, 0): 1, (0, 1): 1})
    F = _lt_solve(linear, seed, seed)
    return FormalGroupLaw(1, (F,), (seed,))


def endo(seed: LTSeed, a: PadicInt) -> TruncSeries:
    """The endomorphism [a](t) = a*t + higher commuting with the seed."""
    return solve_intertwine(a, seed, seed)


def strict_iso(src: LTSeed, dst: LTSeed) -> FglHom:
    """The strict isomorphism (identity jacobian) between the group laws
    of two seeds sharing a uniformizer."""
    one = PadicInt(src.p, src.N, 1)
    phi = solve_intertwine(one, src, dst)
    return FglHom(group_law(src), group_law(dst), (phi,), verify=False)


def verify_pi_shape(seed: LTSeed) -> dict:
    """Decompose the seed's own pi-endomorphism as
    pi*t + u*t^p + pi*alpha(t) + beta(t) with u a unit, alpha supported
    in degrees 2..2p-1 (excluding p) and beta in degrees >= 2p.

    Returns the decomposition; ``ok`` is False with a counterexample
    coefficient if the structure fails (the test harness treats that as
    a bug, not an expected outcome).
    """
    p, N, D = seed.p, seed.N, seed.trunc
    s = endo(seed, seed.pi_val)  # equals seed.d by uniqueness
    pi = seed.pi_val
    u = s.coefficient((p,))
    alpha = {}
    beta = {}
    report = {
        "ok": True,
        "u": u,
        "counterexample": None,
    }
    if not u.is_unit():
        report["ok"] = False
        report["counterexample"] = (p, u)
    if s.coefficient((1,)) != pi:
        report["ok"] = False
        report["counterexample"] = (1, s.coefficient((1,)))
    for (k,), c in s.coeffs.items():
        if k in (1, p):
            continue
        if k >= 2 * p:
            beta[(k,)] = c
            continue
        ce = PadicInt(p, N, c)
        v = ce.valuation()
        if v is not None and v < 1:
            report["ok"] = False
            report["counterexample"] = (k, ce)
            continue
        alpha[(k,)] = ce.divide_exact(pi).value
    report["alpha"] = TruncSeries(p, N, 1, D, alpha,
                                  max(1, s.eff_prec - 1))
    report["beta"] = TruncSeries(p, N, 1, D, beta, s.eff_prec)
    return report
