"""Formal group of a short Weierstrass curve, with CM.

Everything here is exact rational arithmetic: the parameter expansion
w(z), the invariant differential, formal log and exp, and the group law
F = exp(log X + log Y) are computed over Fractions, and only at the very
end are coefficients reduced mod p^N.  p-integrality of a series is
therefore decided, not approximated.

CM coefficients live in Q(i), represented as (real, imaginary) Fraction
pairs; the split prime embeds i as a Hensel-lifted square root of -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvariantError, ValidationError
from .lubin_tate import FglHom, LTSeed, group_law as lt_group_law, solve_intertwine
from .padic import PadicInt, PadicPoly, TruncSeries, hensel_root

Frac = Fraction


# ---------------------------------------------------------------------------
# Fraction-coefficient series helpers (dense dicts keyed by exponent)
# ---------------------------------------------------------------------------

def _mul1(a: dict, b: dict, D: int) -> dict:
    out = {}
    for i, x in a.items():
        if i > D:
            continue
        for j, y in b.items():
            if i + j > D:
                continue
            out[i + j] = out.get(i + j, 0) + x * y
    return {k: v for k, v in out.items() if v}


def _add1(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
        if not out[k]:
            del out[k]
    return out


def _inv_unit1(a: dict, D: int) -> dict:
    """1/a for a power series with a(0) = 1."""
    if a.get(0) != 1:
        raise ValidationError("inversion needs constant term 1")
    inv = {0: Frac(1)}
    for k in range(1, D + 1):
        s = Frac(0)
        for j in range(1, k + 1):
            if j in a and (k - j) in inv:
                s += a[j] * inv[k - j]
        if s:
            inv[k] = -s
    return inv


def _comp_inverse1(f: dict, D: int) -> dict:
    """Compositional inverse of f = z + higher over the rationals."""
    if f.get(1) != 1 or 0 in f:
        raise ValidationError("inverse needs f = z + higher")
    g = {1: Frac(1)}
    for k in range(2, D + 1):
        # coefficient of z^k in f(g): drive it to 0 by adjusting g_k,
        # which enters the composition with unit coefficient f_1 = 1
        comp = {}
        gpow = {0: Frac(1)}
        exp = 0
        for j in sorted(f):
            if j == 0:
                continue
            while exp < j:
                gpow = _mul1(gpow, g, k)
                exp += 1
            for e, c in gpow.items():
                comp[e] = comp.get(e, 0) + f[j] * c
        ck = comp.get(k, Frac(0))
        if ck:
            g[k] = -ck
    return g


def _compose_1to2(f: dict, arg: dict, D: int) -> dict:
    """f(arg) for one-variable f and a two-variable argument (dict keyed
    by (i, j)) with zero constant term."""
    pow_cache = {0: {(0, 0): Frac(1)}}

    def arg_pow(k):
        if k not in pow_cache:
            prev = arg_pow(k - 1)
            out = {}
            for (i1, j1), x in prev.items():
                for (i2, j2), y in arg.items():
                    i, j = i1 + i2, j1 + j2
                    if i + j > D:
                        continue
                    out[(i, j)] = out.get((i, j), 0) + x * y
            pow_cache[k] = {k2: v for k2, v in out.items() if v}
        return pow_cache[k]

    out = {}
    for k, c in sorted(f.items()):
        if k == 0 or k > D:
            continue
        for e, v in arg_pow(k).items():
            out[e] = out.get(e, 0) + c * v
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------

def gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def gadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def gconj(a):
    return (a[0], -a[1])


def gnorm(a):
    return a[0] * a[0] + a[1] * a[1]


def gaussian(re, im=0):
    return (Frac(re), Frac(im))


def _gmul1(a: dict, b: dict, D: int) -> dict:
    """Product of one-variable series with Gaussian coefficients."""
    out = {}
    for i, x in a.items():
        for j, y in b.items():
            if i + j > D:
                continue
            e = i + j
            prev = out.get(e, (Frac(0), Frac(0)))
            out[e] = gadd(prev, gmul(x, y))
    return {k: v for k, v in out.items() if v != (0, 0)}


def _gcompose1(f: dict, arg: dict, D: int) -> dict:
    """f(arg) with rational f and Gaussian-coefficient argument."""
    out = {}
    power = {0: gaussian(1)}
    exp = 0
    for k in sorted(f):
        if k == 0:
            if f[k]:
                raise ValidationError("series must have no constant term")
            continue
        while exp < k:
            power = _gmul1(power, arg, D)
            exp += 1
        for e, v in power.items():
            if e > D:
                continue
            prev = out.get(e, (Frac(0), Frac(0)))
            out[e] = gadd(prev, (f[k] * v[0], f[k] * v[1]))
    return {k: v for k, v in out.items() if v != (0, 0)}


# ---------------------------------------------------------------------------
# curve and formal data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeierstrassCurve:
    """y^2 = x^3 + a x + b with integer coefficients."""

    a: int
    b: int

    @property
    def discriminant(self) -> int:
        return -16 * (4 * self.a ** 3 + 27 * self.b ** 2)

    def good_reduction_at(self, p: int) -> bool:
        return p > 2 and self.discriminant % p != 0


class EllipticFormalData:
    """Formal expansion data of a curve in z = -x/y: the parameter
    series w(z), invariant differential, log, exp, and group law F."""

    __slots__ = ("curve", "D", "w", "omega", "log", "exp", "F")

    def __init__(self, curve: WeierstrassCurve, D: int):
        self.curve = curve
        self.D = D
        a, b = Frac(curve.a), Frac(curve.b)
        lim = D + 4
        # w = z^3 + a z w^2 + b w^3, iterated to a fixpoint
        w = {3: Frac(1)}
        for _ in range(lim):
            w2 = _mul1(w, w, lim)
            w3 = _mul1(w2, w, lim)
            nw = {3: Frac(1)}
            for k, v in _mul1({1: a}, w2, lim).items():
                nw[k] = nw.get(k, 0) + v
            for k, v in w3.items():
                nw[k] = nw.get(k, 0) + b * v
            nw = {k: v for k, v in nw.items() if v}
            if nw == w:
                break
            w = nw
        self.w = w
        # u = w/z^3 is a unit; with v = 1/u the differential is
        # (1 - z v'/(2v)) dz, normalized to start at 1
        u = {k - 3: v for k, v in w.items()}
        v = _inv_unit1(u, D)
        vp = {k - 1: k * c for k, c in v.items() if k >= 1}
        zvp = {k + 1: c for k, c in vp.items()}
        corr = _mul1(zvp, _inv_unit1(v, D), D)
        omega = {0: Frac(1)}
        for k, c in corr.items():
            if k <= D:
                omega[k] = omega.get(k, 0) - c / 2
        omega = {k: c for k, c in omega.items() if c}
        self.omega = omega
        self.log = {k + 1: c / (k + 1) for k, c in omega.items()}
        self.exp = _comp_inverse1(self.log, D)
        # group law F = exp(log X + log Y); must be integral
        logx = {(k, 0): c for k, c in self.log.items()}
        logy = {(0, k): c for k, c in self.log.items()}
        arg = dict(logx)
        for e, c in logy.items():
            arg[e] = arg.get(e, 0) + c
        F = _compose_1to2(self.exp, arg, D)
        for e, c in F.items():
            if c.denominator != 1:
                raise InvariantError(
                    f"group law coefficient at {e} is not an integer: {c}"
                )
        self.F = F
        if any(e[1] == 0 and c != (1 if e == (1, 0) else 0)
               for e, c in F.items()):
            raise InvariantError("F(X, 0) != X")


def curve_group_law(curve: WeierstrassCurve, D: int, p=None) -> EllipticFormalData:
    """Formal data through degree D; if p is given, good reduction there
    is required."""
    if p is not None and not curve.good_reduction_at(p):
        raise ValidationError(
            f"curve has bad reduction at {p} (discriminant "
            f"{curve.discriminant})"
        )
    return EllipticFormalData(curve, D)


# ---------------------------------------------------------------------------
# CM endomorphisms
# ---------------------------------------------------------------------------

def cm_endo_elliptic(data: EllipticFormalData, alpha) -> dict:
    """[alpha](z) = exp(alpha * log z) as a series with Gaussian-rational
    coefficients; alpha is (re, im) over the integers or Fractions."""
    alpha = gaussian(*alpha) if not isinstance(alpha, tuple) else (
        Frac(alpha[0]), Frac(alpha[1]))
    alog = {k: (alpha[0] * c, alpha[1] * c) for k, c in data.log.items()}
    return _gcompose1(data.exp, alog, data.D)


def gauss_embed_root(p: int, N: int) -> PadicInt:
    """The Hensel lift of the smaller square root of -1 mod p."""
    if p % 4 != 1:
        raise ValidationError(f"p = {p} is not split in the Gaussian field")
    r0 = min(r for r in range(p) if (r * r + 1) % p == 0)
    f = PadicPoly(p, N, [1, 0, 1])
    return hensel_root(f, PadicInt(p, N, r0))


def embed_gauss_series(series: dict, p: int, N: int, trunc: int,
                       root: PadicInt) -> TruncSeries:
    """Reduce a Gaussian-rational series mod p^N via i -> root; every
    coefficient must be p-integral or the CM/reduction hypotheses are
    falsified."""
    mod = p ** N
    out = {}
    for k, (re, im) in series.items():
        if re.denominator % p == 0 or im.denominator % p == 0:
            raise InvariantError(
                f"coefficient at degree {k} is not {p}-integral: "
                f"{re} + {im} i"
            )
        val = (re.numerator * pow(re.denominator, -1, mod)
               + im.numerator * pow(im.denominator, -1, mod) * root.value)
        if val % mod:
            out[(k,)] = val % mod
    return TruncSeries(p, N, 1, trunc, out)


def point_count_ap(curve: WeierstrassCurve, p: int) -> int:
    """Trace of Frobenius by brute-force point counting over F_p."""
    n = 1  # point at infinity
    squares = {}
    for y in range(p):
        squares.setdefault(y * y % p, 0)
        squares[y * y % p] += 1
    for x in range(p):
        rhs = (x * x * x + curve.a * x + curve.b) % p
        n += squares.get(rhs, 0)
    return p + 1 - n


def frobenius_candidates(p: int, a_p: int):
    """The four associates of a Gaussian prime with norm p and trace a_p."""
    if a_p % 2:
        raise ValidationError("trace must be even for a Gaussian factor")
    x = a_p // 2
    y2 = p - x * x
    y = round(y2 ** 0.5)
    if y * y != y2:
        raise ValidationError(f"no Gaussian factor: {p} - {x}^2 not a square")
    base = (x, y)
    return [base, (-x, -y), (-y, x), (y, -x)]


def frobenius_check(data: EllipticFormalData, p: int, alpha,
                    root: PadicInt) -> dict:
    """Whether [alpha](z) = z^p mod p through the truncation degree.
    Returns a report with the first failing coefficient if any."""
    re, im = alpha
    if re * re + im * im != p:
        raise ValidationError("candidate does not have norm p")
    series = cm_endo_elliptic(data, alpha)
    emb = embed_gauss_series(series, p, root.N, data.D, root)
    first_fail = None
    for k in range(1, data.D + 1):
        c = emb.coefficient((k,)).residue(1)
        want = 1 if k == p else 0
        if c != want:
            first_fail = (k, c)
            break
    return {
        "alpha": (re, im),
        "passes": first_fail is None,
        "first_fail": first_fail,
        "linear_valuation": emb.coefficient((1,)).valuation(),
    }


def match_lubin_tate(data: EllipticFormalData, alpha_P, p: int, N: int,
                     root: PadicInt) -> FglHom:
    """Strict isomorphism from the curve's formal group to the standard
    Lubin-Tate group of the Frobenius uniformizer.

    The embedded [alpha_P] series is itself a Lubin-Tate seed (its
    linear coefficient is a uniformizer and it reduces to z^p); the
    intertwining solver then produces the isomorphism, integral by
    construction of the exact arithmetic."""
    rep = frobenius_check(data, p, alpha_P, root)
    if not rep["passes"]:
        raise ValidationError(
            f"candidate fails the Frobenius congruence at {rep['first_fail']}"
        )
    series = cm_endo_elliptic(data, alpha_P)
    emb = embed_gauss_series(series, p, N, data.D, root)
    pi = emb.coefficient((1,))
    src = LTSeed(pi, emb)
    dst = LTSeed.standard(p, N, data.D, pi=pi.value)
    one = PadicInt(p, N, 1)
    phi = solve_intertwine(one, src, dst)
    return FglHom(lt_group_law(src), lt_group_law(dst), (phi,), verify=False)
