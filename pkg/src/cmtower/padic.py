"""Exact p-adic arithmetic at fixed precision.

Everything downstream is built on three carriers:

* ``PadicInt``      -- residues mod p^N with exact valuation bookkeeping,
* ``PadicPoly``     -- dense polynomials over a fixed (p, N),
* ``TruncSeries``   -- sparse truncated power series in g >= 1 variables
  with an effective-precision counter that is decremented by divisions.

Valuation of the zero residue is reported as the capped marker ``None``
("unknown, >= N") and is never compared equal to a finite valuation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import HenselError, PrecisionError, ValidationError

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n == q:
            return True
        if n % q == 0:
            return False
    f = 49
    q = 7
    while f <= n:
        if n % q == 0:
            return False
        q += 2
        f = q * q
    return True


class PadicInt:
    """A residue in Z/p^N Z for an odd prime p, viewed as a p-adic integer
    known to N digits."""

    __slots__ = ("p", "N", "value")

    def __init__(self, p: int, N: int, value: int):
        if p == 2 or not _is_prime(p):
            raise ValidationError(f"p must be an odd prime, got {p}")
        if N < 1:
            raise ValidationError(f"precision must be positive, got {N}")
        self.p = p
        self.N = N
        self.value = value % (p ** N)

    # -- helpers -------------------------------------------------------

    def _coerce(self, other) -> "PadicInt":
        if isinstance(other, PadicInt):
            if other.p != self.p or other.N != self.N:
                raise ValidationError(
                    f"mismatched (p, N): ({self.p},{self.N}) vs ({other.p},{other.N})"
                )
            return other
        if isinstance(other, int):
            return PadicInt(self.p, self.N, other)
        return NotImplemented

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    def is_zero(self) -> bool:
        return self.value == 0

    def is_unit(self) -> bool:
        return self.value % self.p != 0

    def valuation(self):
        """Exact valuation for a nonzero residue; ``None`` (meaning
        ">= N", the capped marker) for the zero residue."""
        if self.value == 0:
            return None
        v = 0
        x = self.value
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt(self.p, self.N, self.value + o.value)

    __radd__ = __add__

    def __neg__(self):
        return PadicInt(self.p, self.N, -self.value)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt(self.p, self.N, self.value - o.value)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt(self.p, self.N, self.value * o.value)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return PadicInt(self.p, self.N, pow(self.value, k, self.modulus))

    def inverse(self) -> "PadicInt":
        if not self.is_unit():
            raise ValidationError("cannot invert a non-unit residue")
        return PadicInt(self.p, self.N, pow(self.value, -1, self.modulus))

    def divide_exact(self, other: "PadicInt") -> "PadicInt":
        """Exact division by an element of valuation v.

        The result is only guaranteed to N - v digits; the caller is
        responsible for tracking that loss (TruncSeries does so via
        eff_prec).  Raises if the dividend is not divisible.
        """
        o = self._coerce(other)
        if o.is_zero():
            raise ValidationError("division by the zero residue")
        v = o.valuation()
        if v == 0:
            return self * o.inverse()
        pv = self.p ** v
        if self.value % pv != 0:
            raise ValidationError(
                f"residue {self.value} not divisible by p^{v}"
            )
        unit = PadicInt(self.p, self.N, o.value // pv)
        return PadicInt(self.p, self.N, self.value // pv) * unit.inverse()

    # -- comparisons / misc -------------------------------------------

    def residue(self, k: int) -> int:
        """The residue mod p^k (k <= N)."""
        if k > self.N:
            raise ValidationError(f"only {self.N} digits available, asked for {k}")
        return self.value % (self.p ** k)

    def congruent(self, other, k: int) -> bool:
        o = self._coerce(other)
        return self.residue(k) == o.residue(k)

    def __eq__(self, other):
        if isinstance(other, int):
            other = PadicInt(self.p, self.N, other)
        if not isinstance(other, PadicInt):
            return NotImplemented
        return (self.p, self.N, self.value) == (other.p, other.N, other.value)

    def __hash__(self):
        return hash((self.p, self.N, self.value))

    def __repr__(self):
        return f"PadicInt({self.value} mod {self.p}^{self.N})"

    def to_json(self):
        return {"value": self.value, "p": self.p, "N": self.N}


class PadicPoly:
    """Dense polynomial over a fixed (p, N); coefficients stored as raw
    residues, canonical form has a nonzero leading coefficient."""

    __slots__ = ("p", "N", "coeffs")

    def __init__(self, p: int, N: int, coeffs: Sequence[int]):
        mod = p ** N
        c = [x % mod for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.p = p
        self.N = N
        self.coeffs = c
        # validate (p, N) through a throwaway residue
        PadicInt(p, N, 0)

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, i: int) -> PadicInt:
        v = self.coeffs[i] if i < len(self.coeffs) else 0
        return PadicInt(self.p, self.N, v)

    def _check(self, other: "PadicPoly"):
        if self.p != other.p or self.N != other.N:
            raise ValidationError("mismatched (p, N) between polynomials")

    def __add__(self, other: "PadicPoly") -> "PadicPoly":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [0] * (n - len(self.coeffs))
        b = other.coeffs + [0] * (n - len(other.coeffs))
        return PadicPoly(self.p, self.N, [x + y for x, y in zip(a, b)])

    def __neg__(self) -> "PadicPoly":
        return PadicPoly(self.p, self.N, [-x for x in self.coeffs])

    def __sub__(self, other: "PadicPoly") -> "PadicPoly":
        return self + (-other)

    def __mul__(self, other: "PadicPoly") -> "PadicPoly":
        self._check(other)
        if self.is_zero() or other.is_zero():
            return PadicPoly(self.p, self.N, [])
        mod = self.modulus
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = (out[i + j] + a * b) % mod
        return PadicPoly(self.p, self.N, out)

    def scale(self, c: int) -> "PadicPoly":
        return PadicPoly(self.p, self.N, [c * x for x in self.coeffs])

    def derivative(self) -> "PadicPoly":
        return PadicPoly(self.p, self.N, [i * x for i, x in enumerate(self.coeffs)][1:])

    def evaluate(self, x: PadicInt) -> PadicInt:
        acc = 0
        mod = self.modulus
        for c in reversed(self.coeffs):
            acc = (acc * x.value + c) % mod
        return PadicInt(self.p, self.N, acc)

    def divmod_unit(self, other: "PadicPoly"):
        """Division with remainder by a polynomial whose leading
        coefficient is a unit."""
        self._check(other)
        if other.is_zero():
            raise ValidationError("division by the zero polynomial")
        lead = other.coeffs[-1]
        if lead % self.p == 0:
            raise ValidationError("divisor leading coefficient is not a unit")
        mod = self.modulus
        inv = pow(lead, -1, mod)
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return PadicPoly(self.p, self.N, []), PadicPoly(self.p, self.N, rem)
        quot = [0] * (dq + 1)
        for k in range(dq, -1, -1):
            c = (rem[k + other.degree] * inv) % mod
            quot[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] = (rem[k + j] - c * b) % mod
        return PadicPoly(self.p, self.N, quot), PadicPoly(self.p, self.N, rem)

    def compose_poly(self, other: "PadicPoly") -> "PadicPoly":
        self._check(other)
        acc = PadicPoly(self.p, self.N, [])
        for c in reversed(self.coeffs):
            acc = acc * other + PadicPoly(self.p, self.N, [c])
        return acc

    def __eq__(self, other):
        if not isinstance(other, PadicPoly):
            return NotImplemented
        return (self.p, self.N, self.coeffs) == (other.p, other.N, other.coeffs)

    def __repr__(self):
        return f"PadicPoly(p={self.p}, N={self.N}, coeffs={self.coeffs})"


# ---------------------------------------------------------------------------
# Newton polygons
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of (i, ord a_i).

    ``segments`` is a list of (slope, length) pairs with strictly
    increasing slopes.  Slopes are recorded as ROOT VALUATIONS, i.e. the
    negatives of the geometric hull slopes, so an Eisenstein polynomial
    of degree d shows a single segment (1/d, d).  ``lowest_power`` is the
    order of vanishing at 0 that was factored out first.
    """

    segments: tuple
    lowest_power: int

    @property
    def total_length(self) -> int:
        return sum(l for _, l in self.segments)

    def single_slope(self):
        if len(self.segments) != 1:
            return None
        return self.segments[0][0]

    def to_json(self):
        return {
            "segments": [[str(s), l] for s, l in self.segments],
            "lowest_power": self.lowest_power,
        }


def newton_polygon(f: PadicPoly) -> NewtonPolygon:
    """Newton polygon of a nonzero polynomial.

    Zero residues in the low-order positions are treated as structural
    zeros and factored out as a power of the variable.  A zero residue
    strictly inside the hull support is a precision problem (its true
    valuation, >= N, could still fall below the hull) and raises.
    """
    if f.is_zero():
        raise ValidationError("newton_polygon of the zero polynomial")
    lo = 0
    while f.coeffs[lo] == 0:
        lo += 1
    pts = []  # (i, ord) for nonzero coefficients, relative to lo
    capped = []
    for i in range(lo, len(f.coeffs)):
        c = f.coefficient(i)
        v = c.valuation()
        if v is None:
            capped.append(i - lo)
        else:
            pts.append((i - lo, v))
    # lower convex hull, left to right
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # keep hull lower-convex: drop middle point if above segment
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    # certification: a capped coefficient strictly under the hull span must
    # not be able to dip below the hull
    for i in capped:
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            if x1 < i < x2:
                hull_y = Fraction(y1) + Fraction(y2 - y1, x2 - x1) * (i - x1)
                if Fraction(f.N) < hull_y:
                    raise PrecisionError(
                        f"coefficient {i + lo} is zero at precision {f.N} but the "
                        f"hull needs valuation >= {hull_y} there"
                    )
    segments = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y1 - y2, x2 - x1)  # root valuation
        segments.append((slope, x2 - x1))
    segments.sort(key=lambda sl: sl[0])
    return NewtonPolygon(tuple(segments), lowest_power=lo)


# ---------------------------------------------------------------------------
# Hensel lifting
# ---------------------------------------------------------------------------

def hensel_root(f: PadicPoly, approx: PadicInt) -> PadicInt:
    """Newton iteration from an approximation satisfying the standard
    Hensel hypothesis ord f(a) > 2 ord f'(a).  The certified root r
    satisfies f(r) = 0 mod p^N and r = approx mod p^(ord f'(a) + 1)."""
    fa = f.evaluate(approx)
    dfa = f.derivative().evaluate(approx)
    k = dfa.valuation()
    v = fa.valuation()
    if k is None or (v is not None and v <= 2 * k):
        raise HenselError(
            f"Hensel hypothesis violated: ord f(a) = {v}, ord f'(a) = {k}"
        )
    x = approx
    for _ in range(f.N + 2):
        fx = f.evaluate(x)
        if fx.is_zero():
            break
        dfx = f.derivative().evaluate(x)
        x = x - fx.divide_exact(dfx)
    else:
        raise HenselError("Newton iteration failed to stabilize")
    if not f.evaluate(x).is_zero():
        raise HenselError("Newton iteration did not reach a root mod p^N")
    if x.residue(k + 1) != approx.residue(k + 1):
        raise HenselError("certified root drifted from the approximation")
    return x


# ---------------------------------------------------------------------------
# Determinants and resultants
# ---------------------------------------------------------------------------

def ring_det(rows, zero, one):
    """Determinant over any commutative ring, by Laplace expansion with
    memoization on column subsets (O(n 2^n) ring multiplications, no
    divisions).  ``rows`` is a square list of lists."""
    n = len(rows)
    if n == 0:
        return one
    full = (1 << n) - 1
    memo = {0: one}

    def minor(cols: int, r: int):
        if cols in memo:
            return memo[cols]
        acc = None
        sign = 0
        c = cols
        while c:
            j = (c & -c).bit_length() - 1
            c &= c - 1
            entry = rows[r][j]
            sub = minor(cols & ~(1 << j), r + 1)
            term = entry * sub
            if sign % 2 == 1:
                term = -term
            acc = term if acc is None else acc + term
            sign += 1
        memo[cols] = acc
        return acc

    # expand along rows from the bottom: minor(cols, r) uses row r
    # reorder: implement recursively on first rows instead
    memo.clear()
    memo[0] = one

    def det_rec(cols: int, r: int):
        if cols == 0:
            return one
        key = cols
        if key in memo:
            return memo[key]
        acc = None
        sign = 0
        c = cols
        while c:
            j = (c & -c).bit_length() - 1
            c &= c - 1
            entry = rows[r][j]
            sub = det_rec(cols & ~(1 << j), r + 1)
            term = entry * sub
            if sign % 2 == 1:
                term = -term
            acc = term if acc is None else acc + term
            sign += 1
        memo[key] = acc
        return acc

    return det_rec(full, 0)


def _sylvester_rows(f: PadicPoly, g: PadicPoly):
    m, n = f.degree, g.degree
    size = m + n
    rows = []
    fc = list(reversed(f.coeffs))
    gc = list(reversed(g.coeffs))
    for i in range(n):
        row = [0] * size
        row[i:i + m + 1] = fc
        rows.append(row)
    for i in range(m):
        row = [0] * size
        row[i:i + n + 1] = gc
        rows.append(row)
    return rows


def _poly_gcd_is_nontrivial(f: PadicPoly, g: PadicPoly) -> bool:
    """Try to certify a common factor via the Euclidean algorithm over
    Z/p^N.  Returns True when a nontrivial common divisor is exhibited;
    bails out (PrecisionError) when a leading coefficient goes non-unit."""
    a, b = f, g
    while not b.is_zero():
        if b.coeffs[-1] % b.p == 0:
            raise PrecisionError(
                "resultant indistinguishable from 0 at this precision "
                "(Euclidean step hit a non-unit leading coefficient)"
            )
        _, r = a.divmod_unit(b)
        a, b = b, r
    return a.degree >= 1


def resultant_valuation(f: PadicPoly, g: PadicPoly):
    """p-adic valuation of Res(f, g) via the Sylvester determinant over
    Z/p^N.  Returns ``None`` for a certified-infinite resultant (shared
    factor); raises PrecisionError when the determinant is zero at
    precision N but no shared factor can be certified."""
    if f.is_zero() or g.is_zero():
        raise ValidationError("resultant of a zero polynomial")
    if f.degree == 0 or g.degree == 0:
        # Res(c, g) = c^deg(g)
        c = f if f.degree == 0 else g
        other = g if f.degree == 0 else f
        v = c.coefficient(0).valuation()
        if v is None:
            raise PrecisionError("constant polynomial is zero at precision N")
        return v * other.degree
    rows = [[PadicInt(f.p, f.N, x) for x in row] for row in _sylvester_rows(f, g)]
    zero = PadicInt(f.p, f.N, 0)
    one = PadicInt(f.p, f.N, 1)
    det = ring_det(rows, zero, one)
    v = det.valuation()
    if v is not None:
        return v
    if _poly_gcd_is_nontrivial(f, g):
        return None  # infinite: shared factor
    raise PrecisionError(
        f"resultant is 0 mod p^{f.N} but no common factor was certified"
    )


# ---------------------------------------------------------------------------
# Truncated multivariate power series
# ---------------------------------------------------------------------------

class TruncSeries:
    """Sparse truncated power series in ``nvars`` variables over Z/p^N.

    Coefficients are stored as raw residues keyed by exponent tuples of
    total degree <= trunc.  ``eff_prec`` is the number of guaranteed
    p-adic digits of every coefficient; divisions decrement it.
    """

    __slots__ = ("p", "N", "nvars", "trunc", "eff_prec", "coeffs")

    def __init__(self, p, N, nvars, trunc, coeffs=None, eff_prec=None):
        PadicInt(p, N, 0)  # validates (p, N)
        if nvars < 1:
            raise ValidationError("nvars must be >= 1")
        self.p = p
        self.N = N
        self.nvars = nvars
        self.trunc = trunc
        self.eff_prec = N if eff_prec is None else eff_prec
        if self.eff_prec <= 0:
            raise PrecisionError("effective precision exhausted")
        mod = p ** N
        out = {}
        for e, c in (coeffs or {}).items():
            if len(e) != nvars:
                raise ValidationError(f"exponent {e} has wrong arity")
            if sum(e) > trunc:
                continue
            c %= mod
            if c:
                out[e] = c
        self.coeffs = out

    # -- constructors --------------------------------------------------

    @classmethod
    def variable(cls, p, N, nvars, trunc, index=0):
        e = tuple(1 if i == index else 0 for i in range(nvars))
        return cls(p, N, nvars, trunc, {e: 1})

    @classmethod
    def constant(cls, p, N, nvars, trunc, c):
        return cls(p, N, nvars, trunc, {(0,) * nvars: c})

    @classmethod
    def from_coeff_list(cls, p, N, trunc, coeffs):
        """One-variable series from a dense coefficient list."""
        return cls(p, N, 1, trunc, {(i,): c for i, c in enumerate(coeffs)})

    # -- basics --------------------------------------------------------

    def _check(self, other: "TruncSeries"):
        if (self.p, self.N, self.nvars, self.trunc) != (
            other.p, other.N, other.nvars, other.trunc
        ):
            raise ValidationError("mismatched series parameters")

    def copy_with(self, coeffs, eff_prec=None):
        return TruncSeries(
            self.p, self.N, self.nvars, self.trunc, coeffs,
            self.eff_prec if eff_prec is None else eff_prec,
        )

    def coefficient(self, e) -> PadicInt:
        return PadicInt(self.p, self.N, self.coeffs.get(tuple(e), 0))

    def constant_term(self) -> PadicInt:
        return self.coefficient((0,) * self.nvars)

    def is_zero_mod_eff(self) -> bool:
        pe = self.p ** self.eff_prec
        return all(c % pe == 0 for c in self.coeffs.values())

    def lowest_degree(self):
        """Smallest total degree with a coefficient nonzero mod p^eff_prec,
        or None."""
        pe = self.p ** self.eff_prec
        degs = [sum(e) for e, c in self.coeffs.items() if c % pe != 0]
        return min(degs) if degs else None

    def homogeneous_part(self, k):
        return {e: c for e, c in self.coeffs.items() if sum(e) == k}

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        mod = self.p ** self.N
        for e, c in other.coeffs.items():
            v = (out.get(e, 0) + c) % mod
            if v:
                out[e] = v
            elif e in out:
                del out[e]
        return TruncSeries(self.p, self.N, self.nvars, self.trunc, out,
                           min(self.eff_prec, other.eff_prec))

    def __neg__(self):
        mod = self.p ** self.N
        return self.copy_with({e: mod - c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        mod = self.p ** self.N
        trunc = self.trunc
        out = {}
        a_items = sorted(self.coeffs.items(), key=lambda kv: sum(kv[0]))
        b_items = sorted(other.coeffs.items(), key=lambda kv: sum(kv[0]))
        b_degs = [sum(e) for e, _ in b_items]
        for ea, ca in a_items:
            da = sum(ea)
            if da > trunc:
                break
            for (eb, cb), db in zip(b_items, b_degs):
                if da + db > trunc:
                    break
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = (out.get(e, 0) + ca * cb) % mod
        return TruncSeries(self.p, self.N, self.nvars, self.trunc,
                           {e: c for e, c in out.items() if c},
                           min(self.eff_prec, other.eff_prec))

    def scale(self, c) -> "TruncSeries":
        if isinstance(c, PadicInt):
            c = c.value
        mod = self.p ** self.N
        c %= mod
        return self.copy_with({e: (c * v) % mod for e, v in self.coeffs.items()})

    def divide_exact(self, d: PadicInt) -> "TruncSeries":
        """Exact coefficient-wise division by an element of valuation v;
        costs v digits of effective precision."""
        v = d.valuation()
        if v is None:
            raise ValidationError("division by the zero residue")
        out = {}
        for e, c in self.coeffs.items():
            out[e] = PadicInt(self.p, self.N, c).divide_exact(d).value
        return self.copy_with(out, eff_prec=self.eff_prec - v)

    def power(self, k: int) -> "TruncSeries":
        acc = TruncSeries.constant(self.p, self.N, self.nvars, self.trunc, 1)
        acc = acc.copy_with(acc.coeffs, eff_prec=self.eff_prec)
        base = self
        while k:
            if k & 1:
                acc = acc * base
            k >>= 1
            if k:
                base = base * base
        return acc

    # -- composition ---------------------------------------------------

    def compose(self, args: Sequence["TruncSeries"], trunc=None) -> "TruncSeries":
        """Substitute args[i] (zero constant term) for variable i.

        All args must share (p, trunc') and have the same number of
        variables; the result lives in the args' variable space.
        """
        if len(args) != self.nvars:
            raise ValidationError(
                f"need {self.nvars} arguments, got {len(args)}"
            )
        for a in args:
            if not a.constant_term().is_zero():
                raise ValidationError("composition argument has a constant term")
            if a.p != self.p:
                raise ValidationError("mismatched p in composition")
        tgt = args[0]
        for a in args[1:]:
            tgt._check(a)
        lim = tgt.trunc if trunc is None else trunc
        mod = self.p ** self.N
        eff = min([self.eff_prec] + [a.eff_prec for a in args])

        # cache powers of each argument
        pow_cache = [dict() for _ in args]

        def arg_power(i, k):
            cache = pow_cache[i]
            if k in cache:
                return cache[k]
            if k == 0:
                r = TruncSeries.constant(tgt.p, tgt.N, tgt.nvars, tgt.trunc, 1)
            elif k == 1:
                r = args[i]
            else:
                r = arg_power(i, k - 1) * args[i]
            cache[k] = r
            return r

        out = {}
        for e, c in sorted(self.coeffs.items(), key=lambda kv: sum(kv[0])):
            if sum(e) > lim:
                continue
            term = None
            for i, k in enumerate(e):
                if k == 0:
                    continue
                pw = arg_power(i, k)
                term = pw if term is None else term * pw
            if term is None:  # constant monomial
                z = (0,) * tgt.nvars
                out[z] = (out.get(z, 0) + c) % mod
                continue
            for et, ct in term.coeffs.items():
                if sum(et) > lim:
                    continue
                out[et] = (out.get(et, 0) + c * ct) % mod
        return TruncSeries(tgt.p, tgt.N, tgt.nvars, tgt.trunc,
                           {e: c for e, c in out.items() if c}, eff)

    # -- evaluation / comparison --------------------------------------

    def evaluate(self, points):
        """Evaluate at ring elements (PadicInt or anything supporting
        + and * with itself and integer scaling via .scale or __mul__).

        Used for 1- and 2-variable series on tower elements.  Points
        must have positive valuation for truncation to be meaningful.
        """
        acc = None
        pows = [dict() for _ in points]

        def pt_power(i, k):
            cache = pows[i]
            if k in cache:
                return cache[k]
            r = points[i] if k == 1 else pt_power(i, k - 1) * points[i]
            cache[k] = r
            return r

        for e, c in sorted(self.coeffs.items(), key=lambda kv: sum(kv[0])):
            if sum(e) == 0:
                raise ValidationError("evaluate expects a series without constant term")
            term = None
            for i, k in enumerate(e):
                if k:
                    pw = pt_power(i, k)
                    term = pw if term is None else term * pw
            term = term * c if not isinstance(c, int) else term.scale(c)
            acc = term if acc is None else acc + term
        return acc

    def congruent(self, other: "TruncSeries", digits=None) -> bool:
        self._check(other)
        k = min(self.eff_prec, other.eff_prec) if digits is None else digits
        pk = self.p ** k
        keys = set(self.coeffs) | set(other.coeffs)
        return all(
            (self.coeffs.get(e, 0) - other.coeffs.get(e, 0)) % pk == 0
            for e in keys
        )

    def map_vars(self, nvars, positions) -> "TruncSeries":
        """Re-embed into a larger variable space: variable i of self
        becomes variable positions[i]."""
        out = {}
        for e, c in self.coeffs.items():
            ne = [0] * nvars
            for i, k in enumerate(e):
                ne[positions[i]] = k
            out[tuple(ne)] = c
        return TruncSeries(self.p, self.N, nvars, self.trunc, out, self.eff_prec)

    def __repr__(self):
        terms = sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))
        return (f"TruncSeries(p={self.p}, N={self.N}, eff={self.eff_prec}, "
                f"terms={terms[:8]}{'...' if len(terms) > 8 else ''})")

    def to_json(self):
        return {
            "p": self.p, "N": self.N, "nvars": self.nvars,
            "trunc": self.trunc, "eff_prec": self.eff_prec,
            "coeffs": {
                ",".join(map(str, e)): c
                for e, c in sorted(self.coeffs.items())
            },
        }


def series_compose(f: TruncSeries, args: Iterable[TruncSeries]) -> TruncSeries:
    """Module-level alias for TruncSeries.compose."""
    return f.compose(list(args))


def compositional_inverse(f: TruncSeries) -> TruncSeries:
    """Inverse of a 1-variable series with unit linear coefficient under
    composition, through the truncation degree."""
    if f.nvars != 1:
        raise ValidationError("compositional inverse needs one variable")
    a1 = f.coefficient((1,))
    if not a1.is_unit():
        raise ValidationError("linear coefficient is not a unit")
    if not f.constant_term().is_zero():
        raise ValidationError("series has a constant term")
    p, N, D = f.p, f.N, f.trunc
    inv_a1 = a1.inverse()
    g = TruncSeries(p, N, 1, D, {(1,): inv_a1.value}, f.eff_prec)
    for k in range(2, D + 1):
        err = f.compose([g])  # want identity
        c = err.coefficient((k,))
        # adding b t^k to g changes (f o g) by a1 * b t^k mod higher
        b = (-c) * inv_a1
        if not b.is_zero():
            nc = dict(g.coeffs)
            nc[(k,)] = b.value
            g = g.copy_with(nc)
    return g
