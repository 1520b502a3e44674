"""Division towers of a polynomial Lubin-Tate seed.

Level n adjoins the n-th torsion of the seed: it is the totally ramified
extension of Z_p cut out by h_n = [pi^n](t) / [pi^(n-1)](t), an
Eisenstein polynomial of degree p^(n-1)(p-1) certified by its Newton
polygon.  Elements are written in the power basis of the level-n torsion
value lambda_n; because the candidate valuations i + d_n*ord_p(a_i) are
pairwise distinct, valuations of sums are exact, never estimates.

On top of the tower sit the division operations: dividing a non-torsion
value t0 through the levels (split below the depth invariant e, ramified
at e), and the conductor computation for the ramified step, done in the
compositum Z_p[lambda, theta] with theta a division value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (HenselError, InvariantError, PrecisionError,
                     ValidationError)
from .lubin_tate import LTSeed, endo, group_law
from .padic import (PadicInt, PadicPoly, hensel_root, newton_polygon,
                    ring_det)


class EisensteinTower:
    """The tower of torsion fields of a polynomial seed."""

    __slots__ = ("seed", "p", "N", "max_degree", "pin", "levels")

    def __init__(self, seed: LTSeed, max_degree: int = 60):
        if not seed.is_polynomial:
            raise ValidationError("tower construction needs a polynomial seed")
        self.seed = seed
        self.p = seed.p
        self.N = seed.N
        self.max_degree = max_degree
        # pin[n] = [pi^(n+1)](t) as a polynomial; levels[n] = h_(n+1)
        self.pin = []
        self.levels = []

    def degree(self, n: int) -> int:
        """Degree of level n over the base: p^(n-1)(p-1); level 0 is the
        base itself."""
        if n == 0:
            return 1
        return self.p ** (n - 1) * (self.p - 1)

    def build(self, n: int) -> None:
        """Build and certify levels up to n."""
        d = self.seed.to_poly()
        while len(self.levels) < n:
            k = len(self.levels) + 1
            dk = self.degree(k)
            if dk > self.max_degree:
                raise ValidationError(
                    f"level {k} has degree {dk} > budget {self.max_degree}"
                )
            prev = self.pin[-1] if self.pin else PadicPoly(self.p, self.N,
                                                           [0, 1])
            cur = d.compose_poly(prev)
            q, r = cur.divmod_unit(prev)
            if not r.is_zero():
                raise InvariantError(
                    f"[pi^{k}] is not divisible by [pi^{k - 1}]"
                )
            if q.degree != dk:
                raise InvariantError(
                    f"torsion polynomial at level {k} has degree {q.degree}, "
                    f"expected {dk}"
                )
            poly = newton_polygon(q)
            if poly.lowest_power != 0 or poly.single_slope() != Fraction(1, dk):
                raise InvariantError(
                    f"level {k} polynomial is not Eisenstein: polygon "
                    f"{poly.segments}"
                )
            if q.coefficient(0).valuation() != 1:
                raise InvariantError(
                    f"level {k} constant term does not have valuation 1"
                )
            self.pin.append(cur)
            self.levels.append(q)

    def h(self, n: int) -> PadicPoly:
        self.build(n)
        return self.levels[n - 1]

    def element(self, n: int, coeffs) -> "LocalElement":
        return LocalElement(self, n, coeffs)

    def lam(self, n: int) -> "LocalElement":
        """The canonical uniformizer of level n (the torsion value whose
        minimal polynomial is h_n)."""
        if n < 1:
            raise ValidationError("lambda exists from level 1 up")
        return LocalElement(self, n, [0, 1])


class LocalElement:
    """Sum a_i lambda_n^i at level n, a_i in Z_p; level 0 is Z_p itself.

    Valuations are in lambda_n units: ord(lambda_n) = 1, ord(p) = d_n.
    """

    __slots__ = ("tower", "level", "coeffs")

    def __init__(self, tower: EisensteinTower, level: int, coeffs):
        self.tower = tower
        self.level = level
        d = tower.degree(level)
        mod = tower.p ** tower.N
        raw = [c.value if isinstance(c, PadicInt) else c % mod for c in coeffs]
        raw = [c % mod for c in raw]
        if len(raw) > d:
            raise ValidationError(
                f"level-{level} elements have at most {d} coefficients"
            )
        raw += [0] * (d - len(raw))
        self.coeffs = tuple(raw)

    def _check(self, other: "LocalElement"):
        if self.tower is not other.tower or self.level != other.level:
            raise ValidationError("elements live at different levels")

    def __add__(self, other):
        if isinstance(other, int):
            other = LocalElement(self.tower, self.level, [other])
        self._check(other)
        return LocalElement(self.tower, self.level,
                            [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return LocalElement(self.tower, self.level,
                            [-a for a in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, int):
            other = LocalElement(self.tower, self.level, [other])
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, PadicInt)):
            return self.scale(other)
        self._check(other)
        t = self.tower
        p, N = t.p, t.N
        mod = p ** N
        prod = [0] * (2 * len(self.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                prod[i + j] = (prod[i + j] + a * b) % mod
        if self.level == 0:
            return LocalElement(t, 0, prod[:1])
        h = t.h(self.level)
        _, r = PadicPoly(p, N, prod).divmod_unit(h)
        return LocalElement(t, self.level, r.coeffs)

    __rmul__ = __mul__

    def scale(self, c):
        if isinstance(c, PadicInt):
            c = c.value
        return LocalElement(self.tower, self.level,
                            [c * a for a in self.coeffs])

    def is_zero(self):
        return not any(self.coeffs)

    def valuation(self):
        """Exact valuation in lambda_n units; None means ">= cap" (all
        coefficients precision-capped zero)."""
        t = self.tower
        d = t.degree(self.level)
        best = None
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            v = PadicInt(t.p, t.N, a).valuation()
            cand = i + d * v
            if best is None or cand < best:
                best = cand
        return best

    def __eq__(self, other):
        if not isinstance(other, LocalElement):
            return NotImplemented
        return (self.tower is other.tower and self.level == other.level
                and self.coeffs == other.coeffs)

    def __repr__(self):
        return f"LocalElement(level={self.level}, coeffs={list(self.coeffs)})"


def torsion_poly(tower: EisensteinTower, n: int) -> PadicPoly:
    """h_n = [pi^n](t)/[pi^(n-1)](t), the defining polynomial of level n."""
    if n < 1:
        raise ValidationError("torsion polynomials exist from level 1 up")
    return tower.h(n)


def elem_ord(x) -> "int | None":
    """Valuation of a tower element (or a PadicInt, in base units)."""
    if isinstance(x, PadicInt):
        return x.valuation()
    return x.valuation()


def _eval_poly(poly: PadicPoly, x):
    """Horner evaluation of a base polynomial at a tower element (or a
    PadicInt)."""
    if isinstance(x, PadicInt):
        return poly.evaluate(x)
    acc = LocalElement(x.tower, x.level, [])
    for c in reversed(poly.coeffs):
        acc = acc * x + c
    return acc


def filtration_step(tower: EisensteinTower, x):
    """Apply the pi-action to a point in the kernel of reduction; its
    valuation increases by exactly one base unit."""
    d = tower.degree(x.level) if isinstance(x, LocalElement) else 1
    v = elem_ord(x)
    if v is not None and v < d:
        raise ValidationError(
            "filtration step needs a point in the kernel of reduction "
            f"(valuation >= 1 in base units, got {Fraction(v, d)})"
        )
    return _eval_poly(tower.seed.to_poly(), x)


def e_invariant(t0: PadicInt) -> int:
    """Depth of t0 in the valuation filtration: its base valuation.
    This is the first level at which dividing t0 ramifies."""
    v = t0.valuation()
    if v is None:
        raise ValidationError(
            "the zero value has no depth invariant (torsion input)"
        )
    if v == 0:
        raise ValidationError(
            "point is not in the kernel of reduction (unit coordinate)"
        )
    return v


# ---------------------------------------------------------------------------
# discriminant of level 2 over level 1
# ---------------------------------------------------------------------------

def _disc_direct(tower: EisensteinTower) -> int:
    """Valuation of d'(lambda_2) at level 2; equals the level-1 valuation
    of its norm down to level 1, which is the different of the step."""
    tower.build(2)
    dp = tower.seed.to_poly().derivative()
    val = _eval_poly(dp, tower.lam(2)).valuation()
    if val is None:
        raise PrecisionError(
            "derivative at the level-2 uniformizer vanished at working "
            "precision; raise N"
        )
    return val


def _disc_resultant(tower: EisensteinTower) -> int:
    """Same valuation via the Sylvester resultant of m(t) = d(t) - lambda_1
    and m'(t) over the level-1 ring."""
    tower.build(1)
    d = tower.seed.to_poly()
    p, N = tower.p, tower.N
    lam1 = tower.lam(1)

    def lift(c: int):
        return LocalElement(tower, 1, [c])

    m = [lift(c) for c in d.coeffs]
    m[0] = m[0] - lam1
    mp = [lift(c) for c in d.derivative().coeffs]
    deg_m = len(m) - 1
    deg_mp = len(mp) - 1
    size = deg_m + deg_mp
    zero = lift(0)
    rows = []
    for i in range(deg_mp):
        row = [zero] * size
        for j, c in enumerate(reversed(m)):
            row[i + j] = c
        rows.append(row)
    for i in range(deg_m):
        row = [zero] * size
        for j, c in enumerate(reversed(mp)):
            row[i + j] = c
        rows.append(row)
    det = ring_det(rows, zero, lift(1))
    val = det.valuation()
    if val is None:
        raise PrecisionError(
            "resultant of the level-2 minimal polynomial vanished at "
            "working precision; raise N"
        )
    return val


def level_disc(tower: EisensteinTower) -> int:
    """Discriminant valuation of level 2 over level 1, in level-1
    uniformizer units.  Computed two independent ways (direct valuation
    at level 2 and Sylvester resultant over level 1) and cross-checked;
    p(p-1) for a valid tower."""
    direct = _disc_direct(tower)
    resultant = _disc_resultant(tower)
    if direct != resultant:
        raise InvariantError(
            f"discriminant routes disagree: direct {direct}, "
            f"resultant {resultant}"
        )
    return direct


def character_conductor_floor(tower: EisensteinTower) -> int:
    """Conductor exponent of the nontrivial characters of the degree-p
    step from level 1 to level 2, via the conductor-discriminant
    identity disc = floor*(p-1)."""
    disc = level_disc(tower)
    p = tower.p
    if disc % (p - 1) != 0:
        raise InvariantError(
            f"discriminant {disc} is not a multiple of p-1 = {p - 1}"
        )
    return disc // (p - 1)


# ---------------------------------------------------------------------------
# dividing a point through the tower
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DivisionState:
    """Progress of dividing the point with coordinate t0 through the
    tower.  ``history[k]`` is the certified level-(k+1) division value
    (all of them live in the base field while division splits);
    ``ramified_at`` is set once the Eisenstein certificate is produced
    and no further division is possible here."""

    t0: PadicInt
    e: int
    level: int
    history: tuple = ()
    ramified_at: "int | None" = None
    certificate: "object | None" = None

    @classmethod
    def start(cls, t0: PadicInt) -> "DivisionState":
        return cls(t0=t0, e=e_invariant(t0), level=0)

    def last(self) -> PadicInt:
        return self.history[-1] if self.history else self.t0


def _divide_once(tower: EisensteinTower, q: PadicInt) -> DivisionState:
    """One division step for the value q = previous division value."""
    d = tower.seed.to_poly()
    g = d + PadicPoly(d.p, d.N, [(-q).value])
    vq = q.valuation()
    if vq is None or vq < 1:
        raise ValidationError("division value must have positive valuation")
    if vq >= 2:
        approx = q.divide_exact(tower.seed.pi_val)
        root = hensel_root(g, approx)
        return ("split", root)
    poly = newton_polygon(g)
    if poly.lowest_power == 0 and poly.single_slope() == Fraction(1, tower.p):
        return ("ramified", poly)
    raise PrecisionError(
        f"division step inconclusive: polygon {poly.segments} is neither "
        "a certified split nor a single slope 1/p"
    )


def divide_point(tower: EisensteinTower, state: DivisionState,
                 to_level: int) -> DivisionState:
    """Divide the point up to the requested level.  Below the depth
    invariant e every step has a certified base-field root; at level e
    the step polynomial is certified Eisenstein of degree p (totally
    ramified) and the state freezes there."""
    if state.ramified_at is not None:
        raise ValidationError(
            f"division already ramified at level {state.ramified_at}"
        )
    cur = state
    while cur.level < to_level:
        n = cur.level + 1
        kind, payload = _divide_once(tower, cur.last())
        if kind == "split":
            if n >= cur.e:
                raise InvariantError(
                    f"split certificate at level {n} but depth invariant "
                    f"is {cur.e}"
                )
            cur = DivisionState(t0=cur.t0, e=cur.e, level=n,
                                history=cur.history + (payload,))
        else:
            if n != cur.e:
                raise InvariantError(
                    f"ramification certificate at level {n} but depth "
                    f"invariant is {cur.e}"
                )
            cur = DivisionState(t0=cur.t0, e=cur.e, level=n,
                                history=cur.history,
                                ramified_at=n, certificate=payload)
            break
    return cur


# ---------------------------------------------------------------------------
# conductor of the ramified division step
# ---------------------------------------------------------------------------

class _CompElement:
    """Element of the division compositum Z_p[lambda, theta] with
    h_1(lambda) = 0 and d(theta) = q: coefficient grid c[i][j] for
    lambda^i theta^j, 0 <= i < p-1, 0 <= j < p.

    Valuations (in compositum uniformizer units, ord(p) = p(p-1)):
    ord(lambda) = p, ord(theta) = p-1.  The candidates
    i*p + j*(p-1) + p(p-1)*ord_p(c) over the index grid are pairwise
    distinct, so ord of any element is read off exactly.
    """

    __slots__ = ("ring", "grid")

    def __init__(self, ring, grid):
        self.ring = ring
        mod = ring.mod
        self.grid = tuple(tuple(c % mod for c in row) for row in grid)

    def __add__(self, other):
        return _CompElement(self.ring, [
            [a + b for a, b in zip(ra, rb)]
            for ra, rb in zip(self.grid, other.grid)
        ])

    def __neg__(self):
        return _CompElement(self.ring, [[-c for c in row]
                                        for row in self.grid])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if isinstance(c, PadicInt):
            c = c.value
        return _CompElement(self.ring, [[c * x for x in row]
                                        for row in self.grid])

    def __mul__(self, other):
        if isinstance(other, (int, PadicInt)):
            return self.scale(other)
        R = self.ring
        p, mod = R.p, R.mod
        nl, nt = p - 1, p
        # raw convolution
        big = [[0] * (2 * nt - 1) for _ in range(2 * nl - 1)]
        for i, row in enumerate(self.grid):
            for j, a in enumerate(row):
                if a == 0:
                    continue
                for k, orow in enumerate(other.grid):
                    for l, b in enumerate(orow):
                        if b:
                            big[i + k][j + l] = (big[i + k][j + l] + a * b) % mod
        # reduce theta powers: theta^p = q - sum_(1<=k<p) d_k theta^k
        for i in range(len(big)):
            row = big[i]
            for j in range(len(row) - 1, nt - 1, -1):
                c = row[j]
                if not c:
                    continue
                row[j] = 0
                row[0] = (row[0] + c * R.qv) % mod
                for k in range(1, p):
                    row[j - p + k] = (row[j - p + k] - c * R.dcoeffs[k]) % mod
        # reduce lambda powers: lambda^(p-1) = -sum h1_k lambda^k
        for i in range(len(big) - 1, nl - 1, -1):
            row = big[i]
            if not any(row):
                continue
            for k in range(nl):
                hr = R.h1coeffs[k]
                if hr:
                    for j in range(nt):
                        big[i - nl + k][j] = (
                            big[i - nl + k][j] - hr * row[j]
                        ) % mod
            big[i] = [0] * len(row)
        return _CompElement(self.ring, [r[:nt] for r in big[:nl]])

    def power(self, n):
        acc = self.ring.one()
        base = self
        while n:
            if n & 1:
                acc = acc * base
            n >>= 1
            if n:
                base = base * base
        return acc

    def valuation(self):
        R = self.ring
        p = R.p
        best = None
        for i, row in enumerate(self.grid):
            for j, c in enumerate(row):
                if c == 0:
                    continue
                v = PadicInt(p, R.N, c).valuation()
                cand = i * p + j * (p - 1) + p * (p - 1) * v
                if best is None or cand < best:
                    best = cand
        return best

    def is_zero(self):
        return all(c == 0 for row in self.grid for c in row)


class _CompositumRing:
    """Z_p[lambda, theta]/(h_1(lambda), d(theta) - q)."""

    __slots__ = ("p", "N", "mod", "qv", "dcoeffs", "h1coeffs")

    def __init__(self, tower: EisensteinTower, q: PadicInt):
        self.p = tower.p
        self.N = tower.N
        self.mod = tower.p ** tower.N
        self.qv = q.value
        d = tower.seed.to_poly()
        self.dcoeffs = [d.coefficient(k).value for k in range(self.p + 1)]
        h1 = tower.h(1)
        self.h1coeffs = [h1.coefficient(k).value for k in range(self.p - 1)]

    def zero(self):
        p = self.p
        return _CompElement(self, [[0] * p for _ in range(p - 1)])

    def one(self):
        p = self.p
        g = [[0] * p for _ in range(p - 1)]
        g[0][0] = 1
        return _CompElement(self, g)

    def lam(self):
        p = self.p
        g = [[0] * p for _ in range(p - 1)]
        g[1][0] = 1
        return _CompElement(self, g)

    def theta(self):
        p = self.p
        g = [[0] * p for _ in range(p - 1)]
        g[0][1] = 1
        return _CompElement(self, g)

    def eval_series(self, series, points):
        """Evaluate a TruncSeries (no constant term) at compositum
        points of positive valuation."""
        acc = self.zero()
        pows = [dict() for _ in points]

        def pt_power(i, k):
            cache = pows[i]
            if k not in cache:
                cache[k] = points[i] if k == 1 else pt_power(i, k - 1) * points[i]
            return cache[k]

        for e, c in sorted(series.coeffs.items(), key=lambda kv: sum(kv[0])):
            if sum(e) == 0:
                raise ValidationError("series must have no constant term")
            term = None
            for i, k in enumerate(e):
                if k:
                    pw = pt_power(i, k)
                    term = pw if term is None else term * pw
            acc = acc + term.scale(c)
        return acc


@dataclass(frozen=True)
class ConductorReport:
    """Everything the ramified division step yields: the per-translate
    jump sizes, the ramification break, discriminant and conductor
    exponents, and the provenance of each number."""

    p: int
    e: int
    deltas: dict
    break_value: int
    disc_exponent: int
    conductor_exponent: int
    prime_exponents: dict = field(default_factory=dict)
    provenance: tuple = ()

    def to_json(self):
        return {
            "p": self.p,
            "e": self.e,
            "deltas": {str(k): v for k, v in sorted(self.deltas.items())},
            "break": self.break_value,
            "disc_exponent": self.disc_exponent,
            "conductor_exponent": self.conductor_exponent,
            "prime_exponents": {str(k): v for k, v in
                                sorted(self.prime_exponents.items())},
            "provenance": list(self.provenance),
        }


def division_conductor(tower: EisensteinTower, state: DivisionState,
                       ramified_primes=None) -> ConductorReport:
    """Conductor of the ramified division step, computed from scratch in
    the compositum.

    For each nonzero torsion translate v, the Galois displacement of the
    division value theta is theta - F(theta, t(v)); with the compositum
    uniformizer eta = lambda/theta this gives the jump
    Delta(v) = p + ord(theta - F(theta, t(v))) - 2(p-1), computed without
    any division.  All jumps must equal 2 (single break at 1); the
    discriminant exponent is their sum 2(p-1) and the conductor exponent
    is 2, confirmed against the conductor-discriminant identity.
    """
    if state.ramified_at is None:
        raise ValidationError("conductor needs a ramified division state")
    p, N = tower.p, tower.N
    q = state.last()
    ring = _CompositumRing(tower, q)
    theta = ring.theta()
    lam = ring.lam()
    if theta.valuation() != p - 1 or lam.valuation() != p:
        raise InvariantError("compositum generators lost their valuations")
    F = group_law(tower.seed).F
    deltas = {}
    prov = [
        f"jumps: theta displacement under torsion translation, seed degree "
        f"{tower.seed.p}, division value of valuation {q.valuation()}",
    ]
    for a in range(1, p):
        tv = ring.eval_series(endo(tower.seed, PadicInt(p, N, a)), [lam])
        if tv.valuation() != p:
            raise InvariantError(
                f"torsion value [{a}] does not have valuation {p}"
            )
        sigma_theta = ring.eval_series(F, [theta, tv])
        disp = (theta - sigma_theta).valuation()
        if disp is None:
            raise PrecisionError(
                "Galois displacement vanished at working precision; raise N"
            )
        delta = p + disp - 2 * (p - 1)
        if delta != 2:
            raise InvariantError(
                f"jump for translate [{a}] is {delta}, not 2: the run's "
                "hypotheses are falsified"
            )
        deltas[a] = delta
    disc = sum(deltas.values())
    if disc != 2 * (p - 1):
        raise InvariantError(f"discriminant exponent {disc} != 2(p-1)")
    break_value = deltas[1] - 1
    cond_break = break_value + 1
    cond_disc = disc // (p - 1)
    if cond_break != cond_disc:
        raise InvariantError(
            f"conductor routes disagree: break {cond_break}, "
            f"discriminant {cond_disc}"
        )
    prov.append("conductor: break+1 and disc/(p-1) agree")
    if state.e > 1:
        prov.append(
            f"exponent computed at the first level; equality at level "
            f"{state.e} is recorded as an assumption, not recomputed"
        )
    primes = {}
    if ramified_primes is not None:
        for idx in sorted(ramified_primes):
            primes[idx] = cond_break
    return ConductorReport(
        p=p, e=state.e, deltas=deltas, break_value=break_value,
        disc_exponent=disc, conductor_exponent=cond_break,
        prime_exponents=primes, provenance=tuple(prov),
    )
