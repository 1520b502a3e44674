"""Command-line front end: one command per invocation, INI config in,
deterministic JSON report out.

Exit codes: 0 success, 2 validation, 3 precision-inconclusive (including
uncertified division roots), 4 mathematical invariant falsified.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import sys
import time

from .errors import (HenselError, InvariantError, PrecisionError,
                     ValidationError)
from .padic import PadicInt
from .lubin_tate import LTSeed, endo, group_law, strict_iso
from .cm_split import CMField, embed, pick_pi
from .local_tower import (DivisionState, EisensteinTower, divide_point,
                          division_conductor, character_conductor_floor,
                          level_disc, torsion_poly)
from .galois_model import tower_indices
from .unit_wedge import CftOracle, UnitJet, extend_to_g, reduce_wedge
from .elliptic_fg import (WeierstrassCurve, curve_group_law,
                          cm_endo_elliptic, embed_gauss_series,
                          frobenius_candidates, frobenius_check,
                          gauss_embed_root, match_lubin_tate,
                          point_count_ap)

REPORT_VERSION = 1

COMMANDS = (
    "lt-group-law", "lt-endo", "lt-iso", "cm-embed", "cm-pi",
    "tower-build", "tower-disc", "tower-conductor", "divide",
    "wedge-reduce", "wedge-extend", "galois-orders", "elliptic-fg",
    "elliptic-match",
)


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

def _ints(text: str):
    return [int(x) for x in text.replace(",", " ").split()]


class RunConfig:
    """Parsed and validated parameters for one command."""

    def __init__(self, command: str, sections: dict, overrides: dict):
        if command not in COMMANDS:
            raise ValidationError(f"unknown command {command!r}")
        self.command = command
        self.sections = sections
        self.precision = overrides.get("precision")
        self.trunc = overrides.get("trunc")
        self.oracle_mode = overrides.get("oracle") or self.get(
            "wedge", "oracle", "axiom")
        self.jobs = overrides.get("jobs") or 1

    @classmethod
    def load(cls, command: str, path: "str | None", overrides: dict):
        sections = {}
        if path:
            cp = configparser.ConfigParser()
            read = cp.read(path)
            if not read:
                raise ValidationError(f"config file not found: {path}")
            sections = {s: dict(cp.items(s)) for s in cp.sections()}
        return cls(command, sections, overrides)

    def get(self, section, key, default=None):
        return self.sections.get(section, {}).get(key, default)

    def require(self, section, key):
        v = self.get(section, key)
        if v is None:
            raise ValidationError(
                f"missing config value [{section}] {key} for "
                f"{self.command}"
            )
        return v

    def canonical(self) -> str:
        body = {
            "command": self.command,
            "sections": {s: dict(sorted(kv.items()))
                         for s, kv in sorted(self.sections.items())},
            "precision": self.precision,
            "trunc": self.trunc,
            "oracle": self.oracle_mode,
        }
        return json.dumps(body, sort_keys=True)

    def hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    # -- shared object builders ---------------------------------------

    def trunc_for(self, p: int) -> int:
        if self.trunc is not None:
            return self.trunc
        t = self.get("seed", "trunc") or self.get("run", "trunc")
        return int(t) if t else max(2 * p, 10)

    def prec_for(self, trunc: int) -> int:
        if self.precision is not None:
            return self.precision
        n = self.get("seed", "precision") or self.get("run", "precision")
        return int(n) if n else trunc + 10

    def seed(self, section="seed") -> LTSeed:
        p = int(self.require(section, "p"))
        kind = self.get(section, "kind")
        D = self.trunc_for(p)
        N = self.prec_for(D)
        if kind == "multiplicative":
            return LTSeed.multiplicative(p, N, D)
        if kind == "standard":
            return LTSeed.standard(p, N, D)
        if kind:
            raise ValidationError(f"unknown seed kind {kind!r}")
        return LTSeed.from_coeffs(p, N, D,
                                  _ints(self.require(section, "coeffs")))

    def field(self) -> CMField:
        poly = _ints(self.require("field", "poly"))
        p = int(self.require("field", "p"))
        N = self.prec_for(self.trunc_for(p))
        conj = _ints(self.require("field", "conj"))
        cm_type = set(_ints(self.require("field", "cm_type")))
        autos_raw = self.get("field", "autos")
        autos = None
        if autos_raw:
            autos = [_ints(row) for row in autos_raw.split(";")]
        return CMField(poly, p, N, conj, cm_type, autos)

    def jets(self):
        p = int(self.require("wedge", "p"))
        rows = self.require("wedge", "jets").split(";")
        return [UnitJet(p, tuple(_ints(r))) for r in rows]


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------

def _series_json(s):
    return s.to_json()


def _run_lt_group_law(cfg: RunConfig):
    seed = cfg.seed()
    F = group_law(seed).F
    return {"law": _series_json(F)}, [
        "group law solved degree by degree from the seed"]


def _run_lt_endo(cfg: RunConfig):
    seed = cfg.seed()
    a = int(cfg.require("seed", "a"))
    s = endo(seed, PadicInt(seed.p, seed.N, a))
    return {"a": a, "series": _series_json(s)}, [
        "endomorphism from the intertwining recursion"]


def _run_lt_iso(cfg: RunConfig):
    src = cfg.seed("seed")
    dst = cfg.seed("seed2")
    iso = strict_iso(src, dst)
    return {
        "series": _series_json(iso.series[0]),
        "jacobian": [[c.to_json() for c in row] for row in iso.jacobian],
    }, ["strict isomorphism from the intertwining recursion"]


def _run_cm_embed(cfg: RunConfig):
    K = cfg.field()
    alpha = K.element(_ints(cfg.require("cm", "alpha")))
    vec = embed(K, alpha)
    return {
        "values": [x.to_json() for x in vec],
        "valuations": [x.valuation() for x in vec],
    }, ["coordinates are evaluations at the lifted roots"]


def _run_cm_pi(cfg: RunConfig):
    K = cfg.field()
    fp = int(cfg.require("cm", "fp_index"))
    pi = pick_pi(K, fp)
    vec = embed(K, pi)
    return {
        "pi": pi.to_json(),
        "valuations": [x.valuation() for x in vec],
    }, ["smallest-coefficient element with the required valuations"]


def _tower(cfg: RunConfig) -> EisensteinTower:
    return EisensteinTower(cfg.seed())


def _run_tower_build(cfg: RunConfig):
    tw = _tower(cfg)
    n = int(cfg.get("tower", "level", 2))
    out = []
    for k in range(1, n + 1):
        h = torsion_poly(tw, k)
        out.append({
            "level": k,
            "degree": h.degree,
            "coeffs": h.coeffs,
        })
    return {"levels": out}, [
        "each level certified Eisenstein by its Newton polygon"]


def _run_tower_disc(cfg: RunConfig):
    tw = _tower(cfg)
    disc = level_disc(tw)
    floor = character_conductor_floor(tw)
    return {"disc": disc, "conductor_floor": floor}, [
        "discriminant by direct valuation and Sylvester resultant, "
        "cross-checked",
        "floor from the conductor-discriminant identity",
    ]


def _division_state(cfg: RunConfig, tw: EisensteinTower):
    t0 = int(cfg.require("tower", "t0"))
    return DivisionState.start(PadicInt(tw.p, tw.N, t0))


def _run_divide(cfg: RunConfig):
    tw = _tower(cfg)
    st = _division_state(cfg, tw)
    to_level = int(cfg.get("tower", "level", st.e))
    st = divide_point(tw, st, to_level)
    res = {
        "e": st.e,
        "level": st.level,
        "roots": [r.to_json() for r in st.history],
        "ramified_at": st.ramified_at,
    }
    if st.certificate is not None:
        res["certificate"] = st.certificate.to_json()
    return res, ["split steps carry certified base-field roots; the "
                 "ramified step carries an Eisenstein polygon"]


def _run_tower_conductor(cfg: RunConfig):
    tw = _tower(cfg)
    st = _division_state(cfg, tw)
    st = divide_point(tw, st, st.e)
    rep = division_conductor(tw, st)
    return rep.to_json(), list(rep.provenance)


def _run_wedge_reduce(cfg: RunConfig):
    jets = cfg.jets()
    oracle = CftOracle(cfg.oracle_mode)
    tr = reduce_wedge(jets, oracle)
    return tr.to_json(), ["unimodular elimination ladder; "
                          f"oracle mode {oracle.mode}"]


def _run_wedge_extend(cfg: RunConfig):
    jets = cfg.jets()
    s = int(cfg.require("wedge", "s"))
    oracle = CftOracle(cfg.oracle_mode)
    tr = extend_to_g(jets, s, oracle)
    return tr.to_json(), ["tail primes cleared first, then the "
                          f"{s}-prime ladder; oracle mode {oracle.mode}"]


def _run_galois_orders(cfg: RunConfig):
    p = int(cfg.require("galois", "p"))
    m = int(cfg.require("galois", "m"))
    n = int(cfg.require("galois", "n"))
    return tower_indices(p, m, n), [
        "orders by exhaustive enumeration; cyclicity by generator order"]


def _elliptic(cfg: RunConfig):
    a = int(cfg.require("elliptic", "a"))
    b = int(cfg.require("elliptic", "b"))
    p = int(cfg.require("elliptic", "p"))
    D = cfg.trunc if cfg.trunc else int(cfg.get("elliptic", "trunc", 20))
    E = WeierstrassCurve(a, b)
    return E, p, D


def _run_elliptic_fg(cfg: RunConfig):
    E, p, D = _elliptic(cfg)
    data = curve_group_law(E, D, p=p)
    F = {f"{i},{j}": int(c) for (i, j), c in sorted(data.F.items())}
    return {
        "discriminant": E.discriminant,
        "law": F,
        "log_denominator_lcm": _lcm([c.denominator
                                     for c in data.log.values()]),
    }, ["exact rational expansion; integrality of the law asserted"]


def _lcm(xs):
    from math import lcm

    return lcm(*xs) if xs else 1


def _run_elliptic_match(cfg: RunConfig):
    E, p, D = _elliptic(cfg)
    N = cfg.prec_for(D)
    data = curve_group_law(E, D, p=p)
    root = gauss_embed_root(p, N)
    ap = point_count_ap(E, p)
    reports = [frobenius_check(data, p, c, root)
               for c in frobenius_candidates(p, ap)]
    passing = [r for r in reports if r["passes"]]
    if len(passing) != 1:
        raise InvariantError(
            f"expected exactly one passing associate, got {len(passing)}"
        )
    alpha = passing[0]["alpha"]
    iso = match_lubin_tate(data, alpha, p, N, root)
    emb_i = embed_gauss_series(cm_endo_elliptic(data, (0, 1)), p, N, D, root)
    return {
        "a_p": ap,
        "candidates": [
            {"alpha": list(r["alpha"]), "passes": r["passes"],
             "first_fail": list(r["first_fail"]) if r["first_fail"] else None}
            for r in reports
        ],
        "alpha_P": list(alpha),
        "embedded_i": emb_i.coefficient((1,)).to_json(),
        "iso": _series_json(iso.series[0]),
        "iso_jacobian": iso.jacobian[0][0].to_json(),
    }, [
        "trace by brute-force point count",
        "associate selected by the Frobenius congruence",
        "isomorphism from the intertwining recursion, exact mod p^N",
    ]


_RUNNERS = {
    "lt-group-law": _run_lt_group_law,
    "lt-endo": _run_lt_endo,
    "lt-iso": _run_lt_iso,
    "cm-embed": _run_cm_embed,
    "cm-pi": _run_cm_pi,
    "tower-build": _run_tower_build,
    "tower-disc": _run_tower_disc,
    "tower-conductor": _run_tower_conductor,
    "divide": _run_divide,
    "wedge-reduce": _run_wedge_reduce,
    "wedge-extend": _run_wedge_extend,
    "galois-orders": _run_galois_orders,
    "elliptic-fg": _run_elliptic_fg,
    "elliptic-match": _run_elliptic_match,
}


def dispatch(cfg: RunConfig) -> dict:
    """Run the configured command and assemble the report."""
    start = time.monotonic()
    results, provenance = _RUNNERS[cfg.command](cfg)
    return {
        "report_version": REPORT_VERSION,
        "command": cfg.command,
        "config_hash": cfg.hash(),
        "results": results,
        "provenance": provenance,
        "timing": {"wall_seconds": round(time.monotonic() - start, 6)},
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cmtower",
        description="formal-group tower computations with exact p-adic "
                    "arithmetic",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="INI config file")
    parser.add_argument("--out", help="write the JSON report here "
                                      "(default stdout)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="parallelism bound for sweeps (runs are "
                             "deterministic regardless)")
    parser.add_argument("--precision", type=int, help="digits mod p^N")
    parser.add_argument("--trunc", type=int, help="series truncation degree")
    parser.add_argument("--oracle", choices=("axiom", "deny"),
                        help="class-field-theory oracle mode")
    args = parser.parse_args(argv)

    try:
        cfg = RunConfig.load(args.command, args.config, {
            "precision": args.precision,
            "trunc": args.trunc,
            "oracle": args.oracle,
            "jobs": args.jobs,
        })
        report = dispatch(cfg)
    except ValidationError as e:
        print(f"validation error: {e}", file=sys.stderr)
        return 2
    except (PrecisionError, HenselError) as e:
        print(f"inconclusive at this precision: {e}", file=sys.stderr)
        return 3
    except InvariantError as e:
        print(f"invariant falsified: {e}", file=sys.stderr)
        return 4

    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
