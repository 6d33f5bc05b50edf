"""Configuration ingestion, command dispatch and report emission.

Config files are INI-style key-value documents with sections; the
grammar is documented in the README.  Every numeric field in a report
is exact: rationals are serialized as "p" or "p/q" strings, never as
floats.
"""

from __future__ import annotations

import argparse
import configparser
import itertools
import json
import re
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .chow import IntersectionRing, IntersectionRingSpec, RingElement, ring_from_spec
from .errors import ConfigError, MissingSection, SpecfibError
from .fiber_k3 import (
    FibrationGeometry,
    MukaiVector,
    fine_moduli_check,
    hilbert_polynomial,
    restrict_to_fiber,
)
from .search import KNOWN_FILTERS, ScanRequest, scan_mukai, scan_rank_one
from .spectral import (
    KernelData,
    ReflexiveK3Spec,
    SpectralDatum,
    untwisted_transform_chern,
    oracle_spectral_chern,
    spectral_chern_general,
    spectral_chern_rank_one,
    trivial_fibration_chern,
    twist,
)
from .stability import extension_check, stability_bound

SCHEMA_VERSION = "1"

_TRIPLE_KEY = re.compile(r"^(\w+)\.(\w+)\.(\w+)$")

_SECTION_KEYS = {
    "ring": None,  # validated specially (divisors + triple entries)
    "fibration": {"fiber", "base_genus"},
    "polarization": {"H0"},
    "spectral": {"n", "g", "d", "cover"},
    "kernel": {"r", "L", "s", "CQ", "G2", "G3", "G1"},
    "trivial": {"n", "g", "d", "cover"},
    "scan": {"mode", "r", "s", "n", "g", "d", "filters", "max_results"},
    "extension": {"e_rank", "e_c1", "g_rank", "g_c1"},
}


def _rat(text: str, where: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{where}: not a rational number: {text!r}") from exc


def _int(text: str, where: str) -> int:
    try:
        return int(text.strip())
    except ValueError as exc:
        raise ConfigError(f"{where}: not an integer: {text!r}") from exc


def _vec(text: str, where: str) -> tuple[Fraction, ...]:
    return tuple(_rat(tok, where) for tok in text.split())


def fmt(x) -> str:
    """Exact rational serialization: "p" or "p/q"."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def fmt_vec(xs) -> list[str]:
    return [fmt(x) for x in xs]


def fmt_character(ch: RingElement) -> dict:
    return {
        "ch0": fmt(ch.deg0),
        "ch1": fmt_vec(ch.deg2),
        "ch2_pairings": fmt_vec(ch.deg4),
        "ch3": fmt(ch.deg6),
    }


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

def parse_config(path: str, strict: bool = True) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    parser.optionxform = str  # keep divisor names case-sensitive
    try:
        with open(path) as handle:
            parser.read_file(handle, source=path)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    _validate_schema(parser, strict)
    return parser


def _validate_schema(parser: configparser.ConfigParser, strict: bool) -> None:
    for section in parser.sections():
        if section not in _SECTION_KEYS:
            if strict:
                raise ConfigError(f"unknown section [{section}]")
            continue
        allowed = _SECTION_KEYS[section]
        for key in parser[section]:
            if section == "ring":
                if key == "divisors" or _TRIPLE_KEY.match(key):
                    continue
                if strict:
                    raise ConfigError(f"[ring]: unknown key {key!r}")
            elif section == "scan":
                if key in allowed or re.match(r"^L\.\w+$", key):
                    continue
                if strict:
                    raise ConfigError(f"[scan]: unknown key {key!r}")
            elif allowed is not None and key not in allowed:
                if strict:
                    raise ConfigError(f"[{section}]: unknown key {key!r}")


def _require(parser: configparser.ConfigParser, section: str) -> configparser.SectionProxy:
    if not parser.has_section(section):
        raise MissingSection(f"config section [{section}] is required")
    return parser[section]


def load_ring(parser: configparser.ConfigParser) -> IntersectionRing:
    sec = _require(parser, "ring")
    names = tuple(sec.get("divisors", "").split())
    n = len(names)
    triple = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    seen: dict[tuple[int, ...], tuple[str, Fraction]] = {}
    for key, raw in sec.items():
        if key == "divisors":
            continue
        m = _TRIPLE_KEY.match(key)
        if m is None:
            raise ConfigError(f"[ring]: bad key {key!r}")
        try:
            idx = tuple(names.index(part) for part in m.groups())
        except ValueError:
            raise ConfigError(f"[ring]: {key!r} names an unknown divisor") from None
        value = _rat(raw, f"[ring] {key}")
        canon = tuple(sorted(idx))
        if canon in seen and seen[canon][1] != value:
            # Conflicting entries for one unordered triple make the
            # tensor asymmetric; surface that through ring_from_spec.
            prev_idx = seen[canon][0]
            i, j, k = [names.index(p) for p in prev_idx.split(".")]
            triple[i][j][k] = seen[canon][1]
            a, b, c = idx
            triple[a][b][c] = value
            spec = IntersectionRingSpec(
                names, tuple(tuple(tuple(row) for row in plane) for plane in triple)
            )
            return ring_from_spec(spec)  # raises AsymmetricTensor
        seen[canon] = (key, value)
        for a, b, c in itertools.permutations(idx):
            triple[a][b][c] = value
    spec = IntersectionRingSpec(
        names, tuple(tuple(tuple(row) for row in plane) for plane in triple)
    )
    return ring_from_spec(spec)


def load_fibration(parser: configparser.ConfigParser, ring: IntersectionRing) -> FibrationGeometry:
    sec = _require(parser, "fibration")
    fiber = _vec(sec.get("fiber", ""), "[fibration] fiber")
    if len(fiber) != len(ring.divisors):
        raise ConfigError("[fibration] fiber: wrong number of coefficients")
    g_B = _int(sec.get("base_genus", "0"), "[fibration] base_genus")
    return FibrationGeometry(ring=ring, fiber=fiber, base_genus=g_B)


def load_polarization(
    parser: configparser.ConfigParser, ring: IntersectionRing
) -> tuple[Fraction, ...]:
    sec = _require(parser, "polarization")
    H0 = _vec(sec.get("H0", ""), "[polarization] H0")
    if len(H0) != len(ring.divisors):
        raise ConfigError("[polarization] H0: wrong number of coefficients")
    return H0


def load_spectral(
    parser: configparser.ConfigParser, ring: IntersectionRing, section: str = "spectral"
) -> SpectralDatum:
    sec = _require(parser, section)
    cover = _vec(sec.get("cover", ""), f"[{section}] cover")
    if len(cover) != len(ring.divisors):
        raise ConfigError(f"[{section}] cover: wrong number of pairings")
    return SpectralDatum(
        cover_class=cover,
        n=_int(sec.get("n", "1"), f"[{section}] n"),
        g=_int(sec.get("g", "0"), f"[{section}] g"),
        d=_int(sec.get("d", "0"), f"[{section}] d"),
    )


def load_kernel(parser: configparser.ConfigParser, ring: IntersectionRing) -> KernelData:
    sec = _require(parser, "kernel")
    ndiv = len(ring.divisors)
    L = _vec(sec.get("L", ""), "[kernel] L")
    G2 = _vec(sec.get("G2", ""), "[kernel] G2")
    if len(L) != ndiv or len(G2) != ndiv:
        raise ConfigError("[kernel]: L and G2 need one entry per divisor")
    G1 = None
    if "G1" in sec:
        G1 = _vec(sec["G1"], "[kernel] G1")
        if len(G1) != ndiv:
            raise ConfigError("[kernel] G1: wrong number of coefficients")
    return KernelData(
        r=_int(sec.get("r", "1"), "[kernel] r"),
        L=L,
        s=_int(sec.get("s", "0"), "[kernel] s"),
        CQ=_rat(sec.get("CQ", "0"), "[kernel] CQ"),
        G2=G2,
        G3=_rat(sec.get("G3", "0"), "[kernel] G3"),
        G1=G1,
    )


def _interval(text: str, where: str) -> tuple[int, int]:
    parts = text.split()
    if len(parts) == 1:
        v = _int(parts[0], where)
        return (v, v)
    if len(parts) != 2:
        raise ConfigError(f"{where}: expected 'lo hi'")
    return (_int(parts[0], where), _int(parts[1], where))


def load_scan(
    parser: configparser.ConfigParser,
    fib: FibrationGeometry,
    H: Sequence[Fraction],
    max_results: Optional[int],
) -> tuple[str, ScanRequest]:
    sec = _require(parser, "scan")
    mode = sec.get("mode", "mukai").strip()
    if mode not in {"mukai", "rank_one"}:
        raise ConfigError(f"[scan] mode: unknown mode {mode!r}")
    names = fib.ring.divisors
    L_ranges = []
    for name in names:
        key = f"L.{name}"
        L_ranges.append(_interval(sec.get(key, "0 0"), f"[scan] {key}"))
    filters = frozenset(sec.get("filters", "").split())
    unknown = filters - KNOWN_FILTERS
    if unknown:
        raise ConfigError(f"[scan] filters: unknown {sorted(unknown)}")
    if "max_results" in sec:
        max_results = _int(sec["max_results"], "[scan] max_results")
    req = ScanRequest(
        fib=fib,
        H=tuple(int(x) for x in H),
        L_ranges=tuple(L_ranges),
        r_range=_interval(sec.get("r", "1 1"), "[scan] r"),
        s_range=_interval(sec.get("s", "0 0"), "[scan] s"),
        n_range=_interval(sec.get("n", "1 1"), "[scan] n"),
        d_range=_interval(sec.get("d", "0 0"), "[scan] d"),
        g_range=_interval(sec.get("g", "0 0"), "[scan] g"),
        filters=filters,
        max_results=max_results,
    )
    return mode, req


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _report(command: str, inputs: dict, results: dict, verdicts: list) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
        "verdicts": verdicts,
    }


def _verdict(name: str, passed: bool, detail: str = "") -> dict:
    return {"name": name, "passed": bool(passed), "detail": detail}


def cmd_ring_check(parser: configparser.ConfigParser) -> dict:
    ring = load_ring(parser)
    names = ring.divisors
    table = {}
    for i, a in enumerate(names):
        for j, b in enumerate(names):
            for k, c in enumerate(names):
                if i <= j <= k:
                    table[f"{a}.{b}.{c}"] = fmt(ring.triple(i, j, k))
    verdicts = [_verdict("tensor_symmetric", True, "validated on load")]
    results = {"divisors": list(names), "triple": table}
    if parser.has_section("fibration"):
        fib = load_fibration(parser, ring)
        results["fiber"] = fmt_vec(fib.fiber)
        results["base_genus"] = fib.base_genus
        results["alpha"] = fib.alpha
        verdicts.append(
            _verdict("fiber_squares_to_zero", True, "validated on load")
        )
    return _report("ring-check", {"divisors": list(names)}, results, verdicts)


def cmd_spectral(parser: configparser.ConfigParser) -> dict:
    ring = load_ring(parser)
    fib = load_fibration(parser, ring)
    inputs: dict = {}
    if parser.has_section("kernel"):
        sd = load_spectral(parser, ring)
        kd = load_kernel(parser, ring)
        ch = spectral_chern_general(fib, sd, kd)
        inputs = {"mode": "general", "n": sd.n, "g": sd.g, "d": sd.d, "r": kd.r}
        results = {
            "chi": sd.chi,
            "R": sd.ramification(fib.base_genus),
            "character": fmt_character(ch),
        }
    else:
        sd = load_spectral(parser, ring)
        ch = spectral_chern_rank_one(fib, sd)
        tw = twist(ch, -fib.fiber_class())
        inputs = {"mode": "rank_one", "n": sd.n, "g": sd.g, "d": sd.d}
        results = {
            "chi": sd.chi,
            "R": sd.ramification(fib.base_genus),
            "character": fmt_character(ch),
            "character_twisted_by_minus_f": fmt_character(tw),
        }
    return _report("spectral", inputs, results, [_verdict("computed", True)])


def cmd_stability(parser: configparser.ConfigParser) -> dict:
    ring = load_ring(parser)
    fib = load_fibration(parser, ring)
    H0 = load_polarization(parser, ring)
    if parser.has_section("kernel"):
        sd = load_spectral(parser, ring)
        ch = spectral_chern_general(fib, sd, load_kernel(parser, ring))
    else:
        sd = load_spectral(parser, ring)
        ch = spectral_chern_rank_one(fib, sd)
    report = stability_bound(ch, ring.element(deg2=H0), fib)
    results = {
        "character": fmt_character(ch),
        "B_pairings": fmt_vec(report.B),
        "B_H0": fmt(report.BH0),
        "H0sq_f": fmt(report.H02f),
        "M0": fmt(report.M0),
        "M0_ceil": report.M0_ceil,
    }
    verdicts = [
        _verdict(
            "bogomolov_nonnegative",
            not report.bogomolov_violated,
            f"B.H0 = {fmt(report.BH0)}",
        )
    ]
    return _report("stability", {"H0": fmt_vec(H0)}, results, verdicts)


def cmd_scan(parser: configparser.ConfigParser, max_results: Optional[int]) -> dict:
    ring = load_ring(parser)
    fib = load_fibration(parser, ring)
    H = load_polarization(parser, ring)
    mode, req = load_scan(parser, fib, H, max_results)
    if mode == "mukai":
        res = scan_mukai(req)
        rows = [
            {
                "r": hit.r,
                "L": list(hit.L),
                "s": hit.s,
                "gcd_triple": list(hit.gcd_triple),
                "square": fmt(hit.square),
            }
            for hit in res.rows
        ]
    else:
        res = scan_rank_one(req)
        rows = [
            {
                "n": hit.n,
                "g": hit.g,
                "d": hit.d,
                "kind": hit.kind,
                "R": hit.R,
                "ch1_fiber": hit.ch1_fiber,
                "ch3": hit.ch3,
            }
            for hit in res.rows
        ]
    results = {"mode": mode, "count": len(rows), "truncated": res.truncated, "rows": rows}
    return _report("scan", {"mode": mode}, results, [_verdict("computed", True)])


def cmd_extension(parser: configparser.ConfigParser) -> dict:
    ring = load_ring(parser)
    H = load_polarization(parser, ring)
    sec = _require(parser, "extension")
    e_c1 = _vec(sec.get("e_c1", ""), "[extension] e_c1")
    g_c1 = _vec(sec.get("g_c1", ""), "[extension] g_c1")
    if len(e_c1) != len(ring.divisors) or len(g_c1) != len(ring.divisors):
        raise ConfigError("[extension]: c1 vectors need one entry per divisor")
    chE = ring.element(deg0=_int(sec.get("e_rank", "1"), "e_rank"), deg2=e_c1)
    chG = ring.element(deg0=_int(sec.get("g_rank", "1"), "g_rank"), deg2=g_c1)
    v = extension_check(chE, chG, ring.element(deg2=H))
    results = {
        "mu_E": fmt(v.mu_E),
        "mu_G": fmt(v.mu_G),
        "mu_F": fmt(v.mu_F),
        "bound_rhs": fmt(v.bound_rhs),
    }
    verdicts = [
        _verdict("slope_bound", v.bound_ok, "mu_H(G) < mu_H(E) + rk(F)/(rk(E)rk(G))"),
        _verdict("subobject_slope", v.slope_ok, "mu_H(E) < mu_H(F)"),
    ]
    return _report("extension", {"H": fmt_vec(H)}, results, verdicts)


def cmd_oracle_verify(parser: configparser.ConfigParser) -> dict:
    k3 = ReflexiveK3Spec()
    ring = k3.threefold()
    sd = load_spectral(parser, ring, section="trivial")
    closed = trivial_fibration_chern(sd, k3)
    closed_untwisted = untwisted_transform_chern(sd, k3)
    oracle_untwisted = oracle_spectral_chern(sd, k3, twisted=False)
    oracle = oracle_spectral_chern(sd, k3, twisted=True)
    results = {
        "closed_form": fmt_character(closed),
        "oracle": fmt_character(oracle),
        "transform_closed_form": fmt_character(closed_untwisted),
        "transform_oracle": fmt_character(oracle_untwisted),
    }
    verdicts = [
        _verdict("transform_matches", oracle_untwisted == closed_untwisted, "oracle-verified"),
        _verdict("twisted_matches", oracle == closed, "oracle-verified"),
    ]
    return _report(
        "oracle-verify", {"n": sd.n, "g": sd.g, "d": sd.d}, results, verdicts
    )


# ---------------------------------------------------------------------------
# Rendering and entry point
# ---------------------------------------------------------------------------

def render_table(report: dict) -> str:
    lines = [f"command: {report['command']}"]

    def emit(prefix: str, value) -> None:
        if isinstance(value, dict):
            for key, sub in value.items():
                emit(f"{prefix}{key}.", sub) if isinstance(sub, dict) else lines.append(
                    f"  {prefix}{key:<24} {sub}"
                )
        else:
            lines.append(f"  {prefix:<26} {value}")

    for key, value in report["results"].items():
        if key == "rows":
            lines.append(f"  rows ({len(value)}):")
            for row in value:
                lines.append("    " + "  ".join(f"{k}={v}" for k, v in row.items()))
        else:
            emit("", {key: value})
    for verdict in report["verdicts"]:
        status = "PASS" if verdict["passed"] else "FAIL"
        detail = f"  ({verdict['detail']})" if verdict["detail"] else ""
        lines.append(f"  [{status}] {verdict['name']}{detail}")
    return "\n".join(lines)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="specfib",
        description="Exact spectral-sheaf arithmetic on K3-fibered threefolds",
    )
    parser.add_argument("command", choices=[
        "ring-check", "spectral", "stability", "scan", "extension", "oracle-verify",
    ])
    parser.add_argument("--config", required=True, help="path to the config document")
    parser.add_argument("--json", action="store_true", help="emit the JSON report only")
    strict = parser.add_mutually_exclusive_group()
    strict.add_argument("--strict", dest="strict", action="store_true", default=True)
    strict.add_argument("--no-strict", dest="strict", action="store_false")
    parser.add_argument("--max-results", type=int, default=None)
    args = parser.parse_args(argv)

    try:
        cfg = parse_config(args.config, strict=args.strict)
        if args.command == "ring-check":
            report = cmd_ring_check(cfg)
        elif args.command == "spectral":
            report = cmd_spectral(cfg)
        elif args.command == "stability":
            report = cmd_stability(cfg)
        elif args.command == "scan":
            report = cmd_scan(cfg, args.max_results)
        elif args.command == "extension":
            report = cmd_extension(cfg)
        else:
            report = cmd_oracle_verify(cfg)
    except SpecfibError as exc:
        message = {"error": type(exc).__name__, "detail": str(exc)}
        if args.json:
            print(json.dumps(message))
        else:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2

    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(render_table(report))
    return 0 if all(v["passed"] for v in report["verdicts"]) else 1


if __name__ == "__main__":
    sys.exit(main())
