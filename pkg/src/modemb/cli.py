"""Command-line front end: parse space specifications, decide embeddings,
evaluate norms, run experiments and region tables, and self-test.

Space grammar: FAMILY[key=value,...] with families B, M, F, W, FL; indices
are exact rationals written a/b (or integers) and infinity is written inf.
Examples: B[p=1,q=2,s=1/2], M[p=2,q=1,s=0], W[r=1,s=0], FL[r=2].

Exit codes for decide: 0 embedding holds, 1 embedding fails,
2 uncharacterized pair or domain error, 64 malformed specification.
"""
from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

from .exponents import Exponent, as_fraction
from .families import (
    family_annulus,
    family_dilated_kernel,
    family_dilation,
    family_lattice_comb,
    family_single_box,
    grid_for,
)
from .grid import GridSpec
from .norms import space_norm
from .oracle import (
    DomainError,
    Family,
    SpaceSpec,
    UncharacterizedPairError,
    Verdict,
    classify_region,
    decide,
)
from . import experiments
from .partitions import build_dyadic, build_uniform, selftest_report

EX_USAGE = 64

_FAMILY_TOKENS = {"B": Family.BESOV, "M": Family.MODULATION, "F": Family.TRIEBEL,
                  "W": Family.SOBOLEV_W, "FL": Family.FOURIER_L}
_KEYS = {
    Family.BESOV: ("p", "q", "s"),
    Family.MODULATION: ("p", "q", "s"),
    Family.TRIEBEL: ("p", "q", "s"),
    Family.SOBOLEV_W: ("r", "s"),
    Family.FOURIER_L: ("r",),
}


class SpecParseError(ValueError):
    """Malformed space specification; carries the offending position."""

    def __init__(self, text: str, pos: int, message: str):
        self.text, self.pos, self.message = text, pos, message
        super().__init__(f"{message} at position {pos}: {text!r}")


_RATIONAL_RE = re.compile(r"^-?\d+(/\d+)?$")


def _parse_rational(text: str, token: str, pos: int, allow_negative: bool):
    token = token.strip()
    if token.lower() == "inf":
        return Exponent.of("inf")
    if not _RATIONAL_RE.match(token):
        raise SpecParseError(
            text, pos, f"expected a rational a/b or 'inf' (no decimals), got {token!r}")
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise SpecParseError(text, pos, f"expected a rational or 'inf', got {token!r}")
    if not allow_negative and value <= 0:
        raise SpecParseError(text, pos, f"index must be positive, got {token!r}")
    return value


def parse_space(text: str, d: int = 1) -> SpaceSpec:
    """Parse the textual grammar into a SpaceSpec."""
    stripped = text.strip()
    open_idx = stripped.find("[")
    if open_idx < 0 or not stripped.endswith("]"):
        raise SpecParseError(text, len(stripped), "expected FAMILY[key=value,...]")
    token = stripped[:open_idx].strip()
    family = _FAMILY_TOKENS.get(token)
    if family is None:
        raise SpecParseError(text, 0, f"unknown family {token!r} (use B, M, F, W, FL)")
    body = stripped[open_idx + 1:-1]
    allowed = _KEYS[family]
    seen: dict[str, object] = {}
    offset = open_idx + 1
    if body.strip():
        for part in body.split(","):
            if "=" not in part:
                raise SpecParseError(text, offset, f"expected key=value, got {part!r}")
            key, _, raw = part.partition("=")
            key = key.strip()
            if key not in allowed:
                raise SpecParseError(
                    text, offset,
                    f"index {key!r} not valid for family {token} (allowed: {allowed})")
            if key in seen:
                raise SpecParseError(text, offset, f"duplicate index {key!r}")
            if key == "s":
                value = _parse_rational(text, raw, offset, allow_negative=True)
                if isinstance(value, Exponent):
                    raise SpecParseError(text, offset, "s must be a finite rational")
            else:
                value = _parse_rational(text, raw, offset, allow_negative=False)
            seen[key] = value
            offset += len(part) + 1
    missing = [k for k in allowed if k != "s" and k not in seen]
    if missing:
        raise SpecParseError(text, len(stripped),
                             f"family {token} requires indices {missing}")
    kwargs = {"family": family, "d": d}
    for key in ("p", "q", "r"):
        if key in seen:
            value = seen[key]
            kwargs[key] = value if isinstance(value, Exponent) else Exponent.of(value)
    if family is not Family.FOURIER_L:
        kwargs["s"] = seen.get("s", Fraction(0))
    return SpaceSpec(**kwargs)


def _render_value(value) -> str:
    if isinstance(value, Exponent):
        return str(value)
    return str(value)


def render_space(spec: SpaceSpec) -> str:
    """Canonical textual form; inverse of parse_space."""
    token = spec.family.value
    parts = []
    for key in _KEYS[spec.family]:
        value = getattr(spec, key)
        parts.append(f"{key}={_render_value(value)}")
    return f"{token}[{','.join(parts)}]"


def _verdict_json(source, target, verdict: Verdict) -> dict:
    payload = {"schema": "modemb/verdict/v1",
               "source": render_space(source),
               "target": render_space(target),
               "d": source.d}
    payload.update(verdict.as_dict())
    return payload


def _load_config(path: str | None) -> dict:
    """key = value lines; '#' starts a comment. Known keys: d, oversampling,
    n, lmin, lmax, tolerance, bound, resolution, width."""
    if not path:
        return {}
    config = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        config[key.strip()] = value.strip()
    return config


def _cfg(args, config, name, cast, default):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        return cast(config[name])
    return default


_TABLE_PAIRS = {
    "B-M": (Family.BESOV, Family.MODULATION),
    "M-B": (Family.MODULATION, Family.BESOV),
    "W-M": (Family.SOBOLEV_W, Family.MODULATION),
    "M-W": (Family.MODULATION, Family.SOBOLEV_W),
    "F-M": (Family.TRIEBEL, Family.MODULATION),
    "M-F": (Family.MODULATION, Family.TRIEBEL),
}

_FAMILY_KINDS = ("single_box", "annulus", "lattice_comb", "dilation", "dilated_kernel")


def _build_family(kind, args, config, d):
    width = as_fraction(_cfg(args, config, "width", str, "1"))
    n_override = _cfg(args, config, "n", int, None)
    m_override = _cfg(args, config, "oversampling", int, None)
    if kind == "dilation":
        if args.lam is None:
            raise ValueError("--lam is required for the dilation family")
        lam = as_fraction(args.lam)
        spec = grid_for("dilation", d=d, lam=lam)
        if n_override or m_override:
            spec = GridSpec(d, n_override or spec.n, m_override or spec.oversampling)
        return spec, family_dilation(spec, lam)
    if kind == "dilated_kernel":
        if args.t is None:
            raise ValueError("--t is required for the dilated-kernel family")
        t = as_fraction(args.t)
        spec = grid_for("dilated_kernel", d=d, t=t)
        if n_override or m_override:
            spec = GridSpec(d, n_override or spec.n, m_override or spec.oversampling)
        return spec, family_dilated_kernel(spec, t)
    if args.level is None:
        raise ValueError(f"--level is required for the {kind} family")
    spec = grid_for(kind, d=d, level=args.level, width=width)
    if n_override or m_override:
        spec = GridSpec(d, n_override or spec.n, m_override or spec.oversampling)
    if kind == "single_box":
        return spec, family_single_box(spec, args.level)
    if kind == "annulus":
        return spec, family_annulus(spec, args.level)
    return spec, family_lattice_comb(spec, args.level, width)


def cmd_decide(args, config) -> int:
    d = _cfg(args, config, "d", int, 1)
    try:
        source = parse_space(args.source, d)
        target = parse_space(args.target, d)
    except SpecParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EX_USAGE
    try:
        verdict = decide(source, target)
    except (UncharacterizedPairError, DomainError) as exc:
        print(f"undecidable: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(_verdict_json(source, target, verdict), indent=2))
    else:
        rel = ("embeds into" if verdict.holds else "does not embed into")
        strictness = "strict" if verdict.strict else "non-strict"
        print(f"{render_space(source)} {rel} {render_space(target)}  (d = {d})")
        print(f"  clause:     {verdict.clause}")
        print(f"  critical s: {verdict.critical_s} ({strictness} comparison)")
        print(f"  detail:     {verdict.explanation}")
    return 0 if verdict.holds else 1


def cmd_table(args, config) -> int:
    pair = _TABLE_PAIRS[args.pair]
    resolution = _cfg(args, config, "resolution", int, 33)
    if not 1 <= resolution <= 64:
        print("resolution must be between 1 and 64", file=sys.stderr)
        return 2
    d = _cfg(args, config, "d", int, 1)
    s = as_fraction(args.s)
    if resolution == 1:
        coords = [Fraction(0)]
    else:
        coords = [Fraction(i, resolution - 1) for i in range(resolution)]
    points = [(u, v) for u in coords for v in coords]
    cells = classify_region(pair[0], pair[1], points, s, d)
    rows = [{"inv_p": str(c.inv_p), "inv_q": str(c.inv_q),
             "holds": int(c.holds), "clause": c.clause,
             "piece": c.piece.value if c.piece else ""} for c in cells]
    out = args.out
    handle = open(out, "w", newline="") if out else sys.stdout
    try:
        writer = csv.DictWriter(handle,
                                fieldnames=["inv_p", "inv_q", "holds", "clause", "piece"])
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out:
            handle.close()
    return 0


def cmd_norm(args, config) -> int:
    d = _cfg(args, config, "d", int, 1)
    try:
        space = parse_space(args.space, d)
    except SpecParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EX_USAGE
    spec, f = _build_family(args.family, args, config, d)
    uniform = build_uniform(spec) if space.family is Family.MODULATION else None
    dyadic = (build_dyadic(spec)
              if space.family in (Family.BESOV, Family.TRIEBEL) else None)
    value = space_norm(f, space, uniform, dyadic)
    if args.json:
        print(json.dumps({"schema": "modemb/norm/v1",
                          "space": render_space(space),
                          "family": args.family,
                          "level": args.level,
                          "value": value}, indent=2))
    else:
        print(value)
    return 0


def _parse_levels(args, config):
    if getattr(args, "t_list", None):
        return [as_fraction(tok) for tok in args.t_list.split(",")]
    lmin = _cfg(args, config, "lmin", int, 4)
    lmax = _cfg(args, config, "lmax", int, 8)
    if lmax < lmin:
        raise ValueError("lmax must be >= lmin")
    return list(range(lmin, lmax + 1))


def _experiment_common(args, config, runner) -> int:
    d = _cfg(args, config, "d", int, 1)
    try:
        source = parse_space(args.source, d)
        target = parse_space(args.target, d)
    except SpecParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EX_USAGE
    levels = _parse_levels(args, config)
    try:
        report = runner(source, target, levels)
    except (UncharacterizedPairError, DomainError, experiments.CatalogueError) as exc:
        print(f"undecidable: {exc}", file=sys.stderr)
        return 2
    if args.csv:
        report.write_csv(args.csv)
    if args.json is not None:
        Path(args.json).write_text(report.to_json() + "\n")
        status = "pass" if report.passed else "fail"
        print(f"{report.mode} {status}: report written to {args.json}")
    else:
        print(report.to_json())
    return 0 if report.passed else 1


def cmd_sharpness(args, config) -> int:
    tolerance = _cfg(args, config, "tolerance", float, 0.2)
    width = as_fraction(_cfg(args, config, "width", str, "1"))

    def runner(source, target, levels):
        return experiments.run_sharpness(source, target, args.family, levels,
                                         tolerance=tolerance, width=width)

    return _experiment_common(args, config, runner)


def cmd_boundedness(args, config) -> int:
    bound = _cfg(args, config, "bound", float, 8.0)
    width = as_fraction(_cfg(args, config, "width", str, "1"))

    def runner(source, target, levels):
        return experiments.run_boundedness(source, target, args.family, levels,
                                           bound=bound, width=width)

    return _experiment_common(args, config, runner)


def cmd_selftest(args, config) -> int:
    d = _cfg(args, config, "d", int, 1)
    n = _cfg(args, config, "n", int, 2 ** 14 if d == 1 else 2 ** 8)
    m = _cfg(args, config, "oversampling", int, 8)
    report = selftest_report(GridSpec(d=d, n=n, oversampling=m))
    text = json.dumps(report, indent=2)
    if args.json:
        Path(args.json).write_text(text + "\n")
    print(text)
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modemb",
        description="Embedding oracle and quasi-norm toolkit for modulation, "
                    "Besov, Triebel, Sobolev and Fourier-Lp spaces")
    parser.add_argument("--config", help="key = value config file for defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="decide an embedding query exactly")
    p.add_argument("--from", dest="source", required=True, metavar="SPEC")
    p.add_argument("--to", dest="target", required=True, metavar="SPEC")
    p.add_argument("-d", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_decide)

    p = sub.add_parser("table", help="region-classification sweep as CSV")
    p.add_argument("--pair", choices=sorted(_TABLE_PAIRS), required=True)
    p.add_argument("--s", required=True, help="smoothness, exact rational")
    p.add_argument("--resolution", type=int, default=None)
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.add_argument("-d", type=int, default=None)
    p.set_defaults(fn=cmd_table)

    p = sub.add_parser("norm", help="evaluate a quasi-norm of a family member")
    p.add_argument("--family", choices=_FAMILY_KINDS, required=True)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--t", default=None, help="dilated-kernel parameter")
    p.add_argument("--lam", default=None, help="dilation parameter")
    p.add_argument("--width", default=None, help="comb width a")
    p.add_argument("--space", required=True, metavar="SPEC")
    p.add_argument("--oversampling", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("-d", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_norm)

    for name, fn in (("sharpness", cmd_sharpness), ("boundedness", cmd_boundedness)):
        p = sub.add_parser(name, help=f"run a {name} experiment")
        p.add_argument("--from", dest="source", required=True, metavar="SPEC")
        p.add_argument("--to", dest="target", required=True, metavar="SPEC")
        p.add_argument("--family", choices=_FAMILY_KINDS, required=True)
        p.add_argument("--lmin", type=int, default=None)
        p.add_argument("--lmax", type=int, default=None)
        p.add_argument("--t-list", default=None,
                       help="comma-separated kernel parameters, e.g. 1/4,1/16,1/64")
        p.add_argument("--tolerance", type=float, default=None)
        p.add_argument("--bound", type=float, default=None)
        p.add_argument("--width", default=None)
        p.add_argument("--csv", default=None, help="write per-level CSV here")
        p.add_argument("--json", default=None, help="write the JSON report here")
        p.add_argument("-d", type=int, default=None)
        p.set_defaults(fn=fn)

    p = sub.add_parser("selftest", help="run the partition/reconstruction checks")
    p.add_argument("--json", default=None, help="write the JSON report here")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--oversampling", type=int, default=None)
    p.add_argument("-d", type=int, default=None)
    p.set_defaults(fn=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.fn(args, config)
    except SpecParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EX_USAGE
    except (UncharacterizedPairError, DomainError) as exc:
        print(f"undecidable: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
