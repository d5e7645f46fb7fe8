"""
Command-line front end and structured reports.

Input grammar (one record per line in batch files)::

    record      := coeff-list | object
    coeff-list  := "[" coeff "," coeff "," coeff "," coeff "," coeff "]"
    object      := {"a": coeff-list, "places": ["real" | "complex", ...], "label": string}
    coeff       := integer | decimal | "p/q" | "re,im" | [re, im]

Integers of any size and decimals are kept exact.  A coefficient with a
nonzero imaginary part makes the curve complex, and every place it is
evaluated at is then a complex place.  Blank lines and lines starting with
``#`` are ignored in batch files.

Output: one JSON object per report, carrying ``schema_version``.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional

import numpy as np

from . import numeric
from .bound import BoundConfig, Variant, iterate_bound, select_variant
from .curve import CurveModel, Place, check_place, from_a_invariants
from .errors import ArchHeightError, ArityError, ParseError
from .oracle import DEFAULT_SAMPLES, DEFAULT_TERMS, empirical_max_psi
from .torsion import torsion_constants

SCHEMA_VERSION = 1
NORMALIZATION = (
    "Psi_v = -sum_n 4^(-n-1) log Phi_v(2^n P), naive height from log max(|x1|,|x2|)_v "
    "of the given model; bounds are for max Psi_v at one archimedean place"
)
SOUNDNESS_SLACK = 1e-9

VARIANT_ALIASES = {
    "auto": Variant.AUTO,
    "complex": Variant.COMPLEX_FORMULA,
    "real": Variant.REAL_ONE_COMPONENT,
}


# -- input -------------------------------------------------------------------

@dataclass(frozen=True)
class CurveInput:
    a_invariants: tuple  # Fraction, or (re, im) pair of Fractions
    places: tuple
    label: Optional[str] = None

    @property
    def is_real(self) -> bool:
        return all(not isinstance(a, tuple) for a in self.a_invariants)

    def model(self) -> CurveModel:
        return from_a_invariants(self.a_invariants)


def _locate(text: str, token) -> int:
    for needle in (json.dumps(token) if isinstance(token, str) else None, str(token)):
        if needle is not None and (pos := text.find(needle)) >= 0:
            return pos + 1
    return 1


def _rational(token, text: str, line: int) -> Fraction:
    try:
        if isinstance(token, bool):
            raise TypeError
        if isinstance(token, (int, Fraction)):
            return Fraction(token)
        if isinstance(token, str):
            return Fraction(token.strip())
        raise TypeError
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParseError(f"cannot read {token!r} as a rational number", line, _locate(text, token)) from None


def _coefficient(token, text: str, line: int):
    if isinstance(token, list):
        if len(token) != 2:
            raise ParseError(f"complex coefficient needs [re, im], got {token!r}", line, _locate(text, "["))
        parts = token
    elif isinstance(token, str) and "," in token:
        parts = token.split(",")
        if len(parts) != 2:
            raise ParseError(f"complex coefficient needs 're,im', got {token!r}", line, _locate(text, token))
    else:
        return _rational(token, text, line)
    re, im = (_rational(p, text, line) for p in parts)
    return re if im == 0 else (re, im)


def parse_input(text: str, line: int = 1) -> CurveInput:
    """Parse one curve record."""
    stripped = text.strip()
    if not stripped.startswith(("[", "{")):
        stripped = "[" + stripped + "]"
    try:
        data = json.loads(stripped, parse_float=Fraction, parse_int=int)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line + exc.lineno - 1, exc.colno) from None

    label = None
    places = None
    if isinstance(data, dict):
        unknown = set(data) - {"a", "places", "label"}
        if unknown:
            raise ParseError(f"unknown keys {sorted(unknown)}", line, _locate(text, sorted(unknown)[0]))
        if "a" not in data:
            raise ParseError("record has no 'a' list", line, 1)
        label = data.get("label")
        if label is not None and not isinstance(label, str):
            raise ParseError("label must be a string", line, _locate(text, "label"))
        places = data.get("places")
        data = data["a"]
    if not isinstance(data, list):
        raise ParseError("expected a list of five coefficients", line, 1)
    if len(data) != 5:
        raise ArityError(f"expected 5 coefficients a1, a2, a3, a4, a6, got {len(data)}", line, 1)
    coeffs = tuple(_coefficient(tok, text, line) for tok in data)
    real = all(not isinstance(a, tuple) for a in coeffs)

    if places is None:
        kinds = (Place.REAL if real else Place.COMPLEX,)
    else:
        if isinstance(places, str):
            places = [places]
        try:
            kinds = [Place(p) for p in places]
        except (TypeError, ValueError):
            raise ParseError(f"places must be 'real' or 'complex', got {places!r}", line,
                             _locate(text, "places")) from None
        if not real:
            kinds = [Place.COMPLEX for _ in kinds]
        kinds = tuple(dict.fromkeys(kinds))
        if not kinds:
            raise ParseError("empty place list", line, _locate(text, "places"))
    return CurveInput(coeffs, tuple(kinds), label)


def _render_rational(q: Fraction):
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _render_coefficient(a):
    if isinstance(a, tuple):
        return f"{_render_rational(a[0])},{_render_rational(a[1])}"
    return _render_rational(a)


def render_input(inp: CurveInput) -> str:
    record = {"a": [_render_coefficient(a) for a in inp.a_invariants],
              "places": [p.value for p in inp.places]}
    if inp.label is not None:
        record["label"] = inp.label
    return json.dumps(record)


# -- reports -------------------------------------------------------------------

@dataclass(frozen=True)
class ValidationSpec:
    n_samples: int = DEFAULT_SAMPLES
    terms: int = DEFAULT_TERMS
    seed: int = 0


@dataclass
class PlaceReport:
    place: str
    variant_used: str
    two_torsion: list
    c_seq: list
    bound: float
    iterations: int
    wall_time: float
    validation: Optional[dict] = None
    bruin_offset: Optional[float] = None
    bound_bruin_normalization: Optional[float] = None


@dataclass
class Report:
    label: Optional[str]
    a_invariants: list
    b_invariants: dict
    discriminant_sign: Optional[str]
    places: List[PlaceReport] = field(default_factory=list)
    normalization: str = NORMALIZATION
    schema_version: int = SCHEMA_VERSION

    def to_record(self) -> dict:
        record = asdict(self)
        for entry in record["places"]:
            for key in ("validation", "bruin_offset", "bound_bruin_normalization"):
                if entry[key] is None:
                    del entry[key]
        return record


def _complex_pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _log_abs_disc(c: CurveModel) -> float:
    if c.exact is not None:
        d = c.exact[4]
        return math.log(abs(d.numerator)) - math.log(d.denominator)
    return math.log(abs(complex(c.disc)))


def compute_report(inp: CurveInput, cfg: BoundConfig = BoundConfig(),
                   validate: Optional[ValidationSpec] = None,
                   bruin_normalization: bool = False) -> Report:
    """Bound (and optionally validate) every requested place of one curve."""
    c = inp.model()
    names = ("b2", "b4", "b6", "b8")
    if c.exact is not None:
        b_inv = {n: _render_rational(v) for n, v in zip(names, c.exact)}
    else:
        b_inv = {n: _complex_pair(getattr(c, n)) for n in names}
    sign = c.disc_sign
    report = Report(
        label=inp.label,
        a_invariants=[_render_coefficient(a) for a in inp.a_invariants],
        b_invariants=b_inv,
        discriminant_sign=None if sign is None else ("positive" if sign > 0 else "negative"),
    )
    for place in inp.places:
        start = time.perf_counter()
        place = check_place(c, place)
        variant = cfg.variant
        if variant is Variant.AUTO:
            variant = select_variant(c, place)
        elif variant is Variant.REAL_ONE_COMPONENT and place is Place.COMPLEX:
            raise ValueError("the real one-component variant only applies at a real place")
        tc = torsion_constants(c, place)
        result = iterate_bound(tc, cfg, variant)
        elapsed = time.perf_counter() - start
        entry = PlaceReport(
            place=place.value,
            variant_used=result.variant_used.value,
            two_torsion=[_complex_pair(x) for x in tc.xt],
            c_seq=[float(v) for v in result.c_seq],
            bound=float(result.bound),
            iterations=result.iterations,
            wall_time=elapsed,
        )
        if validate is not None:
            emp = empirical_max_psi(c, place, validate.n_samples, validate.terms, validate.seed)
            entry.validation = {
                "n_samples": validate.n_samples,
                "terms": validate.terms,
                "seed": validate.seed,
                "empirical_max": emp,
                "sound": bool(emp <= entry.bound + SOUNDNESS_SLACK),
            }
        if bruin_normalization:
            entry.bruin_offset = _log_abs_disc(c) / 6
            entry.bound_bruin_normalization = entry.bound + entry.bruin_offset
        report.places.append(entry)
    return report


def _line_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _error_record(lineno: int, exc: Exception) -> dict:
    return {"schema_version": SCHEMA_VERSION, "line": lineno,
            "error": type(exc).__name__, "message": str(exc)}


def _run_line(job) -> dict:
    lineno, text, cfg, validate, bruin, precision = job
    if numeric.get_precision() != precision:
        numeric.set_precision(precision)
    try:
        inp = parse_input(text, lineno)
        record = compute_report(inp, cfg, validate, bruin).to_record()
    except (ArchHeightError, ValueError, ArithmeticError) as exc:
        return _error_record(lineno, exc)
    record["line"] = lineno
    return record


def batch_run(path, cfg: BoundConfig = BoundConfig(), parallelism: int = 1,
              validate: Optional[ValidationSpec] = None, seed: int = 0,
              bruin_normalization: bool = False) -> Iterator[dict]:
    """
    One record per curve line, in input order, then a summary record.

    Per-curve failures become error records.  The validation seed of line
    ``i`` is derived from ``(seed, i)``.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    precision = numeric.get_precision()
    jobs = []
    for lineno, text in enumerate(lines, start=1):
        if not text.strip() or text.lstrip().startswith("#"):
            continue
        v = None
        if validate is not None:
            v = ValidationSpec(validate.n_samples, validate.terms, _line_seed(seed, lineno))
        jobs.append((lineno, text, cfg, v, bruin_normalization, precision))

    n_ok = n_err = 0
    bounds, times = [], []
    if parallelism > 1 and len(jobs) > 1:
        pool = concurrent.futures.ProcessPoolExecutor(max_workers=parallelism)
        results = pool.map(_run_line, jobs, chunksize=max(1, len(jobs) // (8 * parallelism)))
    else:
        pool = None
        results = map(_run_line, jobs)
    try:
        for record in results:
            if "error" in record:
                n_err += 1
            else:
                n_ok += 1
                for entry in record["places"]:
                    bounds.append(entry["bound"])
                    times.append(entry["wall_time"])
            yield record
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    yield {
        "schema_version": SCHEMA_VERSION,
        "summary": {
            "reports": n_ok,
            "errors": n_err,
            "mean_bound": sum(bounds) / len(bounds) if bounds else None,
            "mean_wall_time": sum(times) / len(times) if times else None,
        },
    }


# -- rendering -----------------------------------------------------------------

def render_json(record: dict) -> str:
    return json.dumps(record)


def render_table(record: dict) -> str:
    if "summary" in record:
        s = record["summary"]
        mean = "-" if s["mean_bound"] is None else f"{s['mean_bound']:.6f}"
        return f"# {s['reports']} reports, {s['errors']} errors, mean bound {mean}"
    if "error" in record:
        return f"line {record['line']}: {record['error']}: {record['message']}"
    name = record["label"] or json.dumps(record["a_invariants"], separators=(",", ":"))
    rows = []
    for entry in record["places"]:
        row = (f"{name:<24} {entry['place']:<8} {entry['variant_used']:<19} "
               f"N={entry['iterations']:<3} bound={entry['bound']:.9f}")
        if "validation" in entry:
            v = entry["validation"]
            row += f"  emp_max={v['empirical_max']:.6f} sound={v['sound']}"
        if "bound_bruin_normalization" in entry:
            row += f"  bruin={entry['bound_bruin_normalization']:.6f}"
        rows.append(row)
    return "\n".join(rows)


# -- command line --------------------------------------------------------------

def _env(name, default, convert):
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return convert(raw)
    except ValueError:
        raise SystemExit(f"archheight: invalid value {raw!r} for {name}") from None


def _variant(text: str) -> Variant:
    text = text.strip().lower()
    if text in VARIANT_ALIASES:
        return VARIANT_ALIASES[text]
    return Variant(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--variant", type=_variant, default=_env("ARCHHEIGHT_VARIANT", Variant.AUTO, _variant),
                        help="auto | complex | real (default: auto)")
    common.add_argument("--tol", type=float, default=_env("ARCHHEIGHT_TOL", 1e-9, float),
                        help="relative stopping tolerance on c_N")
    common.add_argument("--max-iter", type=int, default=_env("ARCHHEIGHT_MAX_ITER", 60, int))
    common.add_argument("--slack", type=float, default=_env("ARCHHEIGHT_SLACK", 1e-8, float),
                        help="additive safety slack on the final bound")
    common.add_argument("--validate", type=int, metavar="N", default=None,
                        help="also sample N points and report the empirical max of Psi")
    common.add_argument("--terms", type=int, default=_env("ARCHHEIGHT_TERMS", DEFAULT_TERMS, int))
    common.add_argument("--seed", type=int, default=_env("ARCHHEIGHT_SEED", 0, int))
    common.add_argument("--precision", type=int, default=None,
                        help="working precision in bits (default 53, env ARCHHEIGHT_PRECISION)")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--table", dest="fmt", action="store_const", const="table")
    common.add_argument("--bruin-normalization", action="store_true",
                        help="also report bound + log|disc|/6")

    parser = argparse.ArgumentParser(
        prog="archheight",
        description="Upper bounds for the archimedean local naive-minus-canonical height difference.")
    sub = parser.add_subparsers(dest="command", required=True)
    comp = sub.add_parser("compute", parents=[common], help="bound a single curve")
    comp.add_argument("--curve", required=True, help="coefficient list, e.g. '[0,-1,1,-7820,-263580]'")
    comp.add_argument("--place", action="append", choices=[p.value for p in Place], default=None)
    comp.add_argument("--label", default=None)
    batch = sub.add_parser("batch", parents=[common], help="bound every curve in a line-delimited file")
    batch.add_argument("file")
    batch.add_argument("--jobs", type=int, default=_env("ARCHHEIGHT_JOBS", 1, int))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.fmt or _env("ARCHHEIGHT_FORMAT", "json", str)
    render = render_table if fmt == "table" else render_json
    try:
        if args.precision is not None:
            numeric.set_precision(args.precision)
        cfg = BoundConfig(rel_tol=args.tol, max_iter=args.max_iter, variant=args.variant,
                          safety_slack=args.slack)
        validate = None
        if args.validate is not None:
            if args.validate < 1 or args.terms < 1:
                raise ValueError("--validate and --terms need positive values")
            validate = ValidationSpec(args.validate, args.terms, args.seed)
    except ValueError as exc:
        print(f"archheight: {exc}", file=sys.stderr)
        return 2

    if args.command == "compute":
        try:
            inp = parse_input(args.curve)
        except ParseError as exc:
            print(f"archheight: {exc}", file=sys.stderr)
            return 2
        if args.place:
            kinds = [Place(p) if inp.is_real else Place.COMPLEX for p in args.place]
            inp = CurveInput(inp.a_invariants, tuple(dict.fromkeys(kinds)), inp.label)
        if args.label is not None:
            inp = CurveInput(inp.a_invariants, inp.places, args.label)
        try:
            report = compute_report(inp, cfg, validate, args.bruin_normalization)
        except (ArchHeightError, ValueError, ArithmeticError) as exc:
            print(f"archheight: {type(exc).__name__}: {exc}", file=sys.stderr)
            return 1
        print(render(report.to_record()))
        return 0

    if args.jobs < 1:
        print("archheight: --jobs must be >= 1", file=sys.stderr)
        return 2
    try:
        for record in batch_run(args.file, cfg, args.jobs, validate, args.seed, args.bruin_normalization):
            print(render(record), flush=False)
    except OSError as exc:
        print(f"archheight: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
