"""Command-line interface.

Exit codes: 0 success, 2 validation, 3 numerical failure, 4 I/O.
"""

from __future__ import annotations

import argparse
import csv
import glob
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NumericalError, ValidationError
from .estimator import B_POLICIES, DEFAULT_J1, estimate, median_estimate, resolve_weights
from .model import OfbmSpec, SamplePath
from .montecarlo import McConfig, run
from .spectrum import analyze_path, format_logscale_tsv, logscale_diagram
from .synthesis import build_plan, synthesize
from .wavelet import VARIANTS, make_bank

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


# --- file formats -----------------------------------------------------------

def format_path_csv(data: np.ndarray) -> str:
    buf = io.StringIO()
    n = data.shape[1]
    buf.write(",".join(f"x{i + 1}" for i in range(n)) + "\n")
    for row in data:
        buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return buf.getvalue()


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def parse_path_csv(text: str, source: str = "<csv>") -> np.ndarray:
    """Rows are time, columns are components; a header row is optional."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValidationError(f"{source}: empty file")
    start = 0 if all(_is_number(c) for c in rows[0]) else 1
    width = len(rows[start]) if start < len(rows) else 0
    out = []
    for lineno, row in enumerate(rows[start:], start=start + 1):
        if len(row) != width:
            raise ValidationError(f"{source}:{lineno}: expected {width} columns, got {len(row)}")
        try:
            out.append([float(c) for c in row])
        except ValueError:
            col = next(i for i, c in enumerate(row) if not _is_number(c))
            raise ValidationError(f"{source}:{lineno}:{col + 1}: not a number: {row[col]!r}") from None
    if len(out) < 2:
        raise ValidationError(f"{source}: need at least 2 data rows")
    return np.array(out)


def _read_text(path: str) -> str:
    return Path(path).read_text()


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _dump_json(d: dict) -> str:
    return json.dumps(d, indent=1, sort_keys=True, allow_nan=False) + "\n"


# --- commands ---------------------------------------------------------------

def _j2_arg(s: str):
    if s == "auto":
        return s
    try:
        return int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--j2 must be 'auto' or an integer, got {s!r}") from None


def _add_analysis_flags(p):
    p.add_argument("--j1", type=int, default=DEFAULT_J1, help="finest regression octave (default 6)")
    p.add_argument("--j2", type=_j2_arg, default="auto", help="coarsest octave or 'auto' (default)")
    p.add_argument("--nmom", type=int, default=2, help="vanishing moments N_psi (default 2)")
    p.add_argument("--variant", choices=VARIANTS, default="la", help="Daubechies variant (default la)")
    p.add_argument("--b", choices=B_POLICIES, default="nu-over-2j", help="regression confidence scalars")


def cmd_synth(args) -> int:
    if args.nu < 2:
        raise ValidationError(f"--nu must be >= 2, got {args.nu}")
    spec = OfbmSpec.from_json(_read_text(args.config))
    path = synthesize(build_plan(spec, args.nu), args.seed)
    _write_text(args.out, format_path_csv(path.data))
    return EXIT_OK


def _analysis_doc(est, bank, nu, n) -> dict:
    d = est.to_dict()
    d.update(nu=int(nu), n=int(n), n_moments=bank.n_moments, variant=bank.variant)
    return d


def cmd_analyze(args) -> int:
    data = parse_path_csv(_read_text(args.input), args.input)
    bank = make_bank(args.nmom, args.variant)
    nu, n = data.shape
    weights = resolve_weights(nu, n, bank, args.j1, args.j2, args.b)
    spectrum = analyze_path(SamplePath(data), bank, weights.j2)
    est = estimate(spectrum, weights)
    _write_text(args.out, _dump_json(_analysis_doc(est, bank, nu, n)))
    if args.tsv:
        _write_text(args.tsv, format_logscale_tsv(logscale_diagram(spectrum)))
    return EXIT_OK


def _expand_inputs(patterns) -> list[str]:
    files = []
    for pat in patterns:
        hits = sorted(glob.glob(pat))
        if not hits:
            raise FileNotFoundError(f"no input matches {pat!r}")
        files.extend(hits)
    return files


def cmd_median(args) -> int:
    files = _expand_inputs(args.inputs)
    paths = [parse_path_csv(_read_text(f), f) for f in files]
    n = paths[0].shape[1]
    for f, p in zip(files, paths):
        if p.shape[1] != n:
            raise ValidationError(f"{f}: has {p.shape[1]} columns, expected {n}")
    bank = make_bank(args.nmom, args.variant)
    nu = min(p.shape[0] for p in paths)
    weights = resolve_weights(nu, n, bank, args.j1, args.j2, args.b)
    spectra = [analyze_path(p, bank, weights.j2) for p in paths]
    est = median_estimate(spectra, weights)
    doc = _analysis_doc(est, bank, nu, n)
    doc["m"] = len(paths)
    _write_text(args.out, _dump_json(doc))
    return EXIT_OK


def cmd_mc(args) -> int:
    d = json.loads(_read_text(args.config))
    config = McConfig.from_dict(d, reps=args.reps, base_seed=args.seed)
    summary = run(config, workers=args.workers)
    _write_text(args.out, summary.to_json())
    if args.raw:
        _write_text(args.raw, summary.raw_csv())
    return EXIT_OK


def cmd_filters(args) -> int:
    bank = make_bank(args.nmom, args.variant)
    taps = bank.highpass if args.highpass else bank.lowpass
    sys.stdout.write("".join(f"{v:.17g}\n" for v in taps))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ofbmwave",
        description="Synthesis and wavelet eigenvalue analysis of operator fractional Brownian motion.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize one OFBM path to CSV")
    p.add_argument("--config", required=True, help="spec JSON {n, hurst, mixing, premix_cov}")
    p.add_argument("--nu", type=int, required=True, help="number of samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("analyze", help="estimate Hurst eigenvalues of a CSV path")
    p.add_argument("--input", required=True, help="CSV, one column per component")
    _add_analysis_flags(p)
    p.add_argument("--out", help="estimates JSON (default stdout)")
    p.add_argument("--tsv", help="logscale diagram TSV")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("median", help="median-across-subtraces analysis of several CSVs")
    p.add_argument("--inputs", nargs="+", required=True, help="CSV files or glob patterns")
    _add_analysis_flags(p)
    p.add_argument("--out", help="estimates JSON (default stdout)")
    p.set_defaults(func=cmd_median)

    p = sub.add_parser("mc", help="Monte Carlo study")
    p.add_argument("--config", required=True, help="Monte Carlo config JSON")
    p.add_argument("--reps", type=int, help="override replications per sample size")
    p.add_argument("--seed", type=int, help="override base seed")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="summary JSON (default stdout)")
    p.add_argument("--raw", help="per-replication CSV")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("filters", help="print Daubechies filter taps")
    p.add_argument("--nmom", type=int, required=True)
    p.add_argument("--variant", choices=VARIANTS, default="la")
    p.add_argument("--highpass", action="store_true", help="print the highpass taps instead")
    p.set_defaults(func=cmd_filters)
    return parser


def _fail(kind: str, code: int, msg) -> int:
    text = " ".join(str(msg).split())
    print(f"ofbmwave: error[{kind}]: {text}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        return _fail("validation", EXIT_VALIDATION, exc)
    except json.JSONDecodeError as exc:
        return _fail("validation", EXIT_VALIDATION, f"invalid JSON: {exc}")
    except NumericalError as exc:
        return _fail("numerical", EXIT_NUMERICAL, exc)
    except OSError as exc:
        name = getattr(exc, "filename", None)
        return _fail("io", EXIT_IO, f"{name}: {exc.strerror}" if name else exc)


if __name__ == "__main__":
    sys.exit(main())
