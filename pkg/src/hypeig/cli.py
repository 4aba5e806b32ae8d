"""Command-line interface.

Subcommands:
  decompose  resolve a surface file into cylinder pieces and report geometry
  spectrum   scan a window, write certificate JSON, eigenvalue CSV, scan CSV
  zeta       evaluate the spectral zeta function at one s or over a grid
  det        zeta-regularized determinant
  casimir    zeta at s = -1/2

Exit codes: 0 success, 1 requested tolerance unmet, 2 invalid input,
3 certification failure or unclassified gaps.

Report-style commands write delimited output plus a rendered figure next to
it (scan profile, zeta sweep).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .geometry import GraphError, build_decomposition
from .search import CertificationFailure, ScanConfig, scan
from .surfaces import PRESETS, fn_from_dict, load_surface
from .trace import (casimir_energy, completeness_check, determinant,
                    load_eigenvalues, load_length_spectrum, zeta_value, EigEntry,
                    LengthSpectrumEntry)

EXIT_OK = 0
EXIT_TOL = 1
EXIT_INPUT = 2
EXIT_CERT = 3


def _num(value, err=0.0):
    return {"value": float(value), "abs_error": float(err)}


def _load(surface: str):
    try:
        fn = load_surface(surface)
        return build_decomposition(fn)
    except (GraphError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: invalid surface input: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def cmd_decompose(args) -> int:
    dec = _load(args.surface)
    area_err = abs(dec.area - 4.0 * math.pi * (dec.genus - 1))
    print(f"genus {dec.genus}: {dec.n_pieces} cylinder pieces, "
          f"{len(dec.segments)} cutting segments")
    for p in dec.pieces:
        print(f"  piece {p.index}: core curve {p.core_curve}, ell = {p.ell:.9f}, "
              f"rho_inv = {p.rho_inv:.6f}, rho_max = {p.rho_max:.6f}")
    for s in dec.segments:
        kind = f"curve {s.curve}" if s.curve is not None else "cut seam"
        print(f"  segment {s.index}: length {s.length:.9f} ({kind}), "
              f"pieces ({s.side_a.piece}, {s.side_b.piece})")
    print(f"  systole lower bound  {dec.systole_lower:.9f}")
    print(f"  cut locus length     {dec.cut_length:.9f}")
    print(f"  min side distance    {dec.min_side_distance:.9f}")
    print(f"  area {dec.area:.12f} vs 4 pi (g-1): defect {area_err:.3e}")
    if args.out:
        doc = {
            "genus": dec.genus,
            "pieces": [{"core_curve": p.core_curve, "ell": _num(p.ell),
                        "rho_inv": _num(p.rho_inv), "rho_max": _num(p.rho_max)}
                       for p in dec.pieces],
            "systole_lower": _num(dec.systole_lower),
            "min_side_distance": _num(dec.min_side_distance),
            "area_defect": _num(area_err),
        }
        Path(args.out).write_text(json.dumps(doc, indent=2))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    dec = _load(args.surface)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    doc = PRESETS.get(args.surface)
    if doc is None:
        try:
            doc = json.loads(Path(args.surface).read_text())
        except Exception:
            doc = None
    cfg = ScanConfig(lam_min=args.min, lam_max=args.max, n_four=args.order,
                     delta=args.step, coarse=args.coarse, mode=args.mode,
                     threads=args.threads, refine_f128=args.hiprec,
                     exclusion_budget=args.exclusions, surface_doc=doc)
    try:
        cert = scan(dec, cfg)
    except CertificationFailure as exc:
        print(f"error: certification failed: {exc}", file=sys.stderr)
        return EXIT_CERT
    (out / "certificate.json").write_text(json.dumps(cert.to_dict(), indent=2))
    with (out / "eigenvalues.csv").open("w") as f:
        f.write("lambda_lo,lambda_hi,multiplicity\n")
        for e in cert.enclosures:
            f.write(f"{e.lam_lo:.16g},{e.lam_hi:.16g},{e.multiplicity}\n")
    lower_at = {e.lam_point: e.sigma_lower for e in cert.exclusions}
    with (out / "scan.csv").open("w") as f:
        f.write("lambda,sigma1_lower,sigma1_estimate\n")
        for x, y in zip(cert.scan_points, cert.scan_sigmas):
            lo = lower_at.get(float(x), "")
            f.write(f"{x:.12g},{lo if lo == '' else format(lo, '.12g')},{y:.12g}\n")
        for e in cert.exclusions:
            f.write(f"{e.lam_point:.12g},{e.sigma_lower:.12g},\n")
    if args.plot:
        from .plots import scan_figure
        scan_figure(out / "scan.png", cert.scan_points, cert.scan_sigmas,
                    cert.enclosures)
    print(f"{len(cert.enclosures)} enclosure(s) in [{args.min}, {args.max}]")
    for e in cert.enclosures:
        print(f"  lambda in [{e.lam_lo:.12f}, {e.lam_hi:.12f}] "
              f"multiplicity {e.multiplicity}")
    if cert.mode == "rigorous" and cert.gaps:
        print("unclassified gaps remain:", cert.gaps, file=sys.stderr)
        return EXIT_CERT
    return EXIT_OK


def _trace_inputs(args):
    dec = _load(args.surface)
    area = 4.0 * math.pi * (dec.genus - 1)
    if args.eigs:
        entries = load_eigenvalues(args.eigs)
    else:
        print("error: --eigs CSV is required (run `hypeig spectrum` first)",
              file=sys.stderr)
        raise SystemExit(EXIT_INPUT)
    lengths = []
    regime = "neglected-with-bound"
    if args.lengths:
        lengths = load_length_spectrum(args.lengths)
        regime = "summed-from-file"
    elif args.auto_lengths:
        lengths = [LengthSpectrumEntry(c.length, 1) for c in dec.fn.curves]
        lengths.sort(key=lambda e: e.length)
        regime = "decomposition-curves"
    return dec, area, entries, lengths, regime


def cmd_zeta(args) -> int:
    dec, area, entries, lengths, regime = _trace_inputs(args)
    out = {}
    if args.grid:
        a, b, n = args.grid
        svals = np.linspace(a, b, int(n))
        rows = []
        for sv in svals:
            try:
                res = zeta_value(float(sv), args.eps, entries, lengths, area,
                                 dec.systole_lower)
                rows.append((float(sv), res.value, res.total_error))
            except ValueError:
                rows.append((float(sv), math.nan, math.nan))
        path = Path(args.out or "zeta_sweep.csv")
        with path.open("w") as f:
            f.write("s,zeta,abs_error\n")
            for r in rows:
                f.write(f"{r[0]:.10g},{r[1]:.14g},{r[2]:.3g}\n")
        if args.plot:
            from .plots import zeta_figure
            ok = [r for r in rows if math.isfinite(r[1])]
            zeta_figure(path.with_suffix(".png"), [r[0] for r in ok], [r[1] for r in ok])
        print(f"wrote {path}")
        return EXIT_OK
    res = zeta_value(args.s, args.eps, entries, lengths, area, dec.systole_lower)
    res.meta["length_regime"] = regime
    doc = res.to_dict()
    print(json.dumps(doc, indent=2))
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2))
    if args.tol is not None and res.total_error > args.tol:
        return EXIT_TOL
    return EXIT_OK


def cmd_det(args) -> int:
    dec, area, entries, lengths, regime = _trace_inputs(args)
    res = determinant(args.eps, entries, lengths, area, dec.systole_lower)
    res.meta["length_regime"] = regime
    doc = res.to_dict()
    print(json.dumps(doc, indent=2))
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2))
    if args.tol is not None and res.total_error > args.tol:
        return EXIT_TOL
    return EXIT_OK


def cmd_casimir(args) -> int:
    dec, area, entries, lengths, regime = _trace_inputs(args)
    res = casimir_energy(args.eps, entries, lengths, area, dec.systole_lower)
    res.meta["length_regime"] = regime
    doc = res.to_dict()
    print(json.dumps(doc, indent=2))
    if args.out:
        Path(args.out).write_text(json.dumps(doc, indent=2))
    if args.tol is not None and res.total_error > args.tol:
        return EXIT_TOL
    return EXIT_OK


def _add_trace_args(p):
    p.add_argument("--surface", required=True,
                   help="surface JSON file or preset name")
    p.add_argument("--eigs", help="eigenvalue CSV from `hypeig spectrum`")
    p.add_argument("--lengths", help="length spectrum file: `length multiplicity` lines")
    p.add_argument("--auto-lengths", action="store_true",
                   help="include the decomposition curves as the short primitives")
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--tol", type=float, default=None,
                   help="fail with exit code 1 if the error radius exceeds this")
    p.add_argument("--out", help="write the JSON result here")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="hypeig", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="resolve and report the pants decomposition")
    p.add_argument("--surface", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("spectrum", help="scan a spectral window")
    p.add_argument("--surface", required=True)
    p.add_argument("--min", type=float, required=True)
    p.add_argument("--max", type=float, required=True)
    p.add_argument("--order", type=int, default=None, help="Fourier order N")
    p.add_argument("--step", type=float, default=0.01, help="collocation step delta")
    p.add_argument("--coarse", type=float, default=0.05, help="scan grid spacing")
    p.add_argument("--mode", choices=("fast", "rigorous"), default="fast")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--hiprec", action="store_true",
                   help="refine minima in extended precision")
    p.add_argument("--exclusions", type=int, default=0,
                   help="budget of exclusion evaluations in rigorous mode")
    p.add_argument("--no-plot", dest="plot", action="store_false")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_spectrum, plot=True)

    p = sub.add_parser("zeta", help="spectral zeta values")
    _add_trace_args(p)
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--grid", type=float, nargs=3, metavar=("A", "B", "N"),
                   help="sweep s over a grid and write CSV + figure")
    p.add_argument("--no-plot", dest="plot", action="store_false")
    p.set_defaults(func=cmd_zeta, plot=True)

    p = sub.add_parser("det", help="zeta-regularized determinant")
    _add_trace_args(p)
    p.set_defaults(func=cmd_det)

    p = sub.add_parser("casimir", help="zeta at s = -1/2")
    _add_trace_args(p)
    p.set_defaults(func=cmd_casimir)

    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
