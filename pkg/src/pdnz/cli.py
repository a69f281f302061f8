"""Command-line front end.

Exit codes: 0 success (or compliant), 1 violations or verification failure,
2 usage/parse errors, 3 numerical failures.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import analysis
from .analysis import (ANTI_RESONANCE, CLOSED_FORM, ORACLE, SweepGrid,
                       attach_q, check_compliance, compare_with_oracle,
                       detect_peaks, sweep, target_impedance)
from .config import dump_config, parse_config, parse_si
from .errors import NumericalError, ParseError, PdnError
from .pdn import (compact_rf, root_scale_hint, symmetric_transcription_report,
                  two_supply_transcription_report)
from .ratfun import rf_roots

CSV_HEADER = "freq_hz,re_ohms,im_ohms,mag_ohms,phase_deg"
VERIFY_THRESHOLD = 1e-8
CANCEL_DISTANCE = 1e-6


def sci(x: float, digits: int | None = None) -> str:
    """Scientific notation with a bare integer exponent (no sign padding)."""
    if math.isnan(x):
        return "nan"
    if digits is None:
        s = np.format_float_scientific(x, unique=True, trim="-")
    else:
        s = np.format_float_scientific(x, precision=digits, unique=False)
    mant, _, exp = s.partition("e")
    return f"{mant}e{int(exp)}"


def format_csv(result: analysis.SweepResult) -> str:
    """CSV text for a sweep: LF line endings, 16 significant digits."""
    lines = [CSV_HEADER]
    phase = np.degrees(np.angle(result.z))
    mag = result.mag
    for i, f in enumerate(result.freqs):
        z = result.z[i]
        lines.append(",".join((sci(f, 15), sci(z.real, 15), sci(z.imag, 15),
                               sci(mag[i], 15), sci(phase[i], 15))))
    return "\n".join(lines) + "\n"


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_grid_flags(sub):
    sub.add_argument("--fmin", type=parse_si, help="sweep start frequency in Hz")
    sub.add_argument("--fmax", type=parse_si, help="sweep end frequency in Hz")
    sub.add_argument("--points", type=int, help="number of grid points")


def _add_common(sub):
    sub.add_argument("config", help="PDN config file")
    sub.add_argument("--dump-config", action="store_true",
                     help="print the canonical form of the config and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdnz",
        description="Impedance analysis of multi-supply power distribution networks")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("sweep", help="impedance sweep as CSV")
    _add_common(p)
    _add_grid_flags(p)
    p.add_argument("--source", choices=(CLOSED_FORM, ORACLE), default=CLOSED_FORM)
    p.add_argument("--out", help="write CSV here instead of stdout")

    p = subs.add_parser("peaks", help="resonance / anti-resonance report")
    _add_common(p)
    _add_grid_flags(p)
    p.add_argument("--source", choices=(CLOSED_FORM, ORACLE), default=CLOSED_FORM)

    p = subs.add_parser("comply", help="target-impedance compliance check")
    _add_common(p)
    _add_grid_flags(p)
    p.add_argument("--source", choices=(CLOSED_FORM, ORACLE), default=CLOSED_FORM)
    p.add_argument("--ztarget", type=parse_si,
                   help="target impedance in ohms (defaults to the supply spec)")

    p = subs.add_parser("verify", help="closed form vs nodal oracle")
    _add_common(p)
    _add_grid_flags(p)
    p.add_argument("--as-printed", action="store_true",
                   help="diagnostics compare the verbatim reference coefficient "
                        "listing (misprints intact) instead of the corrected one")

    p = subs.add_parser("poles", help="zeros and poles with cancellation flags")
    _add_common(p)

    p = subs.add_parser("target-z", help="print the target impedance in ohms")
    _add_common(p)

    p = subs.add_parser("param-sweep", help="family of sweeps over one branch field")
    _add_common(p)
    _add_grid_flags(p)
    p.add_argument("--source", choices=(CLOSED_FORM, ORACLE), default=CLOSED_FORM)
    p.add_argument("--param", required=True, help="branch field path, e.g. z12.C")
    p.add_argument("--values", required=True,
                   help="comma-separated values, SI suffixes allowed")
    p.add_argument("--out", help="CSV file prefix (one file per value)")

    return parser


def _grid(cfg, args) -> SweepGrid:
    fmin = getattr(args, "fmin", None) or cfg.sweep_fmin or analysis.DEFAULT_FMIN
    fmax = getattr(args, "fmax", None) or cfg.sweep_fmax or analysis.DEFAULT_FMAX
    points = getattr(args, "points", None) or cfg.sweep_points or analysis.DEFAULT_POINTS
    return SweepGrid(fmin, fmax, points)


def _peak_lines(report):
    lines = []
    for p in report.peaks:
        kind = "anti-resonance" if p.kind == ANTI_RESONANCE else "resonance"
        q = sci(p.q_estimate) if p.q_estimate is not None else "n/a"
        lines.append(f"{kind} freq_hz={sci(p.freq)} mag_ohms={sci(p.magnitude)} q={q}")
    return lines


def cmd_sweep(cfg, args) -> int:
    result = sweep(cfg.to_system(), _grid(cfg, args), args.source)
    _emit(format_csv(result), args.out)
    return 0


def cmd_peaks(cfg, args) -> int:
    result = sweep(cfg.to_system(), _grid(cfg, args), args.source)
    report = attach_q(detect_peaks(result), result)
    lines = _peak_lines(report)
    print("\n".join(lines) if lines else "no peaks")
    return 0


def cmd_comply(cfg, args) -> int:
    if args.ztarget is not None:
        z_target = args.ztarget
    elif cfg.supply is not None:
        z_target = target_impedance(cfg.supply)
    else:
        print("error: no supply spec in config and no --ztarget", file=sys.stderr)
        return 2
    result = sweep(cfg.to_system(), _grid(cfg, args), args.source)
    report = check_compliance(result, z_target)
    print(f"z_target_ohms={sci(report.z_target)}")
    for f_lo, f_hi in report.violations:
        print(f"violation f_lo_hz={sci(f_lo)} f_hi_hz={sci(f_hi)}")
    print(f"worst freq_hz={sci(report.worst[0])} mag_ohms={sci(report.worst[1])}")
    print("compliant" if report.compliant else "non-compliant")
    return 0 if report.compliant else 1


def cmd_verify(cfg, args) -> int:
    system = cfg.to_system()
    cmp_ = compare_with_oracle(system, _grid(cfg, args))
    print(f"max_rel_err={sci(cmp_.max_rel_err)} at freq_hz={sci(cmp_.worst_freq)}")
    if args.as_printed:
        if cfg.topology == "two":
            report = two_supply_transcription_report(system.base)
        elif cfg.topology == "three-symmetric":
            report = symmetric_transcription_report(system.base)
        else:
            report = ()
        for term in report:
            printed = sci(term.printed) if not math.isnan(term.printed) else "undefined"
            line = (f"term {term.name} status={term.status} "
                    f"corrected={sci(term.corrected)} printed={printed}")
            if term.note:
                line += f"  # {term.note}"
            print(line)
    ok = cmp_.max_rel_err <= VERIFY_THRESHOLD
    print(f"verify {'PASS' if ok else 'FAIL'} (threshold {sci(VERIFY_THRESHOLD)})")
    return 0 if ok else 1


def _root_lines(kind, roots_s, partner_flags):
    lines = []
    for s_val, cancelled in zip(roots_s, partner_flags):
        mag = abs(s_val)
        f_hz = mag / (2.0 * math.pi)
        damping = (-s_val.real / mag) if mag > 0 else 0.0
        line = f"{kind} freq_hz={sci(f_hz)} damping={sci(damping)}"
        if cancelled:
            line += " cancelled"
        lines.append(line)
    return lines


def cmd_poles(cfg, args) -> int:
    system = cfg.to_system()
    rf = compact_rf(system)
    hint = root_scale_hint(system)
    zeros = sorted(rf_roots(rf.num, hint).roots, key=lambda r: (abs(r), r.imag))
    poles = sorted(rf_roots(rf.den, hint).roots, key=lambda r: (abs(r), r.imag))
    zc = [False] * len(zeros)
    pc = [False] * len(poles)
    for i, p in enumerate(poles):
        best, best_d = None, math.inf
        for j, z in enumerate(zeros):
            d = abs(p - z)
            if d < best_d:
                best_d, best = d, j
        if best is None:
            continue
        scale = max(abs(p), abs(zeros[best]))
        rel = best_d / scale if scale > 0 else 0.0
        if rel < CANCEL_DISTANCE:
            pc[i] = True
            zc[best] = True
    omega_c = 2.0 * math.pi * hint
    print("\n".join(_root_lines("zero", [r * omega_c for r in zeros], zc)))
    print("\n".join(_root_lines("pole", [r * omega_c for r in poles], pc)))
    return 0


def cmd_target_z(cfg, args) -> int:
    if cfg.supply is None:
        print("error: config has no supply spec", file=sys.stderr)
        return 2
    print(sci(target_impedance(cfg.supply)))
    return 0


def cmd_param_sweep(cfg, args) -> int:
    values = [parse_si(tok) for tok in args.values.split(",") if tok]
    if not values:
        print("error: --values is empty", file=sys.stderr)
        return 2
    system = cfg.to_system()
    rows = analysis.param_sweep(system, args.param, values, _grid(cfg, args),
                                args.source)
    summary = []
    for i, (value, result, report) in enumerate(rows):
        csv_text = format_csv(result)
        if args.out:
            stem, dot, suffix = args.out.rpartition(".")
            path = f"{stem}_{i}.{suffix}" if dot else f"{args.out}_{i}"
            _emit(csv_text, path)
            print(f"# {args.param}={sci(value)} -> {path}")
        else:
            print(f"# {args.param}={sci(value)}")
            sys.stdout.write(csv_text)
        peak_lines = _peak_lines(report) or ["no peaks"]
        summary.append(f"{args.param}={sci(value)}: " + "; ".join(peak_lines))
    print("\n".join(summary))
    return 0


_COMMANDS = {
    "sweep": cmd_sweep,
    "peaks": cmd_peaks,
    "comply": cmd_comply,
    "verify": cmd_verify,
    "poles": cmd_poles,
    "target-z": cmd_target_z,
    "param-sweep": cmd_param_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.dump_config:
        sys.stdout.write(dump_config(cfg))
        return 0
    try:
        return _COMMANDS[args.command](cfg, args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except PdnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main(sys.argv[1:]))
