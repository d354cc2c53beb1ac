"""Command-line front end.

    viscoshear <subcommand> --config <path> [--out <dir>] [--format csv,json,svg]

Subcommands: calibrate, kstar-sweep, eigencurve, verify, torus, line.
Exit codes: 0 success, 1 check failure, 2 usage/config error, 3 numerical
non-convergence.  The worker cap is read from VISCOSHEAR_THREADS (0 = auto).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import rayleigh as ray
from .acceptance import run_verify
from .calibrate import kstar_time_sweep, tune_M_for_kstar
from .config import Config, load_config
from .errors import (
    BracketFailure,
    ConfigError,
    MultipleRoots,
    NonConvergence,
    PVFailure,
    StepFailure,
    TailDominance,
)
from .flow import FlowState
from .report import csv_text, json_text, scenario_report_dict, svg_line_plot
from .scenario import run_line_scenario, run_torus_scenario

_NUMERIC_ERRORS = (NonConvergence, BracketFailure, StepFailure, TailDominance, MultipleRoots, PVFailure)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="")
    print(f"wrote {path}")


def _resolve_M(cfg: Config, t: float = 0.0) -> float:
    if cfg.M is not None:
        return cfg.M
    cal = tune_M_for_kstar(cfg.params(), t, 1.0 - cfg.delta, cfg.grid(), cfg.tol_cal, cfg.tol_eig)
    print(f"tuned M = {cal.M:.17g} (k* = {cal.achieved:.17g})")
    return cal.M


def _cmd_calibrate(cfg: Config, out_dir: Path, formats) -> int:
    cal = tune_M_for_kstar(
        cfg.params(), 0.0, 1.0 - cfg.delta, cfg.grid(), cfg.tol_cal, cfg.tol_eig
    )
    print(f"M = {cal.M:.17g}")
    print(f"achieved k* = {cal.achieved:.17g} in {cal.iterations} bisections")
    return 0


def _cmd_kstar_sweep(cfg: Config, out_dir: Path, formats) -> int:
    M = _resolve_M(cfg)
    curve = kstar_time_sweep(M, cfg.params(), cfg.n_times, cfg.grid(), cfg.tol_cal, cfg.tol_eig)
    rows = [
        (t, k, l1, l2)
        for t, k, l1, l2 in zip(curve.times, curve.kstars, curve.lambda1s, curve.lambda2s)
    ]
    if "csv" in formats:
        _write(out_dir / "kstar_curve.csv", csv_text(("t", "kstar", "lambda1", "lambda2"), rows))
    if "json" in formats:
        payload = {
            "M": M,
            "T": curve.T,
            "Ttilde": curve.Ttilde,
            "t": list(curve.times),
            "kstar": list(curve.kstars),
            "lambda1": list(curve.lambda1s),
            "lambda2": list(curve.lambda2s),
        }
        _write(out_dir / "kstar_curve.json", json_text(payload))
    if "svg" in formats:
        pts = [(t, k) for t, k in zip(curve.times, curve.kstars) if k is not None]
        series = [("k*(t)", [t for t, _ in pts], [k for _, k in pts])]
        _write(out_dir / "kstar_vs_t.svg",
               svg_line_plot(series, "t", "k*", "critical wave number vs time"))
    return 0


def _cmd_eigencurve(cfg: Config, out_dir: Path, formats) -> int:
    M = _resolve_M(cfg)
    params = cfg.params(M)
    state = FlowState(params, params.horizon)
    if cfg.k_grid == "auto":
        from .spectrum import lowest_eigenpair

        res = lowest_eigenpair(state, cfg.grid(), cfg.tol_eig, want_mode=False)
        if res.kstar is None:
            print("no bound state at t = T; nothing to trace", file=sys.stderr)
            return 1
        ks = cfg.k_grid_values(res.kstar)
    else:
        ks = cfg.k_grid_values(0.0)
    curve = ray.eigencurve(state, ks)
    slope_by_k = {k: s for k, s in curve.slope_samples}
    rows = [(k, c, r, slope_by_k.get(k)) for k, c, r in curve.points]
    if "csv" in formats:
        _write(out_dir / "eigencurve.csv", csv_text(("k", "c_i", "residual", "slope"), rows))
    if "json" in formats:
        payload = {
            "M": M,
            "t": state.t,
            "k_zero": curve.k_zero,
            "points": [{"k": k, "c_i": c, "residual": r} for k, c, r in curve.points],
            "slopes": [{"k": k, "dci_dk": s} for k, s in curve.slope_samples],
        }
        _write(out_dir / "eigencurve.json", json_text(payload))
    if "svg" in formats:
        series = [("c_i(k)", [k for k, _, _ in curve.points], [c for _, c, _ in curve.points])]
        _write(out_dir / "ci_vs_k.svg",
               svg_line_plot(series, "k", "c_i", "unstable eigenvalue vs wave number"))
    return 0


def _cmd_verify(cfg: Config, out_dir: Path, formats) -> int:
    report, ok = run_verify(cfg)
    if "json" in formats:
        _write(out_dir / "verify_report.json", json_text(report))
    if "csv" in formats:
        rows = [
            (c["criterion"], c["name"], c["passed"],
             c["measured"],
             None if c["band"] is None else c["band"][0],
             None if c["band"] is None else c["band"][1])
            for c in report["checks"]
        ]
        _write(out_dir / "verify_report.csv",
               csv_text(("criterion", "name", "passed", "measured", "band_lo", "band_hi"), rows))
    failed = [c for c in report["checks"] if not c["passed"]]
    for c in failed:
        print(f"FAILED check: criterion {c['criterion']} {c['name']} "
              f"(measured {c['measured']}, band {c['band']}) {c['note']}")
    return 0 if ok else 1


def _scenario_outputs(rep, out_dir: Path, formats) -> None:
    if "json" in formats:
        _write(out_dir / "report.json", json_text(scenario_report_dict(rep)))
    if "svg" in formats and rep.curve_times is not None:
        pts = [(t, k) for t, k in zip(rep.curve_times, rep.curve_kstars) if k is not None]
        _write(out_dir / "kstar_vs_t.svg",
               svg_line_plot([("k*(t)", [t for t, _ in pts], [k for _, k in pts])],
                             "t", "k*", "critical wave number vs time"))
    if "svg" in formats and rep.scan_cs is not None:
        _write(out_dir / "wronskian_scan.svg",
               svg_line_plot([("Re W(ic, 1)", list(rep.scan_cs), list(rep.scan_W.real))],
                             "c_i", "Re W", "Wronskian scan at k = 1, t = T"))


def _cmd_torus(cfg: Config, out_dir: Path, formats) -> int:
    rep = run_torus_scenario(cfg.params(), cfg.grid(), cfg.delta, cfg.n_times,
                             cfg.tol_cal, cfg.tol_eig)
    _scenario_outputs(rep, out_dir, formats)
    for c in rep.checks:
        status = "pass" if c.passed else "FAIL"
        print(f"  [{status}] {c.name}: measured={c.measured} band={c.band} {c.note}")
    return 0 if rep.all_passed else 1


def _cmd_line(cfg: Config, out_dir: Path, formats) -> int:
    rep = run_line_scenario(cfg.params(), cfg.grid(), cfg.tol_eig)
    _scenario_outputs(rep, out_dir, formats)
    for c in rep.checks:
        status = "pass" if c.passed else "FAIL"
        print(f"  [{status}] {c.name}: measured={c.measured} band={c.band} {c.note}")
    return 0 if rep.all_passed else 1


_COMMANDS = {
    "calibrate": _cmd_calibrate,
    "kstar-sweep": _cmd_kstar_sweep,
    "eigencurve": _cmd_eigencurve,
    "verify": _cmd_verify,
    "torus": _cmd_torus,
    "line": _cmd_line,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="viscoshear",
        description="Spectral stability of diffusing shear flows",
    )
    parser.add_argument("subcommand", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="path to a key = value config file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--format", default=None,
                        help="comma-separated subset of csv,json,svg (default from config)")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = load_config(args.config)
        formats = cfg.formats
        if args.format is not None:
            formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
            for f in formats:
                if f not in ("csv", "json", "svg"):
                    raise ConfigError(f"unknown format {f!r}")
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out_dir = Path(args.out if args.out != "." else cfg.out_dir)
    try:
        return _COMMANDS[args.subcommand](cfg, out_dir, formats)
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
