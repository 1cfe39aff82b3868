"""Command-line entry points.

    tcm2d run       --config FILE [--out DIR] [--seed-override N]
    tcm2d check     (--config FILE | --run-dir DIR) [--out DIR] [--tol X]
    tcm2d sweep-eps --config FILE --levels 0.2,0.1,0.05,0 [--out DIR]
    tcm2d twin      --config FILE [--delta X] [--shape NAME] [--out DIR]
    tcm2d gronwall  --csv FILE (--fit-k | --k X) [--tol X]

Exit codes: 0 success, 2 config error, 3 numerical guard (CFL), 4 I/O,
5 check failure. Failures print a single machine-readable line
``TCM-ERROR {...}`` to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time

import numpy as np

from . import __version__, config as config_mod, diagnostics, gronwall, storage
from .errors import (
    BadParams,
    BadSeries,
    BadWindow,
    CflViolation,
    ChecksumMismatch,
    ConfigMismatch,
    ConfigParseError,
    EmptyTrajectory,
    Infeasible,
    NonZeroMean,
    TcmError,
)
from .derived import residual_flux_equation, residual_phi_equation, residual_w_equation
from .model import SimConfig, simulate
from .records import DiagnosticsSeries

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CFL = 3
EXIT_IO = 4
EXIT_CHECK = 5

#: stated tolerances for the gated trajectory checks
MAX_PRINCIPLE_RTOL = 1e-4
MEAN_DRIFT_RTOL = 1e-10
DIV_FREE_RTOL = 1e-10
ENERGY_MONOTONE_RTOL = 1e-10


class CheckFailure(TcmError):
    pass


def _machine_error(kind: str, detail: str, **extra) -> None:
    payload = {"error": kind, "detail": detail}
    payload.update(extra)
    print("TCM-ERROR " + json.dumps(payload, sort_keys=True), file=sys.stderr)


def _fmt(x) -> str:
    return format(float(x), ".6g")


# ---------------------------------------------------------------------------
# run


def _load_config(args) -> tuple[SimConfig, str]:
    cfg, text = config_mod.parse_config_file(args.config)
    if getattr(args, "seed_override", None) is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed_override)
        text = config_mod.render_config(cfg)
    return cfg, text


def _resolve_outdir(args, cfg: SimConfig, default: str) -> str:
    out = args.out or cfg.outdir or default
    os.makedirs(out, exist_ok=True)
    return out


def _write_run_artifacts(run_dir: str, cfg: SimConfig, text: str, result) -> list[str]:
    files = []
    cfg_path = os.path.join(run_dir, "config.cfg")
    with open(cfg_path, "w", encoding="utf-8") as fh:
        fh.write(text)
    files.append(cfg_path)

    diag_path = os.path.join(run_dir, "diagnostics.csv")
    storage.write_diagnostics_csv(diag_path, result.diagnostics)
    files.append(diag_path)

    snap_dir = os.path.join(run_dir, "snapshots")
    for idx, state in enumerate(result.snapshots):
        step = idx * cfg.snap_stride
        files.extend(storage.write_state_snapshot(snap_dir, state, step))
    return files


def cmd_run(args) -> int:
    cfg, text = _load_config(args)
    run_dir = _resolve_outdir(args, cfg, "run_out")
    started = time.time()
    result = simulate(cfg)
    files = _write_run_artifacts(run_dir, cfg, text, result)
    storage.write_manifest(run_dir, text, __version__, started, files)
    print(
        f"run complete: {len(result.diagnostics)} diagnostic records, "
        f"{len(result.snapshots)} snapshots -> {run_dir}"
    )
    tail = result.diagnostics.col("theta_tail_frac")
    flagged = int(np.sum(tail > 0.01))
    if flagged:
        print(
            f"warning: {flagged} record(s) hold > 1% of the temperature "
            f"variance in the top spectral shell (max {np.max(tail):.2%}); "
            "the run may be under-resolved"
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# check


def _gather(args):
    """Either re-simulate from a config or load a completed run directory."""
    if args.config:
        cfg, text = _load_config(args)
        run_dir = _resolve_outdir(args, cfg, "check_out")
        started = time.time()
        result = simulate(cfg)
        files = _write_run_artifacts(run_dir, cfg, text, result)
        storage.write_manifest(run_dir, text, __version__, started, files)
        return cfg, result.diagnostics, result.snapshots, run_dir
    run_dir = args.run_dir
    storage.verify_manifest(run_dir)
    cfg, _ = config_mod.parse_config_file(os.path.join(run_dir, "config.cfg"))
    series = storage.read_diagnostics_csv(os.path.join(run_dir, "diagnostics.csv"))
    snap_dir = os.path.join(run_dir, "snapshots")
    snaps = [
        storage.read_state_snapshot(snap_dir, step)
        for step in storage.list_snapshot_steps(snap_dir)
    ]
    return cfg, series, snaps, run_dir


def _mid_window(snaps):
    if len(snaps) < 3:
        return None
    m = len(snaps) // 2
    m = min(max(m, 1), len(snaps) - 2)
    return snaps[m - 1 : m + 2]


def run_checks(cfg: SimConfig, series: DiagnosticsSeries, snaps, tol=gronwall.DEFAULT_TOL) -> tuple[list, list]:
    """Returns (gated, observational) rows: (name, passed/None, value, detail)."""
    gated, info = [], []
    t = series.times

    theta0_l2 = series.col("theta_l2")[0]
    drift_th = np.max(np.abs(series.col("mean_theta") - series.col("mean_theta")[0]))
    lim = MEAN_DRIFT_RTOL * (1.0 + theta0_l2)
    gated.append(("mean_theta_conserved", drift_th <= lim, drift_th, f"limit {_fmt(lim)}"))

    u0_l2 = series.col("u_l2")[0]
    drift_u = max(
        np.max(np.abs(series.col("mean_u_x") - series.col("mean_u_x")[0])),
        np.max(np.abs(series.col("mean_u_y") - series.col("mean_u_y")[0])),
    )
    limu = MEAN_DRIFT_RTOL * (1.0 + u0_l2)
    gated.append(("mean_u_conserved", drift_u <= limu, drift_u, f"limit {_fmt(limu)}"))

    div_max = np.max(series.col("div_u_rel"))
    gated.append(("divergence_free", div_max <= DIV_FREE_RTOL, div_max, f"limit {DIV_FREE_RTOL}"))

    energy = series.col("energy")
    if cfg.eps > 0 and len(series) > 1:
        growth = np.max(np.diff(energy))
        lim_e = ENERGY_MONOTONE_RTOL * energy[0]
        gated.append(("energy_nonincreasing", growth <= lim_e, growth, f"limit {_fmt(lim_e)}"))
    else:
        info.append(("energy_nonincreasing", None, float(np.max(np.diff(energy))) if len(series) > 1 else 0.0, "observational at eps = 0"))

    margins = diagnostics.max_principle_check(series)
    min_margin = float(np.min(margins))
    theta0_sup = series.col("theta_linf")[0]
    lim_m = -MAX_PRINCIPLE_RTOL * theta0_sup
    if cfg.eps > 0:
        gated.append(("max_principle", min_margin >= lim_m, min_margin, f"limit {_fmt(lim_m)}"))
    else:
        info.append(("max_principle", None, min_margin, "observational at eps = 0"))

    env = diagnostics.certified_envelope(series, cfg.eps, tol=tol)
    gated.append(
        (
            "gronwall_envelope",
            env.conclusion.outcome == "holds" and np.isfinite(env.fit.K),
            env.fit.K,
            f"fitted K, outcome {env.conclusion.outcome}",
        )
    )

    budget = diagnostics.lipschitz_budget(series)
    gated.append(("lipschitz_budget_finite", bool(np.isfinite(budget)), budget, "integral of ||grad u||_inf"))

    resid = diagnostics.energy_identity_residual(series)
    info.append(("energy_identity_residual", None, float(np.abs(resid[-1])), "value at horizon"))

    window = _mid_window(snaps)
    if window is not None:
        for name, fn in (
            ("w_equation_residual", residual_w_equation),
            ("potential_equation_residual", residual_phi_equation),
            ("flux_equation_residual", residual_flux_equation),
        ):
            r = fn(window, eps=cfg.eps, use_dealias=cfg.dealias)
            info.append((name, None, r.l2, f"smoothed {_fmt(r.smoothed)}"))
    else:
        info.append(("equation_residuals", None, float("nan"), "need >= 3 snapshots"))

    if len(snaps) >= 1:
        info.append(("bgw_ratio_final", None, diagnostics.bgw_ratio(snaps[-1].u), "observational"))
    tail = float(np.max(series.col("theta_tail_frac")))
    info.append(("theta_tail_fraction_max", None, tail, "flag if > 0.01"))
    cum = diagnostics.lipschitz_budget_curve(series)
    info.append(
        ("lipschitz_sqrt_t_slope", None, diagnostics._loglog_slope(t[1:], cum[1:]), "log-log slope of the budget curve")
    )
    return gated, info


def _write_check_report(run_dir, gated, info, series):
    summary = os.path.join(run_dir, "check_summary.txt")
    with open(summary, "w", encoding="utf-8") as fh:
        for name, ok, value, detail in gated:
            fh.write(f"{'PASS' if ok else 'FAIL'} {name} value={_fmt(value)} ({detail})\n")
        for name, _, value, detail in info:
            fh.write(f"INFO {name} value={_fmt(value)} ({detail})\n")
        overall = all(ok for _, ok, _, _ in gated)
        fh.write(f"{'PASS' if overall else 'FAIL'} overall\n")

    series_path = os.path.join(run_dir, "check_series.csv")
    margins = diagnostics.max_principle_check(series)
    resid = diagnostics.energy_identity_residual(series)
    cum = diagnostics.lipschitz_budget_curve(series)
    with open(series_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("t,energy_residual,max_principle_margin,lipschitz_budget\n")
        for row in zip(series.times, resid, margins, cum):
            fh.write(",".join(format(float(x), ".17g") for x in row) + "\n")
    return summary, series_path


def cmd_check(args) -> int:
    cfg, series, snaps, run_dir = _gather(args)
    gated, info = run_checks(cfg, series, snaps, tol=args.tol)
    _write_check_report(run_dir, gated, info, series)
    overall = True
    for name, ok, value, detail in gated:
        print(f"{'PASS' if ok else 'FAIL'} {name} value={_fmt(value)} ({detail})")
        overall = overall and ok
    for name, _, value, detail in info:
        print(f"INFO {name} value={_fmt(value)} ({detail})")
    print(("PASS" if overall else "FAIL") + " overall")
    if not overall:
        _machine_error("CheckFailure", "one or more gated checks failed")
        return EXIT_CHECK
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep


def cmd_sweep_eps(args) -> int:
    cfg, _ = _load_config(args)
    try:
        levels = [float(x) for x in args.levels.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise ConfigParseError(f"--levels: {exc}") from exc
    if not levels:
        raise ConfigParseError("--levels must name at least one value")
    report = diagnostics.epsilon_sweep(diagnostics.sweep_configs(cfg, levels))
    out = _resolve_outdir(args, cfg, "sweep_out")

    path = os.path.join(out, "sweep.csv")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("eps,dist_velocity_l2h1,dist_theta_l2l2\n")
        for e, dv, dth in zip(report.eps_levels, report.dist_velocity, report.dist_theta):
            fh.write(f"{e!r},{dv!r},{dth!r}\n")
    with open(os.path.join(out, "sweep_summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(f"reference eps = {report.reference_eps!r}\n")
        fh.write(f"monotone decrease (velocity H1): {report.monotone_velocity}\n")
        fh.write(f"monotone decrease (theta L2): {report.monotone_theta}\n")
        fh.write(f"log-log slope velocity: {report.slope_velocity!r}\n")
        fh.write(f"log-log slope theta: {report.slope_theta!r}\n")

    print(f"sweep over eps {sorted(set(levels), reverse=True)} -> {out}")
    print(f"monotone decrease toward eps={report.reference_eps}: "
          f"velocity={report.monotone_velocity} theta={report.monotone_theta}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# twin


def cmd_twin(args) -> int:
    cfg, _ = _load_config(args)
    if args.delta < 0:
        raise ConfigParseError(f"--delta must be nonnegative, got {args.delta}")
    if args.shape not in diagnostics.PERTURBATION_SHAPES:
        raise ConfigParseError(f"--shape must be one of {diagnostics.PERTURBATION_SHAPES}")
    report = diagnostics.twin_divergence(cfg, args.delta, shape=args.shape)
    out = _resolve_outdir(args, cfg, "twin_out")

    with open(os.path.join(out, "twin.csv"), "w", encoding="ascii", newline="\n") as fh:
        fh.write("t,separation,coefficient,envelope,within_envelope\n")
        for row in zip(report.times, report.separation, report.coefficient, report.envelope, report.passed):
            fh.write(
                ",".join(format(float(x), ".17g") for x in row[:4])
                + f",{int(row[4])}\n"
            )
    with open(os.path.join(out, "twin_summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(f"delta = {report.delta!r}, safety = {report.safety!r}\n")
        fh.write(f"separation(0) = {report.separation[0]!r}\n")
        fh.write(f"max separation = {float(np.max(report.separation))!r}\n")
        fh.write(f"within envelope at every record: {report.all_passed}\n")

    print(f"twin run delta={args.delta} shape={args.shape} -> {out}")
    print(f"within envelope at every record: {report.all_passed}")
    if args.delta > 0 and not report.all_passed:
        _machine_error("CheckFailure", "separation exceeded the computed envelope")
        return EXIT_CHECK
    return EXIT_OK


# ---------------------------------------------------------------------------
# gronwall


def cmd_gronwall(args) -> int:
    times, A, B, alpha, beta = storage.read_gronwall_csv(args.csv)
    if args.fit_k:
        fit = gronwall.fit_min_k(times, A, B, alpha, beta)
        k = fit.K
        print(f"fitted K = {k!r} (binding sample {fit.argmax})")
    elif args.k is not None:
        k = args.k
    else:
        raise ConfigParseError("provide --fit-k or --k VALUE")
    g = gronwall.GronwallSeries(times=times, A=A, B=B, alpha=alpha, beta=beta, K=k)
    rep = gronwall.conclusion_check(g, tol=args.tol)
    hyp = rep.hypothesis
    print(f"hypothesis holds: {hyp.holds} (min margin {_fmt(np.min(hyp.margins))})")
    print(f"conclusion outcome: {rep.outcome}")
    print(f"lhs(T) = {_fmt(rep.lhs[-1])}, log rhs(T) = {_fmt(rep.log_rhs[-1])}")
    if rep.outcome == "violated":
        _machine_error("CheckFailure", "conclusion violated on hypothesis-passing series")
        return EXIT_CHECK
    return EXIT_OK


# ---------------------------------------------------------------------------
# driver


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tcm2d",
        description="pseudo-spectral simulator and a-priori-estimate verification harness",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate and persist artifacts")
    run.add_argument("--config", required=True)
    run.add_argument("--out", default=None)
    run.add_argument("--seed-override", type=int, default=None)
    run.set_defaults(fn=cmd_run)

    chk = sub.add_parser("check", help="verify a run against the trajectory checks")
    grp = chk.add_mutually_exclusive_group(required=True)
    grp.add_argument("--config")
    grp.add_argument("--run-dir")
    chk.add_argument("--out", default=None)
    chk.add_argument("--seed-override", type=int, default=None)
    chk.add_argument("--tol", type=float, default=gronwall.DEFAULT_TOL)
    chk.set_defaults(fn=cmd_check)

    sw = sub.add_parser("sweep-eps", help="convergence sweep in the temperature diffusivity")
    sw.add_argument("--config", required=True)
    sw.add_argument("--levels", required=True, help="comma-separated eps values")
    sw.add_argument("--out", default=None)
    sw.add_argument("--seed-override", type=int, default=None)
    sw.set_defaults(fn=cmd_sweep_eps)

    tw = sub.add_parser("twin", help="perturbed twin-run separation experiment")
    tw.add_argument("--config", required=True)
    tw.add_argument("--delta", type=float, default=1e-8)
    tw.add_argument("--shape", default="mode")
    tw.add_argument("--out", default=None)
    tw.add_argument("--seed-override", type=int, default=None)
    tw.set_defaults(fn=cmd_twin)

    gw = sub.add_parser("gronwall", help="hypothesis/conclusion check on a CSV series")
    gw.add_argument("--csv", required=True)
    gw.add_argument("--fit-k", action="store_true")
    gw.add_argument("--k", type=float, default=None)
    gw.add_argument("--tol", type=float, default=gronwall.DEFAULT_TOL)
    gw.set_defaults(fn=cmd_gronwall)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ConfigParseError, BadParams, BadSeries, ConfigMismatch, Infeasible,
            NonZeroMean, BadWindow, EmptyTrajectory) as exc:
        _machine_error(type(exc).__name__, str(exc))
        return EXIT_CONFIG
    except CflViolation as exc:
        _machine_error("CflViolation", str(exc), ratio=exc.ratio, limit=exc.limit)
        return EXIT_CFL
    except ChecksumMismatch as exc:
        _machine_error("ChecksumMismatch", str(exc))
        return EXIT_IO
    except OSError as exc:
        _machine_error("IoError", str(exc))
        return EXIT_IO


def entry() -> None:
    raise SystemExit(main())
