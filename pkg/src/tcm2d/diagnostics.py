"""Trajectory-level verification: energy identity, temperature sup bound,
H1 functionals feeding the logarithmic Gronwall machinery, Lipschitz
budget, inequality-ratio monitors, twin-run separation in smoothed norms,
and the convergence sweep in the temperature diffusivity.

Everything here is read-only over immutable trajectories or series.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import gronwall
from .derived import commutator_f
from .errors import BadParams, ConfigMismatch, EmptyTrajectory
from .model import SimConfig, State, imex_step, make_initial, simulate
from .records import DiagnosticsSeries
from .spectral import (
    SpectralField,
    VectorField,
    grad_linf,
    leray_project,
    norm,
    perp_grad,
    seminorm,
    smoothing_inverse,
)


def _cumtrapz(y, t):
    return cumulative_trapezoid(y, t, initial=0.0)


def _require_records(series: DiagnosticsSeries):
    if len(series) == 0:
        raise EmptyTrajectory("no diagnostics records")


def energy_identity_residual(series: DiagnosticsSeries) -> np.ndarray:
    """Residual of E(t) + 2 int_0^t D ds = E(0), normalized by E(0).

    E is the total energy record and D the dissipation record (which
    already carries the eps weight on the temperature gradient).
    """
    _require_records(series)
    t = series.times
    energy = series.col("energy")
    dissipated = _cumtrapz(series.col("dissipation"), t)
    res = 2.0 * energy + 2.0 * dissipated - 2.0 * energy[0]
    e0 = 2.0 * energy[0]
    return res / e0 if e0 > 0.0 else res


def max_principle_check(series: DiagnosticsSeries) -> np.ndarray:
    """Margin of ||theta(t)||_inf <= ||theta_0||_inf + int_0^t ||flux||_inf.

    Nonnegative margins mean the bound holds at that record.
    """
    _require_records(series)
    t = series.times
    budget = series.col("theta_linf")[0] + _cumtrapz(series.col("phi_linf"), t)
    return budget - series.col("theta_linf")


def h1_temperature_functionals(series: DiagnosticsSeries, eps: float) -> gronwall.GronwallSeries:
    """Assemble (A, B, alpha, beta) from a trajectory's records.

    A and B are the H1-estimate functionals (recomputed from their
    constituent norms with the given eps); alpha collects the sup-norm
    coefficient multiplying A in the differential inequality and beta the
    remaining integrable forcing. K defaults to 1 and is meant to be
    replaced by a fitted value.
    """
    _require_records(series)
    t = series.times
    a_func = series.col("grad_theta_l2") ** 2 + t * (
        series.col("lap_u_l2") ** 2 + series.col("lap_w_l2") ** 2
    ) + 1.0
    b_func = (
        a_func
        + t * (series.col("grad_lap_u_l2") ** 2 + series.col("grad_lap_w_l2") ** 2)
        + eps * series.col("lap_theta_l2") ** 2
        + np.e
    )
    alpha = (t + 1.0) * (series.col("uv_linf") ** 2 + series.col("grad_u_linf") + 1.0)
    beta = (t + 1.0) * (
        series.col("grad_u_l4") ** 4
        + series.col("grad_w_l4") ** 4
        + series.col("theta_l4") ** 4
        + series.col("grad_v_l2") ** 2
        + series.col("lap_u_l2") ** 2
        + series.col("lap_w_l2") ** 2
    )
    return gronwall.GronwallSeries(times=t, A=a_func, B=b_func, alpha=alpha, beta=beta, K=1.0)


@dataclass(frozen=True)
class EnvelopeReport:
    """Fitted-K certification of a run's H1 functionals."""

    fit: gronwall.FitResult
    conclusion: gronwall.ConclusionReport
    series: gronwall.GronwallSeries


def certified_envelope(
    series: DiagnosticsSeries, eps: float, tol: float = gronwall.DEFAULT_TOL
) -> EnvelopeReport:
    """Fit the smallest K for the run's (A, B) and check the envelope."""
    g = h1_temperature_functionals(series, eps)
    fit = gronwall.fit_min_k(g.times, g.A, g.B, g.alpha, g.beta, tol=tol)
    g = g.with_k(fit.K)
    return EnvelopeReport(fit=fit, conclusion=gronwall.conclusion_check(g, tol=tol), series=g)


def lipschitz_budget(series: DiagnosticsSeries) -> float:
    """Trapezoidal integral of ||grad u||_inf over the recorded horizon."""
    _require_records(series)
    return float(np.trapezoid(series.col("grad_u_linf"), series.times))


def lipschitz_budget_curve(series: DiagnosticsSeries) -> np.ndarray:
    _require_records(series)
    return _cumtrapz(series.col("grad_u_linf"), series.times)


def bgw_ratio(u: VectorField) -> float:
    """Sup-to-log-interpolation ratio of the velocity gradient:

        ||grad u||_inf / [(1 + ||grad u||_{H1}) * log^{1/2}(e + ||grad u||_{H2}^2)].

    Returns 0 for the zero field. Over families of fields this ratio stays
    bounded; its observed maximum is an empirical constant, not asserted.
    """
    s1 = seminorm(u, 1)
    s2 = seminorm(u, 2)
    s3 = seminorm(u, 3)
    sup = grad_linf(u)
    if sup == 0.0:
        return 0.0
    h1 = np.hypot(s1, s2)
    h2_sq = s1**2 + s2**2 + s3**2
    return float(sup / ((1.0 + h1) * np.sqrt(np.log(np.e + h2_sq))))


def commutator_estimate_ratio(u: VectorField, theta: SpectralField) -> float:
    """||F(u, theta)||_2 / (||grad u||_2 ||theta||_2); 0 when degenerate.

    Exactly invariant under independent amplitude scalings of u and theta.
    """
    den = seminorm(u, 1) * norm(theta, "L2")
    if den == 0.0:
        return 0.0
    return float(norm(commutator_f(u, theta), "L2") / den)


# ---------------------------------------------------------------------------
# twin-run separation experiment


@dataclass(frozen=True)
class TwinReport:
    """Separation of two runs in smoothed norms against a computed envelope.

    separation(t) = ||(I - lap)^{-1}(u1-u2, v1-v2, th1-th2)||_{H1};
    coefficient(t) instantiates the growth rate of the difference estimate
    (all absolute constants set to one) from the two trajectories;
    envelope(t) = safety * delta * exp(int_0^t coefficient ds).
    """

    times: np.ndarray
    separation: np.ndarray
    coefficient: np.ndarray
    envelope: np.ndarray
    delta: float
    safety: float

    @property
    def passed(self) -> np.ndarray:
        return self.separation <= self.envelope

    @property
    def all_passed(self) -> bool:
        return bool(np.all(self.passed))


def _smoothed_h1(du: VectorField, dv: VectorField, dth: SpectralField) -> float:
    parts = (
        norm(smoothing_inverse(du), "H1"),
        norm(smoothing_inverse(dv), "H1"),
        norm(smoothing_inverse(dth), "H1"),
    )
    return float(np.sqrt(sum(p**2 for p in parts)))


def _separation(s1: State, s2: State) -> float:
    return _smoothed_h1(s1.u - s2.u, s1.v - s2.v, s1.theta - s2.theta)


def _growth_coefficient(base: State, pert: State) -> float:
    """1 + ||th2||_inf^2 + ||grad u1||_inf + ||(u1,u2,v1,v2)||_2^2 *
    ||(grad u1, grad u2, grad v1, grad v2)||_2^2 + ||(grad u2, grad v1)||_2^4,
    with run 1 the unperturbed member."""
    th2_sup = norm(pert.theta, "Linf")
    gu1_sup = grad_linf(base.u)
    l2s = (
        norm(base.u, "L2") ** 2
        + norm(pert.u, "L2") ** 2
        + norm(base.v, "L2") ** 2
        + norm(pert.v, "L2") ** 2
    )
    g2s = (
        seminorm(base.u, 1) ** 2
        + seminorm(pert.u, 1) ** 2
        + seminorm(base.v, 1) ** 2
        + seminorm(pert.v, 1) ** 2
    )
    tail = (seminorm(pert.u, 1) ** 2 + seminorm(base.v, 1) ** 2) ** 2
    return float(1.0 + th2_sup**2 + gu1_sup + l2s * g2s + tail)


PERTURBATION_SHAPES = ("mode", "band", "theta")


def _perturbation(cfg: SimConfig, shape: str):
    """Unit-size perturbation triple: divergence-free u part, v, theta.

    Normalized so the smoothed-H1 size of the triple is exactly one.
    """
    grid = cfg.grid()
    zero = SpectralField.zeros(grid)
    if shape == "mode":
        xx, yy = grid.meshgrid()
        a = 2.0 * np.pi / grid.length
        psi = SpectralField.from_phys(grid, np.cos(a * xx) * np.cos(a * yy))
        pu = perp_grad(psi)
        pv = VectorField(SpectralField.from_phys(grid, np.sin(a * yy)), zero)
        pth = SpectralField.from_phys(grid, np.sin(a * (xx + yy)))
    elif shape == "theta":
        xx, yy = grid.meshgrid()
        a = 2.0 * np.pi / grid.length
        pu = VectorField(zero, zero)
        pv = VectorField(zero, zero)
        pth = SpectralField.from_phys(grid, np.sin(a * xx) * np.cos(a * yy))
    elif shape == "band":
        from .model import _band_modes, _random_band_field

        rng = np.random.default_rng(cfg.seed + 9973)
        modes = _band_modes(max(cfg.band_lo, 1), max(cfg.band_hi, 2))
        pu = leray_project(perp_grad(_random_band_field(grid, modes, rng)))
        pv = VectorField(
            _random_band_field(grid, modes, rng), _random_band_field(grid, modes, rng)
        )
        pth = _random_band_field(grid, modes, rng)
    else:
        raise BadParams(f"unknown perturbation shape {shape!r}")
    size = _smoothed_h1(pu, pv, pth)
    return pu * (1.0 / size), pv * (1.0 / size), pth * (1.0 / size)


def twin_divergence(
    cfg: SimConfig, delta: float, shape: str = "mode", safety: float = 10.0
) -> TwinReport:
    """Run the configured simulation twice, the second from initial data
    perturbed by delta times a unit shape, and compare the smoothed-norm
    separation against the computed exponential envelope.

    With delta = 0 the two runs are the same computation and the
    separation is identically zero.
    """
    if delta < 0:
        raise BadParams(f"delta must be nonnegative, got {delta}")
    base = make_initial(cfg)
    if delta == 0.0:
        pert = base
    else:
        pu, pv, pth = _perturbation(cfg, shape)
        pert = State(
            u=leray_project(base.u + pu * delta),
            v=base.v + pv * delta,
            theta=base.theta + pth * delta,
            t=0.0,
            eps=cfg.eps,
        )

    nsteps = cfg.num_steps()
    times = [0.0]
    seps = [_separation(base, pert)]
    coeffs = [_growth_coefficient(base, pert)]
    for k in range(1, nsteps + 1):
        base = imex_step(base, cfg.dt, use_dealias=cfg.dealias, cfl_max=cfg.cfl_max)
        pert = imex_step(pert, cfg.dt, use_dealias=cfg.dealias, cfl_max=cfg.cfl_max)
        if k % cfg.diag_stride == 0:
            times.append(base.t)
            seps.append(_separation(base, pert))
            coeffs.append(_growth_coefficient(base, pert))

    times = np.array(times)
    coeffs = np.array(coeffs)
    envelope = safety * delta * np.exp(_cumtrapz(coeffs, times))
    return TwinReport(
        times=times,
        separation=np.array(seps),
        coefficient=coeffs,
        envelope=envelope,
        delta=delta,
        safety=safety,
    )


# ---------------------------------------------------------------------------
# diffusivity sweep


@dataclass(frozen=True)
class SweepReport:
    """Distances of each member run to the reference (smallest-eps) run.

    Velocity distances are L2 in time of the H1 spatial norm of (u, v)
    differences; temperature distances are L2 in time of the L2 norm.
    """

    eps_levels: np.ndarray
    reference_eps: float
    dist_velocity: np.ndarray
    dist_theta: np.ndarray
    monotone_velocity: bool
    monotone_theta: bool
    slope_velocity: float
    slope_theta: float


def _config_signature(cfg: SimConfig) -> dict:
    d = cfg.__dict__.copy()
    d.pop("eps")
    d.pop("outdir", None)
    return d


def _traj_distances(a: list[State], b: list[State]):
    ts = np.array([s.t for s in a])
    vel_sq = np.empty(len(a))
    th_sq = np.empty(len(a))
    for i, (sa, sb) in enumerate(zip(a, b)):
        vel_sq[i] = norm(sa.u - sb.u, "H1") ** 2 + norm(sa.v - sb.v, "H1") ** 2
        th_sq[i] = norm(sa.theta - sb.theta, "L2") ** 2
    return (
        float(np.sqrt(np.trapezoid(vel_sq, ts))),
        float(np.sqrt(np.trapezoid(th_sq, ts))),
    )


def _loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    good = (x > 0) & (y > 0)
    if good.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(x[good]), np.log(y[good]), 1)[0])


def epsilon_sweep(configs: list[SimConfig]) -> SweepReport:
    """Run every config (identical but for eps) and report the distance of
    each member to the smallest-eps member, in the two sweep metrics.

    Raises :class:`ConfigMismatch` if the configs differ in anything but
    eps (or in nothing at all, which is allowed and gives zero distance).
    """
    if not configs:
        raise BadParams("need at least one config")
    sig0 = _config_signature(configs[0])
    for c in configs[1:]:
        if _config_signature(c) != sig0:
            raise ConfigMismatch("sweep members differ in something other than eps")

    runs = [simulate(c) for c in configs]
    eps_levels = np.array([c.eps for c in configs])
    ref = int(np.argmin(eps_levels))

    dv = np.zeros(len(runs))
    dth = np.zeros(len(runs))
    for i, r in enumerate(runs):
        if i == ref:
            continue
        dv[i], dth[i] = _traj_distances(r.snapshots, runs[ref].snapshots)

    others = [i for i in range(len(runs)) if i != ref]
    order = sorted(others, key=lambda i: eps_levels[i], reverse=True)

    def monotone(d):
        vals = [d[i] for i in order]
        return all(x > y for x, y in zip(vals, vals[1:]))

    gaps = np.array([eps_levels[i] - eps_levels[ref] for i in order])
    return SweepReport(
        eps_levels=eps_levels,
        reference_eps=float(eps_levels[ref]),
        dist_velocity=dv,
        dist_theta=dth,
        monotone_velocity=monotone(dv) if len(order) > 1 else True,
        monotone_theta=monotone(dth) if len(order) > 1 else True,
        slope_velocity=_loglog_slope(gaps, np.array([dv[i] for i in order])),
        slope_theta=_loglog_slope(gaps, np.array([dth[i] for i in order])),
    )


def sweep_configs(base: SimConfig, levels) -> list[SimConfig]:
    """Per-level copies of a base config, differing only in eps."""
    return [replace(base, eps=float(e)) for e in levels]
