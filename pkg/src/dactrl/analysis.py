"""Numerical verification of the performance guarantees against traces.

Every guarantee the controllers come with is turned into a concrete
inequality over a logged trace: the ultimate bound on the filtered error,
the mean-square output-error inequality, the windowed-L2 convergence
bounds, and the positivity / dissipation structure of the integral
Lyapunov function.  The unknowable ideal quantities (ideal weights,
approximation-error bounds, true difference constants) are realized
operationally: least-squares fits over the desired set and the plants'
held-out constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .controllers import ControllerGains
from .errors import (DomainError, LemmaHypothesisError, TraceFormatError)
from .error_geometry import FilterSpec, estimate_c1_c2
from .plant import PlantModel
from .rbf_net import IdealFit, RbfNetwork, eval_basis_many, fit_ideal_weights, \
    place_centers_grid
from .sim_engine import ClosedLoopSetup, SimTrace
from .trajectory import DesiredTrajectory

__all__ = [
    "BoundReport", "ReportInputs", "uub_bound", "epsilon_bound",
    "ms_output_error", "windowed_l2", "lyapunov_v", "lyapunov_total",
    "lemma1_oracle", "lemma2_check", "Lemma2Verdict",
    "check_theorem_bounds", "approximation_comparison", "ApproxComparison",
    "prepare_report_inputs", "lemma1_suite", "lemma2_suite",
    "report_to_text", "report_rows",
]

UUB_SLACK = 1.05          # 5% slack on steady-state and windowed checks
ENTRY_RUN_STEPS = 50      # consecutive in-bound steps defining sustained entry
MS_START_TIME = 0.1       # mean-square inequality checked from here on


def _cumtrapz(y: np.ndarray, dx: float) -> np.ndarray:
    out = np.empty_like(y)
    out[0] = 0.0
    np.cumsum(0.5 * dx * (y[1:] + y[:-1]), out=out[1:])
    return out


def _gamma_inv_quad(w: np.ndarray, gamma) -> float:
    """w^T Gamma^{-1} w for diagonal Gamma given as scalar or vector."""
    g = np.asarray(gamma, dtype=float)
    return float(np.sum(w * w / g))


def uub_bound(gains: ControllerGains, fit_f: IdealFit, fit_g: IdealFit) -> float:
    """Ultimate bound on |e_f| for the integral-adaptation scheme."""
    eps = (gains.eps_rho
           + 0.5 * (gains.sigma_f * fit_f.norm_sq + gains.sigma_g * fit_g.norm_sq)
           + gains.eta * fit_f.eps_bar**2
           + gains.eta * fit_g.eps_bar**2)
    return math.sqrt(eps / gains.kappa)


def epsilon_bound(gains: ControllerGains, fit_f: IdealFit, fit_g: IdealFit,
                  variant: str, lf_true: float | None = None,
                  lg_true: float | None = None) -> float:
    """The scalar epsilon(...) entering the scheme B/C guarantees."""
    if variant == "B":
        return (gains.eps_rho
                + gains.eta * (fit_f.eps_bar**2 + fit_g.eps_bar**2)
                + 0.5 * (gains.sigma_f * fit_f.norm_sq + gains.sigma_g * fit_g.norm_sq))
    if variant == "C":
        if lf_true is None or lg_true is None:
            raise DomainError("variant C needs the held-out difference constants")
        return (gains.eps_rho
                + gains.eta_f_resolved * fit_f.eps_bar**2
                + gains.eta_g_resolved * fit_g.eps_bar**2
                + 0.5 * (gains.sigma_f * fit_f.norm_sq + gains.sigma_g * fit_g.norm_sq)
                + 0.5 * (gains.sigma_lf * lf_true**2 + gains.sigma_lg * lg_true**2))
    raise DomainError(f"epsilon_bound handles variants B and C, got {variant!r}")


def steady_bound(gains: ControllerGains, fit_f: IdealFit, fit_g: IdealFit,
                 variant: str, lf_true=None, lg_true=None) -> float:
    """Ultimate |e_f| radius for any variant."""
    if variant == "A":
        return uub_bound(gains, fit_f, fit_g)
    eps = epsilon_bound(gains, fit_f, fit_g, variant, lf_true, lg_true)
    return math.sqrt(eps / gains.kappa)


def _time_index(trace: SimTrace, t: float) -> int:
    k = int(round(t / trace.h))
    if k < 0 or k >= trace.n_samples:
        raise DomainError(f"t = {t} outside trace horizon")
    return k


def ms_output_error(trace: SimTrace, t: float) -> float:
    """(1/t) integral of e_1^2 over [0, t] (trapezoid rule)."""
    if t <= 0.0:
        raise DomainError(f"mean-square error needs t > 0, got {t}")
    k = _time_index(trace, t)
    e1 = trace.e[:, 0]
    return _cumtrapz(e1 * e1, trace.h)[k] / trace.times[k]


def windowed_l2(trace: SimTrace, signal: str, tau: float, t: float) -> float:
    """Integral of the squared signal over [t - tau, t]."""
    if tau <= 0.0:
        raise DomainError(f"window length must be positive, got {tau}")
    if t < tau:
        raise DomainError(f"t = {t} precedes the first full window of length {tau}")
    y = trace.column(signal)
    k = _time_index(trace, t)
    m = int(round(tau / trace.h))
    cum = _cumtrapz(y * y, trace.h)
    return float(cum[k] - cum[k - m])


def lyapunov_v(trace: SimTrace, plant: PlantModel) -> np.ndarray:
    """Integral Lyapunov term V(t), reconstructed by quadrature.

    V(t) = int_0^t g(x) d(etilde^2/2); the derivative of etilde^2/2 is
    approximated with centered differences (one-sided at the ends).
    """
    half_sq = 0.5 * trace.e_tilde**2
    dhalf = np.gradient(half_sq, trace.h)
    g = np.array([float(plant.g(x)) for x in trace.x])
    return _cumtrapz(g * dhalf, trace.h)


def lemma1_oracle(g_fn, f_fn, t_grid) -> bool:
    """Positivity of int_0^t g(f(s)) f'(s) ds on a grid.

    Preconditions sampled on the grid: f(t_grid[0]) = 0 with t_grid[0] = 0,
    f > 0 afterwards, g > 0 along the f range.  Violations raise rather
    than count as a failed lemma.
    """
    ts = np.asarray(t_grid, dtype=float)
    if ts.ndim != 1 or ts.shape[0] < 3 or np.any(np.diff(ts) <= 0.0):
        raise DomainError("t_grid must be an increasing 1-D grid")
    if abs(ts[0]) > 0.0:
        raise DomainError("t_grid must start at 0")
    f = np.asarray([float(f_fn(t)) for t in ts])
    if abs(f[0]) > 1e-12:
        raise LemmaHypothesisError(f"f(0) = {f[0]:g} is not 0")
    if np.any(f[1:] <= 0.0):
        raise LemmaHypothesisError("f must be positive for t > 0 on the grid")
    g = np.asarray([float(g_fn(v)) for v in f])
    if np.any(g <= 0.0):
        raise LemmaHypothesisError("g must be positive along the f range")
    df = np.gradient(f, ts)
    integral = np.concatenate(([0.0], np.cumsum(
        0.5 * np.diff(ts) * (g[1:] * df[1:] + g[:-1] * df[:-1]))))
    return bool(np.all(integral[1:] > 0.0))


@dataclass(frozen=True)
class Lemma2Verdict:
    limsup_tail: float
    bound: float
    passed: bool
    d_tends_to_zero: bool
    s_tail_max: float


def lemma2_check(r, s, d, d_bar: float, tail_frac: float = 0.25,
                 tol: float = 1e-9) -> Lemma2Verdict:
    """Check the convergence conclusion of the sequence recursion.

    Requires r_k <= r_{k-1} - s_k + d_k with positive r, nonnegative s and
    |d| <= d_bar (validated; violations are input errors).  Reports the
    empirical limsup of s over the tail against d_bar, and when d decays
    to zero additionally whether the tail of s does too.
    """
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    d = np.asarray(d, dtype=float)
    if not (r.shape == s.shape == d.shape) or r.ndim != 1 or r.shape[0] < 4:
        raise DomainError("sequences must be equal-length 1-D with >= 4 entries")
    if np.any(r <= 0.0) or np.any(s < 0.0):
        raise LemmaHypothesisError("r must be positive and s nonnegative")
    if not np.isfinite(r[0]):
        raise LemmaHypothesisError("r_0 must be finite")
    if np.any(np.abs(d) > d_bar + tol):
        raise LemmaHypothesisError("|d_k| exceeds the stated bound")
    lhs = r[1:]
    rhs = r[:-1] - s[1:] + d[1:]
    if np.any(lhs > rhs + tol * np.maximum(1.0, np.abs(rhs))):
        raise LemmaHypothesisError("recursion inequality violated by the input sequences")

    n_tail = max(2, int(round(tail_frac * s.shape[0])))
    s_tail = s[-n_tail:]
    d_tail = np.abs(d[-n_tail:])
    limsup_tail = float(np.max(s_tail))
    bound = d_bar + 0.05 * d_bar + tol
    d_zero = bool(np.max(d_tail) <= max(tol, 1e-3 * max(d_bar, 1.0)))
    passed = limsup_tail <= bound
    if d_zero:
        passed = passed and limsup_tail <= max(10.0 * float(np.max(d_tail)), 1e-6)
    return Lemma2Verdict(limsup_tail=limsup_tail, bound=bound, passed=passed,
                         d_tends_to_zero=d_zero, s_tail_max=float(np.max(s_tail)))


# ---------------------------------------------------------------------------
# Theorem checks over full traces

@dataclass
class ReportInputs:
    """Fitted and estimated quantities a bound check consumes."""

    gains: ControllerGains          # as reported to the checker
    fit_f: IdealFit
    fit_g: IdealFit
    filter_spec: FilterSpec
    lf_true: float
    lg_true: float
    delta: float
    window_tau: float               # audit window for the L2 corollaries


@dataclass
class BoundReport:
    variant: str
    b_ef: float                     # steady |e_f| radius for the variant
    eps_total: float
    t_detected: float | None
    ms_bound_curve: np.ndarray
    violations: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)   # name -> (worst_t, lhs, rhs)

    @property
    def passed(self) -> bool:
        return not self.violations


def _varpi0(trace: SimTrace, inputs: ReportInputs, variant: str) -> float:
    """Initial-condition constant of the mean-square inequality."""
    g = inputs.gains
    wtf0 = trace.w_f[0] - inputs.fit_f.w_star
    wtg0 = trace.w_g[0] - inputs.fit_g.w_star
    base = (_gamma_inv_quad(wtf0, g.gamma_f) + _gamma_inv_quad(wtg0, g.gamma_g)) / g.kappa
    out = base + 2.0 * trace.e_f[0]**2 * inputs.delta
    if variant in ("B", "C"):
        out += (g.tau / g.kappa) * (_gamma_inv_quad(inputs.fit_f.w_star, g.gamma_f)
                                    + _gamma_inv_quad(inputs.fit_g.w_star, g.gamma_g))
    if variant == "C":
        ltf0 = inputs.lf_true - trace.l_f_hat[0]
        ltg0 = inputs.lg_true - trace.l_g_hat[0]
        out += (ltf0**2 / g.gamma_lf + ltg0**2 / g.gamma_lg) / g.kappa
        out += g.tau * (inputs.lf_true**2 / g.gamma_lf
                        + inputs.lg_true**2 / g.gamma_lg) / g.kappa
    return out


def _check_series(report: "BoundReport", name: str, times: np.ndarray,
                  lhs: np.ndarray, rhs) -> None:
    """Record the worst margin of a pointwise check and all violations."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.broadcast_to(np.asarray(rhs, dtype=float), lhs.shape)
    if lhs.size == 0:
        return
    kw = int(np.argmin(rhs - lhs))
    report.checks[name] = (name, float(times[kw]), float(lhs[kw]), float(rhs[kw]))
    for k in np.flatnonzero(lhs > rhs):
        report.violations.append((name, float(times[k]), float(lhs[k]), float(rhs[k])))


def check_theorem_bounds(trace: SimTrace, inputs: ReportInputs,
                         variant: str) -> BoundReport:
    """Check every trace-level guarantee of the given scheme.

    (i) after the empirically detected entry time (and past the settling
    moment), |e_f| stays within 1.05x the steady bound; (ii) the
    mean-square output-error inequality holds at every logged t >= 0.1 s;
    (iii) the windowed-L2 bounds hold over the final 20% of the horizon;
    plus the energy relation between e_1 and e_f that the estimated
    constants promise.
    """
    for col in ("ef", "ef_tilde", "e1"):
        try:
            trace.column(col)
        except TraceFormatError:
            raise TraceFormatError(f"trace lacks column {col!r} needed by the checker")

    g = inputs.gains
    bound = steady_bound(g, inputs.fit_f, inputs.fit_g, variant,
                         inputs.lf_true, inputs.lg_true)
    eps_total = g.kappa * bound * bound
    times, h = trace.times, trace.h
    report = BoundReport(variant=variant, b_ef=bound, eps_total=eps_total,
                         t_detected=None, ms_bound_curve=np.array([]))

    # (i) ultimate boundedness after sustained entry
    radius = UUB_SLACK * bound
    inside = np.abs(trace.e_tilde) <= radius
    run = ENTRY_RUN_STEPS
    t_idx = None
    if trace.n_samples >= run:
        counts = np.convolve(inside.astype(int), np.ones(run, dtype=int), mode="valid")
        hits = np.flatnonzero(counts == run)
        if hits.size:
            t_idx = int(hits[0])
    if t_idx is None:
        report.violations.append(("uub_entry", float(times[-1]),
                                  float(np.abs(trace.e_tilde).max()), radius))
    else:
        report.t_detected = float(times[t_idx])
        k_start = max(t_idx, int(np.ceil(inputs.delta / h - 1e-9)))
        _check_series(report, "uub_steady", times[k_start:],
                      np.abs(trace.e_f[k_start:]), radius)

    # (ii) mean-square output error
    e1 = trace.e[:, 0]
    cum_e1 = _cumtrapz(e1 * e1, h)
    varpi0 = _varpi0(trace, inputs, variant)
    c1 = inputs.filter_spec.c1
    c2 = inputs.filter_spec.c2 * float(trace.e[0] @ trace.e[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        ms_rhs = (c1 * varpi0 + c2) / times + 2.0 * c1 * bound * bound
        ms_lhs = cum_e1 / times
    report.ms_bound_curve = ms_rhs
    k0 = max(1, int(math.ceil(MS_START_TIME / h - 1e-9)))
    _check_series(report, "mean_square", times[k0:], ms_lhs[k0:], ms_rhs[k0:])

    # energy relation used by (ii): int e1^2 <= c1 int ef^2 + c2
    cum_ef = _cumtrapz(trace.e_f**2, h)
    _check_series(report, "filter_energy", times, cum_e1, c1 * cum_ef + c2)

    # (iii) windowed-L2 corollaries over the final 20%
    tau_w = inputs.window_tau
    m = int(round(tau_w / h))
    k_tail = max(m, int(math.floor(0.8 * (trace.n_samples - 1))))
    windows = {"window_ef": trace.e_f**2}
    limits = {"window_ef": UUB_SLACK * tau_w * bound * bound}
    if variant in ("B", "C"):
        wtf = trace.w_f - inputs.fit_f.w_star
        wtg = trace.w_g - inputs.fit_g.w_star
        windows["window_wf"] = np.sum(wtf * wtf, axis=1)
        windows["window_wg"] = np.sum(wtg * wtg, axis=1)
        limits["window_wf"] = UUB_SLACK * 2.0 * tau_w * eps_total / g.sigma_f
        limits["window_wg"] = UUB_SLACK * 2.0 * tau_w * eps_total / g.sigma_g
    if variant == "C":
        ltf = inputs.lf_true - trace.l_f_hat
        ltg = inputs.lg_true - trace.l_g_hat
        windows["window_lf"] = ltf * ltf
        windows["window_lg"] = ltg * ltg
        limits["window_lf"] = UUB_SLACK * 2.0 * tau_w * eps_total / g.sigma_lf
        limits["window_lg"] = UUB_SLACK * 2.0 * tau_w * eps_total / g.sigma_lg
    for name, series in windows.items():
        cum = _cumtrapz(series, h)
        win = cum[k_tail:] - cum[k_tail - m:trace.n_samples - m]
        _check_series(report, name, times[k_tail:], win, limits[name])

    return report


# ---------------------------------------------------------------------------
# Desired-approximation versus conventional approximation

@dataclass(frozen=True)
class ApproxComparison:
    da_eps_bar: tuple      # one entry per box, all bit-for-bit identical
    conventional_eps: tuple
    box_radii: tuple


def approximation_comparison(target, traj: DesiredTrajectory, net: RbfNetwork,
                             box_radii, per_axis: int,
                             samples_per_axis: int = 12,
                             grid_step: float = 0.01) -> ApproxComparison:
    """Fixed-capacity fits over growing state boxes versus the desired fit.

    For each radius r, a fresh grid network of the same size is fitted to
    the target over [-r, r]^n and its max residual recorded.  The desired
    fit never consumes the box parameter, so its residual is one number
    repeated per row.
    """
    da_fit = fit_ideal_weights(target, traj, net, grid_step)
    n = traj.n
    conv = []
    for r in box_radii:
        box = np.array([[-float(r), float(r)]] * n)
        centers, widths = place_centers_grid(box, per_axis)
        box_net = RbfNetwork(centers=centers, widths=widths,
                             weights=np.zeros(centers.shape[0]))
        axes = [np.linspace(-r, r, samples_per_axis)] * n
        pts = np.column_stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")])
        phi = eval_basis_many(box_net, pts)
        y = np.array([float(target(p)) for p in pts])
        a = phi.T @ phi + 1e-10 * np.eye(box_net.n_nodes)
        w = np.linalg.solve(a, phi.T @ y)
        conv.append(float(np.max(np.abs(y - phi @ w))))
    return ApproxComparison(da_eps_bar=tuple([da_fit.eps_bar] * len(list(box_radii))),
                            conventional_eps=tuple(conv),
                            box_radii=tuple(float(r) for r in box_radii))


# ---------------------------------------------------------------------------
# Pipeline helpers

def prepare_report_inputs(setup: ClosedLoopSetup, seed: int | None = None,
                          apply_overrides: bool = True) -> ReportInputs:
    """Fit the ideal weights and estimate the filter constants for a setup."""
    s = setup.scenario
    fit_f = fit_ideal_weights(setup.plant.f, setup.traj, setup.net_f, s.fit_grid_step)
    fit_g = fit_ideal_weights(setup.plant.g, setup.traj, setup.net_g, s.fit_grid_step)
    c1, c2 = estimate_c1_c2(s.lam, seed=s.seed if seed is None else seed)
    gains = s.gains
    if apply_overrides and s.report_overrides:
        from dataclasses import replace
        fields = {k: v for k, v in s.report_overrides.items()
                  if k in ControllerGains.__dataclass_fields__}
        gains = replace(gains, **fields)
    return ReportInputs(gains=gains, fit_f=fit_f, fit_g=fit_g,
                        filter_spec=FilterSpec(lam=tuple(s.lam), c1=c1, c2=c2),
                        lf_true=setup.plant.lf_true, lg_true=setup.plant.lg_true,
                        delta=s.delta, window_tau=s.gains.tau)


def lyapunov_total(trace: SimTrace, inputs: ReportInputs, plant: PlantModel,
                   variant: str) -> np.ndarray:
    """Reconstruct the full Lyapunov functional along a trace.

    Scheme A adds the pointwise weight-error quadratic to V; schemes B
    and C add sliding-window integrals of the estimate errors (constant
    pre-history extension below t = 0).
    """
    g = inputs.gains
    v = lyapunov_v(trace, plant)
    wtf = trace.w_f - inputs.fit_f.w_star
    wtg = trace.w_g - inputs.fit_g.w_star
    qf = np.array([_gamma_inv_quad(w, g.gamma_f) for w in wtf])
    qg = np.array([_gamma_inv_quad(w, g.gamma_g) for w in wtg])
    if variant == "A":
        return v + 0.5 * (qf + qg)
    series = qf + qg
    if variant == "C":
        series = series + (inputs.lf_true - trace.l_f_hat)**2 / g.gamma_lf
        series = series + (inputs.lg_true - trace.l_g_hat)**2 / g.gamma_lg
    m = int(round(g.tau / trace.h))
    padded = np.concatenate((np.full(m, series[0]), series))
    cum = _cumtrapz(padded, trace.h)
    return v + 0.5 * (cum[m:] - cum[:-m])


# ---------------------------------------------------------------------------
# Randomized lemma suites

def lemma1_suite(seed: int = 0, n_pairs: int = 10):
    """Randomized (f, g) pairs satisfying the hypotheses; returns verdicts."""
    rng = np.random.default_rng(seed)
    results = []
    grid = np.linspace(0.0, 2.0, 801)
    for i in range(n_pairs):
        a = float(rng.uniform(0.2, 3.0))
        kind = i % 3
        if kind == 0:
            f_fn = lambda t, a=a: a * t * t
        elif kind == 1:
            b = float(rng.uniform(0.1, 0.4))
            w = float(rng.uniform(0.5, 4.0))
            f_fn = lambda t, a=a, b=b, w=w: a * t * t * (1.0 + b * np.sin(w * t))
        else:
            # rises then falls but stays positive on (0, 2]
            f_fn = lambda t, a=a: a * t * (2.2 - t)
        c = float(rng.uniform(0.5, 2.0))
        d = float(rng.uniform(0.0, 0.9)) * c
        w2 = float(rng.uniform(0.3, 3.0))
        g_kind = i % 2
        if g_kind == 0:
            g_fn = lambda y, c=c, d=d, w2=w2: c + d * np.sin(w2 * y)
        else:
            g_fn = lambda y, c=c: c + y * y
        results.append(lemma1_oracle(g_fn, f_fn, grid))
    return results


def lemma2_suite(seed: int = 0, n_sequences: int = 100, length: int = 400):
    """Randomized hypothesis-satisfying sequences; returns verdicts."""
    rng = np.random.default_rng(seed)
    verdicts = []
    for i in range(n_sequences):
        d_bar = float(rng.uniform(0.01, 1.0))
        decaying = i % 2 == 1
        r = np.empty(length)
        s = np.empty(length)
        d = np.empty(length)
        r[0] = float(rng.uniform(1.0, 20.0))
        s[0] = 0.0
        d[0] = 0.0
        for k in range(1, length):
            scale = 0.98**k if decaying else 1.0
            dk = float(rng.uniform(-d_bar, d_bar)) * scale
            if r[k - 1] + dk <= 1e-9:
                dk = abs(dk)
            d[k] = dk
            headroom = r[k - 1] + dk
            s[k] = float(rng.uniform(0.0, 1.0)) * headroom
            r[k] = max((r[k - 1] - s[k] + dk) * float(rng.uniform(0.8, 1.0)), 1e-12)
        verdicts.append(lemma2_check(r, s, d, d_bar))
    return verdicts


# ---------------------------------------------------------------------------
# Report serialization

def report_rows(report: BoundReport):
    """Rows of (check, t, lhs, rhs, margin): worst case per check plus
    every violation."""
    rows = []
    for name, t, lhs, rhs in report.checks.values():
        rows.append((name, t, lhs, rhs, rhs - lhs))
    for name, t, lhs, rhs in report.violations:
        rows.append((f"VIOLATION:{name}", t, lhs, rhs, rhs - lhs))
    return rows


def report_to_text(report: BoundReport) -> str:
    lines = [
        f"variant           : {report.variant}",
        f"steady bound      : {report.b_ef:.6g}",
        f"epsilon total     : {report.eps_total:.6g}",
        f"entry time        : "
        + (f"{report.t_detected:.4g} s" if report.t_detected is not None else "never"),
        f"verdict           : {'PASS' if report.passed else 'FAIL'}",
        "",
        "worst margins per check (lhs <= rhs):",
    ]
    for name, t, lhs, rhs in report.checks.values():
        lines.append(f"  {name:<14s} t={t:8.4f}  lhs={lhs:12.6g}  rhs={rhs:12.6g}  "
                     f"margin={rhs - lhs:12.6g}")
    if report.violations:
        lines.append("")
        lines.append(f"violations ({len(report.violations)}):")
        for name, t, lhs, rhs in report.violations[:20]:
            lines.append(f"  {name:<14s} t={t:8.4f}  lhs={lhs:12.6g}  rhs={rhs:12.6g}")
        if len(report.violations) > 20:
            lines.append(f"  ... {len(report.violations) - 20} more")
    return "\n".join(lines) + "\n"
