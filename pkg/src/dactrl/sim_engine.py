"""Fixed-step RK4 closed-loop simulation.

One run wires a plant, a reference bundle, the filtered-error geometry and
one controller variant into a single integration loop and logs everything
the analysis layer needs.  Scheme A carries its weight estimates as extra
ODE state (control re-evaluated inside substeps); schemes B and C hold the
control over each step and apply their algebraic updates once per grid
point, because delay-difference laws cannot be consistently substepped.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import controllers as ctl
from .controllers import ControllerGains, ControllerState
from .errors import (ConfigError, GainSignError, NumericBlowupError,
                     TraceFormatError)
from .error_geometry import aux_nu, filtered_error
from .plant import PlantModel, builtin_plant, plant_derivative
from .rbf_net import RbfNetwork, eval_basis, eval_basis_many, place_centers_grid
from .scenario import Scenario, reference_spec, validate_scenario
from .trajectory import (DesiredTrajectory, ErrorTrajectoryPlan,
                         desired_filtered_error, make_reference)

__all__ = ["SimTrace", "ClosedLoopSetup", "rk4_step", "build_setup",
           "run_closed_loop", "write_trace_csv", "read_table_csv"]

BLOWUP_LIMIT = 1e9


def rk4_step(deriv, state, t: float, h: float):
    """One classical 4th-order Runge-Kutta step.

    ``deriv(t, state)`` must return the state derivative; a non-finite
    stage aborts with a blow-up error.
    """
    if h <= 0.0:
        raise ConfigError(f"step size must be positive, got {h}")
    y = np.asarray(state, dtype=float)
    k1 = np.asarray(deriv(t, y))
    k2 = np.asarray(deriv(t + 0.5 * h, y + 0.5 * h * k1))
    k3 = np.asarray(deriv(t + 0.5 * h, y + 0.5 * h * k2))
    k4 = np.asarray(deriv(t + h, y + h * k3))
    out = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise NumericBlowupError(f"non-finite state after step at t = {t:.6g}")
    return out


@dataclass
class ClosedLoopSetup:
    """Everything assembled from a validated scenario."""

    scenario: Scenario
    plant: PlantModel
    traj: DesiredTrajectory
    net_f: RbfNetwork
    net_g: RbfNetwork
    gains: ControllerGains
    lam: np.ndarray


def build_setup(scenario: Scenario) -> ClosedLoopSetup:
    validate_scenario(scenario)
    plant = builtin_plant(scenario.plant_name, scenario.drift_scale, scenario.gain_offset)
    traj = make_reference(reference_spec(scenario, plant.n))
    centers, widths = place_centers_grid(traj.state_box, scenario.per_axis)
    zeros = np.zeros(centers.shape[0])
    net_f = RbfNetwork(centers=centers, widths=widths, weights=zeros)
    net_g = RbfNetwork(centers=centers, widths=widths, weights=zeros)
    return ClosedLoopSetup(scenario=scenario, plant=plant, traj=traj,
                           net_f=net_f, net_g=net_g, gains=scenario.gains,
                           lam=np.asarray(scenario.lam, dtype=float))


@dataclass
class SimTrace:
    """Time-indexed log of one closed-loop run.

    Scalar diagnostics: ``robust_gain`` holds the scheme's robust gain
    (rho for A/B, varsigma for C) and ``smooth_term`` the contribution of
    the differentiable robust term to u.
    """

    variant: str
    h: float
    times: np.ndarray      # (K+1,)
    x: np.ndarray          # (K+1, n)
    e: np.ndarray          # (K+1, n)
    e_f: np.ndarray
    e_f_star: np.ndarray
    e_tilde: np.ndarray
    nu: np.ndarray
    u: np.ndarray
    w_f: np.ndarray        # (K+1, N)
    w_g: np.ndarray
    l_f_hat: np.ndarray
    l_g_hat: np.ndarray
    robust_gain: np.ndarray
    smooth_term: np.ndarray
    g_val: np.ndarray
    dataflow_audited: bool = False

    @property
    def n(self) -> int:
        return self.x.shape[1]

    @property
    def n_nodes(self) -> int:
        return self.w_f.shape[1]

    @property
    def n_samples(self) -> int:
        return self.times.shape[0]

    def scalar_columns(self, verbose: bool = False):
        cols = {}
        for i in range(self.n):
            cols[f"x{i + 1}"] = self.x[:, i]
        for i in range(self.n):
            cols[f"e{i + 1}"] = self.e[:, i]
        cols["ef"] = self.e_f
        cols["ef_star"] = self.e_f_star
        cols["ef_tilde"] = self.e_tilde
        cols["nu"] = self.nu
        cols["u"] = self.u
        cols["lf_hat"] = self.l_f_hat
        cols["lg_hat"] = self.l_g_hat
        for i in range(self.n_nodes):
            cols[f"wf_{i + 1}"] = self.w_f[:, i]
        for i in range(self.n_nodes):
            cols[f"wg_{i + 1}"] = self.w_g[:, i]
        if verbose:
            cols["robust_gain"] = self.robust_gain
            cols["smooth_term"] = self.smooth_term
            cols["gx"] = self.g_val
        return cols

    def column(self, name: str) -> np.ndarray:
        if name == "t":
            return self.times
        cols = self.scalar_columns(verbose=True)
        if name not in cols:
            raise TraceFormatError(f"unknown trace column {name!r}; "
                                   f"available: t, {', '.join(cols)}")
        return cols[name]


def write_trace_csv(trace: SimTrace, path, verbose: bool = False):
    """RFC-4180-style CSV, one row per step, %.12e numerics."""
    cols = trace.scalar_columns(verbose=verbose)
    names = ["t"] + list(cols)
    data = np.column_stack([trace.times] + [cols[c] for c in cols])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for row in data:
            writer.writerow([f"{v:.12e}" for v in row])


def read_table_csv(path):
    """Read a trace-style CSV back as {column name: 1-D array}."""
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TraceFormatError(f"{path} is empty") from None
        rows = [[float(v) for v in row] for row in reader if row]
    data = np.asarray(rows)
    if data.ndim != 2 or data.shape[1] != len(header):
        raise TraceFormatError(f"{path} rows do not match header width")
    return {name: data[:, i] for i, name in enumerate(header)}


class _Tables:
    """Quantities precomputed on the half-step grid.

    RK4 substeps of step k touch t = k*h, k*h + h/2 and (k+1)*h, all of
    which sit on the half grid, so the basis vectors can be tabulated
    offline: the networks only ever see the desired trajectory.
    """

    def __init__(self, setup: ClosedLoopSetup, n_steps: int):
        s = setup.scenario
        self.h = s.h
        half = (s.h / 2.0) * np.arange(2 * n_steps + 1)
        self.half_times = half
        self.xd = setup.traj.x_d_table(half)
        self.ydn = np.broadcast_to(setup.traj.y_dn(half), half.shape).astype(float)
        self.s_f = eval_basis_many(setup.net_f, self.xd)
        self.s_g = eval_basis_many(setup.net_g, self.xd)
        self.e_star = None
        self.de_star = None

    def set_plan(self, plan: ErrorTrajectoryPlan):
        self.e_star, self.de_star = desired_filtered_error(plan, self.half_times)

    def index(self, t: float) -> int:
        j = int(2.0 * t / self.h + 0.5)  # t >= 0, so this rounds to nearest
        jmax = self.half_times.shape[0] - 1
        return jmax if j > jmax else j

    def audit(self, setup: ClosedLoopSetup, rng: np.random.Generator,
              samples: int = 16) -> bool:
        """Spot-check that tabulated basis rows came from the trajectory."""
        idx = rng.integers(0, self.half_times.shape[0], size=samples)
        for j in idx:
            xd = setup.traj.x_d(self.half_times[j])
            if not (np.array_equal(self.xd[j], xd)
                    and np.allclose(self.s_f[j], eval_basis(setup.net_f, xd), rtol=0, atol=0)):
                return False
        return True


def run_closed_loop(scenario: Scenario, audit_dataflow: bool = True) -> SimTrace:
    """Simulate one scenario and return the full trace.

    The time grid is times[k] = k*h computed by multiplication, so there
    is no accumulation drift.  Determinism: the loop itself uses no
    randomness; the data-flow audit uses a seeded generator.
    """
    setup = build_setup(scenario)
    s = scenario
    n, lam = setup.plant.n, setup.lam
    n_nodes = setup.net_f.n_nodes
    k_steps = s.n_steps

    tables = _Tables(setup, k_steps)
    x0 = np.asarray(s.x0, dtype=float)
    e0 = x0 - tables.xd[0]
    ef0 = filtered_error(e0, lam)
    plan = ErrorTrajectoryPlan(e_f0=ef0, delta=s.delta)
    tables.set_plan(plan)

    log = _TraceLog(s.variant, s.h, k_steps, n, n_nodes)
    if s.variant == "A":
        _run_scheme_a(setup, tables, x0, log)
    else:
        _run_scheme_bc(setup, tables, x0, log)

    trace = log.finish()
    if audit_dataflow:
        trace.dataflow_audited = tables.audit(setup, np.random.default_rng(s.seed))
    return trace


class _TraceLog:
    def __init__(self, variant, h, k_steps, n, n_nodes):
        k1 = k_steps + 1
        self.variant = variant
        self.h = h
        self.times = h * np.arange(k1)
        self.x = np.empty((k1, n))
        self.e = np.empty((k1, n))
        self.e_f = np.empty(k1)
        self.e_f_star = np.empty(k1)
        self.e_tilde = np.empty(k1)
        self.nu = np.empty(k1)
        self.u = np.empty(k1)
        self.w_f = np.empty((k1, n_nodes))
        self.w_g = np.empty((k1, n_nodes))
        self.l_f_hat = np.zeros(k1)
        self.l_g_hat = np.zeros(k1)
        self.robust_gain = np.empty(k1)
        self.smooth_term = np.empty(k1)
        self.g_val = np.empty(k1)
        self.filled = 0

    def row(self, k, *, x, e, ef, ef_star, etilde, nu, u, wf, wg, lf, lg,
            rho, smooth, g):
        self.x[k] = x
        self.e[k] = e
        self.e_f[k] = ef
        self.e_f_star[k] = ef_star
        self.e_tilde[k] = etilde
        self.nu[k] = nu
        self.u[k] = u
        self.w_f[k] = wf
        self.w_g[k] = wg
        self.l_f_hat[k] = lf
        self.l_g_hat[k] = lg
        self.robust_gain[k] = rho
        self.smooth_term[k] = smooth
        self.g_val[k] = g
        self.filled = k + 1

    def finish(self) -> SimTrace:
        k = self.filled
        return SimTrace(
            variant=self.variant, h=self.h, times=self.times[:k],
            x=self.x[:k], e=self.e[:k], e_f=self.e_f[:k],
            e_f_star=self.e_f_star[:k], e_tilde=self.e_tilde[:k],
            nu=self.nu[:k], u=self.u[:k], w_f=self.w_f[:k], w_g=self.w_g[:k],
            l_f_hat=self.l_f_hat[:k], l_g_hat=self.l_g_hat[:k],
            robust_gain=self.robust_gain[:k], smooth_term=self.smooth_term[:k],
            g_val=self.g_val[:k])


def _abort(exc, step, log):
    """Attach the failing step and the partial trace, then re-raise."""
    exc.step = step
    exc.partial_trace = log.finish()
    raise exc


def _run_scheme_bc(setup: ClosedLoopSetup, tables: _Tables, x0, log: _TraceLog):
    s = setup.scenario
    gains, plant, lam = setup.gains, setup.plant, setup.lam
    k_steps = s.n_steps
    state = ControllerState(setup.net_f.n_nodes, s.tau_steps)
    is_c = s.variant == "C"
    x = x0.copy()

    for k in range(k_steps + 1):
        j = 2 * k
        xd = tables.xd[j]
        e = x - xd
        ef = float(lam @ e[:-1] + e[-1])
        etilde = ef - tables.e_star[j]
        nu = float(lam @ e[1:]) - tables.ydn[j] - tables.de_star[j]
        s_f, s_g = tables.s_f[j], tables.s_g[j]

        ctl.incremental_adaptation_step(state, s_f, s_g, etilde, nu, gains)
        if is_c:
            e_norm = float(np.linalg.norm(e))
            hf = float(plant.hbar_f(x, xd))
            hg = float(plant.hbar_g(x, xd))
            ctl.lipschitz_gain_step(state, etilde, e_norm, nu, hf, hg, gains)
            varsigma = state.l_f_hat * hf + state.l_g_hat * abs(nu) * hg
            smooth = -etilde * ctl.u_da2_smooth_gain(etilde, varsigma, e_norm,
                                                     gains.eps_rho)
            u = ctl.control_u_da2(etilde, nu, s_f, s_g, e_norm, hf, hg, state, gains)
            rho_like = varsigma
        else:
            rho_like = ctl.robust_gain_rho(float(plant.lf_bound(x, xd)),
                                           float(plant.lg_bound(x, xd)),
                                           nu, etilde, gains.eta)
            smooth = -etilde * ctl.smooth_robust_gain(etilde, rho_like, gains.eps_rho)
            u = ctl.control_u_da(etilde, rho_like, nu, s_f, s_g, state, gains)
        state.commit()

        try:
            g_here = float(plant.g(x))
            log.row(k, x=x, e=e, ef=ef, ef_star=tables.e_star[j], etilde=etilde,
                    nu=nu, u=u, wf=state.w_f, wg=state.w_g, lf=state.l_f_hat,
                    lg=state.l_g_hat, rho=rho_like, smooth=smooth, g=g_here)
            if k < k_steps:
                x = rk4_step(lambda t, xx: plant_derivative(plant, xx, u),
                             x, log.times[k], s.h)
                if np.max(np.abs(x)) > BLOWUP_LIMIT:
                    raise NumericBlowupError(f"state magnitude exceeded {BLOWUP_LIMIT:g}")
        except (NumericBlowupError, GainSignError) as exc:
            _abort(exc, k + 1, log)


def _run_scheme_a(setup: ClosedLoopSetup, tables: _Tables, x0, log: _TraceLog):
    s = setup.scenario
    gains, plant, lam = setup.gains, setup.plant, setup.lam
    n = plant.n
    n_nodes = setup.net_f.n_nodes
    k_steps = s.n_steps
    h = s.h
    kappa, eps, eta = gains.kappa, gains.eps_rho, gains.eta
    sigma_f, sigma_g = gains.sigma_f, gains.sigma_g
    gf = np.asarray(gains.gamma_f, dtype=float)
    gg = np.asarray(gains.gamma_g, dtype=float)
    lam_ext = np.concatenate((lam, [1.0]))   # e_f = lam_ext . e
    lam_hi = np.concatenate(([0.0], lam))    # nu's error term = lam_hi . e
    xdt, sft, sgt = tables.xd, tables.s_f, tables.s_g
    est, dest, ydnt = tables.e_star, tables.de_star, tables.ydn
    f_plant, g_plant = plant.f, plant.g
    lf_bound, lg_bound = plant.lf_bound, plant.lg_bound

    def signals(j, z):
        x, wf, wg = z[:n], z[n:n + n_nodes], z[n + n_nodes:]
        xd = xdt[j]
        e = x - xd
        ef = float(lam_ext @ e)
        etilde = ef - est[j]
        nu = float(lam_hi @ e) - ydnt[j] - dest[j]
        rho = ctl.robust_gain_rho(float(lf_bound(x, xd)), float(lg_bound(x, xd)),
                                  nu, etilde, eta)
        sgain = ctl.smooth_robust_gain(etilde, rho, eps)
        u = (-etilde * (sgain + kappa) - float(wf @ sft[j])
             - float(wg @ sgt[j]) * nu)
        return x, wf, wg, e, ef, etilde, nu, rho, sgain, u

    def aug_deriv(j, z):
        x, wf, wg, _, _, etilde, nu, _, _, u = signals(j, z)
        g = g_plant(x)
        if g <= 0.0:
            raise GainSignError(f"plant {plant.name}: gain {g:.6g} <= 0 at state {x.tolist()}")
        dz = np.empty_like(z)
        dz[:n - 1] = x[1:]
        dz[n - 1] = (f_plant(x) + u) / g
        dz[n:n + n_nodes] = gf * (sft[j] * etilde - sigma_f * wf)
        dz[n + n_nodes:] = gg * (sgt[j] * (etilde * nu) - sigma_g * wg)
        return dz

    z = np.concatenate((x0, np.zeros(n_nodes), np.zeros(n_nodes)))
    sixth = h / 6.0
    for k in range(k_steps + 1):
        j = 2 * k
        x, wf, wg, e, ef, etilde, nu, rho, sgain, u = signals(j, z)
        try:
            log.row(k, x=x, e=e, ef=ef, ef_star=est[j], etilde=etilde,
                    nu=nu, u=u, wf=wf, wg=wg, lf=0.0, lg=0.0, rho=rho,
                    smooth=-etilde * sgain, g=float(plant.g(x)))
            if k < k_steps:
                # classical RK4 on the augmented state; substeps hit the
                # half grid at indices j, j+1, j+2
                k1 = aug_deriv(j, z)
                k2 = aug_deriv(j + 1, z + (0.5 * h) * k1)
                k3 = aug_deriv(j + 1, z + (0.5 * h) * k2)
                k4 = aug_deriv(j + 2, z + h * k3)
                z = z + sixth * (k1 + 2.0 * (k2 + k3) + k4)
                if not np.all(np.isfinite(z)):
                    raise NumericBlowupError("non-finite state after step")
                if np.max(np.abs(z)) > BLOWUP_LIMIT:
                    raise NumericBlowupError(f"state magnitude exceeded {BLOWUP_LIMIT:g}")
        except (NumericBlowupError, GainSignError) as exc:
            _abort(exc, k + 1, log)
