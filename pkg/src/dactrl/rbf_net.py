"""Gaussian radial-basis networks over the desired state.

Networks here are only ever evaluated on the desired trajectory x_d, never
on the plant state.  The least-squares fit plays the role of an oracle for
the unknowable ideal weights: it produces the concrete ||W*|| and residual
bound consumed by the performance-bound formulas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, FitError, ShapeError
from .trajectory import DesiredTrajectory

__all__ = [
    "RbfNetwork",
    "IdealFit",
    "eval_basis",
    "eval_basis_many",
    "network_output",
    "fit_ideal_weights",
    "place_centers_grid",
]

# Width assigned when every box axis is a single point; any positive value
# works there because the basis is only evaluated at that point.
_DEGENERATE_WIDTH = 0.5


@dataclass(frozen=True)
class RbfNetwork:
    """Gaussian RBF network: S_i(x) = exp(-||x - c_i||^2 / w_i^2)."""

    centers: np.ndarray  # (N, dim)
    widths: np.ndarray   # (N,)
    weights: np.ndarray  # (N,)

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        w = np.asarray(self.widths, dtype=float).ravel()
        wt = np.asarray(self.weights, dtype=float).ravel()
        if c.shape[0] < 1:
            raise ConfigError("network needs at least one node")
        if w.shape[0] != c.shape[0] or wt.shape[0] != c.shape[0]:
            raise ShapeError(f"inconsistent network shapes: {c.shape[0]} centers, "
                             f"{w.shape[0]} widths, {wt.shape[0]} weights")
        if np.any(w <= 0.0):
            raise ConfigError("all widths must be positive")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "widths", w)
        object.__setattr__(self, "weights", wt)

    @property
    def n_nodes(self) -> int:
        return self.centers.shape[0]

    @property
    def dim(self) -> int:
        return self.centers.shape[1]


def eval_basis(net: RbfNetwork, x_d) -> np.ndarray:
    """Basis vector S(x_d); every entry lies in (0, 1]."""
    x = np.asarray(x_d, dtype=float).ravel()
    if x.shape[0] != net.dim:
        raise ShapeError(f"input has dimension {x.shape[0]}, centers have {net.dim}")
    d2 = ((net.centers - x) ** 2).sum(axis=1)
    return np.exp(-d2 / net.widths**2)


def eval_basis_many(net: RbfNetwork, points: np.ndarray) -> np.ndarray:
    """Vectorized basis evaluation; points is (K, dim), result (K, N)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != net.dim:
        raise ShapeError(f"points have dimension {pts.shape[1]}, centers have {net.dim}")
    d2 = ((pts[:, None, :] - net.centers[None, :, :]) ** 2).sum(axis=2)
    return np.exp(-d2 / net.widths**2)


def network_output(net: RbfNetwork, s) -> float:
    """Weighted sum of basis activations."""
    sv = np.asarray(s, dtype=float).ravel()
    if sv.shape[0] != net.n_nodes:
        raise ShapeError(f"basis vector has {sv.shape[0]} entries, network has {net.n_nodes}")
    return float(net.weights @ sv)


@dataclass(frozen=True)
class IdealFit:
    """Least-squares stand-in for the ideal weights of a target function.

    eps_bar is the max absolute residual over the fit grid; the bound
    formulas consume ||w_star|| and eps_bar.
    """

    w_star: np.ndarray
    eps_bar: float

    @property
    def norm_sq(self) -> float:
        return float(self.w_star @ self.w_star)


def fit_ideal_weights(target, traj: DesiredTrajectory, net: RbfNetwork,
                      grid_step: float, ridge: float = 1e-10) -> IdealFit:
    """Fit weights so w.S(x_d(t)) tracks target(x_d(t)) over the horizon.

    Solves the ridge-regularized normal equations on a uniform time grid
    of step ``grid_step``; the grid must contain at least as many samples
    as the network has nodes.
    """
    ts = np.arange(0.0, traj.horizon + grid_step / 2.0, grid_step)
    if ts.shape[0] < net.n_nodes:
        raise FitError(f"fit grid has {ts.shape[0]} samples for {net.n_nodes} nodes")
    pts = traj.x_d_table(ts)
    phi = eval_basis_many(net, pts)
    y = np.array([float(target(p)) for p in pts])

    a = phi.T @ phi + ridge * np.eye(net.n_nodes)
    b = phi.T @ y
    try:
        w = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise FitError(f"normal equations singular despite ridge {ridge:g}") from exc
    if not np.all(np.isfinite(w)):
        raise FitError("non-finite weights from normal equations")
    # Guard against a silently garbage solve on a near-singular system.
    if np.linalg.norm(a @ w - b) > 1e-6 * max(1.0, np.linalg.norm(b)):
        raise FitError("normal equations ill-conditioned despite ridge")

    resid = y - phi @ w
    return IdealFit(w_star=w, eps_bar=float(np.max(np.abs(resid))) if resid.size else 0.0)


def place_centers_grid(box: np.ndarray, per_axis: int):
    """Regular grid of centers over a box inflated by 10 per cent.

    Returns (centers, widths).  Widths follow the nearest-neighbor rule:
    every node gets the smallest spacing among non-degenerate axes.  Axes
    with zero extent contribute a single coordinate (collapsed duplicates)
    and, if all axes are degenerate, a fixed width floor applies.
    """
    if per_axis < 2:
        raise ConfigError(f"per_axis must be >= 2, got {per_axis}")
    box = np.atleast_2d(np.asarray(box, dtype=float))
    axes = []
    spacings = []
    for lo, hi in box:
        if hi < lo:
            raise ConfigError(f"box axis has min {lo} > max {hi}")
        if hi == lo:
            axes.append(np.array([lo]))
            continue
        mid = 0.5 * (lo + hi)
        half = 0.55 * (hi - lo)  # 10% inflation of the half-range
        axes.append(np.linspace(mid - half, mid + half, per_axis))
        spacings.append(2.0 * half / (per_axis - 1))

    grids = np.meshgrid(*axes, indexing="ij")
    centers = np.column_stack([g.ravel() for g in grids])
    width = min(spacings) if spacings else _DEGENERATE_WIDTH
    return centers, np.full(centers.shape[0], width)
