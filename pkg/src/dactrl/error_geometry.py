"""Filtered-error machinery.

The scalar filtered error e_f = [lambda^T 1] e collapses the state error
through a Hurwitz polynomial, so driving e_f to zero drives the whole
error vector to zero.  This module validates the polynomial, computes e_f
and the auxiliary feedforward signal nu, and estimates the two constants
relating the output-error energy to the filtered-error energy, which the
mean-square performance checks need as concrete numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.signal

from .errors import InvalidFilterError, ShapeError

__all__ = [
    "FilterSpec",
    "hurwitz_coeffs",
    "check_hurwitz",
    "filtered_error",
    "aux_nu",
    "estimate_c1_c2",
]

_ROOT_TOL = -1e-9


@dataclass(frozen=True)
class FilterSpec:
    """Filter coefficients plus the estimated energy constants.

    ``c2`` is normalized per unit ||e(0)||^2; multiply by the squared
    initial error norm when checking a concrete trace.
    """

    lam: tuple
    c1: float
    c2: float


def hurwitz_coeffs(lam) -> np.ndarray:
    """Descending coefficients of s^(m) + lam[m-1] s^(m-1) + ... + lam[0]."""
    lam = np.asarray(lam, dtype=float).ravel()
    return np.concatenate(([1.0], lam[::-1]))


def check_hurwitz(lam) -> bool:
    """True iff all roots lie strictly in the left half-plane.

    Uses companion-matrix eigenvalues with a -1e-9 real-part margin.
    An empty coefficient list (first-order system) is vacuously stable.
    """
    lam = np.asarray(lam, dtype=float).ravel()
    if lam.size == 0:
        return True
    roots = np.roots(hurwitz_coeffs(lam))
    return bool(np.all(roots.real < _ROOT_TOL))


def filtered_error(e, lam) -> float:
    """e_f = lam . e[:-1] + e[-1]."""
    e = np.asarray(e, dtype=float).ravel()
    lam = np.asarray(lam, dtype=float).ravel()
    if e.shape[0] != lam.shape[0] + 1:
        raise ShapeError(f"error vector has {e.shape[0]} entries for {lam.shape[0]} "
                         "filter coefficients")
    return float(lam @ e[:-1] + e[-1])


def aux_nu(e, lam, ydn: float, de_star: float) -> float:
    """Feedforward signal nu = lam . e[1:] - y_d^(n) - e*_f'."""
    e = np.asarray(e, dtype=float).ravel()
    lam = np.asarray(lam, dtype=float).ravel()
    if e.shape[0] != lam.shape[0] + 1:
        raise ShapeError(f"error vector has {e.shape[0]} entries for {lam.shape[0]} "
                         "filter coefficients")
    return float(lam @ e[1:]) - float(ydn) - float(de_star)


def _filter_state_space(lam):
    """Companion realization of 1 / (s^m + lam[m-1] s^(m-1) + ... + lam[0]).

    State is the leading error block e_1..e_m; input is e_f; output e_1.
    """
    m = len(lam)
    a = np.zeros((m, m))
    if m > 1:
        a[:-1, 1:] = np.eye(m - 1)
    a[-1, :] = -np.asarray(lam, dtype=float)
    b = np.zeros((m, 1))
    b[-1, 0] = 1.0
    c = np.zeros((1, m))
    c[0, 0] = 1.0
    return a, b, c


def estimate_c1_c2(lam, horizon: float = 20.0, h: float = 1e-3, seed: int = 0):
    """Estimate constants with int e_1^2 <= c1 * int e_f^2 + c2 * ||e(0)||^2.

    c1 is 1.5x the largest energy ratio seen when the error filter is
    driven by noise probes (raw white noise plus a ladder of low-passed
    versions, so near-DC gain peaks are excited).  c2 covers the
    zero-input transient from the worst unit-norm initial condition via
    the observability Gramian, with headroom for the cross term between
    transient and forced response.
    """
    lam = tuple(float(v) for v in np.asarray(lam, dtype=float).ravel())
    if not check_hurwitz(lam):
        raise InvalidFilterError(f"filter polynomial {hurwitz_coeffs(lam).tolist()} "
                                 "is not Hurwitz")
    if len(lam) == 0:
        return 1.0, 0.0  # e_1 == e_f: identity filter, no transient state

    a, b, c = _filter_state_space(lam)
    ad, bd, cd, dd, _ = scipy.signal.cont2discrete((a, b, c, np.zeros((1, 1))), h)
    num, den = scipy.signal.ss2tf(ad, bd, cd, dd)
    num = np.atleast_2d(num)[0]

    rng = np.random.default_rng(seed)
    n_samples = int(round(horizon / h)) + 1
    ratios = []
    cutoffs = np.logspace(-1.5, 1.5, 7)  # rad/s
    for cutoff in np.concatenate(([np.inf], cutoffs)):
        u = rng.standard_normal(n_samples)
        if np.isfinite(cutoff):
            alpha = np.exp(-cutoff * h)
            u = scipy.signal.lfilter([1.0 - alpha], [1.0, -alpha], u)
        y = scipy.signal.lfilter(num, den, u)
        e_in = np.trapezoid(u * u)
        if e_in > 0.0:
            ratios.append(np.trapezoid(y * y) / e_in)
    c1 = 1.5 * float(max(ratios))

    # A^T Q + Q A = -c^T c;  worst-case transient energy is lambda_max(Q).
    gram = scipy.linalg.solve_continuous_lyapunov(a.T, -np.outer(c, c))
    c2 = 4.0 * float(np.max(scipy.linalg.eigvalsh(gram)))
    return c1, c2
