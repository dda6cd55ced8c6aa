"""Figure rendering for run reports.

Every CLI report path drops a PNG next to its delimited output: the
tracking overview for a run, the filtered error against its steady bound
for a verification, the trend curve for a sweep, and one line plot per
extracted signal.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["save_trace_figure", "save_bound_figure", "save_sweep_figure",
           "save_signal_figure"]

_RC = {
    "figure.figsize": (8.0, 6.0),
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.4,
    "lines.linewidth": 1.2,
    "savefig.dpi": 130,
}


def _new_figure(n_axes):
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(n_axes, 1, sharex=(n_axes > 1))
    return fig, np.atleast_1d(axes)


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_trace_figure(trace, path):
    """Output tracking, filtered errors and control effort."""
    fig, (ax0, ax1, ax2) = _new_figure(3)
    t = trace.times
    ax0.plot(t, trace.x[:, 0], label="y")
    ax0.plot(t, trace.x[:, 0] - trace.e[:, 0], "--", label="y_d")
    ax0.set_ylabel("output")
    ax0.legend(loc="upper right")
    ax1.plot(t, trace.e_f, label="e_f")
    ax1.plot(t, trace.e_f_star, "--", label="e_f*")
    ax1.plot(t, trace.e_tilde, ":", label="e_f - e_f*")
    ax1.set_ylabel("filtered error")
    ax1.legend(loc="upper right")
    ax2.plot(t, trace.u, label="u")
    ax2.set_ylabel("control")
    ax2.set_xlabel("time [s]")
    _finish(fig, path)


def save_bound_figure(trace, report, path):
    """|e_f| against the checked steady-state radius."""
    fig, (ax,) = _new_figure(1)
    t = trace.times
    ax.plot(t, np.abs(trace.e_f), label="|e_f|")
    radius = 1.05 * report.b_ef
    ax.axhline(radius, color="tab:red", ls="--", lw=1.0,
               label=f"1.05 x bound = {radius:.3g}")
    if report.t_detected is not None:
        ax.axvline(report.t_detected, color="tab:gray", ls=":",
                   label=f"entry t = {report.t_detected:.3g}")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("|e_f|")
    ax.set_yscale("log")
    ax.legend(loc="upper right")
    ax.set_title(f"variant {report.variant}: "
                 f"{'PASS' if report.passed else 'FAIL'}")
    _finish(fig, path)


def save_sweep_figure(axis_name, values, tails, bounds, path):
    """Steady tail error and reported bound across a parameter sweep."""
    fig, (ax,) = _new_figure(1)
    ax.plot(values, tails, "o-", label="tail max |e_f|")
    ax.plot(values, bounds, "s--", label="steady bound")
    ax.set_xlabel(axis_name)
    ax.set_ylabel("|e_f|")
    if min(values) > 0 and max(values) / max(min(values), 1e-300) >= 8:
        ax.set_xscale("log")
    ax.set_yscale("log")
    ax.legend()
    _finish(fig, path)


def save_signal_figure(times, values, name, path):
    fig, (ax,) = _new_figure(1)
    ax.plot(times, values)
    ax.set_xlabel("time [s]")
    ax.set_ylabel(name)
    _finish(fig, path)
