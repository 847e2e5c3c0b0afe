"""Delimited experiment reports and the figures rendered beside them.

Output is deterministic: floats are written with repr (shortest round-trip
form), rows are sorted, figures go through the Agg backend with a fixed SVG
hash salt and no embedded timestamps, so reruns produce byte-identical files.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

plt.rcParams["svg.hashsalt"] = "blowlab"

from .exponents import ExponentReport
from .grids import fmt_float
from .harness import LifespanRecord, ScalingFit, TheoryBound


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return fmt_float(x)
    return str(x)


def write_lifespan_csv(path: str, records: Sequence[LifespanRecord],
                       fit: Optional[ScalingFit] = None,
                       bound: Optional[TheoryBound] = None) -> str:
    lines = ["# lifespan sweep: threshold-crossing times vs data size",
             "# columns: eps = data amplitude; T = first time max|v| crosses theta "
             "(log-interpolated); status = detection verdict; sensitivity = relative T "
             "shift when theta is raised 10x; refinement_spread = relative T shift at "
             "half mesh; t_searched = horizon reached; doublings = horizon doublings; "
             "bound_T = closed-form upper bound C eps^(-kappa)"]
    if fit is not None:
        lines.append("# fit: slope={} stderr={} kappa_measured={} residual_rms={} n_used={}".format(
            fmt_float(fit.slope), fmt_float(fit.slope_stderr),
            fmt_float(fit.kappa_measured), fmt_float(fit.residual_rms), fit.n_used))
    if bound is not None:
        lines.append("# bound: constant={} kappa={} form={}".format(
            fmt_float(bound.constant), fmt_float(bound.kappa), bound.form))
    lines.append("eps,T,status,sensitivity,refinement_spread,t_searched,doublings,bound_T")
    for rec in sorted(records, key=lambda rec: -rec.eps):
        bound_T = bound.predict_T(rec.eps) if bound is not None else None
        lines.append(",".join([
            _fmt(rec.eps), _fmt(rec.T), rec.status, _fmt(rec.sensitivity),
            _fmt(rec.refinement_spread), _fmt(rec.t_searched),
            str(rec.doublings), _fmt(bound_T)]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_lifespan_csv(path: str) -> list:
    """Inverse of write_lifespan_csv (comment lines are skipped)."""
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("eps,"):
                continue
            parts = line.split(",")
            records.append(LifespanRecord(
                eps=float(parts[0]),
                T=float(parts[1]) if parts[1] else None,
                status=parts[2],
                sensitivity=float(parts[3]) if parts[3] else math.inf,
                refinement_spread=float(parts[4]) if parts[4] else math.inf,
                t_searched=float(parts[5]),
                doublings=int(parts[6])))
    return records


def write_exponents_csv(path: str, reports: Sequence[ExponentReport]) -> str:
    lines = ["# critical exponents and scaling exponents",
             "# columns: kind = formula family (strauss/glassey root, slow-decay 1+2/alpha, "
             "shifted quadratic root, lifespan kappa); value = the exponent; unbounded = "
             "every p > 1 qualifies; inputs = semicolon list of arguments; note = free text",
             "kind,value,unbounded,inputs,note"]
    for rep in reports:
        inputs = ";".join(f"{k}={_fmt(v)}" for k, v in sorted(rep.inputs.items()))
        lines.append(",".join([rep.kind, _fmt(rep.value), str(rep.unbounded),
                               inputs, rep.note.replace(",", ";")]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _new_axes(xlabel: str, ylabel: str, title: str):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    return fig, ax


def _save(fig, path: str) -> str:
    fig.tight_layout()
    meta = {"Date": None} if path.endswith(".svg") else None
    fig.savefig(path, metadata=meta)
    plt.close(fig)
    return path


def fig_scaling(path: str, records: Sequence[LifespanRecord],
                fit: Optional[ScalingFit] = None,
                bound: Optional[TheoryBound] = None) -> str:
    """Log-log lifespan scatter with the fitted power law and the theory bound."""
    fig, ax = _new_axes("data size eps", "lifespan T", "lifespan scaling")
    confirmed = [rec for rec in records if rec.status == "blowup" and rec.T is not None]
    other = [rec for rec in records if rec.status != "blowup"]
    if confirmed:
        ax.loglog([rec.eps for rec in confirmed], [rec.T for rec in confirmed],
                  "o", color="tab:blue", label="measured T")
    if other:
        ax.loglog([rec.eps for rec in other], [rec.t_searched for rec in other],
                  "x", color="tab:gray", label="no verdict (searched to)")
    if confirmed:
        eps_line = np.geomspace(min(rec.eps for rec in confirmed),
                                max(rec.eps for rec in confirmed), 64)
        if fit is not None:
            ax.loglog(eps_line, [fit.predict_T(e) for e in eps_line], "-",
                      color="tab:orange",
                      label=f"fit: T ~ eps^{fit.slope:.3f}")
        if bound is not None:
            ax.loglog(eps_line, [bound.predict_T(e) for e in eps_line], "--",
                      color="tab:red",
                      label=f"bound: C eps^(-{bound.kappa:.3f})")
    ax.legend()
    return _save(fig, path)


def fig_monitor(path: str, monitor_times: np.ndarray, monitor_values: np.ndarray,
                theta: Optional[float] = None, title: str = "amplitude monitor") -> str:
    """Semilog growth of max |v| against time, with the detection thresholds."""
    fig, ax = _new_axes("t", "max |v|", title)
    pos = np.asarray(monitor_values) > 0
    ax.semilogy(np.asarray(monitor_times)[pos], np.asarray(monitor_values)[pos],
                "-", color="tab:blue")
    if theta is not None:
        ax.axhline(theta, color="tab:red", linestyle="--", label="theta")
        ax.axhline(10.0 * theta, color="tab:orange", linestyle=":", label="10 theta")
        ax.legend()
    return _save(fig, path)


def fig_interaction(path: str, t_vals: Sequence[float], phi_vals: Sequence[float],
                    title: str = "interaction functional") -> str:
    fig, ax = _new_axes("t", "phi(t)", title)
    ax.semilogx(t_vals, phi_vals, "-", color="tab:blue")
    ax.axhline(0.0, color="k", linewidth=0.8)
    return _save(fig, path)


def fig_envelopes(path: str, profile: dict,
                  title: str = "iteration envelopes on r = (1+sigma) t") -> str:
    """Log-envelope curves for each iterate k, plus the limiting exponent J."""
    fig, ax = _new_axes("t", "log envelope / J", title)
    t = profile["t"]
    for k, vals in sorted(profile["log_env"].items()):
        ax.semilogx(t, vals, "-", label=f"k={k}")
    ax.semilogx(t, profile["J"], "k--", label="J")
    ax.axhline(0.0, color="k", linewidth=0.8)
    ax.legend(fontsize=8)
    return _save(fig, path)


def fig_snapshots(path: str, grid, n_profiles: int = 6,
                  title: str = "radial profiles") -> str:
    """A handful of stored u(r) slices, evenly spread over the run."""
    fig, ax = _new_axes("r", "u", title)
    idx = np.unique(np.linspace(0, len(grid.times) - 1,
                                min(n_profiles, len(grid.times))).astype(int))
    for i in idx:
        ax.plot(grid.r, grid.values[i], label=f"t={grid.times[i]:.3g}")
    ax.legend(fontsize=8)
    return _save(fig, path)
