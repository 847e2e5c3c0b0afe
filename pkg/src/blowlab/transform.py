"""Perturbed derivative operators and the exponential change of unknown.

The perturbed derivatives act as D_t f = f_t + A0(t) f in time and, through
the radial potential U, turn the Laplacian into

    D_Lap f = f_rr + ((n-1)/r) f_r + 2 U' f_r + (U'' + ((n-1)/r) U' + U'^2) f.

Setting u = e^{G(t)} e^{U(r)} v intertwines the two pictures:

    u_tt - Lap u = e^{G+U} (D_tt v - D_Lap v),

and e^{-G-U} d_t^j u equals the perturbed time derivative D_t^j v, so the two
residual evaluators below agree up to the factor e^{G+U}. Residuals are built
from second-order centered differences on uniform grids.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .grids import SolutionGrid
from .model import PerturbationField, ProblemSpec, _as_vectorized


class RadialOperatorSet:
    """Pointwise perturbed operators for one field in dimension n.

    Derivative arrays are supplied by the caller (analytic for manufactured
    solutions, centered differences for numerical grids); the operators only
    add the field-dependent lower-order terms.
    """

    def __init__(self, field: PerturbationField, n: int):
        if n < 2:
            raise ValueError(f"dimension n must be >= 2, got {n}")
        self.field = field
        self.n = n
        self._a0 = _as_vectorized(field.a0)
        self._u_prime = _as_vectorized(field.u_prime)
        if field.a0_prime is not None:
            self._a0_prime = _as_vectorized(field.a0_prime)
        else:
            def fd_a0(t):
                # one-sided near t=0 so the stencil stays inside the domain
                t = np.asarray(t, dtype=float)
                h = 1e-6 * np.maximum(1.0, np.abs(t))
                lo = np.maximum(t - h, 0.0)
                return (self._a0(t + h) - self._a0(lo)) / (t + h - lo)
            self._a0_prime = fd_a0
        if field.u_second is not None:
            self._u_second = _as_vectorized(field.u_second)
        else:
            def fd_u2(r):
                r = np.asarray(r, dtype=float)
                h = 1e-6 * np.maximum(1.0, np.abs(r))
                lo = np.maximum(r - h, 0.0)
                return (self._u_prime(r + h) - self._u_prime(lo)) / (r + h - lo)
            self._u_second = fd_u2

    def a0(self, t):
        return self._a0(t)

    def a0_prime(self, t):
        return self._a0_prime(t)

    def u_prime(self, r):
        return self._u_prime(r)

    def u_second(self, r):
        return self._u_second(r)

    def tilde_dt(self, f, f_t, t):
        """D_t f = f_t + A0(t) f."""
        return f_t + self._a0(t) * f

    def tilde_dtt(self, f, f_t, f_tt, t):
        """D_tt f = f_tt + A0' f + 2 A0 f_t + A0^2 f."""
        a0 = self._a0(t)
        return f_tt + self._a0_prime(t) * f + 2.0 * a0 * f_t + a0 * a0 * f

    def tilde_laplacian_radial(self, f, f_r, f_rr, r):
        """Perturbed radial Laplacian; requires r > 0."""
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0.0):
            raise ValueError("perturbed radial Laplacian needs r > 0 (regularize r=0 separately)")
        up = self._u_prime(r)
        geo = (self.n - 1.0) / r
        return f_rr + geo * f_r + 2.0 * up * f_r + (self._u_second(r) + geo * up + up * up) * f


# ============================================================
# Change of unknown
# ============================================================

def _log_weight(field: PerturbationField, times: np.ndarray, r: np.ndarray) -> np.ndarray:
    from .model import eval_G
    if field.g is not None:
        g_vals = np.asarray(field.g(times), dtype=float)
    else:
        g_vals = np.array([eval_G(field, float(t)) for t in times])
    u_vals = np.asarray(_as_vectorized(field.u)(r), dtype=float)
    return g_vals[:, None] + u_vals[None, :]


def to_u(v_grid: SolutionGrid, field: PerturbationField) -> SolutionGrid:
    """Pointwise u = e^{G(t)} e^{U(r)} v.

    When the weight exponent exceeds the double-precision range (|G+U| > 700)
    the result switches to log-sign encoding instead of overflowing.
    """
    if v_grid.encoding != "linear":
        raise ValueError("to_u expects a linear-encoded v grid")
    w = _log_weight(field, v_grid.times, v_grid.r)
    meta = dict(v_grid.meta)
    if float(np.max(np.abs(w))) > 700.0:
        with np.errstate(divide="ignore"):
            logmag = w + np.log(np.abs(v_grid.values))
        meta["transformed"] = "log-sign"
        return SolutionGrid(times=v_grid.times.copy(), r=v_grid.r.copy(),
                            values=logmag, dt=v_grid.dt, dr=v_grid.dr,
                            r_max=v_grid.r_max, meta=meta, encoding="log-sign",
                            signs=np.sign(v_grid.values))
    return SolutionGrid(times=v_grid.times.copy(), r=v_grid.r.copy(),
                        values=np.exp(w) * v_grid.values, dt=v_grid.dt, dr=v_grid.dr,
                        r_max=v_grid.r_max, meta=meta, encoding="linear")


def to_v(u_grid: SolutionGrid, field: PerturbationField) -> SolutionGrid:
    """Inverse change of unknown v = e^{-G-U} u (handles both encodings)."""
    w = _log_weight(field, u_grid.times, u_grid.r)
    meta = dict(u_grid.meta)
    if u_grid.encoding == "log-sign":
        values = u_grid.signs * np.exp(u_grid.values - w)
    else:
        if float(np.max(np.abs(w))) > 700.0:
            with np.errstate(divide="ignore"):
                logmag = np.log(np.abs(u_grid.values)) - w
            return SolutionGrid(times=u_grid.times.copy(), r=u_grid.r.copy(),
                                values=logmag, dt=u_grid.dt, dr=u_grid.dr,
                                r_max=u_grid.r_max, meta=meta, encoding="log-sign",
                                signs=np.sign(u_grid.values))
        values = np.exp(-w) * u_grid.values
    return SolutionGrid(times=u_grid.times.copy(), r=u_grid.r.copy(),
                        values=values, dt=u_grid.dt, dr=u_grid.dr,
                        r_max=u_grid.r_max, meta=meta, encoding="linear")


# ============================================================
# Initial data mapping
# ============================================================

def data_velocity_v(spec: ProblemSpec, r) -> np.ndarray:
    """v_t(0, r) = eps * v1(r)."""
    return spec.eps * np.asarray(spec.field.data(r), dtype=float)


def data_velocity_u(spec: ProblemSpec, r) -> np.ndarray:
    """u_t(0, r) = eps * e^{U(r)} * v1(r) (u(0) = 0 kills the G-weight's time slope)."""
    u_vals = np.asarray(_as_vectorized(spec.field.u)(r), dtype=float)
    return np.exp(u_vals) * data_velocity_v(spec, r)


# ============================================================
# Residual evaluators
# ============================================================

def _centered_time(values: np.ndarray, dt: float) -> tuple:
    f_t = (values[2:, :] - values[:-2, :]) / (2.0 * dt)
    f_tt = (values[2:, :] - 2.0 * values[1:-1, :] + values[:-2, :]) / (dt * dt)
    return f_t, f_tt

def _centered_space(values: np.ndarray, dr: float) -> tuple:
    f_r = (values[:, 2:] - values[:, :-2]) / (2.0 * dr)
    f_rr = (values[:, 2:] - 2.0 * values[:, 1:-1] + values[:, :-2]) / (dr * dr)
    return f_r, f_rr


def _check_interior(grid: SolutionGrid) -> None:
    if len(grid.times) < 7 or len(grid.r) < 7:
        raise ValueError("residual evaluation needs at least 5 interior points per direction")
    dts = np.diff(grid.times)
    if np.max(np.abs(dts - dts[0])) > 1e-9 * max(abs(dts[0]), 1e-300):
        raise ValueError("residual evaluation needs uniformly spaced stored slices")


def _nonlinearity_value(field: PerturbationField, p: float, s: np.ndarray) -> np.ndarray:
    if field.nonlinearity == "power":
        return np.abs(s) ** p
    if field.nonlinearity == "none":
        return np.zeros_like(s)
    return np.asarray(field.nonlinearity(s), dtype=float)


def residual_classical(u_grid: SolutionGrid, spec: ProblemSpec) -> tuple:
    """(t_interior, r_interior, residual) of the untransformed equation.

    residual = u_tt - u_rr - ((n-1)/r) u_r - h u - e^{G+U} F(e^{-G-U} d_t^j u),
    centered second-order differences at interior nodes (r = 0 excluded).
    """
    _check_interior(u_grid)
    if u_grid.encoding != "linear":
        raise ValueError("residual evaluation needs a linear-encoded grid")
    dt = float(u_grid.times[1] - u_grid.times[0])
    dr = float(u_grid.r[1] - u_grid.r[0])
    t_int = u_grid.times[1:-1]
    r_int = u_grid.r[1:-1]
    u = u_grid.values
    u_t, u_tt = _centered_time(u, dt)
    u_r, u_rr = _centered_space(u, dr)
    u_t, u_tt = u_t[:, 1:-1], u_tt[:, 1:-1]
    u_r, u_rr = u_r[1:-1, :], u_rr[1:-1, :]
    core = u[1:-1, 1:-1]
    if np.any(r_int <= 0.0):
        raise ValueError("interior radii must be positive; include the r=0 node only at the edge")
    field = spec.field
    w = _log_weight(field, t_int, r_int)
    h_vals = np.asarray(field.h(t_int[:, None], r_int[None, :]), dtype=float)
    d_arg = core if spec.j == 0 else u_t
    forcing = np.exp(w) * _nonlinearity_value(field, spec.p, np.exp(-w) * d_arg)
    lhs = u_tt - u_rr - ((spec.n - 1.0) / r_int)[None, :] * u_r
    return t_int, r_int, lhs - h_vals * core - forcing


def residual_perturbed(v_grid: SolutionGrid, spec: ProblemSpec) -> tuple:
    """(t_interior, r_interior, residual) of the transformed equation.

    residual = D_tt v - D_Lap v - h v - F(D_t^j v) with the perturbed operators.
    """
    _check_interior(v_grid)
    if v_grid.encoding != "linear":
        raise ValueError("residual evaluation needs a linear-encoded grid")
    dt = float(v_grid.times[1] - v_grid.times[0])
    dr = float(v_grid.r[1] - v_grid.r[0])
    t_int = v_grid.times[1:-1]
    r_int = v_grid.r[1:-1]
    v = v_grid.values
    v_t, v_tt = _centered_time(v, dt)
    v_r, v_rr = _centered_space(v, dr)
    v_t, v_tt = v_t[:, 1:-1], v_tt[:, 1:-1]
    v_r, v_rr = v_r[1:-1, :], v_rr[1:-1, :]
    core = v[1:-1, 1:-1]
    ops = RadialOperatorSet(spec.field, spec.n)
    t_col = t_int[:, None]
    lhs = (ops.tilde_dtt(core, v_t, v_tt, t_col)
           - ops.tilde_laplacian_radial(core, v_r, v_rr, r_int[None, :]))
    h_vals = np.asarray(spec.field.h(t_col, r_int[None, :]), dtype=float)
    d_arg = core if spec.j == 0 else ops.tilde_dt(core, v_t, t_col)
    return t_int, r_int, lhs - h_vals * core - _nonlinearity_value(spec.field, spec.p, d_arg)


def shape_identity_check(beta: Callable, f: Callable, t_grid: np.ndarray,
                         a0: Optional[Callable] = None) -> float:
    """Max deviation of D_t(beta f) from beta f' when A0 = -beta'/beta.

    With that A0 the perturbed time derivative strips the shape beta off:
    D_t(beta f) = beta f'. beta' defaults to centered differences on t_grid.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) < 5:
        raise ValueError("need at least 5 grid points")
    dt = float(t_grid[1] - t_grid[0])
    b = np.asarray(_as_vectorized(beta)(t_grid), dtype=float)
    if np.any(np.abs(b) < 1e-300):
        raise ValueError("beta vanishes on the grid; A0 = -beta'/beta is undefined there")
    fv = np.asarray(_as_vectorized(f)(t_grid), dtype=float)
    g = b * fv
    g_t = (g[2:] - g[:-2]) / (2.0 * dt)
    f_t = (fv[2:] - fv[:-2]) / (2.0 * dt)
    if a0 is not None:
        a0_vals = np.asarray(_as_vectorized(a0)(t_grid[1:-1]), dtype=float)
    else:
        b_t = (b[2:] - b[:-2]) / (2.0 * dt)
        a0_vals = -b_t / b[1:-1]
    dev = g_t + a0_vals * g[1:-1] - b[1:-1] * f_t
    return float(np.max(np.abs(dev)))
