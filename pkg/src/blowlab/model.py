"""Problem instances: perturbation fields, data profiles, and the example catalog.

A PerturbationField packages the time perturbation A0 (with antiderivative G,
G(0) = 0), the radial potential U generating the spatial perturbation through
its gradient, the linear weight h >= 0, the nonlinearity F, and the data
profile bounding v1 from below by M (1+r)^(-alpha-1).

Everything is immutable after construction and safe to evaluate concurrently.
Catalog members carry closed-form G, U, U', U'' and closed-form asymptotics
(gamma = lim s A0(s), ell = lim U(xi)/log xi); custom fields fall back to
quadrature for G and to numerical asymptotics estimation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

import numpy as np


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


def _as_vectorized(f: Callable) -> Callable:
    """Wrap a scalar-only callable so it also accepts numpy arrays."""

    def wrapped(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            return float(f(float(x)))
        try:
            out = np.asarray(f(x), dtype=float)
            if out.shape == x.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([f(float(xi)) for xi in x.ravel()]).reshape(x.shape)

    return wrapped


# ============================================================
# Domain types
# ============================================================

@dataclass(frozen=True)
class AsymptoticProfile:
    """Large-argument behaviour of a field: gamma = lim s A0(s), ell = lim U/log.

    ell may be +-inf (explicit signed-infinity, kept distinct from large finite
    values because the criterion treats those regimes separately). Numerical
    estimates carry spread diagnostics from the sampling tail; `indeterminate`
    marks oscillation that defeated the estimator.
    """
    gamma: float
    ell: float
    source: str = "closed-form"          # closed-form | numerically-estimated
    gamma_spread: Optional[float] = None
    ell_spread: Optional[float] = None
    indeterminate: bool = False
    notes: str = ""

    def __post_init__(self) -> None:
        if self.source not in ("closed-form", "numerically-estimated"):
            raise ValueError(f"unknown asymptotics source {self.source!r}")
        if math.isinf(self.gamma):
            raise ValueError("gamma must be finite (or the profile indeterminate)")


@dataclass(frozen=True)
class DataProfile:
    """Initial velocity profile v1 with v1(r) >= M (1+r)^(-alpha-1).

    When `profile` is given it overrides the reference shape but must stay
    above the bound; only the lower bound enters the theory, so the check is
    done once here, on a fixed sample grid.
    """
    M: float = 1.0
    alpha: float = 1.0
    profile: Optional[Callable] = None

    def __post_init__(self) -> None:
        if self.M <= 0.0:
            raise ValueError(f"data amplitude M must be positive, got {self.M}")
        if self.alpha <= -1.0:
            raise ValueError(f"data decay alpha must exceed -1, got {self.alpha}")
        if self.profile is not None:
            prof = _as_vectorized(self.profile)
            r = np.concatenate(([0.0], np.geomspace(1e-3, 1e3, 61)))
            lower = self.M * (1.0 + r) ** (-self.alpha - 1.0)
            vals = prof(r)
            if np.any(vals < lower * (1.0 - 1e-12)):
                bad = r[np.argmax(vals < lower)]
                raise ValueError(
                    f"override profile dips below M(1+r)^(-alpha-1) near r={bad:.4g}")

    def __call__(self, r):
        if self.profile is not None:
            return _as_vectorized(self.profile)(r)
        r = np.asarray(r, dtype=float)
        out = self.M * (1.0 + r) ** (-self.alpha - 1.0)
        return float(out) if out.ndim == 0 else out


def _zero_tr(t, r):
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    return np.zeros(np.broadcast(t, r).shape) if (t.ndim or r.ndim) else 0.0


@dataclass(frozen=True)
class PerturbationField:
    """One problem instance's perturbation data.

    a0, u, u_prime must accept scalars and numpy arrays. g is the closed-form
    antiderivative of a0 when available (eval_G falls back to quadrature).
    nonlinearity is "power" for F(s) = |s|^p, "none" for the linear problem,
    or a callable F(s) that must dominate |s|^p on sampled arguments.
    u_trend records monotonicity of U (+1 nondecreasing, -1 nonincreasing,
    0 unknown): the criterion module uses it to take interval extrema at
    endpoints instead of by sampling.
    """
    name: str = "custom"
    params: tuple = ()
    a0: Callable = lambda t: np.zeros_like(np.asarray(t, dtype=float))
    a0_prime: Optional[Callable] = None
    u: Callable = lambda r: np.zeros_like(np.asarray(r, dtype=float))
    u_prime: Callable = lambda r: np.zeros_like(np.asarray(r, dtype=float))
    u_second: Optional[Callable] = None
    g: Optional[Callable] = None
    h: Callable = _zero_tr
    nonlinearity: object = "power"       # "power" | "none" | callable F(s)
    data: DataProfile = dc_field(default_factory=DataProfile)
    asymptotics: Optional[AsymptoticProfile] = None
    u_trend: int = 0
    a0_nonneg: bool = False              # guarantees max of G over [0,t] is G(t)
    tabulated: bool = False

    def __post_init__(self) -> None:
        if self.nonlinearity not in ("power", "none") and not callable(self.nonlinearity):
            raise ValueError("nonlinearity must be 'power', 'none', or a callable")
        if self.u_trend not in (-1, 0, 1):
            raise ValueError("u_trend must be -1, 0, or +1")


@dataclass(frozen=True)
class ProblemSpec:
    """Full problem: dimension, power, nonlinearity index, data size, field."""
    n: int
    p: float
    j: int
    eps: float
    field: PerturbationField

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension n must be an integer >= 2, got {self.n}")
        if self.p <= 1.0:
            raise ValueError(f"power p must exceed 1, got {self.p}")
        if self.j not in (0, 1):
            raise ValueError(f"nonlinearity index j must be 0 or 1, got {self.j}")
        if self.eps <= 0.0:
            raise ValueError(f"data size eps must be positive, got {self.eps}")

    @property
    def m(self) -> int:
        return self.n // 2


# ============================================================
# Catalog
# ============================================================

def _bracket(r):
    # <r> = sqrt(1 + r^2), the smooth radial weight used by the log-type potentials
    r = np.asarray(r, dtype=float)
    return np.sqrt(1.0 + r * r)


def catalog_field(name: str, params: Sequence[float] = ()) -> PerturbationField:
    """Build a named field with closed-form G, U, U', U'' and asymptotics.

    Members:
      zero                      -- A0 = 0, U = 0
      scale_invariant(mu, eta)  -- A0 = mu/(2(1+t)), U = (eta/2) log<r>; mu >= 0
      bounded_U(beta)           -- A0 = 0, U = <r>^(1-beta)/(1-beta); beta > 1
      integrable_A0(c)          -- A0 = c/(1+t)^2 (integrable), U = 0; c >= 0
      log_growth_U(ell)         -- A0 = 0, U = ell log<r>
      superlog_U(c)             -- A0 = 0, U = c log^2<r>  (ell = sign(c) * inf)
    """
    params = tuple(float(x) for x in params)

    def need(k: int) -> None:
        if len(params) != k:
            raise ValueError(f"catalog field {name!r} takes {k} parameter(s), got {len(params)}")

    if name == "zero":
        need(0)
        return PerturbationField(
            name=name, params=params,
            g=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            a0_prime=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            u_second=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
            asymptotics=AsymptoticProfile(gamma=0.0, ell=0.0),
            u_trend=1, a0_nonneg=True)

    if name == "scale_invariant":
        need(2)
        mu, eta = params
        if mu < 0.0:
            raise ValueError(f"scale_invariant needs mu >= 0 (time perturbation stays nonnegative), got {mu}")
        return PerturbationField(
            name=name, params=params,
            a0=lambda t: mu / (2.0 * (1.0 + np.asarray(t, dtype=float))),
            a0_prime=lambda t: -mu / (2.0 * (1.0 + np.asarray(t, dtype=float)) ** 2),
            g=lambda t: (mu / 2.0) * np.log1p(np.asarray(t, dtype=float)),
            u=lambda r: (eta / 2.0) * np.log(_bracket(r)),
            u_prime=lambda r: (eta / 2.0) * np.asarray(r, dtype=float) / (1.0 + np.asarray(r, dtype=float) ** 2),
            u_second=lambda r: (eta / 2.0) * (1.0 - np.asarray(r, dtype=float) ** 2)
                               / (1.0 + np.asarray(r, dtype=float) ** 2) ** 2,
            asymptotics=AsymptoticProfile(gamma=mu / 2.0, ell=eta / 2.0),
            u_trend=int(np.sign(eta)) if eta != 0.0 else 1,
            a0_nonneg=True)

    if name == "bounded_U":
        need(1)
        beta, = params
        if beta <= 1.0:
            raise ValueError(f"bounded_U needs beta > 1 (U bounded requires integrable gradient), got {beta}")
        return PerturbationField(
            name=name, params=params,
            g=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            a0_prime=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            u=lambda r: _bracket(r) ** (1.0 - beta) / (1.0 - beta),
            u_prime=lambda r: np.asarray(r, dtype=float) * _bracket(r) ** (-beta - 1.0),
            u_second=lambda r: _bracket(r) ** (-beta - 1.0)
                               - (beta + 1.0) * np.asarray(r, dtype=float) ** 2 * _bracket(r) ** (-beta - 3.0),
            asymptotics=AsymptoticProfile(gamma=0.0, ell=0.0),
            u_trend=1, a0_nonneg=True)

    if name == "integrable_A0":
        need(1)
        c, = params
        if c < 0.0:
            raise ValueError(f"integrable_A0 needs c >= 0, got {c}")
        return PerturbationField(
            name=name, params=params,
            a0=lambda t: c / (1.0 + np.asarray(t, dtype=float)) ** 2,
            a0_prime=lambda t: -2.0 * c / (1.0 + np.asarray(t, dtype=float)) ** 3,
            g=lambda t: c * np.asarray(t, dtype=float) / (1.0 + np.asarray(t, dtype=float)),
            u_second=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
            asymptotics=AsymptoticProfile(gamma=0.0, ell=0.0),
            u_trend=1, a0_nonneg=True)

    if name == "log_growth_U":
        need(1)
        ell, = params
        return PerturbationField(
            name=name, params=params,
            g=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            a0_prime=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            u=lambda r: ell * np.log(_bracket(r)),
            u_prime=lambda r: ell * np.asarray(r, dtype=float) / (1.0 + np.asarray(r, dtype=float) ** 2),
            u_second=lambda r: ell * (1.0 - np.asarray(r, dtype=float) ** 2)
                               / (1.0 + np.asarray(r, dtype=float) ** 2) ** 2,
            asymptotics=AsymptoticProfile(gamma=0.0, ell=ell),
            u_trend=int(np.sign(ell)) if ell != 0.0 else 1,
            a0_nonneg=True)

    if name == "superlog_U":
        need(1)
        c, = params

        def u_second(r):
            r = np.asarray(r, dtype=float)
            w = 1.0 + r * r
            return 2.0 * c * (r * r / w ** 2 + np.log(np.sqrt(w)) * (1.0 - r * r) / w ** 2)

        return PerturbationField(
            name=name, params=params,
            g=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            a0_prime=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            u=lambda r: c * np.log(_bracket(r)) ** 2,
            u_prime=lambda r: 2.0 * c * np.log(_bracket(r)) * np.asarray(r, dtype=float)
                              / (1.0 + np.asarray(r, dtype=float) ** 2),
            u_second=u_second,
            asymptotics=AsymptoticProfile(gamma=0.0,
                                          ell=math.copysign(math.inf, c) if c != 0.0 else 0.0),
            u_trend=int(np.sign(c)) if c != 0.0 else 1,
            a0_nonneg=True)

    raise ValueError(f"unknown catalog field {name!r}")


# ============================================================
# G by quadrature
# ============================================================

def _adaptive_simpson(f: Callable, a: float, b: float, tol: float, max_depth: int = 60) -> float:
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        err = (left + right - whole) / 15.0
        if abs(err) <= tol:
            return left + right + err
        if depth >= max_depth:
            raise QuadratureError(
                f"adaptive Simpson hit depth {max_depth} on [{a:.6g}, {b:.6g}]; A0 looks pathological")
        return (recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
                + recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1))

    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return recurse(a, b, fa, fm, fb, whole, tol, 0)


def eval_G(field: PerturbationField, t: float, abs_tol: float = 1e-10,
           force_quadrature: bool = False) -> float:
    """G(t) = integral of A0 over [0, t], with G(0) = 0.

    Uses the field's closed form when present; otherwise adaptive Simpson
    with interval bisection at the given absolute tolerance.
    """
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0.0:
        return 0.0
    if field.g is not None and not force_quadrature:
        return float(field.g(t))
    a0 = _as_vectorized(field.a0)
    return _adaptive_simpson(lambda s: float(a0(s)), 0.0, float(t), abs_tol)


# ============================================================
# Numerical asymptotics
# ============================================================

def estimate_asymptotics(field: PerturbationField, horizon: float,
                         n_points: int = 32, tail: int = 6,
                         cap: float = 100.0, tol: float = 1e-2) -> AsymptoticProfile:
    """Estimate gamma = lim s A0(s) and ell = lim U(xi)/log(xi) on a geometric grid.

    ell is reported as signed infinity when |U/log| exceeds `cap` across the whole
    tail while still growing monotonically with consistent sign. A tail spread
    above `tol` (for a non-capped sequence) yields an indeterminate profile,
    never a silent guess.
    """
    if horizon <= 1000.0:
        raise ValueError(f"horizon must exceed 1e3 so the geometric grid leaves 10 behind, got {horizon}")
    grid = np.geomspace(10.0, horizon, n_points)
    a0 = _as_vectorized(field.a0)
    u = _as_vectorized(field.u)

    gamma_samples = grid * a0(grid)
    ell_samples = u(grid) / np.log(grid)

    notes = []
    indeterminate = False

    g_tail = gamma_samples[-tail:]
    g_spread = float(np.max(g_tail) - np.min(g_tail))
    if np.all(np.abs(g_tail) > cap) and np.all(np.diff(np.abs(g_tail)) > 0.0):
        gamma, indeterminate = 0.0, True
        notes.append("s*A0(s) grows beyond the cap: no finite gamma")
    elif g_spread > tol:
        gamma, indeterminate = 0.0, True
        notes.append(f"gamma tail spread {g_spread:.3g} exceeds tolerance {tol:.3g}")
    else:
        gamma = float(g_tail[-1])

    e_tail = ell_samples[-tail:]
    e_spread = float(np.max(e_tail) - np.min(e_tail))
    signs = np.sign(e_tail)
    if (np.all(np.abs(e_tail) > cap) and np.all(np.diff(np.abs(e_tail)) > 0.0)
            and np.all(signs == signs[-1])):
        ell = math.copysign(math.inf, float(e_tail[-1]))
        notes.append("|U/log| exceeds the cap monotonically: ell flagged as signed infinity")
    elif e_spread > tol:
        ell, indeterminate = 0.0, True
        notes.append(f"ell tail spread {e_spread:.3g} exceeds tolerance {tol:.3g}")
    else:
        ell = float(e_tail[-1])

    return AsymptoticProfile(gamma=gamma, ell=ell, source="numerically-estimated",
                             gamma_spread=g_spread, ell_spread=e_spread,
                             indeterminate=indeterminate, notes="; ".join(notes))


def consistency_violations(field: PerturbationField, p: float,
                           t_max: float = 100.0, r_max: float = 100.0) -> list:
    """Sampled checks of the field contract; returns human-readable violations.

    Checks h >= 0, F(s) >= |s|^p for callable F, v1 >= M(1+r)^(-alpha-1), and
    G' = A0 by centered differences against eval_G.
    """
    bad = []
    t = np.linspace(0.0, t_max, 41)
    r = np.concatenate(([0.0], np.geomspace(1e-2, r_max, 40)))
    hv = field.h(t[:, None], r[None, :])
    if np.any(np.asarray(hv) < 0.0):
        bad.append("h takes negative values on the sample grid")
    if callable(field.nonlinearity):
        s = np.linspace(-5.0, 5.0, 101)
        if np.any(field.nonlinearity(s) < np.abs(s) ** p - 1e-12):
            bad.append("nonlinearity F(s) dips below |s|^p on sampled s")
    lower = field.data.M * (1.0 + r) ** (-field.data.alpha - 1.0)
    if np.any(field.data(r) < lower * (1.0 - 1e-12)):
        bad.append("v1 dips below M(1+r)^(-alpha-1)")
    if eval_G(field, 0.0) != 0.0:
        bad.append("G(0) != 0")
    dt = 1e-4
    for tv in (0.5, 1.0, 7.0, 50.0):
        if tv + dt > t_max:
            continue
        fd = (eval_G(field, tv + dt) - eval_G(field, tv - dt)) / (2.0 * dt)
        if abs(fd - float(_as_vectorized(field.a0)(tv))) > 1e-6:
            bad.append(f"G'(t) != A0(t) at t={tv}")
    return bad
