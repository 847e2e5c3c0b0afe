"""Blow-up criterion functionals and the field taxonomy.

The divergence criterion combines logarithmic time growth against the worst
of the time weight G and the spread of the potential U over the moving window
[sigma_n t, (2+sigma_n) t]:

    phi(t) = ((2-j)/(p-1) - alpha) log t - max_{[0,t]} G
             + (1/p) min_window U - max_window U.

phi(t) -> +infinity forces blow-up. The pointwise J functional is the
exponent multiplying p^k in the final iteration estimate; J > 0 at a single
admissible (t, r) forces blow-up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import exponents as expo
from .iteration import IterationParams
from .model import AsymptoticProfile, PerturbationField, ProblemSpec, eval_G


@dataclass(frozen=True)
class BlowupRegion:
    """Exterior region r - t >= max(sigma_n t, delta) where the iteration lives."""
    sigma_n: float = 0.5
    delta: float = 0.1

    def __post_init__(self) -> None:
        if not (0.0 < self.sigma_n <= 1.0):
            raise ValueError(
                f"sigma_n must lie in (0, 1] (the admissible window is the interval (0, 1)), "
                f"got {self.sigma_n}")
        if self.delta <= 0.0:
            raise ValueError(f"delta must be positive, got {self.delta}")

    def contains(self, t, r):
        t = np.asarray(t, dtype=float)
        r = np.asarray(r, dtype=float)
        edge = np.maximum(self.sigma_n * t, self.delta)
        # relative slack so points on the edge ray r = (1+sigma_n) t are not
        # rejected by one rounding ulp of r - t
        out = r - t >= edge * (1.0 - 1e-12)
        return bool(out) if out.ndim == 0 else out

    def t_min_on_line(self) -> float:
        # on r = (1+sigma_n) t membership starts where sigma_n t reaches delta
        return self.delta / self.sigma_n


def _interval_extrema(field: PerturbationField, lo: float, hi: float,
                      n_samples: int = 512) -> tuple:
    """(min, max) of U over [lo, hi]; endpoint evaluation for monotone U,
    dense sampling with one bracket refinement otherwise."""
    if hi < lo:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    if lo == hi:
        v = float(field.u(lo))
        return (v, v)
    if field.u_trend > 0:
        return (float(field.u(lo)), float(field.u(hi)))
    if field.u_trend < 0:
        return (float(field.u(hi)), float(field.u(lo)))
    xs = np.linspace(lo, hi, n_samples)
    vals = np.asarray(field.u(xs), dtype=float)
    lo_v, hi_v = float(np.min(vals)), float(np.max(vals))
    # one refinement pass around each extremum bracket
    for picker, current in ((np.argmin, "min"), (np.argmax, "max")):
        i = int(picker(vals))
        a = xs[max(i - 1, 0)]
        b = xs[min(i + 1, len(xs) - 1)]
        fine = np.asarray(field.u(np.linspace(a, b, n_samples)), dtype=float)
        if current == "min":
            lo_v = min(lo_v, float(np.min(fine)))
        else:
            hi_v = max(hi_v, float(np.max(fine)))
    return (lo_v, hi_v)


class ExtremalEnvelope:
    """Interval extrema of U over backward cones and the running max of G.

    u_min(t, r) / u_max(t, r) extremize U over [max(r-t, 0), r+t];
    g_max(t) is the max of G over [0, t] (equal to G(t) when A0 >= 0).
    Instances are immutable and safe to share between workers.
    """

    def __init__(self, field: PerturbationField, n_samples: int = 512):
        self._field = field
        self._n = n_samples

    @property
    def field(self) -> PerturbationField:
        return self._field

    def u_min(self, t: float, r: float) -> float:
        return _interval_extrema(self._field, max(r - t, 0.0), r + t, self._n)[0]

    def u_max(self, t: float, r: float) -> float:
        return _interval_extrema(self._field, max(r - t, 0.0), r + t, self._n)[1]

    def g_max(self, t: float) -> float:
        if t < 0.0:
            raise ValueError(f"t must be >= 0, got {t}")
        if t == 0.0:
            return 0.0
        if self._field.a0_nonneg:
            return eval_G(self._field, t)
        ts = np.linspace(0.0, t, self._n)
        if self._field.g is not None:
            vals = np.asarray(self._field.g(ts), dtype=float)
        else:
            vals = np.array([eval_G(self._field, float(s)) for s in ts])
        i = int(np.argmax(vals))
        a, b = ts[max(i - 1, 0)], ts[min(i + 1, len(ts) - 1)]
        if self._field.g is not None:
            fine = np.asarray(self._field.g(np.linspace(a, b, self._n)), dtype=float)
        else:
            fine = np.array([eval_G(self._field, float(s)) for s in np.linspace(a, b, 65)])
        return float(max(np.max(vals), np.max(fine)))


def phi(t: float, spec: ProblemSpec, region: BlowupRegion) -> float:
    """Interaction functional on the moving window [sigma_n t, (2+sigma_n) t]."""
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t}")
    p, j = spec.p, spec.j
    alpha = spec.field.data.alpha
    env = ExtremalEnvelope(spec.field)
    lo, hi = region.sigma_n * t, (2.0 + region.sigma_n) * t
    u_min_w, u_max_w = _interval_extrema(spec.field, lo, hi)
    return (((2.0 - j) / (p - 1.0) - alpha) * math.log(t)
            - env.g_max(t) + u_min_w / p - u_max_w)


def phi_wide_window(t: float, spec: ProblemSpec) -> float:
    """Variant of phi extremizing U over the full [0, 3t] window (sigma_n = 1
    on the max side, widened to 0 on the min side); lower-bounds phi at sigma_n = 1."""
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t}")
    p, j = spec.p, spec.j
    alpha = spec.field.data.alpha
    env = ExtremalEnvelope(spec.field)
    u_min_w, u_max_w = _interval_extrema(spec.field, 0.0, 3.0 * t)
    return (((2.0 - j) / (p - 1.0) - alpha) * math.log(t)
            - env.g_max(t) + u_min_w / p - u_max_w)


@dataclass(frozen=True)
class DivergenceEvidence:
    """Outcome of the finite-horizon divergence test on phi.

    diverges requires both checks: phi increases across the last n_decades
    decade marks before the horizon, and its least-squares slope against
    log t over those decades exceeds slope_margin. The asymptotic value of
    that slope is exponents.blowup_range_margin, so inside the blow-up range
    the test passes once the horizon is large enough, and outside it fails.
    """
    diverges: bool
    slope: float
    increasing: bool
    horizon: float
    slope_margin: float
    phi_start: float
    phi_end: float


def divergence_evidence(spec: ProblemSpec, region: BlowupRegion,
                        horizon: float = 1e6, n_decades: int = 3,
                        per_decade: int = 8,
                        slope_margin: float = 0.01) -> DivergenceEvidence:
    """Finite-horizon test of phi(t) -> +infinity over the last decades."""
    if horizon <= 10.0 ** n_decades:
        raise ValueError(f"horizon must exceed 10^{n_decades}, got {horizon}")
    ts = np.geomspace(horizon / 10.0 ** n_decades, horizon,
                      n_decades * per_decade + 1)
    vals = np.array([phi(float(t), spec, region) for t in ts])
    marks = vals[::per_decade]  # the decade boundaries
    increasing = bool(np.all(np.diff(marks) > 0.0))
    slope = float(np.polyfit(np.log(ts), vals, 1)[0])
    return DivergenceEvidence(diverges=increasing and slope > slope_margin,
                              slope=slope, increasing=increasing,
                              horizon=horizon, slope_margin=slope_margin,
                              phi_start=float(vals[0]), phi_end=float(vals[-1]))


@dataclass(frozen=True)
class TaxonomyRecord:
    regime: str                      # see classify
    critical: Optional[expo.ExponentReport]
    all_p: bool = False              # every p > 1 blows up
    no_conclusion: bool = False      # criterion can never be satisfied
    notes: str = ""


def classify(profile: AsymptoticProfile, alpha: float, j: int) -> TaxonomyRecord:
    """Sort an asymptotic profile into the criterion taxonomy.

    Regimes: unclassified (indeterminate estimate); potential_grows_superlog
    (ell = +inf: the window max of U defeats the criterion, no blow-up
    conclusion); potential_falls_superlog (ell = -inf: every p > 1, provided
    the potential is slowly varying so both window endpoints share the same
    leading term); time_shift_only (ell = 0: critical 1 + (2-j)/(alpha+gamma));
    log_potential_shift (finite ell != 0: root of the shifted quadratic).
    """
    if j not in (0, 1):
        raise ValueError(f"nonlinearity index j must be 0 or 1, got {j}")
    if profile.indeterminate:
        return TaxonomyRecord(regime="unclassified", critical=None,
                              notes=f"asymptotics indeterminate: {profile.notes}")
    g = profile.gamma
    ell = profile.ell
    if math.isinf(ell) and ell > 0:
        return TaxonomyRecord(
            regime="potential_grows_superlog", critical=None, no_conclusion=True,
            notes="window max of U grows faster than every log multiple; "
                  "the divergence condition can never hold")
    if math.isinf(ell) and ell < 0:
        report = expo.ExponentReport(
            value=math.inf, kind="shifted_quadratic",
            inputs={"alpha": alpha, "gamma": g, "ell": ell, "j": j},
            unbounded=True, note="super-logarithmic decay of U: every p > 1")
        return TaxonomyRecord(
            regime="potential_falls_superlog", critical=report, all_p=True,
            notes="requires A0 >= 0 and (A0 integrable or gamma >= 0), and a slowly "
                  "varying potential so the whole window shares the decay rate")
    if ell == 0.0:
        report = expo.shifted_critical(alpha, g, 0.0, j)
        note = ("no effective perturbation: reduces to the unperturbed critical power"
                if g == 0.0 else "only the time perturbation shifts the exponent")
        return TaxonomyRecord(regime="time_shift_only", critical=report,
                              all_p=report.unbounded, notes=note)
    report = expo.shifted_critical(alpha, g, ell, j)
    return TaxonomyRecord(regime="log_potential_shift", critical=report,
                          all_p=report.unbounded)


def J_functional(t: float, r: float, spec: ProblemSpec, params: IterationParams,
                 envelopes: Optional[ExtremalEnvelope] = None) -> float:
    """Exponent multiplying p^k in the final iteration estimate.

    J = log C0 - S_{p,K} + (m+1+(2-j)/(p-1)) log t - (alpha+1+m) log(r+t)
        + (1/p) min_cone U - max_[0,t] G - max_cone U.
    """
    if t <= 0.0:
        raise ValueError(f"t must be positive, got {t}")
    region = BlowupRegion(sigma_n=params.sigma_n, delta=params.delta)
    if not region.contains(t, r):
        raise ValueError(f"(t={t}, r={r}) is outside the exterior region")
    if envelopes is None:
        envelopes = ExtremalEnvelope(spec.field)
    p, j, m = spec.p, spec.j, spec.m
    alpha = params.alpha
    return (math.log(params.C0) - params.S_pK
            + (m + 1.0 + (2.0 - j) / (p - 1.0)) * math.log(t)
            - (alpha + 1.0 + m) * math.log(r + t)
            + envelopes.u_min(t, r) / p
            - envelopes.g_max(t)
            - envelopes.u_max(t, r))


def first_positive_time(spec: ProblemSpec, params: IterationParams,
                        region: BlowupRegion, horizon: float,
                        n_grid: int = 400, rel_tol: float = 1e-6) -> Optional[float]:
    """Smallest t <= horizon with J(t, (1+sigma_n) t) > 0, bisection-refined; None if absent."""
    if horizon <= 1.0:
        raise ValueError(f"horizon must exceed 1, got {horizon}")
    env = ExtremalEnvelope(spec.field)
    line = 1.0 + region.sigma_n

    def j_line(t: float) -> float:
        return J_functional(t, line * t, spec, params, envelopes=env)

    t_lo = region.t_min_on_line() * (1.0 + 1e-12)
    if t_lo >= horizon:
        return None
    ts = np.geomspace(t_lo, horizon, n_grid)
    prev = ts[0]
    if j_line(prev) > 0.0:
        return float(prev)
    for t in ts[1:]:
        if j_line(float(t)) > 0.0:
            a, b = float(prev), float(t)
            while (b - a) > rel_tol * b:
                mid = 0.5 * (a + b)
                if j_line(mid) > 0.0:
                    b = mid
                else:
                    a = mid
            return b
        prev = t
    return None
