"""Lifespan-scaling experiments.

Measures numerical lifespans T(eps) over a sweep of data sizes, fits the
power law T ~ eps^(-kappa) on log-log axes, and produces the closed-form
upper-bound constants the measurements are compared against.

Horizons are seeded from theory so the sweep stays cheap: the largest eps is
measured first (serial pilot), then the remaining runs start from the pilot
lifespan scaled by (eps_ref/eps)^kappa and double their horizon whenever the
verdict comes back no_blowup. Runs are independent, so the post-pilot batch
executes on a thread pool (size from BLOWLAB_WORKERS, default cpu count).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from . import exponents as expo
from .criterion import BlowupRegion, ExtremalEnvelope, J_functional
from .iteration import IterationParams, compute_K_and_S, log_envelope
from .model import ProblemSpec
from .solver import BlowupVerdict, DetectionPolicy, MeshConfig, detect_blowup


@dataclass(frozen=True)
class LifespanRecord:
    eps: float
    T: Optional[float]            # threshold-crossing lifespan, None unless status == "blowup"
    status: str
    sensitivity: float
    refinement_spread: float
    t_searched: float
    argmax_r: Optional[float] = None
    doublings: int = 0


@dataclass(frozen=True)
class ScalingFit:
    slope: float                  # d log T / d log eps, ~ -kappa
    intercept: float              # log T at eps = 1
    slope_stderr: float
    kappa_measured: float         # -slope
    residual_rms: float
    n_used: int
    eps_decades: float
    records: tuple

    def predict_T(self, eps: float) -> float:
        return math.exp(self.intercept) * eps ** self.slope


@dataclass(frozen=True)
class TheoryBound:
    """Closed-form constant in T(eps) <= constant * eps^(-kappa)."""
    constant: float
    kappa: float
    form: str                     # scale_invariant | growing_potential | decaying_potential
    K: float
    S_pK: float
    sigma_n: float
    delta: float

    def predict_T(self, eps: float) -> float:
        return self.constant * eps ** (-self.kappa)


def kappa_from_spec(spec: ProblemSpec) -> expo.ExponentReport:
    """Lifespan exponent for the spec's field, read off its asymptotic profile."""
    prof = spec.field.asymptotics
    if prof is None:
        raise ValueError(f"field {spec.field.name!r} carries no asymptotic profile")
    if prof.indeterminate:
        raise ValueError(f"asymptotics of {spec.field.name!r} are indeterminate: {prof.notes}")
    if not math.isfinite(prof.ell):
        raise ValueError("kappa is undefined for non-logarithmic potential growth")
    alpha = spec.field.data.alpha
    return expo.lifespan_kappa(spec.p, alpha, prof.gamma, prof.ell, spec.j)


def theory_constant(spec: ProblemSpec, sigma_n: float = 0.5,
                    delta: float = 0.1) -> TheoryBound:
    """Evaluate the explicit lifespan constant for the spec's field.

    Three closed forms, selected by the potential's asymptotics: the
    scale-invariant family keeps its exact 2^(mu/2) factor; otherwise the
    growing (ell >= 0) and decaying (ell < 0) log-potential forms apply. All
    share the data-profile factor ((1+delta)/delta)^(alpha+1) * 4 e^S / M.
    """
    region = BlowupRegion(sigma_n=sigma_n, delta=delta)  # validates the window
    field = spec.field
    alpha = field.data.alpha
    m, p = spec.m, spec.p
    kappa = kappa_from_spec(spec).value
    K, S = compute_K_and_S(p, m, spec.j)
    base = ((1.0 + delta) / delta) ** (alpha + 1.0) * 4.0 * math.exp(S) / field.data.M
    s, two_s = region.sigma_n, 2.0 + region.sigma_n
    ell = field.asymptotics.ell
    if field.name == "scale_invariant":
        mu, eta = (float(x) for x in field.params)
        factor = (2.0 ** (0.5 * mu) * s ** (-(m + eta / (2.0 * p)))
                  * two_s ** (0.5 * eta + alpha + 1.0 + m))
        form = "scale_invariant"
    elif ell >= 0.0:
        factor = s ** (-(m + ell / p)) * two_s ** (ell + alpha + 1.0 + m)
        form = "growing_potential"
    else:
        factor = s ** (-m + ell) * two_s ** (alpha + 1.0 + m - ell / p)
        form = "decaying_potential"
    return TheoryBound(constant=(base * factor) ** kappa, kappa=kappa, form=form,
                       K=K, S_pK=S, sigma_n=sigma_n, delta=delta)


def _record_from_verdict(eps: float, verdict: BlowupVerdict, doublings: int) -> LifespanRecord:
    return LifespanRecord(eps=eps, T=verdict.T_estimate if verdict.blew_up else None,
                          status=verdict.status, sensitivity=verdict.sensitivity,
                          refinement_spread=verdict.refinement_spread,
                          t_searched=verdict.t_searched, argmax_r=verdict.argmax_r,
                          doublings=doublings)


def _measure_one(spec: ProblemSpec, mesh: MeshConfig, policy: DetectionPolicy,
                 mode: str, t_start: float, max_doublings: int) -> LifespanRecord:
    t_max = max(t_start, 1.0)
    doublings = 0
    while True:
        verdict = detect_blowup(spec, mesh, t_max, policy=policy, mode=mode)
        if verdict.status != "no_blowup" or doublings >= max_doublings:
            return _record_from_verdict(spec.eps, verdict, doublings)
        t_max *= 2.0
        doublings += 1


def lifespan_sweep(spec: ProblemSpec, eps_values: Sequence[float],
                   mesh: Optional[MeshConfig] = None,
                   policy: Optional[DetectionPolicy] = None,
                   mode: str = "transformed_u",
                   t_first: float = 4.0, kappa_hint: Optional[float] = None,
                   max_doublings: int = 6,
                   workers: Optional[int] = None) -> list:
    """Measure lifespans for each eps; returns records sorted by eps descending.

    spec.eps is ignored; each run uses one entry of eps_values. Horizons are
    theory-seeded when kappa is available (passed in or derived from the
    field's asymptotics) and otherwise grown by doubling alone.
    """
    eps_sorted = sorted({float(e) for e in eps_values}, reverse=True)
    if not eps_sorted:
        raise ValueError("eps_values is empty")
    if any(e <= 0.0 for e in eps_sorted):
        raise ValueError("all eps values must be positive")
    mesh = mesh or MeshConfig(dr=1.0 / 16.0)
    policy = policy or DetectionPolicy()
    if kappa_hint is None:
        try:
            kappa_hint = kappa_from_spec(spec).value
        except (ValueError, expo.OutsideBlowupRange):
            kappa_hint = None

    eps_ref = eps_sorted[0]
    pilot = _measure_one(replace(spec, eps=eps_ref), mesh, policy, mode,
                         t_first, max_doublings)
    T_ref = pilot.T if pilot.T is not None else pilot.t_searched
    rest = eps_sorted[1:]
    if not rest:
        return [pilot]

    def seed_horizon(eps: float) -> float:
        if kappa_hint is not None:
            return max(1.3 * T_ref * (eps_ref / eps) ** kappa_hint, 2.0)
        return 2.0 * T_ref

    if workers is None:
        workers = int(os.environ.get("BLOWLAB_WORKERS", "0")) or (os.cpu_count() or 1)
    workers = max(1, min(workers, len(rest)))

    def task(eps: float) -> LifespanRecord:
        return _measure_one(replace(spec, eps=eps), mesh, policy, mode,
                            seed_horizon(eps), max_doublings)

    if workers == 1:
        results = [task(e) for e in rest]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, rest))
    return [pilot] + results


def fit_scaling(records: Sequence[LifespanRecord], min_records: int = 4,
                min_decades: float = 1.0) -> ScalingFit:
    """Least-squares fit of log T against log eps over the confirmed blow-ups."""
    usable = [rec for rec in records if rec.status == "blowup" and rec.T is not None]
    if len(usable) < min_records:
        raise ValueError(
            f"need at least {min_records} confirmed blow-up records, got {len(usable)}")
    eps = np.array([rec.eps for rec in usable])
    span = math.log10(float(eps.max() / eps.min()))
    if span < min_decades - 1e-9:
        raise ValueError(
            f"eps range covers {span:.3f} decades, need at least {min_decades}")
    x = np.log(eps)
    y = np.log(np.array([rec.T for rec in usable]))
    coeffs, cov = np.polyfit(x, y, 1, cov=True)
    resid = y - (coeffs[0] * x + coeffs[1])
    return ScalingFit(slope=float(coeffs[0]), intercept=float(coeffs[1]),
                      slope_stderr=float(math.sqrt(max(cov[0, 0], 0.0))),
                      kappa_measured=float(-coeffs[0]),
                      residual_rms=float(np.sqrt(np.mean(resid ** 2))),
                      n_used=len(usable), eps_decades=span,
                      records=tuple(usable))


def check_bound(records: Sequence[LifespanRecord], bound: TheoryBound,
                slack: float = 0.0) -> list:
    """Compare each confirmed lifespan against the theory curve.

    Returns (eps, T, bound_T, ok) tuples; ok means T <= bound_T * (1 + slack).
    """
    out = []
    for rec in records:
        if rec.status != "blowup" or rec.T is None:
            continue
        bt = bound.predict_T(rec.eps)
        out.append((rec.eps, rec.T, bt, rec.T <= bt * (1.0 + slack)))
    return out


def envelope_profile(spec: ProblemSpec, ks: Sequence[int], t_values: Sequence[float],
                     sigma_n: float = 0.5, delta: float = 0.1) -> dict:
    """Sample J and the iteration envelopes along the ray r = (1+sigma_n) t.

    Output dict: t, r arrays, J array, and log_env[k] arrays for each k in ks.
    Every t must exceed delta/sigma_n so the ray stays inside the region.
    """
    params = IterationParams.from_problem(spec, sigma_n=sigma_n, delta=delta)
    region = BlowupRegion(sigma_n=sigma_n, delta=delta)
    env = ExtremalEnvelope(spec.field)
    t = np.asarray(list(t_values), dtype=float)
    if np.any(t <= region.t_min_on_line()):
        raise ValueError(f"all sample times must exceed {region.t_min_on_line():.6g}")
    r = (1.0 + sigma_n) * t
    j_vals = np.array([J_functional(float(ti), float(ri), spec, params, envelopes=env)
                       for ti, ri in zip(t, r)])
    log_env = {int(k): np.array([log_envelope(float(ti), float(ri), int(k), params, env)
                                 for ti, ri in zip(t, r)])
               for k in ks}
    return {"t": t, "r": r, "J": j_vals, "log_env": log_env, "params": params}
