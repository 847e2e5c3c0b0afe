"""Config ingestion, subcommand dispatch, and report emission.

Configs are flat INI files (diff-friendly manifests). Every run writes a
manifest with all defaults materialized plus a [result] section; the manifest
is itself a valid config, and [result] is ignored on re-ingestion, so rerunning
from a manifest reproduces the outputs byte for byte.

Exit codes: 0 success / definite verdict, 2 inconclusive verdict, 3 numerical
failure, 4 config or usage error.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
from dataclasses import dataclass, replace as dc_replace

import numpy as np

from . import criterion as crit
from . import exponents as expo
from . import harness, oracles, report, transform
from .grids import fmt_float, write_grid_csv
from .iteration import IterationParams, compute_K_and_S, run_to
from .model import DataProfile, ProblemSpec, QuadratureError, catalog_field, eval_G
from .solver import DetectionPolicy, MeshConfig, clean_mask, detect_blowup, simulate

EXIT_OK = 0
EXIT_INCONCLUSIVE = 2
EXIT_NUMERICAL = 3
EXIT_CONFIG = 4


class ConfigError(ValueError):
    """Schema or range violation in a config file."""


FIELD_PARAM_NAMES = {
    "zero": (),
    "scale_invariant": ("mu", "eta"),
    "bounded_U": ("beta",),
    "integrable_A0": ("c",),
    "log_growth_U": ("ell",),
    "superlog_U": ("c",),
}
FIELD_PARAM_DEFAULTS = {"mu": 1.0, "eta": 1.0, "beta": 2.0, "c": 0.5, "ell": 0.5}

# (type, default) per section/key; the manifest is emitted in this order
_SCHEMA = {
    "problem": {
        "n": ("int", 3),
        "p": ("float", 2.0),
        "j": ("int", 0),
        "alpha": ("float", 1.0),
        "M": ("float", 1.0),
        "eps": ("floats", (0.3,)),
    },
    "field": {
        "name": ("str", "zero"),
    },
    "region": {
        "sigma_n": ("float", 0.5),
        "delta": ("float", 0.1),
    },
    "solver": {
        "dr": ("float", 1.0 / 64.0),
        "cfl": ("float", 0.5),
        "theta": ("float", 1e8),
        "t_max": ("float", 8.0),
        "margin": ("float", 2.0),
        "mode": ("str", "transformed_u"),
        "r_obs": ("float", 2.0),
        "store_every": ("int", 0),
        "boundary_free": ("bool", False),
        "sensitivity_tol": ("float", 0.05),
        "refinement_tol": ("float", 0.10),
        "t_first": ("float", 4.0),
        "max_doublings": ("int", 6),
    },
    "output": {
        "directory": ("str", "out"),
        "formats": ("strs", ("csv", "svg")),
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 3
    p: float = 2.0
    j: int = 0
    alpha: float = 1.0
    M: float = 1.0
    eps: tuple = (0.3,)
    field_name: str = "zero"
    field_params: tuple = ()
    sigma_n: float = 0.5
    delta: float = 0.1
    dr: float = 1.0 / 64.0
    cfl: float = 0.5
    theta: float = 1e8
    t_max: float = 8.0
    margin: float = 2.0
    mode: str = "transformed_u"
    r_obs: float = 2.0
    store_every: int = 0
    boundary_free: bool = False
    sensitivity_tol: float = 0.05
    refinement_tol: float = 0.10
    t_first: float = 4.0
    max_doublings: int = 6
    out_dir: str = "out"
    formats: tuple = ("csv", "svg")

    @property
    def sweep_mode(self) -> bool:
        return len(self.eps) > 1

    def to_field(self):
        field = catalog_field(self.field_name, self.field_params)
        return dc_replace(field, data=DataProfile(M=self.M, alpha=self.alpha))

    def to_spec(self, eps: float = None) -> ProblemSpec:
        return ProblemSpec(n=self.n, p=self.p, j=self.j,
                           eps=self.eps[0] if eps is None else float(eps),
                           field=self.to_field())

    def to_mesh(self) -> MeshConfig:
        return MeshConfig(dr=self.dr, cfl=self.cfl, margin=self.margin,
                          r_obs=self.r_obs, store_every=self.store_every,
                          boundary_free=self.boundary_free)

    def to_policy(self) -> DetectionPolicy:
        return DetectionPolicy(theta=self.theta, sensitivity_tol=self.sensitivity_tol,
                               refinement_tol=self.refinement_tol)

    def to_region(self) -> crit.BlowupRegion:
        return crit.BlowupRegion(sigma_n=self.sigma_n, delta=self.delta)


def _coerce(section: str, key: str, kind: str, raw: str):
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            low = raw.strip().lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(raw)
        if kind == "floats":
            parts = [s for chunk in raw.split(",") for s in chunk.split()]
            if not parts:
                raise ValueError("empty list")
            return tuple(float(s) for s in parts)
        if kind == "strs":
            parts = [s.strip() for s in raw.replace(",", " ").split()]
            return tuple(s for s in parts if s)
        return raw.strip()
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} as {kind}") from None


def default_config() -> ExperimentConfig:
    return ExperimentConfig()


def parse_config(path: str) -> ExperimentConfig:
    """Read and validate an INI config; [result] sections are ignored."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keys are case-sensitive (M vs m)
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path!r}: {exc}") from None

    field_name = cp.get("field", "name", fallback="zero").strip()
    if field_name not in FIELD_PARAM_NAMES:
        raise ConfigError(
            f"[field] name: unknown catalog field {field_name!r}; "
            f"choose from {', '.join(sorted(FIELD_PARAM_NAMES))}")

    for section in cp.sections():
        if section == "result":
            continue
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        allowed = set(_SCHEMA[section])
        if section == "field":
            allowed |= set(FIELD_PARAM_NAMES[field_name])
        for key in cp[section]:
            if key not in allowed:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    values = {}
    for section, keys in _SCHEMA.items():
        for key, (kind, default) in keys.items():
            if cp.has_option(section, key):
                values[(section, key)] = _coerce(section, key, kind, cp.get(section, key))
            else:
                values[(section, key)] = default

    field_params = []
    for pname in FIELD_PARAM_NAMES[field_name]:
        if cp.has_option("field", pname):
            field_params.append(_coerce("field", pname, "float", cp.get("field", pname)))
        else:
            field_params.append(FIELD_PARAM_DEFAULTS[pname])

    config = ExperimentConfig(
        n=values[("problem", "n")], p=values[("problem", "p")],
        j=values[("problem", "j")], alpha=values[("problem", "alpha")],
        M=values[("problem", "M")], eps=values[("problem", "eps")],
        field_name=field_name, field_params=tuple(field_params),
        sigma_n=values[("region", "sigma_n")], delta=values[("region", "delta")],
        dr=values[("solver", "dr")], cfl=values[("solver", "cfl")],
        theta=values[("solver", "theta")], t_max=values[("solver", "t_max")],
        margin=values[("solver", "margin")], mode=values[("solver", "mode")],
        r_obs=values[("solver", "r_obs")], store_every=values[("solver", "store_every")],
        boundary_free=values[("solver", "boundary_free")],
        sensitivity_tol=values[("solver", "sensitivity_tol")],
        refinement_tol=values[("solver", "refinement_tol")],
        t_first=values[("solver", "t_first")],
        max_doublings=values[("solver", "max_doublings")],
        out_dir=values[("output", "directory")],
        formats=values[("output", "formats")])
    validate_config(config)
    return config


def validate_config(config: ExperimentConfig) -> None:
    if config.mode not in ("transformed_u", "direct_v"):
        raise ConfigError(f"[solver] mode: must be transformed_u or direct_v, got {config.mode!r}")
    bad = set(config.formats) - {"csv", "svg"}
    if bad:
        raise ConfigError(f"[output] formats: unknown entries {sorted(bad)}")
    if config.t_max <= 0.0:
        raise ConfigError(f"[solver] t_max: must be positive, got {config.t_max}")
    if config.max_doublings < 0:
        raise ConfigError(f"[solver] max_doublings: must be >= 0, got {config.max_doublings}")
    if config.t_first <= 0.0:
        raise ConfigError(f"[solver] t_first: must be positive, got {config.t_first}")
    # range checks live in the domain types; surface their messages as config errors
    try:
        config.to_region()
        config.to_mesh()
        config.to_policy()
        config.to_spec()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _serialize(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return fmt_float(value)
    if isinstance(value, tuple):
        return ", ".join(_serialize(v) for v in value)
    return str(value)


def write_manifest(path: str, config: ExperimentConfig, result: dict) -> str:
    """Materialized config + [result]; valid as input to parse_config."""
    per_section = {
        "problem": {"n": config.n, "p": config.p, "j": config.j,
                    "alpha": config.alpha, "M": config.M, "eps": config.eps},
        "field": {"name": config.field_name,
                  **dict(zip(FIELD_PARAM_NAMES[config.field_name], config.field_params))},
        "region": {"sigma_n": config.sigma_n, "delta": config.delta},
        "solver": {"dr": config.dr, "cfl": config.cfl, "theta": config.theta,
                   "t_max": config.t_max, "margin": config.margin, "mode": config.mode,
                   "r_obs": config.r_obs, "store_every": config.store_every,
                   "boundary_free": config.boundary_free,
                   "sensitivity_tol": config.sensitivity_tol,
                   "refinement_tol": config.refinement_tol,
                   "t_first": config.t_first, "max_doublings": config.max_doublings},
        "output": {"directory": config.out_dir, "formats": config.formats},
    }
    lines = ["# run manifest: every default materialized; rerunning from this file",
             "# reproduces the outputs byte for byte ([result] is ignored on re-ingestion)"]
    for section in _SCHEMA:
        lines.append(f"[{section}]")
        for key, value in per_section[section].items():
            lines.append(f"{key} = {_serialize(value)}")
        lines.append("")
    lines.append("[result]")
    for key in sorted(result):
        lines.append(f"{key} = {_serialize(result[key])}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


# ============================================================
# Subcommands
# ============================================================

def _outpath(config: ExperimentConfig, name: str) -> str:
    os.makedirs(config.out_dir, exist_ok=True)
    return os.path.join(config.out_dir, name)


def cmd_exponents(config: ExperimentConfig) -> tuple:
    field = config.to_field()
    reports = [expo.strauss_glassey(config.n, 0), expo.strauss_glassey(config.n, 1),
               expo.slow_decay_critical(config.alpha)]
    prof = field.asymptotics
    result = {}
    if prof is not None and math.isfinite(prof.ell):
        for j in (0, 1):
            reports.append(expo.shifted_critical(config.alpha, prof.gamma, prof.ell, j))
        try:
            kappa = expo.lifespan_kappa(config.p, config.alpha, prof.gamma, prof.ell, config.j)
            reports.append(kappa)
            result["kappa"] = kappa.value
        except expo.OutsideBlowupRange as exc:
            result["kappa"] = "outside_range"
            result["kappa_note"] = str(exc)
    for a in (0.5, 1.0, 2.0):
        for g in (0.0, 0.5):
            for ell in (-0.5, 0.0, 0.5):
                for j in (0, 1):
                    reports.append(expo.shifted_critical(a, g, ell, j))
    path = report.write_exponents_csv(_outpath(config, "exponents.csv"), reports)
    result.update({"rows": len(reports), "table": os.path.basename(path)})
    return EXIT_OK, "ok", result


def cmd_criterion(config: ExperimentConfig) -> tuple:
    spec = config.to_spec()
    field = spec.field
    region = config.to_region()
    prof = field.asymptotics
    tax = crit.classify(prof, config.alpha, config.j)
    horizon = max(1e6, config.t_max)
    ev = crit.divergence_evidence(spec, region, horizon=horizon)
    result = {
        "regime": tax.regime,
        "critical_p": tax.critical.value if tax.critical else "",
        "all_p": tax.all_p,
        "no_conclusion": tax.no_conclusion,
        "diverges": ev.diverges,
        "phi_slope": ev.slope,
        "phi_increasing": ev.increasing,
        "horizon": ev.horizon,
    }
    if prof is not None and math.isfinite(prof.ell):
        result["margin"] = expo.blowup_range_margin(
            config.p, config.alpha, prof.gamma, prof.ell, config.j)
    lines = ["# divergence criterion summary: phi(t) slope test and taxonomy",
             "quantity,value"]
    for key in sorted(result):
        lines.append(f"{key},{_serialize(result[key])}")
    path = _outpath(config, "criterion.csv")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    if "svg" in config.formats:
        ts = np.geomspace(max(10.0, 10.0 * region.t_min_on_line()), horizon, 120)
        phis = [crit.phi(float(t), spec, region) for t in ts]
        report.fig_interaction(_outpath(config, "criterion_phi.svg"), ts, phis)
    code = EXIT_INCONCLUSIVE if (tax.no_conclusion or tax.regime == "unclassified") else EXIT_OK
    verdict = "divergent" if ev.diverges else (
        "no_conclusion" if tax.no_conclusion else "not_divergent")
    return code, verdict, result


def cmd_iterate(config: ExperimentConfig) -> tuple:
    spec = config.to_spec()
    params = IterationParams.from_problem(spec, sigma_n=config.sigma_n, delta=config.delta)
    lines = ["# doubly exponential iteration: state per index k (logC is log of the constant)",
             "k,a,b,d,l,logC"]
    for k in range(1, 17):
        st = run_to(k, params)
        lines.append(",".join([str(k)] + [fmt_float(x)
                                          for x in (st.a, st.b, st.d, st.l, st.logC)]))
    path = _outpath(config, "iterate.csv")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    region = config.to_region()
    t_star = crit.first_positive_time(spec, params, region, horizon=1e6)
    result = {"K": params.K, "S_pK": params.S_pK, "C0": params.C0,
              "t_first_positive_J": t_star if t_star is not None else ""}
    if "svg" in config.formats:
        t_lo = 2.0 * region.t_min_on_line() + 1.0
        profile = harness.envelope_profile(spec, (1, 2, 4), np.geomspace(t_lo, 1e4, 40),
                                           sigma_n=config.sigma_n, delta=config.delta)
        report.fig_envelopes(_outpath(config, "iterate_envelopes.svg"), profile)
    verdict = "positive_J_found" if t_star is not None else "no_positive_J"
    return EXIT_OK, verdict, result


def cmd_simulate(config: ExperimentConfig) -> tuple:
    spec = config.to_spec()
    mesh = config.to_mesh()
    policy = config.to_policy()
    grid = simulate(spec, mesh, config.t_max, mode=config.mode, policy=policy)
    verdict = detect_blowup(spec, mesh, config.t_max, policy=policy,
                            mode=config.mode, base=grid)
    write_grid_csv(grid, _outpath(config, "grid.csv"))
    if "svg" in config.formats:
        report.fig_monitor(_outpath(config, "monitor.svg"), grid.trace.monitor_times,
                           grid.trace.monitor_values, theta=policy.theta)
        report.fig_snapshots(_outpath(config, "snapshots.svg"), grid)
    result = {"status": verdict.status, "T_estimate": verdict.T_estimate or "",
              "sensitivity": verdict.sensitivity,
              "refinement_spread": verdict.refinement_spread,
              "peak_monitor": grid.trace.peak_monitor,
              "stopped": grid.trace.stopped, "t_end": grid.trace.t_end}
    code = {"blowup": EXIT_OK, "no_blowup": EXIT_OK,
            "inconclusive": EXIT_INCONCLUSIVE}.get(verdict.status, EXIT_NUMERICAL)
    return code, verdict.status, result


def cmd_sweep(config: ExperimentConfig) -> tuple:
    if not config.sweep_mode:
        raise ConfigError("[problem] eps: sweep needs a list of at least two values")
    spec = config.to_spec()
    records = harness.lifespan_sweep(
        spec, config.eps, mesh=config.to_mesh(), policy=config.to_policy(),
        mode=config.mode, t_first=config.t_first, max_doublings=config.max_doublings)
    fit = None
    try:
        fit = harness.fit_scaling(records)
    except ValueError:
        pass
    bound = None
    try:
        bound = harness.theory_constant(spec, sigma_n=config.sigma_n, delta=config.delta)
    except (ValueError, expo.OutsideBlowupRange):
        pass
    report.write_lifespan_csv(_outpath(config, "lifespan.csv"), records, fit=fit, bound=bound)
    if "svg" in config.formats:
        report.fig_scaling(_outpath(config, "scaling.svg"), records, fit=fit, bound=bound)
    statuses = {rec.status for rec in records}
    result = {"n_records": len(records),
              "n_blowup": sum(rec.status == "blowup" for rec in records)}
    if fit is not None:
        result.update({"slope": fit.slope, "slope_stderr": fit.slope_stderr,
                       "kappa_measured": fit.kappa_measured,
                       "residual_rms": fit.residual_rms})
    if bound is not None:
        result.update({"kappa_theory": bound.kappa, "C_theory": bound.constant,
                       "bound_form": bound.form})
        checks = harness.check_bound(records, bound)
        result["bound_satisfied"] = all(ok for (_, _, _, ok) in checks)
    if "numerical_failure" in statuses:
        return EXIT_NUMERICAL, "numerical_failure", result
    if "inconclusive" in statuses or fit is None:
        return EXIT_INCONCLUSIVE, "inconclusive", result
    return EXIT_OK, "fit_ok", result


def cmd_verify(config: ExperimentConfig) -> tuple:
    """Cross-checks of the numerical kernels against independent oracles."""
    rows = []

    for q, t in ((0.5, 2.0), (1.0, 3.0), (2.0, 5.0)):
        closed, quad = oracles.beta_integral(q, t)
        rows.append(oracles.OracleReport(name=f"beta_integral(q={q},t={t})",
                                         inputs={"q": q, "t": t},
                                         oracle_value=quad, candidate_value=closed))

    psi = lambda lam: (1.0 + lam) ** -2.0
    for t, r in ((1.0, 2.0), (2.0, 4.0)):
        mean = oracles.spherical_means_n3(psi, t, r)
        low = oracles.weighted_cone_lower_bound(psi, t, r, m=1)
        # inequality check: the exact spherical mean must dominate the cone bound
        rows.append(oracles.OracleReport(name=f"cone_bound_violation(t={t},r={r})",
                                         inputs={"t": t, "r": r},
                                         oracle_value=0.0,
                                         candidate_value=max(low - mean, 0.0)))

    si = catalog_field("scale_invariant", (1.0, 1.0))
    g_quad = eval_G(si, 3.0, force_quadrature=True)
    rows.append(oracles.OracleReport(name="eval_G_quadrature(scale_invariant)",
                                     inputs={"t": 3.0},
                                     oracle_value=float(si.g(3.0)),
                                     candidate_value=g_quad))

    K, S = compute_K_and_S(2.0, 1, 0)
    s_closed = math.log(4.0) * 2.0 - math.log(K)  # p=2 closed form of the series
    rows.append(oracles.OracleReport(name="series_S(p=2,m=1,j=0)",
                                     inputs={"p": 2.0, "m": 1, "j": 0},
                                     oracle_value=s_closed, candidate_value=S))

    flat = DataProfile(M=1.0, alpha=1.0, profile=lambda r: np.ones_like(np.asarray(r, dtype=float)))
    lin_field = dc_replace(catalog_field("zero"), nonlinearity="none", data=flat)
    lin_spec = ProblemSpec(n=3, p=2.0, j=0, eps=1.0, field=lin_field)
    mesh = MeshConfig(dr=1.0 / 32.0, boundary_free=True, r_obs=3.0)
    grid = simulate(lin_spec, mesh, 3.0)
    errs = []
    for i, t in enumerate(grid.times):
        ok = clean_mask(grid, float(t))
        errs.append(float(np.max(np.abs(grid.values[i][ok] - t))))
    rows.append(oracles.OracleReport(name="linear_flat_data_u_eq_t",
                                     inputs={"t_max": 3.0, "dr": mesh.dr},
                                     oracle_value=0.0, candidate_value=max(errs)))

    tol = 1e-8
    lines = ["# oracle cross-checks: candidate vs independently computed value",
             "name,oracle,candidate,abs_deviation,ok"]
    all_ok = True
    for row in rows:
        ok = row.abs_deviation <= tol
        all_ok &= ok
        lines.append(",".join([row.name, fmt_float(row.oracle_value),
                               fmt_float(row.candidate_value),
                               fmt_float(row.abs_deviation), str(ok)]))
    path = _outpath(config, "verify.csv")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    result = {"checks": len(rows), "tolerance": tol, "all_ok": all_ok}
    if all_ok:
        return EXIT_OK, "verified", result
    return EXIT_NUMERICAL, "oracle_mismatch", result


def cmd_transform_check(config: ExperimentConfig) -> tuple:
    """Evolve both pictures on one mesh and compare them after mapping."""
    spec = config.to_spec()
    t_short = min(config.t_max, 4.0)
    mesh = dc_replace(config.to_mesh(), store_every=1, boundary_free=True, r_max=None)
    gu = simulate(spec, mesh, t_short, mode="transformed_u")
    gv = simulate(spec, mesh, t_short, mode="direct_v")
    v_from_u = transform.to_v(gu, spec.field)
    diffs, scale = [], []
    for i, t in enumerate(gu.times):
        ok = clean_mask(gu, float(t))
        diffs.append(float(np.max(np.abs(v_from_u.values[i][ok] - gv.values[i][ok]))))
        scale.append(float(np.max(np.abs(gv.values[i][ok]))))
    cross = max(diffs)
    rel = cross / max(max(scale), 1e-300)
    t_int, r_int, resid = transform.residual_perturbed(gv, spec)
    keep = r_int <= gu.r_max - float(t_int[-1]) / mesh.cfl - 4.0 * gu.dr
    resid_med = float(np.median(np.abs(resid[:, keep]))) if np.any(keep) else math.inf
    result = {"cross_diff_max": cross, "cross_diff_rel": rel,
              "residual_median": resid_med, "t_compared": float(gu.times[-1]),
              "consistent": bool(rel < 0.05)}
    lines = ["# two-picture consistency: v evolved directly vs u evolved then mapped back",
             "quantity,value"]
    for key in sorted(result):
        lines.append(f"{key},{_serialize(result[key])}")
    path = _outpath(config, "transform_check.csv")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    if not (math.isfinite(cross) and math.isfinite(resid_med)):
        return EXIT_NUMERICAL, "nonfinite", result
    return EXIT_OK, "consistent" if result["consistent"] else "drift", result


_COMMANDS = {
    "exponents": cmd_exponents,
    "criterion": cmd_criterion,
    "iterate": cmd_iterate,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "transform-check": cmd_transform_check,
}


def dispatch(subcommand: str, config: ExperimentConfig) -> int:
    """Run one subcommand; writes the manifest and returns the exit code."""
    if subcommand not in _COMMANDS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    try:
        code, verdict, result = _COMMANDS[subcommand](config)
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    result = {"command": subcommand, "verdict": verdict, "exit_code": code, **result}
    manifest = write_manifest(_outpath(config, "manifest.ini"), config, result)
    print(f"{subcommand}: verdict={verdict} (exit {code}); manifest at {manifest}")
    return code


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors map to the config-error exit code
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def main(argv=None) -> int:
    parser = _Parser(prog="blowlab",
                     description="numerical laboratory for blow-up of perturbed "
                                 "semilinear wave equations")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", "-c", default=None, help="INI config path")
        sp.add_argument("--out", "-o", default=None, help="output directory override")
    args = parser.parse_args(argv)
    try:
        config = parse_config(args.config) if args.config else default_config()
        if args.out is not None:
            config = dc_replace(config, out_dir=args.out)
        return dispatch(args.command, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
