"""Blow-up criterion: interaction functional, taxonomy, J positивity."""

import math

import pytest

import blowlab.criterion as cr
import blowlab.iteration as it
from blowlab.exponents import blowup_range_margin, shifted_critical
from blowlab.model import AsymptoticProfile, ProblemSpec, catalog_field


def spec_for(name, params=(), p=2.0, j=0, eps=0.3):
    return ProblemSpec(n=3, p=p, j=j, eps=eps, field=catalog_field(name, params))


class TestBlowupRegion:
    def test_edge_ray_is_inside(self):
        region = cr.BlowupRegion(sigma_n=0.5, delta=0.1)
        for t in (0.5, 1.0, 10.0, 1e5):
            r = (1.0 + 0.5) * t
            assert region.contains(t, r)

    def test_interior_and_exterior(self):
        region = cr.BlowupRegion(sigma_n=0.5, delta=0.1)
        assert region.contains(10.0, 16.0)          # r - t = 6 > 5 = sigma t
        assert not region.contains(10.0, 14.0)      # r - t = 4 < 5
        # below the switchover t < delta/sigma the floor delta rules
        assert region.contains(0.1, 0.1 + 0.2)
        assert not region.contains(0.1, 0.1 + 0.05)

    def test_validation(self):
        with pytest.raises(ValueError):
            cr.BlowupRegion(sigma_n=0.0)
        with pytest.raises(ValueError):
            cr.BlowupRegion(delta=-0.1)


class TestExtremalEnvelope:
    def test_zero_field_extrema_vanish(self):
        env = cr.ExtremalEnvelope(catalog_field("zero"))
        assert env.g_max(7.0) == 0.0
        assert env.u_min(1.0, 5.0) == 0.0
        assert env.u_max(1.0, 5.0) == 0.0

    def test_monotone_potential_extrema_at_endpoints(self):
        # u_min/u_max extremize U over the backward cone [r-t, r+t]
        field = catalog_field("log_growth_U", (0.8,))
        env = cr.ExtremalEnvelope(field)
        t, r = 2.0, 9.0
        assert abs(env.u_min(t, r) - float(field.u(r - t))) < 1e-12
        assert abs(env.u_max(t, r) - float(field.u(r + t))) < 1e-12

    def test_decreasing_potential_swaps_endpoints(self):
        field = catalog_field("log_growth_U", (-0.8,))
        env = cr.ExtremalEnvelope(field)
        t, r = 2.0, 9.0
        assert abs(env.u_min(t, r) - float(field.u(r + t))) < 1e-12
        assert abs(env.u_max(t, r) - float(field.u(r - t))) < 1e-12

    def test_cone_truncates_at_origin(self):
        field = catalog_field("log_growth_U", (0.8,))
        env = cr.ExtremalEnvelope(field)
        # r < t: the interval starts at 0 where U(0) = 0
        assert abs(env.u_min(5.0, 1.0) - 0.0) < 1e-12

    def test_nonneg_a0_gmax_at_right_endpoint(self):
        field = catalog_field("scale_invariant", (1.0, 0.0))
        env = cr.ExtremalEnvelope(field)
        assert abs(env.g_max(5.0) - 0.5 * math.log(6.0)) < 1e-10


class TestPhi:
    def test_zero_field_is_pure_log(self):
        # phi(t) = ((2-j)/(p-1) - alpha) log t when G = U = 0
        spec = spec_for("zero", p=2.0)
        region = cr.BlowupRegion()
        for t in (10.0, 100.0, 1e5):
            assert abs(cr.phi(t, spec, region) - math.log(t)) < 1e-10

    def test_monotone_log_potential_window_formula(self):
        # window [sigma t, (2+sigma) t], U increasing: min at left, max at right
        spec = spec_for("log_growth_U", (0.5,), p=2.0)
        region = cr.BlowupRegion(sigma_n=0.5)
        field = spec.field
        t = 250.0
        expected = (1.0 * math.log(t)
                    + (1.0 / spec.p) * float(field.u(0.5 * t))
                    - float(field.u(2.5 * t)))
        assert abs(cr.phi(t, spec, region) - expected) < 1e-10

    def test_asymptotic_slope_matches_margin(self):
        spec = spec_for("scale_invariant", (1.0, 1.0), p=1.9)
        region = cr.BlowupRegion()
        t1, t2 = 1e7, 1e9
        slope = ((cr.phi(t2, spec, region) - cr.phi(t1, spec, region))
                 / (math.log(t2) - math.log(t1)))
        margin = blowup_range_margin(1.9, 1.0, 0.5, 0.5, 0)
        assert abs(slope - margin) < 5e-3

    def test_wide_window_agrees_for_zero_field(self):
        spec = spec_for("zero")
        region = cr.BlowupRegion()
        for t in (10.0, 1e4):
            assert abs(cr.phi_wide_window(t, spec) - cr.phi(t, spec, region)) < 1e-10


class TestDivergenceEvidence:
    CASES = [
        ("zero", ()),
        ("scale_invariant", (1.0, 1.0)),
        ("bounded_U", (2.0,)),
        ("integrable_A0", (0.5,)),
        ("log_growth_U", (0.5,)),
        ("log_growth_U", (-0.5,)),
    ]

    @pytest.mark.parametrize("name,params", CASES)
    def test_flips_across_critical(self, name, params):
        field = catalog_field(name, params)
        tax = cr.classify(field.asymptotics, 1.0, 0)
        crit = tax.critical.value
        region = cr.BlowupRegion()
        below = cr.divergence_evidence(
            ProblemSpec(n=3, p=0.9 * crit, j=0, eps=0.3, field=field),
            region, horizon=1e6)
        above = cr.divergence_evidence(
            ProblemSpec(n=3, p=1.1 * crit, j=0, eps=0.3, field=field),
            region, horizon=1e6)
        assert below.diverges and below.increasing and below.slope > 0.01
        assert not above.diverges and above.slope < 0.0

    def test_zero_field_slope_equals_margin_exactly(self):
        # phi is exactly linear in log t, so the fitted slope is the margin
        crit = 3.0
        spec = spec_for("zero", p=0.9 * crit)
        ev = cr.divergence_evidence(spec, cr.BlowupRegion(), horizon=1e6)
        margin = blowup_range_margin(0.9 * crit, 1.0, 0.0, 0.0, 0)
        assert abs(ev.slope - margin) < 1e-9

    def test_superlog_never_diverges(self):
        field = catalog_field("superlog_U", (0.5,))
        region = cr.BlowupRegion()
        for p in (1.5, 2.0, 3.0, 5.0):
            ev = cr.divergence_evidence(
                ProblemSpec(n=3, p=p, j=0, eps=0.3, field=field),
                region, horizon=1e6)
            assert not ev.diverges

    def test_j1_flips_at_glassey_type_critical(self):
        field = catalog_field("zero")
        tax = cr.classify(field.asymptotics, 1.0, 1)
        crit = tax.critical.value
        assert abs(crit - 2.0) < 1e-12
        region = cr.BlowupRegion()
        lo = cr.divergence_evidence(
            ProblemSpec(n=3, p=1.8, j=1, eps=0.3, field=field), region, horizon=1e6)
        hi = cr.divergence_evidence(
            ProblemSpec(n=3, p=2.2, j=1, eps=0.3, field=field), region, horizon=1e6)
        assert lo.diverges and not hi.diverges

    def test_small_horizon_rejected(self):
        with pytest.raises(ValueError):
            cr.divergence_evidence(spec_for("zero"), cr.BlowupRegion(), horizon=500.0)


class TestClassify:
    def test_regimes(self):
        assert cr.classify(catalog_field("zero").asymptotics, 1.0, 0).regime == "time_shift_only"
        assert cr.classify(catalog_field("scale_invariant", (1.0, 1.0)).asymptotics,
                           1.0, 0).regime == "log_potential_shift"
        rec = cr.classify(catalog_field("superlog_U", (0.5,)).asymptotics, 1.0, 0)
        assert rec.regime == "potential_grows_superlog"
        assert rec.no_conclusion and rec.critical is None
        rec = cr.classify(catalog_field("superlog_U", (-0.5,)).asymptotics, 1.0, 0)
        assert rec.regime == "potential_falls_superlog"
        assert rec.all_p and not rec.no_conclusion

    def test_critical_matches_shifted_quadratic(self):
        prof = catalog_field("scale_invariant", (1.0, 1.0)).asymptotics
        rec = cr.classify(prof, 1.0, 0)
        direct = shifted_critical(1.0, prof.gamma, prof.ell, 0)
        assert abs(rec.critical.value - direct.value) < 1e-12

    def test_indeterminate_is_unclassified(self):
        prof = AsymptoticProfile(gamma=0.0, ell=0.0,
                                 source="numerically-estimated", indeterminate=True)
        rec = cr.classify(prof, 1.0, 0)
        assert rec.regime == "unclassified"
        assert rec.critical is None
        # "unknown" is distinct from "provably no conclusion"
        assert not rec.no_conclusion


class TestJFunctional:
    def region_edge(self, t, sigma=0.5):
        return (1.0 + sigma) * t

    def test_zero_field_formula(self):
        spec = spec_for("zero", eps=0.3)
        params = it.IterationParams.from_problem(spec)
        t = 50.0
        r = self.region_edge(t)
        expected = (math.log(params.C0) - params.S_pK
                    + (params.m + 1.0 + 2.0 / (spec.p - 1.0)) * math.log(t)
                    - (params.alpha + 1.0 + params.m) * math.log(r + t))
        assert abs(cr.J_functional(t, r, spec, params) - expected) < 1e-12

    def test_amplitude_shift_is_exact_log_ratio(self):
        s1 = spec_for("zero", eps=0.3)
        s2 = spec_for("zero", eps=3.0)
        p1 = it.IterationParams.from_problem(s1)
        p2 = it.IterationParams.from_problem(s2)
        t, r = 40.0, 70.0
        d = cr.J_functional(t, r, s2, p2) - cr.J_functional(t, r, s1, p1)
        assert abs(d - math.log(10.0)) < 1e-12

    def test_first_positive_time_matches_analytic_root(self):
        # zero field, p=2, alpha=1: on the edge ray J = log C0 - S
        #   + 4 log t - 3 log(2.5 t), positive past exp(S - log C0 + 3 log 2.5)
        spec = spec_for("zero", eps=50.0)
        params = it.IterationParams.from_problem(spec)
        region = cr.BlowupRegion()
        t_star = math.exp(params.S_pK - math.log(params.C0) + 3.0 * math.log(2.5))
        found = cr.first_positive_time(spec, params, region, horizon=1e6)
        assert found is not None
        assert abs(found - t_star) < 1e-3 * t_star
        assert cr.J_functional(found * 1.01, self.region_edge(found * 1.01),
                               spec, params) > 0.0

    def test_first_positive_time_none_below_horizon(self):
        spec = spec_for("zero", eps=0.3)
        params = it.IterationParams.from_problem(spec)
        assert cr.first_positive_time(spec, params, cr.BlowupRegion(),
                                      horizon=1e6) is None
