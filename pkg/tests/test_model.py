"""Field catalog, asymptotics estimation, and problem validation."""

import math

import numpy as np
import pytest

from blowlab.model import (
    AsymptoticProfile,
    DataProfile,
    PerturbationField,
    ProblemSpec,
    catalog_field,
    consistency_violations,
    estimate_asymptotics,
    eval_G,
)

ALL_CATALOG = [
    ("zero", ()),
    ("scale_invariant", (1.0, 1.0)),
    ("scale_invariant", (2.0, 0.0)),
    ("bounded_U", (2.0,)),
    ("integrable_A0", (0.5,)),
    ("log_growth_U", (0.5,)),
    ("log_growth_U", (-0.5,)),
    ("superlog_U", (0.5,)),
]


def fd(fun, x, h=1e-6):
    return (fun(x + h) - fun(x - h)) / (2.0 * h)


class TestCatalogDerivatives:
    @pytest.mark.parametrize("name,params", ALL_CATALOG)
    def test_u_prime_matches_fd(self, name, params):
        field = catalog_field(name, params)
        for r in (0.5, 1.0, 3.0, 10.0):
            assert abs(float(field.u_prime(r)) - fd(field.u, r)) < 1e-6

    @pytest.mark.parametrize("name,params", ALL_CATALOG)
    def test_u_second_matches_fd(self, name, params):
        field = catalog_field(name, params)
        if field.u_second is None:
            pytest.skip("no closed-form second derivative")
        for r in (0.5, 1.0, 3.0):
            num = (field.u(r + 1e-4) - 2.0 * field.u(r) + field.u(r - 1e-4)) / 1e-8
            assert abs(float(field.u_second(r)) - num) < 1e-4

    @pytest.mark.parametrize("name,params", ALL_CATALOG)
    def test_g_is_antiderivative_of_a0(self, name, params):
        field = catalog_field(name, params)
        if field.g is None:
            pytest.skip("no closed-form antiderivative")
        assert abs(float(field.g(0.0))) < 1e-14
        for t in (0.5, 2.0, 10.0):
            assert abs(fd(field.g, t) - float(field.a0(t))) < 1e-6

    @pytest.mark.parametrize("name,params", ALL_CATALOG)
    def test_a0_prime_matches_fd(self, name, params):
        field = catalog_field(name, params)
        if field.a0_prime is None:
            pytest.skip("no closed-form a0'")
        for t in (0.5, 2.0, 10.0):
            assert abs(float(field.a0_prime(t)) - fd(field.a0, t)) < 1e-6

    def test_catalog_rejects_wrong_arity(self):
        with pytest.raises(ValueError):
            catalog_field("zero", (1.0,))
        with pytest.raises(ValueError):
            catalog_field("scale_invariant", (1.0,))

    def test_catalog_rejects_bad_domain(self):
        with pytest.raises(ValueError):
            catalog_field("bounded_U", (0.5,))   # needs beta > 1
        with pytest.raises(ValueError):
            catalog_field("scale_invariant", (-1.0, 0.0))
        with pytest.raises(ValueError):
            catalog_field("no_such_field", ())

    def test_u_trend_signs(self):
        assert catalog_field("log_growth_U", (0.5,)).u_trend == 1
        assert catalog_field("log_growth_U", (-0.5,)).u_trend == -1
        assert catalog_field("superlog_U", (-0.5,)).u_trend == -1
        assert catalog_field("bounded_U", (2.0,)).u_trend == 1


class TestEvalG:
    def test_closed_form_vs_quadrature(self):
        field = catalog_field("scale_invariant", (1.0, 0.0))
        for t in (0.5, 2.0, 25.0):
            closed = eval_G(field, t)
            quad = eval_G(field, t, force_quadrature=True)
            assert abs(closed - quad) < 1e-8
            assert abs(closed - 0.5 * math.log1p(t)) < 1e-12

    def test_zero_at_origin(self):
        for name, params in ALL_CATALOG:
            assert eval_G(catalog_field(name, params), 0.0) == 0.0


class TestAsymptoticEstimation:
    @pytest.mark.parametrize("name,params,gamma,ell", [
        ("zero", (), 0.0, 0.0),
        ("scale_invariant", (1.0, 1.0), 0.5, 0.5),
        ("scale_invariant", (2.0, 0.0), 1.0, 0.0),
        ("bounded_U", (2.0,), 0.0, 0.0),
        ("integrable_A0", (0.5,), 0.0, 0.0),
        ("log_growth_U", (0.7,), 0.0, 0.7),
        ("log_growth_U", (-0.7,), 0.0, -0.7),
    ])
    def test_estimates_match_closed_form(self, name, params, gamma, ell):
        field = catalog_field(name, params)
        prof = estimate_asymptotics(field, horizon=1e8)
        assert prof.source == "numerically-estimated"
        assert abs(prof.gamma - gamma) < 0.02
        assert abs(prof.ell - ell) < 0.02

    def test_superlog_estimated_unbounded(self):
        # |U/log| must clear the cap across the whole tail before the estimator
        # commits to a signed infinity; lower the cap to keep the horizon sane
        prof = estimate_asymptotics(catalog_field("superlog_U", (0.5,)),
                                    horizon=1e8, cap=5.0)
        assert math.isinf(prof.ell) and prof.ell > 0

    def test_superlog_negative_unbounded_below(self):
        prof = estimate_asymptotics(catalog_field("superlog_U", (-0.5,)),
                                    horizon=1e8, cap=5.0)
        assert math.isinf(prof.ell) and prof.ell < 0

    def test_superlog_below_cap_is_indeterminate_not_guessed(self):
        # still growing at the horizon but below the cap: the estimator must
        # refuse to commit rather than return a finite slope
        prof = estimate_asymptotics(catalog_field("superlog_U", (0.5,)), horizon=1e8)
        assert prof.indeterminate
        assert prof.ell == 0.0

    def test_profile_validates_source(self):
        with pytest.raises(ValueError):
            AsymptoticProfile(gamma=0.0, ell=0.0, source="guessed")


class TestConsistency:
    @pytest.mark.parametrize("name,params", ALL_CATALOG)
    def test_catalog_fields_are_clean(self, name, params):
        field = catalog_field(name, params)
        assert consistency_violations(field, p=2.0) == []

    def test_mismatched_antiderivative_is_flagged(self):
        import dataclasses
        base = catalog_field("scale_invariant", (1.0, 0.0))
        bad = dataclasses.replace(
            base, g=lambda t: np.zeros_like(np.asarray(t, dtype=float)))
        assert any("G'" in v for v in consistency_violations(bad, p=2.0))

    def test_weak_nonlinearity_is_flagged(self):
        import dataclasses
        base = catalog_field("zero")
        bad = dataclasses.replace(
            base, nonlinearity=lambda s: 0.5 * np.abs(s) ** 2)
        assert any("dips below" in v for v in consistency_violations(bad, p=2.0))


class TestProblemSpec:
    def test_m_is_half_dimension(self):
        field = catalog_field("zero")
        assert ProblemSpec(n=3, p=2.0, j=0, eps=0.3, field=field).m == 1
        assert ProblemSpec(n=5, p=1.5, j=0, eps=0.3, field=field).m == 2

    def test_rejects_bad_inputs(self):
        field = catalog_field("zero")
        with pytest.raises(ValueError):
            ProblemSpec(n=1, p=2.0, j=0, eps=0.3, field=field)
        with pytest.raises(ValueError):
            ProblemSpec(n=3, p=0.8, j=0, eps=0.3, field=field)
        with pytest.raises(ValueError):
            ProblemSpec(n=3, p=2.0, j=2, eps=0.3, field=field)
        with pytest.raises(ValueError):
            ProblemSpec(n=3, p=2.0, j=0, eps=-0.1, field=field)

    def test_data_profile_shape(self):
        prof = DataProfile(M=2.0, alpha=1.5)
        # default v1(r) = M (1+r)^(-alpha-1)
        assert abs(float(prof(1.0)) - 2.0 * 2.0 ** -2.5) < 1e-12
        assert abs(float(prof(0.0)) - 2.0) < 1e-12

    def test_data_profile_validation(self):
        with pytest.raises(ValueError):
            DataProfile(M=-1.0, alpha=1.0)
        with pytest.raises(ValueError):
            DataProfile(M=1.0, alpha=-1.5)

    def test_data_override_must_dominate_reference(self):
        # a custom profile below the reference decay is rejected outright
        with pytest.raises(ValueError):
            DataProfile(M=1.0, alpha=1.0,
                        profile=lambda r: 0.5 * (1.0 + np.asarray(r)) ** -2.0)
        ok = DataProfile(M=1.0, alpha=1.0,
                         profile=lambda r: 2.0 * (1.0 + np.asarray(r)) ** -2.0)
        assert abs(float(ok(0.0)) - 2.0) < 1e-12


class TestCustomField:
    def test_custom_callable_nonlinearity_accepted(self):
        f = PerturbationField(name="custom", nonlinearity=lambda s: np.abs(s) ** 2)
        assert callable(f.nonlinearity)

    def test_bad_nonlinearity_rejected(self):
        with pytest.raises(ValueError):
            PerturbationField(name="custom", nonlinearity="cubic")

    def test_bad_trend_rejected(self):
        with pytest.raises(ValueError):
            PerturbationField(name="custom", u_trend=2)
