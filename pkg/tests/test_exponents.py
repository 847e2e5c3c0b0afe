"""Critical-exponent algebra: closed forms, quadratic residuals, kappa."""

import math

import numpy as np
import pytest

from blowlab.exponents import (
    ExponentReport,
    OutsideBlowupRange,
    blowup_range_margin,
    lifespan_kappa,
    shifted_critical,
    slow_decay_critical,
    strauss_glassey,
)


def quadratic_residual(p: float, n: int) -> float:
    return (n - 1.0) * p * p - (n + 1.0) * p - 2.0


class TestStraussGlassey:
    def test_n3_j0_is_one_plus_sqrt2(self):
        rep = strauss_glassey(3, 0)
        assert abs(rep.value - (1.0 + math.sqrt(2.0))) < 1e-12

    def test_n3_j0_root_of_quadratic(self):
        rep = strauss_glassey(3, 0)
        assert abs(quadratic_residual(rep.value, 3)) < 1e-12

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 10])
    def test_j0_roots_across_dimensions(self, n):
        rep = strauss_glassey(n, 0)
        assert rep.value > 1.0
        assert abs(quadratic_residual(rep.value, n)) < 1e-10

    @pytest.mark.parametrize("n,expected", [(2, 3.0), (3, 2.0), (5, 1.5)])
    def test_j1_closed_form(self, n, expected):
        rep = strauss_glassey(n, 1)
        assert abs(rep.value - expected) < 1e-12

    def test_report_metadata(self):
        rep = strauss_glassey(3, 0)
        assert isinstance(rep, ExponentReport)
        assert rep.inputs["n"] == 3
        assert not rep.unbounded


class TestSlowDecayCritical:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 4.0])
    def test_closed_form(self, alpha):
        assert abs(slow_decay_critical(alpha).value - (1.0 + 2.0 / alpha)) < 1e-12


class TestShiftedCritical:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 4.0])
    def test_reduces_to_slow_decay_when_unshifted(self, alpha):
        rep = shifted_critical(alpha, 0.0, 0.0, 0)
        assert abs(rep.value - (1.0 + 2.0 / alpha)) < 1e-12

    def test_j1_reduces_to_one_plus_one_over_alpha(self):
        rep = shifted_critical(2.0, 0.0, 0.0, 1)
        assert abs(rep.value - 1.5) < 1e-12

    def test_residual_grid_100_points(self):
        # (alpha+gamma+ell) p^2 - (alpha+gamma+2 ell+2-j) p + ell = 0
        rng = np.random.default_rng(20240817)
        count = 0
        while count < 100:
            alpha = float(rng.uniform(0.2, 4.0))
            gamma = float(rng.uniform(0.0, 2.0))
            ell = float(rng.uniform(-0.5, 2.0))
            j = int(rng.integers(0, 2))
            try:
                rep = shifted_critical(alpha, gamma, ell, j)
            except OutsideBlowupRange:
                continue
            p = rep.value
            lead = alpha + gamma + ell
            resid = lead * p * p - (alpha + gamma + 2.0 * ell + 2.0 - j) * p + ell
            assert abs(resid) < 1e-10, (alpha, gamma, ell, j, p, resid)
            count += 1

    def test_root_is_the_larger_one(self):
        # the critical power must bound the open blow-up interval from above,
        # so with two real roots the relevant one is the larger
        rep = shifted_critical(1.0, 0.0, 0.5, 0)
        lead = 1.0 + 0.5
        other = 0.5 / (lead * rep.value)  # product of roots = ell / lead
        assert rep.value > other

    def test_monotone_in_gamma(self):
        # a stronger time perturbation narrows the blow-up range
        vals = [shifted_critical(1.0, g, 0.0, 0).value for g in (0.0, 0.5, 1.0)]
        assert vals[0] > vals[1] > vals[2]


class TestBlowupRangeMargin:
    def test_vanishes_at_critical(self):
        for alpha, gamma, ell, j in [(1.0, 0.0, 0.0, 0), (0.5, 0.3, 0.2, 0),
                                     (2.0, 0.0, -0.3, 1)]:
            p_c = shifted_critical(alpha, gamma, ell, j).value
            assert abs(blowup_range_margin(p_c, alpha, gamma, ell, j)) < 1e-10

    def test_positive_below_critical(self):
        p_c = shifted_critical(1.0, 0.0, 0.0, 0).value
        assert blowup_range_margin(0.9 * p_c, 1.0, 0.0, 0.0, 0) > 0.0
        assert blowup_range_margin(1.1 * p_c, 1.0, 0.0, 0.0, 0) < 0.0

    def test_formula(self):
        # (2-j)/(p-1) - alpha - gamma - ell (1 - 1/p)
        p, alpha, gamma, ell, j = 2.0, 1.0, 0.25, 0.5, 0
        expected = (2.0 - j) / (p - 1.0) - alpha - gamma - ell * (1.0 - 1.0 / p)
        assert abs(blowup_range_margin(p, alpha, gamma, ell, j) - expected) < 1e-14


class TestLifespanKappa:
    def test_zero_field_alpha1_p2_gives_kappa1(self):
        rep = lifespan_kappa(2.0, 1.0, 0.0, 0.0, 0)
        assert abs(rep.value - 1.0) < 1e-12

    def test_scale_invariant_mu2_alpha_half_gives_kappa2(self):
        # gamma = mu/2 = 1, alpha = 0.5, p = 2, j = 0:
        # 1/kappa = 2/(p-1) - alpha - gamma = 2 - 0.5 - 1 = 0.5
        rep = lifespan_kappa(2.0, 0.5, 1.0, 0.0, 0)
        assert abs(rep.value - 2.0) < 1e-12

    def test_kappa_is_reciprocal_margin(self):
        p, alpha, gamma, ell, j = 1.7, 0.8, 0.1, 0.3, 0
        margin = blowup_range_margin(p, alpha, gamma, ell, j)
        rep = lifespan_kappa(p, alpha, gamma, ell, j)
        assert abs(rep.value - 1.0 / margin) < 1e-12

    def test_outside_range_raises(self):
        with pytest.raises(OutsideBlowupRange):
            lifespan_kappa(5.0, 1.0, 0.0, 0.0, 0)  # far above critical

    def test_at_critical_raises(self):
        p_c = shifted_critical(1.0, 0.0, 0.0, 0).value
        with pytest.raises(OutsideBlowupRange):
            lifespan_kappa(p_c, 1.0, 0.0, 0.0, 0)
