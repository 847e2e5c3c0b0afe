"""Picture change u <-> v: round-trips, operators, residual convergence."""

import math

import numpy as np
import pytest

import blowlab.transform as tr
from blowlab.grids import SolutionGrid
from blowlab.model import DataProfile, ProblemSpec, catalog_field
from blowlab.solver import MeshConfig, clean_mask, simulate


def analytic_grid(dr=1.0 / 16.0, t_max=2.0, r_top=4.0, fun=None):
    dt = 0.5 * dr
    times = np.arange(0.0, t_max + 0.5 * dt, dt)
    r = np.arange(0.0, r_top + 0.5 * dr, dr)
    T, R = np.meshgrid(times, r, indexing="ij")
    if fun is None:
        fun = lambda T, R: np.cos(1.3 * T) * np.exp(-0.5 * R ** 2)
    return SolutionGrid(times=times, r=r, values=fun(T, R), dt=dt, dr=dr,
                        r_max=float(r[-1]), meta={"n": 3})


class TestRoundTrip:
    @pytest.mark.parametrize("name,params", [
        ("zero", ()),
        ("scale_invariant", (1.0, 1.0)),
        ("log_growth_U", (0.5,)),
    ])
    def test_to_u_undoes_to_v(self, name, params):
        field = catalog_field(name, params)
        g = analytic_grid()
        back = tr.to_u(tr.to_v(g, field), field)
        assert np.max(np.abs(back.values - g.values)) < 1e-12

    def test_to_v_divides_by_weight(self):
        field = catalog_field("scale_invariant", (1.0, 1.0))
        g = analytic_grid()
        v = tr.to_v(g, field)
        i, k = 5, 7
        w = float(field.g(g.times[i])) + float(field.u(g.r[k]))
        assert abs(v.values[i, k] - g.values[i, k] * math.exp(-w)) < 1e-14

    def test_huge_weight_switches_to_log_sign(self):
        # potential so large that e^U overflows float64: the transform must
        # hand back log-magnitude plus sign instead of inf
        field = catalog_field("superlog_U", (5.0,))
        dt = 0.5
        times = np.array([0.0, 0.5, 1.0])
        r = np.array([0.0, 5e7, 1e8])
        vals = np.full((3, 3), 2.0)
        vals[1, 1] = -2.0
        g = SolutionGrid(times=times, r=r, values=vals, dt=dt, dr=5e7,
                         r_max=1e8, meta={}, encoding="linear")
        u = tr.to_u(g, field)
        assert u.encoding == "log-sign"
        assert np.all(np.isfinite(u.values))
        # at r = 0 the weight is 0: log|u| = log 2 recoverable
        assert abs(u.values[0, 0] - math.log(2.0)) < 1e-12
        assert u.signs[1, 1] == -1.0


class TestDataVelocities:
    def test_v_picture_velocity_is_scaled_data(self):
        # the size hypothesis lives on the transformed unknown: v_t(0) = eps v1
        spec = ProblemSpec(n=3, p=2.0, j=0, eps=0.4, field=catalog_field("zero"))
        r = np.array([0.0, 1.0, 4.0])
        got = tr.data_velocity_v(spec, r)
        want = 0.4 * spec.field.data(r)
        assert np.max(np.abs(got - want)) < 1e-15

    def test_u_picture_carries_spatial_weight(self):
        # u = e^(G+U) v and v(0) = 0, so u_t(0) = e^U v_t(0)
        field = catalog_field("log_growth_U", (0.5,))
        spec = ProblemSpec(n=3, p=2.0, j=0, eps=0.4, field=field)
        r = np.array([0.5, 2.0, 7.0])
        got = tr.data_velocity_u(spec, r)
        want = np.exp(np.asarray(field.u(r))) * tr.data_velocity_v(spec, r)
        assert np.max(np.abs(got - want)) < 1e-14


class TestRadialOperators:
    def test_zero_field_operators_are_classical(self):
        ops = tr.RadialOperatorSet(catalog_field("zero"), n=3)
        v = np.array([[1.0, 2.0], [3.0, 4.0]])
        v_t = np.array([[0.5, 0.1], [0.2, 0.3]])
        v_tt = np.array([[0.7, 0.8], [0.9, 1.0]])
        t = np.array([[1.0], [2.0]])
        assert np.array_equal(ops.tilde_dt(v, v_t, t), v_t)
        assert np.array_equal(ops.tilde_dtt(v, v_t, v_tt, t), v_tt)
        v_r = np.array([[0.5, 0.1], [0.2, 0.3]])
        v_rr = np.array([[0.7, 0.8], [0.9, 1.0]])
        r = np.array([[1.0, 2.0]])
        lap = ops.tilde_laplacian_radial(v, v_r, v_rr, r)
        assert np.max(np.abs(lap - (v_rr + (2.0 / r) * v_r))) < 1e-15

    def test_perturbed_first_derivative_adds_a0(self):
        field = catalog_field("scale_invariant", (2.0, 0.0))
        ops = tr.RadialOperatorSet(field, n=3)
        v = np.array([[1.0]])
        v_t = np.array([[0.0]])
        t = np.array([[3.0]])
        # D_t v = v_t + A0(t) v; A0(3) = 2/(2*4) = 0.25
        assert abs(float(ops.tilde_dt(v, v_t, t)[0, 0]) - 0.25) < 1e-14


class TestShapeIdentity:
    def test_matching_a0_strips_shape(self):
        t = np.linspace(0.0, 3.0, 3001)
        dev = tr.shape_identity_check(lambda s: np.exp(-s), np.sin, t)
        assert dev < 5e-6  # centered differences at dt = 1e-3

    def test_explicit_a0_matches_derived(self):
        t = np.linspace(0.0, 3.0, 3001)
        dev = tr.shape_identity_check(lambda s: np.exp(-s), np.sin, t,
                                      a0=lambda s: np.ones_like(np.asarray(s)))
        assert dev < 5e-6

    def test_wrong_a0_fails_loudly(self):
        t = np.linspace(0.0, 3.0, 3001)
        dev = tr.shape_identity_check(lambda s: np.exp(-s), np.sin, t,
                                      a0=lambda s: np.zeros_like(np.asarray(s)))
        assert dev > 1e-2

    def test_vanishing_shape_rejected(self):
        t = np.linspace(0.0, 3.0, 101)
        with pytest.raises(ValueError):
            tr.shape_identity_check(np.sin, np.cos, t)


class TestResiduals:
    def setup_method(self):
        self.field = catalog_field("scale_invariant", (1.0, 1.0))
        self.spec = ProblemSpec(n=3, p=2.0, j=0, eps=0.5, field=self.field)

    def exact_residual(self, t, r):
        T, R = np.meshgrid(t, r, indexing="ij")
        u = np.cos(1.3 * T) * np.exp(-0.5 * R ** 2)
        u_tt = -1.69 * u
        u_r = -R * u
        u_rr = (R ** 2 - 1.0) * u
        lhs = u_tt - u_rr - (2.0 / R) * u_r
        w = (np.asarray(self.field.g(T), dtype=float)
             + np.asarray(self.field.u(R), dtype=float))
        h = np.asarray(self.field.h(T, R), dtype=float)
        return lhs - h * u - np.exp(w) * np.abs(np.exp(-w) * u) ** 2.0

    def test_classical_residual_matches_analytic(self):
        g = analytic_grid(dr=1.0 / 32.0)
        t_int, r_int, resid = tr.residual_classical(g, self.spec)
        ex = self.exact_residual(t_int, r_int)
        keep = r_int <= 3.0
        assert np.max(np.abs(resid[:, keep] - ex[:, keep])) < 2e-3

    def test_classical_residual_order_two(self):
        errs = []
        for dr in (1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0):
            g = analytic_grid(dr=dr)
            t_int, r_int, resid = tr.residual_classical(g, self.spec)
            ex = self.exact_residual(t_int, r_int)
            keep = r_int <= 3.0
            errs.append(float(np.max(np.abs(resid[:, keep] - ex[:, keep]))))
        order = math.log2(errs[0] / errs[2]) / 2.0
        assert 1.8 < order < 2.2

    def test_cross_picture_residual_vanishes_at_order_two(self):
        errs = []
        for dr in (1.0 / 8.0, 1.0 / 16.0):
            mesh = MeshConfig(dr=dr, boundary_free=True, r_obs=2.0, store_every=1)
            gu = simulate(self.spec, mesh, 2.0, mode="transformed_u")
            t_int, r_int, res = tr.residual_perturbed(tr.to_v(gu, self.field),
                                                      self.spec)
            keep = (r_int > 0.2) & (r_int <= 3.0)
            tsel = t_int >= 0.25
            errs.append(float(np.sqrt(np.mean(res[np.ix_(tsel, keep)] ** 2))))
        order = math.log2(errs[0] / errs[1])
        assert 1.7 < order < 2.3

    def test_residual_requires_linear_encoding(self):
        g = analytic_grid()
        bad = SolutionGrid(times=g.times, r=g.r, values=g.values, dt=g.dt,
                           dr=g.dr, r_max=g.r_max, meta={}, encoding="log-sign",
                           signs=np.ones_like(g.values))
        with pytest.raises(ValueError):
            tr.residual_classical(bad, self.spec)

    def test_residual_rejects_tiny_grids(self):
        times = np.array([0.0, 0.1])
        r = np.array([0.0, 0.5])
        g = SolutionGrid(times=times, r=r, values=np.zeros((2, 2)), dt=0.1,
                         dr=0.5, r_max=0.5, meta={})
        with pytest.raises(ValueError):
            tr.residual_classical(g, self.spec)
