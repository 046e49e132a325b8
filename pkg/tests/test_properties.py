"""Invariants checked on generated inputs."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from skewloops.construct import build_cylinder_loop, construct_height, cylinder_margin
from skewloops.curves import TrigCurve, apply_affine
from skewloops.oval import make_support_oval, support_parametrization, symmetry_analysis
from skewloops.quadric import X, X_tilde, arclength_reparametrize, frame, homotopy_min_speed, q_form
from skewloops.trigpoly import TrigPoly, inf_bound, sup_bound
from skewloops.verify import Status, defect, verify_skew

from conftest import random_sphere_loop, random_support

coeff = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)


@st.composite
def trigpolys(draw, max_degree=10, mean=True):
    n = draw(st.integers(0, max_degree))
    a0 = draw(coeff) if mean else 0.0
    c = draw(arrays(float, n, elements=coeff))
    s = draw(arrays(float, n, elements=coeff))
    return TrigPoly(a0, c, s)


seeds = st.integers(0, 2**32 - 1)


class TestTrigPolyProperties:
    @given(trigpolys(mean=False))
    def test_derivative_inverts_antiderivative(self, f):
        assert f.antiderivative().derivative().allclose(f, atol=1e-15)

    @given(trigpolys(), arrays(float, 64, elements=st.floats(-100, 100)))
    def test_half_shift_identities(self, f, t):
        e, o = f.parity_split()
        assert (e + o).allclose(f, atol=0.0)
        np.testing.assert_allclose(f(t + np.pi), e(t) - o(t), atol=1e-12)
        np.testing.assert_allclose(f.half_shift()(t), f(t + np.pi), atol=1e-12)

    @given(trigpolys(max_degree=12))
    @settings(max_examples=25)
    def test_enclosures_contain_fine_grid(self, f):
        M = 10 * max(32, 8 * f.degree) * 4
        vals = f(np.arange(M) * (2 * np.pi / M))
        hi, lo = sup_bound(f, tol=1e-9), inf_bound(f, tol=1e-9)
        assert lo.lower <= vals.min() and hi.upper >= vals.max()
        assert hi.lower <= hi.upper and lo.lower <= lo.upper


class TestCurveProperties:
    @given(seeds)
    def test_orthogonal_maps_preserve_speed(self, seed):
        rng = np.random.default_rng(seed)
        c = TrigCurve(*(TrigPoly(0.0, rng.normal(size=4), rng.normal(size=4)) for _ in range(3)))
        Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        t = rng.uniform(0, 2 * np.pi, 200)
        np.testing.assert_allclose(apply_affine(c, Q, rng.normal(size=3)).speed(t), c.speed(t), atol=1e-12)


class TestOvalProperties:
    @given(seeds, st.integers(3, 8))
    def test_speed_is_radius_of_curvature(self, seed, degree):
        s = random_support(np.random.default_rng(seed), degree)
        o = support_parametrization(s)
        t = np.linspace(0, 2 * np.pi, 2000)
        np.testing.assert_allclose(np.hypot(o.x.derivative()(t), o.y.derivative()(t)), s.v(t), atol=1e-10)

    @given(seeds, st.floats(-1, 1), st.floats(-1, 1))
    def test_translation(self, seed, a, b):
        s = random_support(np.random.default_rng(seed), 5)
        s2 = make_support_oval(s.h + TrigPoly(0.0, [a], [b]))
        assert s2.v.allclose(s.v, atol=1e-15)
        t = np.linspace(0, 2 * np.pi, 50)
        d = support_parametrization(s2)(t) - support_parametrization(s)(t)
        np.testing.assert_allclose(d, np.tile([a, b], (50, 1)), atol=1e-12)
        assert symmetry_analysis(s2).asymmetry == symmetry_analysis(s).asymmetry


class TestConstructProperties:
    @given(seeds, st.integers(3, 8))
    @settings(max_examples=15)
    def test_parity_and_margin(self, seed, degree):
        rng = np.random.default_rng(seed)
        s = random_support(rng, degree)
        H = construct_height(s.v)
        t = rng.uniform(0, 2 * np.pi, 500)
        np.testing.assert_allclose(H.z_odd(t + np.pi), -H.z_odd(t), atol=1e-12)
        np.testing.assert_allclose(H.z_even(t + np.pi), H.z_even(t), atol=1e-12)
        e, o = s.v.parity_split()
        assert inf_bound(e * H.mu + o * o).lower > 0
        assert cylinder_margin(s.v, H.z).lower > 0

    @given(seeds)
    @settings(max_examples=12)
    def test_margin_sign_matches_verification(self, seed):
        rng = np.random.default_rng(seed)
        s = random_support(rng, 5)
        z = TrigPoly(0.0, rng.normal(size=4) * 0.2, rng.normal(size=4) * 0.2)
        if rng.uniform() < 0.5:
            z = construct_height(s.v).z + z * 0.01
        box = cylinder_margin(s.v, z)
        loop = build_cylinder_loop(s, z, check_curvature=False)
        status = verify_skew(loop).status
        if box.lower > 0:
            assert status is Status.CERTIFIED_SKEW
        elif box.upper <= 0:
            assert status is Status.NOT_SKEW


class TestVerifyProperties:
    @given(seeds, st.floats(0, 2 * np.pi), st.booleans())
    @settings(max_examples=10)
    def test_status_invariance(self, seed, shift, reverse):
        rng = np.random.default_rng(seed)
        s = random_support(rng, 4)
        loop = build_cylinder_loop(s, construct_height(s.v))
        base = verify_skew(loop)
        assert base.status is Status.CERTIFIED_SKEW
        assert verify_skew(loop.reparametrize(shift, reverse)).status is base.status
        t = loop.grid(512)
        F = np.linalg.norm(np.cross(loop.tantrix(t)[:, None], loop.tantrix(t)[None, :]), axis=-1)
        i, j = np.indices(F.shape)
        d = np.abs(i - j)
        d = np.minimum(d, 512 - d) * (2 * np.pi / 512)
        assert base.margin <= F[d >= base.band_width].min()

    @given(seeds)
    def test_defect_symmetric(self, seed):
        rng = np.random.default_rng(seed)
        c = TrigCurve(*(TrigPoly(0.0, rng.normal(size=3), rng.normal(size=3)) for _ in range(3)))
        t, s = rng.uniform(0, 2 * np.pi, (2, 50))
        np.testing.assert_allclose(defect(c, t, s), defect(c, s, t), atol=1e-15)
        assert np.all(defect(c, t, s) <= 1 + 1e-15)


class TestQuadricProperties:
    @given(arrays(float, 100, elements=st.floats(-np.pi, np.pi)), arrays(float, 100, elements=st.floats(-3, 3)))
    def test_parametrizations(self, u, v):
        scale = np.cosh(v) ** 2
        assert np.all(np.abs(q_form(X(u, v), X(u, v)) + 1) <= 1e-14 * scale)
        assert np.all(np.abs(q_form(X_tilde(u, v), X_tilde(u, v)) - 1) <= 1e-14 * scale)
        ep, em = frame(u, v)
        assert np.all(np.abs(q_form(ep, em)) <= 1e-12 * scale)

    @given(seeds)
    @settings(max_examples=10)
    def test_homotopy_regular(self, seed):
        sigma = arclength_reparametrize(random_sphere_loop(np.random.default_rng(seed)))
        assert homotopy_min_speed(sigma, M=256) >= 1 - 1e-10
