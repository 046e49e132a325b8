import math

import numpy as np
import pytest

from skewloops import data
from skewloops.construct import build_cylinder_loop
from skewloops.curves import SampledCurve, TrigCurve, apply_affine, circle
from skewloops.errors import FlatPoint, NotImmersed, PreconditionError, Unsupported, ZeroVelocity
from skewloops.io import load_curve
from skewloops.oval import make_support_oval
from skewloops.trigpoly import TrigPoly
from skewloops.verify import (
    SkewCertificate,
    Status,
    defect,
    derivative_bounds,
    diagonal_band,
    find_parallel_pair,
    perturbation_stability,
    polish,
    stability_radius,
    verify_skew,
)


def tilted_ellipse():
    return TrigCurve(TrigPoly(0.3, [2.0]), TrigPoly(0.0, [0.5], [1.0]), TrigPoly(0.0, [0.2], [-0.4]))


def grid_defect(c, n, band):
    t = c.grid(n)
    tau = c.tantrix(t)
    F = np.linalg.norm(np.cross(tau[:, None], tau[None, :]), axis=-1)
    i, j = np.indices(F.shape)
    d = np.abs(i - j)
    d = np.minimum(d, n - d) * (2 * np.pi / n)
    return F[d >= band].min()


@pytest.fixture(scope="module")
def asym3_cert(asym3_loop):
    return verify_skew(asym3_loop)


class TestDefect:
    def test_circle_examples(self):
        assert defect(circle(), 0.0, np.pi) == pytest.approx(0.0, abs=1e-15)
        assert defect(circle(), 0.0, np.pi / 2) == pytest.approx(1.0, abs=1e-15)

    def test_symmetry_and_diagonal(self, rng, asym3_loop):
        t, s = rng.uniform(0, 2 * np.pi, (2, 200))
        np.testing.assert_allclose(defect(asym3_loop, t, s), defect(asym3_loop, s, t), atol=1e-15)
        np.testing.assert_allclose(defect(asym3_loop, t, t), 0.0, atol=1e-15)

    def test_figure_eight_cylinder_value(self):
        c = load_curve(data.path("figure_eight_cylinder.json"))
        # samples start at x = -pi, so curve parameter t is x + pi
        def tangent(x):
            u = x / np.pi
            return np.array([-np.sin(x), 2 * np.cos(2 * x), (1 - 15 * u**14) / np.pi])

        a, b = tangent(-np.pi), tangent(-np.pi / 2)
        expected = np.linalg.norm(np.cross(a, b)) / np.linalg.norm(a) / np.linalg.norm(b)
        value = defect(c, 0.0, np.pi / 2)
        assert 0 < value <= 1
        assert value == pytest.approx(expected, abs=1e-12)

    def test_zero_velocity(self):
        with pytest.raises(ZeroVelocity):
            defect(TrigCurve(TrigPoly(1.0), TrigPoly(0.0), TrigPoly(0.0)), 0.0, 1.0)


class TestDerivativeBounds:
    def test_circle(self):
        b = derivative_bounds(circle(), tol=1e-10)
        assert 1.0 <= b.B1 <= 1 + 1e-10
        assert 1 - 1e-10 <= b.m1 <= 1.0

    def test_tilted_circle(self):
        c = TrigCurve(TrigPoly(0, [1.0]), TrigPoly(0, [0.0], [1.0]), TrigPoly(0, [0.0, 0.0], [0.0, 0.1]))
        b = derivative_bounds(c)
        # true sup is sqrt(1.04); the coefficient estimate gives sqrt(1.16)
        assert math.sqrt(1.04) <= b.B1 <= math.sqrt(1 + 0.04 * 4) + 1e-9

    def test_bounds_dominate_samples(self, asym3_loop):
        b = derivative_bounds(asym3_loop)
        t = asym3_loop.grid(4096)
        assert b.B1 >= asym3_loop.speed(t).max()
        assert b.m1 <= asym3_loop.speed(t).min()
        assert b.B2 >= np.linalg.norm(asym3_loop.acceleration(t), axis=1).max()

    def test_constant_curve(self):
        with pytest.raises(NotImmersed):
            derivative_bounds(TrigCurve(TrigPoly(1.0), TrigPoly(2.0), TrigPoly(3.0)))

    def test_sampled_unsupported(self):
        c = circle()
        s = SampledCurve(c.position(c.grid(32)), c.velocity(c.grid(32)))
        with pytest.raises(Unsupported):
            derivative_bounds(s)


class TestDiagonalBand:
    def test_unit_circle(self):
        band = diagonal_band(circle())
        assert band.delta >= 1.0
        assert band.m_kappa == pytest.approx(1.0, abs=1e-9)

    def test_segment_is_flat(self):
        with pytest.raises(FlatPoint):
            diagonal_band(TrigCurve(TrigPoly(0.0, [1.0]), TrigPoly(0.0), TrigPoly(0.0)))

    def test_constructed_loop(self, asym3_loop):
        band = diagonal_band(asym3_loop)
        assert band.delta > 0 and band.constant > 0

    def test_band_estimate_holds(self, asym3_loop):
        band = diagonal_band(asym3_loop)
        t = np.random.default_rng(1).uniform(0, 2 * np.pi, 10**5)
        h = np.random.default_rng(2).uniform(-band.delta, band.delta, 10**5)
        raw = np.linalg.norm(np.cross(asym3_loop.velocity(t), asym3_loop.velocity(t + h)), axis=1)
        assert np.all(raw >= band.constant * np.abs(h) - 1e-12)


class TestVerifySkew:
    def test_planar_oval(self):
        cert = verify_skew(tilted_ellipse())
        assert cert.status is Status.NOT_SKEW
        w = cert.witness
        assert w.defect < 1e-12
        sep = abs(w.s - w.t) % (2 * np.pi)
        assert min(sep, 2 * np.pi - sep) == pytest.approx(np.pi, abs=1e-6)

    def test_constructed_loop(self, asym3_cert, asym3_loop):
        assert asym3_cert.status is Status.CERTIFIED_SKEW
        assert asym3_cert.certified and asym3_cert.margin > 0
        # on antipodal pairs the defect is 2|q| / (|c'(t)| |c'(t+pi)|), and inf q = 0.04
        b = derivative_bounds(asym3_loop)
        t = asym3_loop.grid(4096)
        antipodal = defect(asym3_loop, t, t + np.pi)
        assert antipodal.min() >= 2 * 0.04 / b.B1**2 - 1e-12
        assert asym3_cert.margin <= antipodal.min()

    def test_margin_sound(self, asym3_cert, asym3_loop):
        assert asym3_cert.margin <= grid_defect(asym3_loop, 1024, asym3_cert.band_width)

    def test_band_sampling_positive(self, asym3_cert, asym3_loop):
        rng = np.random.default_rng(3)
        t = rng.uniform(0, 2 * np.pi, 10**5)
        h = rng.uniform(1e-9, asym3_cert.band_width, 10**5) * rng.choice([-1, 1], 10**5)
        assert np.all(defect(asym3_loop, t, t + h) > 0)

    def test_round_circle_sine_height(self):
        c = build_cylinder_loop(make_support_oval(TrigPoly(1.0)), TrigPoly.harmonic(1, b=1.0))
        cert = verify_skew(c)
        assert cert.status is Status.NOT_SKEW
        w = cert.witness
        assert defect(c, w.t, w.s) < 1e-12

    def test_non_planar_not_skew(self):
        c = build_cylinder_loop(make_support_oval(TrigPoly(1.0)), TrigPoly(0.0, [0.0, 0.3], [0.0, 0.2]))
        assert verify_skew(c).status is Status.NOT_SKEW

    def test_budget_exhaustion(self, asym3_loop):
        cert = verify_skew(asym3_loop, budget=100)
        assert cert.status is Status.INCONCLUSIVE
        assert cert.margin is None

    def test_workers_agree(self, asym3_loop, asym3_cert):
        cert = verify_skew(asym3_loop, workers=4)
        assert cert.status is asym3_cert.status
        assert abs(cert.margin - asym3_cert.margin) <= 1e-15

    def test_deterministic(self, asym3_loop, asym3_cert):
        again = verify_skew(asym3_loop)
        assert again.to_dict() == asym3_cert.to_dict()

    def test_invariances(self, asym3_loop):
        rng = np.random.default_rng(7)
        A = rng.normal(size=(3, 3)) + 2 * np.eye(3)
        for c in (asym3_loop.reparametrize(0.37), asym3_loop.reparametrize(reverse=True), apply_affine(asym3_loop, A, [1, 2, 3])):
            assert verify_skew(c).status is Status.CERTIFIED_SKEW

    def test_certificate_roundtrip(self, asym3_cert):
        back = SkewCertificate.from_dict(asym3_cert.to_dict())
        assert back.to_dict() == asym3_cert.to_dict()
        for key in ("B1", "B2", "B3", "m1", "m_kappa", "defect_sensitivity"):
            assert key in asym3_cert.constants

    def test_type_checked(self):
        with pytest.raises(TypeError):
            verify_skew(TrigPoly(1.0))


class TestSampled:
    def test_figure_eight_cylinder_numerically_skew(self):
        c = load_curve(data.path("figure_eight_cylinder.json"))
        cert = verify_skew(c)
        assert cert.status is Status.NUMERICALLY_SKEW
        assert not cert.certified and cert.margin > 0

    def test_sampled_planar_refuted(self):
        c = tilted_ellipse()
        s = SampledCurve(c.position(c.grid(512)), c.velocity(c.grid(512)))
        cert = verify_skew(s)
        assert cert.status is Status.NOT_SKEW and not cert.certified


class TestFindParallelPair:
    def test_latitude_circle(self):
        pairs = find_parallel_pair(circle(0.6, 0.8))
        assert pairs
        for w in pairs:
            sep = abs(w.s - w.t)
            assert min(sep, 2 * np.pi - sep) == pytest.approx(np.pi, abs=1e-6)
            assert w.defect < 1e-10

    def test_constructed_loop_has_none(self, asym3_loop):
        assert find_parallel_pair(asym3_loop) == []

    def test_deduplicated(self):
        pairs = find_parallel_pair(tilted_ellipse(), seeds=64)
        keys = {(round(w.t, 5), round(w.s, 5)) for w in pairs}
        assert len(keys) == len(pairs)
        assert all(w.t <= w.s for w in pairs)

    def test_polish_converges(self):
        w = polish(tilted_ellipse(), 0.1, 0.1 + np.pi + 0.05)
        assert w.defect < 1e-13


class TestPerturbation:
    def test_stable_at_radius(self, asym3_loop, asym3_cert):
        eps = stability_radius(asym3_cert)
        assert perturbation_stability(asym3_loop, eps, trials=6, base=asym3_cert) == 1.0

    def test_zero_eps(self, asym3_loop, asym3_cert):
        assert perturbation_stability(asym3_loop, 0.0, base=asym3_cert) == 1.0

    def test_rejects_planar(self):
        with pytest.raises(PreconditionError):
            perturbation_stability(tilted_ellipse(), 1e-3)
