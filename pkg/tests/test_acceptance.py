"""Acceptance criteria at full scale.

Each test carries an ``acceptance`` marker; the conftest summary hook prints
one PASS/FAIL line per criterion at the end of the run.
"""

import time

import numpy as np
import pytest
import sympy as sp
from scipy.optimize import least_squares

from skewloops import data, kernels
from skewloops.construct import build_cylinder_loop, construct_height, cylinder_margin, margin_function
from skewloops.curves import SmoothCurve, TrigCurve, apply_affine, circle, stretch
from skewloops.io import load_curve
from skewloops.oval import make_support_oval, support_parametrization
from skewloops.quadric import (
    QuadricModel,
    X_tilde,
    arclength_reparametrize,
    bisection_defect,
    connection_integral,
    homotopy_min_speed,
    noperiod_residual,
    planar_section,
    sphere_loop,
    symmetric_cylinder_witness,
)
from skewloops.trigpoly import TrigPoly
from skewloops.verify import (
    Status,
    defect,
    find_parallel_pair,
    perturbation_stability,
    stability_radius,
    verify_skew,
)

from conftest import random_sigma_loop, random_space_loop, random_sphere_loop, random_support

T = sp.symbols("t", real=True)


def sympy_coeffs(expr, degree):
    """Exact Fourier coefficients of a trigonometric polynomial expression."""
    a0 = sp.integrate(expr, (T, 0, 2 * sp.pi)) / (2 * sp.pi)
    cos = [sp.integrate(expr * sp.cos(k * T), (T, 0, 2 * sp.pi)) / sp.pi for k in range(1, degree + 1)]
    sin = [sp.integrate(expr * sp.sin(k * T), (T, 0, 2 * sp.pi)) / sp.pi for k in range(1, degree + 1)]
    return float(a0), np.array([float(c) for c in cos]), np.array([float(c) for c in sin])


def assert_coeffs(p, expected, atol):
    a0, cos, sin = expected
    q = p.padded(len(cos))
    assert abs(q.a0 - a0) <= atol
    assert np.abs(q.cos[: len(cos)] - cos).max() <= atol
    assert np.abs(q.sin[: len(sin)] - sin).max() <= atol
    assert np.abs(q.cos[len(cos) :]).max(initial=0.0) <= atol
    assert np.abs(q.sin[len(sin) :]).max(initial=0.0) <= atol


def dense_newton_pair(c, M=512):
    """Independent oracle: grid minimum of ``|T(t) x T(s)|`` polished by least squares."""
    t = c.grid(M)
    tau = c.tantrix(t)
    F = np.linalg.norm(np.cross(tau[:, None], tau[None, :]), axis=-1)
    i, j = np.indices(F.shape)
    d = np.abs(i - j)
    F[np.minimum(d, M - d) < M // 16] = np.inf
    k = np.unravel_index(np.argmin(F), F.shape)

    def residual(x):
        return np.cross(c.tantrix(np.array([x[0]]))[0], c.tantrix(np.array([x[1]]))[0])

    sol = least_squares(residual, [t[k[0]], t[k[1]]], xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return sol.x, float(np.linalg.norm(residual(sol.x)))


@pytest.mark.acceptance(1, "closed-form construction for h = 1 + 0.05 cos 3t")
def test_closed_form_construction():
    h_expr = 1 + sp.Rational(1, 20) * sp.cos(3 * T)
    v_expr = sp.expand(sp.diff(h_expr, T, 2) + h_expr)
    e_expr = sp.expand(sp.expand_trig((v_expr + v_expr.subs(T, T + sp.pi)) / 2))
    o_expr = sp.expand(v_expr - e_expr)
    g = sp.expand(o_expr**2 / (1 + e_expr))
    tau_expr = sp.integrate(g, (T, 0, sp.pi)) / sp.pi
    mu_expr = sp.expand(tau_expr - g)
    z_expr = sp.integrate(mu_expr - o_expr, T)
    z_expr = z_expr - sp.integrate(z_expr, (T, 0, 2 * sp.pi)) / (2 * sp.pi)
    q_expr = sp.expand(e_expr * mu_expr + o_expr**2)

    start = time.perf_counter()
    s = make_support_oval(TrigPoly(1.0, [0.0, 0.0, 0.05]))
    H = construct_height(s.v)
    q = margin_function(s.v, H.z)
    elapsed = time.perf_counter() - start

    assert_coeffs(s.v, sympy_coeffs(v_expr, 3), 1e-10)
    assert abs(H.tau - float(tau_expr)) <= 1e-10
    assert_coeffs(H.mu, sympy_coeffs(mu_expr, 6), 1e-10)
    assert_coeffs(H.z, sympy_coeffs(z_expr, 6), 1e-10)
    assert_coeffs(q, sympy_coeffs(q_expr, 6), 1e-10)
    # the oracle agrees with the stated closed forms
    assert float(tau_expr) == pytest.approx(0.04, abs=1e-15)
    assert sp.simplify(z_expr - (sp.Rational(2, 15) * sp.sin(3 * T) - sp.Rational(1, 150) * sp.sin(6 * T))) == 0
    assert sp.simplify(q_expr - (sp.Rational(2, 25) + sp.Rational(1, 25) * sp.cos(6 * T))) == 0
    assert elapsed < 1.0


@pytest.mark.acceptance(2, "50 random ovals: construct_height then CertifiedSkew")
def test_random_ovals_certified():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    for _ in range(50):
        s = random_support(rng, int(rng.integers(3, 9)))
        assert s.convexity.lower > 0.1
        H = construct_height(s.v)
        cert = verify_skew(build_cylinder_loop(s, H))
        assert cert.status is Status.CERTIFIED_SKEW
        assert cert.margin > 0
    assert time.perf_counter() - start < 120.0


@pytest.mark.acceptance(3, "verify_skew status agrees with the sign of cylinder_margin")
def test_margin_sign_iff():
    rng = np.random.default_rng(33)
    seen = set()
    for k in range(50):
        s = random_support(rng, int(rng.integers(3, 7)))
        kind = k % 3
        if kind == 0:
            z = construct_height(s.v).z
        elif kind == 1:
            noise = TrigPoly(0.0, rng.normal(size=4), rng.normal(size=4))
            z = construct_height(s.v).z + noise * (0.002 / noise.coeff_sum(1))
        else:
            z = TrigPoly(0.0, rng.normal(size=4) * 0.2, rng.normal(size=4) * 0.2)
        box = cylinder_margin(s.v, z)
        assert box.lower > 0 or box.upper <= 0, "margin sign must be decided"
        status = verify_skew(build_cylinder_loop(s, z, check_curvature=False)).status
        expected = Status.CERTIFIED_SKEW if box.lower > 0 else Status.NOT_SKEW
        assert status is expected
        seen.add(expected)
    assert seen == {Status.CERTIFIED_SKEW, Status.NOT_SKEW}


@pytest.mark.acceptance(4, "parallel tangents on 100 sphere loops and 50 loops on the hyperboloid")
def test_quadric_loops_have_parallel_tangents():
    rng = np.random.default_rng(4)
    # oracle first: independent dense grid + least squares on five loops
    for make in (random_sphere_loop, random_sphere_loop, random_sphere_loop, random_sigma_loop, random_sigma_loop):
        c = make(rng)
        x, res = dense_newton_pair(c)
        assert res < 1e-8
        assert defect(c, x[0], x[1]) < 1e-8
        assert find_parallel_pair(c)

    start = time.perf_counter()
    loops = [random_sphere_loop(rng) for _ in range(100)] + [random_sigma_loop(rng) for _ in range(50)]
    for c in loops:
        pairs = find_parallel_pair(c)
        assert pairs, "no parallel pair found"
        w = min(pairs, key=lambda p: p.defect)
        assert w.defect < 1e-8
        assert defect(c, w.t, w.s) < 1e-8
    assert time.perf_counter() - start < 300.0


@pytest.mark.acceptance(5, "no-period residual on 100 hyperboloid loops and the v0 = 1 circle")
def test_noperiod_residual():
    rng = np.random.default_rng(5)
    for _ in range(100):
        assert noperiod_residual(random_sigma_loop(rng)).residual < 1e-6

    v0 = 1.0
    ring = SmoothCurve(
        lambda t: X_tilde(t, np.full_like(t, v0)),
        lambda t: np.stack([-np.sin(t) * np.cosh(v0), np.cos(t) * np.cosh(v0), np.zeros_like(t)], -1),
    )
    expected = 2 * np.pi * np.sinh(1.0)
    assert expected == pytest.approx(7.3839, abs=2e-4)
    assert abs(abs(connection_integral(ring)) - expected) < 1e-8


@pytest.mark.acceptance(6, "Fenchel bisection defect on 50 spherical loops")
def test_bisection_defect():
    rng = np.random.default_rng(6)
    for _ in range(50):
        base = random_space_loop(rng, degree=3, scale=0.05)
        c = sphere_loop(base)
        assert bisection_defect(c) < 1e-4


@pytest.mark.acceptance(7, "figure-eight cylinder grid minimum and symmetric-base refutation")
def test_figure_eight_and_symmetric_bases():
    c = load_curve(data.path("figure_eight_cylinder.json"))
    M = 2048
    val, i, j = kernels.defect_grid_min(c.tantrix(c.grid(M)), M // 64)
    assert val > 0
    assert verify_skew(c).status is Status.NUMERICALLY_SKEW

    rng = np.random.default_rng(7)
    bases = [circle(), circle(2.5)]
    for _ in range(3):
        a, b = rng.uniform(0.5, 2.0, 2)
        bases.append(TrigCurve(TrigPoly(0.0, [a]), TrigPoly(0.0, [0.0], [b])))
    for base in bases:
        for _ in range(4):
            z = TrigPoly(0.0, rng.normal(size=5), rng.normal(size=5))
            w = symmetric_cylinder_witness(base, z)
            assert w.pair[1] - w.pair[0] == pytest.approx(0.5 * w.length, abs=1e-12)
            assert w.defect < 1e-8
    # circle base: the lift is a TrigCurve and verify_skew refutes it too
    for _ in range(5):
        z = TrigPoly(0.0, rng.normal(size=4), rng.normal(size=4))
        loop = build_cylinder_loop(make_support_oval(TrigPoly(1.0)), z, check_curvature=False)
        w = symmetric_cylinder_witness(circle(), z)
        assert defect(loop, w.pair[0], w.pair[1]) < 1e-8
        assert verify_skew(loop).status is Status.NOT_SKEW


def random_affine(rng):
    while True:
        A = rng.normal(size=(3, 3))
        if abs(np.linalg.det(A)) > 0.2 and np.linalg.cond(A) < 20:
            return A, rng.normal(size=3)


@pytest.mark.acceptance(8, "affine invariance of verify_skew status")
def test_affine_invariance(asym3_loop):
    rng = np.random.default_rng(8)
    oval = support_parametrization(make_support_oval(TrigPoly(1.0, [0.0, 0.2], [0.0, 0.0, 0.03]))).curve
    for c, expected in ((asym3_loop, Status.CERTIFIED_SKEW), (oval, Status.NOT_SKEW)):
        assert verify_skew(c).status is expected
        for _ in range(20):
            A, b = random_affine(rng)
            assert verify_skew(apply_affine(c, A, b)).status is expected


@pytest.mark.acceptance(9, "perturbation stability 1.0 at the stability radius")
def test_openness(asym3_loop):
    cert = verify_skew(asym3_loop)
    eps = stability_radius(cert)
    assert eps > 0
    assert perturbation_stability(asym3_loop, eps, trials=100, seed=9, base=cert) == 1.0


@pytest.mark.acceptance(10, "tantrix homotopy regular on a 512 x 512 grid")
def test_homotopy_regular():
    rng = np.random.default_rng(10)
    thetas = np.linspace(0.0, 0.5 * np.pi, 512)
    for _ in range(10):
        sigma = arclength_reparametrize(random_sphere_loop(rng))
        assert homotopy_min_speed(sigma, thetas=thetas, M=512) >= 1 - 1e-10


def random_ellipsoid(rng):
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    axes = tuple(rng.uniform(0.3, 3.0, 3))
    return QuadricModel("ellipsoid", axes, Q, rng.normal(size=3))


@pytest.mark.acceptance(11, "ellipsoid sections are centrally symmetric and stretching keeps statuses")
def test_ellipsoid_probe(asym3_loop):
    rng = np.random.default_rng(11)
    for _ in range(50):
        q = random_ellipsoid(rng)
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        # support of the ellipsoid in direction n
        reach = np.linalg.norm(np.diag(q.params) @ q.A.T @ n)
        d = float(n @ q.b) + rng.uniform(-0.9, 0.9) * reach
        sec = planar_section(q, n, d)
        assert sec.kind == "ellipse"
        assert sec.symmetry.asymmetry < 1e-10

    s = make_support_oval(TrigPoly(1.0, [0.0, 0.1], [0.0, 0.0, 0.04]))
    curves = [
        asym3_loop,
        build_cylinder_loop(s, construct_height(s.v)),
        support_parametrization(s).curve,
        build_cylinder_loop(make_support_oval(TrigPoly(1.0)), TrigPoly(0.0, [0.3], [0.0, 0.2])),
        TrigCurve(TrigPoly(0.0, [1.0]), TrigPoly(0.0, [0.0], [1.0]), TrigPoly(0.0, [0.0, 0.0, 0.1], [0.0, 0.2])),
    ]
    for c in curves:
        base = verify_skew(c).status
        assert base in (Status.CERTIFIED_SKEW, Status.NOT_SKEW)
        for factor in (2.0, 10.0):
            assert verify_skew(stretch(c, factor)).status is base
