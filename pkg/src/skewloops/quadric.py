"""Loops on positively curved quadrics and the invariants that obstruct skewness.

The Lorentzian form ``Q(x, y) = x1 y1 + x2 y2 - x3 y3`` makes the upper
sheet ``Sigma = {Q(x, x) = -1, z > 0}`` Riemannian, with unit-speed
directions living on the one-sheeted ``Sigma~ = {Q(x, x) = 1}``.  In the
coordinates

    X(u, v)  = (cos u sinh v, sin u sinh v, cosh v)     on Sigma,
    X~(u, v) = (cos u cosh v, sin u cosh v, sinh v)     on Sigma~,

the frame ``e+ = X~_u / cosh v``, ``e- = X~_v`` has connection form
``omega = -sinh v du``.  The Q-tantrix of any loop on ``Sigma`` has
``int omega = 0``; on the sphere the analogous form is ``-sin v du`` with
``v`` the latitude.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .curves import (
    SampledCurve,
    SmoothCurve,
    SpaceCurve,
    TrigCurve,
    apply_affine,
    periodic_derivative,
    stretch,
)
from .errors import (
    NoSignChange,
    NotEmbedded,
    NotImmersed,
    NotOnSurface,
    NotUnitSpeed,
    NullVelocity,
    PoleCrossing,
    PreconditionError,
    TangentPlane,
)
from .oval import make_support_oval, symmetry_analysis
from .trigpoly import TWO_PI, TrigPoly
from .verify import defect

log = logging.getLogger(__name__)

SURFACE_TOL = 1e-8
POLE_TOL = 1e-6
QUAD_TOL = 1e-12
MAX_NODES = 1 << 18

LORENTZ = np.array([1.0, 1.0, -1.0])


# -- Lorentzian geometry -----------------------------------------------------


def q_form(x, y):
    """``x1 y1 + x2 y2 - x3 y3`` over the last axis."""
    return np.sum(np.asarray(x, dtype=float) * LORENTZ * np.asarray(y, dtype=float), axis=-1)


def X(u, v):
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    return np.stack([np.cos(u) * np.sinh(v), np.sin(u) * np.sinh(v), np.cosh(v)], axis=-1)


def X_tilde(u, v):
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    return np.stack([np.cos(u) * np.cosh(v), np.sin(u) * np.cosh(v), np.sinh(v)], axis=-1)


def frame(u, v):
    """``(e+, e-)`` at ``X~(u, v)``: Q-orthonormal with signatures ``+1`` and ``-1``."""
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    e_plus = np.stack([-np.sin(u), np.cos(u), np.zeros_like(u)], axis=-1)
    e_minus = np.stack([np.cos(u) * np.sinh(v), np.sin(u) * np.sinh(v), np.cosh(v)], axis=-1)
    return e_plus, e_minus


def sigma_coords(p):
    """``(u, v)`` with ``X~(u, v) = p`` for points of ``Sigma~``."""
    p = np.asarray(p, dtype=float)
    return np.arctan2(p[..., 1], p[..., 0]), np.arcsinh(p[..., 2])


# -- quadric models ----------------------------------------------------------


@dataclass(frozen=True)
class QuadricModel:
    """Standard quadric ``y^T M y + 2 l.y + c = 0`` mapped by ``x = A y + b``.

    ``kind`` is one of ``ellipsoid`` (parameters ``a, b, c``),
    ``paraboloid`` (``z = x^2 + y^2``), ``sigma`` (upper sheet of
    ``x^2 + y^2 - z^2 = -1``) and ``approx_ellipsoid`` (parameter ``r``,
    ``x^2 + y^2 + (z/2r - r)^2 = r^2``).
    """

    kind: str
    params: tuple = ()
    A: np.ndarray = field(default_factory=lambda: np.eye(3))
    b: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if self.kind not in ("ellipsoid", "paraboloid", "sigma", "approx_ellipsoid"):
            raise ValueError(f"unknown quadric kind {self.kind!r}")
        if self.kind == "ellipsoid" and (len(self.params) != 3 or min(self.params) <= 0):
            raise ValueError("ellipsoid needs three positive semi-axes")
        if self.kind == "approx_ellipsoid" and (len(self.params) != 1 or self.params[0] <= 0):
            raise ValueError("approx_ellipsoid needs r > 0")
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))

    @classmethod
    def sphere(cls):
        return cls("ellipsoid", (1.0, 1.0, 1.0))

    def standard_form(self):
        """``(M, l, c)`` of the untransformed quadric."""
        if self.kind == "ellipsoid":
            a, b, c = self.params
            return np.diag([a**-2, b**-2, c**-2]), np.zeros(3), -1.0
        if self.kind == "paraboloid":
            return np.diag([1.0, 1.0, 0.0]), np.array([0.0, 0.0, -0.5]), 0.0
        if self.kind == "sigma":
            return np.diag([1.0, 1.0, -1.0]), np.zeros(3), 1.0
        r = self.params[0]
        return np.diag([1.0, 1.0, 0.25 / r**2]), np.array([0.0, 0.0, -0.5]), 0.0

    def to_standard(self, x):
        return np.linalg.solve(self.A, (np.asarray(x, dtype=float) - self.b).T).T

    def residual(self, x):
        y = self.to_standard(x)
        M, l, c = self.standard_form()
        return np.einsum("...i,ij,...j->...", y, M, y) + 2 * y @ l + c

    def to_dict(self):
        return {"kind": self.kind, "params": list(self.params), "A": self.A.tolist(), "b": self.b.tolist()}


# -- loops on surfaces -------------------------------------------------------


def _normalized_curve(c, norm_sq, bilinear, name):
    """``p / N(p)`` with ``N(p)**2 = norm_sq(p)`` and exact first two derivatives."""

    def parts(t):
        p, p1 = c.position(t), c.velocity(t)
        n2 = norm_sq(p)
        if np.any(n2 <= 0.0):
            raise NotOnSurface("radial projection undefined: N(p)^2 <= 0")
        N = np.sqrt(n2)[..., None]
        return p, p1, N

    def pos(t):
        p, _, N = parts(t)
        return p / N

    def vel(t):
        p, p1, N = parts(t)
        u = p / N
        N1 = bilinear(u, p1)[..., None]
        return (p1 - u * N1) / N

    def acc(t):
        p, p1, N = parts(t)
        p2 = c.acceleration(t)
        u = p / N
        N1 = bilinear(u, p1)[..., None]
        u1 = (p1 - u * N1) / N
        N2 = ((bilinear(p1, p1) + bilinear(p, p2))[..., None] - N1 * N1) / N
        return (p2 - 2 * u1 * N1 - u * N2) / N

    return SmoothCurve(pos, vel, acc, c.period, name)


def _euclid(a, b):
    return np.sum(a * b, axis=-1)


def _neg_q(a, b):
    return -q_form(a, b)


def sphere_loop(c):
    """Radial projection ``p / |p|`` of a loop avoiding the origin onto ``S^2``."""
    return _normalized_curve(c, lambda p: _euclid(p, p), _euclid, "sphere")


def sigma_loop(c):
    """Projection ``p / sqrt(-Q(p, p))`` onto ``Sigma``; needs ``z > sqrt(x^2 + y^2)``."""
    z = c.position(c.grid(1024))[:, 2]
    if np.any(z <= 0):
        raise NotOnSurface("loop leaves the upper half-space")
    return _normalized_curve(c, lambda p: _neg_q(p, p), _neg_q, "sigma")


def sigma_graph_loop(u, v, winding=1):
    """Loop ``X(winding t + u(t), v(t))`` on ``Sigma`` for trigonometric ``u``, ``v``."""
    u1, u2 = u.derivative(), u.derivative(2)
    v1, v2 = v.derivative(), v.derivative(2)

    def uv(t):
        return winding * t + u(t), v(t)

    def pos(t):
        a, b = uv(t)
        return X(a, b)

    def _basis(a, b):
        ca, sa, ch, sh = np.cos(a), np.sin(a), np.cosh(b), np.sinh(b)
        z = np.zeros_like(a)
        Xu = np.stack([-sa * sh, ca * sh, z], -1)
        Xv = np.stack([ca * ch, sa * ch, sh], -1)
        Xuu = np.stack([-ca * sh, -sa * sh, z], -1)
        Xuv = np.stack([-sa * ch, ca * ch, z], -1)
        Xvv = np.stack([ca * sh, sa * sh, ch], -1)
        return Xu, Xv, Xuu, Xuv, Xvv

    def vel(t):
        t = np.asarray(t, dtype=float)
        a, b = uv(t)
        Xu, Xv, *_ = _basis(a, b)
        du, dv = np.asarray(winding + u1(t)), np.asarray(v1(t))
        return Xu * du[..., None] + Xv * dv[..., None]

    def acc(t):
        t = np.asarray(t, dtype=float)
        a, b = uv(t)
        Xu, Xv, Xuu, Xuv, Xvv = _basis(a, b)
        du, dv = np.asarray(winding + u1(t))[..., None], np.asarray(v1(t))[..., None]
        ddu, ddv = np.asarray(u2(t))[..., None], np.asarray(v2(t))[..., None]
        return Xuu * du**2 + 2 * Xuv * du * dv + Xvv * dv**2 + Xu * ddu + Xv * ddv

    return SmoothCurve(pos, vel, acc, TWO_PI, "sigma")


def paraboloid_loop(x, y):
    """Exact loop ``(x, y, x^2 + y^2)`` on the paraboloid ``z = x^2 + y^2``."""
    return TrigCurve(x, y, x * x + y * y)


def project_loop(model, c):
    """Put the loop ``c`` onto ``model``.

    Central quadrics use radial projection from the centre, the paraboloid
    uses vertical projection; the model's affine map is applied last.
    """
    moved = not np.allclose(model.A, np.eye(3)) or bool(np.any(model.b))
    if moved:
        A_inv = np.linalg.inv(model.A)
        c = apply_affine(c, A_inv, -A_inv @ model.b)
    if model.kind == "ellipsoid":
        s = np.array(model.params)
        on = apply_affine(sphere_loop(apply_affine(c, np.diag(1.0 / s))), np.diag(s))
    elif model.kind == "sigma":
        on = sigma_loop(c)
    elif model.kind == "paraboloid":
        if not isinstance(c, TrigCurve):
            raise TypeError("paraboloid projection needs a trigonometric loop")
        on = paraboloid_loop(c.x, c.y)
    else:
        r = model.params[0]
        # ellipsoid centred at (0, 0, 2 r^2) with semi-axes (r, r, 2 r^2)
        centre = np.array([0.0, 0.0, 2 * r * r])
        scale = np.array([r, r, 2 * r * r])
        unit = sphere_loop(apply_affine(c, np.diag(1.0 / scale), -centre / scale))
        on = apply_affine(unit, np.diag(scale), centre)
    if moved:
        on = apply_affine(on, model.A, model.b)
    return on


# -- Q-tantrix and the connection form ----------------------------------------


def _check_sigma(p, tol):
    err = np.abs(q_form(p, p) + 1.0).max()
    if err > tol or np.any(p[..., 2] <= 0):
        raise NotOnSurface(f"|Q(p,p)+1| reaches {err:.3g} or z <= 0")


def _samples(c, M):
    t = c.grid(M)
    P, V = c.position(t), c.velocity(t)
    try:
        A = c.acceleration(t)
    except Exception:
        A = periodic_derivative(V, c.period)
    return t, P, V, A


def q_tantrix(sigma, M=2048, tol=SURFACE_TOL):
    """Q-normalized velocity ``sigma' / sqrt(Q(sigma', sigma'))`` as a sampled loop on ``Sigma~``.

    Raises
    ------
    NotOnSurface
        If the samples are not on ``Sigma``.
    NullVelocity
        If ``Q(sigma', sigma')`` is not positive.
    """
    if isinstance(sigma, SampledCurve):
        M = sigma.size
    _, P, V, A = _samples(sigma, M)
    _check_sigma(P, tol)
    qq = q_form(V, V)
    if np.any(qq <= 1e-300):
        raise NullVelocity("velocity is not spacelike")
    n = np.sqrt(qq)[:, None]
    T = V / n
    dT = (A - q_form(A, T)[:, None] * T) / n
    return SampledCurve(T, dT, sigma.period)


def _node_quadrature(values, period, tol):
    """Trapezoid sums on nested node subsets; returns the full sum and an error estimate."""
    M = values.shape[0]
    full = float(values.sum() * period / M)
    if M % 2:
        return full, math.inf
    half = float(values[::2].sum() * period / (M // 2))
    return full, abs(full - half)


def _adaptive(integrand, period, tol, start=64):
    M = start
    prev = None
    while True:
        t = np.arange(M) * (period / M)
        val = float(integrand(t).sum() * period / M)
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val, abs(val - prev)
        if M >= MAX_NODES:
            return val, abs(val - prev)
        prev = val
        M *= 2


def _du_integrand(P, V, pole_tol):
    r2 = P[..., 0] ** 2 + P[..., 1] ** 2
    if np.any(r2 <= pole_tol):
        raise PoleCrossing(f"curve passes within {math.sqrt(r2.min()):.3g} of the axis")
    return -P[..., 2] * (P[..., 0] * V[..., 1] - P[..., 1] * V[..., 0]) / r2


def connection_integral(alpha, tol=QUAD_TOL, surface_tol=SURFACE_TOL, return_error=False):
    """``int_alpha omega`` with ``omega = -sinh v du`` on ``Sigma~``.

    Pulled back, the integrand is ``-z (x y' - y x') / (x^2 + y^2)``.
    Sampled loops use their nodes (trapezoid, error from the half-node
    rule); other loops double the trapezoid rule until it settles.
    """
    if isinstance(alpha, SampledCurve):
        P, V = alpha.positions, alpha.velocities
        _check_tilde(P, surface_tol)
        val, err = _node_quadrature(_du_integrand(P, V, 0.5), alpha.period, tol)
    else:
        _check_tilde(alpha.position(alpha.grid(256)), surface_tol)

        def f(t):
            return _du_integrand(alpha.position(t), alpha.velocity(t), 0.5)

        val, err = _adaptive(f, alpha.period, tol)
    return (val, err) if return_error else val


def _check_tilde(P, tol):
    err = np.abs(q_form(P, P) - 1.0).max()
    if err > tol:
        raise NotOnSurface(f"|Q(p,p)-1| reaches {err:.3g}")


def _antipodal_gap(P):
    """``min_{i,j} |P_i + P_j|`` in blocks."""
    best = math.inf
    for a in range(0, P.shape[0], 512):
        blk = P[a : a + 512]
        d = np.linalg.norm(blk[:, None, :] + P[None, :, :], axis=-1)
        best = min(best, float(d.min()))
    return best


@dataclass
class NoPeriodReport:
    residual: float
    integral: float
    quadrature_error: float
    embedded: bool
    antipodal_disjoint: bool
    annulus_area: float = None
    signed_area: float = None
    note: str = ""

    def __float__(self):
        return self.residual

    def to_dict(self):
        return dict(self.__dict__)


def noperiod_residual(sigma, M=1024, tol=1e-10):
    """``|int omega|`` over the Q-tantrix of a loop on ``Sigma``, plus the annulus side.

    When the Q-tantrix is embedded, disjoint from its antipode and a graph
    ``v = f(u)``, the region between it and its antipode has area
    ``int |sinh f(u) + sinh f(u - pi)| du > 0`` while Stokes would force the
    signed area ``-2 int omega`` to vanish.  Otherwise the report says which
    hypothesis fails.  Smooth loops are resampled with doubled ``M`` until
    the half-node error estimate drops below ``tol``.
    """
    while True:
        alpha = q_tantrix(sigma, M)
        val, err = connection_integral(alpha, tol, return_error=True)
        if err <= max(tol, 1e-14 * abs(val)) or isinstance(sigma, SampledCurve) or M >= MAX_NODES:
            break
        M *= 2
    # topology tests on at most 2048 nodes; their cost is quadratic
    P = alpha.positions[:: max(1, alpha.size // 2048)]
    S = P / np.linalg.norm(P, axis=1, keepdims=True)
    embedded = kernels.sphere_polyline_crossing(S) == (-1, -1)
    seg = float(np.linalg.norm(np.diff(S, axis=0, append=S[:1]), axis=1).max())
    disjoint = _antipodal_gap(S) > 4 * seg
    rep = NoPeriodReport(abs(val), val, err, bool(embedded), bool(disjoint))
    if not (embedded and disjoint):
        failed = "embeddedness" if not embedded else "antipodal disjointness"
        rep.note = f"Q-tantrix fails {failed}; annulus argument does not apply"
        return rep
    u, v = sigma_coords(P)
    du = np.diff(np.unwrap(np.append(u, u[0] + 0.0)))
    if not (np.all(du > 0) or np.all(du < 0)):
        rep.note = "Q-tantrix is not a graph over u; annulus area not computed"
        return rep
    uu = np.unwrap(u)
    order = np.argsort(np.mod(uu, TWO_PI))
    us, vs = np.mod(uu, TWO_PI)[order], v[order]
    grid = np.linspace(0.0, TWO_PI, 4 * M, endpoint=False)
    f = np.interp(grid, us, vs, period=TWO_PI)
    g = np.interp(np.mod(grid - np.pi, TWO_PI), us, vs, period=TWO_PI)
    h = TWO_PI / grid.size
    rep.annulus_area = float(np.abs(np.sinh(f) + np.sinh(g)).sum() * h)
    rep.signed_area = -2.0 * val
    rep.note = "annulus area is positive while Stokes requires the signed area to vanish"
    return rep


# -- sphere ------------------------------------------------------------------


def _check_sphere(P, tol):
    err = np.abs(np.linalg.norm(P, axis=-1) - 1.0).max()
    if err > tol:
        raise NotOnSurface(f"||p| - 1| reaches {err:.3g}")


def _tantrix_jets(c, t):
    V = c.velocity(t)
    try:
        A = c.acceleration(t)
    except Exception:
        A = periodic_derivative(V, c.period)
    n = np.linalg.norm(V, axis=-1, keepdims=True)
    if np.any(n == 0):
        raise NotImmersed("velocity vanishes")
    T = V / n
    return T, (A - np.sum(A * T, axis=-1, keepdims=True) * T) / n


def rotation_avoiding_poles(c, M=1024, seed=0, tries=64):
    """Rotation matrix that keeps the tantrix of ``c`` away from ``(0, 0, +-1)``."""
    T = _tantrix_jets(c, c.grid(M))[0]
    rng = np.random.default_rng(seed)
    best, best_R = np.min(T[:, 0] ** 2 + T[:, 1] ** 2), np.eye(3)
    for _ in range(tries):
        Q, R = np.linalg.qr(rng.standard_normal((3, 3)))
        Q = Q * np.sign(np.diag(R))
        if np.linalg.det(Q) < 0:
            Q[:, 0] = -Q[:, 0]
        TT = T @ Q.T
        score = np.min(TT[:, 0] ** 2 + TT[:, 1] ** 2)
        if score > best:
            best, best_R = score, Q
    return best_R


@dataclass
class SphereConnectionReport:
    residual: float
    integral: float
    winding: int
    quadrature_error: float
    rotation: list

    def __float__(self):
        return self.residual

    def to_dict(self):
        return dict(self.__dict__)


def sphere_connection_residual(sigma, tol=QUAD_TOL, rotate=False, pole_tol=POLE_TOL):
    """Connection-form residual ``int_tau (-sin v du)`` for the tantrix of a sphere loop.

    The frame along the tantrix can turn a whole number of times, so the
    integral is determined modulo ``2 pi``; the residual is the distance to
    ``2 pi Z`` and the raw value and winding are reported alongside.

    Raises
    ------
    PoleCrossing
        If the tantrix passes through a pole and ``rotate`` is false.
    """
    _check_sphere(sigma.position(sigma.grid(512)), SURFACE_TOL)
    R = np.eye(3)
    if rotate:
        R = rotation_avoiding_poles(sigma)

    def f(t):
        T, dT = _tantrix_jets(sigma, t)
        return _du_integrand(T @ R.T, dT @ R.T, pole_tol)

    val, err = _adaptive(f, sigma.period, tol)
    n = int(round(val / TWO_PI))
    return SphereConnectionReport(abs(val - n * TWO_PI), val, n, err, R.tolist())


def bisection_defect(sigma, M=1024, tol=1e-10, return_report=False):
    """``|area - 2 pi|`` for the region bounded by the tantrix of a sphere loop.

    The area comes from Gauss-Bonnet, ``2 pi - int kappa_g ds``, with the
    geodesic curvature integral ``int det(T, T', T'') / |T'|^2 dt``.  ``T'``
    is exact when the loop has a second derivative; ``T''`` is spectral.

    Raises
    ------
    NotEmbedded
        If the tantrix polyline crosses itself.
    """
    _check_sphere(sigma.position(sigma.grid(512)), SURFACE_TOL)
    prev = None
    while True:
        t = sigma.grid(M)
        T, dT = _tantrix_jets(sigma, t)
        ddT = periodic_derivative(dT, sigma.period)
        kg = np.einsum("ij,ij->i", T, np.cross(dT, ddT)) / np.einsum("ij,ij->i", dT, dT)
        total = float(kg.sum() * sigma.period / M)
        if prev is not None and abs(total - prev) <= tol:
            break
        if M >= 1 << 16:
            break
        prev = total
        M *= 2
    hit = kernels.sphere_polyline_crossing(T)
    if hit != (-1, -1):
        raise NotEmbedded(f"tantrix crosses itself near t={t[hit[0]]:.6g} and t={t[hit[1]]:.6g}")
    area = TWO_PI - total
    out = abs(area - TWO_PI)
    if return_report:
        return out, {"area": area, "geodesic_curvature_integral": total, "nodes": M}
    return out


# -- arclength and the homotopy to the tantrix --------------------------------


def arclength_reparametrize(c, tol=1e-10, M=256):
    """Unit-speed reparametrization of a smooth loop.

    The speed is expanded in a Fourier series (doubling ``M`` until the
    length settles), integrated exactly, and the arclength map inverted by
    Newton to ``tol``.  Returns a :class:`SmoothCurve` of period ``L``.
    """
    prev = None
    while True:
        t = c.grid(M)
        sp = c.speed(t)
        if np.any(sp <= 0):
            raise NotImmersed("speed vanishes")
        speed = TrigPoly.from_samples(sp, M // 2 - 1)
        scale = c.period / TWO_PI
        L = speed.a0 * c.period
        tail = np.abs(speed.cos[-8:]).max() + np.abs(speed.sin[-8:]).max()
        if prev is not None and abs(L - prev) <= 1e-14 * L and tail < 1e-15 * speed.a0:
            break
        if M >= 1 << 16:
            break
        prev = L
        M *= 2
    osc = (speed - speed.a0).antiderivative()

    def S(u):
        # arclength at parameter u * scale, u the 2 pi normalized parameter
        return scale * (speed.a0 * u + osc(u))

    def invert(s):
        s = np.asarray(s, dtype=float)
        k = np.floor(s / L)
        r = s - k * L
        u = r / (scale * speed.a0)
        for _ in range(50):
            err = S(u) - r
            u = u - err / (scale * speed(u))
            if np.max(np.abs(err), initial=0.0) <= tol * 1e-2:
                break
        return (u + k * TWO_PI) * scale

    def pos(s):
        return c.position(invert(s))

    def vel(s):
        v = c.velocity(invert(s))
        return v / np.linalg.norm(v, axis=-1, keepdims=True)

    def acc(s):
        tt = invert(s)
        v = c.velocity(tt)
        a = c.acceleration(tt)
        n = np.linalg.norm(v, axis=-1, keepdims=True)
        T = v / n
        return (a - np.sum(a * T, axis=-1, keepdims=True) * T) / n**2

    try:
        c.acceleration(np.array([0.0]))
        has_acc = True
    except Exception:
        has_acc = False
    return SmoothCurve(pos, vel, acc if has_acc else None, float(L), "arclength")


def _require_unit_speed(sigma, tol=1e-8):
    sp = sigma.speed(sigma.grid(1024))
    err = float(np.abs(sp - 1.0).max())
    if err > tol:
        raise NotUnitSpeed(f"speed deviates from 1 by {err:.3g}")


def tantrix_homotopy(sigma, theta):
    """``sigma cos(theta) + sigma' sin(theta)`` for a unit-speed sphere loop.

    ``theta = 0`` gives the loop and ``theta = pi/2`` its tantrix.  For each
    ``theta`` the curve is immersed with speed ``sqrt(1 + kappa_g^2 sin^2 theta)``.
    """
    _require_unit_speed(sigma)
    c, s = math.cos(theta), math.sin(theta)

    def pos(t):
        return c * sigma.position(t) + s * sigma.velocity(t)

    def vel(t):
        return c * sigma.velocity(t) + s * sigma.acceleration(t)

    return SmoothCurve(pos, vel, None, sigma.period, f"homotopy({theta:g})")


def homotopy_min_speed(sigma, thetas=None, M=1024):
    """Minimum speed of the homotopy over a ``(theta, t)`` grid.

    The loop is sampled once; each ``theta`` is a linear combination of the
    stored first and second derivatives.
    """
    _require_unit_speed(sigma)
    thetas = np.linspace(0.0, 0.5 * np.pi, 17) if thetas is None else np.asarray(thetas, dtype=float)
    t = sigma.grid(M)
    V, A = sigma.velocity(t), sigma.acceleration(t)
    best = math.inf
    for th in thetas:
        sp = np.linalg.norm(math.cos(th) * V + math.sin(th) * A, axis=1)
        best = min(best, float(sp.min()))
    return best


# -- planar sections ---------------------------------------------------------


def _plane_basis(n):
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    a = np.eye(3)[int(np.argmin(np.abs(n)))]
    e1 = a - (a @ n) * n
    e1 /= np.linalg.norm(e1)
    return n, e1, np.cross(n, e1)


@dataclass
class PlaneSection:
    kind: str
    center: np.ndarray = None
    basis: tuple = None
    h_squared: TrigPoly = None
    support: object = None
    symmetry: object = None

    @property
    def empty(self):
        return self.kind == "empty"

    def to_dict(self):
        if self.empty:
            return {"kind": "empty"}
        return {
            "kind": self.kind,
            "center": self.center.tolist(),
            "basis": [b.tolist() for b in self.basis],
            "h_squared_centered": self.h_squared.to_dict(),
            "support": self.support.h.to_dict(),
            "symmetry": self.symmetry.to_dict(),
        }


def _sqrt_projection(h2, tol=1e-15, cap=1024):
    """Fourier projection of ``sqrt(h2)`` with degree doubled until the tail is negligible."""
    D = 16
    while True:
        M = 4 * D
        t = np.arange(M) * (TWO_PI / M)
        p = TrigPoly.from_samples(np.sqrt(h2(t)), D)
        tail = max(np.abs(p.cos[D // 2 :]).max(), np.abs(p.sin[D // 2 :]).max())
        floor = tol * max(1.0, p.a0)
        if tail <= floor or D >= cap:
            # drop FFT noise
            return TrigPoly(p.a0, np.where(np.abs(p.cos) > 0.1 * floor, p.cos, 0.0),
                            np.where(np.abs(p.sin) > 0.1 * floor, p.sin, 0.0)).trimmed()
        D *= 2


def planar_section(q, n, d, tol=1e-12):
    """Intersection of ``q`` with the plane ``n . x = d``.

    A compact section is an ellipse ``(w - w0)^T G (w - w0) = k`` in an
    orthonormal plane basis; its centred support function satisfies
    ``h_c^2 = e^T (k G^-1) e``, an exact degree-2 trigonometric polynomial.
    ``h`` itself is ``<w0, e> + sqrt(h_c^2)`` projected to the degree needed
    for machine precision.

    Raises
    ------
    TangentPlane
        If the plane touches the quadric in a single point.
    """
    norm = float(np.linalg.norm(n))
    n, e1, e2 = _plane_basis(n)
    x0 = (d / norm) * n
    M, l, c = q.standard_form()
    Ainv = np.linalg.inv(q.A)
    y0 = Ainv @ (x0 - q.b)
    F = Ainv @ np.column_stack([e1, e2])
    G = F.T @ M @ F
    g = F.T @ (M @ y0 + l)
    k0 = float(y0 @ M @ y0 + 2 * l @ y0 + c)
    ev = np.linalg.eigvalsh(G)
    scale = max(1.0, np.abs(G).max(), abs(k0))
    if ev.min() * ev.max() <= (tol * scale) ** 2:
        return PlaneSection("empty")
    if ev.max() < 0:
        G, g, k0 = -G, -g, -k0
    w0 = -np.linalg.solve(G, g)
    k = float(-g @ w0 - k0)
    if abs(k) <= tol * scale:
        raise TangentPlane("plane meets the quadric in a single point")
    if k < 0:
        return PlaneSection("empty")
    if q.kind == "sigma":
        y = y0 + F @ w0
        if y[2] <= 0:
            return PlaneSection("empty")
    P = k * np.linalg.inv(G)
    h2 = TrigPoly(0.5 * (P[0, 0] + P[1, 1]), [0.0, 0.5 * (P[0, 0] - P[1, 1])], [0.0, P[0, 1]])
    hc = _sqrt_projection(h2)
    h = hc + TrigPoly(0.0, [w0[0]], [w0[1]])
    s = make_support_oval(h)
    center = x0 + w0[0] * e1 + w0[1] * e2
    return PlaneSection("ellipse", center, (e1, e2), h2, s, symmetry_analysis(s))


def paraboloid_ellipsoid_gap(r, R=1.0, M=2001):
    """Largest vertical gap over ``x^2 + y^2 <= R^2`` between ``z = x^2 + y^2``
    and the lower cap of ``x^2 + y^2 + (z/2r - r)^2 = r^2``.

    The cap is ``z = 2 r rho^2 / (r + sqrt(r^2 - rho^2))``, so the gap is
    ``rho^2 |2r / (r + sqrt(r^2 - rho^2)) - 1|``.
    """
    if R > r:
        raise ValueError("disk radius must not exceed r")
    rho = np.linspace(0.0, R, M)
    gap = rho**2 * np.abs(2 * r / (r + np.sqrt(r * r - rho**2)) - 1.0)
    return float(gap.max())


# -- arclength symmetry ------------------------------------------------------


@dataclass
class ArclengthSymmetry:
    defect: float
    center: np.ndarray
    length: float

    def to_dict(self):
        return {"defect": self.defect, "center": self.center.tolist(), "length": self.length}


def _planar(c):
    if hasattr(c, "curve") and not isinstance(c, SpaceCurve):
        return c.curve
    return c


def arclength_symmetry_defect(gamma, M=4096):
    """How far a planar loop is from ``c(s + L/2) = 2p - c(s)`` in arclength.

    Returns the defect ``max |c(s + L/2) + c(s) - 2p| / 2`` at
    ``p = mean((c(s) + c(s + L/2)) / 2)``; zero characterizes arclength
    symmetry.
    """
    unit = arclength_reparametrize(_planar(gamma))
    M += M % 2
    s = unit.grid(M)
    P = unit.position(s)[:, :2]
    Q = np.roll(P, -M // 2, axis=0)
    mid = 0.5 * (P + Q)
    p = mid.mean(axis=0)
    dev = float(np.linalg.norm(mid - p, axis=1).max())
    return ArclengthSymmetry(dev, p, unit.period)


@dataclass
class CylinderWitness:
    t0: float
    pair: tuple
    defect: float
    length: float

    def to_dict(self):
        return {"t0": self.t0, "pair": list(self.pair), "defect": self.defect, "length": self.length}


def symmetric_cylinder_witness(gamma, z, sym_tol=1e-8, M=4096):
    """Parallel tangents forced on a cylinder over an arclength-symmetric base.

    ``z`` is a trigonometric polynomial in the normalized arclength angle
    ``phi = 2 pi s / L``.  ``g(phi) = z'(phi) + z'(phi + pi)`` has zero mean
    over a half period, so it vanishes somewhere; at such ``phi0`` the
    tangents at ``s0`` and ``s0 + L/2`` are antiparallel.

    Returns the first grid zero of ``g`` or the first bracketed root.

    Raises
    ------
    PreconditionError
        If the base is not arclength symmetric.
    NoSignChange
        If no root is found (which would contradict the argument above).
    """
    sym = arclength_symmetry_defect(gamma)
    if sym.defect > sym_tol:
        raise PreconditionError(f"base is not arclength symmetric (defect {sym.defect:.3g})")
    zp = z.derivative()
    g = zp + zp.half_shift()
    phi = np.linspace(0.0, np.pi, M, endpoint=False)
    vals = g(phi)
    floor = 1e-13 * max(1.0, zp.coeff_sum(0))
    zero = np.nonzero(np.abs(vals) <= floor)[0]
    change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if zero.size and (not change.size or zero[0] <= change[0]):
        root = float(phi[zero[0]])
    elif change.size:
        a, b = phi[change[0]], phi[change[0] + 1]
        fa = vals[change[0]]
        for _ in range(200):
            m = 0.5 * (a + b)
            fm = g(m)
            if fm == 0 or b - a < 1e-16:
                break
            if np.sign(fm) == np.sign(fa):
                a, fa = m, fm
            else:
                b = m
        root = 0.5 * (a + b)
    else:
        raise NoSignChange("z'(phi) + z'(phi + pi) has no root; this contradicts the mean value argument")

    unit = arclength_reparametrize(_planar(gamma))
    L = unit.period
    k = TWO_PI / L

    def pos(s):
        s = np.asarray(s, dtype=float)
        P = unit.position(s)
        return np.concatenate([P[..., :2], np.asarray(z(k * s))[..., None]], axis=-1)

    def vel(s):
        s = np.asarray(s, dtype=float)
        V = unit.velocity(s)
        return np.concatenate([V[..., :2], np.asarray(k * zp(k * s))[..., None]], axis=-1)

    lifted = SmoothCurve(pos, vel, None, L, "cylinder")
    s0 = root / k
    f = defect(lifted, s0, s0 + 0.5 * L)
    if f >= 1e-8:
        raise NoSignChange(f"root found but defect {f:.3g} is not small")
    return CylinderWitness(s0, (s0, s0 + 0.5 * L), float(f), L)


__all__ = [
    "q_form",
    "X",
    "X_tilde",
    "frame",
    "sigma_coords",
    "QuadricModel",
    "sphere_loop",
    "sigma_loop",
    "sigma_graph_loop",
    "paraboloid_loop",
    "project_loop",
    "q_tantrix",
    "connection_integral",
    "NoPeriodReport",
    "noperiod_residual",
    "rotation_avoiding_poles",
    "SphereConnectionReport",
    "sphere_connection_residual",
    "bisection_defect",
    "arclength_reparametrize",
    "tantrix_homotopy",
    "homotopy_min_speed",
    "PlaneSection",
    "planar_section",
    "paraboloid_ellipsoid_gap",
    "ArclengthSymmetry",
    "arclength_symmetry_defect",
    "CylinderWitness",
    "symmetric_cylinder_witness",
    "stretch",
]
