"""Height functions that lift an asymmetric oval to a skew loop on its cylinder.

Write ``v = e + o`` (even and odd harmonics).  The graph loop
``gamma(t) + z(t) k`` is skew iff ``q = v_e z'_e - v_o z'_o`` never vanishes.
Choosing ``z'_o = -o`` and ``z'_e = mu`` with

    mu = tau - o**2 / (1 + e),    tau = mean(o**2 / (1 + e)),

gives ``q = e*mu + o**2 = e*tau + o**2 / (1 + e) > 0``.  ``mu`` is not a
trigonometric polynomial, so it is replaced by a Fourier projection and the
inequality is re-certified on the projection.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .curves import TrigCurve
from .errors import (
    FlatPoint,
    Nonpositive,
    OddPartZero,
    PreconditionError,
    ProjectionFailure,
    SymmetricBase,
)
from .oval import SupportFunction, support_parametrization
from .trigpoly import BoundBox, TrigPoly, inf_bound, sup_bound

log = logging.getLogger(__name__)

DEGREE_CAP = 512
QUADRATURE_TOL = 1e-13
ODD_TOL = 1e-14
# coefficients below the quadrature accuracy are dropped; the result is re-certified anyway
NOISE_FLOOR = 1e-15


@dataclass(frozen=True, eq=False)
class MuResult:
    mu: TrigPoly
    tau: float
    degree: int
    certificate: BoundBox


@dataclass(frozen=True, eq=False)
class HeightFunction:
    z: TrigPoly
    z_even: TrigPoly
    z_odd: TrigPoly
    mu: TrigPoly
    tau: float
    margin: BoundBox
    projection_degree: int
    log: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "z": self.z.to_dict(),
            "tau": self.tau,
            "mu": self.mu.to_dict(),
            "projection_degree": self.projection_degree,
            "margin": self.margin.to_dict(),
        }


def _has_parity(f, odd):
    k = np.arange(1, f.degree + 1)
    wrong = (k % 2 == 0) if odd else (k % 2 == 1)
    bad = max(np.abs(f.cos[wrong]).max(initial=0.0), np.abs(f.sin[wrong]).max(initial=0.0))
    if odd:
        bad = max(bad, abs(f.a0))
    return bad <= ODD_TOL


def _project(g, degree, m_start):
    """Fourier coefficients of ``g`` up to ``degree`` by doubling trapezoid rules."""
    M = max(m_start, 2 * degree + 2)
    M = 1 << int(np.ceil(np.log2(M)))
    prev = None
    while True:
        t = np.arange(M) * (2.0 * np.pi / M)
        p = TrigPoly.from_samples(g(t), degree)
        if prev is not None:
            diff = max(
                abs(p.a0 - prev.a0),
                float(np.abs(p.cos - prev.cos).max(initial=0.0)),
                float(np.abs(p.sin - prev.sin).max(initial=0.0)),
            )
            if diff <= QUADRATURE_TOL:
                return p, M
        if M > 1 << 20:
            return p, M
        prev = p
        M *= 2


def construct_mu(e, o, degree=None, degree_cap=DEGREE_CAP, cert_tol=1e-12):
    """Even, mean-zero ``mu`` with ``e*mu + o**2 > 0`` certified.

    Parameters
    ----------
    e, o : TrigPoly
        Even-harmonic and odd-harmonic functions with ``e + o > 0``.
    degree : int, optional
        Starting projection degree; defaults to ``4 * max(deg e, deg o)``.

    Returns
    -------
    MuResult

    Raises
    ------
    OddPartZero
        ``o`` vanishes identically.
    Nonpositive
        ``e + o`` is not certified positive.
    ProjectionFailure
        No projection up to ``degree_cap`` could be certified.
    """
    if not _has_parity(e, odd=False) or not _has_parity(o, odd=True):
        raise PreconditionError("e must carry only even harmonics and o only odd ones")
    if o.is_zero():
        raise OddPartZero("odd part vanishes; the oval is centrally symmetric")
    pos = inf_bound(e + o, tol=1e-12)
    if not pos.lower > 0.0:
        raise Nonpositive(f"inf(e+o) in [{pos.lower:.6g}, {pos.upper:.6g}]")

    o2 = o * o

    def g(t):
        return o2(t) / (1.0 + e(t))

    base = max(e.degree, o.degree, 1)
    D = degree or 4 * base
    M = 4 * D
    while True:
        D = min(D, degree_cap)
        proj, M = _project(g, D, M)
        tau = proj.a0
        # even harmonics only: o**2 and e are pi-periodic
        k = np.arange(1, D + 1)
        even = k % 2 == 0
        keep_c = even & (np.abs(proj.cos) > NOISE_FLOOR)
        keep_s = even & (np.abs(proj.sin) > NOISE_FLOOR)
        mu = TrigPoly(0.0, np.where(keep_c, -proj.cos, 0.0), np.where(keep_s, -proj.sin, 0.0)).trimmed()
        cert = inf_bound(e * mu + o2, tol=cert_tol)
        log.debug("projection degree %d: inf(e*mu+o^2) in [%g, %g]", D, cert.lower, cert.upper)
        if cert.lower > 0.0:
            return MuResult(mu, float(tau), D, cert)
        if D >= degree_cap:
            raise ProjectionFailure(
                f"degree cap {degree_cap} reached; inf(e*mu+o^2) in [{cert.lower:.3g}, {cert.upper:.3g}]"
            )
        D *= 2


def construct_height(v, **kw):
    """Height function ``z`` with ``v_e z'_e - v_o z'_o > 0`` certified.

    ``z_odd`` integrates ``-v_odd``; ``z_even`` integrates the ``mu`` of
    :func:`construct_mu` with ``e = v_even``, ``o = v_odd``.
    """
    v_even, v_odd = v.parity_split()
    if v_odd.is_zero():
        raise SymmetricBase("v has no odd harmonics: the base oval is symmetric")
    z_odd = (-v_odd).antiderivative()
    res = construct_mu(v_even, v_odd, **kw)
    z_even = res.mu.antiderivative()
    z = z_even + z_odd
    margin = inf_bound(v_even * res.mu + v_odd * v_odd, tol=1e-12)
    return HeightFunction(
        z=z,
        z_even=z_even,
        z_odd=z_odd,
        mu=res.mu,
        tau=res.tau,
        margin=margin,
        projection_degree=res.degree,
        log={"mu_certificate": res.certificate.to_dict()},
    )


def margin_function(v, z):
    """``q = v_e z'_e - v_o z'_o`` as a trigonometric polynomial."""
    v_even, v_odd = v.parity_split()
    zp_even, zp_odd = z.derivative().parity_split()
    return v_even * zp_even - v_odd * zp_odd


def cylinder_margin(v, z, tol=1e-12):
    """Enclosure of ``inf |q|`` when ``q`` keeps one sign.

    The graph loop is skew iff ``q`` never vanishes, so either ``q > 0`` or
    ``q < 0`` throughout.  The returned box encloses ``max(inf q, inf -q)``:
    its lower end is positive exactly when skewness is certified, and it is
    ``<= 0`` whenever ``q`` changes sign or touches zero.
    """
    q = margin_function(v, z)
    lo = inf_bound(q, tol=tol)
    if lo.upper > 0.0:
        return lo
    hi = sup_bound(q, tol=tol)
    neg = -hi
    return neg if neg.lower > lo.lower else lo


def _height_poly(z):
    return z.z if isinstance(z, HeightFunction) else z


def build_cylinder_loop(s, z, check_curvature=True):
    """Graph loop ``gamma(t) + z(t) k`` over the oval of ``s``.

    Raises :class:`FlatPoint` if ``inf |c' x c''|`` is not certified
    positive.
    """
    if not isinstance(s, SupportFunction):
        raise TypeError("expected a SupportFunction")
    oval = support_parametrization(s)
    loop = TrigCurve(oval.x, oval.y, _height_poly(z))
    if check_curvature:
        box = curvature_bound(loop)
        if not box.lower > 0.0:
            raise FlatPoint(f"inf |c' x c''|^2 in [{box.lower:.3g}, {box.upper:.3g}]")
    return loop


def cross_norm_sq(curve):
    """``|c' x c''|**2`` as a trigonometric polynomial."""
    d1 = curve.derivative_curve(1).components
    d2 = curve.derivative_curve(2).components
    cx = d1[1] * d2[2] - d1[2] * d2[1]
    cy = d1[2] * d2[0] - d1[0] * d2[2]
    cz = d1[0] * d2[1] - d1[1] * d2[0]
    return cx * cx + cy * cy + cz * cz


def curvature_bound(curve, tol=1e-10):
    """Certified enclosure of ``inf |c' x c''|**2``."""
    return inf_bound(cross_norm_sq(curve), tol=tol)
