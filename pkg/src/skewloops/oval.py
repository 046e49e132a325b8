"""Strictly convex planar ovals described by their support function.

An oval with support function ``h`` has the normal-angle parametrization
``gamma(t) = (h cos t - h' sin t, h sin t + h' cos t)``, whose speed is the
radius of curvature ``v = h'' + h``.  The oval is strictly convex exactly
when ``v > 0`` and centrally symmetric exactly when ``v`` has no odd
harmonics.
"""

from dataclasses import dataclass

import numpy as np

from .curves import TrigCurve
from .errors import NotStrictlyConvex
from .trigpoly import COS1, SIN1, BoundBox, TrigPoly, inf_bound, sup_bound

DEFAULT_SYMMETRY_TOL = 1e-12


def radius_of_curvature(h):
    """``v = h'' + h`` as a coefficient map: harmonic ``k`` scales by ``1 - k**2``."""
    k = np.arange(1, h.degree + 1, dtype=float)
    f = 1.0 - k * k
    return TrigPoly(h.a0, f * h.cos, f * h.sin)


@dataclass(frozen=True, eq=False)
class SupportFunction:
    h: TrigPoly
    v: TrigPoly
    convexity: BoundBox

    @property
    def strictly_convex(self):
        return self.convexity.lower > 0.0


@dataclass(frozen=True, eq=False)
class PlanarOval:
    x: TrigPoly
    y: TrigPoly
    asymmetry: float

    @property
    def curve(self):
        return TrigCurve(self.x, self.y, TrigPoly(0.0))

    def __call__(self, t):
        return np.stack([self.x(t), self.y(t)], axis=-1)


@dataclass(frozen=True, eq=False)
class SymmetryReport:
    symmetric: bool
    asymmetry: float
    v_odd: TrigPoly

    def to_dict(self):
        return {
            "symmetric": self.symmetric,
            "asymmetry": self.asymmetry,
            "v_odd": self.v_odd.to_dict(),
        }


def make_support_oval(h, tol=1e-12):
    """Wrap ``h`` with its radius of curvature and a certified bound on ``inf v``.

    Raises
    ------
    NotStrictlyConvex
        If ``inf v`` is not certified positive.
    """
    v = radius_of_curvature(h)
    box = inf_bound(v, tol=tol)
    if not box.lower > 0.0:
        raise NotStrictlyConvex(f"inf(h''+h) in [{box.lower:.6g}, {box.upper:.6g}]")
    return SupportFunction(h, v, box)


def _require_convex(s):
    if not s.strictly_convex:
        raise NotStrictlyConvex("support function is not certified strictly convex")


def support_parametrization(s):
    """Boundary curve ``(h + i h') e^{it}`` as exact trigonometric polynomials."""
    _require_convex(s)
    h, hp = s.h, s.h.derivative()
    x = h * COS1 - hp * SIN1
    y = h * SIN1 + hp * COS1
    return PlanarOval(x, y, symmetry_analysis(s).asymmetry)


def curvature_from_support(s, t):
    """Curvature ``1 / v(t)`` of the oval at normal angle ``t``."""
    _require_convex(s)
    return 1.0 / s.v(t)


def curvature_direct(oval, t):
    """``(x' y'' - y' x'') / |gamma'|^3`` evaluated on the parametrized oval."""
    xp, yp = oval.x.derivative(), oval.y.derivative()
    xpp, ypp = xp.derivative(), yp.derivative()
    num = xp(t) * ypp(t) - yp(t) * xpp(t)
    return num / np.hypot(xp(t), yp(t)) ** 3


def symmetry_analysis(s, tol=DEFAULT_SYMMETRY_TOL):
    """Odd part of ``v`` and its largest coefficient.

    ``v`` is pi-periodic (the oval is centrally symmetric) exactly when the
    odd part vanishes.  Index-1 terms of ``h`` are translations and drop out
    of ``v`` on their own.
    """
    _, v_odd = s.v.parity_split()
    asym = v_odd.max_coeff()
    return SymmetryReport(asym <= tol, asym, v_odd)


def oval_center(s):
    """Translation carried by the index-1 harmonic of ``h``.

    For a symmetric oval this is its centre of symmetry.
    """
    if s.h.degree == 0:
        return np.zeros(2)
    return np.array([s.h.cos[0], s.h.sin[0]])


def curvature_extremes(s, tol=1e-10):
    """Certified enclosures of ``min`` and ``max`` of the radius of curvature."""
    return inf_bound(s.v, tol=tol), sup_bound(s.v, tol=tol)
