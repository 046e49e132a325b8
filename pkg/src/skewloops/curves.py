"""Closed space curves and their evaluation.

Three backends share one interface (``position``, ``velocity``,
``acceleration``, ``tantrix`` and a ``period``):

* :class:`TrigCurve` -- three :class:`TrigPoly` components; exact calculus,
  the only backend whose verification results are certified.
* :class:`SampledCurve` -- C^1 data: positions and velocities at uniform
  parameters, joined by cubic Hermite interpolation.
* :class:`SmoothCurve` -- user-supplied callables for position and its first
  two derivatives (radial projections onto quadrics, arclength
  reparametrizations).
"""

import warnings

import numpy as np

from . import kernels
from .errors import (
    NotImmersed,
    SingularMatrixWarning,
    Unsupported,
    ZeroFactor,
    ZeroVelocity,
)
from .trigpoly import TWO_PI, TrigPoly

ZERO_SPEED = 1e-300


def _as_t(t):
    return np.asarray(t, dtype=float)


def _unit(v, t=None):
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(n <= ZERO_SPEED):
        raise ZeroVelocity(f"velocity vanishes at t={t!r}")
    return v / n


class SpaceCurve:
    """Common interface; subclasses supply ``position`` and ``velocity``."""

    period = TWO_PI
    certified = False

    def position(self, t):
        raise NotImplementedError

    def velocity(self, t):
        raise NotImplementedError

    def acceleration(self, t):
        raise Unsupported(f"{type(self).__name__} stores no second derivative")

    def tantrix(self, t):
        return _unit(self.velocity(t), t)

    def speed(self, t):
        return np.linalg.norm(self.velocity(t), axis=-1)

    def grid(self, M):
        """``M`` uniform parameters covering one period."""
        return np.arange(M) * (self.period / M)

    def affine(self, A, b):
        raise NotImplementedError


class TrigCurve(SpaceCurve):
    """Analytic closed curve ``t -> (x(t), y(t), z(t))`` of period ``2 pi``."""

    certified = True

    def __init__(self, x, y, z=None):
        self.components = (x, y, z if z is not None else TrigPoly(0.0))
        self._jets = {}

    @property
    def x(self):
        return self.components[0]

    @property
    def y(self):
        return self.components[1]

    @property
    def z(self):
        return self.components[2]

    @property
    def degree(self):
        return max(c.degree for c in self.components)

    def derivative_curve(self, order=1):
        return TrigCurve(*(c.derivative(order) for c in self.components))

    def _jet(self, order):
        # coefficient matrices of the order-th derivative, padded to common degree
        if order not in self._jets:
            N = self.degree
            comps = [c.derivative(order).padded(N) for c in self.components]
            self._jets[order] = (
                np.array([c.a0 for c in comps]),
                np.vstack([c.cos for c in comps]) if N else np.zeros((3, 0)),
                np.vstack([c.sin for c in comps]) if N else np.zeros((3, 0)),
            )
        return self._jets[order]

    def jets(self, t, orders=(0, 1, 2)):
        """Derivatives of the listed orders at ``t``; each of shape ``t.shape + (3,)``."""
        t = _as_t(t)
        parts = [self._jet(k) for k in orders]
        a0 = np.concatenate([p[0] for p in parts])
        C = np.vstack([p[1] for p in parts])
        S = np.vstack([p[2] for p in parts])
        vals = kernels.trig_eval(a0, C, S, t.reshape(-1))
        out = []
        for i in range(len(orders)):
            out.append(vals[3 * i : 3 * i + 3].T.reshape(t.shape + (3,)))
        return out

    def position(self, t):
        return self.jets(t, (0,))[0]

    def velocity(self, t):
        return self.jets(t, (1,))[0]

    def acceleration(self, t):
        return self.jets(t, (2,))[0]

    def affine(self, A, b):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        comps = []
        for i in range(3):
            f = TrigPoly(b[i])
            for j in range(3):
                if A[i, j] != 0.0:
                    f = f + self.components[j] * A[i, j]
            comps.append(f)
        return TrigCurve(*comps)

    def reparametrize(self, shift=0.0, reverse=False):
        comps = [c.shift(shift) for c in self.components]
        if reverse:
            comps = [c.reverse() for c in comps]
        return TrigCurve(*comps)

    def to_dict(self):
        return {
            "kind": "curve3",
            "x": self.x.to_dict(),
            "y": self.y.to_dict(),
            "z": self.z.to_dict(),
        }


class SampledCurve(SpaceCurve):
    """C^1 closed curve from ``M`` samples at ``t_j = j * period / M``.

    Between samples the curve is the cubic Hermite interpolant of positions
    and velocities, so it is C^1 with the stored velocities exact at nodes.
    """

    def __init__(self, positions, velocities, period=TWO_PI, closure_tol=1e-9):
        P = np.array(positions, dtype=float)
        V = np.array(velocities, dtype=float)
        if P.shape != V.shape or P.ndim != 2 or P.shape[1] != 3:
            raise ValueError("positions and velocities must both be (M, 3)")
        if P.shape[0] > 2:
            dp = np.linalg.norm(P[-1] - P[0])
            dv = np.linalg.norm(V[-1] - V[0])
            if dp <= closure_tol and dv <= closure_tol:
                # duplicated end sample: drop it
                P, V = P[:-1], V[:-1]
        P.setflags(write=False)
        V.setflags(write=False)
        self.positions = P
        self.velocities = V
        self.period = float(period)
        if np.linalg.norm(V, axis=1).min() <= ZERO_SPEED:
            raise NotImmersed("a stored velocity vanishes")

    @property
    def size(self):
        return self.positions.shape[0]

    @property
    def step(self):
        return self.period / self.size

    def nodes(self):
        return self.grid(self.size)

    def _locate(self, t):
        t = _as_t(t)
        u = np.mod(t, self.period) / self.step
        i = np.floor(u).astype(int)
        i = np.minimum(i, self.size - 1)
        s = u - i
        return i, (i + 1) % self.size, s[..., None]

    def position(self, t):
        i, j, s = self._locate(t)
        h = self.step
        P, V = self.positions, self.velocities
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        return h00 * P[i] + h10 * h * V[i] + h01 * P[j] + h11 * h * V[j]

    def velocity(self, t):
        i, j, s = self._locate(t)
        h = self.step
        P, V = self.positions, self.velocities
        d00 = 6 * s**2 - 6 * s
        d10 = 3 * s**2 - 4 * s + 1
        d01 = -6 * s**2 + 6 * s
        d11 = 3 * s**2 - 2 * s
        return (d00 * P[i] + d01 * P[j]) / h + d10 * V[i] + d11 * V[j]

    def affine(self, A, b):
        A = np.asarray(A, dtype=float)
        return SampledCurve(self.positions @ A.T + b, self.velocities @ A.T, self.period)

    def to_dict(self):
        return {
            "kind": "sampled_c1",
            "period": self.period,
            "positions": self.positions.tolist(),
            "velocities": self.velocities.tolist(),
        }


class SmoothCurve(SpaceCurve):
    """Closed curve given by vectorized callables.

    ``acc`` may be ``None`` when only C^1 data is available.
    """

    def __init__(self, pos, vel, acc=None, period=TWO_PI, name="smooth"):
        self._pos, self._vel, self._acc = pos, vel, acc
        self.period = float(period)
        self.name = name

    def position(self, t):
        return self._pos(_as_t(t))

    def velocity(self, t):
        return self._vel(_as_t(t))

    def acceleration(self, t):
        if self._acc is None:
            return super().acceleration(t)
        return self._acc(_as_t(t))

    def affine(self, A, b):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        acc = None if self._acc is None else (lambda t: self._acc(t) @ A.T)
        return SmoothCurve(
            lambda t: self._pos(t) @ A.T + b,
            lambda t: self._vel(t) @ A.T,
            acc,
            self.period,
            self.name,
        )

    def sampled(self, M):
        """Freeze onto the :class:`SampledCurve` backend with ``M`` samples."""
        t = self.grid(M)
        return SampledCurve(self.position(t), self.velocity(t), self.period)


def eval_curve(c, t):
    return c.position(t)


def velocity(c, t):
    return c.velocity(t)


def acceleration(c, t):
    return c.acceleration(t)


def tantrix_at(c, t):
    return c.tantrix(t)


def apply_affine(c, A, b=(0.0, 0.0, 0.0)):
    """Image of ``c`` under ``x -> A x + b`` on the same backend.

    A singular ``A`` is allowed but warns: skewness is then not preserved.
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (3, 3):
        raise ValueError("A must be 3x3")
    if abs(np.linalg.det(A)) <= 1e-14 * max(1.0, np.abs(A).max() ** 3):
        warnings.warn("affine map is singular", SingularMatrixWarning, stacklevel=2)
    return c.affine(A, np.asarray(b, dtype=float))


def stretch(c, factor):
    """Dilatation ``(x, y, z) -> (x, y, factor * z)`` of a curve or point array."""
    if factor == 0:
        raise ZeroFactor("stretch factor must be nonzero")
    A = np.diag([1.0, 1.0, float(factor)])
    if isinstance(c, SpaceCurve):
        return apply_affine(c, A)
    return np.asarray(c, dtype=float) @ A.T


def curve_from_dict(d):
    kind = d.get("kind")
    if kind == "curve3":
        return TrigCurve(*(TrigPoly.from_dict(d[k]) for k in "xyz"))
    if kind == "sampled_c1":
        return SampledCurve(d["positions"], d["velocities"], d.get("period", TWO_PI))
    raise ValueError(f"not a curve document (kind={kind!r})")


def circle(radius=1.0, height=0.0):
    return TrigCurve(TrigPoly(0.0, [radius]), TrigPoly(0.0, [0.0], [radius]), TrigPoly(height))


def sample_table(c, M):
    """``(t, position, velocity)`` on a uniform grid."""
    t = c.grid(M)
    return t, c.position(t), c.velocity(t)


def min_speed_grid(c, M=4096):
    return float(np.min(c.speed(c.grid(M))))


def periodic_derivative(values, period):
    """Spectral derivative of uniformly sampled periodic data along axis 0."""
    values = np.asarray(values, dtype=float)
    M = values.shape[0]
    F = np.fft.rfft(values, axis=0)
    k = np.fft.rfftfreq(M, d=1.0 / M) * (TWO_PI / period)
    if M % 2 == 0:
        k[-1] = 0.0
    shape = (-1,) + (1,) * (values.ndim - 1)
    return np.fft.irfft(F * (1j * k).reshape(shape), n=M, axis=0)


__all__ = [
    "SpaceCurve",
    "TrigCurve",
    "SampledCurve",
    "SmoothCurve",
    "eval_curve",
    "velocity",
    "acceleration",
    "tantrix_at",
    "apply_affine",
    "stretch",
    "curve_from_dict",
    "circle",
    "sample_table",
    "min_speed_grid",
    "periodic_derivative",
]
