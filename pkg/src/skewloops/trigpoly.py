"""Exact calculus of real trigonometric polynomials on R/2pi.

A :class:`TrigPoly` stores ``f(t) = a0 + sum_k a_k cos(kt) + b_k sin(kt)``.
Differentiation, antiderivatives, half-period parity splits and products are
coefficient maps, so every construction downstream stays exact up to
floating-point rounding of the coefficients themselves.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NonzeroMean

TWO_PI = 2.0 * math.pi
EPS = np.finfo(float).eps


def _frozen(x):
    arr = np.array(x, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


class TrigPoly:
    """Real trigonometric polynomial of degree ``N``.

    Parameters
    ----------
    a0 : float
        Constant term.
    cos, sin : sequence of float
        Coefficients of ``cos(kt)`` and ``sin(kt)`` for ``k = 1..N``.  The
        shorter one is zero padded.

    Instances are immutable; arithmetic returns new objects.
    """

    __slots__ = ("a0", "cos", "sin")

    def __init__(self, a0=0.0, cos=(), sin=()):
        c = np.asarray(cos, dtype=float).reshape(-1)
        s = np.asarray(sin, dtype=float).reshape(-1)
        n = max(c.size, s.size)
        if c.size < n:
            c = np.concatenate([c, np.zeros(n - c.size)])
        if s.size < n:
            s = np.concatenate([s, np.zeros(n - s.size)])
        object.__setattr__(self, "a0", float(a0))
        object.__setattr__(self, "cos", _frozen(c))
        object.__setattr__(self, "sin", _frozen(s))

    def __setattr__(self, name, value):
        raise AttributeError("TrigPoly is immutable")

    # -- constructors ---------------------------------------------------

    @classmethod
    def constant(cls, c):
        return cls(c)

    @classmethod
    def harmonic(cls, k, a=0.0, b=0.0, a0=0.0):
        """``a0 + a cos(kt) + b sin(kt)``."""
        if k == 0:
            return cls(a0 + a)
        cos = np.zeros(k)
        sin = np.zeros(k)
        cos[k - 1] = a
        sin[k - 1] = b
        return cls(a0, cos, sin)

    @classmethod
    def from_complex(cls, c):
        """Build from two-sided coefficients ``c[-N..N]`` stored centred."""
        c = np.asarray(c, dtype=complex)
        N = (c.size - 1) // 2
        pos = c[N + 1 :]
        return cls(c[N].real, 2.0 * pos.real, -2.0 * pos.imag)

    @classmethod
    def from_samples(cls, values, degree=None):
        """Least-squares projection of uniform samples on ``[0, 2pi)``.

        For ``M`` samples this is the trapezoid-rule Fourier projection,
        exact for trigonometric polynomials of degree ``< M/2``.
        """
        values = np.asarray(values, dtype=float)
        M = values.size
        F = np.fft.rfft(values) / M
        nmax = (M - 1) // 2
        if degree is None:
            degree = nmax
        if degree > nmax:
            raise ValueError(f"degree {degree} needs more than {M} samples")
        cos = 2.0 * F[1 : degree + 1].real
        sin = -2.0 * F[1 : degree + 1].imag
        return cls(F[0].real, cos, sin)

    # -- basic data -----------------------------------------------------

    @property
    def degree(self):
        return self.cos.size

    def to_complex(self, N=None):
        """Two-sided coefficients ``c[-N..N]``, centred at index ``N``."""
        N = self.degree if N is None else N
        c = np.zeros(2 * N + 1, dtype=complex)
        c[N] = self.a0
        n = min(N, self.degree)
        half = 0.5 * (self.cos[:n] - 1j * self.sin[:n])
        c[N + 1 : N + 1 + n] = half
        c[N - n : N][::-1] = np.conj(half)
        return c

    def padded(self, N):
        """Same function with coefficient arrays of length ``max(N, degree)``."""
        if N <= self.degree:
            return self
        pad = np.zeros(N - self.degree)
        return TrigPoly(self.a0, np.concatenate([self.cos, pad]), np.concatenate([self.sin, pad]))

    def trimmed(self, tol=0.0):
        """Drop trailing harmonics whose coefficients are ``<= tol`` in magnitude."""
        mag = np.maximum(np.abs(self.cos), np.abs(self.sin))
        keep = np.nonzero(mag > tol)[0]
        n = int(keep[-1]) + 1 if keep.size else 0
        return TrigPoly(self.a0, self.cos[:n], self.sin[:n])

    def is_zero(self, tol=0.0):
        return abs(self.a0) <= tol and self.max_coeff() <= tol

    def max_coeff(self):
        """Largest harmonic coefficient magnitude (constant term excluded)."""
        if self.degree == 0:
            return 0.0
        return float(max(np.abs(self.cos).max(), np.abs(self.sin).max()))

    def coeff_sum(self, order=0):
        """``sum_k k**order (|a_k| + |b_k|)``, plus ``|a0|`` when ``order == 0``.

        This bounds ``sup |f^(order)|``.
        """
        k = np.arange(1, self.degree + 1, dtype=float)
        s = float(np.sum(k**order * (np.abs(self.cos) + np.abs(self.sin))))
        if order == 0:
            s += abs(self.a0)
        return s

    def lipschitz(self):
        return self.coeff_sum(1)

    def allclose(self, other, atol=1e-12):
        N = max(self.degree, other.degree)
        a, b = self.padded(N), other.padded(N)
        return (
            abs(a.a0 - b.a0) <= atol
            and bool(np.all(np.abs(a.cos - b.cos) <= atol))
            and bool(np.all(np.abs(a.sin - b.sin) <= atol))
        )

    def __repr__(self):
        return f"TrigPoly(a0={self.a0!r}, cos={self.cos.tolist()!r}, sin={self.sin.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, TrigPoly):
            return NotImplemented
        N = max(self.degree, other.degree)
        a, b = self.padded(N), other.padded(N)
        return a.a0 == b.a0 and np.array_equal(a.cos, b.cos) and np.array_equal(a.sin, b.sin)

    __hash__ = None

    # -- evaluation -----------------------------------------------------

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = kernels.trig_eval(
            np.array([self.a0]), self.cos[None, :], self.sin[None, :], t_arr.reshape(-1)
        )[0]
        if t_arr.ndim == 0:
            return float(out[0])
        return out.reshape(t_arr.shape)

    def sample(self, M):
        """Values at ``2 pi j / M`` for ``j = 0..M-1`` (inverse FFT)."""
        N = self.degree
        if M <= 2 * N:
            return self(np.arange(M) * (TWO_PI / M))
        F = np.zeros(M // 2 + 1, dtype=complex)
        F[0] = self.a0
        F[1 : N + 1] = 0.5 * (self.cos - 1j * self.sin)
        return np.fft.irfft(F * M, n=M)

    # -- calculus -------------------------------------------------------

    def derivative(self, order=1):
        f = self
        for _ in range(order):
            k = np.arange(1, f.degree + 1, dtype=float)
            f = TrigPoly(0.0, k * f.sin, -k * f.cos)
        return f

    def antiderivative(self, tol=1e-12):
        """Zero-mean antiderivative; raises :class:`NonzeroMean` if ``|a0| > tol``."""
        if abs(self.a0) > tol:
            raise NonzeroMean(f"mean {self.a0!r} exceeds tolerance {tol!r}")
        k = np.arange(1, self.degree + 1, dtype=float)
        return TrigPoly(0.0, -self.sin / k, self.cos / k)

    def half_shift(self):
        """``t -> f(t + pi)``: harmonic ``k`` picks up ``(-1)**k``."""
        sign = np.where(np.arange(1, self.degree + 1) % 2 == 1, -1.0, 1.0)
        return TrigPoly(self.a0, sign * self.cos, sign * self.sin)

    def parity_split(self):
        """``(f_even, f_odd)`` with ``f_even(t+pi) = f_even(t)``, ``f_odd(t+pi) = -f_odd(t)``."""
        odd = np.arange(1, self.degree + 1) % 2 == 1
        even = TrigPoly(self.a0, np.where(odd, 0.0, self.cos), np.where(odd, 0.0, self.sin))
        odd_part = TrigPoly(0.0, np.where(odd, self.cos, 0.0), np.where(odd, self.sin, 0.0))
        return even.trimmed(), odd_part.trimmed()

    def shift(self, c):
        """``t -> f(t + c)``."""
        k = np.arange(1, self.degree + 1, dtype=float)
        ck, sk = np.cos(k * c), np.sin(k * c)
        return TrigPoly(self.a0, self.cos * ck + self.sin * sk, self.sin * ck - self.cos * sk)

    def reverse(self):
        """``t -> f(-t)``."""
        return TrigPoly(self.a0, self.cos, -self.sin)

    def mean(self):
        return self.a0

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, TrigPoly):
            return other
        if np.isscalar(other):
            return TrigPoly(float(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        N = max(self.degree, other.degree)
        a, b = self.padded(N), other.padded(N)
        return TrigPoly(a.a0 + b.a0, a.cos + b.cos, a.sin + b.sin)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly(-self.a0, -self.cos, -self.sin)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            c = float(other)
            return TrigPoly(c * self.a0, c * self.cos, c * self.sin)
        if not isinstance(other, TrigPoly):
            return NotImplemented
        if self.degree == 0:
            return other * self.a0
        if other.degree == 0:
            return self * other.a0
        return TrigPoly.from_complex(np.convolve(self.to_complex(), other.to_complex()))

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / float(c))

    def __pow__(self, n):
        out = TrigPoly(1.0)
        for _ in range(int(n)):
            out = out * self
        return out

    # -- serialization ----------------------------------------------------

    def to_dict(self):
        return {
            "kind": "trigpoly",
            "a0": self.a0,
            "cos": self.cos.tolist(),
            "sin": self.sin.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("kind", "trigpoly") != "trigpoly":
            raise ValueError(f"expected kind 'trigpoly', got {d.get('kind')!r}")
        return cls(d.get("a0", 0.0), d.get("cos", []), d.get("sin", []))


COS1 = TrigPoly(0.0, [1.0], [0.0])
SIN1 = TrigPoly(0.0, [0.0], [1.0])


@dataclass(frozen=True)
class BoundBox:
    """Enclosure ``[lower, upper]`` of an extremum.

    ``certified`` is true when the true value is guaranteed to lie inside;
    ``converged`` is false when the refinement cap fired before the
    requested width was reached (the enclosure is still valid).
    """

    lower: float
    upper: float
    certified: bool = True
    converged: bool = True

    @property
    def width(self):
        return self.upper - self.lower

    @property
    def mid(self):
        return 0.5 * (self.lower + self.upper)

    def contains(self, x, slack=0.0):
        return self.lower - slack <= x <= self.upper + slack

    def __neg__(self):
        return BoundBox(-self.upper, -self.lower, self.certified, self.converged)

    def to_dict(self):
        return {
            "lower": self.lower,
            "upper": self.upper,
            "certified": self.certified,
            "converged": self.converged,
        }


def eval_error_bound(f):
    """Bound on the rounding error of one evaluation of ``f``.

    Covers the angle-addition recurrence (error growing linearly in ``k``)
    and the summation.
    """
    N = f.degree
    return 4.0 * EPS * ((N + 2) * f.coeff_sum(0) + f.coeff_sum(1))


def sup_bound(f, tol=1e-12, max_rounds=60, max_active=1 << 21, initial=None):
    """Certified enclosure of ``max f`` over the circle.

    Intervals of a uniform grid are bounded above with the Taylor estimate
    ``f(c) + |f'(c)| r + B2 r**2 / 2`` (``B2`` a coefficient bound on
    ``|f''|``), which is also never worse than the Lipschitz estimate
    ``f(c) + Lip(f) r``; intervals that cannot beat the best sampled value
    are discarded and the rest bisected until the enclosure is narrower than
    ``tol``.
    """
    if f.degree == 0 or f.max_coeff() == 0.0:
        return BoundBox(f.a0, f.a0)
    fp = f.derivative()
    lip = f.coeff_sum(1)
    b2 = f.coeff_sum(2)
    err = eval_error_bound(f)
    err1 = eval_error_bound(fp)
    M = initial or max(32, 8 * f.degree)
    r = math.pi / M
    centers = (np.arange(M) + 0.5) * (2.0 * r)
    best = -math.inf
    converged = False
    upper = math.inf
    for _ in range(max_rounds):
        vals = kernels.trig_eval(
            np.array([f.a0, 0.0]),
            np.vstack([f.cos, fp.cos]),
            np.vstack([f.sin, fp.sin]),
            centers,
        )
        fc, dc = vals[0], vals[1]
        best = max(best, float(fc.max()) - err)
        ub = fc + np.minimum((np.abs(dc) + err1) * r + 0.5 * b2 * r * r, lip * r) + err
        upper = float(ub.max())
        floor = max(tol, 4.0 * err)
        if upper - best <= floor:
            converged = True
            break
        keep = ub > best
        centers = centers[keep]
        if 2 * centers.size > max_active:
            break
        r *= 0.5
        centers = np.concatenate([centers - r, centers + r])
    upper = max(upper, best)
    return BoundBox(float(best), float(upper), True, converged)


def inf_bound(f, tol=1e-12, **kw):
    """Certified enclosure of ``min f``; see :func:`sup_bound`."""
    return -sup_bound(-f, tol=tol, **kw)
