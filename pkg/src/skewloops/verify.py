"""Global verification of skewness.

A closed curve is skew when no two distinct points have parallel tangent
lines, i.e. the normalized defect ``F(t, s) = |tau(t) x tau(s)|`` vanishes
only on the diagonal.  For trigonometric curves the minimum of ``F`` off a
small diagonal band is enclosed by branch and bound, and the band itself is
handled by a curvature estimate.  Other backends get a grid search with
local refinement and an uncertified answer.

Coordinates on the torus are ``(t, d)`` with ``s = t + d``.  Because
``F(t, t + d) = F(t + d, t + d + (2 pi - d))`` it suffices to search
``t in [0, 2 pi]``, ``d in [delta, pi]``.
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from . import kernels
from .construct import cross_norm_sq
from .curves import SampledCurve, SpaceCurve, TrigCurve
from .errors import FlatPoint, NotImmersed, PreconditionError, Unsupported
from .trigpoly import EPS, TWO_PI, TrigPoly, eval_error_bound, inf_bound, sup_bound

log = logging.getLogger(__name__)

DEFAULT_REFUTE_TOL = 1e-10
POLISH_TOL = 1e-12
DEFAULT_BUDGET = 1_000_000
# boxes settle once their lower bound reaches this fraction of the best value seen
SETTLE_FRACTION = 0.5
POLISH_TRIGGER = 0.05
FLAT_BAND = 1e-3


class Status(str, Enum):
    CERTIFIED_SKEW = "CertifiedSkew"
    NOT_SKEW = "NotSkew"
    INCONCLUSIVE = "Inconclusive"
    NUMERICALLY_SKEW = "NumericallySkew"


@dataclass(frozen=True)
class Witness:
    t: float
    s: float
    defect: float

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class DerivativeBounds:
    """``B_k >= sup |c^(k)|`` for ``k = 1, 2, 3`` and ``m1 <= inf |c'|``."""

    B1: float
    B2: float
    B3: float
    m1: float


@dataclass(frozen=True)
class Band:
    """Diagonal exclusion band.

    For ``0 < |s - t| <= delta`` the raw cross product satisfies
    ``|c'(t) x c'(s)| >= constant * |s - t|``.
    """

    delta: float
    constant: float
    m_kappa: float
    certified: bool = True


@dataclass
class SkewCertificate:
    status: Status
    margin: float = None
    witness: Witness = None
    band_width: float = 0.0
    boxes_processed: int = 0
    certified: bool = False
    budget: int = DEFAULT_BUDGET
    refute_tol: float = DEFAULT_REFUTE_TOL
    constants: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "status": Status(self.status).value,
            "margin": self.margin,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "band_width": self.band_width,
            "boxes_processed": self.boxes_processed,
            "certified": self.certified,
            "budget": self.budget,
            "refute_tol": self.refute_tol,
            "constants": self.constants,
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_dict(cls, d):
        w = d.get("witness")
        return cls(
            status=Status(d["status"]),
            margin=d.get("margin"),
            witness=None if w is None else Witness(**w),
            band_width=d.get("band_width", 0.0),
            boxes_processed=d.get("boxes_processed", 0),
            certified=d.get("certified", False),
            budget=d.get("budget", DEFAULT_BUDGET),
            refute_tol=d.get("refute_tol", DEFAULT_REFUTE_TOL),
            constants=d.get("constants", {}),
            diagnostics=d.get("diagnostics", {}),
        )

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


# -- pointwise quantities --------------------------------------------------


def defect(c, t, s):
    """``|tau(t) x tau(s)|``; zero exactly when the tangent lines are parallel."""
    a = c.tantrix(t)
    b = c.tantrix(s)
    out = np.linalg.norm(np.cross(a, b), axis=-1)
    return float(out) if out.ndim == 0 else out


def _tantrix_jet(c, t):
    """``tau`` and ``tau'`` at ``t``.

    Curves without a second derivative fall back to a central difference
    of the tantrix.
    """
    t = np.asarray(t, dtype=float)
    if isinstance(c, TrigCurve):
        v, a = c.jets(t, (1, 2))
    else:
        try:
            v, a = c.velocity(t), c.acceleration(t)
        except Unsupported:
            h = 1e-6 * c.period
            tau = c.tantrix(t)
            return tau, (c.tantrix(t + h) - c.tantrix(t - h)) / (2 * h)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(n == 0.0):
        raise NotImmersed("velocity vanishes")
    tau = v / n
    dtau = (a - np.sum(tau * a, axis=-1, keepdims=True) * tau) / n
    return tau, dtau


def _require_analytic(c):
    if not isinstance(c, TrigCurve):
        raise Unsupported("certified bounds need a trigonometric curve")


def _norm_sq(curve):
    x, y, z = curve.components
    return x * x + y * y + z * z


def derivative_bounds(c, tol=1e-10):
    """Certified derivative bounds of a trigonometric curve.

    ``B_k`` is the square root of a certified upper bound on ``|c^(k)|**2``,
    and ``m1`` the square root of a certified lower bound on ``|c'|**2``.

    Raises
    ------
    Unsupported
        For non-trigonometric backends.
    NotImmersed
        When ``inf |c'|`` is not certified positive.
    """
    _require_analytic(c)
    B = [math.sqrt(max(sup_bound(_norm_sq(c.derivative_curve(k)), tol=tol).upper, 0.0)) for k in (1, 2, 3)]
    low = inf_bound(_norm_sq(c.derivative_curve(1)), tol=tol).lower
    if not low > 0.0:
        raise NotImmersed(f"inf |c'|^2 enclosure reaches {low:.3g}")
    return DerivativeBounds(B[0], B[1], B[2], math.sqrt(low))


def diagonal_band(c, tol=1e-10):
    """Width ``delta`` of a diagonal band on which ``F > 0`` is certified.

    With ``m_kappa <= inf |c' x c''|``, Taylor expansion of ``c'`` about
    ``t`` gives ``|c'(t) x c'(t+h)| >= |h| (m_kappa - |h| B1 B3 / 2)``.
    Taking ``delta = 1.5 m_kappa / (B1 B3)`` leaves at least
    ``m_kappa |h| / 4`` on the band.

    Raises
    ------
    FlatPoint
        If ``inf |c' x c''|`` is not certified positive.
    """
    _require_analytic(c)
    low = inf_bound(cross_norm_sq(c), tol=tol).lower
    if not low > 0.0:
        raise FlatPoint(f"inf |c' x c''|^2 enclosure reaches {low:.3g}")
    m_kappa = math.sqrt(low)
    b1 = math.sqrt(sup_bound(_norm_sq(c.derivative_curve(1)), tol=tol).upper)
    b3 = math.sqrt(sup_bound(_norm_sq(c.derivative_curve(3)), tol=tol).upper)
    delta = min(1.5 * m_kappa / (b1 * b3), 3.0)
    return Band(delta, 0.25 * m_kappa, m_kappa)


# -- local refinement --------------------------------------------------------


def polish(c, t, s, iters=60):
    """Damped Gauss-Newton on ``tau(t) x tau(s) = 0``; returns a :class:`Witness`.

    The system has three equations in two unknowns; least squares picks the
    active components.
    """
    t, s = float(t), float(s)
    f = defect(c, t, s)
    for _ in range(iters):
        if f < 1e-16:
            break
        (at, dt), (as_, ds) = _tantrix_jet(c, t), _tantrix_jet(c, s)
        r = np.cross(at, as_)
        J = np.column_stack([np.cross(dt, as_), np.cross(at, ds)])
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        lam = 1.0
        while lam > 1e-8:
            t2, s2 = t + lam * step[0], s + lam * step[1]
            f2 = defect(c, t2, s2)
            if f2 < f:
                break
            lam *= 0.5
        else:
            break
        t, s, f = t2, s2, f2
    period = c.period
    return Witness(float(np.mod(t, period)), float(np.mod(s, period)), float(f))


def _separation(w, period):
    d = abs(w.s - w.t) % period
    return min(d, period - d)


# -- branch and bound --------------------------------------------------------


class _BoxEvaluator:
    def __init__(self, c, bounds, workers):
        self.c = c
        self.bounds = bounds
        self.T1 = bounds.B2 / bounds.m1
        self.T2 = 3.0 * bounds.B2**2 / bounds.m1**2 + bounds.B3 / bounds.m1
        e1 = math.sqrt(sum(eval_error_bound(p) ** 2 for p in c.derivative_curve(1).components))
        e2 = math.sqrt(sum(eval_error_bound(p) ** 2 for p in c.derivative_curve(2).components))
        self.e1, self.e2 = e1, e2
        # rounding slack: tantrix error propagates twice into F, gradient error scales with the radius
        self.slack0 = 4.0 * e1 / bounds.m1 + 16 * EPS
        self.slack1 = 4.0 * (e2 + self.T1 * e1) / bounds.m1 + 16 * EPS
        self.workers = max(1, int(workers or 1))

    def _local(self, t, r):
        """Tantrix derivative bounds on ``[t - r, t + r]`` from centre values."""
        b = self.bounds
        v, a = self.c.jets(t, (1, 2))
        speed = np.maximum(np.linalg.norm(v, axis=-1) - self.e1 - r * b.B2, b.m1)
        acc = np.minimum(np.linalg.norm(a, axis=-1) + self.e2 + r * b.B3, b.B2)
        T1 = acc / speed
        return v, a, T1, 3.0 * T1 * T1 + b.B3 / speed

    def _chunk(self, tc, dc, rt, rd):
        rs = rt + rd
        vt, a_t, T1t, T2t = self._local(tc, rt)
        vs, a_s, T1s, T2s = self._local(tc + dc, rs)
        nt = np.linalg.norm(vt, axis=-1, keepdims=True)
        ns = np.linalg.norm(vs, axis=-1, keepdims=True)
        if np.any(nt == 0.0) or np.any(ns == 0.0):
            raise NotImmersed("velocity vanishes")
        at, as_ = vt / nt, vs / ns
        dt = (a_t - np.sum(at * a_t, axis=-1, keepdims=True) * at) / nt
        ds = (a_s - np.sum(as_ * a_s, axis=-1, keepdims=True) * as_) / ns
        cv = np.cross(at, as_)
        F = np.linalg.norm(cv, axis=-1)
        chat = cv / np.maximum(F, 1e-300)[:, None]
        Ft = np.sum(chat * np.cross(dt, as_), axis=-1)
        Fs = np.sum(chat * np.cross(at, ds), axis=-1)
        lb1 = F - T1t * rt - T1s * rs
        lb2 = F - np.abs(Ft + Fs) * rt - np.abs(Fs) * rd - 0.5 * (T2t * rt * rt + T2s * rs * rs + 2 * T1t * T1s * rt * rs)
        lb = np.maximum(lb1, lb2) - self.slack0 - self.slack1 * (rt + rs)
        return F, lb, np.abs(Ft + Fs), np.abs(Fs)

    def __call__(self, tc, dc, rt, rd):
        n = tc.size
        if self.workers == 1 or n < 4096:
            return self._chunk(tc, dc, rt, rd)
        edges = np.linspace(0, n, self.workers + 1).astype(int)
        parts = [(tc[a:b], dc[a:b], rt[a:b], rd[a:b]) for a, b in zip(edges[:-1], edges[1:])]
        with ThreadPoolExecutor(self.workers) as ex:
            res = list(ex.map(lambda p: self._chunk(*p), parts))
        return tuple(np.concatenate([r[i] for r in res]) for i in range(4))


def _branch_and_bound(c, bounds, delta, budget, refute_tol, workers, diag):
    ev = _BoxEvaluator(c, bounds, workers)
    nt = max(64, 8 * c.degree)
    nd = max(4, int(math.ceil(nt * (math.pi - delta) / TWO_PI)))
    rt0 = math.pi / nt
    rd0 = 0.5 * (math.pi - delta) / nd
    T, D = np.meshgrid((np.arange(nt) + 0.5) * 2 * rt0, delta + (np.arange(nd) + 0.5) * 2 * rd0, indexing="ij")
    tc, dc = T.ravel(), D.ravel()
    rt = np.full(tc.size, rt0)
    rd = np.full(tc.size, rd0)

    processed = 0
    best_F = math.inf
    margin = math.inf
    starts = []
    near = []
    accept = min(refute_tol, POLISH_TOL)
    rounds = 0
    while tc.size:
        if processed + tc.size > budget:
            diag.update(rounds=rounds, open_boxes=int(tc.size), best_observed=best_F, near_witnesses=near)
            return Status.INCONCLUSIVE, None, None, processed
        F, lb, gt, gd = ev(tc, dc, rt, rd)
        processed += tc.size
        rounds += 1
        best_F = min(best_F, float(F.min()))

        # refutation attempts from the most promising centres
        order = np.argsort(F)[:4]
        for i in order:
            if F[i] >= POLISH_TRIGGER:
                break
            t0, s0 = tc[i], tc[i] + dc[i]
            if any(abs(t0 - a) + abs(s0 - b) < 0.05 and F[i] > 0.1 * f0 for a, b, f0 in starts):
                continue
            starts.append((t0, s0, F[i]))
            w = polish(c, t0, s0)
            if _separation(w, c.period) < max(0.5 * delta, 1e-6):
                continue
            if w.defect < accept:
                diag.update(rounds=rounds, best_observed=best_F, near_witnesses=near)
                return Status.NOT_SKEW, None, w, processed
            if w.defect < refute_tol or w.defect < 1e-6:
                near.append(w.to_dict())

        threshold = SETTLE_FRACTION * best_F
        settled = lb >= threshold
        if settled.any():
            margin = min(margin, float(lb[settled].min()))
        keep = ~settled
        tc, dc, rt, rd = tc[keep], dc[keep], rt[keep], rd[keep]
        gt, gd = gt[keep], gd[keep]
        if not tc.size:
            break
        # split along the edge whose first-order contribution dominates
        split_t = (gt + 2 * ev.T1) * rt >= (gd + ev.T1) * rd
        ht = np.where(split_t, 0.5 * rt, 0.0)
        hd = np.where(split_t, 0.0, 0.5 * rd)
        rt = np.where(split_t, 0.5 * rt, rt)
        rd = np.where(split_t, rd, 0.5 * rd)
        tc = np.concatenate([tc - ht, tc + ht])
        dc = np.concatenate([dc - hd, dc + hd])
        rt = np.concatenate([rt, rt])
        rd = np.concatenate([rd, rd])
    diag.update(rounds=rounds, best_observed=best_F, near_witnesses=near, threshold=SETTLE_FRACTION * best_F)
    return Status.CERTIFIED_SKEW, margin, None, processed


def _verify_analytic(c, refute_tol, budget, workers):
    bounds = derivative_bounds(c)
    diag = {}
    try:
        band = diagonal_band(c)
    except FlatPoint as exc:
        band = Band(FLAT_BAND, 0.0, 0.0, certified=False)
        diag["flat_point"] = str(exc)
    ev_T1 = bounds.B2 / bounds.m1
    constants = {
        "B1": bounds.B1,
        "B2": bounds.B2,
        "B3": bounds.B3,
        "m1": bounds.m1,
        "m_kappa": band.m_kappa,
        "band_constant": band.constant,
        "band_certified": band.certified,
        "tantrix_lipschitz": ev_T1,
        "tantrix_second": 3.0 * bounds.B2**2 / bounds.m1**2 + bounds.B3 / bounds.m1,
        "defect_sensitivity": 4.0 / bounds.m1,
        "settle_fraction": SETTLE_FRACTION,
        "polish_tol": POLISH_TOL,
        "degree": c.degree,
    }
    status, margin, witness, processed = _branch_and_bound(c, bounds, band.delta, budget, refute_tol, workers, diag)
    if status is Status.CERTIFIED_SKEW and not band.certified:
        status, margin = Status.INCONCLUSIVE, None
        diag["reason"] = "diagonal band not certified"
    return SkewCertificate(
        status=status,
        margin=margin,
        witness=witness,
        band_width=band.delta,
        boxes_processed=processed,
        certified=status is not Status.INCONCLUSIVE,
        budget=budget,
        refute_tol=refute_tol,
        constants=constants,
        diagnostics=diag,
    )


def _grid_seeds(c, n, seeds, min_sep=3):
    """Discrete local minima of ``F`` on an ``n x n`` grid, best first."""
    t = c.grid(n)
    tau = c.tantrix(t)
    F = np.linalg.norm(np.cross(tau[:, None, :], tau[None, :, :]), axis=-1)
    i, j = np.indices(F.shape)
    d = np.abs(i - j)
    d = np.minimum(d, n - d)
    F = np.where(d < min_sep, np.inf, F)
    is_min = np.ones_like(F, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                is_min &= F <= np.roll(np.roll(F, di, axis=0), dj, axis=1)
    is_min &= (j > i) & np.isfinite(F)
    ii, jj = np.nonzero(is_min)
    vals = F[ii, jj]
    order = np.argsort(vals, kind="stable")[:seeds]
    return [(t[ii[k]], t[jj[k]], vals[k]) for k in order]


def _verify_sampled(c, refute_tol, budget, workers):
    M = c.size if isinstance(c, SampledCurve) else 2048
    band_idx = max(2, M // 64)
    t = c.grid(M)
    val, i, j = kernels.defect_grid_min(c.tantrix(t), band_idx)
    band = TWO_PI * band_idx / M * (c.period / TWO_PI)
    candidates = [(t[i], t[j], val)] + _grid_seeds(c, 256, 16, min_sep=max(3, 256 * band_idx // M + 1))
    best = None
    near = []
    accept = min(refute_tol, POLISH_TOL)
    for t0, s0, _ in candidates:
        w = polish(c, t0, s0)
        if _separation(w, c.period) < 0.5 * band:
            continue
        if best is None or w.defect < best.defect:
            best = w
        if w.defect < 1e-6:
            near.append(w.to_dict())
    diag = {"grid": M, "band_index": band_idx, "grid_min": float(val), "near_witnesses": near}
    if best is not None and best.defect < accept:
        return SkewCertificate(
            Status.NOT_SKEW, None, best, band, M * M, False, budget, refute_tol, {}, diag
        )
    margin = float(val) if best is None else min(float(val), best.defect)
    return SkewCertificate(
        Status.NUMERICALLY_SKEW, margin, None, band, M * M, False, budget, refute_tol, {}, diag
    )


def verify_skew(c, refute_tol=DEFAULT_REFUTE_TOL, budget=DEFAULT_BUDGET, workers=1):
    """Decide whether ``c`` is skew.

    Parameters
    ----------
    c : SpaceCurve
    refute_tol : float
        Defect below which a polished point counts as a parallel pair
        (further capped at ``1e-12``).
    budget : int
        Maximum number of boxes evaluated.
    workers : int
        Threads used to evaluate each round of boxes.  Rounds are
        synchronous, so the result does not depend on this.

    Returns
    -------
    SkewCertificate
        ``CertifiedSkew``, ``NotSkew`` or ``Inconclusive`` for trigonometric
        curves.  Other backends return ``NotSkew`` or ``NumericallySkew``
        with ``certified=False``.
    """
    if not isinstance(c, SpaceCurve):
        raise TypeError("expected a SpaceCurve")
    if isinstance(c, TrigCurve):
        return _verify_analytic(c, refute_tol, int(budget), workers)
    return _verify_sampled(c, refute_tol, int(budget), workers)


def find_parallel_pair(c, seeds=32, refute_tol=DEFAULT_REFUTE_TOL, grid=256):
    """Distinct parallel-tangent pairs found by multistart polishing.

    Seeds are the discrete local minima of ``F`` on a ``grid x grid``
    lattice.  Pairs are reported once modulo ``(t, s) ~ (s, t)``.
    """
    out = []
    for t0, s0, _ in _grid_seeds(c, grid, seeds):
        w = polish(c, t0, s0)
        if w.defect >= refute_tol or _separation(w, c.period) < 1e-3:
            continue
        a, b = sorted((w.t, w.s))
        if any(_close(a, b, x, y, c.period) for x, y, _ in out):
            continue
        out.append((a, b, w.defect))
    return [Witness(a, b, f) for a, b, f in out]


def _close(a, b, x, y, period, tol=1e-6):
    def dist(p, q):
        d = abs(p - q) % period
        return min(d, period - d)

    return max(dist(a, x), dist(b, y)) < tol or max(dist(a, y), dist(b, x)) < tol


# -- stability ---------------------------------------------------------------


def c2_norm(components):
    """``max_k |(f_x^(k), f_y^(k), f_z^(k))|`` over ``k = 0, 1, 2`` via coefficient sums."""
    return max(math.sqrt(sum(p.coeff_sum(k) ** 2 for p in components)) for k in (0, 1, 2))


def _random_poly(rng, degree):
    return TrigPoly(rng.standard_normal(), rng.standard_normal(degree), rng.standard_normal(degree))


def stability_radius(cert):
    """``margin / (100 Lip)`` with ``Lip`` the defect sensitivity stored in ``cert``."""
    return cert.margin / (100.0 * cert.constants["defect_sensitivity"])


def perturbation_stability(c, eps, trials=8, seed=0, budget=DEFAULT_BUDGET, base=None):
    """Fraction of random perturbations of C^2 size at most ``eps`` that stay certified skew.

    Raises
    ------
    PreconditionError
        If ``c`` is not certified skew.
    """
    _require_analytic(c)
    cert = base if base is not None else verify_skew(c, budget=budget)
    if cert.status is not Status.CERTIFIED_SKEW:
        raise PreconditionError(f"curve must be certified skew, got {Status(cert.status).value}")
    if eps == 0:
        return 1.0
    rng = np.random.default_rng(seed)
    deg = max(c.degree, 1)
    ok = 0
    for _ in range(trials):
        d = [_random_poly(rng, deg) for _ in range(3)]
        scale = eps * rng.uniform(0.0, 1.0) / c2_norm(d)
        pert = TrigCurve(*(a + b * scale for a, b in zip(c.components, d)))
        if verify_skew(pert, budget=budget).status is Status.CERTIFIED_SKEW:
            ok += 1
    return ok / trials


__all__ = [
    "Status",
    "Witness",
    "DerivativeBounds",
    "Band",
    "SkewCertificate",
    "defect",
    "derivative_bounds",
    "diagonal_band",
    "polish",
    "verify_skew",
    "find_parallel_pair",
    "c2_norm",
    "stability_radius",
    "perturbation_stability",
]
