"""Pure numpy implementations of the hot kernels.

These mirror ``_ckernels.pyx`` function for function and are used when the
compiled extension is unavailable or ``SKEWLOOPS_PURE_PYTHON`` is set.
"""

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def reduce_angle(t):
    """Reduce angles into ``[0, 2*pi)``.

    ``np.fmod`` is exact, so ``t`` and ``t + 2*pi`` (when that sum is exact)
    reduce to the same bits.
    """
    r = np.fmod(np.asarray(t, dtype=float), TWO_PI)
    r = np.where(r < 0.0, r + TWO_PI, r)
    return np.where(r >= TWO_PI, 0.0, r)


def trig_eval(a0, cos, sin, t):
    """Evaluate ``m`` trigonometric polynomials at ``n`` angles.

    Parameters
    ----------
    a0 : (m,) array
    cos, sin : (m, N) arrays
        Coefficients of ``cos(k t)`` and ``sin(k t)`` for ``k = 1..N``.
    t : (n,) array

    Returns
    -------
    (m, n) array
    """
    a0 = np.asarray(a0, dtype=float)
    cos = np.asarray(cos, dtype=float)
    sin = np.asarray(sin, dtype=float)
    r = reduce_angle(np.ravel(t))
    out = np.repeat(a0[:, None], r.size, axis=1)
    N = cos.shape[1]
    if N == 0:
        return out
    c1 = np.cos(r)
    s1 = np.sin(r)
    ck, sk = c1, s1
    for k in range(N):
        if k:
            ck, sk = ck * c1 - sk * s1, sk * c1 + ck * s1
        out += cos[:, k : k + 1] * ck + sin[:, k : k + 1] * sk
    return out


def defect_grid_min(tau, band):
    """Minimum of ``|tau_i x tau_j|`` over index pairs at cyclic distance >= band.

    Returns ``(value, i, j)``.
    """
    tau = np.ascontiguousarray(tau, dtype=float)
    M = tau.shape[0]
    band = max(int(band), 1)
    best = (math.inf, -1, -1)
    idx = np.arange(M)
    block = 256
    for i0 in range(0, M, block):
        ti = tau[i0 : i0 + block]
        cx = ti[:, None, 1] * tau[None, :, 2] - ti[:, None, 2] * tau[None, :, 1]
        cy = ti[:, None, 2] * tau[None, :, 0] - ti[:, None, 0] * tau[None, :, 2]
        cz = ti[:, None, 0] * tau[None, :, 1] - ti[:, None, 1] * tau[None, :, 0]
        F = np.sqrt(cx * cx + cy * cy + cz * cz)
        rows = idx[i0 : i0 + block]
        d = np.abs(rows[:, None] - idx[None, :])
        d = np.minimum(d, M - d)
        F[d < band] = np.inf
        k = int(np.argmin(F))
        val = float(F.flat[k])
        if val < best[0]:
            best = (val, int(rows[k // M]), int(k % M))
    return best


def sphere_polyline_crossing(P):
    """Find a crossing between non-adjacent great-circle arcs of a closed polyline.

    ``P`` holds unit vectors; arc ``i`` joins ``P[i]`` and ``P[i+1]`` (cyclic).
    Returns ``(i, j)`` for the first crossing found, or ``(-1, -1)``.
    """
    P = np.ascontiguousarray(P, dtype=float)
    M = P.shape[0]
    A = P
    B = np.roll(P, -1, axis=0)
    N = np.cross(A, B)
    mid = A + B
    idx = np.arange(M)
    block = 256
    for i0 in range(0, M, block):
        sl = slice(i0, i0 + block)
        n1 = N[sl]
        # sides of arcs j relative to plane of arc i, and vice versa
        sa = A @ n1.T
        sb = B @ n1.T
        sc = A[sl] @ N.T
        sd = B[sl] @ N.T
        cross1 = (sa.T * sb.T) < 0.0
        cross2 = (sc * sd) < 0.0
        same = (mid[sl] @ mid.T) > 0.0
        hit = cross1 & cross2 & same
        rows = idx[sl]
        d = np.abs(rows[:, None] - idx[None, :])
        d = np.minimum(d, M - d)
        hit &= d >= 2
        if hit.any():
            k = int(np.argmax(hit))
            return int(rows[k // M]), int(k % M)
    return -1, -1
