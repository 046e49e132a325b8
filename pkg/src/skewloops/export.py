"""CSV tables and static SVG plots of curves and ovals."""

import io as _io

import numpy as np

from .curves import SpaceCurve
from .oval import make_support_oval, support_parametrization
from .trigpoly import TrigPoly

PANEL = 300
PAD = 20


def curve_table(c, M=512):
    """CSV text with columns ``t, x, y, z, vx, vy, vz``."""
    t = c.grid(M)
    data = np.column_stack([t, c.position(t), c.velocity(t)])
    buf = _io.StringIO()
    buf.write("t,x,y,z,vx,vy,vz\n")
    np.savetxt(buf, data, delimiter=",", fmt="%.17g")
    return buf.getvalue()


def support_table(h, M=512):
    """CSV text with columns ``t, h, v, x, y`` for a support function."""
    s = make_support_oval(h)
    oval = support_parametrization(s)
    t = np.arange(M) * (2 * np.pi / M)
    data = np.column_stack([t, h(t), s.v(t), oval.x(t), oval.y(t)])
    buf = _io.StringIO()
    buf.write("t,h,v,x,y\n")
    np.savetxt(buf, data, delimiter=",", fmt="%.17g")
    return buf.getvalue()


def stereographic(P):
    """Projection from the north pole, clipped to radius 4."""
    P = np.asarray(P, dtype=float)
    den = np.maximum(1.0 - P[:, 2], 1e-3)
    Q = P[:, :2] / den[:, None]
    r = np.linalg.norm(Q, axis=1, keepdims=True)
    return np.where(r > 4.0, Q * (4.0 / np.maximum(r, 1e-300)), Q)


def _polyline(xy, box, color, closed=True, width=1.2):
    (x0, y0, x1, y1), (ox, oy) = box
    sx = (PANEL - 2 * PAD) / max(x1 - x0, 1e-12)
    sy = (PANEL - 2 * PAD) / max(y1 - y0, 1e-12)
    s = min(sx, sy)
    pts = " ".join(f"{ox + PAD + (x - x0) * s:.2f},{oy + PANEL - PAD - (y - y0) * s:.2f}" for x, y in xy)
    tag = "polygon" if closed else "polyline"
    return f'<{tag} points="{pts}" fill="none" stroke="{color}" stroke-width="{width}"/>'


def _bounds(*arrays):
    allp = np.vstack(arrays)
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    span = max(hi[0] - lo[0], hi[1] - lo[1], 1e-9)
    mid = 0.5 * (lo + hi)
    return (mid[0] - span / 2, mid[1] - span / 2, mid[0] + span / 2, mid[1] + span / 2)


def _panel(i, title, body):
    ox = i * PANEL
    return [
        f'<rect x="{ox}" y="0" width="{PANEL}" height="{PANEL}" fill="white" stroke="#ccc"/>',
        f'<text x="{ox + 8}" y="14" font-size="11" font-family="sans-serif">{title}</text>',
    ] + body


def _svg(panels):
    width = PANEL * len(panels)
    head = f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL}" viewBox="0 0 {width} {PANEL}">'
    return "\n".join([head] + [line for p in panels for line in p] + ["</svg>"]) + "\n"


def curve_svg(c, M=1024):
    """Three panels: xy projection, height profile, stereographic tantrix with its antipode."""
    t = c.grid(M)
    P = c.position(t)
    T = c.tantrix(t)
    xy = P[:, :2]
    prof = np.column_stack([t, P[:, 2]])
    st, sa = stereographic(T), stereographic(-T)
    panels = [
        _panel(0, "xy projection", [_polyline(xy, (_bounds(xy), (0, 0)), "black")]),
        _panel(1, "height z(t)", [_polyline(prof, (_bounds(prof), (PANEL, 0)), "black", closed=False)]),
        _panel(
            2,
            "tantrix (blue) and antipode (red)",
            [
                _polyline(st, (_bounds(st, sa), (2 * PANEL, 0)), "#1f5fbf"),
                _polyline(sa, (_bounds(st, sa), (2 * PANEL, 0)), "#bf1f1f"),
            ],
        ),
    ]
    return _svg(panels)


def oval_svg(h, M=512):
    s = make_support_oval(h)
    oval = support_parametrization(s)
    t = np.arange(M) * (2 * np.pi / M)
    xy = oval(t)
    prof = np.column_stack([t, s.v(t)])
    return _svg(
        [
            _panel(0, "oval", [_polyline(xy, (_bounds(xy), (0, 0)), "black")]),
            _panel(1, "radius of curvature v(t)", [_polyline(prof, (_bounds(prof), (PANEL, 0)), "black", closed=False)]),
        ]
    )


def export(obj, fmt, M=512):
    """Text of the CSV table or SVG plot for a curve or support function."""
    if fmt not in ("csv", "svg"):
        raise ValueError(f"unknown export format {fmt!r}")
    if isinstance(obj, TrigPoly):
        return support_table(obj, M) if fmt == "csv" else oval_svg(obj, M)
    if isinstance(obj, SpaceCurve):
        return curve_table(obj, M) if fmt == "csv" else curve_svg(obj, 2 * M)
    raise TypeError("expected a TrigPoly or a SpaceCurve")
