"""Regenerate the bundled example files in ``src/skewloops/data``."""

from pathlib import Path

import numpy as np

from skewloops.curves import SampledCurve, circle
from skewloops.io import save_json
from skewloops.trigpoly import TrigPoly

DATA = Path(__file__).resolve().parents[1] / "src" / "skewloops" / "data"


def figure_eight_cylinder(M=4096):
    """``(cos t, sin 2t, t/pi - (t/pi)**15)`` on ``[-pi, pi)``; C^1 but not C^2 at the seam."""
    t = -np.pi + np.arange(M) * (2 * np.pi / M)
    u = t / np.pi
    P = np.column_stack([np.cos(t), np.sin(2 * t), u - u**15])
    V = np.column_stack([-np.sin(t), 2 * np.cos(2 * t), (1.0 - 15.0 * u**14) / np.pi])
    return SampledCurve(P, V)


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    files = {
        "unit_circle.json": TrigPoly(1.0).to_dict(),
        "asym3.json": TrigPoly(1.0, [0.0, 0.0, 0.05], [0.0, 0.0, 0.0]).to_dict(),
        "ellipse_oval.json": TrigPoly(1.0, [0.0, 0.3], [0.0, 0.0]).to_dict(),
        "planar_circle.json": circle().to_dict(),
        "figure_eight_cylinder.json": figure_eight_cylinder().to_dict(),
        "sphere_latitude.json": circle(0.6, 0.8).to_dict(),
        "sigma_latitude.json": circle(float(np.sinh(1.0)), float(np.cosh(1.0))).to_dict(),
    }
    for name, doc in files.items():
        save_json(doc, DATA / name)
        print(DATA / name)


if __name__ == "__main__":
    main()
