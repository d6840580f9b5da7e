"""Static SVG figure emission for webs and law reports.

Output is deterministic: fixed hash salt, no embedded creation date, and
fixed figure geometry, so identical inputs give identical files up to
the renderer's stamped metadata header.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "primeweb"

import matplotlib.pyplot as plt
import numpy as np

from .web import TWO_PI, Trapezoid, Web

_SAVEKW = {"format": "svg", "metadata": {"Date": None}}
HIGHLIGHT_RAY = 12


def _spiral_xy(web: Web, samples: int = 2000) -> tuple[np.ndarray, np.ndarray]:
    thetas = np.linspace(0.0, web.spiral.theta_end(), samples)
    rhos = np.array([web.spiral.lss_eval(t) for t in thetas])
    return rhos * np.cos(thetas), rhos * np.sin(thetas)


def _ray_points(web: Web, generator: int) -> tuple[list[float], list[float]]:
    xs, ys = [0.0], [0.0]
    for p in web.rays[generator]:
        x, y = p.point.xy()
        xs.append(x)
        ys.append(y)
    return xs, ys


def render_web(
    web: Web,
    path: Path | str,
    title: str = "",
    trapezoid: Trapezoid | None = None,
) -> Path:
    """Web figure: spiral, rays as polylines from the pole, prime dots.

    The initial ray (generator 12) is stroked distinctly; approximate
    placements are drawn hollow.
    """
    path = Path(path)
    fig, ax = plt.subplots(figsize=(8, 8))
    sx, sy = _spiral_xy(web)
    ax.plot(sx, sy, color="0.6", lw=0.7, zorder=1)
    for g in sorted(web.rays):
        xs, ys = _ray_points(web, g)
        if g == HIGHLIGHT_RAY:
            ax.plot(xs, ys, color="crimson", lw=1.8, zorder=3)
        else:
            ax.plot(xs, ys, color="steelblue", lw=0.8, zorder=2)
    for p in web.placements:
        x, y = p.point.xy()
        if p.exact is False:
            ax.plot(x, y, "o", ms=3.5, mfc="white", mec="black", zorder=4)
        else:
            ax.plot(x, y, "o", ms=2.5, color="black", zorder=4)
    if trapezoid is not None:
        _draw_trapezoid(ax, web, trapezoid)
    ax.set_aspect("equal")
    ax.set_title(title or f"{web.rotations}-rotation web, {web.prime_count()} primes")
    ax.set_xlabel("u")
    ax.set_ylabel("v")
    fig.savefig(path, **_SAVEKW)
    plt.close(fig)
    return path


def _draw_trapezoid(ax, web: Web, t: Trapezoid) -> None:
    """Overlay: two spiral edges between the corner angles, two ray chords."""
    (l1, l2), (u1, u2) = t.corners()
    corners = {}
    for v in (l1, l2, u1, u2):
        th = web.spiral.theta_for_arc(float(v))
        rho = web.spiral.lss_eval(th)
        corners[v] = (th, rho)

    def edge(v_from, v_to):
        a, b = corners[v_from][0], corners[v_to][0]
        ts = np.linspace(a, b, 200)
        rs = np.array([web.spiral.lss_eval(x) for x in ts])
        return rs * np.cos(ts), rs * np.sin(ts)

    for pair in ((l1, l2), (u1, u2)):
        ex, ey = edge(*pair)
        ax.plot(ex, ey, color="darkorange", lw=2.2, zorder=5)
    for v_lo, v_hi in ((l1, u1), (l2, u2)):
        (ta, ra), (tb, rb) = corners[v_lo], corners[v_hi]
        ax.plot(
            [ra * math.cos(ta), rb * math.cos(tb)],
            [ra * math.sin(ta), rb * math.sin(tb)],
            color="darkorange",
            lw=2.2,
            zorder=5,
        )


def render_ray_law(rows: list[dict], path: Path | str, ray: int = 9) -> Path:
    """Per-depth relative error of the interval law along one ray."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    depths = [r["depth"] for r in rows]
    eps = [r["epsilon"] for r in rows]
    ax.plot(depths, eps, "o-", color="steelblue")
    ax.axhline(0.2, color="0.6", ls="--", lw=0.8)
    ax.axhline(0.06, color="0.6", ls=":", lw=0.8)
    ax.set_xlabel("depth n")
    ax.set_ylabel("relative error")
    ax.set_title(f"interval law along ray {ray}")
    fig.savefig(path, **_SAVEKW)
    plt.close(fig)
    return path


def law_rows_to_csv(rows: list[dict]) -> str:
    lines = ["depth,value,predicted,epsilon"]
    for r in rows:
        lines.append(f"{r['depth']},{r['value']},{r['predicted']!r},{r['epsilon']!r}")
    return "\n".join(lines) + "\n"
