"""Deterministic SVG rendering of a solution path: one polyline per
coordinate over the homotopy parameter, breakpoint values as axis ticks."""

from __future__ import annotations

import numpy as np

from .pathexport import export_vectors

WIDTH, HEIGHT = 720, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 56, 16, 16, 48

PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def path_svg(export: dict) -> str:
    points = export_vectors(export)
    n = int(export["n"])
    deltas = [d for _, d, _, _ in points]
    xs = np.array([x for _, _, x, _ in points])  # (n_bp, n)

    d_hi, d_lo = deltas[0], deltas[-1]
    span = d_hi - d_lo
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(delta: float) -> float:
        if span <= 0:
            return MARGIN_L + plot_w / 2
        return MARGIN_L + (d_hi - delta) / span * plot_w

    v_lo = min(float(xs.min()), 0.0)
    v_hi = max(float(xs.max()), 0.0)
    if v_hi - v_lo <= 0:
        v_lo, v_hi = -1.0, 1.0
    pad = 0.05 * (v_hi - v_lo)
    v_lo, v_hi = v_lo - pad, v_hi + pad

    def py(v: float) -> float:
        return MARGIN_T + (v_hi - v) / (v_hi - v_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN_L}" y1="{_fmt(py(0.0))}" x2="{WIDTH - MARGIN_R}" '
        f'y2="{_fmt(py(0.0))}" stroke="#cccccc" stroke-width="1"/>',
    ]
    for j in range(n):
        coords = " ".join(f"{_fmt(px(d))},{_fmt(py(float(x[j])))}"
                          for _, d, x, _ in points)
        color = PALETTE[j % len(PALETTE)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'points="{coords}"/>')
    axis_y = HEIGHT - MARGIN_B
    parts.append(f'<line x1="{MARGIN_L}" y1="{axis_y}" x2="{WIDTH - MARGIN_R}" '
                 f'y2="{axis_y}" stroke="black" stroke-width="1"/>')
    for _, d, _, _ in points:
        x_pos = px(d)
        parts.append(f'<line x1="{_fmt(x_pos)}" y1="{axis_y}" x2="{_fmt(x_pos)}" '
                     f'y2="{axis_y + 5}" stroke="black" stroke-width="1"/>')
        parts.append(f'<text x="{_fmt(x_pos)}" y="{axis_y + 18}" font-size="10" '
                     f'font-family="monospace" text-anchor="middle">{d:.4g}</text>')
    parts.append(f'<text x="{WIDTH // 2}" y="{HEIGHT - 8}" font-size="11" '
                 f'font-family="monospace" text-anchor="middle">bound at each breakpoint</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
