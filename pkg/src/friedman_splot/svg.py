"""Static SVG rendering of the S-plot.

Output depends only on the report and the package version, so identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

from . import __version__
from .splot import SPlotReport

WIDTH, HEIGHT = 800, 500
LEFT, RIGHT, TOP, BOTTOM = 80, 40, 60, 70
ABOVE_COLOR = "#c0392b"
BELOW_COLOR = "#2c6fad"


def _nice_step(span: float, target_ticks: int = 5) -> float:
    raw = span / target_ticks
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 2.5, 5, 10):
        if m * mag >= raw:
            return m * mag
    return 10 * mag


def _f(x: float) -> str:
    return f"{x:.2f}"


def render_splot_svg(report: SPlotReport, path: str | Path | None = None) -> str:
    """Render ``report`` as an SVG document; also write it to ``path`` when given."""
    s = report.components.s
    labels = report.group_labels
    dl = report.decision_limit
    step = _nice_step(max(max(s), dl) * 1.1)
    y_max = step * math.ceil(max(max(s), dl) * 1.1 / step)
    plot_w = WIDTH - LEFT - RIGHT
    plot_h = HEIGHT - TOP - BOTTOM
    n = len(s)

    def px(i: int) -> float:
        return LEFT + plot_w * (i + 0.5) / n

    def py(v: float) -> float:
        return TOP + plot_h * (1.0 - v / y_max)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="13">',
        f"<!-- friedman-splot {escape(__version__)} -->",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="30" text-anchor="middle" font-size="16">'
        f"S-plot (family alpha = {report.family_alpha:.4g}, per-test alpha = {report.per_test_alpha:.4g})</text>",
    ]

    out.append('<g class="grid" stroke="#dddddd" stroke-width="1">')
    ticks = []
    k = 0
    while k * step <= y_max + 1e-12:
        ticks.append(k * step)
        k += 1
    for v in ticks:
        out.append(f'<line x1="{LEFT}" y1="{_f(py(v))}" x2="{WIDTH - RIGHT}" y2="{_f(py(v))}"/>')
    out.append("</g>")

    out.append('<g class="axes" stroke="black" stroke-width="1.5">')
    out.append(f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + plot_h}"/>')
    out.append(f'<line x1="{LEFT}" y1="{TOP + plot_h}" x2="{WIDTH - RIGHT}" y2="{TOP + plot_h}"/>')
    out.append("</g>")
    out.append('<g class="ticks" text-anchor="end">')
    for v in ticks:
        out.append(f'<text x="{LEFT - 8}" y="{_f(py(v) + 4)}">{v:g}</text>')
    out.append("</g>")
    out.append('<g class="group-labels" text-anchor="middle">')
    for i, label in enumerate(labels):
        out.append(f'<text x="{_f(px(i))}" y="{TOP + plot_h + 20}">{escape(label)}</text>')
    out.append("</g>")
    out.append(f'<text class="axis-title" x="{LEFT + plot_w / 2:.2f}" y="{HEIGHT - 20}" text-anchor="middle">Group</text>')
    out.append(
        f'<text class="axis-title" x="22" y="{TOP + plot_h / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 22 {TOP + plot_h / 2:.2f})">S_g</text>'
    )

    y_dl = _f(py(dl))
    out.append(
        f'<line class="decision-limit" x1="{LEFT}" y1="{y_dl}" x2="{WIDTH - RIGHT}" y2="{y_dl}" '
        f'stroke="{ABOVE_COLOR}" stroke-width="1.5" stroke-dasharray="6 4" data-value="{dl!r}"/>'
    )
    out.append(
        f'<text class="decision-limit-label" x="{WIDTH - RIGHT - 4}" y="{_f(py(dl) - 6)}" '
        f'text-anchor="end" fill="{ABOVE_COLOR}">DL = {dl:.4f}</text>'
    )

    out.append('<g class="points">')
    for i, (label, v) in enumerate(zip(labels, s)):
        above = v > dl
        cls = "point above" if above else "point below"
        color = ABOVE_COLOR if above else BELOW_COLOR
        out.append(
            f'<circle class="{cls}" cx="{_f(px(i))}" cy="{_f(py(v))}" r="6" fill="{color}" '
            f'data-group="{escape(label, {chr(34): "&quot;"})}" data-value="{v!r}"/>'
        )
        if above:
            out.append(
                f'<text class="point-label" x="{_f(px(i) + 10)}" y="{_f(py(v) - 8)}" fill="{color}">'
                f"{escape(label)} ({v:.4f})</text>"
            )
    out.append("</g>")
    out.append("</svg>")
    doc = "\n".join(out) + "\n"
    if path is not None:
        Path(path).write_text(doc, encoding="utf-8")
    return doc
