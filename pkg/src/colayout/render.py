"""Deterministic SVG drawings of a layout with accessibility shading."""

from __future__ import annotations

import re
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .grouping import FunctionalGroups
from .metrics import reachable_from_fields
from .objective import ObjectiveConfig, compute_fields
from .scene import Layout, Scene, apply_layout

PALETTE = ("#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf", "#bcbd22")


@dataclass(frozen=True)
class RenderStyle:
    accessible_fill: str = "#4a90c2"
    accessible_opacity: float = 0.35
    object_fill: str = "#d9d9d9"
    unreachable_fill: str = "#e8603c"
    ungrouped_stroke: str = "#555555"
    palette: tuple[str, ...] = PALETTE
    scale: float = 100.0  # pixels per meter

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")


def _f(v: float) -> str:
    return f"{v:.3f}"


def mask_runs(mask: np.ndarray):
    """Maximal horizontal runs (i0, i1, j) of true cells; i1 exclusive."""
    for j in range(mask.shape[1]):
        col = np.concatenate([[False], mask[:, j], [False]]).astype(np.int8)
        edges = np.flatnonzero(np.diff(col))
        for i0, i1 in zip(edges[::2], edges[1::2]):
            yield int(i0), int(i1), j


def render_svg(
    scene: Scene,
    layout: Layout | None = None,
    groups: FunctionalGroups | None = None,
    config: ObjectiveConfig = ObjectiveConfig(),
    style: RenderStyle = RenderStyle(),
) -> str:
    placed = scene if layout is None else apply_layout(scene, layout)
    fields = compute_fields(placed, config.resolution)
    reachable = reachable_from_fields(fields) if placed.objects else frozenset()
    s, H = style.scale, placed.room.height
    w_px, h_px = placed.room.width * s, H * s

    def pt(x, y):
        return f"{_f(x * s)},{_f((H - y) * s)}"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(w_px)}" height="{_f(h_px)}" '
        f'viewBox="0 0 {_f(w_px)} {_f(h_px)}">',
        f'<rect class="room" x="0.000" y="0.000" width="{_f(w_px)}" height="{_f(h_px)}" '
        'fill="#ffffff" stroke="#000000" stroke-width="2"/>',
        f'<g class="accessible" fill="{style.accessible_fill}" fill-opacity="{style.accessible_opacity}">',
    ]
    res = fields.resolution
    for i0, i1, j in mask_runs(fields.region.mask):
        out.append(
            f'<rect x="{_f(i0 * res * s)}" y="{_f((H - (j + 1) * res) * s)}" '
            f'width="{_f((i1 - i0) * res * s)}" height="{_f(res * s)}"/>'
        )
    out.append("</g>")

    colour = {}
    if groups is not None:
        multi = [g for g in groups.groups if len(g) > 1]
        for k, g in enumerate(multi):
            for oid in g:
                colour[oid] = style.palette[k % len(style.palette)]
    for obj in placed.objects:
        fill = style.object_fill if obj.id in reachable else style.unreachable_fill
        stroke = colour.get(obj.id, style.ungrouped_stroke)
        corners = " ".join(pt(x, y) for x, y in obj.footprint.corners())
        state = "reachable" if obj.id in reachable else "unreachable"
        out.append(
            f'<polygon class="object {state}" data-id="{escape(obj.id)}" points="{corners}" '
            f'fill="{fill}" stroke="{stroke}" stroke-width="3"/>'
        )
        front = obj.footprint.pose.to_world(np.array([obj.footprint.hx, 0.0]))
        out.append(
            f'<line class="heading" x1="{_f(obj.pose.x * s)}" y1="{_f((H - obj.pose.y) * s)}" '
            f'x2="{_f(front[0] * s)}" y2="{_f((H - front[1]) * s)}" stroke="{stroke}" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_f(obj.pose.x * s)}" y="{_f((H - obj.pose.y) * s)}" font-size="12" '
            f'text-anchor="middle" font-family="sans-serif">{escape(obj.id)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


_RECT = re.compile(r'<rect x="([\d.]+)" y="([\d.]+)" width="([\d.]+)" height="([\d.]+)"/>')


def overlay_area(svg: str, scale: float = RenderStyle.scale) -> float:
    """Accessible area in m^2 recovered from the overlay rectangles of a rendered SVG."""
    body = svg.split('<g class="accessible"', 1)[1].split("</g>", 1)[0]
    return sum(float(w) * float(h) for _, _, w, h in _RECT.findall(body)) / (scale * scale)
