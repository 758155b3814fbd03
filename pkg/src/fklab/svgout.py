"""Minimal SVG rendering of tilings, rhombus configurations and contour
overlays.  Axial plane coordinates (a, b) map to cartesian
x = a - b/2, y = -(b * sqrt(3)/2); rhombi are colored by type and the
delta/omega edges of a configuration are drawn as heavy strokes.
"""

from __future__ import annotations

import math
from typing import Iterable

from .tiling import (
    RConfiguration,
    Tiling,
    rhombus_corners,
    rhombus_type,
)

TYPE_COLORS = ("#c8d9f0", "#f0d3c8", "#d2ecc9")
DELTA_COLOR = "#c01818"
OMEGA_COLOR = "#7818c0"
GOOD_COLOR = "#9aa5b1"

_SQ3_2 = math.sqrt(3.0) / 2.0


def _xy(p, scale=36.0):
    a, b = p
    return (scale * (a - 0.5 * b), -scale * (_SQ3_2 * b))


def _polygon(points, fill, stroke="#444", width=1.0, opacity=1.0):
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    return (
        f'<polygon points="{pts}" fill="{fill}" fill-opacity="{opacity}" '
        f'stroke="{stroke}" stroke-width="{width}"/>'
    )


def _line(p1, p2, color, width):
    return (
        f'<line x1="{p1[0]:.2f}" y1="{p1[1]:.2f}" x2="{p2[0]:.2f}" y2="{p2[1]:.2f}" '
        f'stroke="{color}" stroke-width="{width}" stroke-linecap="round"/>'
    )


def _wrap(elements: list[str], bbox, pad=30.0) -> str:
    (x0, y0, x1, y1) = bbox
    w, h = x1 - x0 + 2 * pad, y1 - y0 + 2 * pad
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{x0 - pad:.1f} {y0 - pad:.1f} {w:.1f} {h:.1f}" '
        f'width="{w:.0f}" height="{h:.0f}">'
    )
    return head + "\n" + "\n".join(elements) + "\n</svg>\n"


def _bbox(points):
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return (min(xs), min(ys), max(xs), max(ys))


def tiling_svg(tiling: Tiling, scale: float = 36.0) -> str:
    """Rhombi colored by type; edges between different types (delta edges)
    drawn as heavy strokes."""
    from .tiling import rhombus_sides

    elements = []
    pts_all = []
    side_types: dict = {}
    for r in sorted(tiling.rhombi, key=lambda r: sorted(map(sorted, r))):
        corners = [_xy(p, scale) for p in rhombus_corners(r)]
        pts_all.extend(corners)
        elements.append(_polygon(corners, TYPE_COLORS[rhombus_type(r)], stroke=GOOD_COLOR))
        for e in rhombus_sides(r):
            side_types.setdefault(e, []).append(rhombus_type(r))
    for e, types in sorted(side_types.items(), key=lambda kv: sorted(kv[0])):
        if len(types) == 2 and types[0] != types[1]:
            p1, p2 = sorted(e)
            elements.append(_line(_xy(p1, scale), _xy(p2, scale), DELTA_COLOR, 3.0))
    return _wrap(elements, _bbox(pts_all))


def rconfig_svg(rc: RConfiguration, scale: float = 36.0) -> str:
    """A rhombus configuration with overlap shading and delta/omega highlights."""
    elements = []
    pts_all = []
    for r, mult in sorted(rc.rhombus_multiplicity.items(), key=lambda kv: sorted(map(sorted, kv[0]))):
        corners = [_xy(p, scale) for p in rhombus_corners(r)]
        pts_all.extend(corners)
        overlapped = r in rc.overlapping_rhombi
        opacity = 0.45 if overlapped else 1.0
        elements.append(
            _polygon(corners, TYPE_COLORS[rhombus_type(r)], stroke=GOOD_COLOR, opacity=opacity)
        )
    for e in sorted(rc.delta_edges, key=lambda e: sorted(e)):
        p1, p2 = sorted(e)
        elements.append(_line(_xy(p1, scale), _xy(p2, scale), DELTA_COLOR, 3.0))
    for e in sorted(rc.omega_edges, key=lambda e: sorted(e)):
        p1, p2 = sorted(e)
        elements.append(_line(_xy(p1, scale), _xy(p2, scale), OMEGA_COLOR, 3.5))
    if not pts_all:
        pts_all = [(0.0, 0.0)]
    return _wrap(elements, _bbox(pts_all))


def faces_svg(faces: Iterable, scale: float = 36.0) -> str:
    """Convenience: project a face set and render the configuration."""
    return rconfig_svg(RConfiguration.from_faces(faces), scale)
