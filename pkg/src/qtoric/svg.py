"""SVG drawings of fans in dimension at most 3.

Coordinates are interval midpoints, so the picture is for display only.
Rays are normalized to unit length; 3D fans are projected after a rotation
given by the view's azimuth and elevation, with each facet shaded.
"""

from __future__ import annotations

import math
from typing import List, Optional, Sequence

from .errors import DimUnsupported
from .fan import QuantumFan

SIZE = 400
SCALE = 160
FILLS = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1", "#9c755f"]


def _unit(v: Sequence[float]) -> List[float]:
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v] if n else list(v)


class _Projection:
    def __init__(self, d: int, azimuth: float, elevation: float):
        self.d = d
        self.ca, self.sa = math.cos(math.radians(azimuth)), math.sin(math.radians(azimuth))
        self.ce, self.se = math.cos(math.radians(elevation)), math.sin(math.radians(elevation))

    def __call__(self, v: Sequence[float]):
        if self.d == 1:
            x, y = v[0], 0.0
        elif self.d == 2:
            x, y = v[0], v[1]
        else:
            # rotate about the z axis, then tilt towards the viewer
            x1 = self.ca * v[0] - self.sa * v[1]
            y1 = self.sa * v[0] + self.ca * v[1]
            x, y = x1, self.ce * v[2] - self.se * y1
        return SIZE / 2 + SCALE * x, SIZE / 2 - SCALE * y


def _pt(p) -> str:
    return f"{p[0]:.3f},{p[1]:.3f}"


def emit_svg(fan: QuantumFan, view: Optional[dict] = None) -> str:
    """SVG text for the fan; raises DimUnsupported when d > 3."""
    d = fan.d
    if d > 3:
        raise DimUnsupported(f"cannot draw a fan in dimension {d}")
    view = view or {}
    proj = _Projection(d, view.get("azimuth", 30.0), view.get("elevation", 25.0))
    origin = proj([0.0] * d)
    unit = {i: _unit([float(x) for x in fan.cal.column(i)]) for i in range(fan.cal.N)}
    shapes: List[str] = []
    rays = set()
    for cid, idx in enumerate(fan.cones):
        if not idx:
            continue
        cone = fan.cone(cid)
        order = sorted(idx)
        ext = [order[k] for k in cone.extreme_rays()] if cone.is_strongly_convex() else order
        rays.update(ext)
        colour = FILLS[cid % len(FILLS)]
        if d == 2 and cone.dim == 2 and len(ext) == 2:
            pts = [origin, proj(unit[ext[0]]), proj(unit[ext[1]])]
            shapes.append(f'<polygon class="cone" data-cone="{cid}" points="{" ".join(_pt(p) for p in pts)}" '
                          f'fill="{colour}" fill-opacity="0.35" stroke="none"/>')
        elif d == 3 and cone.dim >= 2:
            facets = cone.facet_generator_sets() if cone.dim == 3 else [frozenset(range(len(order)))]
            for f in facets:
                members = [order[k] for k in sorted(f) if order[k] in ext]
                if len(members) < 2:
                    continue
                pts = [origin] + [proj(unit[i]) for i in members[:2]]
                shapes.append(f'<polygon class="facet" data-cone="{cid}" points="{" ".join(_pt(p) for p in pts)}" '
                              f'fill="{colour}" fill-opacity="0.25" stroke="{colour}" stroke-width="0.5"/>')
    lines = []
    for i in sorted(rays):
        end = proj(unit[i])
        lines.append(f'<line class="ray" data-index="{i}" x1="{origin[0]:.3f}" y1="{origin[1]:.3f}" '
                     f'x2="{end[0]:.3f}" y2="{end[1]:.3f}" stroke="black" stroke-width="1.5"/>')
        lines.append(f'<text x="{end[0]:.3f}" y="{end[1]:.3f}" font-size="12">v{i}</text>')
    body = "\n".join(shapes + lines)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
            f'viewBox="0 0 {SIZE} {SIZE}">\n{body}\n</svg>\n')
