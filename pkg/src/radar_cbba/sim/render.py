"""SVG snapshots of the world: radars, targets, claims and uncertainty ellipses."""

from __future__ import annotations

import math

MAIN_COLOR = "green"
OPTIONAL_COLOR = "purple"
RADAR_COLOR = "blue"
TARGET_COLOR = "red"
ELLIPSE_COLOR = "gold"


def _f(v: float) -> str:
    return f"{v:.2f}"


def render_snapshot(path, *, radars: dict, targets: dict, main_claims: dict, optional_claims: dict,
                    ellipses=(), extent: float = 20_000.0, size: int = 800):
    """Write an SVG picture of one simulation state.

    ``radars`` maps radar id to :class:`RadarParams`, ``targets`` maps target
    id to its true position, and the claim maps give each radar's main and
    optional bundles. One green line is drawn per main claim and one purple
    line per optional claim. World coordinates are in meters with +y up.
    """
    k = size / extent

    def px(x, y):
        return x * k, size - y * k

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="black"/>',
        f'<line class="axis" x1="0" y1="{size}" x2="{size}" y2="{size}" stroke="black"/>',
        f'<line class="axis" x1="0" y1="0" x2="0" y2="{size}" stroke="black"/>',
    ]
    for rid in sorted(radars):
        x, y = px(*radars[rid].position)
        r = radars[rid].range_max * k
        out.append(f'<circle class="coverage" cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" '
                   f'fill="none" stroke="lightblue" stroke-dasharray="4"/>')
    for e in ellipses:
        a, b, phi = e.axes()
        cx, cy = px(*e.center)
        out.append(
            f'<ellipse class="uncertainty" cx="{_f(cx)}" cy="{_f(cy)}" rx="{_f(max(a * k, 0.5))}" '
            f'ry="{_f(max(b * k, 0.5))}" transform="rotate({_f(-math.degrees(phi))} {_f(cx)} {_f(cy)})" '
            f'fill="none" stroke="{ELLIPSE_COLOR}"/>'
        )
    for claims, color, cls in ((main_claims, MAIN_COLOR, "main"), (optional_claims, OPTIONAL_COLOR, "optional")):
        for rid in sorted(claims):
            x1, y1 = px(*radars[rid].position)
            for j in sorted(claims[rid]):
                if j not in targets:
                    continue
                x2, y2 = px(*targets[j][:2])
                out.append(f'<line class="{cls}" x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
                           f'stroke="{color}"/>')
    for rid in sorted(radars):
        x, y = px(*radars[rid].position)
        out.append(f'<circle class="radar" cx="{_f(x)}" cy="{_f(y)}" r="5" fill="{RADAR_COLOR}"/>')
    for j in sorted(targets):
        x, y = px(*targets[j][:2])
        pts = f"{_f(x)},{_f(y - 6)} {_f(x - 5)},{_f(y + 4)} {_f(x + 5)},{_f(y + 4)}"
        out.append(f'<polygon class="target" points="{pts}" fill="{TARGET_COLOR}"/>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out))
        fh.write("\n")
