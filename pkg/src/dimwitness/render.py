"""Static SVG renderings of the three report figures.

Everything here is a pure string builder: values in, one self-contained
``<svg>`` document out.  No plotting dependency, deterministic output.
"""

import math

from .core import viviani_point

_FONT = "font-family='Helvetica,Arial,sans-serif'"


def _esc(s):
    return (str(s).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def _heat_color(v, lo, hi):
    """Two-tone ramp: deep teal at lo through white toward brick at hi."""
    if hi <= lo:
        t = 0.5
    else:
        t = (v - lo) / (hi - lo)
        t = min(1.0, max(0.0, t))
    if t < 0.5:
        u = t / 0.5
        r, g, b = (int(16 + (255 - 16) * u), int(100 + (255 - 100) * u),
                   int(110 + (255 - 110) * u))
    else:
        u = (t - 0.5) / 0.5
        r, g, b = (255, int(255 - (255 - 80) * u), int(255 - (255 - 60) * u))
    return f"rgb({r},{g},{b})"


def svg_heatmap(entries, title="probability matrix"):
    """5x5 heatmap with in-cell values; row 5 is the ones row."""
    cell = 64
    left, top = 70, 56
    w = left + 5 * cell + 20
    h = top + 5 * cell + 30
    vals = [[float(entries[i][j]) for j in range(5)] for i in range(5)]
    flat = [v for row in vals for v in row]
    lo, hi = min(flat), max(flat)
    parts = [
        f"<svg xmlns='http://www.w3.org/2000/svg' width='{w}' height='{h}' "
        f"viewBox='0 0 {w} {h}'>",
        f"<rect width='{w}' height='{h}' fill='white'/>",
        f"<text x='{left}' y='24' {_FONT} font-size='15' "
        f"font-weight='bold'>{_esc(title)}</text>",
    ]
    for j in range(5):
        x = left + j * cell + cell // 2
        parts.append(
            f"<text x='{x}' y='{top - 10}' {_FONT} font-size='12' "
            f"text-anchor='middle'>j={j + 1}</text>"
        )
    for i in range(5):
        label = f"k={i + 1}" if i < 4 else "ones"
        y = top + i * cell + cell // 2 + 4
        parts.append(
            f"<text x='{left - 8}' y='{y}' {_FONT} font-size='12' "
            f"text-anchor='end'>{label}</text>"
        )
        for j in range(5):
            v = vals[i][j]
            x = left + j * cell
            yy = top + i * cell
            fill = _heat_color(v, lo, hi)
            dark = v < lo + 0.25 * (hi - lo)
            parts.append(
                f"<rect x='{x}' y='{yy}' width='{cell}' height='{cell}' "
                f"fill='{fill}' stroke='#555' stroke-width='0.5'/>"
            )
            parts.append(
                f"<text x='{x + cell // 2}' y='{yy + cell // 2 + 4}' {_FONT} "
                f"font-size='12' text-anchor='middle' "
                f"fill='{'white' if dark else 'black'}'>{v:.4g}</text>"
            )
    parts.append("</svg>")
    return "\n".join(parts)


def svg_job_scatter(per_job, pooled_w=None, title="witness per job"):
    """Scatter of per-job witness values with +-1 sigma whiskers.

    per_job: sequence of (job_index, w, sigma).  A dashed line marks zero;
    an optional solid line marks the pooled witness value.
    """
    rows = [(int(i), float(wv), float(sv)) for i, wv, sv in per_job]
    if not rows:
        raise ValueError("no per-job values to plot")
    width, height = 560, 340
    left, right, top, bottom = 86, 20, 48, 46
    span_lo = min(min(wv - sv for _, wv, sv in rows), 0.0)
    span_hi = max(max(wv + sv for _, wv, sv in rows), 0.0)
    if pooled_w is not None:
        span_lo = min(span_lo, float(pooled_w))
        span_hi = max(span_hi, float(pooled_w))
    pad = 0.08 * (span_hi - span_lo or 1.0)
    span_lo -= pad
    span_hi += pad
    xs = [i for i, _, _ in rows]
    x_lo, x_hi = min(xs), max(xs)

    def px(i):
        if x_hi == x_lo:
            return left + (width - left - right) / 2
        return left + (i - x_lo) * (width - left - right) / (x_hi - x_lo)

    def py(v):
        return top + (span_hi - v) * (height - top - bottom) / (span_hi - span_lo)

    parts = [
        f"<svg xmlns='http://www.w3.org/2000/svg' width='{width}' "
        f"height='{height}' viewBox='0 0 {width} {height}'>",
        f"<rect width='{width}' height='{height}' fill='white'/>",
        f"<text x='{left}' y='24' {_FONT} font-size='15' "
        f"font-weight='bold'>{_esc(title)}</text>",
        f"<line x1='{left}' y1='{top}' x2='{left}' y2='{height - bottom}' "
        "stroke='black'/>",
        f"<line x1='{left}' y1='{height - bottom}' x2='{width - right}' "
        f"y2='{height - bottom}' stroke='black'/>",
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        v = span_lo + frac * (span_hi - span_lo)
        y = py(v)
        parts.append(
            f"<line x1='{left - 4}' y1='{y:.1f}' x2='{left}' y2='{y:.1f}' "
            "stroke='black'/>"
        )
        parts.append(
            f"<text x='{left - 8}' y='{y + 4:.1f}' {_FONT} font-size='11' "
            f"text-anchor='end'>{v:.3g}</text>"
        )
    zero_y = py(0.0)
    parts.append(
        f"<line x1='{left}' y1='{zero_y:.1f}' x2='{width - right}' "
        f"y2='{zero_y:.1f}' stroke='#888' stroke-dasharray='5,4'/>"
    )
    if pooled_w is not None:
        yp = py(float(pooled_w))
        parts.append(
            f"<line x1='{left}' y1='{yp:.1f}' x2='{width - right}' "
            f"y2='{yp:.1f}' stroke='#b2452c' stroke-width='1.2'/>"
        )
    for i, wv, sv in rows:
        x = px(i)
        parts.append(
            f"<line x1='{x:.1f}' y1='{py(wv - sv):.1f}' x2='{x:.1f}' "
            f"y2='{py(wv + sv):.1f}' stroke='#1d6d77' stroke-width='1.4'/>"
        )
        parts.append(
            f"<circle cx='{x:.1f}' cy='{py(wv):.1f}' r='3.4' fill='#1d6d77'/>"
        )
        parts.append(
            f"<text x='{x:.1f}' y='{height - bottom + 16}' {_FONT} "
            f"font-size='10' text-anchor='middle'>{i}</text>"
        )
    parts.append(
        f"<text x='{(left + width - right) / 2:.0f}' y='{height - 8}' {_FONT} "
        "font-size='12' text-anchor='middle'>job index</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts)


_AZ = math.radians(32.0)
_EL = math.radians(-58.0)


def _project(p):
    """Orthographic camera: yaw about z, then tilt; returns screen (u, v)."""
    x, y, z = p
    u = x * math.cos(_AZ) + y * math.sin(_AZ)
    yr = -x * math.sin(_AZ) + y * math.cos(_AZ)
    v = yr * math.sin(_EL) + z * math.cos(_EL)
    return u, -v


def _polyline(points3d, scale, cx, cy, color, width=1.6, dashed=False):
    coords = " ".join(
        f"{cx + scale * u:.2f},{cy + scale * v:.2f}"
        for u, v in (_project(p) for p in points3d)
    )
    dash = " stroke-dasharray='4,3'" if dashed else ""
    return (f"<polyline points='{coords}' fill='none' stroke='{color}' "
            f"stroke-width='{width}'{dash}/>")


def svg_viviani(angles, title="setting curves on the Bloch sphere"):
    """Both window-shaped setting curves, with the configured angles marked.

    Preparation markers sit on the preparation branch at each beta;
    measurement markers on the other branch at each phi.
    """
    size = 460
    cx = cy = size / 2
    scale = 150.0
    steps = 240
    grid = [2 * math.pi * i / steps for i in range(steps + 1)]
    parts = [
        f"<svg xmlns='http://www.w3.org/2000/svg' width='{size}' "
        f"height='{size}' viewBox='0 0 {size} {size}'>",
        f"<rect width='{size}' height='{size}' fill='white'/>",
        f"<text x='20' y='26' {_FONT} font-size='14' "
        f"font-weight='bold'>{_esc(title)}</text>",
        f"<circle cx='{cx}' cy='{cy}' r='{scale}' fill='none' "
        "stroke='#999' stroke-width='1'/>",
    ]
    equator = [(math.cos(a), math.sin(a), 0.0) for a in grid]
    parts.append(_polyline(equator, scale, cx, cy, "#bbb", 0.8, dashed=True))
    prep = [viviani_point(a, "preparation") for a in grid]
    meas = [viviani_point(a, "measurement") for a in grid]
    parts.append(_polyline(prep, scale, cx, cy, "#1d6d77"))
    parts.append(_polyline(meas, scale, cx, cy, "#b2452c"))
    for beta in angles.beta:
        u, v = _project(viviani_point(beta, "preparation"))
        parts.append(
            f"<circle cx='{cx + scale * u:.2f}' cy='{cy + scale * v:.2f}' "
            "r='4' fill='#1d6d77' stroke='white' stroke-width='1'/>"
        )
    for phi in angles.phi:
        u, v = _project(viviani_point(phi, "measurement"))
        parts.append(
            f"<rect x='{cx + scale * u - 3.5:.2f}' "
            f"y='{cy + scale * v - 3.5:.2f}' width='7' height='7' "
            "fill='#b2452c' stroke='white' stroke-width='1'/>"
        )
    parts.append(
        f"<text x='20' y='{size - 30}' {_FONT} font-size='11' "
        "fill='#1d6d77'>preparation branch (circles at beta)</text>"
    )
    parts.append(
        f"<text x='20' y='{size - 14}' {_FONT} font-size='11' "
        "fill='#b2452c'>measurement branch (squares at phi)</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts)
