"""Hidden-state extraction, sub-dynamics similarity, and SVG rendering.

The similarity metric turns the visual claim "similar sub-trajectories use
similar cell-state patterns" into a number: mean cosine similarity between
aligned cell-state rows of two step ranges.

SVG files are written in pixel coordinates (y flipped so trajectories read
the usual way up); the root element carries data-ox/data-oy/data-scale
attributes so the world-to-pixel transform is recoverable from the file.
"""

from dataclasses import dataclass

import numpy as np

from .corpus import integrate_deltas
from .network import forward_sequence

PEN_DOWN_PRESSURE = 0.5  # rendering threshold between pen-down and pen-up


@dataclass
class StateRecord:
    """Hidden and cell state histories for one generated trajectory."""

    hidden: np.ndarray       # [T, n_lstm]
    cell: np.ndarray         # [T, n_lstm]
    label_input: np.ndarray  # [26]
    trajectory: np.ndarray   # [T, 4]


def record_states(params, input_vec, n_steps):
    """Run the net and capture h and c at every step."""
    input_vec = np.asarray(input_vec, dtype=np.float64)
    y, trace = forward_sequence(params, input_vec, n_steps)
    return StateRecord(hidden=trace.h.copy(), cell=trace.c.copy(),
                       label_input=input_vec.copy(), trajectory=y)


def segment_similarity(record_a, range_a, record_b, range_b):
    """Mean cosine similarity between aligned cell-state rows.

    Ranges are half-open (start, stop) step windows. The longer segment is
    resampled to the shorter one by nearest index. Symmetric; 1.0 for a
    nonzero segment against itself.
    """
    seg_a = _slice_states(record_a.cell, range_a)
    seg_b = _slice_states(record_b.cell, range_b)
    k = min(len(seg_a), len(seg_b))
    seg_a = _nearest_resample(seg_a, k)
    seg_b = _nearest_resample(seg_b, k)
    sims = np.empty(k)
    for t in range(k):
        sims[t] = _cosine(seg_a[t], seg_b[t])
    return float(sims.mean())


def _slice_states(states, step_range):
    lo, hi = step_range
    seg = states[lo:hi]
    if len(seg) == 0:
        raise ValueError(f"empty step range {step_range!r}")
    return seg


def _nearest_resample(seg, k):
    if len(seg) == k:
        return seg
    idx = np.rint(np.linspace(0, len(seg) - 1, k)).astype(int)
    return seg[idx]


def _cosine(a, b):
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 and nb == 0.0:
        return 1.0
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a @ b / (na * nb))


def diverging_color(value, vmax):
    """Blue-white-red map symmetric about zero; vmax maps to full red."""
    if vmax <= 0.0:
        t = 0.0
    else:
        t = min(max(value / vmax, -1.0), 1.0)
    if t >= 0.0:
        r, g, b = 255, round(255 * (1 - t)), round(255 * (1 - t))
    else:
        r, g, b = round(255 * (1 + t)), round(255 * (1 + t)), 255
    return f"#{r:02x}{g:02x}{b:02x}"


def export_matrix_text(matrix, path):
    """Numeric text grid, one matrix row per line."""
    matrix = np.asarray(matrix)
    with open(path, "w") as fh:
        for row in np.atleast_2d(matrix):
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def export_heatmap(matrix, path, x_label="step", y_label="unit", cell=8):
    """SVG heatmap of a [T, n] matrix: one cell per (step, unit), columns
    are steps, diverging color scale symmetric about zero."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    if not np.isfinite(matrix).all():
        raise ValueError("heatmap matrix must be finite")
    n_steps, n_units = matrix.shape
    vmax = float(np.abs(matrix).max())
    margin = 34
    width = n_steps * cell + 2 * margin
    height = n_units * cell + 2 * margin
    parts = [_svg_header(width, height)]
    parts.append('<g class="cells">')
    for t in range(n_steps):
        for u in range(n_units):
            color = diverging_color(matrix[t, u], vmax)
            parts.append(
                f'<rect x="{margin + t * cell}" y="{margin + u * cell}" '
                f'width="{cell}" height="{cell}" fill="{color}"/>')
    parts.append('</g>')
    cx = margin + n_steps * cell / 2
    cy = margin + n_units * cell / 2
    parts.append(f'<text x="{cx:.0f}" y="{height - 8}" '
                 f'text-anchor="middle" font-size="12">{x_label}</text>')
    parts.append(f'<text x="10" y="{cy:.0f}" text-anchor="middle" '
                 f'font-size="12" transform="rotate(-90 10 {cy:.0f})">'
                 f'{y_label}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def _svg_header(width, height, ox=0.0, oy=0.0, scale=1.0):
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
            f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}" '
            f'data-ox="{ox!r}" data-oy="{oy!r}" data-scale="{scale!r}">')


def _pen_segments(trajectory):
    """(x1, y1, x2, y2, pressure) for every pen-down motion. The segment
    into point t is drawn when pressure[t] >= PEN_DOWN_PRESSURE."""
    trajectory = np.asarray(trajectory, dtype=np.float64)
    pos = integrate_deltas(trajectory)
    segments = []
    prev = np.zeros(2)
    for t in range(len(trajectory)):
        cur = pos[t]
        if trajectory[t, 2] >= PEN_DOWN_PRESSURE:
            segments.append((prev[0], prev[1], cur[0], cur[1],
                             trajectory[t, 2]))
        prev = cur
    return segments


def _world_bounds(trajectories):
    pts = np.vstack([np.vstack([[0.0, 0.0], integrate_deltas(t)])
                     for t in trajectories])
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = max(hi[0] - lo[0], hi[1] - lo[1], 1e-9)
    return lo, span


def _trajectory_group(trajectory, to_px, color, css_class, base_width=2.5):
    lines = [f'<g class="{css_class}" stroke="{color}" fill="none" '
             f'stroke-linecap="round">']
    for x1, y1, x2, y2, pressure in _pen_segments(trajectory):
        w = base_width * min(max(pressure, 0.15), 1.0)
        ax, ay = to_px(x1, y1)
        bx, by = to_px(x2, y2)
        lines.append(f'<line x1="{ax:.2f}" y1="{ay:.2f}" x2="{bx:.2f}" '
                     f'y2="{by:.2f}" stroke-width="{w:.2f}"/>')
    lines.append("</g>")
    return lines


def render_traces(entries, path, size=320, margin=24):
    """Superimpose trajectories in one coordinate frame.

    `entries` is a list of (trajectory, color, css_class) tuples; pen-up
    motion is invisible and stroke width follows the pressure channel.
    """
    trajs = [e[0] for e in entries]
    lo, span = _world_bounds(trajs)
    scale = (size - 2 * margin) / span
    ox = margin - lo[0] * scale
    oy = size - margin + lo[1] * scale  # y flip

    def to_px(x, y):
        return ox + x * scale, oy - y * scale

    parts = [_svg_header(size, size, ox=ox, oy=oy, scale=scale)]
    for trajectory, color, css_class in entries:
        parts.extend(_trajectory_group(trajectory, to_px, color, css_class))
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def render_svg(trajectory, path, overlay=None):
    """Render one trajectory (optional second one overlaid in a
    contrasting color for target-vs-generated comparisons)."""
    entries = [(trajectory, "#1f77b4", "trajectory-a")]
    if overlay is not None:
        entries.append((overlay, "#d62728", "trajectory-b"))
    render_traces(entries, path)


def render_sheet(trajectories, path, captions=None, cell_size=150,
                 margin=16):
    """Row of glyph cells sharing one scale (variant/blend sheets)."""
    if captions is not None and len(captions) != len(trajectories):
        raise ValueError("one caption per trajectory required")
    n = len(trajectories)
    lo, span = _world_bounds(trajectories)
    scale = (cell_size - 2 * margin) / span
    width = n * cell_size
    height = cell_size + (20 if captions else 0)
    parts = [_svg_header(width, height, ox=0.0, oy=0.0, scale=scale)]
    for k, trajectory in enumerate(trajectories):
        ox = k * cell_size + margin - lo[0] * scale
        oy = cell_size - margin + lo[1] * scale

        def to_px(x, y, ox=ox, oy=oy):
            return ox + x * scale, oy - y * scale

        parts.extend(_trajectory_group(trajectory, to_px, "#1f77b4",
                                       f"glyph glyph-{k}"))
        if captions:
            cx = k * cell_size + cell_size / 2
            parts.append(f'<text x="{cx:.0f}" y="{height - 6}" '
                         f'text-anchor="middle" font-size="11">'
                         f'{captions[k]}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
