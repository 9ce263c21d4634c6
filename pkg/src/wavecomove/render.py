"""Raster heatmaps of wavelet grids with cone shading, significance contours and phase arrows.

Rows are drawn smallest period at the top; because the scale grid is
uniform in log2(period) the vertical axis is logarithmic in period. Arrow
angles are measured counter-clockwise from the rightward direction, so an
in-phase relation points right and a leading first series points up.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

# blue -> teal -> yellow
RAMP = np.array([
    [0.00, 53, 42, 135],
    [0.25, 15, 92, 221],
    [0.50, 18, 177, 178],
    [0.75, 165, 190, 107],
    [1.00, 249, 251, 14],
])
CONTOUR = (0, 0, 0)
ARROW = (0, 0, 0)
BACKGROUND = (255, 255, 255)
COI_BLEND = 0.5


@dataclass(frozen=True)
class Layout:
    cell_w: int
    cell_h: int
    left: int = 56
    top: int = 22
    right: int = 10
    bottom: int = 26

    @classmethod
    def for_grid(cls, shape, width: int = 900, height: int = 320) -> "Layout":
        rows, cols = shape
        return cls(cell_w=max(1, width // max(cols, 1)), cell_h=max(1, height // max(rows, 1)))

    def plot_size(self, shape) -> tuple[int, int]:
        return shape[1] * self.cell_w, shape[0] * self.cell_h

    def image_size(self, shape) -> tuple[int, int]:
        w, h = self.plot_size(shape)
        return self.left + w + self.right, self.top + h + self.bottom

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        return (self.left + (col + 0.5) * self.cell_w, self.top + (row + 0.5) * self.cell_h)


def colorize(grid, vmin: float | None = None, vmax: float | None = None) -> np.ndarray:
    """Map values to RGB bytes along :data:`RAMP`; a flat grid maps to the low end."""
    grid = np.asarray(grid, dtype=float)
    lo = float(np.nanmin(grid)) if vmin is None else vmin
    hi = float(np.nanmax(grid)) if vmax is None else vmax
    if hi > lo:
        t = np.clip((grid - lo) / (hi - lo), 0.0, 1.0)
    else:
        t = np.zeros_like(grid)
    t = np.nan_to_num(t)
    rgb = np.stack([np.interp(t, RAMP[:, 0], RAMP[:, k]) for k in (1, 2, 3)], axis=-1)
    return np.rint(rgb).astype(np.uint8)


def arrow_segments(phase, mask=None, every=(4, 8), length: float = 9.0,
                   layout: Layout | None = None):
    """Start/end pixel coordinates of the phase arrows on a regular lattice.

    Returns a list of ``(x0, y0, x1, y1)`` tuples, each centred on its cell.
    Only lattice cells inside ``mask`` (when given) get an arrow.
    """
    phase = np.asarray(phase, dtype=float)
    layout = layout or Layout.for_grid(phase.shape)
    step_r, step_c = every
    out = []
    for r in range(step_r // 2, phase.shape[0], step_r):
        for c in range(step_c // 2, phase.shape[1], step_c):
            if mask is not None and not mask[r, c]:
                continue
            cx, cy = layout.cell_center(r, c)
            dx = 0.5 * length * np.cos(phase[r, c])
            dy = -0.5 * length * np.sin(phase[r, c])  # image y grows downward
            out.append((cx - dx, cy - dy, cx + dx, cy + dy))
    return out


def _draw_arrow(draw: ImageDraw.ImageDraw, seg, head: float = 3.5) -> None:
    x0, y0, x1, y1 = seg
    draw.line([(x0, y0), (x1, y1)], fill=ARROW, width=1)
    ang = np.arctan2(y1 - y0, x1 - x0)
    for side in (-1, 1):
        a = ang + np.pi + side * np.pi / 6
        draw.line([(x1, y1), (x1 + head * np.cos(a), y1 + head * np.sin(a))], fill=ARROW, width=1)


def _contour_pixels(mask: np.ndarray, layout: Layout) -> np.ndarray:
    """Pixel mask of cell edges where significance switches on or off."""
    rows, cols = mask.shape
    w, h = layout.plot_size(mask.shape)
    edge = np.zeros((h, w), dtype=bool)
    vert = mask[:, 1:] != mask[:, :-1]
    for r, c in zip(*np.nonzero(vert)):
        x = (c + 1) * layout.cell_w
        edge[r * layout.cell_h:(r + 1) * layout.cell_h, max(x - 1, 0):x + 1] = True
    horiz = mask[1:, :] != mask[:-1, :]
    for r, c in zip(*np.nonzero(horiz)):
        y = (r + 1) * layout.cell_h
        edge[max(y - 1, 0):y + 1, c * layout.cell_w:(c + 1) * layout.cell_w] = True
    return edge


def _period_ticks(periods):
    lo, hi = np.log2(periods[0]), np.log2(periods[-1])
    for p in range(int(np.ceil(lo)), int(np.floor(hi)) + 1):
        row = (p - lo) / (hi - lo) * (len(periods) - 1) if hi > lo else 0.0
        yield row, f"{2 ** p:g}"


def heatmap_image(grid, coi, mask=None, phase=None, periods=None, labels=None,
                  vmin=None, vmax=None, title: str = "", every=(4, 8),
                  layout: Layout | None = None) -> Image.Image:
    """Build the heatmap as a PIL image (see :func:`render_heatmap`)."""
    grid = np.asarray(grid, dtype=float)
    rows, cols = grid.shape
    periods = np.arange(1, rows + 1, dtype=float) if periods is None else np.asarray(periods)
    layout = layout or Layout.for_grid(grid.shape)
    rgb = colorize(grid, vmin, vmax).astype(float)
    unreliable = periods[:, None] >= np.asarray(coi, dtype=float)[None, :]
    rgb[unreliable] = (1 - COI_BLEND) * rgb[unreliable] + COI_BLEND * np.array(BACKGROUND)
    plot = np.repeat(np.repeat(np.rint(rgb).astype(np.uint8), layout.cell_h, axis=0),
                     layout.cell_w, axis=1)
    if mask is not None:
        plot[_contour_pixels(np.asarray(mask, dtype=bool), layout)] = CONTOUR

    img = Image.new("RGB", layout.image_size(grid.shape), BACKGROUND)
    img.paste(Image.fromarray(plot), (layout.left, layout.top))
    draw = ImageDraw.Draw(img)
    font = ImageFont.load_default()
    if phase is not None:
        for seg in arrow_segments(phase, mask, every, layout=layout):
            _draw_arrow(draw, seg)
    if title:
        draw.text((layout.left, 4), title, fill=(0, 0, 0), font=font)
    for row, text in _period_ticks(periods):
        y = layout.top + (row + 0.5) * layout.cell_h
        draw.line([(layout.left - 4, y), (layout.left - 1, y)], fill=(0, 0, 0))
        draw.text((4, y - 6), text, fill=(0, 0, 0), font=font)
    if labels:
        y = layout.top + rows * layout.cell_h
        last_x = -1e9
        for c, label in enumerate(labels):
            if not label.endswith("-01"):
                continue
            x = layout.left + (c + 0.5) * layout.cell_w
            draw.line([(x, y), (x, y + 3)], fill=(0, 0, 0))
            if x - last_x >= 40:
                draw.text((x - 12, y + 6), label[:4], fill=(0, 0, 0), font=font)
                last_x = x
    return img


def stack_images(images) -> Image.Image:
    width = max(im.width for im in images)
    out = Image.new("RGB", (width, sum(im.height for im in images)), BACKGROUND)
    y = 0
    for im in images:
        out.paste(im, (0, y))
        y += im.height
    return out


def save_image(img: Image.Image, path) -> Path:
    """Write PNG or binary PPM depending on the suffix; both are lossless."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fmt = "PPM" if path.suffix.lower() in (".ppm", ".pnm") else "PNG"
    img.save(path, format=fmt)
    return path


def render_heatmap(grid, coi, mask=None, phase=None, path="heatmap.png", **kwargs) -> Path:
    """Render ``grid`` to ``path``.

    Cells at or above the cone of influence are blended halfway to white,
    the boundary of ``mask`` is outlined in black, and ``phase`` arrows are
    drawn every ``every=(rows, cols)`` cells where ``mask`` holds.
    """
    return save_image(heatmap_image(grid, coi, mask, phase, **kwargs), path)
