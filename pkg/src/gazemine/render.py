"""SVG rendering of the stimulus, AOI rectangles, and the transition graph,
plus the debug PNG dump of the detection pipeline."""

from __future__ import annotations

import base64
import io

import numpy as np
from PIL import Image

from .detect import CellGrid
from .layout import ColorAssignment, TransitionGraph
from .model import CutEntry, Rect, Stimulus

ROLE_FILL = {"start": "#d03030", "end": "#3050d0", "intermediate": "#909090"}
CROSS_GROUP_STROKE = "#ffd700"  # vivid yellow for edges between different groups
NODE_RADIUS = 6.0


def _hsl(hue: float) -> str:
    # Saturation and lightness are fixed so hue alone identifies the AOI.
    return f"hsl({hue:.1f}, 70%, 50%)"


def _edge_stroke(weight: int, max_weight: int) -> str:
    # Heavier transitions render darker; lightest stays clearly visible.
    scale = weight / max_weight if max_weight > 0 else 0.0
    v = int(round(200 - 170 * scale))
    return f"rgb({v},{v},{v})"


def _png_data_uri(pixels: np.ndarray) -> str:
    img = Image.fromarray(np.asarray(pixels, dtype=np.uint8))
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return "data:image/png;base64," + base64.b64encode(buf.getvalue()).decode("ascii")


def render_svg(
    width: int,
    height: int,
    cut: list[CutEntry],
    colors: ColorAssignment,
    graph: TransitionGraph,
    stimulus: Stimulus | None = None,
) -> str:
    """Compose the AOI view as an SVG document.

    The stimulus (when given) is whitened with alpha compositing so the graph
    stays readable; AOI rects are translucent in their assigned hue with the
    id and char labeled in the lower left; edges are arrows, grayscale by
    weight except cross-group ones in vivid yellow; nodes are colored by role
    (start red, end blue, intermediate gray).
    """
    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    parts.append(
        '<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" '
        'markerWidth="7" markerHeight="7" orient="auto-start-reverse">'
        '<path d="M 0 0 L 10 5 L 0 10 z" fill="context-stroke"/></marker></defs>'
    )
    parts.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>')
    if stimulus is not None and stimulus.pixels is not None:
        uri = _png_data_uri(stimulus.pixels)
        parts.append(
            f'<image href="{uri}" x="0" y="0" width="{width}" height="{height}"/>'
        )
        # Whiten the picture so the overlay carries the visual weight.
        parts.append(
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white" fill-opacity="0.65"/>'
        )

    for entry in cut:
        hue = colors.display.get(entry.node.id, 0.0)
        r = entry.rect
        parts.append(
            f'<rect x="{r.x}" y="{r.y}" width="{r.w}" height="{r.h}" '
            f'fill="{_hsl(hue)}" fill-opacity="0.35" stroke="{_hsl(hue)}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{r.x + 3}" y="{r.bottom - 4}" font-size="12" '
            f'font-family="sans-serif" fill="#202020">{entry.node.id}:{entry.char}</text>'
        )

    max_weight = max((e.weight for e in graph.edges), default=0)
    for e in graph.edges:
        a, b = graph.nodes[e.src], graph.nodes[e.dst]
        stroke = CROSS_GROUP_STROKE if e.cross_group else _edge_stroke(e.weight, max_weight)
        width_px = 3.5 if e.highlighted else 1.8
        parts.append(
            f'<line x1="{a.x:.2f}" y1="{a.y:.2f}" x2="{b.x:.2f}" y2="{b.y:.2f}" '
            f'stroke="{stroke}" stroke-width="{width_px}" marker-end="url(#arrow)"/>'
        )

    for n in graph.nodes:
        parts.append(
            f'<circle cx="{n.x:.2f}" cy="{n.y:.2f}" r="{NODE_RADIUS}" '
            f'fill="{ROLE_FILL[n.role]}" stroke="#303030" stroke-width="0.8"/>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def debug_detection_png(
    grid: CellGrid,
    candidates: list[Rect],
    final: list[Rect],
    z: int,
    path: str,
) -> None:
    """Dump the quantized grid with candidate rects in red and final in green."""
    rows, cols = grid.cells.shape
    if grid.palette is not None:
        rgb = grid.palette[grid.cells].astype(np.uint8)
    else:
        rgb = np.where(grid.cells[..., None] == 0, 255, 64).astype(np.uint8).repeat(3, axis=2)
    img = Image.fromarray(rgb, mode="RGB").resize((cols * z, rows * z), Image.NEAREST)
    px = np.array(img)

    def outline(r: Rect, color: tuple[int, int, int], scale: int) -> None:
        x0, y0 = r.x * scale, r.y * scale
        x1, y1 = min(r.right * scale, px.shape[1]) - 1, min(r.bottom * scale, px.shape[0]) - 1
        px[y0, x0:x1 + 1] = color
        px[y1, x0:x1 + 1] = color
        px[y0:y1 + 1, x0] = color
        px[y0:y1 + 1, x1] = color

    for r in candidates:
        outline(r, (220, 40, 40), z)      # candidates are in cell coordinates
    for r in final:
        outline(r, (40, 200, 40), 1)      # final rects are in pixel coordinates
    Image.fromarray(px).save(path, format="PNG")
