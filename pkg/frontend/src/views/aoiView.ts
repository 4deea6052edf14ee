import type { AoiEntry, AoiPatternMode, LayoutResponse } from "../types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export const ROLE_FILL: Record<string, string> = {
  start: "#d03030",
  end: "#3050d0",
  intermediate: "#909090",
};
const CROSS_GROUP = "#ffd700";
const PINK = "#ff9ecb";
// Group fills cycle with nesting depth so the hierarchy reads at a glance.
export const GROUP_FILLS = ["#87ceeb", "#4169e1", "#9370db"]; // sky blue, blue, purple

export interface AoiViewHandlers {
  onAoiClick?: (id: number) => void;
  onAoiPatterns?: (char: string, mode: AoiPatternMode) => void;
  onDrawRect?: (rect: [number, number, number, number]) => void;
}

/** Stimulus pane: AOI rectangles, selection, drag-to-draw, graph overlay. */
export class AoiView {
  private svg: SVGSVGElement;
  private menu: HTMLDivElement;
  private width = 0;
  private height = 0;
  private depths = new Map<number, number>();
  private selected = new Set<number>();
  private dragStart: { x: number; y: number } | null = null;
  private rubberBand: SVGRectElement | null = null;

  constructor(
    private root: HTMLElement,
    private handlers: AoiViewHandlers = {},
  ) {
    this.root.classList.add("aoi-view");
    this.svg = document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.menu = document.createElement("div");
    this.menu.className = "aoi-menu";
    this.menu.hidden = true;
    this.root.append(this.svg, this.menu);
    this.svg.addEventListener("mousedown", (e) => this.startDrag(e));
    this.svg.addEventListener("mousemove", (e) => this.moveDrag(e));
    this.svg.addEventListener("mouseup", (e) => this.endDrag(e));
  }

  setStimulus(width: number, height: number, imageUrl: string | null): void {
    this.width = width;
    this.height = height;
    this.svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
    this.svg.setAttribute("width", String(width));
    this.svg.setAttribute("height", String(height));
    this.svg.dataset.image = imageUrl ?? "";
  }

  /** depths: node id -> tree depth, for the cycling group fill colors. */
  render(aois: AoiEntry[], depths: Map<number, number>, selected: number[]): void {
    this.depths = depths;
    this.selected = new Set(selected);
    this.svg.textContent = "";
    this.menu.hidden = true;

    const defs = document.createElementNS(SVG_NS, "defs");
    defs.innerHTML =
      '<marker id="ui-arrow" viewBox="0 0 10 10" refX="9" refY="5" ' +
      'markerWidth="7" markerHeight="7" orient="auto-start-reverse">' +
      '<path d="M 0 0 L 10 5 L 0 10 z" fill="context-stroke"/></marker>';
    this.svg.append(defs);

    const backdrop = document.createElementNS(SVG_NS, "rect");
    backdrop.setAttribute("width", String(this.width));
    backdrop.setAttribute("height", String(this.height));
    backdrop.setAttribute("fill", "white");
    this.svg.append(backdrop);
    if (this.svg.dataset.image) {
      const image = document.createElementNS(SVG_NS, "image");
      image.setAttribute("href", this.svg.dataset.image);
      image.setAttribute("width", String(this.width));
      image.setAttribute("height", String(this.height));
      this.svg.append(image);
      const veil = document.createElementNS(SVG_NS, "rect");
      veil.setAttribute("width", String(this.width));
      veil.setAttribute("height", String(this.height));
      veil.setAttribute("fill", "white");
      veil.setAttribute("fill-opacity", "0.65");
      this.svg.append(veil);
    }

    for (const aoi of aois) {
      const [x, y, w, h] = aoi.rect;
      const g = document.createElementNS(SVG_NS, "g");
      g.dataset.aoiId = String(aoi.id);
      g.dataset.char = aoi.char;
      const rect = document.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", String(x));
      rect.setAttribute("y", String(y));
      rect.setAttribute("width", String(w));
      rect.setAttribute("height", String(h));
      const isSelected = this.selected.has(aoi.id);
      if (isSelected) {
        rect.setAttribute("fill", PINK);
        rect.setAttribute("fill-opacity", "0.6");
        g.classList.add("selected");
      } else if (aoi.group) {
        // groups paint a filled, slightly padded region
        const depth = this.depths.get(aoi.id) ?? 1;
        rect.setAttribute("x", String(x - 4));
        rect.setAttribute("y", String(y - 4));
        rect.setAttribute("width", String(w + 8));
        rect.setAttribute("height", String(h + 8));
        rect.setAttribute("fill", GROUP_FILLS[(depth - 1) % GROUP_FILLS.length]);
        rect.setAttribute("fill-opacity", "0.45");
      } else {
        rect.setAttribute("fill", `hsl(${aoi.hue}, 70%, 50%)`);
        rect.setAttribute("fill-opacity", "0.35");
      }
      rect.setAttribute("stroke", isSelected ? PINK : "#3355cc");
      rect.setAttribute("stroke-width", "1.5");
      g.append(rect);

      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(x + 3));
      label.setAttribute("y", String(y + h - 4));
      label.setAttribute("font-size", "11");
      label.textContent = `${aoi.id}:${aoi.char}`;
      g.append(label);

      g.addEventListener("click", (e) => {
        e.stopPropagation();
        this.handlers.onAoiClick?.(aoi.id);
        this.showMenu(aoi, e as MouseEvent);
      });
      this.svg.append(g);
    }
  }

  private showMenu(aoi: AoiEntry, event: MouseEvent): void {
    this.menu.textContent = "";
    this.menu.hidden = false;
    this.menu.style.left = `${event.clientX + 4}px`;
    this.menu.style.top = `${event.clientY + 4}px`;
    const title = document.createElement("span");
    title.textContent = `${aoi.char}:`;
    this.menu.append(title);
    const modes: [AoiPatternMode, string][] = [
      ["starts", "Starts from the AOI"],
      ["passes", "Passes over the AOI"],
      ["arrives", "Arrives at the AOI"],
    ];
    for (const [mode, caption] of modes) {
      const button = document.createElement("button");
      button.dataset.mode = mode;
      button.textContent = caption;
      button.addEventListener("click", (e) => {
        e.stopPropagation();
        this.menu.hidden = true;
        this.handlers.onAoiPatterns?.(aoi.char, mode);
      });
      this.menu.append(button);
    }
  }

  /** Graph overlay; node positions come verbatim from the layout response. */
  renderOverlay(layout: LayoutResponse | null, highlightedPattern: string | null = null): void {
    for (const old of this.svg.querySelectorAll(".overlay")) old.remove();
    this.menu.hidden = true;
    if (layout === null) return;
    const g = document.createElementNS(SVG_NS, "g");
    g.classList.add("overlay");
    const maxWeight = Math.max(1, ...layout.edges.map((e) => e.weight));
    for (const edge of layout.edges) {
      const a = layout.nodes[edge.from];
      const b = layout.nodes[edge.to];
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(a.x));
      line.setAttribute("y1", String(a.y));
      line.setAttribute("x2", String(b.x));
      line.setAttribute("y2", String(b.y));
      const shade = Math.round(200 - 170 * (edge.weight / maxWeight));
      line.setAttribute(
        "stroke",
        edge.crossGroup ? CROSS_GROUP : `rgb(${shade},${shade},${shade})`,
      );
      // the hovered bar's edges get thick
      line.setAttribute(
        "stroke-width",
        edge.pattern === highlightedPattern ? "3.5" : "1.8",
      );
      line.dataset.pattern = edge.pattern;
      line.setAttribute("marker-end", "url(#ui-arrow)");
      g.append(line);
    }
    for (const node of layout.nodes) {
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String(node.x));
      circle.setAttribute("cy", String(node.y));
      circle.setAttribute("r", "6");
      circle.setAttribute("fill", ROLE_FILL[node.role]);
      circle.dataset.role = node.role;
      circle.dataset.aoi = String(node.aoi);
      g.append(circle);
    }
    this.svg.append(g);
  }

  clearOverlay(): void {
    this.renderOverlay(null);
  }

  private svgPoint(event: MouseEvent): { x: number; y: number } {
    const bounds = this.svg.getBoundingClientRect();
    return { x: event.clientX - bounds.left, y: event.clientY - bounds.top };
  }

  private startDrag(event: MouseEvent): void {
    if ((event.target as Element).closest("[data-aoi-id]")) return;
    this.dragStart = this.svgPoint(event);
    this.rubberBand = document.createElementNS(SVG_NS, "rect") as SVGRectElement;
    this.rubberBand.setAttribute("class", "rubber-band");
    this.rubberBand.setAttribute("fill", "none");
    this.rubberBand.setAttribute("stroke", "#3355cc");
    this.rubberBand.setAttribute("stroke-dasharray", "4 3");
    this.svg.append(this.rubberBand);
  }

  private moveDrag(event: MouseEvent): void {
    if (!this.dragStart || !this.rubberBand) return;
    const now = this.svgPoint(event);
    const x = Math.min(this.dragStart.x, now.x);
    const y = Math.min(this.dragStart.y, now.y);
    this.rubberBand.setAttribute("x", String(x));
    this.rubberBand.setAttribute("y", String(y));
    this.rubberBand.setAttribute("width", String(Math.abs(now.x - this.dragStart.x)));
    this.rubberBand.setAttribute("height", String(Math.abs(now.y - this.dragStart.y)));
  }

  private endDrag(event: MouseEvent): void {
    if (!this.dragStart) return;
    const start = this.dragStart;
    const end = this.svgPoint(event);
    this.dragStart = null;
    this.rubberBand?.remove();
    this.rubberBand = null;
    const x = Math.round(Math.min(start.x, end.x));
    const y = Math.round(Math.min(start.y, end.y));
    const w = Math.round(Math.abs(end.x - start.x));
    const h = Math.round(Math.abs(end.y - start.y));
    if (w >= 3 && h >= 3) this.handlers.onDrawRect?.([x, y, w, h]);
  }
}
