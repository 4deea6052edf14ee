import type { PatternsDiff, PatternsResponse, PatternsTotal } from "../types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

// Stacked-segment colors per participant index; the focused participant is
// always drawn sky blue at the bottom of the stack.
const PALETTE = [
  "#4e79a7", "#f28e2b", "#59a14f", "#e15759",
  "#76b7b2", "#edc948", "#b07aa1", "#9c755f",
];
export const FOCUS_COLOR = "#7ec8e3";
const COMMON_GRAY = "#9a9a9a";

export interface BarChartHandlers {
  onBarClick?: (pattern: string) => void;
  onBarHover?: (pattern: string | null) => void;
}

interface BarSpec {
  pattern: string;
  segments: { color: string; value: number }[];
  kind: "total" | "common" | "uniqueP" | "uniqueQ";
}

function totalBars(data: PatternsTotal): BarSpec[] {
  const order =
    data.stackOrder ?? data.participants; // focus participant first when sorting
  const focus = data.sortParticipant ?? null;
  return data.patterns.map((row) => ({
    pattern: row.chars,
    kind: "total" as const,
    segments: order
      .map((participant) => ({
        color:
          participant === focus
            ? FOCUS_COLOR
            : PALETTE[data.participants.indexOf(participant) % PALETTE.length],
        value: row.perParticipant[participant] ?? 0,
      }))
      .filter((s) => s.value > 0),
  }));
}

function diffBars(data: PatternsDiff): BarSpec[] {
  const [p, q] = data.pair;
  const colorOf = (owner: string | null) =>
    owner === p ? FOCUS_COLOR : owner === q ? PALETTE[1] : COMMON_GRAY;
  const common: BarSpec[] = data.common.map((bar) => ({
    pattern: bar.chars,
    kind: "common" as const,
    segments: [
      { color: COMMON_GRAY, value: bar.base },
      ...(bar.surplus > 0 ? [{ color: colorOf(bar.owner), value: bar.surplus }] : []),
    ],
  }));
  const uniqueP: BarSpec[] = data.uniqueP.map((bar) => ({
    pattern: bar.chars,
    kind: "uniqueP" as const,
    segments: [{ color: FOCUS_COLOR, value: bar.count }],
  }));
  const uniqueQ: BarSpec[] = data.uniqueQ.map((bar) => ({
    pattern: bar.chars,
    kind: "uniqueQ" as const,
    segments: [{ color: PALETTE[1], value: bar.count }],
  }));
  // common bars on the left, the two unique classes center and right
  return [...common, ...uniqueP, ...uniqueQ];
}

/** Stacked bar chart of pattern frequencies (or a two-participant diff).
 *
 * Bars are rendered strictly in response order; the server owns all sorting.
 */
export class BarChartView {
  private selected = new Set<string>();

  constructor(
    private root: HTMLElement,
    private handlers: BarChartHandlers = {},
  ) {
    this.root.classList.add("bar-chart");
  }

  setSelected(patterns: string[]): void {
    this.selected = new Set(patterns);
    for (const bar of this.root.querySelectorAll<SVGGElement>("[data-pattern]")) {
      bar.classList.toggle("selected", this.selected.has(bar.dataset.pattern ?? ""));
    }
  }

  render(data: PatternsResponse | null): void {
    this.root.textContent = "";
    if (data === null) return;
    const bars = data.mode === "total" ? totalBars(data) : diffBars(data);
    if (bars.length === 0) {
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = "No patterns at the current level and parameters.";
      this.root.append(empty);
      return;
    }

    const barWidth = 22;
    const gap = 6;
    const height = 220;
    const maxValue = Math.max(
      1,
      ...bars.map((b) => b.segments.reduce((acc, s) => acc + s.value, 0)),
    );
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("width", String(bars.length * (barWidth + gap) + gap));
    svg.setAttribute("height", String(height + 18));

    bars.forEach((bar, index) => {
      const g = document.createElementNS(SVG_NS, "g");
      g.dataset.pattern = bar.pattern;
      g.dataset.kind = bar.kind;
      g.classList.add("bar");
      if (this.selected.has(bar.pattern)) g.classList.add("selected");
      const x = gap + index * (barWidth + gap);
      let y = height;
      for (const segment of bar.segments) {
        const h = (segment.value / maxValue) * height;
        y -= h;
        const rect = document.createElementNS(SVG_NS, "rect");
        rect.setAttribute("x", String(x));
        rect.setAttribute("y", y.toFixed(2));
        rect.setAttribute("width", String(barWidth));
        rect.setAttribute("height", h.toFixed(2));
        rect.setAttribute("fill", segment.color);
        g.append(rect);
      }
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(x + barWidth / 2));
      label.setAttribute("y", String(height + 13));
      label.setAttribute("text-anchor", "middle");
      label.setAttribute("font-size", "9");
      label.textContent = bar.pattern;
      g.append(label);

      g.addEventListener("click", () => this.handlers.onBarClick?.(bar.pattern));
      g.addEventListener("mouseenter", () => this.handlers.onBarHover?.(bar.pattern));
      g.addEventListener("mouseleave", () => this.handlers.onBarHover?.(null));
      svg.append(g);
    });
    this.root.append(svg);
  }

  /** Pattern ids in current DOM order (used by tests and the N-gram view). */
  renderedOrder(): string[] {
    return [...this.root.querySelectorAll<SVGGElement>("[data-pattern]")].map(
      (el) => el.dataset.pattern ?? "",
    );
  }
}
