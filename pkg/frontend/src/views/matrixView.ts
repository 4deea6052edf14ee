import type { Similarity } from "../types.js";

/** Cosine-similarity heatmap; dissimilar pairs shade toward red. */
export class MatrixView {
  constructor(
    private root: HTMLElement,
    private onPairClick?: (p: string, q: string) => void,
  ) {
    this.root.classList.add("matrix-view");
  }

  static cellColor(value: number): string {
    // value 1 -> white, value 0 -> saturated red
    const v = Math.max(0, Math.min(1, value));
    const other = Math.round(255 * v);
    return `rgb(255, ${other}, ${other})`;
  }

  render(data: Similarity | null): void {
    this.root.textContent = "";
    if (data === null) return;
    const table = document.createElement("table");
    const header = document.createElement("tr");
    header.append(document.createElement("th"));
    for (const participant of data.participants) {
      const th = document.createElement("th");
      th.textContent = participant;
      header.append(th);
    }
    table.append(header);

    data.participants.forEach((p, i) => {
      const row = document.createElement("tr");
      const th = document.createElement("th");
      th.textContent = p;
      row.append(th);
      data.participants.forEach((q, j) => {
        const cell = document.createElement("td");
        const value = data.values[i][j];
        cell.dataset.p = p;
        cell.dataset.q = q;
        cell.dataset.value = value.toFixed(6);
        cell.style.backgroundColor = MatrixView.cellColor(value);
        cell.textContent = value.toFixed(2);
        if (p === data.argmin[0] && q === data.argmin[1]) cell.classList.add("argmin");
        if (p === data.argmax[0] && q === data.argmax[1]) cell.classList.add("argmax");
        if (p !== q) {
          cell.classList.add("clickable");
          cell.addEventListener("click", () => this.onPairClick?.(p, q));
        }
        row.append(cell);
      });
      table.append(row);
    });
    this.root.append(table);
  }
}
