/** Selected-pattern pane: lists the chains drawn in the AOI view. */
export class NgramView {
  constructor(
    private root: HTMLElement,
    private onHover?: (pattern: string | null) => void,
  ) {
    this.root.classList.add("ngram-view");
  }

  render(patterns: string[], hovered: string | null = null): void {
    this.root.textContent = "";
    if (patterns.length === 0) {
      const hint = document.createElement("p");
      hint.className = "empty-state";
      hint.textContent = "Click bars or an AOI to select patterns.";
      this.root.append(hint);
      return;
    }
    const list = document.createElement("ol");
    for (const pattern of patterns) {
      const item = document.createElement("li");
      item.dataset.pattern = pattern;
      item.textContent = pattern.split("").join(" → ");
      if (pattern === hovered) item.classList.add("hovered");
      item.addEventListener("mouseenter", () => this.onHover?.(pattern));
      item.addEventListener("mouseleave", () => this.onHover?.(null));
      list.append(item);
    }
    this.root.append(list);
  }
}
