import type { TreeNode } from "../types.js";

/** Hierarchy overview pane: nested list mirroring the AOI tree. */
export class TreeView {
  constructor(
    private root: HTMLElement,
    private onNodeClick?: (id: number) => void,
  ) {
    this.root.classList.add("tree-view");
  }

  render(tree: TreeNode | null, selected: number[]): void {
    this.root.textContent = "";
    if (tree === null) return;
    const selectedSet = new Set(selected);

    const build = (node: TreeNode): HTMLLIElement => {
      const li = document.createElement("li");
      li.dataset.nodeId = String(node.id);
      const label = document.createElement("span");
      label.className = node.rect ? "leaf" : "group";
      label.textContent = node.rect
        ? `${node.label} [${node.char}]`
        : `${node.label} (${node.char})`;
      if (selectedSet.has(node.id)) label.classList.add("selected");
      label.addEventListener("click", (e) => {
        e.stopPropagation();
        this.onNodeClick?.(node.id);
      });
      li.append(label);
      if (node.children.length > 0) {
        const ul = document.createElement("ul");
        for (const child of node.children) ul.append(build(child));
        li.append(ul);
      }
      return li;
    };

    const top = document.createElement("ul");
    top.append(build(tree));
    this.root.append(top);
  }
}
