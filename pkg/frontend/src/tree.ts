import type { TreeNode } from "./types.js";

/** Depth of every node (root = 0). */
export function nodeDepths(tree: TreeNode): Map<number, number> {
  const depths = new Map<number, number>();
  const walk = (node: TreeNode, depth: number) => {
    depths.set(node.id, depth);
    for (const child of node.children) walk(child, depth + 1);
  };
  walk(tree, 0);
  return depths;
}

export function findNode(tree: TreeNode, id: number): TreeNode | null {
  if (tree.id === id) return tree;
  for (const child of tree.children) {
    const hit = findNode(child, id);
    if (hit) return hit;
  }
  return null;
}

/** The root child that contains the node: clicking an AOI inside a group
 * selects the whole group, so this is the unit the pink selection works on. */
export function selectionUnit(tree: TreeNode, id: number): number | null {
  for (const child of tree.children) {
    if (child.id === id || findNode(child, id) !== null) return child.id;
  }
  return null;
}

/** Ids of the sibling set the selection units belong to (all root children). */
export function areSiblings(tree: TreeNode, ids: number[]): boolean {
  const rootChildren = new Set(tree.children.map((c) => c.id));
  return ids.length > 0 && ids.every((id) => rootChildren.has(id));
}
