/** Wire types of the analysis service JSON API. */

export interface TreeNode {
  id: number;
  label: string;
  char: string;
  rect: [number, number, number, number] | null;
  children: TreeNode[];
}

export interface SessionInfo {
  id: string;
  width: number;
  height: number;
  participants: Record<string, number>;
  tree: TreeNode;
  depth: number;
  mining: { k: number | null; n: number; tau: number };
  revision: number;
}

export interface AoiEntry {
  id: number;
  char: string;
  label: string;
  rect: [number, number, number, number];
  hue: number;
  group: boolean;
}

export interface AoiCut {
  level: number;
  aois: AoiEntry[];
}

export interface PatternRow {
  chars: string;
  total: number;
  support: number;
  perParticipant: Record<string, number>;
}

export interface PatternsTotal {
  mode: "total";
  level: number;
  n: number;
  tau: number;
  participants: string[];
  patterns: PatternRow[];
  sortParticipant?: string;
  stackOrder?: string[];
}

export interface CommonBar {
  chars: string;
  base: number;
  surplus: number;
  owner: string | null;
}

export interface UniqueBar {
  chars: string;
  count: number;
}

export interface PatternsDiff {
  mode: "diff";
  level: number;
  n: number;
  tau: number;
  pair: [string, string];
  common: CommonBar[];
  uniqueP: UniqueBar[];
  uniqueQ: UniqueBar[];
}

export type PatternsResponse = PatternsTotal | PatternsDiff;

export interface Similarity {
  level: number;
  n: number;
  tau: number;
  participants: string[];
  values: number[][];
  argmin: [string, string];
  argmax: [string, string];
}

export interface LayoutNode {
  id: number;
  aoi: number;
  role: "start" | "intermediate" | "end";
  x: number;
  y: number;
}

export interface LayoutEdge {
  from: number;
  to: number;
  weight: number;
  crossGroup: boolean;
  pattern: string;
}

export interface LayoutAoi {
  id: number;
  char: string;
  rect: [number, number, number, number];
  hue: number;
}

export interface LayoutResponse {
  nodes: LayoutNode[];
  edges: LayoutEdge[];
  aois: LayoutAoi[];
  level: number;
  n: number;
  tau: number;
  seed: number;
}

export type EditOp =
  | { op: "add-rect"; rect: [number, number, number, number]; label?: string }
  | { op: "delete"; id: number }
  | { op: "group"; members: number[]; label?: string }
  | { op: "ungroup"; id: number };

export interface MiningParams {
  k?: number;
  n?: number;
  tau?: number;
}

export type AoiPatternMode = "starts" | "passes" | "arrives";
