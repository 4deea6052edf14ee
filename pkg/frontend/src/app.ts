import { ApiClient, ApiError } from "./api.js";
import { Store } from "./state.js";
import { nodeDepths, selectionUnit, areSiblings } from "./tree.js";
import type {
  AoiPatternMode,
  EditOp,
  LayoutResponse,
  PatternsResponse,
  SessionInfo,
  Similarity,
  TreeNode,
} from "./types.js";
import { AoiView } from "./views/aoiView.js";
import { BarChartView } from "./views/barChart.js";
import { ControlPanel } from "./views/controlPanel.js";
import { MatrixView } from "./views/matrixView.js";
import { NgramView } from "./views/ngramView.js";
import { TreeView } from "./views/treeView.js";

export interface Panes {
  control: HTMLElement;   // (A)
  tree: HTMLElement;      // (B)
  aoi: HTMLElement;       // (C)
  barChart: HTMLElement;  // (D)
  ngram: HTMLElement;     // (E)
  matrix: HTMLElement;    // (F)
  toast?: HTMLElement;
}

/** Wires the six panes to the service; the server owns all computation and
 * ordering, the controller only translates gestures and re-renders. */
export class App {
  readonly store = new Store();
  session: SessionInfo | null = null;
  patterns: PatternsResponse | null = null;
  similarity: Similarity | null = null;
  layout: LayoutResponse | null = null;
  private undoStack: EditOp[] = []; // inverse ops of past add-rect/group edits

  readonly controlPanel: ControlPanel;
  readonly treeView: TreeView;
  readonly aoiView: AoiView;
  readonly barChart: BarChartView;
  readonly ngramView: NgramView;
  readonly matrixView: MatrixView;

  private fetchedRevision = -2; // derived views refetch exactly once per revision

  constructor(
    readonly api: ApiClient,
    private panes: Panes,
  ) {
    this.controlPanel = new ControlPanel(panes.control, {
      onCreateSession: (image, gaze) => void this.createSession(image, gaze),
      onDetect: (z, g) => void this.detect(z, g),
      onParamsChange: (partial) => void this.changeParams(partial),
      onUndo: () => void this.undo(),
    });
    this.treeView = new TreeView(panes.tree, (id) => this.toggleAoiSelection(id));
    this.aoiView = new AoiView(panes.aoi, {
      onAoiClick: (id) => this.toggleAoiSelection(id),
      onAoiPatterns: (char, mode) => void this.selectAoiPatterns(char, mode),
      onDrawRect: (rect) => void this.drawAoi(rect),
    });
    this.barChart = new BarChartView(panes.barChart, {
      onBarClick: (pattern) => void this.selectPattern(pattern),
      onBarHover: (pattern) => this.hoverPattern(pattern),
    });
    this.ngramView = new NgramView(panes.ngram, (pattern) => this.hoverPattern(pattern));
    this.matrixView = new MatrixView(panes.matrix, (p, q) => void this.pairToDiff(p, q));

    this.keyHandler = (e: KeyboardEvent) => {
      if (e.key === "g" && !(e.target instanceof HTMLInputElement)) {
        void this.groupSelection();
      }
    };
    document.addEventListener("keydown", this.keyHandler);
  }

  private keyHandler: (e: KeyboardEvent) => void;

  destroy(): void {
    document.removeEventListener("keydown", this.keyHandler);
  }

  toast(message: string): void {
    if (!this.panes.toast) return;
    this.panes.toast.textContent = message;
    this.panes.toast.classList.add("visible");
    setTimeout(() => this.panes.toast?.classList.remove("visible"), 4000);
  }

  private miningParams() {
    const { k, n, tau } = this.store.state;
    return { k: k ?? undefined, n, tau };
  }

  async createSession(imageBase64: string, gazeCsv: string): Promise<void> {
    try {
      const created = await this.api.createSession(imageBase64, gazeCsv);
      this.store.set({ sessionId: created.id });
      await this.syncRevision(created.revision);
    } catch (error) {
      this.reportError(error);
    }
  }

  async detect(z: number, g: number): Promise<void> {
    const id = this.store.state.sessionId;
    if (!id) return;
    try {
      const result = await this.api.detect(id, z, g);
      await this.syncRevision(result.revision);
    } catch (error) {
      this.reportError(error);
    }
  }

  async changeParams(partial: Partial<import("./state.js").UiState>): Promise<void> {
    this.store.set({ ...partial, selectedPatterns: [], hoverPattern: null });
    this.layout = null;
    await this.refetchDerived();
    await this.renderAll();
  }

  /** Pull session + derived data; refetches at most once per revision. */
  async syncRevision(revision: number): Promise<void> {
    const id = this.store.state.sessionId;
    if (!id) return;
    this.store.applyRevision(revision);
    if (revision === this.fetchedRevision) return;
    this.fetchedRevision = revision;
    this.session = await this.api.getSession(id);
    this.layout = null;
    await this.refetchDerived();
    await this.renderAll();
  }

  private async refetchDerived(): Promise<void> {
    const id = this.store.state.sessionId;
    if (!id || !this.session) return;
    const state = this.store.state;
    const params = this.miningParams();
    try {
      if (state.mode === "diff" && state.p && state.q) {
        this.patterns = await this.api.getPatterns(id, {
          ...params,
          mode: "diff",
          p: state.p,
          q: state.q,
        });
      } else {
        this.patterns = await this.api.getPatterns(id, {
          ...params,
          sort: state.sortParticipant ?? undefined,
        });
      }
    } catch (error) {
      this.patterns = null;
      this.reportError(error);
    }
    try {
      this.similarity =
        Object.keys(this.session.participants).length >= 2
          ? await this.api.getSimilarity(id, params)
          : null;
    } catch {
      this.similarity = null; // fewer than two participants
    }
  }

  async renderAll(): Promise<void> {
    const state = this.store.state;
    this.controlPanel.render(this.session, state);
    this.treeView.render(this.session?.tree ?? null, state.selectedAois);
    this.barChart.render(this.patterns);
    this.barChart.setSelected(state.selectedPatterns);
    this.ngramView.render(state.selectedPatterns, state.hoverPattern);
    this.matrixView.render(this.similarity);
    if (this.session) {
      this.aoiView.setStimulus(this.session.width, this.session.height, null);
      await this.renderAoiPane();
    }
  }

  private async renderAoiPane(): Promise<void> {
    const id = this.store.state.sessionId;
    if (!id || !this.session) return;
    try {
      const cut = await this.api.getAois(id, this.store.state.k ?? undefined);
      const depths = nodeDepths(this.session.tree);
      this.aoiView.render(cut.aois, depths, this.store.state.selectedAois);
      this.aoiView.renderOverlay(this.layout, this.store.state.hoverPattern);
    } catch (error) {
      this.reportError(error);
    }
  }

  // -- gestures ---------------------------------------------------------------

  toggleAoiSelection(nodeId: number): void {
    if (!this.session) return;
    const unit = selectionUnit(this.session.tree, nodeId);
    if (unit === null) return;
    const current = this.store.state.selectedAois;
    const next = current.includes(unit)
      ? current.filter((x) => x !== unit)
      : [...current, unit];
    this.store.set({ selectedAois: next });
    this.treeView.render(this.session.tree, next);
    void this.renderAoiPane();
  }

  /** Pink selection + shortcut = one group edit; nothing happens otherwise. */
  async groupSelection(): Promise<void> {
    const id = this.store.state.sessionId;
    const members = this.store.state.selectedAois;
    if (!id || !this.session || members.length === 0) return;
    if (!areSiblings(this.session.tree, members)) {
      this.toast("selection is not a sibling set");
      return;
    }
    try {
      const before = this.session.tree;
      const result = await this.api.editAois(id, [{ op: "group", members }]);
      this.rememberInverse(before, result.tree);
      await this.syncRevision(result.revision);
    } catch (error) {
      this.reportError(error);
    }
  }

  async drawAoi(rect: [number, number, number, number]): Promise<void> {
    const id = this.store.state.sessionId;
    if (!id) return;
    try {
      const before = this.session?.tree ?? null;
      const result = await this.api.editAois(id, [{ op: "add-rect", rect }]);
      if (before) this.rememberInverse(before, result.tree);
      await this.syncRevision(result.revision);
    } catch (error) {
      this.reportError(error);
    }
  }

  /** Record the op that takes the new tree back to the previous revision's:
   * an added leaf is deleted again, a created group is ungrouped. */
  private rememberInverse(before: TreeNode, after: TreeNode): void {
    const beforeIds = new Set(before.children.map((c) => c.id));
    const added = after.children.filter((c) => !beforeIds.has(c.id));
    if (added.length !== 1) return;
    const node = added[0];
    this.undoStack.push(
      node.rect !== null ? { op: "delete", id: node.id } : { op: "ungroup", id: node.id },
    );
  }

  /** Revert the most recent add/group edit; restores that revision's tree. */
  async undo(): Promise<void> {
    const id = this.store.state.sessionId;
    const inverse = this.undoStack.pop();
    if (!id || !inverse) return;
    try {
      const result = await this.api.editAois(id, [inverse]);
      await this.syncRevision(result.revision);
    } catch (error) {
      this.reportError(error);
    }
  }

  /** Bar click: exactly one layout request for the clicked pattern.
   * Clicking the selected bar again clears the selection and the overlay. */
  async selectPattern(pattern: string): Promise<void> {
    const id = this.store.state.sessionId;
    if (!id) return;
    if (this.store.state.selectedPatterns.length === 1
        && this.store.state.selectedPatterns[0] === pattern) {
      this.clearSelection();
      return;
    }
    this.store.set({ selectedPatterns: [pattern] });
    try {
      this.layout = await this.api.postLayout(id, {
        ...this.miningParams(),
        patterns: [pattern],
        seed: this.store.state.seed,
      });
      this.barChart.setSelected([pattern]);
      this.ngramView.render([pattern], null);
      this.aoiView.renderOverlay(this.layout);
    } catch (error) {
      this.reportError(error);
    }
  }

  clearSelection(): void {
    this.store.set({ selectedPatterns: [], hoverPattern: null });
    this.layout = null;
    this.barChart.setSelected([]);
    this.ngramView.render([], null);
    this.aoiView.clearOverlay();
  }

  async selectAoiPatterns(char: string, mode: AoiPatternMode): Promise<void> {
    const id = this.store.state.sessionId;
    if (!id) return;
    try {
      this.layout = await this.api.postLayout(id, {
        ...this.miningParams(),
        aoi: char,
        mode,
        seed: this.store.state.seed,
      });
      const chains = [...new Set(this.layout.nodes.length ? this.selectedChainsFromLayout() : [])];
      this.store.set({ selectedPatterns: chains });
      this.barChart.setSelected(chains);
      this.ngramView.render(chains, null);
      this.aoiView.renderOverlay(this.layout);
    } catch (error) {
      this.reportError(error);
    }
  }

  /** Rebuild the selected pattern strings from the layout's node chains;
   * chains terminate at "end" nodes (single-node chains stay "start"). */
  private selectedChainsFromLayout(): string[] {
    if (!this.layout) return [];
    const byAoi = new Map(this.layout.aois.map((a) => [a.id, a.char]));
    const chains: string[] = [];
    let current = "";
    for (const node of this.layout.nodes) {
      current += byAoi.get(node.aoi) ?? "?";
      if (node.role === "end") {
        chains.push(current);
        current = "";
      }
    }
    if (current) chains.push(current);
    return chains;
  }

  async pairToDiff(p: string, q: string): Promise<void> {
    this.store.set({ mode: "diff", p, q, selectedPatterns: [], hoverPattern: null });
    this.layout = null;
    await this.refetchDerived();
    await this.renderAll();
  }

  hoverPattern(pattern: string | null): void {
    this.store.set({ hoverPattern: pattern });
    // thicken the corresponding edges without a server round-trip
    this.aoiView.renderOverlay(this.layout, pattern);
    this.ngramView.render(this.store.state.selectedPatterns, pattern);
  }

  private reportError(error: unknown): void {
    if (error instanceof ApiError) {
      const extra = error.violations.length ? ` (${error.violations.join(", ")})` : "";
      this.toast(`${error.status}: ${error.detail}${extra}`);
    } else {
      this.toast(String(error));
    }
  }
}
