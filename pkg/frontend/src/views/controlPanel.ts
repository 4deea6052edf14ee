import type { SessionInfo } from "../types.js";
import type { UiState } from "../state.js";

export interface ControlHandlers {
  onCreateSession?: (imageBase64: string, gazeCsv: string) => void;
  onDetect?: (z: number, g: number) => void;
  onParamsChange?: (partial: Partial<UiState>) => void;
  onUndo?: () => void;
}

function numberInput(label: string, id: string, value: number, min: number): HTMLLabelElement {
  const wrap = document.createElement("label");
  wrap.textContent = label;
  const input = document.createElement("input");
  input.type = "number";
  input.id = id;
  input.min = String(min);
  input.value = String(value);
  wrap.append(input);
  return wrap;
}

/** Dataset loading and the mining parameters (level, N, tau, mode, pair). */
export class ControlPanel {
  constructor(
    private root: HTMLElement,
    private handlers: ControlHandlers = {},
  ) {
    this.root.classList.add("control-panel");
  }

  render(session: SessionInfo | null, state: UiState): void {
    this.root.textContent = "";

    const open = document.createElement("fieldset");
    open.innerHTML = "<legend>Dataset</legend>";
    const imageFile = document.createElement("input");
    imageFile.type = "file";
    imageFile.accept = "image/png,image/jpeg";
    imageFile.id = "image-file";
    const gazeFile = document.createElement("input");
    gazeFile.type = "file";
    gazeFile.accept = ".csv,text/csv";
    gazeFile.id = "gaze-file";
    const createButton = document.createElement("button");
    createButton.id = "create-session";
    createButton.textContent = "Open dataset";
    createButton.addEventListener("click", async () => {
      const image = imageFile.files?.[0];
      const gaze = gazeFile.files?.[0];
      if (!image || !gaze) return;
      const buffer = new Uint8Array(await image.arrayBuffer());
      let binary = "";
      for (const byte of buffer) binary += String.fromCharCode(byte);
      this.handlers.onCreateSession?.(btoa(binary), await gaze.text());
    });
    open.append(imageFile, gazeFile, createButton);
    this.root.append(open);

    const detect = document.createElement("fieldset");
    detect.innerHTML = "<legend>Automatic AOIs</legend>";
    const z = numberInput("cell size z ", "detect-z", 8, 1);
    const g = numberInput("colors g ", "detect-g", 4, 2);
    const run = document.createElement("button");
    run.id = "run-detect";
    run.textContent = "Detect AOIs";
    run.disabled = session === null;
    run.addEventListener("click", () => {
      this.handlers.onDetect?.(
        Number((z.querySelector("input") as HTMLInputElement).value),
        Number((g.querySelector("input") as HTMLInputElement).value),
      );
    });
    const undoButton = document.createElement("button");
    undoButton.id = "undo-edit";
    undoButton.textContent = "Undo edit";
    undoButton.disabled = session === null;
    undoButton.addEventListener("click", () => this.handlers.onUndo?.());
    detect.append(z, g, run, undoButton);
    this.root.append(detect);

    const mining = document.createElement("fieldset");
    mining.innerHTML = "<legend>Patterns</legend>";
    const maxLevel = Math.max(session?.depth ?? 1, 1);
    const k = numberInput(`level k (1..${maxLevel}) `, "param-k", state.k ?? maxLevel, 1);
    const n = numberInput("length N ", "param-n", state.n, 1);
    const tau = numberInput("min dwell tau ", "param-tau", state.tau, 1);
    const modeWrap = document.createElement("label");
    modeWrap.textContent = "mode ";
    const mode = document.createElement("select");
    mode.id = "param-mode";
    for (const value of ["total", "diff"]) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = value === "total" ? "Total" : "Difference";
      option.selected = state.mode === value;
      mode.append(option);
    }
    modeWrap.append(mode);

    const participants = session ? Object.keys(session.participants) : [];
    const pairSelect = (id: string, current: string | null) => {
      const select = document.createElement("select");
      select.id = id;
      for (const participant of participants) {
        const option = document.createElement("option");
        option.value = participant;
        option.textContent = participant;
        option.selected = participant === current;
        select.append(option);
      }
      return select;
    };
    const p = pairSelect("param-p", state.p ?? participants[0] ?? null);
    const q = pairSelect("param-q", state.q ?? participants[1] ?? null);
    const pairWrap = document.createElement("label");
    pairWrap.textContent = "compare ";
    pairWrap.append(p, q);
    pairWrap.hidden = state.mode !== "diff";

    const apply = document.createElement("button");
    apply.id = "apply-params";
    apply.textContent = "Apply";
    apply.disabled = session === null;
    apply.addEventListener("click", () => {
      this.handlers.onParamsChange?.({
        k: Number((k.querySelector("input") as HTMLInputElement).value),
        n: Number((n.querySelector("input") as HTMLInputElement).value),
        tau: Number((tau.querySelector("input") as HTMLInputElement).value),
        mode: mode.value as "total" | "diff",
        p: p.value || null,
        q: q.value || null,
      });
    });
    mode.addEventListener("change", () => {
      pairWrap.hidden = mode.value !== "diff";
    });

    mining.append(k, n, tau, modeWrap, pairWrap, apply);
    this.root.append(mining);

    const status = document.createElement("p");
    status.className = "session-status";
    status.textContent = session
      ? `session ${session.id} rev ${session.revision}: ` +
        `${Object.keys(session.participants).length} participants, depth ${session.depth}`
      : "no session loaded";
    this.root.append(status);
  }
}
