import { ApiClient } from "./api.js";
import { App } from "./app.js";

function pane(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing pane #${id}`);
  return el;
}

const app = new App(new ApiClient(""), {
  control: pane("control-panel"),
  tree: pane("tree-view"),
  aoi: pane("aoi-view"),
  barChart: pane("bar-chart-view"),
  ngram: pane("ngram-view"),
  matrix: pane("matrix-view"),
  toast: pane("toast"),
});

void app.renderAll();

declare global {
  interface Window {
    gazemine: App;
  }
}
window.gazemine = app; // console access for debugging
