import { ApiClient } from "../src/api.js";
import { App, type Panes } from "../src/app.js";
import { MockService } from "./mockService.js";

export function makePanes(): Panes {
  const make = () => document.createElement("div");
  const panes: Panes = {
    control: make(),
    tree: make(),
    aoi: make(),
    barChart: make(),
    ngram: make(),
    matrix: make(),
    toast: make(),
  };
  for (const el of Object.values(panes)) document.body.append(el as HTMLElement);
  return panes;
}

/** App wired to the mocked service with a loaded session. */
export async function bootApp(service: MockService): Promise<{ app: App; panes: Panes }> {
  service.install();
  const panes = makePanes();
  const app = new App(new ApiClient(""), panes);
  app.store.set({ sessionId: "s1" });
  await app.syncRevision(0);
  return { app, panes };
}
