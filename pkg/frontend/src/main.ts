// Browser entry point: wires the controller to the DOM and a 1s poll.

import { createClient } from "./api.js";
import { Controller } from "./controller.js";
import { renderApp } from "./render.js";
import type { SortKey } from "./state.js";

const POLL_MS = 1000;

function sessionIdFromHash(): string | null {
  const m = /^#session=([0-9a-f]+)$/.exec(location.hash);
  return m === null ? null : m[1];
}

export function boot(root: HTMLElement): void {
  const client = createClient("");
  const controller = new Controller(client, (state) => {
    root.innerHTML = renderApp(state);
    if (state.session !== null) {
      location.hash = `session=${state.session.session_id}`;
    }
  });

  root.addEventListener("click", (ev) => {
    const el = ev.target as HTMLElement;
    const step = el.getAttribute("data-step");
    if (step !== null) {
      void controller.chooseStep(Number(step));
      return;
    }
    const sort = el.getAttribute("data-sort");
    if (sort !== null) {
      controller.setSort(sort as SortKey);
      return;
    }
    if (el.getAttribute("data-action") === "retry") {
      void controller.retry();
    }
  });

  root.addEventListener("submit", (ev) => {
    const form = ev.target as HTMLFormElement;
    ev.preventDefault();
    if (form.getAttribute("data-form") === "open") {
      const data = new FormData(form);
      void controller.open(String(data.get("graph")), Number(data.get("factual")));
    } else if (form.getAttribute("data-form") === "upload") {
      const input = form.querySelector<HTMLInputElement>("input[type=file]");
      const file = input?.files?.[0];
      if (!file) return;
      void file.text().then(async (text) => {
        const up = await client.uploadGraph(JSON.parse(text));
        root.querySelector<HTMLInputElement>("input[name=graph]")!.value = up.graph_id;
      });
    }
  });

  setInterval(() => void controller.pollTick(), POLL_MS);

  const sid = sessionIdFromHash();
  if (sid !== null) {
    void controller.resume(sid);
  } else {
    controller.state = { ...controller.state };
    root.innerHTML = renderApp(controller.state);
  }
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root !== null) boot(root);
}
