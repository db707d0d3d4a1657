/**
 * Browser bootstrap: fetch the render model, draw the article, and wire the
 * explanation boxes.  All logic lives in the pure modules; this file only
 * touches the DOM.
 */

import { ApiClient, SystemInfo } from "./api.js";
import {
  ExplanationBoxState,
  applyError,
  applyHints,
  applyProve,
  beginRequest,
  createBox,
  setHintCount,
} from "./state.js";
import { renderArticleView, renderExplanationBox } from "./render.js";

const api = new ApiClient("");
const boxes = new Map<string, ExplanationBoxState>();
let systems: SystemInfo[] = [];
let jobId = "";

function boxFor(obligationId: string): ExplanationBoxState {
  let state = boxes.get(obligationId);
  if (!state) {
    state = createBox(obligationId);
    boxes.set(obligationId, state);
  }
  return state;
}

function drawBox(state: ExplanationBoxState): void {
  boxes.set(state.obligationId, state);
  const slot = document.querySelector(`[data-box="${state.obligationId}"]`);
  if (slot) slot.innerHTML = renderExplanationBox(state, systems);
}

async function prove(obligationId: string, system?: string): Promise<void> {
  const started = beginRequest(boxFor(obligationId));
  if (!started) return; // request already in flight
  drawBox(started);
  try {
    const response = await api.prove(jobId, obligationId, system ? { system } : {});
    drawBox(applyProve(boxFor(obligationId), response));
  } catch (err) {
    drawBox(applyError(boxFor(obligationId), String(err)));
  }
}

async function suggestHints(obligationId: string): Promise<void> {
  const started = beginRequest(boxFor(obligationId));
  if (!started) return;
  drawBox(started);
  try {
    const response = await api.hints(jobId, obligationId, boxFor(obligationId).k);
    drawBox(applyHints(boxFor(obligationId), response));
  } catch (err) {
    drawBox(applyError(boxFor(obligationId), String(err)));
  }
}

function onClick(event: Event): void {
  const target = event.target as HTMLElement;
  const action = target.dataset.action;
  const obligationId = target.dataset.obligation;
  if (!action || !obligationId) return;
  if (action === "prove") {
    void prove(obligationId);
  } else if (action === "retry") {
    const select = document.querySelector<HTMLSelectElement>(
      `select.system-choice[data-obligation="${obligationId}"]`,
    );
    void prove(obligationId, select?.value);
  } else if (action === "hints") {
    void suggestHints(obligationId);
  }
}

function onChange(event: Event): void {
  const target = event.target as HTMLInputElement;
  if (!target.classList.contains("hint-count")) return;
  const obligationId = target.dataset.obligation;
  if (!obligationId) return;
  const updated = setHintCount(boxFor(obligationId), Number(target.value));
  boxes.set(obligationId, updated);
  void suggestHints(obligationId); // k change refetches
}

async function start(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  const params = new URLSearchParams(window.location.search);
  jobId = params.get("job") ?? "";
  if (!jobId) {
    root.innerHTML = "<p>missing ?job=&lt;id&gt; parameter</p>";
    return;
  }
  try {
    const [model, knownSystems] = await Promise.all([
      api.getRender(jobId),
      api.systems(),
    ]);
    systems = knownSystems;
    root.innerHTML = renderArticleView(model);
  } catch (err) {
    root.innerHTML =
      `<p class="error">cannot load article: ${String(err)} ` +
      `<button id="reload">retry</button></p>`;
    document.getElementById("reload")?.addEventListener("click", () => void start());
    return;
  }
  root.addEventListener("click", onClick);
  root.addEventListener("change", onChange);
}

void start();
