/**
 * Pure HTML renderers for the article view and the explanation box.
 *
 * Rendering returns strings so it stays testable without a DOM; the
 * bootstrap module wires the strings into the page and delegates events.
 */

import type { RenderItem, RenderModel, RenderStep, SystemInfo } from "./api.js";
import type { ExplanationBoxState } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Anchor per symbol name, from the model's declarations. */
export function symbolAnchors(model: RenderModel): Map<string, string> {
  const anchors = new Map<string, string>();
  for (const decl of model.functors) anchors.set(decl.name, decl.anchor);
  for (const r of model.reservations) anchors.set(r.variable, r.anchor);
  for (const item of model.items) anchors.set(item.label, item.anchor);
  return anchors;
}

/** Escape text and wrap declared symbols in links to their declarations. */
export function linkifySymbols(text: string, anchors: Map<string, string>): string {
  const out: string[] = [];
  let last = 0;
  for (const match of text.matchAll(/[A-Za-z][A-Za-z0-9_]*/g)) {
    out.push(escapeHtml(text.slice(last, match.index)));
    const word = match[0];
    const anchor = anchors.get(word);
    out.push(
      anchor
        ? `<a class="symbol" href="${escapeHtml(anchor)}">${escapeHtml(word)}</a>`
        : escapeHtml(word),
    );
    last = match.index + word.length;
  }
  out.push(escapeHtml(text.slice(last)));
  return out.join("");
}

function anchorHref(anchor: string | null): string | null {
  if (!anchor) return null;
  return anchor; // local "#..." anchors and "/library/..." URIs both work as href
}

function refLink(ref: { name: string; anchor: string | null; title?: string | null }): string {
  const name = escapeHtml(ref.name);
  const href = anchorHref(ref.anchor ?? null);
  const title = ref.title ? ` title="${escapeHtml(ref.title)}"` : "";
  if (!href) return `<span class="ref"${title}>${name}</span>`;
  return `<a class="ref" href="${escapeHtml(href)}"${title}>${name}</a>`;
}

function statusBadge(status: string | null): string {
  if (!status) return "";
  return `<span class="status status-${escapeHtml(status)}">${escapeHtml(status)}</span>`;
}

function renderStep(step: RenderStep, anchors: Map<string, string>): string {
  const parts: string[] = [];
  const label = step.anchor ? ` id="${escapeHtml(step.anchor.slice(1))}"` : "";
  parts.push(`<li class="step step-${escapeHtml(step.kind)}"${label}>`);
  parts.push(`<span class="step-text">${linkifySymbols(step.text, anchors)}</span>`);
  if (step.obligation_id) {
    parts.push(
      `<button class="by" data-action="prove" ` +
        `data-obligation="${escapeHtml(step.obligation_id)}">by</button>`,
    );
    parts.push(
      step.refs.map((r) => refLink(r)).join(", "),
    );
    parts.push(statusBadge(step.status));
  }
  if (step.thesis_after !== null) {
    parts.push(
      `<details class="thesis"><summary>thesis</summary>` +
        `<code>${escapeHtml(step.thesis_after)}</code></details>`,
    );
  }
  if (step.skeleton_error) {
    parts.push(`<span class="error">${escapeHtml(step.skeleton_error)}</span>`);
  }
  if (step.steps.length > 0) {
    parts.push(renderProof(step.steps, anchors));
  }
  if (step.obligation_id) {
    parts.push(
      `<div class="box-slot" data-box="${escapeHtml(step.obligation_id)}"></div>`,
    );
  }
  parts.push("</li>");
  return parts.join("");
}

function renderProof(steps: RenderStep[], anchors: Map<string, string>): string {
  const body = steps.map((s) => renderStep(s, anchors)).join("");
  return (
    `<details class="proof" open><summary>proof</summary>` +
    `<ol class="steps">${body}</ol></details>`
  );
}

function renderItem(item: RenderItem, anchors: Map<string, string>): string {
  const parts: string[] = [];
  parts.push(
    `<section class="item item-${escapeHtml(item.kind)}" ` +
      `id="${escapeHtml(item.anchor.slice(1))}">`,
  );
  parts.push(
    `<h3>${escapeHtml(item.kind)} <span class="label">${escapeHtml(item.label)}</span>` +
      ` ${statusBadge(item.status)}</h3>`,
  );
  parts.push(`<code class="formula">${linkifySymbols(item.formula, anchors)}</code>`);
  if (item.error) {
    parts.push(`<p class="error">${escapeHtml(item.error)}</p>`);
  }
  if (item.steps.length > 0) {
    parts.push(renderProof(item.steps, anchors));
  }
  parts.push("</section>");
  return parts.join("");
}

export function renderArticleView(model: RenderModel): string {
  const anchors = symbolAnchors(model);
  const parts: string[] = [];
  parts.push(`<article class="mfl" data-article="${escapeHtml(model.article)}">`);
  parts.push(`<h2>article ${escapeHtml(model.article)}</h2>`);
  if (model.reservations.length > 0) {
    const entries = model.reservations
      .map(
        (r) =>
          `<span id="${escapeHtml(r.anchor.slice(1))}">${escapeHtml(r.variable)}` +
          `: ${escapeHtml(r.type)}</span>`,
      )
      .join(", ");
    parts.push(`<p class="reservations">reserve ${entries}</p>`);
  }
  for (const decl of model.functors) {
    parts.push(
      `<p class="functor" id="${escapeHtml(decl.anchor.slice(1))}">` +
        `func ${escapeHtml(decl.name)}(${decl.params.map(escapeHtml).join(", ")})` +
        ` -&gt; ${escapeHtml(decl.result_type)}` +
        ` <span class="type-axiom">${escapeHtml(decl.type_axiom)}</span></p>`,
    );
  }
  for (const item of model.items) {
    parts.push(renderItem(item, anchors));
  }
  parts.push("</article>");
  return parts.join("");
}

function renderHintList(state: ExplanationBoxState): string {
  if (state.hints === null) return "";
  if (state.hints.length === 0) {
    return `<p class="no-hints">no hints (the advisor has no training data)</p>`;
  }
  const rows = state.hints
    .map(
      (h) =>
        `<li>${refLink(h)} <span class="score">${h.score.toFixed(3)}</span></li>`,
    )
    .join("");
  return `<ol class="hints">${rows}</ol>`;
}

export function renderExplanationBox(
  state: ExplanationBoxState,
  systems: SystemInfo[],
): string {
  const oid = escapeHtml(state.obligationId);
  const parts: string[] = [];
  parts.push(`<div class="explanation-box" data-obligation="${oid}">`);
  if (state.busy) {
    parts.push(`<p class="busy">running&hellip;</p>`);
  }
  if (state.error) {
    parts.push(
      `<p class="error">${escapeHtml(state.error)} ` +
        `<button data-action="prove" data-obligation="${oid}">retry</button></p>`,
    );
  }
  if (state.status === "Theorem") {
    parts.push(`<p class="verdict">Proof found ${statusBadge(state.status)}</p>`);
    parts.push(
      `<ul class="used-references">` +
        state.usedReferences.map((r) => `<li>${refLink(r)}</li>`).join("") +
        `</ul>`,
    );
  } else if (state.status !== null) {
    parts.push(`<p class="verdict">Proof not found ${statusBadge(state.status)}</p>`);
    const options = systems
      .map((s) => `<option value="${escapeHtml(s.name)}">${escapeHtml(s.name)}</option>`)
      .join("");
    parts.push(
      `<p class="retry">` +
        `<select class="system-choice" data-obligation="${oid}">${options}</select> ` +
        `<button data-action="retry" data-obligation="${oid}">try another prover</button>` +
        `</p>`,
    );
    parts.push(
      `<p class="suggest">` +
        `<button data-action="hints" data-obligation="${oid}">Suggest hints</button> ` +
        `<input class="hint-count" type="number" min="1" value="${state.k}" ` +
        `data-obligation="${oid}"/></p>`,
    );
  }
  if (state.runs.length > 1) {
    parts.push(
      `<ul class="runs">` +
        state.runs
          .map(
            (r) =>
              `<li>${escapeHtml(r.system)}: ${escapeHtml(r.status)} ` +
              `(${r.wall_millis} ms)</li>`,
          )
          .join("") +
        `</ul>`,
    );
  }
  parts.push(renderHintList(state));
  parts.push("</div>");
  return parts.join("");
}
