import { describe, expect, it } from "vitest";

import type {
  HintsResponse,
  ProveResponse,
  RenderModel,
  SystemInfo,
} from "../src/api.js";
import {
  applyHints,
  applyProve,
  beginRequest,
  createBox,
} from "../src/state.js";
import { renderArticleView, renderExplanationBox } from "../src/render.js";

import renderModel from "./fixtures/render_model.json";
import proveTheorem from "./fixtures/prove_theorem.json";
import proveCountersat from "./fixtures/prove_countersat.json";
import hintsCountersat from "./fixtures/hints_countersat.json";
import systemsFixture from "./fixtures/systems.json";

const model = renderModel as unknown as RenderModel;
const systems = systemsFixture as SystemInfo[];

function countOccurrences(haystack: string, needle: string): number {
  return haystack.split(needle).length - 1;
}

describe("article view", () => {
  const html = renderArticleView(model);

  it("renders the golden article with exactly one actionable by", () => {
    expect(countOccurrences(html, 'data-action="prove"')).toBe(1);
    expect(html).toContain('data-obligation="e2_2__mtest1"');
  });

  it("marks proofs collapsible and expanded by default", () => {
    expect(html).toContain('<details class="proof" open>');
  });

  it("anchors the functor declaration and statuses", () => {
    expect(html).toContain('id="func-relincl"');
    expect(html).toContain("dt_k1_mtest1");
    expect(html).toContain("status-verified");
  });

  it("shows each step's thesis on demand", () => {
    expect(html).toContain('<details class="thesis">');
    expect(html).toContain("wellorder(relincl(c1))");
  });

  it("references link to their declaration sites", () => {
    expect(html).toContain('href="#label-d1"');
  });

  it("symbol occurrences in formulas link to their declarations", () => {
    expect(html).toContain('<a class="symbol" href="#func-relincl">relincl</a>');
  });

  it("escapes text around linkified symbols", () => {
    const hostile = {
      ...model,
      items: [{ ...model.items[0], formula: "p & <i>q</i>", steps: [] }],
    } as typeof model;
    const out = renderArticleView(hostile);
    expect(out).toContain("p &amp; &lt;i&gt;q&lt;/i&gt;");
  });

  it("escapes article text", () => {
    const hostile: RenderModel = {
      ...model,
      items: [
        {
          ...model.items[0],
          formula: "p <b>bold</b>",
          steps: [],
        },
      ],
    };
    const out = renderArticleView(hostile);
    expect(out).toContain("p &lt;b&gt;bold&lt;/b&gt;");
  });
});

describe("explanation box", () => {
  it("lists used references as links after a Theorem", () => {
    let box = beginRequest(createBox("e2_2__mtest1"))!;
    box = applyProve(box, proveTheorem as ProveResponse);
    const html = renderExplanationBox(box, systems);
    expect(html).toContain("Proof found");
    expect(html).toContain(">d1_mtest1</a>");
    expect(html).toContain('href="#label-d1"');
    // the constant-type axiom has no declaration site: titled span, no link
    expect(html).toContain(">dt_c1_2__mtest1</span>");
    expect(html).toContain('title="type of local constant c1"');
    expect(html).not.toContain("Suggest hints");
  });

  it("offers retry and hints when the proof is not found", () => {
    let box = beginRequest(createBox("e1_1__weak1"))!;
    box = applyProve(box, proveCountersat as ProveResponse);
    const html = renderExplanationBox(box, systems);
    expect(html).toContain("Proof not found");
    expect(html).toContain("status-CounterSatisfiable");
    expect(html).toContain('data-action="retry"');
    expect(html).toContain('data-action="hints"');
    expect(html).toContain('<select class="system-choice"');
    for (const system of systems) {
      expect(html).toContain(`<option value="${system.name}">`);
    }
  });

  it("inserts fetched hints into the same box", () => {
    let box = beginRequest(createBox("e1_1__weak1"))!;
    box = applyProve(box, proveCountersat as ProveResponse);
    box = beginRequest(box)!;
    box = applyHints(box, hintsCountersat as HintsResponse);
    const html = renderExplanationBox(box, systems);
    expect(html).toContain('<ol class="hints">');
    expect(html).toContain(">d1_mtest1</a>");
    expect(html).toContain('href="/library/d1_mtest1"');
    // the non-theorem verdict and controls are still on screen
    expect(html).toContain("Proof not found");
  });

  it("shows an empty-model message instead of an empty list", () => {
    let box = beginRequest(createBox("e1_1__weak1"))!;
    box = applyProve(box, proveCountersat as ProveResponse);
    box = applyHints(box, {
      obligation_id: "e1_1__weak1",
      k: 5,
      goal_symbols: ["p"],
      hints: [],
      millis: 0,
    });
    expect(renderExplanationBox(box, systems)).toContain("no hints");
  });

  it("renders the busy marker while a request is in flight", () => {
    const box = beginRequest(createBox("e2_2__mtest1"))!;
    expect(renderExplanationBox(box, systems)).toContain("running");
  });
});
