import { describe, expect, it } from "vitest";

import type { HintsResponse, ProveResponse } from "../src/api.js";
import {
  applyError,
  applyHints,
  applyProve,
  beginRequest,
  createBox,
  setHintCount,
} from "../src/state.js";

import proveTheorem from "./fixtures/prove_theorem.json";
import proveCountersat from "./fixtures/prove_countersat.json";
import hintsCountersat from "./fixtures/hints_countersat.json";

const theorem = proveTheorem as ProveResponse;
const countersat = proveCountersat as ProveResponse;
const hints = hintsCountersat as HintsResponse;

describe("explanation box state", () => {
  it("opens and marks busy on first request", () => {
    const box = createBox("e2_2__mtest1");
    const started = beginRequest(box);
    expect(started).not.toBeNull();
    expect(started!.busy).toBe(true);
    expect(started!.open).toBe(true);
  });

  it("suppresses a second request while busy", () => {
    const busy = beginRequest(createBox("e2_2__mtest1"))!;
    expect(beginRequest(busy)).toBeNull();
  });

  it("reflects the latest completed prove response", () => {
    let box = beginRequest(createBox("e2_2__mtest1"))!;
    box = applyProve(box, theorem);
    expect(box.busy).toBe(false);
    expect(box.status).toBe("Theorem");
    expect(box.hintsAvailable).toBe(false);
    expect(box.usedReferences.map((r) => r.name)).toContain("d1_mtest1");
    expect(box.runs).toHaveLength(1);
  });

  it("records every run for the retry flow", () => {
    let box = beginRequest(createBox("e1_1__weak1"))!;
    box = applyProve(box, countersat);
    box = beginRequest(box)!;
    box = applyProve(box, countersat);
    expect(box.runs).toHaveLength(2);
    expect(box.hintsAvailable).toBe(true);
  });

  it("inserts hints without touching prove results", () => {
    let box = beginRequest(createBox("e1_1__weak1"))!;
    box = applyProve(box, countersat);
    box = beginRequest(box)!;
    box = applyHints(box, hints);
    expect(box.busy).toBe(false);
    expect(box.status).toBe("CounterSatisfiable");
    expect(box.hints!.map((h) => h.name)).toContain("d1_mtest1");
  });

  it("keeps errors inline and recoverable", () => {
    let box = beginRequest(createBox("e2_2__mtest1"))!;
    box = applyError(box, "network down");
    expect(box.error).toBe("network down");
    expect(box.busy).toBe(false);
    expect(beginRequest(box)).not.toBeNull();
  });

  it("clamps the hint count to a positive integer", () => {
    const box = setHintCount(createBox("x"), -3);
    expect(box.k).toBe(1);
    expect(setHintCount(box, 7.9).k).toBe(7);
  });
});
