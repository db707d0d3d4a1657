/**
 * Explanation-box state machine.
 *
 * One box per obligation; at most one request is in flight (the busy flag
 * suppresses re-entry), and the box always reflects the latest completed
 * response.  All transitions are pure.
 */

import type { Hint, HintsResponse, ProveResponse, Reference } from "./api.js";

export interface RunSummary {
  system: string;
  status: string;
  wall_millis: number;
}

export interface ExplanationBoxState {
  obligationId: string;
  open: boolean;
  busy: boolean;
  status: string | null;
  usedReferences: Reference[];
  runs: RunSummary[];
  hintsAvailable: boolean;
  hints: Hint[] | null;
  k: number;
  error: string | null;
}

export function createBox(obligationId: string, k = 20): ExplanationBoxState {
  return {
    obligationId,
    open: false,
    busy: false,
    status: null,
    usedReferences: [],
    runs: [],
    hintsAvailable: false,
    hints: null,
    k,
    error: null,
  };
}

/** Start a request; returns null when one is already in flight. */
export function beginRequest(state: ExplanationBoxState): ExplanationBoxState | null {
  if (state.busy) return null;
  return { ...state, open: true, busy: true, error: null };
}

export function applyProve(
  state: ExplanationBoxState,
  response: ProveResponse,
): ExplanationBoxState {
  return {
    ...state,
    busy: false,
    status: response.status,
    usedReferences: response.used_references,
    runs: [
      ...state.runs,
      {
        system: response.system,
        status: response.status,
        wall_millis: response.wall_millis,
      },
    ],
    hintsAvailable: response.hints_available,
    error: null,
  };
}

export function applyHints(
  state: ExplanationBoxState,
  response: HintsResponse,
): ExplanationBoxState {
  return { ...state, busy: false, hints: response.hints, k: response.k, error: null };
}

export function applyError(
  state: ExplanationBoxState,
  message: string,
): ExplanationBoxState {
  return { ...state, busy: false, error: message };
}

export function setHintCount(
  state: ExplanationBoxState,
  k: number,
): ExplanationBoxState {
  return { ...state, k: Math.max(1, Math.floor(k)) };
}
