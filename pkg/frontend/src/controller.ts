/** Pure load step shared by the UI: schema failures never touch state. */

import { parseDocument } from "./schema.js";
import { createState, ViewState } from "./state.js";

export interface LoadOutcome {
  state: ViewState | null;
  error: string | null;
}

export function loadDocumentText(current: ViewState | null, text: string): LoadOutcome {
  const result = parseDocument(text);
  if (!result.ok) {
    return { state: current, error: result.errors.slice(0, 3).join("; ") };
  }
  return { state: createState(result.doc), error: null };
}
