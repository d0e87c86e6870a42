/**
 * Explanation viewer: fetches a trace in either view and renders the
 * service's pre-rendered text alongside the structured conclusions.
 */

import type { ApiClient } from "./api.js";
import { escapeHtml } from "./marksForm.js";
import type { TraceView, TraceViewResponse } from "./types.js";

export class ExplanationViewController {
  private current: TraceViewResponse | null = null;

  constructor(private readonly api: ApiClient) {}

  async load(traceId: string, view: TraceView): Promise<TraceViewResponse> {
    this.current = await this.api.getTrace(traceId, view);
    return this.current;
  }

  render(): string {
    if (!this.current) {
      return `<section class="explanation empty">Select an evaluation to explain.</section>`;
    }
    const { trace, view, rendered } = this.current;
    const other: TraceView = view === "general" ? "detailed" : "general";
    const eligible =
      trace.eligible.length > 0 ? trace.eligible.join(", ") : "not eligible for promotion";
    return `
      <section class="explanation" data-trace="${escapeHtml(trace.trace_id)}" data-view="${view}">
        <header>
          <span class="composite">${escapeHtml(trace.composite)}</span>
          <span class="stage stage-${trace.stage ?? "none"}">${trace.stage ?? "(no stage)"}</span>
          <span class="eligible">${escapeHtml(eligible)}</span>
          <button data-switch-view="${other}">Show ${other}</button>
        </header>
        <pre class="rendered">${escapeHtml(rendered)}</pre>
      </section>`;
  }
}
