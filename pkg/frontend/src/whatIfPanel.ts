/**
 * What-if panel: explore hypothetical mark changes for a cadet without
 * ever persisting anything. The panel's only network call is POST
 * /whatif, which the service guarantees is pure; it never submits marks,
 * evaluates, or writes notes.
 */

import type { ApiClient } from "./api.js";
import { escapeHtml } from "./marksForm.js";
import { checkMark } from "./validation.js";
import type { ComponentId, DecimalString, WhatIfResponse } from "./types.js";

export class WhatIfPanelController {
  private readonly changes = new Map<ComponentId, DecimalString>();
  private result: WhatIfResponse | null = null;

  constructor(
    private readonly api: ApiClient,
    readonly cadetId: string,
    readonly cycle: string,
  ) {}

  /** Stage a hypothetical mark; invalid input is rejected locally. */
  setChange(component: ComponentId, raw: string): string {
    const check = checkMark(raw);
    if (!check.ok) {
      return check.error;
    }
    this.changes.set(component, check.normalized);
    return "";
  }

  clearChange(component: ComponentId): void {
    this.changes.delete(component);
  }

  reset(): void {
    this.changes.clear();
    this.result = null;
  }

  /** Run the scenario. Read-only: a single POST /whatif, nothing stored. */
  async run(): Promise<WhatIfResponse> {
    const changes: Partial<Record<ComponentId, DecimalString>> = {};
    for (const [component, mark] of this.changes) {
      changes[component] = mark;
    }
    this.result = await this.api.whatIf(this.cadetId, this.cycle, changes);
    return this.result;
  }

  render(): string {
    const staged = [...this.changes]
      .map(
        ([component, mark]) =>
          `<li data-change="${component}">${component} &rarr; ${escapeHtml(mark)}</li>`,
      )
      .join("");
    const outcome = this.result
      ? `<div class="whatif-outcome">
           <span class="composite">${escapeHtml(this.result.composite)}</span>
           <span class="stage stage-${this.result.stage}">${this.result.stage}</span>
           <span class="eligible">${this.result.eligible.join(", ") || "not eligible"}</span>
         </div>`
      : `<div class="whatif-outcome empty">Stage changes and run the scenario.</div>`;
    return `
      <section class="whatif-panel" data-cadet="${escapeHtml(this.cadetId)}" data-cycle="${escapeHtml(this.cycle)}">
        <ul class="staged-changes">${staged}</ul>
        <button data-run-whatif>Run what-if</button>
        ${outcome}
        <p class="hint">Scenarios are never saved.</p>
      </section>`;
  }
}
