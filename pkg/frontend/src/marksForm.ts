/**
 * Marks entry form controller.
 *
 * The officer types one mark per component; every field is validated
 * locally and submission is blocked (no request of any kind) while any
 * field is invalid. A successful submit stores the sheet and immediately
 * evaluates it so the form can show stage and eligibility inline.
 */

import type { ApiClient } from "./api.js";
import { checkMark } from "./validation.js";
import {
  COMPONENTS,
  COMPONENT_LABELS,
  type ComponentId,
  type DecimalString,
  type EvaluationResponse,
} from "./types.js";

export type SubmitResult =
  | { kind: "blocked"; errors: Partial<Record<ComponentId, string>> }
  | { kind: "submitted"; evaluation: EvaluationResponse };

export class MarksFormController {
  private readonly values = new Map<ComponentId, string>();

  constructor(
    private readonly api: ApiClient,
    readonly cadetId: string,
    readonly cycle: string,
  ) {}

  setField(component: ComponentId, raw: string): void {
    this.values.set(component, raw);
  }

  fieldError(component: ComponentId): string {
    const raw = this.values.get(component) ?? "";
    return checkMark(raw).error;
  }

  /** Errors for every currently invalid field, keyed by component. */
  errors(): Partial<Record<ComponentId, string>> {
    const errors: Partial<Record<ComponentId, string>> = {};
    for (const component of COMPONENTS) {
      const error = this.fieldError(component);
      if (error) errors[component] = error;
    }
    return errors;
  }

  isValid(): boolean {
    return Object.keys(this.errors()).length === 0;
  }

  /**
   * Submit the sheet. With any invalid field this returns the error map
   * and performs no network call; otherwise it PUTs the marks and POSTs
   * an evaluation.
   */
  async submit(resubmit = false): Promise<SubmitResult> {
    const errors = this.errors();
    if (Object.keys(errors).length > 0) {
      return { kind: "blocked", errors };
    }
    const marks = {} as Record<ComponentId, DecimalString>;
    for (const component of COMPONENTS) {
      marks[component] = checkMark(this.values.get(component)!).normalized;
    }
    await this.api.submitMarks(this.cadetId, this.cycle, marks, resubmit);
    const evaluation = await this.api.evaluate(this.cadetId, this.cycle);
    return { kind: "submitted", evaluation };
  }

  /** Render the form as HTML, with inline error text per invalid field. */
  render(): string {
    const rows = COMPONENTS.map((component) => {
      const raw = this.values.get(component) ?? "";
      const error = raw === "" ? "" : this.fieldError(component);
      const errorHtml = error
        ? `<span class="field-error" data-error-for="${component}">${escapeHtml(error)}</span>`
        : "";
      return `
        <label class="mark-field">
          <span>${COMPONENT_LABELS[component]}</span>
          <input name="${component}" inputmode="decimal" value="${escapeHtml(raw)}" />
          ${errorHtml}
        </label>`;
    });
    const disabled = this.isValid() ? "" : " disabled";
    return `
      <form class="marks-form" data-cadet="${escapeHtml(this.cadetId)}" data-cycle="${escapeHtml(this.cycle)}">
        ${rows.join("\n")}
        <button type="submit"${disabled}>Submit and evaluate</button>
      </form>`;
  }
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
