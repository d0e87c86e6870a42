/**
 * Ranking board: ordered table of cadets for a cycle. Entries that tied
 * on the composite carry a tie badge; entries still tied after the
 * coach-observation tie-break carry a manual-review badge and show their
 * coach notes so the officer can decide.
 */

import type { ApiClient } from "./api.js";
import { escapeHtml } from "./marksForm.js";
import type { RankingEntry } from "./types.js";

export class RankingBoardController {
  private entries: RankingEntry[] = [];

  constructor(private readonly api: ApiClient) {}

  async load(cycle: string): Promise<RankingEntry[]> {
    this.entries = await this.api.rankings(cycle);
    return this.entries;
  }

  render(): string {
    if (this.entries.length === 0) {
      return `<section class="ranking-board empty">No mark sheets for this cycle.</section>`;
    }
    const rows = this.entries.map((entry, index) => renderRow(entry, index + 1));
    return `
      <section class="ranking-board">
        <table>
          <thead>
            <tr><th>#</th><th>Cadet</th><th>Composite</th><th>Stage</th><th>Eligible</th><th>Flags</th></tr>
          </thead>
          <tbody>
            ${rows.join("\n")}
          </tbody>
        </table>
      </section>`;
  }
}

function renderRow(entry: RankingEntry, position: number): string {
  const badges: string[] = [];
  if (entry.tie_break_used) {
    badges.push(`<span class="badge tie">tie-break</span>`);
  }
  if (entry.manual_review) {
    badges.push(`<span class="badge manual-review">manual review</span>`);
  }
  const notes = entry.manual_review && entry.notes.length > 0
    ? `<details class="coach-notes"><summary>${entry.notes.length} coach note(s)</summary><ul>${entry.notes
        .map((n) => `<li><strong>${escapeHtml(n.author)}</strong>: ${escapeHtml(n.text)}</li>`)
        .join("")}</ul></details>`
    : "";
  return `
    <tr data-cadet="${escapeHtml(entry.cadet_id)}">
      <td>${position}</td>
      <td>${escapeHtml(entry.cadet_id)}</td>
      <td>${escapeHtml(entry.composite)}</td>
      <td>${entry.stage}</td>
      <td>${entry.eligible.join(", ")}</td>
      <td>${badges.join(" ")}${notes}</td>
    </tr>`;
}
