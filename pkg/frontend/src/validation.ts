/**
 * Local mark validation, mirroring the service's rules so bad input is
 * rejected in the form before any request is made.
 *
 * A valid mark is a decimal string in [0, 100] with at most 2 fraction
 * digits. Validation works on the string itself; no float round-trip.
 */

const MARK_PATTERN = /^(\d{1,3})(?:\.(\d{1,2}))?$/;

export interface MarkCheck {
  ok: boolean;
  /** Empty when ok; otherwise a message suitable for inline display. */
  error: string;
  /** Canonical 2-decimal form ("85" becomes "85.00"), set when ok. */
  normalized: string;
}

export function checkMark(raw: string): MarkCheck {
  const text = raw.trim();
  if (text === "") {
    return { ok: false, error: "mark is required", normalized: "" };
  }
  const match = MARK_PATTERN.exec(text);
  if (!match) {
    return {
      ok: false,
      error: "enter a number from 0 to 100 with at most 2 decimals",
      normalized: "",
    };
  }
  const whole = parseInt(match[1], 10);
  const fraction = match[2] ?? "";
  if (whole > 100 || (whole === 100 && /[1-9]/.test(fraction))) {
    return { ok: false, error: "mark must be at most 100", normalized: "" };
  }
  return { ok: true, error: "", normalized: `${whole}.${fraction.padEnd(2, "0")}` };
}
