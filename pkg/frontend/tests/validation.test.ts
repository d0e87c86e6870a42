import { describe, expect, it } from "vitest";

import { checkMark } from "../src/validation.js";

describe("checkMark", () => {
  it("accepts whole numbers and normalizes to 2 decimals", () => {
    expect(checkMark("85")).toEqual({ ok: true, error: "", normalized: "85.00" });
    expect(checkMark("0")).toEqual({ ok: true, error: "", normalized: "0.00" });
    expect(checkMark("100")).toEqual({ ok: true, error: "", normalized: "100.00" });
  });

  it("accepts 1 and 2 fraction digits", () => {
    expect(checkMark("79.5").normalized).toBe("79.50");
    expect(checkMark("79.99").normalized).toBe("79.99");
    expect(checkMark("100.0").normalized).toBe("100.00");
  });

  it("trims surrounding whitespace", () => {
    expect(checkMark("  85.00 ").normalized).toBe("85.00");
  });

  it("rejects values above 100", () => {
    expect(checkMark("101").ok).toBe(false);
    expect(checkMark("100.01").ok).toBe(false);
    expect(checkMark("999").ok).toBe(false);
  });

  it("rejects negatives, extra decimals, and junk", () => {
    for (const raw of ["-1", "85.123", "8 5", "eighty", "85,00", "1e2", "", "   ", "."]) {
      expect(checkMark(raw).ok, raw).toBe(false);
      expect(checkMark(raw).error).not.toBe("");
    }
  });
});
