import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { WhatIfPanelController } from "../src/whatIfPanel.js";
import { StubApi, makeWhatIf } from "./stub.js";

function buildPanel() {
  const stub = new StubApi();
  stub.on("POST", "/whatif", makeWhatIf());
  const api = new ApiClient("", stub.fetch);
  const panel = new WhatIfPanelController(api, "C001", "2026-1");
  return { stub, panel };
}

describe("WhatIfPanelController", () => {
  it("rejects invalid hypothetical marks locally", () => {
    const { stub, panel } = buildPanel();
    expect(panel.setChange("marching", "200")).toContain("at most 100");
    expect(panel.setChange("marching", "abc")).not.toBe("");
    expect(stub.requests).toHaveLength(0);
  });

  it("sends staged normalized changes in one POST /whatif", async () => {
    const { stub, panel } = buildPanel();
    expect(panel.setChange("marching", "100")).toBe("");
    const result = await panel.run();
    expect(result.composite).toBe("82.00");
    expect(stub.requests).toHaveLength(1);
    expect(stub.requests[0].body).toEqual({
      cadet_id: "C001",
      cycle: "2026-1",
      set: { marching: "100.00" },
    });
  });

  it("makes zero mutating calls across a 20-action scripted session", async () => {
    const { stub, panel } = buildPanel();
    // A realistic officer session: stage, tweak, run, inspect, reset, repeat.
    const session: Array<() => unknown | Promise<unknown>> = [
      () => panel.setChange("marching", "90.00"),
      () => panel.render(),
      () => panel.run(),
      () => panel.setChange("marching", "100"),
      () => panel.setChange("sports", "75.5"),
      () => panel.run(),
      () => panel.render(),
      () => panel.setChange("leadership", "999"), // rejected locally
      () => panel.clearChange("sports"),
      () => panel.run(),
      () => panel.setChange("attendance", "88.25"),
      () => panel.render(),
      () => panel.run(),
      () => panel.reset(),
      () => panel.render(),
      () => panel.setChange("coach_observation", "95"),
      () => panel.run(),
      () => panel.setChange("weapons", "-5"), // rejected locally
      () => panel.run(),
      () => panel.render(),
    ];
    expect(session).toHaveLength(20);
    for (const action of session) {
      await action();
    }
    expect(stub.mutating()).toHaveLength(0);
    expect(stub.requests.length).toBeGreaterThan(0);
    for (const request of stub.requests) {
      expect(`${request.method} ${request.url}`).toBe("POST /whatif");
    }
  });

  it("renders the outcome and the never-saved hint", async () => {
    const { panel } = buildPanel();
    panel.setChange("marching", "100.00");
    await panel.run();
    const html = panel.render();
    expect(html).toContain("82.00");
    expect(html).toContain("stage-HIGH");
    expect(html).toContain("never saved");
  });
});
