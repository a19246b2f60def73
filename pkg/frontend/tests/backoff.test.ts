import { describe, expect, it } from "vitest";
import { BASE_DELAY_MS, MAX_DELAY_MS, reconnectDelayMs } from "../src/backoff.js";

describe("reconnectDelayMs", () => {
  it("doubles per attempt from the base delay", () => {
    expect(reconnectDelayMs(0)).toBe(BASE_DELAY_MS);
    expect(reconnectDelayMs(1)).toBe(1000);
    expect(reconnectDelayMs(2)).toBe(2000);
    expect(reconnectDelayMs(3)).toBe(4000);
  });

  it("caps at the maximum delay", () => {
    expect(reconnectDelayMs(5)).toBe(MAX_DELAY_MS);
    expect(reconnectDelayMs(20)).toBe(MAX_DELAY_MS);
  });

  it("rejects negative attempts", () => {
    expect(() => reconnectDelayMs(-1)).toThrow();
  });
});
