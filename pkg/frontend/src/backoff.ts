export const BASE_DELAY_MS = 500;
export const MAX_DELAY_MS = 10_000;

/** Exponential reconnect delay: base * 2^attempt, capped. */
export function reconnectDelayMs(attempt: number): number {
  if (attempt < 0) throw new Error("attempt must be >= 0");
  const delay = BASE_DELAY_MS * 2 ** attempt;
  return Math.min(delay, MAX_DELAY_MS);
}
