// Reconnect delay schedule: exponential with a cap, plus ±25% jitter so a
// relay restart doesn't get a synchronized stampede of reconnects.

export const BASE_DELAY_MS = 1_000;
export const MAX_DELAY_MS = 30_000;

export function reconnectDelayMs(
  attempt: number,
  random: () => number = Math.random,
): number {
  const base = Math.min(BASE_DELAY_MS * 2 ** Math.max(0, attempt), MAX_DELAY_MS);
  const jitter = base * 0.25 * (random() * 2 - 1);
  return Math.max(0, Math.round(base + jitter));
}
