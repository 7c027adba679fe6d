/** Pure display/parsing helpers shared by the screens. */

export function todayIso(now: Date = new Date()): string {
  const y = now.getFullYear();
  const m = String(now.getMonth() + 1).padStart(2, "0");
  const d = String(now.getDate()).padStart(2, "0");
  return `${y}-${m}-${d}`;
}

export function addDaysIso(dateIso: string, days: number): string {
  const [y, m, d] = dateIso.split("-").map(Number) as [number, number, number];
  const date = new Date(Date.UTC(y, m - 1, d + days));
  return date.toISOString().slice(0, 10);
}

export function slotEnd(start: string, durationMinutes: number): string {
  const [h, m] = start.split(":").map(Number) as [number, number];
  const total = h * 60 + m + durationMinutes;
  return `${String(Math.floor(total / 60) % 24).padStart(2, "0")}:${String(total % 60).padStart(2, "0")}`;
}

export function slotLabel(start: string, durationMinutes: number): string {
  return `${start}–${slotEnd(start, durationMinutes)}`;
}

export function stateLabel(state: string): string {
  switch (state) {
    case "reserved":
      return "Reserved";
    case "cancelled_by_patient":
      return "Cancelled by you";
    case "cancelled_by_staff":
      return "Cancelled by clinic";
    default:
      return state;
  }
}

const WEEKDAY_KEYS = ["mon", "tue", "wed", "thu", "fri", "sat", "sun"] as const;
export type WeekdayKey = (typeof WEEKDAY_KEYS)[number];

export const WEEKDAYS: { key: WeekdayKey; label: string }[] = [
  { key: "mon", label: "Monday" },
  { key: "tue", label: "Tuesday" },
  { key: "wed", label: "Wednesday" },
  { key: "thu", label: "Thursday" },
  { key: "fri", label: "Friday" },
  { key: "sat", label: "Saturday" },
  { key: "sun", label: "Sunday" },
];

const INTERVAL_RE = /^([01]\d|2[0-3]):([0-5]\d)\s*-\s*([01]\d|2[0-3]):([0-5]\d)$/;

/**
 * Parse one weekday's working-hours text, e.g. "09:00-13:00, 14:00-17:00".
 * Returns the interval pairs, or throws with a human-readable reason.
 */
export function parseHoursSpec(text: string): [string, string][] {
  const trimmed = text.trim();
  if (trimmed === "") return [];
  const intervals: [string, string][] = [];
  for (const part of trimmed.split(",")) {
    const match = INTERVAL_RE.exec(part.trim());
    if (!match) {
      throw new Error(`"${part.trim()}" is not a valid interval (expected HH:MM-HH:MM)`);
    }
    const start = `${match[1]}:${match[2]}`;
    const end = `${match[3]}:${match[4]}`;
    if (start >= end) {
      throw new Error(`interval ${start}-${end} must start before it ends`);
    }
    intervals.push([start, end]);
  }
  return intervals;
}

export function hoursToSpec(intervals: [string, string][]): string {
  return intervals.map(([start, end]) => `${start}-${end}`).join(", ");
}
