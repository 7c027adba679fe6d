/**
 * Session persistence: the token survives a page refresh via storage, but an
 * entry past its expiry is treated as absent so a stale token never gets used.
 */

import type { Role } from "./api.js";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export interface SavedSession {
  token: string;
  role: Role;
  expiresAt: string;
}

const KEY = "medbook.session";

export class SessionStore {
  constructor(
    private readonly storage: StorageLike,
    private readonly now: () => Date = () => new Date(),
  ) {}

  save(session: SavedSession): void {
    this.storage.setItem(KEY, JSON.stringify(session));
  }

  load(): SavedSession | null {
    const raw = this.storage.getItem(KEY);
    if (raw === null) return null;
    let parsed: SavedSession;
    try {
      parsed = JSON.parse(raw) as SavedSession;
    } catch {
      this.storage.removeItem(KEY);
      return null;
    }
    if (!parsed.token || !parsed.expiresAt) {
      this.storage.removeItem(KEY);
      return null;
    }
    if (new Date(parsed.expiresAt).getTime() <= this.now().getTime()) {
      this.storage.removeItem(KEY);
      return null;
    }
    return parsed;
  }

  clear(): void {
    this.storage.removeItem(KEY);
  }
}

/** In-memory fallback when the browser blocks storage access. */
export class MemoryStorage implements StorageLike {
  private readonly data = new Map<string, string>();

  getItem(key: string): string | null {
    return this.data.has(key) ? (this.data.get(key) as string) : null;
  }

  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }

  removeItem(key: string): void {
    this.data.delete(key);
  }
}
