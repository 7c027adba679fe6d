/**
 * Browser bootstrap. The API base URL is resolved from, in order:
 * window.MEDBOOK_API_BASE, the ?api= query parameter, then the default
 * local development server.
 */

import { ApiClient } from "./api.js";
import { App } from "./app.js";
import { MemoryStorage, SessionStore, type StorageLike } from "./session.js";

const DEFAULT_API_BASE = "http://127.0.0.1:8080/api/v1";

function resolveApiBase(): string {
  const fromGlobal = (window as { MEDBOOK_API_BASE?: string }).MEDBOOK_API_BASE;
  if (fromGlobal) return fromGlobal;
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  if (fromQuery) return fromQuery;
  return DEFAULT_API_BASE;
}

function resolveStorage(): StorageLike {
  try {
    window.localStorage.setItem("medbook.probe", "1");
    window.localStorage.removeItem("medbook.probe");
    return window.localStorage;
  } catch {
    return new MemoryStorage();
  }
}

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const app = new App(root, new ApiClient(resolveApiBase()), new SessionStore(resolveStorage()));
app.start();
