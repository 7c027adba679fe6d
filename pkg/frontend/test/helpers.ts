/** A route-table fetch stub: responds per "METHOD /path", records every call. */

import type { FetchLike } from "../src/api.js";

export interface CannedResponse {
  status: number;
  body: unknown;
}

export type RouteHandler =
  | CannedResponse
  | CannedResponse[]
  | ((url: URL, init?: RequestInit) => CannedResponse);

export interface RecordedCall {
  method: string;
  url: URL;
  init?: RequestInit;
}

export interface MockFetch extends FetchLike {
  calls: RecordedCall[];
}

export function mockFetch(routes: Record<string, RouteHandler>): MockFetch {
  const queues = new Map<string, CannedResponse[]>();
  const calls: RecordedCall[] = [];

  const fn = async (input: string, init?: RequestInit): Promise<Response> => {
    const url = new URL(input);
    const method = (init?.method ?? "GET").toUpperCase();
    calls.push({ method, url, init });
    const key = `${method} ${url.pathname}`;
    const handler = routes[key];
    if (handler === undefined) {
      throw new Error(`no handler for ${key}`);
    }
    let canned: CannedResponse;
    if (typeof handler === "function") {
      canned = handler(url, init);
    } else if (Array.isArray(handler)) {
      let queue = queues.get(key);
      if (!queue) {
        queue = [...handler];
        queues.set(key, queue);
      }
      canned = queue.length > 1 ? (queue.shift() as CannedResponse) : (queue[0] as CannedResponse);
    } else {
      canned = handler;
    }
    return new Response(JSON.stringify(canned.body), {
      status: canned.status,
      headers: { "content-type": "application/json" },
    });
  };
  (fn as MockFetch).calls = calls;
  return fn as MockFetch;
}

export function jsonBody(init?: RequestInit): unknown {
  return init?.body ? JSON.parse(init.body as string) : undefined;
}
