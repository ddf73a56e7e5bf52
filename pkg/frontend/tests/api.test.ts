import { describe, expect, it } from "vitest";

import { ApiClient, HttpError } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("creates sessions with the dataset id payload", async () => {
    let captured: { url?: string; body?: string } = {};
    const api = new ApiClient("http://gw/", async (url, init) => {
      captured = { url, body: String(init?.body) };
      return jsonResponse(200, { session_id: "abc123" });
    });
    const id = await api.createSession("ds-1");
    expect(id).toBe("abc123");
    expect(captured.url).toBe("http://gw/sessions"); // base slash trimmed
    expect(JSON.parse(captured.body!)).toEqual({ dataset_id: "ds-1" });
  });

  it("fetches graph documents verbatim", async () => {
    const doc = {
      nodes: ["A", "B"],
      edges: [{ from: "A", to: "B", kind: "directed" }],
    };
    const api = new ApiClient("http://gw", async () => jsonResponse(200, doc));
    expect(await api.fetchGraph("s")).toEqual(doc);
  });

  it("surfaces structured error bodies as HttpError", async () => {
    const api = new ApiClient("http://gw", async () =>
      jsonResponse(404, { error: "not_found", detail: "unknown session" }),
    );
    await expect(api.fetchReport("s")).rejects.toMatchObject({
      status: 404,
      errorCode: "not_found",
    });
    try {
      await api.fetchGraph("s");
    } catch (err) {
      expect(err).toBeInstanceOf(HttpError);
    }
  });

  it("builds the SSE url from the session id", () => {
    const api = new ApiClient("http://gw", async () => jsonResponse(200, {}));
    expect(api.eventsUrl("xyz")).toBe("http://gw/sessions/xyz/events");
  });
});
