import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, createClient } from "../src/api.js";

function stubFetch(status: number, body: unknown, json = true) {
  const fn = vi.fn(async () => ({
    ok: status >= 200 && status < 300,
    status,
    statusText: "Conflict",
    json: async () => {
      if (!json) throw new SyntaxError("not json");
      return body;
    },
  }));
  vi.stubGlobal("fetch", fn);
  return fn;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("createClient", () => {
  it("returns parsed JSON on success", async () => {
    const fn = stubFetch(200, { graph_id: "abc", vertices: 3 });
    const client = createClient("");
    const up = await client.uploadGraph({});
    expect(up.graph_id).toBe("abc");
    expect(fn).toHaveBeenCalledWith("/graphs", expect.objectContaining({ method: "POST" }));
  });

  it("posts step bodies with neighbor and version", async () => {
    const fn = stubFetch(200, {});
    await createClient("").step("sid", 7, 3);
    const [url, init] = fn.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("/sessions/sid/step");
    expect(JSON.parse(String(init.body))).toEqual({ neighbor: 7, version: 3 });
  });

  it("raises ApiError carrying the service detail", async () => {
    stubFetch(409, { detail: "session already complete" });
    await expect(createClient("").getSession("sid")).rejects.toMatchObject({
      status: 409,
      detail: "session already complete",
    });
  });

  it("falls back to the status text for non-JSON error bodies", async () => {
    stubFetch(502, null, false);
    const err = await createClient("").summary("g").catch((e) => e as ApiError);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.detail).toBe("Conflict");
  });
});
