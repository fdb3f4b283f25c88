import { describe, expect, it } from "vitest";

import { ApiError, ServiceClient } from "../src/api.js";

function fakeFetch(status: number, body: unknown): typeof fetch {
  return (async (_input: RequestInfo | URL, _init?: RequestInit) =>
    new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    })) as typeof fetch;
}

const report = {
  states: [],
  mean_hours: 73.7,
  mean_seconds: 265325.33,
  mean_formatted: "3d 1h 42m 5s",
  start_pi: 1 / 6,
};

describe("ServiceClient", () => {
  it("fetches the model", async () => {
    const client = new ServiceClient("http://svc", fakeFetch(200, {
      model: { k: 1, states: [], edges: [] },
      report,
    }));
    const resp = await client.getModel();
    expect(resp.report.mean_formatted).toBe("3d 1h 42m 5s");
  });

  it("posts scenario edits and returns both reports", async () => {
    let captured: { url: string; body: string } | null = null;
    const fetchFn = (async (input: RequestInfo | URL, init?: RequestInit) => {
      captured = { url: String(input), body: String(init?.body) };
      return new Response(JSON.stringify({ baseline: report, report }), { status: 200 });
    }) as typeof fetch;
    const client = new ServiceClient("http://svc", fetchFn);
    const edits = [{ op: "set_probability", from: ["Claim"], to: ["Assign"], value: 0.1 } as const];
    const resp = await client.whatif(edits);
    expect(captured!.url).toBe("http://svc/whatif");
    expect(JSON.parse(captured!.body)).toEqual({ edits });
    expect(resp.baseline.mean_seconds).toBeCloseTo(265325.33);
  });

  it("includes full flag only when requested", async () => {
    let body = "";
    const fetchFn = (async (_i: RequestInfo | URL, init?: RequestInit) => {
      body = String(init?.body);
      return new Response(JSON.stringify({ baseline: report, report }), { status: 200 });
    }) as typeof fetch;
    const client = new ServiceClient("http://svc", fetchFn);
    await client.whatif([], true);
    expect(JSON.parse(body).full).toBe(true);
    await client.whatif([]);
    expect(JSON.parse(body).full).toBeUndefined();
  });

  it("maps 409 to an edit rejection", async () => {
    const client = new ServiceClient(
      "http://svc",
      fakeFetch(409, { error: "not every state reaches end" }),
    );
    try {
      await client.whatif([{ op: "set_probability", from: ["Close"], to: "END", value: 0 }]);
      throw new Error("should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      const apiErr = err as ApiError;
      expect(apiErr.status).toBe(409);
      expect(apiErr.isEditRejection).toBe(true);
      expect(apiErr.message).toContain("reaches end");
    }
  });

  it("maps other failures without the rejection flag", async () => {
    const client = new ServiceClient("http://svc", fakeFetch(500, { error: "numeric" }));
    await expect(client.getModel()).rejects.toMatchObject({ status: 500, isEditRejection: false });
  });
});
