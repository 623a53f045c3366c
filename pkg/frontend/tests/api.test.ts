import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

interface Captured {
  url: string;
  init: RequestInit | undefined;
}

function capturing(body: unknown = {}, status = 200) {
  const calls: Captured[] = [];
  const api = new ApiClient("", async (url, init) => {
    calls.push({ url, init });
    return new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  });
  return { api, calls };
}

describe("request shapes", () => {
  it("suggest posts the draft text", async () => {
    const { api, calls } = capturing({ superseded: false, suggestions: [] });
    await api.suggest("c9", "warmer lighting", 4);
    expect(calls[0]!.url).toBe("/api/v1/comments/c9/suggest");
    expect(calls[0]!.init?.method).toBe("POST");
    expect(JSON.parse(calls[0]!.init?.body as string)).toEqual({ text: "warmer lighting", k: 4 });
  });

  it("suggest omits k unless given", async () => {
    const { api, calls } = capturing({ superseded: false, suggestions: [] });
    await api.suggest("c9", "hi");
    expect(JSON.parse(calls[0]!.init?.body as string)).toEqual({ text: "hi" });
  });

  it("anchor goes up as a PUT with the six viewpoint fields", async () => {
    const { api, calls } = capturing({});
    await api.setAnchor("c1", { alpha: 1.5, beta: 0.25, r: 2, target: [0, 1, 0] });
    expect(calls[0]!.url).toBe("/api/v1/comments/c1/anchor");
    expect(calls[0]!.init?.method).toBe("PUT");
    expect(JSON.parse(calls[0]!.init?.body as string)).toEqual({
      alpha: 1.5,
      beta: 0.25,
      r: 2,
      target: [0, 1, 0],
    });
  });

  it("index build posts to the project index route", async () => {
    const { api, calls } = capturing({});
    await api.buildIndex("p1", { bins: 1, step: 90, radii: [1.0] });
    expect(calls[0]!.url).toBe("/api/v1/projects/p1/index");
    expect(JSON.parse(calls[0]!.init?.body as string)).toEqual({ bins: 1, step: 90, radii: [1.0] });
  });

  it("modifier submission carries the payload verbatim", async () => {
    const { api, calls } = capturing({});
    await api.submitModifier("c1", {
      kind: "grab-n-go",
      box: [4, 5, 60, 70],
      intent: "remove",
      staging: true,
      prior: "r42",
    });
    expect(calls[0]!.url).toBe("/api/v1/comments/c1/modifiers");
    expect(JSON.parse(calls[0]!.init?.body as string)).toEqual({
      kind: "grab-n-go",
      box: [4, 5, 60, 70],
      intent: "remove",
      staging: true,
      prior: "r42",
    });
  });

  it("scene upload is multipart with a scene part", async () => {
    const { api, calls } = capturing({});
    await api.createProject("room.glb", new Blob([new Uint8Array([1, 2, 3])]));
    expect(calls[0]!.url).toBe("/api/v1/projects");
    const form = calls[0]!.init?.body as FormData;
    expect(form).toBeInstanceOf(FormData);
    const part = form.get("scene") as File;
    expect(part.name).toBe("room.glb");
  });

  it("render returns the body as a blob", async () => {
    const api = new ApiClient("", async () => new Response(new Uint8Array([137, 80]), { status: 200 }));
    const blob = await api.renderView("p1", { alpha: 1, beta: 2, r: 3, target: [0, 0, 0] }, 64, 64);
    expect(blob.size).toBe(2);
  });

  it("urls include the configured base", () => {
    const api = new ApiClient("http://host:9");
    expect(api.exportUrl("c1")).toBe("http://host:9/api/v1/comments/c1/export");
    expect(api.resultUrl("c1", "r2", "reference.png")).toBe(
      "http://host:9/api/v1/comments/c1/results/r2/reference.png",
    );
  });
});

describe("error envelopes", () => {
  it("maps the service error envelope to ApiError", async () => {
    const { api } = capturing({ detail: { error: "not_found", message: "no such comment" } }, 404);
    const error = await api.getComment("missing").catch((e: unknown) => e);
    expect(error).toBeInstanceOf(ApiError);
    const apiError = error as ApiError;
    expect(apiError.status).toBe(404);
    expect(apiError.code).toBe("not_found");
    expect(apiError.message).toBe("no such comment");
  });

  it("maps validation-list details to an invalid code", async () => {
    const { api } = capturing({ detail: [{ loc: ["body", "kind"], msg: "field required" }] }, 422);
    const error = (await api.getComment("x").catch((e: unknown) => e)) as ApiError;
    expect(error.code).toBe("invalid");
    expect(error.message).toBe("field required");
  });

  it("survives non-JSON error bodies", async () => {
    const api = new ApiClient("", async () => new Response("<html>bad gateway</html>", { status: 502 }));
    const error = (await api.health().catch((e: unknown) => e)) as ApiError;
    expect(error.code).toBe("error");
    expect(error.message).toBe("HTTP 502");
    expect(error.status).toBe(502);
  });
});
