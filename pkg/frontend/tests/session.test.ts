// Unit tests for the session state machine with a scripted fake service.

import { beforeEach, describe, expect, it } from "vitest";
import { Client } from "../src/api.js";
import { SEED_ORDER, Session } from "../src/session.js";

const MESH = {
  id: "m",
  vertices: [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0], [2, 0, 0],
    [2, 1, 0], [0, 2, 0], [1, 2, 0], [2, 2, 0], [3, 0, 0]],
  faces: [[0, 1, 2]],
  vertex_ids: [0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
  channels: { intensity: [0, 1, 2, 3, 4, 5, 6, 7, 8, 9] },
};

interface Call {
  url: string;
  body?: unknown;
}

function fakeService(handlers: Record<string, (body?: any) => [number, unknown]>) {
  const calls: Call[] = [];
  const fetchImpl = async (url: string, init?: RequestInit) => {
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    calls.push({ url, body });
    const key = `${init?.method ?? "GET"} ${url}`;
    const handler = handlers[key];
    if (!handler) throw new Error(`no handler for ${key}`);
    const [status, payload] = handler(body);
    return new Response(JSON.stringify(payload), {
      status,
      headers: { "content-type": "application/json" },
    });
  };
  return { calls, client: new Client("", fetchImpl as typeof fetch) };
}

function flatResponse(templateHash = "hash-a") {
  return {
    id: "m",
    flat: {
      xy: MESH.vertices.map((v) => [v[0], v[1]]),
      faces: MESH.faces,
      vertex_ids: MESH.vertex_ids,
      channels: { intensity: MESH.channels.intensity },
      template_hash: templateHash,
    },
    report: {
      boundary_dev_before: 1e-7, boundary_dev_after: 1e-12,
      flipped_before: 3, flipped_after: 0, n_vertices: 10, n_faces: 1,
    },
    template: { name: "population", disk_radius: 1, holes: {},
      mv_anchor_angles: [], path_style: {} },
  };
}

describe("seed picking", () => {
  let session: Session;

  beforeEach(async () => {
    const { client } = fakeService({
      "GET /mesh/m": () => [200, MESH],
    });
    session = new Session(client);
    await session.loadMesh("m");
  });

  it("labels follow the fixed order", () => {
    expect(session.nextLabel).toBe("LIPV");
    session.pickSeed(3);
    expect(session.seeds[0]).toEqual({ label: "LIPV", vertex: 3 });
    expect(session.nextLabel).toBe("LSPV");
  });

  it("nine seeds complete the set and enable confirmation", () => {
    for (let v = 0; v < 9; v++) session.pickSeed(v);
    expect(session.seedsComplete).toBe(true);
    expect(session.nextLabel).toBeNull();
    const extra = session.pickSeed(9);
    expect(extra.picked).toBeNull();
  });

  it("off-mesh pick is ignored", () => {
    const res = session.pickSeed(99);
    expect(res.picked).toBeNull();
    expect(session.seeds).toHaveLength(0);
  });

  it("duplicate vertex warns but stays editable", () => {
    session.pickSeed(4);
    const res = session.pickSeed(4);
    expect(res.warning).toMatch(/already a seed/);
    expect(session.seeds).toHaveLength(2);
  });

  it("undo removes only the last seed", () => {
    session.pickSeed(0);
    session.pickSeed(1);
    session.pickSeed(2);
    const removed = session.undoSeed();
    expect(removed?.vertex).toBe(2);
    expect(session.seeds.map((s) => s.vertex)).toEqual([0, 1]);
  });

  it("payload is ordered by label regardless of edit history", () => {
    for (let v = 0; v < 9; v++) session.pickSeed(v);
    session.undoSeed();
    session.undoSeed();
    session.pickSeed(8);
    session.pickSeed(7);
    const payload = session.seedPayload();
    expect(payload.LIPV).toBe(0);
    expect(payload.MV).toEqual([5, 6, 8, 7]);
  });
});

describe("service interaction", () => {
  it("posts seeds only on explicit confirm", async () => {
    const { client, calls } = fakeService({
      "GET /mesh/m": () => [200, MESH],
      "POST /mesh/m/seeds": () => [200, { ok: true }],
    });
    const session = new Session(client);
    await session.loadMesh("m");
    for (let v = 0; v < 9; v++) session.pickSeed(v);
    expect(calls.filter((c) => c.url.endsWith("/seeds"))).toHaveLength(0);
    await session.confirmSeeds();
    const seedCalls = calls.filter((c) => c.url.endsWith("/seeds"));
    expect(seedCalls).toHaveLength(1);
    expect((seedCalls[0].body as any).MV).toEqual([5, 6, 7, 8]);
  });

  it("flat result appears only after a successful flatten", async () => {
    const { client } = fakeService({
      "GET /mesh/m": () => [200, MESH],
      "POST /mesh/m/flatten": () => [422,
        { error: "paths s2 and s5 cross at vertex 808; re-seed",
          stage: "divide", vertex: 808 }],
    });
    const session = new Session(client);
    await session.loadMesh("m");
    const result = await session.flatten();
    expect(result).toBeNull();
    expect(session.flat).toBeNull();
    expect(session.errorMarker?.vertex).toBe(808);
    expect(session.errorMarker?.stage).toBe("divide");
  });

  it("success stores the result and clears the marker", async () => {
    const { client } = fakeService({
      "GET /mesh/m": () => [200, MESH],
      "POST /mesh/m/flatten": () => [200, flatResponse()],
    });
    const session = new Session(client);
    await session.loadMesh("m");
    const result = await session.flatten();
    expect(result).not.toBeNull();
    expect(session.flat?.flat.template_hash).toBe("hash-a");
    expect(session.errorMarker).toBeNull();
  });

  it("only one flatten request is in flight", async () => {
    let resolveFirst: (() => void) | null = null;
    let count = 0;
    const fetchImpl = async (url: string, init?: RequestInit) => {
      if (url.endsWith("/flatten")) {
        count += 1;
        await new Promise<void>((resolve) => (resolveFirst = resolve));
        return new Response(JSON.stringify(flatResponse()), { status: 200 });
      }
      return new Response(JSON.stringify(MESH), { status: 200 });
    };
    const session = new Session(new Client("", fetchImpl as typeof fetch));
    await session.loadMesh("m");
    const first = session.flatten();
    const second = await session.flatten(); // rejected: already pending
    expect(second).toBeNull();
    expect(count).toBe(1);
    resolveFirst!();
    await first;
    expect(session.flat).not.toBeNull();
  });

  it("re-picking a seed clears the previous preview", async () => {
    const { client } = fakeService({
      "GET /mesh/m": () => [200, MESH],
      "GET /mesh/m/division": () => [200, {
        id: "m", paths: { s1: [0, 1] }, region_label: [1],
        intersection_points: {}, rings: {}, boundary_idx: [], regional_idx: [],
      }],
    });
    const session = new Session(client);
    await session.loadMesh("m");
    await session.previewDivision();
    expect(session.division).not.toBeNull();
    session.pickSeed(0);
    expect(session.division).toBeNull();
  });

  it("channel switch never re-requests", async () => {
    const { client, calls } = fakeService({
      "GET /mesh/m": () => [200, MESH],
      "POST /mesh/m/flatten": () => [200, flatResponse()],
    });
    const session = new Session(client);
    await session.loadMesh("m");
    await session.flatten();
    const before = calls.length;
    session.setChannel("intensity");
    expect(calls.length).toBe(before);
  });

  it("overlay with a different template is refused with a message", async () => {
    const { client } = fakeService({
      "GET /mesh/m": () => [200, MESH],
      "POST /mesh/m/flatten": () => [200, flatResponse("hash-a")],
    });
    const session = new Session(client);
    await session.loadMesh("m");
    await session.flatten();
    const other = flatResponse("hash-b");
    expect(session.setOverlay(other as any)).toBe(false);
    expect(session.overlay).toBeNull();
    expect(session.overlayError).toMatch(/different templates/);
    const same = flatResponse("hash-a");
    expect(session.setOverlay(same as any)).toBe(true);
    expect(session.overlay?.opacity).toBe(0.5);
    session.setOverlayOpacity(1.0);
    expect(session.overlay?.opacity).toBe(1.0);
  });
});

describe("seed order constant", () => {
  it("covers the five holes then the four rim anchors", () => {
    expect(SEED_ORDER).toEqual([
      "LIPV", "LSPV", "RIPV", "RSPV", "LAA", "MV1", "MV2", "MV3", "MV4",
    ]);
  });
});
