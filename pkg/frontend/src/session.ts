// Session state machine behind the UI. Framework-free so a scripted test can
// drive the exact flow a user would: pick nine seeds, confirm, preview the
// division, flatten, inspect.

import {
  ApiError,
  Client,
  DivisionPayload,
  FlattenResponse,
  MeshPayload,
  SeedSetPayload,
} from "./api.js";

export const SEED_ORDER = [
  "LIPV", "LSPV", "RIPV", "RSPV", "LAA", "MV1", "MV2", "MV3", "MV4",
] as const;

export type SeedLabel = (typeof SEED_ORDER)[number];

export interface PickedSeed {
  label: SeedLabel;
  vertex: number;
}

export interface ErrorMarker {
  message: string;
  stage?: string;
  vertex: number | null;
}

export interface OverlayState {
  flat: FlattenResponse;
  opacity: number;
}

export class Session {
  private client: Client;
  meshId: string | null = null;
  mesh: MeshPayload | null = null;
  seeds: PickedSeed[] = [];
  seedsConfirmed = false;
  division: DivisionPayload | null = null;
  flat: FlattenResponse | null = null;
  errorMarker: ErrorMarker | null = null;
  channel = "";
  overlay: OverlayState | null = null;
  overlayError: string | null = null;
  flattenPending = false;
  private listeners = new Set<() => void>();

  constructor(client: Client) {
    this.client = client;
  }

  subscribe(fn: () => void): () => void {
    this.listeners.add(fn);
    return () => this.listeners.delete(fn);
  }

  private emit() {
    for (const fn of this.listeners) fn();
  }

  async loadMesh(id: string): Promise<MeshPayload> {
    this.mesh = await this.client.getMesh(id);
    this.meshId = id;
    this.seeds = [];
    this.seedsConfirmed = false;
    this.division = null;
    this.flat = null;
    this.overlay = null;
    this.errorMarker = null;
    const names = Object.keys(this.mesh.channels);
    this.channel = names.length ? names.sort()[0] : "";
    this.emit();
    return this.mesh;
  }

  get nextLabel(): SeedLabel | null {
    return this.seeds.length < SEED_ORDER.length
      ? SEED_ORDER[this.seeds.length]
      : null;
  }

  get seedsComplete(): boolean {
    return this.seeds.length === SEED_ORDER.length;
  }

  /** Snap a picked vertex onto the next label in the fixed order.
   *  Returns a warning string when the vertex is already used. */
  pickSeed(vertex: number): { picked: PickedSeed | null; warning: string | null } {
    const label = this.nextLabel;
    if (label === null || this.mesh === null) {
      return { picked: null, warning: "all nine seeds are already placed" };
    }
    if (vertex < 0 || vertex >= this.mesh.vertices.length) {
      return { picked: null, warning: null }; // off-mesh click: ignored
    }
    let warning: string | null = null;
    if (this.seeds.some((s) => s.vertex === vertex)) {
      warning = `vertex ${vertex} is already a seed`;
    }
    const picked = { label, vertex };
    this.seeds.push(picked);
    this.seedsConfirmed = false;
    // any edit invalidates the previous preview and its diagnostics
    this.division = null;
    this.errorMarker = null;
    this.emit();
    return { picked, warning };
  }

  /** Remove only the most recent seed. */
  undoSeed(): PickedSeed | null {
    const removed = this.seeds.pop() ?? null;
    if (removed) {
      this.seedsConfirmed = false;
      this.division = null;
      this.errorMarker = null;
      this.emit();
    }
    return removed;
  }

  /** Seeds serialised in the fixed label order, however they were edited. */
  seedPayload(): SeedSetPayload {
    if (!this.seedsComplete) {
      throw new Error("nine seeds are required");
    }
    const byLabel = new Map(this.seeds.map((s) => [s.label, s.vertex]));
    return {
      LIPV: byLabel.get("LIPV")!,
      LSPV: byLabel.get("LSPV")!,
      RIPV: byLabel.get("RIPV")!,
      RSPV: byLabel.get("RSPV")!,
      LAA: byLabel.get("LAA")!,
      MV: [byLabel.get("MV1")!, byLabel.get("MV2")!, byLabel.get("MV3")!,
        byLabel.get("MV4")!],
    };
  }

  /** Explicit confirmation is the only thing that posts seeds. */
  async confirmSeeds(): Promise<void> {
    if (!this.meshId) throw new Error("no mesh loaded");
    await this.client.postSeeds(this.meshId, this.seedPayload());
    this.seedsConfirmed = true;
    this.emit();
  }

  async previewDivision(): Promise<DivisionPayload | null> {
    if (!this.meshId) throw new Error("no mesh loaded");
    this.division = null;
    this.errorMarker = null;
    try {
      this.division = await this.client.getDivision(this.meshId);
      this.emit();
      return this.division;
    } catch (err) {
      this.captureError(err);
      return null;
    }
  }

  async flatten(options: { template?: string; w?: number } = {}):
    Promise<FlattenResponse | null> {
    if (!this.meshId) throw new Error("no mesh loaded");
    if (this.flattenPending) return null; // one request in flight at most
    this.flattenPending = true;
    this.errorMarker = null;
    this.emit();
    try {
      const result = await this.client.postFlatten(this.meshId, options);
      this.flat = result; // set only on success
      const names = Object.keys(result.flat.channels);
      if (!names.includes(this.channel)) {
        this.channel = names.length ? names.sort()[0] : "";
      }
      return result;
    } catch (err) {
      this.captureError(err);
      return null;
    } finally {
      this.flattenPending = false;
      this.emit();
    }
  }

  private captureError(err: unknown) {
    if (err instanceof ApiError) {
      this.errorMarker = {
        message: err.message,
        stage: err.stage,
        vertex: err.vertex ?? null,
      };
      this.emit();
      return;
    }
    throw err;
  }

  /** Re-colours both views; never triggers a new request. */
  setChannel(name: string) {
    this.channel = name;
    this.emit();
  }

  /** Overlay another map; only maps from the same template line up. */
  setOverlay(other: FlattenResponse | null, opacity = 0.5): boolean {
    this.overlayError = null;
    if (other === null) {
      this.overlay = null;
      this.emit();
      return true;
    }
    if (!this.flat) {
      this.overlayError = "flatten this mesh first";
      this.emit();
      return false;
    }
    if (other.flat.template_hash !== this.flat.flat.template_hash) {
      this.overlay = null;
      this.overlayError = "overlay disabled: maps use different templates";
      this.emit();
      return false;
    }
    this.overlay = { flat: other, opacity };
    this.emit();
    return true;
  }

  setOverlayOpacity(opacity: number) {
    if (this.overlay) {
      this.overlay.opacity = Math.min(1, Math.max(0, opacity));
      this.emit();
    }
  }
}
