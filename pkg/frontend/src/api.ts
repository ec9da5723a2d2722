// Typed client for the flattening service. All geometry shown anywhere in the
// UI originates from these responses; the UI itself never computes any.

export interface MeshPayload {
  id: string;
  vertices: number[][];
  faces: number[][];
  vertex_ids: number[];
  channels: Record<string, number[]>;
}

export interface DivisionPayload {
  id: string;
  paths: Record<string, number[]>;
  region_label: number[];
  intersection_points: Record<string, number[]>;
  rings: Record<string, number[]>;
  boundary_idx: number[];
  regional_idx: number[];
}

export interface HolePayload {
  center: [number, number];
  radius: number;
  anchor_angles: number[];
  anchor_paths: string[];
  ring_orientation: number;
}

export interface TemplatePayload {
  name: string;
  disk_radius: number;
  holes: Record<string, HolePayload>;
  mv_anchor_angles: number[];
  path_style: Record<string, string>;
}

export interface FlatPayload {
  xy: number[][];
  faces: number[][];
  vertex_ids: number[];
  channels: Record<string, number[]>;
  template_hash: string;
}

export interface SolveReportPayload {
  boundary_dev_before: number;
  boundary_dev_after: number;
  flipped_before: number;
  flipped_after: number;
  wall_ms?: number;
  n_vertices: number;
  n_faces: number;
}

export interface FlattenResponse {
  id: string;
  flat: FlatPayload;
  report: SolveReportPayload;
  template: TemplatePayload;
}

export interface SeedSetPayload {
  LIPV: number;
  LSPV: number;
  RIPV: number;
  RSPV: number;
  LAA: number;
  MV: [number, number, number, number];
}

export class ApiError extends Error {
  status: number;
  stage?: string;
  vertex?: number | null;

  constructor(status: number, message: string, stage?: string, vertex?: number | null) {
    super(message);
    this.status = status;
    this.stage = stage;
    this.vertex = vertex;
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class Client {
  base: string;
  private fetchImpl: FetchLike;

  constructor(base: string, fetchImpl?: FetchLike) {
    this.base = base.replace(/\/$/, "");
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(this.base + path, init);
    const body = await res.json();
    if (!res.ok) {
      throw new ApiError(res.status, body.error ?? res.statusText, body.stage,
        body.vertex);
    }
    return body as T;
  }

  listMeshes(): Promise<{ ids: string[] }> {
    return this.request("/meshes");
  }

  getMesh(id: string): Promise<MeshPayload> {
    return this.request(`/mesh/${id}`);
  }

  getTemplates(): Promise<Record<string, TemplatePayload>> {
    return this.request("/templates");
  }

  postSeeds(id: string, seeds: SeedSetPayload): Promise<{ ok: boolean }> {
    return this.request(`/mesh/${id}/seeds`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(seeds),
    });
  }

  getDivision(id: string): Promise<DivisionPayload> {
    return this.request(`/mesh/${id}/division`);
  }

  postFlatten(id: string, options: { template?: string; w?: number;
    seeds?: SeedSetPayload } = {}): Promise<FlattenResponse> {
    return this.request(`/mesh/${id}/flatten`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(options),
    });
  }
}
