// 2D canvas panel: the flattened disk with hole circles, path curves, channel
// colouring, hover readout, and an optional second map blended on top.

import { DivisionPayload, FlattenResponse } from "./api.js";
import { colormap, normaliseChannel } from "./colormap.js";

export interface HoverInfo {
  vertex: number;
  vertexId: number;
  values: Record<string, number>;
}

export class DiskView {
  private ctx: CanvasRenderingContext2D;
  result: FlattenResponse | null = null;
  overlay: FlattenResponse | null = null;
  overlayOpacity = 0.5;
  channel = "";
  division: DivisionPayload | null = null;
  onHover: ((info: HoverInfo | null) => void) | null = null;

  constructor(private canvas: HTMLCanvasElement) {
    this.ctx = canvas.getContext("2d")!;
    canvas.addEventListener("pointermove", (e) => this.hover(e));
    canvas.addEventListener("pointerleave", () => this.onHover?.(null));
  }

  private toPixel(x: number, y: number, radius: number): [number, number] {
    const s = Math.min(this.canvas.width, this.canvas.height) / (2.3 * radius);
    return [this.canvas.width / 2 + x * s, this.canvas.height / 2 - y * s];
  }

  private fromPixel(px: number, py: number, radius: number): [number, number] {
    const s = Math.min(this.canvas.width, this.canvas.height) / (2.3 * radius);
    return [(px - this.canvas.width / 2) / s, -(py - this.canvas.height / 2) / s];
  }

  private hover(e: PointerEvent) {
    if (!this.result || !this.onHover) return;
    const rect = this.canvas.getBoundingClientRect();
    const R = this.result.template.disk_radius;
    const [qx, qy] = this.fromPixel(
      (e.clientX - rect.left) * (this.canvas.width / rect.width),
      (e.clientY - rect.top) * (this.canvas.height / rect.height), R);
    const xy = this.result.flat.xy;
    let best = -1;
    let bestD = Infinity;
    for (let i = 0; i < xy.length; i++) {
      const d = (xy[i][0] - qx) ** 2 + (xy[i][1] - qy) ** 2;
      if (d < bestD) {
        bestD = d;
        best = i;
      }
    }
    if (best < 0 || bestD > (0.05 * R) ** 2) {
      this.onHover(null);
      return;
    }
    const values: Record<string, number> = {};
    for (const [name, arr] of Object.entries(this.result.flat.channels)) {
      values[name] = arr[best];
    }
    this.onHover({
      vertex: best,
      vertexId: this.result.flat.vertex_ids[best],
      values,
    });
  }

  private paintMap(result: FlattenResponse, alpha: number) {
    const { xy, faces, channels } = result.flat;
    const R = result.template.disk_radius;
    const values = channels[this.channel];
    const t = values ? normaliseChannel(values) : null;
    const ctx = this.ctx;
    ctx.globalAlpha = alpha;
    for (const tri of faces) {
      const [a, b, c] = tri;
      let fill = "rgb(185, 189, 196)";
      if (t) {
        const avg = (t[a] + t[b] + t[c]) / 3;
        const [r, g, bb] = colormap(avg);
        fill = `rgb(${Math.round(r * 255)}, ${Math.round(g * 255)}, ${Math.round(bb * 255)})`;
      }
      ctx.fillStyle = fill;
      ctx.beginPath();
      ctx.moveTo(...this.toPixel(xy[a][0], xy[a][1], R));
      ctx.lineTo(...this.toPixel(xy[b][0], xy[b][1], R));
      ctx.lineTo(...this.toPixel(xy[c][0], xy[c][1], R));
      ctx.closePath();
      ctx.fill();
    }
    ctx.globalAlpha = 1;
  }

  render() {
    const ctx = this.ctx;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    if (!this.result) return;
    const R = this.result.template.disk_radius;
    this.paintMap(this.result, 1.0);
    if (this.overlay) {
      this.paintMap(this.overlay, this.overlayOpacity);
    }
    // rim and target circles straight from the template payload
    ctx.strokeStyle = "#e8ecf2";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    const [cx, cy] = this.toPixel(0, 0, R);
    const [rx] = this.toPixel(R, 0, R);
    ctx.arc(cx, cy, rx - cx, 0, 2 * Math.PI);
    ctx.stroke();
    for (const hole of Object.values(this.result.template.holes)) {
      const [hx, hy] = this.toPixel(hole.center[0], hole.center[1], R);
      const [ex] = this.toPixel(hole.center[0] + hole.radius, hole.center[1], R);
      ctx.beginPath();
      ctx.arc(hx, hy, ex - hx, 0, 2 * Math.PI);
      ctx.stroke();
    }
    // region boundaries: the dividing paths drawn through the flat coordinates
    if (this.division) {
      ctx.strokeStyle = "#ffe94a";
      ctx.lineWidth = 1.2;
      const xy = this.result.flat.xy;
      for (const chain of Object.values(this.division.paths)) {
        ctx.beginPath();
        let started = false;
        for (const v of chain) {
          if (v >= xy.length) continue;
          const [px, py] = this.toPixel(xy[v][0], xy[v][1], R);
          if (!started) {
            ctx.moveTo(px, py);
            started = true;
          } else {
            ctx.lineTo(px, py);
          }
        }
        ctx.stroke();
      }
    }
  }
}
