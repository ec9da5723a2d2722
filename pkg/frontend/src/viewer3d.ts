// Three.js panel: renders the loaded mesh, snaps clicks to the nearest vertex
// for seed picking, and overlays the division preview (paths, region tints,
// seed and error markers). All data comes straight from service payloads.

import * as THREE from "three";
import { DivisionPayload, MeshPayload } from "./api.js";
import { colormap, normaliseChannel, REGION_COLORS } from "./colormap.js";
import { PickedSeed } from "./session.js";

export interface PickHit {
  vertex: number;
}

export class Viewer3D {
  private renderer: THREE.WebGLRenderer;
  private scene = new THREE.Scene();
  private camera: THREE.PerspectiveCamera;
  private raycaster = new THREE.Raycaster();
  private meshObject: THREE.Mesh | null = null;
  private overlayGroup = new THREE.Group();
  private payload: MeshPayload | null = null;
  private dragging = false;
  private lastPointer = new THREE.Vector2();
  private orbit = { theta: 0.7, phi: 1.1, radius: 3 };
  private center = new THREE.Vector3();
  private sceneScale = 1;

  constructor(private canvas: HTMLCanvasElement) {
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.camera = new THREE.PerspectiveCamera(45, 1, 0.01, 100);
    this.scene.background = new THREE.Color(0x10141a);
    const light = new THREE.DirectionalLight(0xffffff, 2.2);
    light.position.set(1, 1, 2);
    this.scene.add(light);
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.7));
    this.scene.add(this.overlayGroup);
    this.bindOrbit();
    this.animate();
  }

  private bindOrbit() {
    this.canvas.addEventListener("pointerdown", (e) => {
      this.dragging = true;
      this.lastPointer.set(e.clientX, e.clientY);
    });
    window.addEventListener("pointerup", () => (this.dragging = false));
    window.addEventListener("pointermove", (e) => {
      if (!this.dragging) return;
      const dx = e.clientX - this.lastPointer.x;
      const dy = e.clientY - this.lastPointer.y;
      this.lastPointer.set(e.clientX, e.clientY);
      this.orbit.theta -= dx * 0.005;
      this.orbit.phi = Math.min(Math.PI - 0.05,
        Math.max(0.05, this.orbit.phi - dy * 0.005));
    });
    this.canvas.addEventListener("wheel", (e) => {
      e.preventDefault();
      this.orbit.radius *= Math.exp(e.deltaY * 0.001);
    }, { passive: false });
  }

  private animate = () => {
    requestAnimationFrame(this.animate);
    const { theta, phi, radius } = this.orbit;
    this.camera.position.set(
      this.center.x + radius * this.sceneScale * Math.sin(phi) * Math.cos(theta),
      this.center.y + radius * this.sceneScale * Math.sin(phi) * Math.sin(theta),
      this.center.z + radius * this.sceneScale * Math.cos(phi),
    );
    this.camera.lookAt(this.center);
    const w = this.canvas.clientWidth || 600;
    const h = this.canvas.clientHeight || 500;
    this.renderer.setSize(w, h, false);
    this.camera.aspect = w / h;
    this.camera.updateProjectionMatrix();
    this.renderer.render(this.scene, this.camera);
  };

  setMesh(payload: MeshPayload) {
    this.payload = payload;
    if (this.meshObject) this.scene.remove(this.meshObject);
    const geom = new THREE.BufferGeometry();
    const pos = new Float32Array(payload.vertices.flat());
    geom.setAttribute("position", new THREE.BufferAttribute(pos, 3));
    geom.setIndex(payload.faces.flat());
    geom.computeVertexNormals();
    const colors = new Float32Array(payload.vertices.length * 3).fill(0.75);
    geom.setAttribute("color", new THREE.BufferAttribute(colors, 3));
    const mat = new THREE.MeshLambertMaterial({
      vertexColors: true, side: THREE.DoubleSide,
    });
    this.meshObject = new THREE.Mesh(geom, mat);
    this.scene.add(this.meshObject);
    geom.computeBoundingSphere();
    const sphere = geom.boundingSphere!;
    this.center.copy(sphere.center);
    this.sceneScale = sphere.radius;
    this.clearOverlay();
  }

  colourByChannel(name: string) {
    if (!this.meshObject || !this.payload) return;
    const values = this.payload.channels[name];
    const attr = this.meshObject.geometry.getAttribute("color") as THREE.BufferAttribute;
    if (!values) {
      (attr.array as Float32Array).fill(0.75);
    } else {
      const t = normaliseChannel(values);
      for (let i = 0; i < t.length; i++) {
        const [r, g, b] = colormap(t[i]);
        attr.setXYZ(i, r, g, b);
      }
    }
    attr.needsUpdate = true;
  }

  /** Snap a pointer event to the nearest vertex of the face under it. */
  pick(event: PointerEvent): PickHit | null {
    if (!this.meshObject || !this.payload) return null;
    const rect = this.canvas.getBoundingClientRect();
    const ndc = new THREE.Vector2(
      ((event.clientX - rect.left) / rect.width) * 2 - 1,
      -((event.clientY - rect.top) / rect.height) * 2 + 1,
    );
    this.raycaster.setFromCamera(ndc, this.camera);
    const hits = this.raycaster.intersectObject(this.meshObject);
    if (!hits.length || hits[0].faceIndex == null) return null;
    const tri = this.payload.faces[hits[0].faceIndex];
    const p = hits[0].point;
    let best = tri[0];
    let bestD = Infinity;
    for (const v of tri) {
      const [x, y, z] = this.payload.vertices[v];
      const d = p.distanceToSquared(new THREE.Vector3(x, y, z));
      if (d < bestD) {
        bestD = d;
        best = v;
      }
    }
    return { vertex: best };
  }

  clearOverlay() {
    this.overlayGroup.clear();
  }

  showSeeds(seeds: PickedSeed[]) {
    if (!this.payload) return;
    const markerScale = this.sceneScale * 0.02;
    for (const seed of seeds) {
      const [x, y, z] = this.payload.vertices[seed.vertex];
      const marker = new THREE.Mesh(
        new THREE.SphereGeometry(markerScale, 12, 12),
        new THREE.MeshBasicMaterial({
          color: seed.label.startsWith("MV") ? 0xffd447 : 0x4fd2ff,
        }),
      );
      marker.position.set(x, y, z);
      this.overlayGroup.add(marker);
    }
  }

  showErrorMarker(vertex: number | null) {
    if (vertex == null || !this.payload) return;
    const [x, y, z] = this.payload.vertices[vertex];
    const marker = new THREE.Mesh(
      new THREE.SphereGeometry(this.sceneScale * 0.035, 12, 12),
      new THREE.MeshBasicMaterial({ color: 0xff2d4f }),
    );
    marker.position.set(x, y, z);
    this.overlayGroup.add(marker);
  }

  showDivision(division: DivisionPayload) {
    if (!this.payload || !this.meshObject) return;
    for (const chain of Object.values(division.paths)) {
      const pts = chain.map((v) => {
        const [x, y, z] = this.payload!.vertices[v];
        return new THREE.Vector3(x, y, z);
      });
      const geom = new THREE.BufferGeometry().setFromPoints(pts);
      const line = new THREE.Line(geom,
        new THREE.LineBasicMaterial({ color: 0xffe94a }));
      this.overlayGroup.add(line);
    }
    // region tints: average region colour into the vertex colours
    const attr = this.meshObject.geometry.getAttribute("color") as THREE.BufferAttribute;
    const faces = this.payload.faces;
    for (let fi = 0; fi < faces.length; fi++) {
      const region = division.region_label[fi];
      const tint = REGION_COLORS[region];
      if (!tint) continue;
      for (const v of faces[fi]) {
        attr.setXYZ(v,
          0.45 * attr.getX(v) + 0.55 * tint[0],
          0.45 * attr.getY(v) + 0.55 * tint[1],
          0.45 * attr.getZ(v) + 0.55 * tint[2]);
      }
    }
    attr.needsUpdate = true;
  }
}
