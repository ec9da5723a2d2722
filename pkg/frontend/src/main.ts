// Application wiring: one session, a 3D picking panel, and the 2D disk panel.

import { Client } from "./api.js";
import { DiskView } from "./diskview.js";
import { SEED_ORDER, Session } from "./session.js";
import { Viewer3D } from "./viewer3d.js";

const client = new Client("");
const session = new Session(client);

const canvas3d = document.getElementById("view3d") as HTMLCanvasElement;
const canvas2d = document.getElementById("view2d") as HTMLCanvasElement;
const meshSelect = document.getElementById("mesh-select") as HTMLSelectElement;
const channelSelect = document.getElementById("channel-select") as HTMLSelectElement;
const templateSelect = document.getElementById("template-select") as HTMLSelectElement;
const statusLine = document.getElementById("status") as HTMLElement;
const hoverLine = document.getElementById("hover") as HTMLElement;
const seedList = document.getElementById("seed-list") as HTMLElement;
const undoButton = document.getElementById("undo") as HTMLButtonElement;
const confirmButton = document.getElementById("confirm") as HTMLButtonElement;
const previewButton = document.getElementById("preview") as HTMLButtonElement;
const flattenButton = document.getElementById("flatten") as HTMLButtonElement;
const opacityInput = document.getElementById("overlay-opacity") as HTMLInputElement;

const viewer = new Viewer3D(canvas3d);
const disk = new DiskView(canvas2d);

disk.onHover = (info) => {
  if (!info) {
    hoverLine.textContent = "";
    return;
  }
  const values = Object.entries(info.values)
    .map(([k, v]) => `${k}=${v.toFixed(4)}`)
    .join("  ");
  hoverLine.textContent = `vertex id ${info.vertexId}  ${values}`;
};

function setStatus(text: string, isError = false) {
  statusLine.textContent = text;
  statusLine.className = isError ? "error" : "";
}

function redraw() {
  viewer.clearOverlay();
  if (session.mesh) {
    viewer.colourByChannel(session.channel);
    if (session.division) viewer.showDivision(session.division);
    viewer.showSeeds(session.seeds);
    if (session.errorMarker) viewer.showErrorMarker(session.errorMarker.vertex);
  }
  seedList.textContent = session.seeds
    .map((s) => `${s.label}:${s.vertex}`)
    .join("  ");
  const next = session.nextLabel;
  confirmButton.disabled = !session.seedsComplete;
  previewButton.disabled = !session.seedsConfirmed;
  flattenButton.disabled = !session.seedsConfirmed || session.flattenPending;
  flattenButton.textContent = session.flattenPending ? "flattening..." : "Flatten";
  if (session.errorMarker) {
    const v = session.errorMarker.vertex;
    setStatus(`${session.errorMarker.message}${v != null ? ` (vertex ${v})` : ""}`,
      true);
  } else if (next) {
    setStatus(`pick ${next}`);
  } else if (!session.seedsConfirmed) {
    setStatus("nine seeds placed; confirm to send");
  }
  if (session.flat) {
    disk.result = session.flat;
    disk.channel = session.channel;
    disk.division = session.division;
    disk.overlay = session.overlay?.flat ?? null;
    disk.overlayOpacity = session.overlay?.opacity ?? 0.5;
    disk.render();
  }
}

session.subscribe(redraw);

canvas3d.addEventListener("pointerdown", (event) => {
  if (event.button !== 0 || event.shiftKey) return;
  const hit = viewer.pick(event);
  if (!hit) return; // background click: ignored
  const { warning } = session.pickSeed(hit.vertex);
  if (warning) setStatus(warning, true);
});

undoButton.addEventListener("click", () => session.undoSeed());

confirmButton.addEventListener("click", async () => {
  try {
    await session.confirmSeeds();
    setStatus("seeds confirmed");
  } catch (err) {
    setStatus(String(err), true);
  }
});

previewButton.addEventListener("click", async () => {
  const division = await session.previewDivision();
  if (division) setStatus("division ready: 9 paths, 5 regions");
});

flattenButton.addEventListener("click", async () => {
  const result = await session.flatten({ template: templateSelect.value });
  if (result) {
    setStatus(`flattened: boundary deviation ` +
      `${result.report.boundary_dev_after.toExponential(2)}, ` +
      `${result.report.flipped_after} flipped faces`);
    if (!session.division) await session.previewDivision();
  }
});

channelSelect.addEventListener("change", () => {
  session.setChannel(channelSelect.value);
});

meshSelect.addEventListener("change", async () => {
  await session.loadMesh(meshSelect.value);
  viewer.setMesh(session.mesh!);
  channelSelect.replaceChildren(...Object.keys(session.mesh!.channels).sort()
    .map((name) => new Option(name, name)));
  redraw();
});

opacityInput.addEventListener("input", () => {
  session.setOverlayOpacity(Number(opacityInput.value));
});

async function boot() {
  const [meshes, templates] = await Promise.all([
    client.listMeshes(), client.getTemplates(),
  ]);
  templateSelect.replaceChildren(...Object.keys(templates).sort()
    .map((name) => new Option(name, name, name === "population",
      name === "population")));
  meshSelect.replaceChildren(...meshes.ids.map((id) => new Option(id, id)));
  if (meshes.ids.length) {
    meshSelect.value = meshes.ids[0];
    meshSelect.dispatchEvent(new Event("change"));
  } else {
    setStatus("no meshes in the registry; start frf serve with --mesh-dir");
  }
}

boot().catch((err) => setStatus(String(err), true));
