"""Local HTTP service behind the browser UI.

Stateless apart from the mesh registry: every response is derived from the
loaded meshes plus the request, and carries a sha256 content hash so identical
requests are verifiably identical. Flatten jobs are serialised per mesh id.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.staticfiles import StaticFiles

from .division import SeedSet, divide, project_and_open
from .errors import DivisionError, FrfError, StageError
from .flatten import DEFAULT_W, flatten_pipeline, label_boundary_loops
from .mesh import TriMesh, close_hole, load_mesh
from .template import PRESETS, build_template

MESH_SUFFIXES = (".vtk", ".obj")


class MeshRegistry:
    """Meshes by id (file stem), with per-id locks and stored seeds."""

    def __init__(self, mesh_dir: Path):
        self._lock = threading.Lock()
        self._entries: dict = {}
        for path in sorted(mesh_dir.iterdir()) if mesh_dir.exists() else []:
            if path.suffix.lower() in MESH_SUFFIXES:
                mesh = load_mesh(path)
                self._entries[path.stem] = {
                    "mesh": mesh,
                    "seeds": None,
                    "lock": threading.Lock(),
                }

    def ids(self):
        with self._lock:
            return sorted(self._entries)

    def get(self, mesh_id: str):
        with self._lock:
            return self._entries.get(mesh_id)


VOLATILE_KEYS = ("wall_ms",)


def _canonical(payload) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def _strip_volatile(payload):
    if isinstance(payload, dict):
        return {k: _strip_volatile(v) for k, v in payload.items()
                if k not in VOLATILE_KEYS}
    if isinstance(payload, list):
        return [_strip_volatile(v) for v in payload]
    return payload


def _hashed_json(payload, status: int = 200) -> Response:
    # timings stay in the body but are excluded from the content hash, so
    # identical requests produce identical hashes
    digest = hashlib.sha256(_canonical(_strip_volatile(payload))).hexdigest()
    return Response(content=_canonical(payload), status_code=status,
                    media_type="application/json",
                    headers={"X-Content-Hash": digest})


def _error(status: int, message: str, **extra) -> Response:
    return _hashed_json({"error": message, **extra}, status=status)


def _mesh_payload(mesh: TriMesh) -> dict:
    return {
        "vertices": mesh.vertices.tolist(),
        "faces": mesh.faces.tolist(),
        "vertex_ids": mesh.vertex_ids.tolist(),
        "channels": {k: v.tolist() for k, v in sorted(mesh.channels.items())},
    }


def _parse_seeds(body: dict) -> SeedSet:
    return SeedSet.from_json(json.dumps(body))


def create_app(mesh_dir: Path, static_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="frf", docs_url=None, redoc_url=None)
    registry = MeshRegistry(mesh_dir)

    @app.get("/templates")
    def templates():
        payload = {name: json.loads(build_template(name).to_json())
                   for name in sorted(PRESETS)}
        return _hashed_json(payload)

    @app.get("/meshes")
    def meshes():
        return _hashed_json({"ids": registry.ids()})

    @app.get("/mesh/{mesh_id}")
    def get_mesh(mesh_id: str):
        entry = registry.get(mesh_id)
        if entry is None:
            return _error(404, f"unknown mesh id {mesh_id!r}")
        return _hashed_json({"id": mesh_id, **_mesh_payload(entry["mesh"])})

    @app.post("/mesh/{mesh_id}/seeds")
    async def post_seeds(mesh_id: str, request: Request):
        entry = registry.get(mesh_id)
        if entry is None:
            return _error(404, f"unknown mesh id {mesh_id!r}")
        body = await request.json()
        try:
            seeds = _parse_seeds(body)
            n = entry["mesh"].n_vertices
            for v in list(seeds.holes.values()) + list(seeds.mv):
                if not 0 <= v < n:
                    raise DivisionError(f"seed vertex {v} out of range")
        except (FrfError, KeyError, TypeError, ValueError) as exc:
            return _error(422, f"invalid seeds: {exc}")
        entry["seeds"] = seeds
        return _hashed_json({"ok": True, "id": mesh_id})

    @app.get("/mesh/{mesh_id}/division")
    def get_division(mesh_id: str):
        entry = registry.get(mesh_id)
        if entry is None:
            return _error(404, f"unknown mesh id {mesh_id!r}")
        if entry["seeds"] is None:
            return _error(422, "no seeds posted for this mesh")
        mesh = entry["mesh"]
        seeds = entry["seeds"]
        try:
            labelled = label_boundary_loops(mesh, seeds)
            closed = mesh
            for label in ("LIPV", "LSPV", "RIPV", "RSPV", "LAA"):
                closed = close_hole(closed, labelled[label])
            division = divide(closed, seeds)
            projection = project_and_open(closed, division, seeds)
        except DivisionError as exc:
            return _error(422, str(exc), stage="divide",
                          vertex=getattr(exc, "vertex", None))
        except FrfError as exc:
            return _error(422, str(exc), stage="divide")
        keep = [fi for fi in range(closed.n_faces)
                if fi not in set(closed.cover_faces)]
        rings = {k: list(v) for k, v in sorted(division.rings.items())}
        rings["MV"] = list(projection.mv_ring)
        return _hashed_json({
            "id": mesh_id,
            "paths": {k: list(v) for k, v in sorted(division.paths.items())},
            "region_label": division.region_label[keep].tolist(),
            "intersection_points": {k: list(v) for k, v in
                                    sorted(division.intersection_points.items())},
            "rings": rings,
            "boundary_idx": projection.boundary_idx.tolist(),
            "regional_idx": projection.regional_idx.tolist(),
        })

    @app.post("/mesh/{mesh_id}/flatten")
    async def post_flatten(mesh_id: str, request: Request):
        entry = registry.get(mesh_id)
        if entry is None:
            return _error(404, f"unknown mesh id {mesh_id!r}")
        body = await request.json() if (await request.body()) else {}
        seeds = entry["seeds"]
        if "seeds" in body:
            try:
                seeds = _parse_seeds(body["seeds"])
            except (FrfError, KeyError, TypeError, ValueError) as exc:
                return _error(422, f"invalid seeds: {exc}")
        if seeds is None:
            return _error(422, "no seeds posted for this mesh")
        template_name = body.get("template", "population")
        w = float(body.get("w", DEFAULT_W))
        if w <= 0:
            return _error(422, "w must be positive")
        weight_mode = body.get("weight_mode", "boundary-rows")
        try:
            template = build_template(template_name)
        except FrfError as exc:
            return _error(422, str(exc))
        with entry["lock"]:
            try:
                flat, report = flatten_pipeline(entry["mesh"], seeds, template,
                                                w=w, weight_mode=weight_mode)
            except StageError as exc:
                return _error(422, str(exc.cause), stage=exc.stage,
                              vertex=getattr(exc.cause, "vertex", None))
        return _hashed_json({
            "id": mesh_id,
            "flat": {
                "xy": flat.xy.tolist(),
                "faces": flat.faces.tolist(),
                "vertex_ids": flat.vertex_ids.tolist(),
                "channels": {k: np.asarray(v).tolist()
                             for k, v in sorted(flat.channels.items())},
                "template_hash": flat.template_hash,
            },
            "report": report.to_dict(),
            "template": json.loads(template.to_json()),
        })

    if static_dir is not None and static_dir.exists():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="static")
    return app
