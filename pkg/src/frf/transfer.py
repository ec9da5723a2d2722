"""Moving parcellations and scalar data between flat maps and back to 3D.

All maps built on one template share the disk as a common frame, so transfer
reduces to exact nearest-vertex or barycentric lookups in 2D. Lifting back to
3D copies values by the stable vertex id, never interpolating.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import TransferError
from .flatten import FlatMesh
from .mesh import TriMesh
from .template import TemplateSpec


@dataclass(frozen=True)
class Parcellation2D:
    """Per-vertex integer region codes on a reference flat map."""

    codes: np.ndarray
    legend: dict                  # code -> name
    template_hash: str

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.int64)
        legend = {int(k): str(v) for k, v in self.legend.items()}
        present = set(int(c) for c in np.unique(codes))
        if present - set(legend):
            raise TransferError(f"codes without legend entries: {sorted(present - set(legend))}")
        if min(present, default=0) < 0 or (legend and sorted(legend) != list(range(len(legend)))):
            raise TransferError("codes must be contiguous from 0")
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "legend", legend)

    def to_json(self) -> str:
        return json.dumps({
            "templateHash": self.template_hash,
            "legend": {str(k): v for k, v in sorted(self.legend.items())},
            "codes": self.codes.tolist(),
        }, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Parcellation2D":
        data = json.loads(text)
        return cls(codes=np.asarray(data["codes"], dtype=np.int64),
                   legend={int(k): v for k, v in data["legend"].items()},
                   template_hash=data["templateHash"])


class _GridIndex:
    """Uniform-grid exact nearest-neighbour index over 2D points.

    Ties on distance go to the lowest point id, so lookups are reproducible
    bit for bit.
    """

    def __init__(self, points: np.ndarray):
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        if not len(pts):
            raise TransferError("cannot index an empty point set")
        self.points = pts
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        extent = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
        ncell = max(1, int(math.sqrt(len(pts))))
        self.h = extent / ncell
        self.lo = lo
        self.cells: dict = {}
        cij = np.floor((pts - lo) / self.h).astype(np.int64)
        for idx, (ci, cj) in enumerate(cij):
            self.cells.setdefault((int(ci), int(cj)), []).append(idx)

    def _cell_of(self, q):
        c = np.floor((np.asarray(q) - self.lo) / self.h).astype(np.int64)
        return int(c[0]), int(c[1])

    def nearest(self, q) -> int:
        q = np.asarray(q, dtype=np.float64)
        ci, cj = self._cell_of(q)
        best_d2 = math.inf
        best_id = -1
        r = 0
        while True:
            ring_cells = []
            if r == 0:
                ring_cells.append((ci, cj))
            else:
                for di in range(-r, r + 1):
                    ring_cells.append((ci + di, cj - r))
                    ring_cells.append((ci + di, cj + r))
                for dj in range(-r + 1, r):
                    ring_cells.append((ci - r, cj + dj))
                    ring_cells.append((ci + r, cj + dj))
            for cell in sorted(ring_cells):
                for idx in self.cells.get(cell, ()):
                    d = self.points[idx] - q
                    d2 = float(d[0] * d[0] + d[1] * d[1])
                    if d2 < best_d2 or (d2 == best_d2 and idx < best_id):
                        best_d2 = d2
                        best_id = idx
            # any point in a cell beyond ring r sits at least r*h away; scan
            # until that lower bound strictly beats the best hit so exact ties
            # are never missed
            if best_id >= 0 and (r * self.h) ** 2 > best_d2:
                break
            r += 1
        return best_id


def _require_same_template(a: FlatMesh, b: FlatMesh):
    if a.template_hash is None or b.template_hash is None:
        raise TransferError("flat maps must carry a template hash")
    if a.template_hash != b.template_hash:
        raise TransferError("flat maps use different templates")


def map_parcellation(ref: FlatMesh, parcellation: Parcellation2D,
                     target: FlatMesh) -> np.ndarray:
    """Codes for every target vertex from its nearest reference vertex."""
    if parcellation.template_hash != (ref.template_hash or ""):
        raise TransferError("parcellation was defined on a different template")
    _require_same_template(ref, target)
    if len(parcellation.codes) != ref.n_vertices:
        raise TransferError("parcellation length does not match the reference map")
    index = _GridIndex(ref.xy)
    out = np.empty(target.n_vertices, dtype=np.int64)
    for i, q in enumerate(target.xy):
        out[i] = parcellation.codes[index.nearest(q)]
    return out


def lift_to_3d(flat: FlatMesh, codes, mesh3d: TriMesh) -> np.ndarray:
    """Copy per-vertex codes from the flat map to the 3D mesh by vertex id."""
    codes = np.asarray(codes)
    if len(codes) != flat.n_vertices:
        raise TransferError("code array length does not match the flat map")
    by_id = {int(pid): codes[i] for i, pid in enumerate(flat.vertex_ids)}
    out = np.empty(mesh3d.n_vertices, dtype=codes.dtype)
    for i, pid in enumerate(mesh3d.vertex_ids):
        try:
            out[i] = by_id[int(pid)]
        except KeyError:
            raise TransferError(f"vertex id {int(pid)} missing from the flat map") from None
    return out


class _TriangleLocator:
    """Grid-bucketed point-in-triangle lookup with barycentric output."""

    def __init__(self, flat: FlatMesh):
        self.xy = flat.xy
        self.faces = flat.faces
        lo = self.xy.min(axis=0)
        hi = self.xy.max(axis=0)
        extent = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
        ncell = max(1, int(math.sqrt(max(len(self.faces), 1))))
        self.h = extent / ncell
        self.lo = lo
        self.buckets: dict = {}
        for fi, tri in enumerate(self.faces):
            pts = self.xy[tri]
            cmin = np.floor((pts.min(axis=0) - lo) / self.h).astype(int)
            cmax = np.floor((pts.max(axis=0) - lo) / self.h).astype(int)
            for ci in range(cmin[0], cmax[0] + 1):
                for cj in range(cmin[1], cmax[1] + 1):
                    self.buckets.setdefault((ci, cj), []).append(fi)

    def locate(self, q, tol: float = 1e-12):
        c = np.floor((np.asarray(q) - self.lo) / self.h).astype(int)
        for fi in sorted(self.buckets.get((int(c[0]), int(c[1])), ())):
            tri = self.faces[fi]
            bary = _barycentric(self.xy[tri], q)
            if bary is not None and (bary >= -tol).all():
                return fi, bary
        return None, None


def _barycentric(tri_xy: np.ndarray, q) -> np.ndarray | None:
    a, b, c = tri_xy
    m = np.array([[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]])
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if det == 0:
        return None
    rhs = np.asarray(q) - a
    l1 = (m[1, 1] * rhs[0] - m[0, 1] * rhs[1]) / det
    l2 = (-m[1, 0] * rhs[0] + m[0, 0] * rhs[1]) / det
    return np.array([1.0 - l1 - l2, l1, l2])


def compare_maps(a: FlatMesh, channel_a: str, b: FlatMesh, channel_b: str):
    """Paired samples (value on a, interpolated value of b) for every a vertex.

    b's channel is sampled at a's vertex positions with barycentric weights in
    the containing triangle, or from the nearest b vertex outside the covered
    region. Returns an (N, 2) array ordered like a's vertices.
    """
    _require_same_template(a, b)
    try:
        va = a.channels[channel_a]
        vb = b.channels[channel_b]
    except KeyError as exc:
        raise TransferError(f"missing channel {exc}") from None
    locator = _TriangleLocator(b)
    nn = _GridIndex(b.xy)
    out = np.empty((a.n_vertices, 2))
    vb = np.asarray(vb)
    for i, q in enumerate(a.xy):
        fi, bary = locator.locate(q)
        if fi is None:
            out[i, 1] = vb[nn.nearest(q)]
        else:
            tri = b.faces[fi]
            out[i, 1] = float(bary @ vb[tri])
        out[i, 0] = va[i]
    return out


def write_pairs_csv(path, pairs: np.ndarray, vertex_ids=None) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["vertexId", "valueA", "valueB"])
        for i, (x, y) in enumerate(pairs):
            vid = i if vertex_ids is None else int(vertex_ids[i])
            writer.writerow([vid, repr(float(x)), repr(float(y))])


def annulus_parcellation(flat: FlatMesh, template: TemplateSpec,
                         width_factor: float = 1.5,
                         ipsilateral_pairs: bool = False) -> Parcellation2D:
    """Ring-shaped search regions around the vein circles on a reference map.

    Vertices within width_factor * radius of a vein circle get that vein's
    code (nearest circle wins, scaled by radius); with ipsilateral_pairs the
    two veins of each side share one code. Background is 0.
    """
    if flat.template_hash != template.spec_hash:
        raise TransferError("flat map was built with a different template")
    pv = ("LIPV", "LSPV", "RIPV", "RSPV")
    if ipsilateral_pairs:
        groups = {"left_veins": ("LIPV", "LSPV"), "right_veins": ("RIPV", "RSPV")}
    else:
        groups = {label: (label,) for label in pv}
    names = sorted(groups)
    legend = {0: "background"}
    for k, name in enumerate(names, start=1):
        legend[k] = name

    codes = np.zeros(flat.n_vertices, dtype=np.int64)
    score = np.full(flat.n_vertices, np.inf)
    for k, name in enumerate(names, start=1):
        for label in groups[name]:
            hole = template.holes[label]
            d = np.linalg.norm(flat.xy - np.asarray(hole.center), axis=1)
            rel = (d - hole.radius) / hole.radius
            inside = rel <= width_factor
            better = inside & (rel < score)
            codes[better] = k
            score[better] = rel[better]
    return Parcellation2D(codes=codes, legend=legend,
                          template_hash=template.spec_hash)
