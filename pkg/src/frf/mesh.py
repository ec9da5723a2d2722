"""Triangle mesh core: construction, IO, boundary topology, hole covers, Laplacians.

Meshes are immutable after construction. Vertices are 3D (a flat mesh is stored
with z = 0), faces are index triples, and named per-vertex scalar channels ride
along with the geometry. Every vertex carries a stable integer id that survives
all pipeline steps, which is what makes lossless 3D<->2D data transfer possible.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import MeshError

logger = logging.getLogger(__name__)

MIN_FACE_AREA = 1e-12
COT_CLAMP = 1e6

# reserved channel name used to persist vertex ids in mesh files
_ID_CHANNEL = "_vertex_id"


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TriMesh:
    """Indexed triangle surface with named per-vertex scalar channels.

    Attributes:
        vertices: (N, 3) float64 positions in mm.
        faces: (M, 3) int64 vertex indices, consistently oriented.
        channels: name -> (N,) float64 per-vertex scalars.
        vertex_ids: (N,) int64 stable provenance ids.
        cover_faces: indices of faces added by close_hole, slated for removal.
    """

    vertices: np.ndarray
    faces: np.ndarray
    channels: dict = field(default_factory=dict)
    vertex_ids: np.ndarray | None = None
    cover_faces: tuple = ()

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        f = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if not np.isfinite(v).all():
            raise MeshError("non-finite vertex coordinates")
        n = len(v)
        if f.size and (f.min() < 0 or f.max() >= n):
            raise MeshError(f"face index out of range (N={n})")
        dup = (f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 2] == f[:, 0])
        if dup.any():
            bad = np.nonzero(dup)[0][:10].tolist()
            raise MeshError(f"faces with repeated vertex index: {bad}")
        if f.size:
            areas = _face_areas(v, f)
            small = areas <= MIN_FACE_AREA
            if small.any():
                bad = np.nonzero(small)[0][:10].tolist()
                raise MeshError(f"degenerate faces (area <= {MIN_FACE_AREA}): {bad}")
            bad_edges = _nonmanifold_edges(f)
            if bad_edges:
                raise MeshError(
                    f"non-manifold edges (shared by >2 faces): {bad_edges[:20]}"
                )
        ids = self.vertex_ids
        if ids is None:
            ids = np.arange(n, dtype=np.int64)
        else:
            ids = np.asarray(ids, dtype=np.int64).reshape(-1)
            if len(ids) != n:
                raise MeshError("vertex_ids length must equal vertex count")
        chans = {}
        for name, values in dict(self.channels).items():
            arr = np.asarray(values, dtype=np.float64).reshape(-1)
            if len(arr) != n:
                raise MeshError(f"channel {name!r} has length {len(arr)}, expected {n}")
            chans[name] = _readonly(arr)
        object.__setattr__(self, "vertices", _readonly(v))
        object.__setattr__(self, "faces", _readonly(f))
        object.__setattr__(self, "vertex_ids", _readonly(ids))
        object.__setattr__(self, "channels", chans)
        object.__setattr__(self, "cover_faces", tuple(int(i) for i in self.cover_faces))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def face_areas(self) -> np.ndarray:
        return _face_areas(self.vertices, self.faces)

    def with_channel(self, name: str, values) -> "TriMesh":
        chans = dict(self.channels)
        chans[name] = np.asarray(values, dtype=np.float64)
        return replace(self, channels=chans)

    def edge_lengths(self):
        """Unique undirected edges (E, 2) and their Euclidean lengths (E,)."""
        e = np.sort(_directed_edges(self.faces), axis=1)
        e = np.unique(e, axis=0)
        d = self.vertices[e[:, 0]] - self.vertices[e[:, 1]]
        return e, np.linalg.norm(d, axis=1)


@dataclass(frozen=True)
class BoundaryLoop:
    """Ordered ring of boundary vertices, oriented with the face orientation."""

    ring: tuple
    label: str | None = None

    def __len__(self):
        return len(self.ring)


@dataclass(frozen=True)
class SparseLaplacian:
    """Sparse cotangent Laplacian; identity_rows lists rows replaced by [0..1..0]."""

    matrix: sparse.csr_matrix
    identity_rows: frozenset = frozenset()


def _face_areas(v: np.ndarray, f: np.ndarray) -> np.ndarray:
    p0, p1, p2 = v[f[:, 0]], v[f[:, 1]], v[f[:, 2]]
    return 0.5 * np.linalg.norm(np.cross(p1 - p0, p2 - p0), axis=1)


def _directed_edges(f: np.ndarray) -> np.ndarray:
    return np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]], axis=0)


def _nonmanifold_edges(f: np.ndarray) -> list:
    und = np.sort(_directed_edges(f), axis=1)
    uniq, counts = np.unique(und, axis=0, return_counts=True)
    bad = uniq[counts > 2]
    return [tuple(int(x) for x in e) for e in bad]


def _check_oriented(f: np.ndarray):
    de = _directed_edges(f)
    uniq, counts = np.unique(de, axis=0, return_counts=True)
    if (counts > 1).any():
        bad = uniq[counts > 1][:10]
        raise MeshError(
            "inconsistently oriented faces (directed edge repeated): "
            f"{[tuple(int(x) for x in e) for e in bad]}; run orient_consistently first"
        )


def _raw_directions(tri):
    a, b, c = (int(x) for x in tri)
    return {(a, b), (b, c), (c, a)}


def orient_consistently(mesh: TriMesh):
    """Flip faces so each connected component has a single consistent orientation.

    Majority orientation per component wins. Returns (mesh, flip_count).
    """
    f = np.array(mesh.faces)
    m = len(f)
    edge_faces: dict = {}
    for fi in range(m):
        a, b, c = (int(x) for x in f[fi])
        for u, w in ((a, b), (b, c), (c, a)):
            key = (u, w) if u < w else (w, u)
            edge_faces.setdefault(key, []).append(fi)

    visited = np.zeros(m, dtype=bool)
    flipped = np.zeros(m, dtype=bool)
    total_flips = 0
    for seed in range(m):
        if visited[seed]:
            continue
        comp = [seed]
        visited[seed] = True
        stack = [seed]
        while stack:
            fi = stack.pop()
            raw_i = _raw_directions(f[fi])
            cur_i = {(w, u) for (u, w) in raw_i} if flipped[fi] else raw_i
            a, b, c = (int(x) for x in f[fi])
            for u, w in ((a, b), (b, c), (c, a)):
                key = (u, w) if u < w else (w, u)
                for fj in edge_faces[key]:
                    if fj == fi or visited[fj]:
                        continue
                    # fj must run the shared edge opposite to fi's current direction
                    d_i = (u, w) if (u, w) in cur_i else (w, u)
                    flipped[fj] = d_i in _raw_directions(f[fj])
                    visited[fj] = True
                    comp.append(fj)
                    stack.append(fj)
        n_flip = int(flipped[comp].sum())
        if n_flip * 2 > len(comp):
            flipped[comp] = ~flipped[comp]
            n_flip = len(comp) - n_flip
        total_flips += n_flip
    if total_flips:
        idx = np.nonzero(flipped)[0]
        f[idx] = f[idx][:, ::-1]
        logger.info("orientation repair flipped %d faces", total_flips)
        mesh = replace(mesh, faces=f)
    return mesh, total_flips


def boundary_loops(mesh: TriMesh) -> list:
    """Extract boundary loops as vertex rings consistent with face orientation.

    A boundary edge belongs to exactly one face; the loop follows the direction
    in which the edge appears in that face. Loops are rotated to start at their
    smallest vertex id and returned sorted by that id, so output is canonical.
    """
    f = mesh.faces
    if not len(f):
        return []
    _check_oriented(f)
    de = _directed_edges(f)
    keys = de[:, 0] * mesh.n_vertices + de[:, 1]
    rev_keys = de[:, 1] * mesh.n_vertices + de[:, 0]
    boundary = ~np.isin(keys, rev_keys)
    bedges = de[boundary]
    if not len(bedges):
        return []
    nxt: dict = {}
    for u, w in bedges:
        u, w = int(u), int(w)
        if u in nxt:
            raise MeshError(f"non-manifold boundary vertex {u}")
        nxt[u] = w
    loops = []
    seen = set()
    for start in sorted(nxt):
        if start in seen:
            continue
        ring = [start]
        seen.add(start)
        cur = nxt[start]
        while cur != start:
            if cur in seen:
                raise MeshError(f"non-manifold boundary vertex {cur}")
            ring.append(cur)
            seen.add(cur)
            cur = nxt[cur]
        k = ring.index(min(ring))
        ring = ring[k:] + ring[:k]
        loops.append(BoundaryLoop(ring=tuple(ring)))
    loops.sort(key=lambda lp: lp.ring[0])
    return loops


def _unit_normal(p0, p1, p2):
    n = np.cross(p1 - p0, p2 - p0)
    norm = np.linalg.norm(n)
    if norm <= 0.0:
        return None
    return n / norm


def _dihedral(n1, n2) -> float:
    """Angle between oriented face normals; 0 for coplanar, pi for degenerate."""
    if n1 is None or n2 is None:
        return math.pi
    return math.acos(float(np.clip(np.dot(n1, n2), -1.0, 1.0)))


def _angles_between(n_tri: np.ndarray, others: np.ndarray) -> np.ndarray:
    """Angles between one set of unit normals and another; degenerate gets pi."""
    dots = np.einsum("ij,ij->i", n_tri, others)
    ang = np.arccos(np.clip(dots, -1.0, 1.0))
    bad = (np.linalg.norm(n_tri, axis=1) < 0.5) | (np.linalg.norm(others, axis=1) < 0.5)
    return np.where(bad, math.pi, ang)


def close_hole(mesh: TriMesh, loop: BoundaryLoop) -> TriMesh:
    """Cover a boundary loop with a minimal-weight polygon triangulation.

    Dynamic programming over the loop polygon minimising (max dihedral angle,
    area, new edge length) lexicographically. No vertices are added; the new
    faces are recorded in cover_faces for later removal.
    """
    ring = tuple(loop.ring) if isinstance(loop, BoundaryLoop) else tuple(loop)
    m = len(ring)
    if m < 3:
        raise MeshError(f"cannot close a loop with {m} vertices")
    v = mesh.vertices
    # cover orientation must oppose the boundary direction
    poly = (ring[0],) + tuple(ring[:0:-1])

    f = mesh.faces
    ring_set = set(ring)
    face_at = {}
    for fi in range(len(f)):
        a, b, c = (int(x) for x in f[fi])
        if a in ring_set or b in ring_set or c in ring_set:
            face_at[(a, b)] = fi
            face_at[(b, c)] = fi
            face_at[(c, a)] = fi
    mesh_normal = np.zeros((m, 3))
    for i in range(m):
        u, w = poly[i], poly[(i + 1) % m]
        fi = face_at.get((w, u))
        if fi is None:
            raise MeshError(f"loop edge ({u},{w}) is not a boundary edge of the mesh")
        p = v[f[fi]]
        nrm = _unit_normal(p[0], p[1], p[2])
        mesh_normal[i] = 0.0 if nrm is None else nrm

    p = v[list(poly)]
    chord_len = np.linalg.norm(p[:, None, :] - p[None, :, :], axis=-1)

    INF = math.inf
    w_dih = np.full((m, m), INF)
    w_area = np.full((m, m), INF)
    w_chord = np.full((m, m), INF)
    lam = np.full((m, m), -1, dtype=np.int64)
    tri_normal = np.zeros((m, m, 3))
    idx = np.arange(m - 1)
    w_dih[idx, idx + 1] = 0.0
    w_area[idx, idx + 1] = 0.0
    w_chord[idx, idx + 1] = 0.0

    for span in range(2, m):
        for i in range(0, m - span):
            j = i + span
            ks = np.arange(i + 1, j)
            cr = np.cross(p[ks] - p[i], p[j] - p[i])
            nrm = np.linalg.norm(cr, axis=1)
            area = 0.5 * nrm
            with np.errstate(invalid="ignore", divide="ignore"):
                n_tri = np.where(nrm[:, None] > 0, cr / np.where(nrm[:, None] > 0, nrm[:, None], 1.0), 0.0)
            left_n = tri_normal[i, ks].copy()
            left_n[0] = mesh_normal[i]
            right_n = tri_normal[ks, j].copy()
            right_n[-1] = mesh_normal[j - 1]
            d = np.maximum(_angles_between(n_tri, left_n), _angles_between(n_tri, right_n))
            if i == 0 and j == m - 1:
                d = np.maximum(d, _angles_between(n_tri, np.broadcast_to(mesh_normal[m - 1], n_tri.shape)))
            cand_d = np.maximum(d, np.maximum(w_dih[i, ks], w_dih[ks, j]))
            cand_a = area + w_area[i, ks] + w_area[ks, j]
            chord_add = np.where(ks > i + 1, chord_len[i, ks], 0.0) + \
                np.where(ks < j - 1, chord_len[ks, j], 0.0)
            cand_c = chord_add + w_chord[i, ks] + w_chord[ks, j]
            best = np.lexsort((ks, cand_c, cand_a, cand_d))[0]
            w_dih[i, j] = cand_d[best]
            w_area[i, j] = cand_a[best]
            w_chord[i, j] = cand_c[best]
            lam[i, j] = ks[best]
            tri_normal[i, j] = n_tri[best]

    new_faces = []
    stack = [(0, m - 1)]
    while stack:
        i, j = stack.pop()
        if j <= i + 1:
            continue
        k = int(lam[i, j])
        new_faces.append((poly[i], poly[k], poly[j]))
        stack.append((i, k))
        stack.append((k, j))

    first = mesh.n_faces
    faces = np.concatenate([mesh.faces, np.asarray(new_faces, dtype=np.int64)], axis=0)
    covers = mesh.cover_faces + tuple(range(first, first + len(new_faces)))
    return replace(mesh, faces=faces, cover_faces=covers)


def cotangent_laplacian_arrays(v: np.ndarray, f: np.ndarray) -> sparse.csr_matrix:
    """Cotangent Laplacian from raw arrays; w_ij = (cot a + cot b)/2, diag = -rowsum.

    Cotangents are clamped to [-COT_CLAMP, COT_CLAMP] so near-degenerate faces
    degrade gracefully instead of raising.
    """
    n = len(v)
    rows = []
    cols = []
    vals = []
    for c0, c1, c2 in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        e1 = v[f[:, c1]] - v[f[:, c0]]
        e2 = v[f[:, c2]] - v[f[:, c0]]
        cross = np.linalg.norm(np.cross(e1, e2), axis=1)
        dot = np.einsum("ij,ij->i", e1, e2)
        with np.errstate(divide="ignore", invalid="ignore"):
            cot = np.where(cross > 0, dot / np.where(cross > 0, cross, 1.0), COT_CLAMP)
        cot = np.clip(cot, -COT_CLAMP, COT_CLAMP)
        rows.append(f[:, c1])
        cols.append(f[:, c2])
        vals.append(0.5 * cot)
    i = np.concatenate(rows + cols)
    j = np.concatenate(cols + rows)
    w = np.concatenate(vals + vals)
    W = sparse.coo_matrix((w, (i, j)), shape=(n, n)).tocsr()
    d = -np.asarray(W.sum(axis=1)).ravel()
    return (W + sparse.diags(d)).tocsr()


def cotangent_laplacian(mesh: TriMesh) -> SparseLaplacian:
    return SparseLaplacian(matrix=cotangent_laplacian_arrays(mesh.vertices, mesh.faces))


def modify_laplacian(lap: SparseLaplacian, boundary_idx) -> SparseLaplacian:
    """Replace the given rows with identity rows; all other rows untouched."""
    idx = np.asarray(sorted(set(int(i) for i in boundary_idx)), dtype=np.int64)
    n = lap.matrix.shape[0]
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise MeshError("boundary index out of range")
    keep = np.ones(n)
    keep[idx] = 0.0
    unit = np.zeros(n)
    unit[idx] = 1.0
    mat = (sparse.diags(keep) @ lap.matrix + sparse.diags(unit)).tocsr()
    mat.eliminate_zeros()
    return SparseLaplacian(matrix=mat, identity_rows=lap.identity_rows | set(idx.tolist()))


def subdivide_midpoint(mesh: TriMesh) -> TriMesh:
    """Uniform 1:4 subdivision; new midpoint vertices get fresh provenance ids."""
    v = np.array(mesh.vertices)
    f = mesh.faces
    edge_mid: dict = {}
    new_pts = []
    next_id = int(mesh.vertex_ids.max()) + 1 if mesh.n_vertices else 0
    new_ids = []

    def mid(a, b):
        nonlocal next_id
        key = (a, b) if a < b else (b, a)
        if key not in edge_mid:
            edge_mid[key] = len(v) + len(new_pts)
            new_pts.append(0.5 * (v[a] + v[b]))
            new_ids.append(next_id)
            next_id += 1
        return edge_mid[key]

    faces = []
    for a, b, c in mesh.faces:
        a, b, c = int(a), int(b), int(c)
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        faces += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
    verts = np.concatenate([v, np.asarray(new_pts)], axis=0) if new_pts else v
    ids = np.concatenate([mesh.vertex_ids, np.asarray(new_ids, dtype=np.int64)])
    chans = {}
    for name, arr in mesh.channels.items():
        ext = np.zeros(len(verts))
        ext[: len(arr)] = arr
        for (a, b), k in edge_mid.items():
            ext[k] = 0.5 * (arr[a] + arr[b])
        chans[name] = ext
    return TriMesh(vertices=verts, faces=np.asarray(faces, dtype=np.int64),
                   channels=chans, vertex_ids=ids)


# ---------------------------------------------------------------------------
# File IO: OBJ (+ sidecar channel CSV) and VTK legacy ASCII POLYDATA
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _infer_format(path: Path, fmt: str | None) -> str:
    if fmt:
        return fmt.lower()
    suffix = path.suffix.lower()
    if suffix == ".obj":
        return "obj"
    if suffix == ".vtk":
        return "vtk"
    raise MeshError(f"cannot infer mesh format from {path.name!r}")


def _sidecar(path: Path) -> Path:
    return path.with_name(path.stem + ".channels.csv")


def load_mesh(path, fmt: str | None = None, repair_orientation: bool = True) -> TriMesh:
    """Load an OBJ or VTK legacy ASCII triangle mesh.

    Per-vertex data arrays become scalar channels. A reserved channel named
    _vertex_id, when present, restores provenance ids.
    """
    path = Path(path)
    if not path.exists():
        raise MeshError(f"mesh file not found: {path}")
    kind = _infer_format(path, fmt)
    if kind == "obj":
        verts, faces, channels = _load_obj(path)
    elif kind == "vtk":
        verts, faces, channels = _load_vtk(path)
    else:
        raise MeshError(f"unsupported mesh format {kind!r}")
    ids = None
    if _ID_CHANNEL in channels:
        ids = channels.pop(_ID_CHANNEL).astype(np.int64)
    mesh = TriMesh(vertices=verts, faces=faces, channels=channels, vertex_ids=ids)
    if repair_orientation:
        mesh, flips = orient_consistently(mesh)
        if flips:
            logger.warning("%s: flipped %d faces to majority orientation", path.name, flips)
    return mesh


def save_mesh(mesh: TriMesh, path, fmt: str | None = None, cell_data: dict | None = None,
              keep_ids: bool = True) -> None:
    """Write a mesh; floats are printed with 17 significant digits (round-trip safe)."""
    path = Path(path)
    kind = _infer_format(path, fmt)
    channels = dict(mesh.channels)
    if keep_ids:
        channels[_ID_CHANNEL] = mesh.vertex_ids.astype(np.float64)
    if kind == "obj":
        _save_obj(mesh, path, channels)
    elif kind == "vtk":
        _save_vtk(mesh, path, channels, cell_data or {})
    else:
        raise MeshError(f"unsupported mesh format {kind!r}")


def _load_obj(path: Path):
    verts = []
    faces = []
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "v":
            if len(parts) < 4:
                raise MeshError(f"{path.name}:{lineno}: malformed vertex record")
            verts.append([float(parts[1]), float(parts[2]), float(parts[3])])
        elif parts[0] == "f":
            idx = [int(p.split("/")[0]) for p in parts[1:]]
            if len(idx) != 3:
                raise MeshError(
                    f"{path.name}:{lineno}: non-triangular face with {len(idx)} "
                    f"vertices: {parts[1:]}"
                )
            faces.append([i - 1 if i > 0 else len(verts) + i for i in idx])
    if not verts:
        raise MeshError(f"{path.name}: no vertices")
    channels: dict = {}
    side = _sidecar(path)
    if side.exists():
        n = len(verts)
        with side.open() as fh:
            for row in csv.DictReader(fh):
                name = row["channel"]
                if name not in channels:
                    channels[name] = np.zeros(n)
                channels[name][int(row["vertexId"])] = float(row["value"])
    return np.asarray(verts), np.asarray(faces, dtype=np.int64), channels


def _save_obj(mesh: TriMesh, path: Path, channels: dict):
    lines = []
    for p in mesh.vertices:
        lines.append(f"v {_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}")
    for a, b, c in mesh.faces:
        lines.append(f"f {a + 1} {b + 1} {c + 1}")
    path.write_text("\n".join(lines) + "\n")
    side = _sidecar(path)
    if channels:
        with side.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["vertexId", "channel", "value"])
            for name in sorted(channels):
                for i, val in enumerate(channels[name]):
                    writer.writerow([i, name, _fmt(val)])
    elif side.exists():
        side.unlink()


def _load_vtk(path: Path):
    lines = [ln.strip() for ln in path.read_text().split("\n")]
    i = 0

    def next_content():
        nonlocal i
        while i < len(lines) and not lines[i]:
            i += 1
        if i >= len(lines):
            raise MeshError(f"{path.name}: truncated VTK file")
        ln = lines[i]
        i += 1
        return ln

    header = next_content()
    if not header.startswith("# vtk DataFile"):
        raise MeshError(f"{path.name}: not a VTK legacy file")
    next_content()  # title
    if next_content().upper() != "ASCII":
        raise MeshError(f"{path.name}: only ASCII VTK is supported")
    if "POLYDATA" not in next_content().upper():
        raise MeshError(f"{path.name}: expected DATASET POLYDATA")

    def read_numbers(count):
        vals = []
        nonlocal i
        while len(vals) < count:
            ln = next_content()
            vals.extend(ln.split())
        if len(vals) != count:
            raise MeshError(f"{path.name}: unexpected token count in block")
        return vals

    ln = next_content()
    if not ln.upper().startswith("POINTS"):
        raise MeshError(f"{path.name}: expected POINTS block")
    n = int(ln.split()[1])
    verts = np.array(read_numbers(3 * n), dtype=np.float64).reshape(n, 3)

    ln = next_content()
    if not ln.upper().startswith("POLYGONS"):
        raise MeshError(f"{path.name}: expected POLYGONS block")
    m, total = int(ln.split()[1]), int(ln.split()[2])
    raw = np.array(read_numbers(total), dtype=np.int64)
    faces = []
    k = 0
    for _ in range(m):
        cnt = int(raw[k])
        if cnt != 3:
            raise MeshError(f"{path.name}: non-triangular polygon with {cnt} vertices")
        faces.append(raw[k + 1 : k + 4])
        k += cnt + 1
    faces = np.asarray(faces, dtype=np.int64)

    channels: dict = {}
    while i < len(lines):
        if not lines[i]:
            i += 1
            continue
        ln = next_content()
        up = ln.upper()
        if up.startswith("POINT_DATA"):
            continue
        if up.startswith("FIELD"):
            k_arrays = int(ln.split()[-1])
            for _ in range(k_arrays):
                hdr = next_content().split()
                name, comps, tuples = hdr[0], int(hdr[1]), int(hdr[2])
                vals = np.array(read_numbers(comps * tuples), dtype=np.float64)
                if comps == 1 and tuples == n:
                    channels[name] = vals
        elif up.startswith("CELL_DATA"):
            break
        else:
            continue
    return verts, faces, channels


def _save_vtk(mesh: TriMesh, path: Path, channels: dict, cell_data: dict):
    out = [
        "# vtk DataFile Version 3.0",
        "frf mesh",
        "ASCII",
        "DATASET POLYDATA",
        f"POINTS {mesh.n_vertices} double",
    ]
    for p in mesh.vertices:
        out.append(f"{_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}")
    out.append(f"POLYGONS {mesh.n_faces} {4 * mesh.n_faces}")
    for a, b, c in mesh.faces:
        out.append(f"3 {a} {b} {c}")
    if channels:
        out.append(f"POINT_DATA {mesh.n_vertices}")
        out.append(f"FIELD channels {len(channels)}")
        for name in sorted(channels):
            arr = channels[name]
            out.append(f"{name} 1 {mesh.n_vertices} double")
            out.extend(_fmt(x) for x in arr)
    if cell_data:
        out.append(f"CELL_DATA {mesh.n_faces}")
        out.append(f"FIELD cells {len(cell_data)}")
        for name in sorted(cell_data):
            arr = np.asarray(cell_data[name], dtype=np.float64)
            out.append(f"{name} 1 {mesh.n_faces} double")
            out.extend(_fmt(x) for x in arr)
    path.write_text("\n".join(out) + "\n")
