"""Distortion metrics for a flattening, plus synthetic textures for eyeballing it.

Area change is measured per triangle after normalising both surfaces to unit
total area, so the area-weighted mean ratio is exactly 1 and any spread in the
histogram is genuine distortion. Shape change is the ratio of the singular
values of the per-triangle linear map.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra as csgraph_dijkstra

from .errors import MeshError
from .flatten import FlatMesh
from .mesh import TriMesh

DEFAULT_BINS = 64
AREA_RANGE = (0.0, 4.0)
SHAPE_RANGE = (0.0, 1.0)


@dataclass(frozen=True)
class DistortionReport:
    """Per-face area ratios and isotropy ratios with their histograms."""

    alpha: np.ndarray          # per-face area ratio, positive
    beta: np.ndarray           # per-face isotropy ratio in (0, 1]
    flipped: np.ndarray        # per-face bool, negative 2D orientation
    alpha_hist: tuple          # (bin_edges, counts)
    beta_hist: tuple
    alpha_entropy: float
    beta_entropy: float
    summary: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "alpha_hist": {"edges": self.alpha_hist[0].tolist(),
                           "counts": self.alpha_hist[1].tolist()},
            "beta_hist": {"edges": self.beta_hist[0].tolist(),
                          "counts": self.beta_hist[1].tolist()},
            "alpha_entropy": self.alpha_entropy,
            "beta_entropy": self.beta_entropy,
            "summary": self.summary,
            "n_flipped": int(self.flipped.sum()),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["faceId", "alpha", "beta", "flipped"])
            for i, (a, b, fl) in enumerate(zip(self.alpha, self.beta, self.flipped)):
                writer.writerow([i, repr(float(a)), repr(float(b)), int(fl)])


def _areas_3d(mesh: TriMesh) -> np.ndarray:
    return mesh.face_areas()


def _areas_2d_signed(flat: FlatMesh) -> np.ndarray:
    return flat.signed_areas()


def area_ratio(mesh3d: TriMesh, flat: FlatMesh) -> np.ndarray:
    """Per-face 2D/3D area ratio after normalising both total areas to 1."""
    if mesh3d.n_faces != len(flat.faces) or not np.array_equal(mesh3d.faces, flat.faces):
        raise MeshError("3D and flat meshes must share the same face list")
    a3 = _areas_3d(mesh3d)
    a2 = np.abs(_areas_2d_signed(flat))
    if (a3 <= 0).any():
        raise MeshError("zero-area 3D face")
    return (a2 / a2.sum()) / (a3 / a3.sum())


def triangle_frame_2d(tri3d: np.ndarray) -> np.ndarray:
    """In-plane coordinates of a 3D triangle: x along the first edge."""
    p0, p1, p2 = np.asarray(tri3d, dtype=np.float64)
    e1 = p1 - p0
    n1 = np.linalg.norm(e1)
    if n1 <= 0:
        raise MeshError("degenerate triangle (coincident vertices)")
    x_axis = e1 / n1
    e2 = p2 - p0
    y_vec = e2 - (e2 @ x_axis) * x_axis
    n2 = np.linalg.norm(y_vec)
    if n2 <= 0:
        raise MeshError("degenerate triangle (collinear vertices)")
    y_axis = y_vec / n2
    return np.array([[n1, e2 @ x_axis], [0.0, e2 @ y_axis]])


def jacobian(tri3d, tri2d) -> np.ndarray:
    """Linear map sending the 3D triangle (in its in-plane frame) to the 2D one."""
    src = triangle_frame_2d(tri3d)
    q0, q1, q2 = np.asarray(tri2d, dtype=np.float64)
    dst = np.column_stack([q1 - q0, q2 - q0])
    det = src[0, 0] * src[1, 1] - src[0, 1] * src[1, 0]
    if abs(det) <= 0:
        raise MeshError("degenerate triangle")
    inv = np.array([[src[1, 1], -src[0, 1]], [-src[1, 0], src[0, 0]]]) / det
    return dst @ inv


def isotropy_ratio(jac: np.ndarray) -> float:
    """Smallest over largest singular value; 1 for a similarity transform."""
    s = np.linalg.svd(np.asarray(jac, dtype=np.float64), compute_uv=False)
    if s[0] <= 0:
        raise MeshError("zero Jacobian")
    return float(s[-1] / s[0])


def per_face_metrics(mesh3d: TriMesh, flat: FlatMesh):
    """Vectorised alpha and beta for every face, plus the flipped mask."""
    alpha = area_ratio(mesh3d, flat)
    v3 = mesh3d.vertices
    f = mesh3d.faces
    xy = flat.xy
    p0, p1, p2 = v3[f[:, 0]], v3[f[:, 1]], v3[f[:, 2]]
    e1 = p1 - p0
    e2 = p2 - p0
    n1 = np.linalg.norm(e1, axis=1)
    x_axis = e1 / n1[:, None]
    proj = np.einsum("ij,ij->i", e2, x_axis)
    y_vec = e2 - proj[:, None] * x_axis
    n2 = np.linalg.norm(y_vec, axis=1)
    # source frames (2x2 upper triangular) and target edge matrices
    a = n1
    b = proj
    d = n2
    q0, q1, q2 = xy[f[:, 0]], xy[f[:, 1]], xy[f[:, 2]]
    u1 = q1 - q0
    u2 = q2 - q0
    det = a * d
    if (det <= 0).any():
        raise MeshError("degenerate 3D face in metric computation")
    # J = [u1 u2] @ inv([[a, b], [0, d]])
    j00 = u1[:, 0] / a
    j10 = u1[:, 1] / a
    j01 = (u2[:, 0] - b * j00) / d
    j11 = (u2[:, 1] - b * j10) / d
    # singular values of 2x2 via the stable closed form
    e_ = 0.5 * (j00 + j11)
    h_ = 0.5 * (j00 - j11)
    f_ = 0.5 * (j01 + j10)
    g_ = 0.5 * (j01 - j10)
    q = np.hypot(e_, g_)
    r = np.hypot(h_, f_)
    smax = q + r
    smin = np.abs(q - r)
    if (smax <= 0).any():
        raise MeshError("zero Jacobian on a face")
    beta = smin / smax
    flipped = _areas_2d_signed(flat) < 0
    return alpha, beta, flipped


def histogram_entropy(values, bins: int = DEFAULT_BINS, vrange=None):
    """Equal-width histogram with outliers clipped into the end bins, plus its
    Shannon entropy in nats over the non-empty bins."""
    vals = np.asarray(values, dtype=np.float64).ravel()
    if vals.size == 0:
        raise MeshError("cannot histogram an empty value list")
    if bins < 2:
        raise MeshError("need at least 2 bins")
    if vrange is None:
        lo, hi = float(vals.min()), float(vals.max())
        if lo == hi:
            hi = lo + 1.0
    else:
        lo, hi = (float(v) for v in vrange)
    clipped = np.clip(vals, lo, hi)
    counts, edges = np.histogram(clipped, bins=bins, range=(lo, hi))
    p = counts[counts > 0] / counts.sum()
    entropy = float(-(p * np.log(p)).sum())
    return (edges, counts), entropy


def distortion_report(mesh3d: TriMesh, flat: FlatMesh,
                      bins: int = DEFAULT_BINS) -> DistortionReport:
    alpha, beta, flipped = per_face_metrics(mesh3d, flat)
    a_hist, a_ent = histogram_entropy(alpha, bins, AREA_RANGE)
    b_hist, b_ent = histogram_entropy(beta, bins, SHAPE_RANGE)
    a3 = _areas_3d(mesh3d)
    weights = a3 / a3.sum()
    summary = {
        "alpha_mean": float(alpha.mean()),
        "alpha_median": float(np.median(alpha)),
        "alpha_weighted_mean": float((alpha * weights).sum()),
        "beta_mean": float(beta.mean()),
        "beta_median": float(np.median(beta)),
        "beta_weighted_mean": float((beta * weights).sum()),
    }
    return DistortionReport(alpha=alpha, beta=beta, flipped=flipped,
                            alpha_hist=a_hist, beta_hist=b_hist,
                            alpha_entropy=a_ent, beta_entropy=b_ent,
                            summary=summary)


def _geodesic_distances(mesh: TriMesh, sources) -> np.ndarray:
    edges, lengths = mesh.edge_lengths()
    n = mesh.n_vertices
    i = np.concatenate([edges[:, 0], edges[:, 1]])
    j = np.concatenate([edges[:, 1], edges[:, 0]])
    w = np.concatenate([lengths, lengths])
    g = coo_matrix((w, (i, j)), shape=(n, n)).tocsr()
    return csgraph_dijkstra(g, indices=sources)


def texture_stripes(mesh: TriMesh, seed: int, band_width: float) -> np.ndarray:
    """Alternating 0/1 bands of geodesic distance to the seed vertex."""
    if band_width <= 0:
        raise MeshError("band width must be positive")
    dist = _geodesic_distances(mesh, [int(seed)])[0]
    if not np.isfinite(dist).all():
        raise MeshError("mesh is not connected")
    return np.floor(dist / band_width).astype(np.int64) % 2


def texture_spots(mesh: TriMesh, count: int, radius: float) -> np.ndarray:
    """Spot ids around farthest-point-sampled centers; background is -1.

    Centers come from farthest-point sampling in the edge-graph metric starting
    at vertex 0; each vertex joins the nearest center within the radius, ties
    to the lowest center index.
    """
    if count < 1:
        raise MeshError("need at least one spot")
    n = mesh.n_vertices
    centers = [0]
    dmin = _geodesic_distances(mesh, [0])[0]
    if not np.isfinite(dmin).all():
        raise MeshError("mesh is not connected")
    for _ in range(count - 1):
        nxt = int(np.argmax(dmin))
        centers.append(nxt)
        dmin = np.minimum(dmin, _geodesic_distances(mesh, [nxt])[0])
    dists = _geodesic_distances(mesh, centers)
    nearest = np.argmin(dists, axis=0)
    best = dists[nearest, np.arange(n)]
    channel = np.where(best <= radius, nearest, -1).astype(np.int64)
    return channel
