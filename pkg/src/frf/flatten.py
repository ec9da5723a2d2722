"""Equality-constrained quasi-conformal flattening and boundary refinement.

The flattening minimises the Laplacian residual with boundary targets folded
into the right-hand side while the dividing-path targets are enforced exactly
through Lagrange multipliers. A second, boundary-only harmonic solve on the
flat mesh then snaps the rings onto their circles.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .division import (HOLE_LABELS, SeedSet, divide, project_and_open,
                       recompute_subcontours)
from .errors import DivisionError, MeshError, SolveError, StageError
from .mesh import (SparseLaplacian, TriMesh, boundary_loops, close_hole,
                   cotangent_laplacian_arrays, modify_laplacian)
from .template import ConstraintSet, TemplateSpec, target_coordinates

DEFAULT_W = 1000.0


@dataclass(frozen=True)
class FlatMesh:
    """2D embedding sharing faces, ids, and channels with its source mesh."""

    xy: np.ndarray
    faces: np.ndarray
    channels: dict = field(default_factory=dict)
    vertex_ids: np.ndarray | None = None
    template_hash: str | None = None

    def __post_init__(self):
        xy = np.asarray(self.xy, dtype=np.float64).reshape(-1, 2)
        if not np.isfinite(xy).all():
            raise SolveError("flat mesh has non-finite coordinates")
        ids = self.vertex_ids
        if ids is None:
            ids = np.arange(len(xy), dtype=np.int64)
        object.__setattr__(self, "xy", xy)
        object.__setattr__(self, "faces", np.asarray(self.faces, dtype=np.int64))
        object.__setattr__(self, "vertex_ids", np.asarray(ids, dtype=np.int64))

    @property
    def n_vertices(self) -> int:
        return len(self.xy)

    def signed_areas(self) -> np.ndarray:
        p = self.xy
        f = self.faces
        e1 = p[f[:, 1]] - p[f[:, 0]]
        e2 = p[f[:, 2]] - p[f[:, 0]]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def to_mesh(self) -> TriMesh:
        verts = np.column_stack([self.xy, np.zeros(len(self.xy))])
        return TriMesh(vertices=verts, faces=self.faces,
                       channels=dict(self.channels), vertex_ids=self.vertex_ids)


@dataclass(frozen=True)
class SolveReport:
    """Numbers a run leaves behind: residuals, boundary accuracy, fold count."""

    residual_x: float
    residual_y: float
    boundary_dev_before: float
    boundary_dev_after: float
    flipped_before: int
    flipped_after: int
    wall_ms: float
    n_vertices: int = 0
    n_faces: int = 0
    w: float = DEFAULT_W
    weight_mode: str = "boundary-rows"

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "residual_x": self.residual_x,
            "residual_y": self.residual_y,
            "boundary_dev_before": self.boundary_dev_before,
            "boundary_dev_after": self.boundary_dev_after,
            "flipped_before": self.flipped_before,
            "flipped_after": self.flipped_after,
            "n_vertices": self.n_vertices,
            "n_faces": self.n_faces,
            "w": self.w,
            "weight_mode": self.weight_mode,
        }
        if include_timing:
            out["wall_ms"] = self.wall_ms
        return out


def _lu_solve_checked(mat: sparse.csc_matrix, rhs: np.ndarray, what: str):
    """Sparse LU with one step of iterative refinement and a residual check."""
    try:
        lu = splu(mat.tocsc())
    except RuntimeError as exc:
        raise SolveError(f"{what}: singular system ({exc})") from exc
    sol = lu.solve(rhs)
    resid = rhs - mat @ sol
    sol = sol + lu.solve(resid)
    if not np.isfinite(sol).all():
        raise SolveError(f"{what}: non-finite solution (singular system?)")
    resid = rhs - mat @ sol
    denom = max(float(np.linalg.norm(rhs)), 1e-30)
    rel = float(np.linalg.norm(resid)) / denom
    if rel > 1e-6:
        raise SolveError(f"{what}: solver did not converge (relative residual {rel:.2e})")
    return sol, rel


def solve_constrained(lap: SparseLaplacian, constraints: ConstraintSet,
                      w: float = DEFAULT_W, weight_mode: str = "boundary-rows"):
    """Solve the two constrained least-squares problems for the x and y maps.

    The objective rows are the modified Laplacian with boundary targets in the
    right-hand side; regional targets enter as hard equality constraints via a
    saddle-point (KKT) system. weight_mode selects how w enters: scaling only
    the boundary (identity) rows, or the whole objective, in which case it
    provably cannot move the minimiser.
    """
    if w <= 0:
        raise SolveError("w must be positive")
    if weight_mode not in ("boundary-rows", "uniform"):
        raise SolveError(f"unknown weight mode {weight_mode!r}")
    b_idx = constraints.boundary_idx
    r_idx = constraints.regional_idx
    n = lap.matrix.shape[0]
    if set(b_idx.tolist()) != set(lap.identity_rows):
        raise SolveError("Laplacian identity rows must match the boundary indices")

    row_w = np.ones(n)
    if weight_mode == "boundary-rows":
        row_w[b_idx] = w
    else:
        row_w[:] = w
    D = sparse.diags(row_w) @ lap.matrix
    rhs_full = np.zeros((n, 2))
    rhs_full[b_idx] = constraints.boundary_xy
    rhs_full *= row_w[:, None]

    p = len(r_idx)
    A11 = (D.T @ D).tocsr()
    top = D.T @ rhs_full
    if p:
        E = sparse.coo_matrix((np.ones(p), (np.arange(p), r_idx)), shape=(p, n)).tocsr()
        kkt = sparse.bmat([[A11, E.T], [E, None]], format="csc")
        rhs = np.concatenate([top, constraints.regional_xy], axis=0)
    else:
        kkt = A11.tocsc()
        rhs = top

    sol_x, res_x = _lu_solve_checked(kkt, rhs[:, 0], "x solve")
    sol_y, res_y = _lu_solve_checked(kkt, rhs[:, 1], "y solve")
    xy = np.column_stack([sol_x[:n], sol_y[:n]])
    return xy, (res_x, res_y)


def refine_boundary(xy: np.ndarray, faces: np.ndarray, boundary_idx: np.ndarray,
                    boundary_xy: np.ndarray) -> np.ndarray:
    """Recompute interior coordinates harmonically on the flat mesh itself.

    The Laplacian is rebuilt from the 2D coordinates, boundary rows replaced by
    identity, so boundary vertices land exactly on their targets.
    """
    xy = np.asarray(xy, dtype=np.float64)
    verts = np.column_stack([xy, np.zeros(len(xy))])
    f = np.asarray(faces, dtype=np.int64)
    edges = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
    if (np.linalg.norm(verts[edges[:, 0]] - verts[edges[:, 1]], axis=1) == 0).any():
        raise MeshError("flat mesh has exactly coincident vertices")
    lap = cotangent_laplacian_arrays(verts, f)
    mod = modify_laplacian(SparseLaplacian(matrix=lap), boundary_idx)
    n = len(xy)
    rhs = np.zeros((n, 2))
    rhs[np.asarray(boundary_idx, dtype=np.int64)] = boundary_xy
    out_x, _ = _lu_solve_checked(mod.matrix.tocsc(), rhs[:, 0], "refine x")
    out_y, _ = _lu_solve_checked(mod.matrix.tocsc(), rhs[:, 1], "refine y")
    return np.column_stack([out_x, out_y])


def _count_flipped(xy: np.ndarray, faces: np.ndarray) -> int:
    p = np.asarray(xy)
    f = np.asarray(faces)
    e1 = p[f[:, 1]] - p[f[:, 0]]
    e2 = p[f[:, 2]] - p[f[:, 0]]
    return int(((e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]) < 0).sum())


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (MeshError, DivisionError, SolveError) as exc:
        raise StageError(name, exc) from exc


def label_boundary_loops(mesh: TriMesh, seeds: SeedSet) -> dict:
    """Identify the six boundary loops from the seed memberships."""
    loops = boundary_loops(mesh)
    if len(loops) != 6:
        raise MeshError(f"expected 6 boundary loops, found {len(loops)}")
    labelled = {}
    for loop in loops:
        ring = set(loop.ring)
        hit = None
        for label, vtx in seeds.holes.items():
            if vtx in ring:
                hit = label
        if all(s in ring for s in seeds.mv):
            hit = "MV"
        if hit is None:
            raise MeshError("a boundary loop carries no seed; cannot label it")
        if hit in labelled:
            raise MeshError(f"two boundary loops match {hit}")
        labelled[hit] = loop
    missing = ({"MV"} | set(HOLE_LABELS)) - set(labelled)
    if missing:
        raise MeshError(f"no boundary loop found for {sorted(missing)}")
    return labelled


def flatten_pipeline(mesh: TriMesh, seeds: SeedSet, template: TemplateSpec,
                     w: float = DEFAULT_W, weight_mode: str = "boundary-rows"):
    """Run the full flattening: close, divide, open, re-spread, solve, refine."""
    t0 = time.perf_counter()
    labelled = _stage("loops", label_boundary_loops, mesh, seeds)

    def close_all():
        closed = mesh
        for label in HOLE_LABELS:
            closed = close_hole(closed, labelled[label])
        return closed

    closed = _stage("close", close_all)
    division = _stage("divide", divide, closed, seeds)
    projection = _stage("project", project_and_open, closed, division, seeds)
    splits = _stage("subcontours",
                    lambda: {label: recompute_subcontours(projection.splits[label])
                             for label in HOLE_LABELS})
    constraints = _stage("targets", target_coordinates, template, projection, splits)

    def build_system():
        lap = SparseLaplacian(
            matrix=cotangent_laplacian_arrays(projection.mesh.vertices,
                                              projection.mesh.faces))
        return modify_laplacian(lap, constraints.boundary_idx)

    lap_mod = _stage("laplacian", build_system)
    xy0, (res_x, res_y) = _stage("solve", solve_constrained, lap_mod, constraints,
                                 w, weight_mode)

    dev_before = float(np.abs(
        xy0[constraints.boundary_idx] - constraints.boundary_xy).max())
    flipped_before = _count_flipped(xy0, projection.mesh.faces)

    xy1 = _stage("refine", refine_boundary, xy0, projection.mesh.faces,
                 constraints.boundary_idx, constraints.boundary_xy)
    dev_after = float(np.abs(
        xy1[constraints.boundary_idx] - constraints.boundary_xy).max())
    flipped_after = _count_flipped(xy1, projection.mesh.faces)

    flat = FlatMesh(xy=xy1, faces=projection.mesh.faces,
                    channels=dict(projection.mesh.channels),
                    vertex_ids=projection.mesh.vertex_ids,
                    template_hash=template.spec_hash)
    report = SolveReport(residual_x=res_x, residual_y=res_y,
                         boundary_dev_before=dev_before,
                         boundary_dev_after=dev_after,
                         flipped_before=flipped_before,
                         flipped_after=flipped_after,
                         wall_ms=(time.perf_counter() - t0) * 1000.0,
                         n_vertices=flat.n_vertices,
                         n_faces=len(flat.faces), w=w, weight_mode=weight_mode)
    return flat, report
