"""Parametric disk template and generation of 2D target coordinates.

The template is pure data: a disk, five interior circles with per-path anchor
angles, four rim anchors, and a curve style per dividing path. Targets for
every constrained vertex are derived from it plus the division of a concrete
mesh, so the same template standardises any number of cases.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .division import (HOLE_LABELS, MV_LABELS, PATH_ENDPOINTS, PATH_NAMES,
                       ProjectionResult, SubcontourSplit)
from .errors import TemplateError

SCHEMA = "frf-template/1"
CLEARANCE = 0.02

# ring-ordered incident paths per hole for the standard four-vein anatomy;
# the first one carries the fixed intersection point
ANCHOR_PATHS = {
    "LIPV": ("s2", "s3", "s7"),
    "LSPV": ("s3", "s4", "s8"),
    "RIPV": ("s1", "s2", "s6"),
    "RSPV": ("s1", "s5", "s4"),
    "LAA": ("s8", "s9"),
}


@dataclass(frozen=True)
class HoleSpec:
    """One target circle: where a hole ring lands inside the disk."""

    center: tuple
    radius: float
    anchor_angles: tuple     # radians, aligned with anchor_paths
    anchor_paths: tuple
    ring_orientation: int    # +1 counter-clockwise, -1 clockwise

    def anchor_angle(self, path: str) -> float:
        return self.anchor_angles[self.anchor_paths.index(path)]


@dataclass(frozen=True)
class TemplateSpec:
    """Disk plus five target circles and rim anchors; fully data-driven."""

    disk_radius: float
    holes: dict              # label -> HoleSpec
    mv_anchor_angles: tuple  # angles of MV1..MV4 on the rim
    mv_orientation: int = 1
    path_style: dict = field(default_factory=dict)
    arc_sagitta: float = 0.15
    name: str = "custom"

    def __post_init__(self):
        if self.disk_radius <= 0:
            raise TemplateError("disk radius must be positive")
        if set(self.holes) != set(HOLE_LABELS):
            raise TemplateError(f"template must define circles for {HOLE_LABELS}")
        tol = CLEARANCE * self.disk_radius
        for label, hole in self.holes.items():
            c = np.asarray(hole.center, dtype=float)
            if np.linalg.norm(c) + hole.radius > self.disk_radius - tol + 1e-12:
                raise TemplateError(f"{label} circle escapes the disk (clearance {tol})")
            if hole.radius <= 0:
                raise TemplateError(f"{label} circle radius must be positive")
            _check_winding(label, hole)
        labels = sorted(self.holes)
        for i, a in enumerate(labels):
            for b in labels[i + 1:]:
                ca = np.asarray(self.holes[a].center)
                cb = np.asarray(self.holes[b].center)
                gap = np.linalg.norm(ca - cb) - self.holes[a].radius - self.holes[b].radius
                if gap < tol - 1e-12:
                    raise TemplateError(f"circles {a} and {b} collide (gap {gap:.4f})")
        if len(self.mv_anchor_angles) != 4:
            raise TemplateError("exactly 4 rim anchors required")
        styles = dict(self.path_style)
        for name in PATH_NAMES:
            styles.setdefault(name, "straight")
            if styles[name] not in ("straight", "arc"):
                raise TemplateError(f"unknown path style {styles[name]!r}")
        object.__setattr__(self, "path_style", styles)
        spans = [_ccw_span(a, b) for a, b in _cyclic_pairs(self.mv_anchor_angles)]
        if abs(sum(spans) - 2 * math.pi) > 1e-9:
            raise TemplateError("rim anchors must wind once counter-clockwise")

    def to_json(self) -> str:
        payload = {
            "schema": SCHEMA,
            "name": self.name,
            "disk_radius": self.disk_radius,
            "mv_anchor_angles": list(self.mv_anchor_angles),
            "mv_orientation": self.mv_orientation,
            "arc_sagitta": self.arc_sagitta,
            "path_style": {k: self.path_style[k] for k in sorted(self.path_style)},
            "holes": {
                label: {
                    "center": list(h.center),
                    "radius": h.radius,
                    "anchor_angles": list(h.anchor_angles),
                    "anchor_paths": list(h.anchor_paths),
                    "ring_orientation": h.ring_orientation,
                }
                for label, h in sorted(self.holes.items())
            },
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TemplateSpec":
        data = json.loads(text)
        if data.get("schema") != SCHEMA:
            raise TemplateError(f"unsupported template schema {data.get('schema')!r}")
        holes = {
            label: HoleSpec(center=tuple(h["center"]), radius=h["radius"],
                            anchor_angles=tuple(h["anchor_angles"]),
                            anchor_paths=tuple(h["anchor_paths"]),
                            ring_orientation=h["ring_orientation"])
            for label, h in data["holes"].items()
        }
        return cls(disk_radius=data["disk_radius"], holes=holes,
                   mv_anchor_angles=tuple(data["mv_anchor_angles"]),
                   mv_orientation=data.get("mv_orientation", 1),
                   path_style=data.get("path_style", {}),
                   arc_sagitta=data.get("arc_sagitta", 0.15),
                   name=data.get("name", "custom"))

    @property
    def spec_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    def scaled(self, k: float) -> "TemplateSpec":
        holes = {
            label: replace(h, center=(h.center[0] * k, h.center[1] * k),
                           radius=h.radius * k)
            for label, h in self.holes.items()
        }
        return replace(self, disk_radius=self.disk_radius * k, holes=holes)


def _cyclic_pairs(seq):
    return [(seq[i], seq[(i + 1) % len(seq)]) for i in range(len(seq))]


def _ccw_span(a: float, b: float) -> float:
    return (b - a) % (2 * math.pi)


def _check_winding(label: str, hole: HoleSpec):
    o = hole.ring_orientation
    if o not in (-1, 1):
        raise TemplateError(f"{label}: ring orientation must be +1 or -1")
    if len(hole.anchor_angles) != len(hole.anchor_paths):
        raise TemplateError(f"{label}: anchor angles and paths must align")
    spans = []
    for a, b in _cyclic_pairs(hole.anchor_angles):
        span = _ccw_span(a, b) if o == 1 else _ccw_span(b, a)
        if span <= 1e-12:
            raise TemplateError(f"{label}: anchors not strictly ordered for its orientation")
        spans.append(span)
    if abs(sum(spans) - 2 * math.pi) > 1e-9:
        raise TemplateError(f"{label}: anchors must wind the circle exactly once")


@dataclass(frozen=True)
class LayoutConfig:
    """Chosen constants of the default disk layout; ratios come from population
    medians, everything else is tuned only to satisfy the TemplateSpec rules."""

    disk_radius: float = 1.0
    lipv_radius: float = 0.07
    left_carina: float = 0.18            # center distance LSPV-LIPV
    radius_ratios: tuple = (1.1, 1.1, 1.35, 1.35)   # LSPV, RIPV, RSPV, LAA / LIPV
    carina_ratio: float = 1.1            # right carina / left carina
    laa_ratio: float = 1.6               # LSPV-LAA distance / left carina
    separation_ratio: float = 3.75       # superior and inferior spans / left carina
    separation_factor: float = 1.0       # widens the inter-vein block (adapted presets)
    vertical_factor: float = 1.0         # stretches the carinas (adapted presets)
    cluster_shift: float = 0.205         # moves veins left so the left rim gap halves
    laa_angle_deg: float = 135.0         # direction of the appendage from LSPV
    mv_anchor_deg: tuple = (-45.0, 45.0, 135.0, 225.0)
    arc_sagitta: float = 0.15
    name: str = "custom"

    @property
    def path_style(self) -> dict:
        style = {name: "straight" for name in PATH_NAMES}
        for name in ("s5", "s6", "s7", "s9"):
            style[name] = "arc"
        return style


PRESETS = {
    "population": LayoutConfig(name="population"),
    "adapted1": LayoutConfig(name="adapted1", separation_factor=1.30,
                             cluster_shift=0.17, laa_angle_deg=125.0),
    "adapted2": LayoutConfig(name="adapted2", separation_factor=1.30,
                             vertical_factor=1.5, cluster_shift=0.17,
                             laa_angle_deg=125.0),
}


def preset_path(name: str):
    """Path of the shipped JSON for a named preset."""
    from importlib import resources

    return resources.files("frf").joinpath(f"data/templates/{name}.json")


def load_preset(name: str) -> "TemplateSpec":
    """Load a named preset from its shipped data file."""
    if name not in PRESETS:
        raise TemplateError(
            f"unknown template preset {name!r}; available: {sorted(PRESETS)}"
        )
    return TemplateSpec.from_json(preset_path(name).read_text())


def build_template(config) -> TemplateSpec:
    """Build a TemplateSpec from a preset name or a LayoutConfig.

    Circle radii follow the ostium perimeter ratios and circle spacing follows
    the inter-vein distance ratios; the appendage sits up-left of the superior
    left vein and the whole vein block shifts left until its rim gap is about
    half of the right one.
    """
    if isinstance(config, str):
        try:
            config = PRESETS[config]
        except KeyError:
            raise TemplateError(
                f"unknown template preset {config!r}; available: {sorted(PRESETS)}"
            ) from None
    if not isinstance(config, LayoutConfig):
        raise TemplateError("config must be a preset name or LayoutConfig")

    u = config.left_carina
    r_lipv = config.lipv_radius
    r_lspv, r_ripv, r_rspv, r_laa = (f * r_lipv for f in config.radius_ratios)

    half_left = 0.5 * u * config.vertical_factor
    half_right = 0.5 * u * config.carina_ratio * config.vertical_factor
    span = u * config.separation_ratio * config.separation_factor
    dy = half_right - half_left
    width = math.sqrt(span * span - dy * dy)
    x_left = -0.5 * width - config.cluster_shift
    x_right = 0.5 * width - config.cluster_shift

    # superior veins carry negative y: hole rings are traversed clockwise by an
    # orientation-preserving map (rim anchors run counter-clockwise), and this
    # chirality is the one that winds each ring's anchors clockwise
    centers = {
        "LSPV": (x_left, -half_left),
        "LIPV": (x_left, half_left),
        "RSPV": (x_right, -half_right),
        "RIPV": (x_right, half_right),
    }
    ang = -math.radians(config.laa_angle_deg)
    d_laa = config.laa_ratio * u
    centers["LAA"] = (centers["LSPV"][0] + d_laa * math.cos(ang),
                      centers["LSPV"][1] + d_laa * math.sin(ang))
    radii = {"LIPV": r_lipv, "LSPV": r_lspv, "RIPV": r_ripv,
             "RSPV": r_rspv, "LAA": r_laa}

    mv_angles = tuple(math.radians(a) for a in config.mv_anchor_deg)
    mv_points = {lab: (math.cos(a), math.sin(a))
                 for lab, a in zip(MV_LABELS, mv_angles)}

    holes = {}
    for label in HOLE_LABELS:
        cx, cy = centers[label]
        angles = []
        for path in ANCHOR_PATHS[label]:
            ea, eb = PATH_ENDPOINTS[path]
            other = eb if ea == label else ea
            tx, ty = mv_points[other] if other in mv_points else centers[other]
            angles.append(math.atan2(ty - cy, tx - cx))
        # every ring is traversed clockwise by an orientation-preserving map;
        # for three anchors the layout must already wind that way
        if len(angles) >= 3 and _winding_direction(angles) != -1:
            raise TemplateError(f"{label}: anchor directions wind against the map")
        holes[label] = HoleSpec(center=(cx, cy), radius=radii[label],
                                anchor_angles=tuple(angles),
                                anchor_paths=ANCHOR_PATHS[label],
                                ring_orientation=-1)

    spec = TemplateSpec(disk_radius=1.0, holes=holes, mv_anchor_angles=mv_angles,
                        mv_orientation=1, path_style=config.path_style,
                        arc_sagitta=config.arc_sagitta, name=config.name)
    if config.disk_radius != 1.0:
        spec = spec.scaled(config.disk_radius)
    return spec


def _winding_direction(angles) -> int:
    ccw = sum(_ccw_span(a, b) for a, b in _cyclic_pairs(angles))
    if abs(ccw - 2 * math.pi) < 1e-9:
        return 1
    if abs(ccw - (len(angles) - 1) * 2 * math.pi) < 1e-9 or \
            abs((sum(_ccw_span(b, a) for a, b in _cyclic_pairs(angles))) - 2 * math.pi) < 1e-9:
        return -1
    raise TemplateError("anchor directions do not wind the circle exactly once")


@dataclass(frozen=True)
class ConstraintSet:
    """Vertex -> 2D target pairs, split into boundary and regional groups."""

    boundary_idx: np.ndarray
    boundary_xy: np.ndarray
    regional_idx: np.ndarray
    regional_xy: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.boundary_idx, dtype=np.int64)
        r = np.asarray(self.regional_idx, dtype=np.int64)
        if len(set(b.tolist())) != len(b):
            raise TemplateError("duplicate boundary-constrained vertex")
        if len(set(r.tolist())) != len(r):
            raise TemplateError("duplicate regional-constrained vertex")
        if set(b.tolist()) & set(r.tolist()):
            raise TemplateError("a vertex appears in both constraint groups")
        object.__setattr__(self, "boundary_idx", b)
        object.__setattr__(self, "regional_idx", r)
        object.__setattr__(self, "boundary_xy",
                           np.asarray(self.boundary_xy, dtype=np.float64).reshape(-1, 2))
        object.__setattr__(self, "regional_xy",
                           np.asarray(self.regional_xy, dtype=np.float64).reshape(-1, 2))


def _circle_point(center, radius, angle) -> tuple:
    return (center[0] + radius * math.cos(angle),
            center[1] + radius * math.sin(angle))


def target_coordinates(template: TemplateSpec, projection: ProjectionResult,
                       splits: dict) -> ConstraintSet:
    """Exact 2D targets for every constrained vertex of an opened cavity.

    Hole intersection points land on their anchor angles, ring points spread at
    equal angular steps inside each sub-contour, rim points likewise between
    the rim anchors, and path interiors distribute along their target curve by
    relative 3D arc length.
    """
    b_idx: list = []
    b_xy: list = []

    ip_vertex = {}
    for label in HOLE_LABELS:
        split = splits[label]
        hole = template.holes[label]
        if tuple(split.ip_paths) != tuple(hole.anchor_paths):
            raise TemplateError(
                f"ring orientation mismatch on {label}: division order "
                f"{split.ip_paths} vs template {hole.anchor_paths}"
            )
        n = len(split.ring)
        o = hole.ring_orientation
        positions = list(split.ip_positions) + [n]
        angles = list(hole.anchor_angles) + [hole.anchor_angles[0]]
        for k in range(len(split.ip_positions)):
            p0, p1 = positions[k], positions[k + 1]
            a0 = angles[k]
            span = _ccw_span(a0, angles[k + 1]) if o == 1 else _ccw_span(angles[k + 1], a0)
            length = p1 - p0
            for t in range(p0, p1):
                theta = a0 + o * span * (t - p0) / length
                b_idx.append(split.ring[t])
                b_xy.append(_circle_point(hole.center, hole.radius, theta))
        for path, pos in zip(split.ip_paths, split.ip_positions):
            ip_vertex[(label, path)] = split.ring[pos]

    mv_ring = list(projection.mv_ring)
    n = len(mv_ring)
    positions = list(projection.mv_positions) + [n]
    angles = list(template.mv_anchor_angles) + [template.mv_anchor_angles[0]]
    R = template.disk_radius
    mv_vertex = dict(zip(MV_LABELS, (mv_ring[p] for p in projection.mv_positions)))
    for k in range(4):
        p0, p1 = positions[k], positions[k + 1]
        a0 = angles[k]
        span = _ccw_span(a0, angles[k + 1])
        for t in range(p0, p1):
            theta = a0 + span * (t - p0) / (p1 - p0)
            b_xy.append((R * math.cos(theta), R * math.sin(theta)))
            b_idx.append(mv_ring[t])

    target_of = {v: xy for v, xy in zip(b_idx, b_xy)}

    r_idx: list = []
    r_xy: list = []
    mesh_v = projection.mesh.vertices
    for name in PATH_NAMES:
        chain = list(projection.paths[name])
        ea, eb = PATH_ENDPOINTS[name]
        va = ip_vertex[(ea, name)] if ea in HOLE_LABELS else mv_vertex[ea]
        vb = ip_vertex[(eb, name)] if eb in HOLE_LABELS else mv_vertex[eb]
        chain[0] = va
        chain[-1] = vb
        if len(chain) < 3:
            continue
        pts = mesh_v[chain]
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        total = cum[-1]
        if total <= 0:
            raise TemplateError(f"path {name} has zero length")
        t_params = cum[1:-1] / total
        a_xy = np.asarray(target_of[va])
        b_target = np.asarray(target_of[vb])
        if template.path_style[name] == "arc":
            curve = _arc_points(a_xy, b_target, t_params, template)
        else:
            curve = a_xy[None, :] + t_params[:, None] * (b_target - a_xy)[None, :]
        for vtx, xy in zip(chain[1:-1], curve):
            r_idx.append(int(vtx))
            r_xy.append((float(xy[0]), float(xy[1])))

    return ConstraintSet(boundary_idx=np.asarray(b_idx), boundary_xy=np.asarray(b_xy),
                         regional_idx=np.asarray(r_idx),
                         regional_xy=np.asarray(r_xy).reshape(-1, 2))


def _arc_points(a: np.ndarray, b: np.ndarray, t: np.ndarray,
                template: TemplateSpec) -> np.ndarray:
    """Points along a circular arc from a to b bulging away from the disk center."""
    chord = b - a
    clen = float(np.linalg.norm(chord))
    if clen <= 0:
        raise TemplateError("arc endpoints coincide")
    mid = 0.5 * (a + b)
    away = mid.copy()
    if np.linalg.norm(away) < 1e-12 * template.disk_radius:
        away = np.array([-chord[1], chord[0]])
    away = away / np.linalg.norm(away)
    h = template.arc_sagitta * clen
    apex = mid + h * away
    center, radius = _circumcircle(a, apex, b)
    ang_a = math.atan2(a[1] - center[1], a[0] - center[0])
    ang_b = math.atan2(b[1] - center[1], b[0] - center[0])
    ang_m = math.atan2(apex[1] - center[1], apex[0] - center[0])
    ccw_ab = _ccw_span(ang_a, ang_b)
    ccw_am = _ccw_span(ang_a, ang_m)
    if ccw_am <= ccw_ab:
        sweep = ccw_ab
    else:
        sweep = ccw_ab - 2 * math.pi
    theta = ang_a + t * sweep
    return center[None, :] + radius * np.column_stack([np.cos(theta), np.sin(theta)])


def _circumcircle(p1, p2, p3):
    ax, ay = p1
    bx, by = p2
    cx, cy = p3
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-15:
        raise TemplateError("arc points are collinear")
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
          + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
          + (cx * cx + cy * cy) * (bx - ax)) / d
    center = np.array([ux, uy])
    return center, float(np.linalg.norm(np.asarray(p1) - center))
