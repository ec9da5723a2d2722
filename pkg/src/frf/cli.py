"""Command-line front door: flatten, divide, metrics, texture, template,
transfer, and the local HTTP service."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from .distortion import distortion_report, texture_spots, texture_stripes
from .division import SeedSet, divide, project_and_open
from .errors import FrfError, StageError
from .flatten import DEFAULT_W, FlatMesh, flatten_pipeline, label_boundary_loops
from .mesh import close_hole, load_mesh, save_mesh
from .template import PRESETS, TemplateSpec, build_template
from .transfer import (Parcellation2D, annulus_parcellation, lift_to_3d,
                       map_parcellation)

TEMPLATE_DIR_ENV = "FRF_TEMPLATE_DIR"


def _load_config(path):
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise click.UsageError(f"config file not found: {p}")
    return json.loads(p.read_text())


def _resolve_template(name_or_path: str) -> TemplateSpec:
    if name_or_path in PRESETS:
        return build_template(name_or_path)
    p = Path(name_or_path)
    if not p.exists():
        tdir = os.environ.get(TEMPLATE_DIR_ENV)
        if tdir:
            alt = Path(tdir) / name_or_path
            if not alt.exists() and not name_or_path.endswith(".json"):
                alt = Path(tdir) / (name_or_path + ".json")
            p = alt
    if p.exists():
        return TemplateSpec.from_json(p.read_text())
    raise click.UsageError(
        f"unknown template {name_or_path!r}: not a preset ({sorted(PRESETS)}) "
        "and no such file"
    )


def _load_seeds(path) -> SeedSet:
    p = Path(path)
    if not p.exists():
        raise click.UsageError(f"seeds file not found: {p}")
    return SeedSet.from_json(p.read_text())


def _flat_to_mesh_file(flat: FlatMesh, path: Path):
    save_mesh(flat.to_mesh(), path)


def _fail_stage(exc: StageError):
    click.echo(f"error in stage {exc.stage}: {exc.cause}", err=True)
    sys.exit(1)


@click.group()
def main():
    """Regional flattening toolkit for left-atrium-like surfaces."""


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON config; flags override its entries.")
@click.option("--mesh", "mesh_path", type=click.Path(), default=None)
@click.option("--seeds", "seeds_path", type=click.Path(), default=None)
@click.option("--template", "template_name", default=None,
              help="Preset name or template JSON path.")
@click.option("--w", type=float, default=None, show_default="1000")
@click.option("--weight-mode", type=click.Choice(["boundary-rows", "uniform"]),
              default=None)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--metrics/--no-metrics", default=None,
              help="Also write the distortion report.")
@click.option("--subdivide", is_flag=True, default=False,
              help="Apply one uniform 1:4 subdivision pass before flattening "
                   "(reduces path angularity on coarse meshes).")
def flatten(config_path, mesh_path, seeds_path, template_name, w, weight_mode,
            out_dir, metrics, subdivide):
    """Flatten a clipped cavity onto the disk template."""
    cfg = _load_config(config_path)
    mesh_path = mesh_path or cfg.get("mesh")
    seeds_path = seeds_path or cfg.get("seeds")
    template_name = template_name or cfg.get("template", "population")
    w = w if w is not None else float(cfg.get("w", DEFAULT_W))
    weight_mode = weight_mode or cfg.get("weight_mode", "boundary-rows")
    out_dir = out_dir or cfg.get("out", ".")
    metrics = metrics if metrics is not None else bool(cfg.get("metrics", False))
    subdivide = subdivide or bool(cfg.get("subdivide", False))

    if not mesh_path:
        raise click.UsageError("an input mesh is required (--mesh or config)")
    if not seeds_path:
        raise click.UsageError("a seeds file is required (--seeds or config)")
    if w <= 0:
        raise click.UsageError("w must be positive")
    mesh_file = Path(mesh_path)
    if not mesh_file.exists():
        raise click.UsageError(f"mesh file not found: {mesh_file}")
    seeds = _load_seeds(seeds_path)
    template = _resolve_template(template_name)

    mesh = load_mesh(mesh_file)
    if subdivide:
        # original vertices keep their indices, so the seed set stays valid
        from .mesh import subdivide_midpoint

        mesh = subdivide_midpoint(mesh)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        flat, report = flatten_pipeline(mesh, seeds, template, w=w,
                                        weight_mode=weight_mode)
    except StageError as exc:
        _fail_stage(exc)
    # timing stays out of the artifact so repeated runs are byte-identical;
    # it is echoed below instead
    _flat_to_mesh_file(flat, out / "flat.vtk")
    (out / "solve_report.json").write_text(
        json.dumps(report.to_dict(include_timing=False), indent=2, sort_keys=True) + "\n")
    (out / "template.json").write_text(template.to_json() + "\n")
    if metrics:
        rep = distortion_report(mesh, flat)
        (out / "distortion_report.json").write_text(rep.to_json() + "\n")
        rep.write_csv(out / "distortion.csv")
    click.echo(f"flattened {mesh_file.name}: {report.n_vertices} vertices, "
               f"boundary deviation {report.boundary_dev_after:.2e}, "
               f"{report.flipped_after} flipped faces, {report.wall_ms:.0f} ms")


@main.command(name="divide")
@click.option("--mesh", "mesh_path", type=click.Path(), required=True)
@click.option("--seeds", "seeds_path", type=click.Path(), required=True)
@click.option("--out", "out_dir", type=click.Path(), default=".")
def divide_cmd(mesh_path, seeds_path, out_dir):
    """Divide a cavity into the five regions and export labels + paths."""
    mesh_file = Path(mesh_path)
    if not mesh_file.exists():
        raise click.UsageError(f"mesh file not found: {mesh_file}")
    seeds = _load_seeds(seeds_path)
    mesh = load_mesh(mesh_file)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        labelled = label_boundary_loops(mesh, seeds)
        closed = mesh
        for label in ("LIPV", "LSPV", "RIPV", "RSPV", "LAA"):
            closed = close_hole(closed, labelled[label])
        division = divide(closed, seeds)
        projection = project_and_open(closed, division, seeds)
    except FrfError as exc:
        click.echo(f"division failed: {exc}", err=True)
        sys.exit(1)
    constraint = np.zeros(mesh.n_vertices)
    constraint[projection.boundary_idx] = 1.0
    constraint[projection.regional_idx] = 2.0
    keep = [fi for fi in range(closed.n_faces) if fi not in set(closed.cover_faces)]
    region = division.region_label[keep].astype(np.float64)
    save_mesh(mesh.with_channel("constraint", constraint), out / "division.vtk",
              cell_data={"region": region})
    payload = {
        "paths": {k: list(v) for k, v in sorted(division.paths.items())},
        "intersection_points": {k: list(v) for k, v in
                                sorted(division.intersection_points.items())},
        "region_counts": {f"R{c}": int((division.region_label == c).sum())
                          for c in range(1, 6)},
    }
    (out / "division.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    click.echo(f"divided {mesh_file.name}: " + ", ".join(
        f"R{c}={payload['region_counts'][f'R{c}']}" for c in range(1, 6)))


@main.command()
@click.option("--mesh3d", "mesh_path", type=click.Path(), required=True)
@click.option("--flat", "flat_path", type=click.Path(), required=True)
@click.option("--out", "out_dir", type=click.Path(), default=".")
def metrics(mesh_path, flat_path, out_dir):
    """Distortion report for a 3D mesh and its flat counterpart."""
    mesh = load_mesh(Path(mesh_path))
    flat_mesh = load_mesh(Path(flat_path))
    flat = FlatMesh(xy=flat_mesh.vertices[:, :2], faces=flat_mesh.faces,
                    channels=dict(flat_mesh.channels),
                    vertex_ids=flat_mesh.vertex_ids)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        rep = distortion_report(mesh, flat)
    except FrfError as exc:
        click.echo(f"metrics failed: {exc}", err=True)
        sys.exit(1)
    (out / "distortion_report.json").write_text(rep.to_json() + "\n")
    rep.write_csv(out / "distortion.csv")
    click.echo(f"alpha weighted mean {rep.summary['alpha_weighted_mean']:.9f}, "
               f"entropy {rep.alpha_entropy:.4f} / {rep.beta_entropy:.4f}")


@main.command()
@click.option("--mesh", "mesh_path", type=click.Path(), required=True)
@click.option("--stripes", nargs=2, type=float, default=None,
              help="SEED_VERTEX BAND_WIDTH")
@click.option("--spots", nargs=2, type=float, default=None,
              help="COUNT RADIUS")
@click.option("--out", "out_path", type=click.Path(), required=True)
def texture(mesh_path, stripes, spots, out_path):
    """Bake synthetic stripe or spot textures into mesh channels."""
    if not stripes and not spots:
        raise click.UsageError("choose --stripes or --spots")
    mesh = load_mesh(Path(mesh_path))
    try:
        if stripes:
            seed, width = int(stripes[0]), float(stripes[1])
            mesh = mesh.with_channel("stripes", texture_stripes(mesh, seed, width))
        if spots:
            count, radius = int(spots[0]), float(spots[1])
            mesh = mesh.with_channel("spots", texture_spots(mesh, count, radius))
    except FrfError as exc:
        click.echo(f"texture failed: {exc}", err=True)
        sys.exit(1)
    save_mesh(mesh, Path(out_path))
    click.echo(f"wrote {out_path}")


@main.command()
@click.option("--name", default=None, help="Preset to export.")
@click.option("--list", "list_presets", is_flag=True, default=False)
@click.option("--out", "out_path", type=click.Path(), default=None)
def template(name, list_presets, out_path):
    """Export template presets as JSON."""
    if list_presets:
        for preset in sorted(PRESETS):
            click.echo(preset)
        return
    if not name:
        raise click.UsageError("give --name or --list")
    spec = _resolve_template(name)
    text = spec.to_json() + "\n"
    if out_path:
        Path(out_path).write_text(text)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--ref", "ref_path", type=click.Path(), required=True,
              help="Reference flat mesh (vtk/obj with z=0).")
@click.option("--template", "template_name", required=True)
@click.option("--target", "target_path", type=click.Path(), default=None)
@click.option("--mesh3d", "mesh3d_path", type=click.Path(), default=None,
              help="Lift the mapped codes to this 3D mesh.")
@click.option("--parcellation", "parc_path", type=click.Path(), default=None,
              help="Parcellation JSON; default builds the per-vein preset.")
@click.option("--pairs", "ipsilateral", is_flag=True, default=False,
              help="Build the ipsilateral-pair preset instead.")
@click.option("--out", "out_dir", type=click.Path(), default=".")
def transfer(ref_path, template_name, target_path, mesh3d_path, parc_path,
             ipsilateral, out_dir):
    """Build or transfer a parcellation between flat maps (and back to 3D)."""
    spec = _resolve_template(template_name)
    ref_mesh = load_mesh(Path(ref_path))
    ref = FlatMesh(xy=ref_mesh.vertices[:, :2], faces=ref_mesh.faces,
                   channels=dict(ref_mesh.channels),
                   vertex_ids=ref_mesh.vertex_ids, template_hash=spec.spec_hash)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if parc_path:
            parc = Parcellation2D.from_json(Path(parc_path).read_text())
        else:
            parc = annulus_parcellation(ref, spec, ipsilateral_pairs=ipsilateral)
            (out / "parcellation.json").write_text(parc.to_json() + "\n")
        if target_path:
            tgt_mesh = load_mesh(Path(target_path))
            target = FlatMesh(xy=tgt_mesh.vertices[:, :2], faces=tgt_mesh.faces,
                              channels=dict(tgt_mesh.channels),
                              vertex_ids=tgt_mesh.vertex_ids,
                              template_hash=spec.spec_hash)
            codes = map_parcellation(ref, parc, target)
            save_mesh(tgt_mesh.with_channel("parcellation", codes.astype(float)),
                      out / "target_parcellation.vtk")
            if mesh3d_path:
                mesh3d = load_mesh(Path(mesh3d_path))
                lifted = lift_to_3d(target, codes, mesh3d)
                save_mesh(mesh3d.with_channel("parcellation", lifted.astype(float)),
                          out / "mesh3d_parcellation.vtk")
    except FrfError as exc:
        click.echo(f"transfer failed: {exc}", err=True)
        sys.exit(1)
    click.echo("transfer done")


@main.command()
@click.option("--port", type=int, default=8000)
@click.option("--mesh-dir", "mesh_dir", type=click.Path(), required=True)
@click.option("--static-dir", "static_dir", type=click.Path(), default=None,
              help="Directory with the browser UI build.")
@click.option("--host", default="127.0.0.1")
def serve(port, mesh_dir, static_dir, host):
    """Serve meshes and the flattening pipeline over HTTP for the browser UI."""
    import uvicorn

    from .service import create_app

    app = create_app(Path(mesh_dir), static_dir=Path(static_dir) if static_dir else None)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
