#!/usr/bin/env python3
"""Generate the synthetic holed-sphere cavity and its canonical seed set.

Writes cavity.vtk and seeds.json into the output directory, ready for
`frf flatten` or `frf serve`.
"""

import argparse
from pathlib import Path

from frf import synth
from frf.division import SeedSet
from frf.mesh import save_mesh


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("fixture"))
    parser.add_argument("--n-lat", type=int, default=64)
    parser.add_argument("--n-lon", type=int, default=110)
    parser.add_argument("--radius", type=float, default=30.0)
    args = parser.parse_args()

    fix = synth.make_cavity(n_lat=args.n_lat, n_lon=args.n_lon, radius=args.radius)
    args.out.mkdir(parents=True, exist_ok=True)
    save_mesh(fix.mesh, args.out / "cavity.vtk")
    seeds = SeedSet(holes={k: fix.seeds[k] for k in
                           ("LIPV", "LSPV", "RIPV", "RSPV", "LAA")},
                    mv=tuple(fix.seeds["MV"]))
    (args.out / "seeds.json").write_text(seeds.to_json() + "\n")
    print(f"wrote {args.out}/cavity.vtk ({fix.mesh.n_faces} faces) and seeds.json")


if __name__ == "__main__":
    main()
