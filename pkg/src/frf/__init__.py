"""Fast regional flattening of left-atrium-like surfaces onto a disk template."""

from .errors import (
    DivisionError,
    FrfError,
    MeshError,
    SolveError,
    StageError,
    TemplateError,
    TransferError,
)
from .mesh import (
    BoundaryLoop,
    SparseLaplacian,
    TriMesh,
    boundary_loops,
    close_hole,
    cotangent_laplacian,
    load_mesh,
    modify_laplacian,
    orient_consistently,
    save_mesh,
    subdivide_midpoint,
)
from .division import (
    DivisionResult,
    SeedSet,
    SubcontourSplit,
    divide,
    geodesic_path,
    project_and_open,
    recompute_subcontours,
)
from .template import (
    ConstraintSet,
    LayoutConfig,
    TemplateSpec,
    build_template,
    target_coordinates,
)
from .flatten import (
    FlatMesh,
    SolveReport,
    flatten_pipeline,
    refine_boundary,
    solve_constrained,
)
from .distortion import (
    DistortionReport,
    area_ratio,
    distortion_report,
    histogram_entropy,
    isotropy_ratio,
    jacobian,
    texture_spots,
    texture_stripes,
)
from .transfer import (
    Parcellation2D,
    annulus_parcellation,
    compare_maps,
    lift_to_3d,
    map_parcellation,
)

__version__ = "0.1.0"
