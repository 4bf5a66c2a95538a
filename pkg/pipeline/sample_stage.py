import math
from dataclasses import dataclass, field

from pipeline.verify_stage import grid_map
from tools.geometry import ParamSurface, angle_data, curvatures, first_form
from tools.models import GridSpec, Point

CSV_COLUMNS = ("x", "y", "rx", "ry", "rz", "E", "F", "G", "K", "H", "theta", "theta_x", "theta_y")


@dataclass(frozen=True)
class SampleRow:
    x: float
    y: float
    rx: float
    ry: float
    rz: float
    E: float
    F: float
    G: float
    K: float
    H: float
    theta: float
    theta_x: float
    theta_y: float

    def values(self) -> tuple[float, ...]:
        return tuple(getattr(self, c) for c in CSV_COLUMNS)


def sample_point(S: ParamSurface, p: Point) -> SampleRow:
    r = S.position(p)
    form = first_form(S, p)
    curv = curvatures(S, p)
    ad = angle_data(S, p)
    return SampleRow(
        x=p[0],
        y=p[1],
        rx=r[0],
        ry=r[1],
        rz=r[2],
        E=form.E,
        F=form.F,
        G=form.G,
        K=curv.K,
        H=curv.H,
        theta=ad.theta,
        theta_x=ad.theta_x,
        theta_y=ad.theta_y,
    )


def sample_surface(S: ParamSurface, grid: GridSpec, threads: int = 1) -> list[SampleRow]:
    """Sample position, metric, curvatures and angle on the grid, row-major (y outer, x inner)."""
    return grid_map(lambda p: sample_point(S, p), grid.points(S.domain), threads)


@dataclass
class MeshGrid:
    """nx * ny vertices; each grid cell split into two triangles (0-based indices)."""

    nx: int
    ny: int
    vertices: list[tuple[float, float, float]]
    faces: list[tuple[int, int, int]] = field(default_factory=list)
    scalars: dict[str, list[float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.vertices) != self.nx * self.ny:
            raise ValueError(f"mesh has {len(self.vertices)} vertices, expected {self.nx * self.ny}")
        if any(not math.isfinite(c) for v in self.vertices for c in v):
            raise ValueError("mesh vertices contain NaN or infinite coordinates")
        if not self.faces:
            self.faces = grid_triangles(self.nx, self.ny)
        n = len(self.vertices)
        if any(not 0 <= i < n for f in self.faces for i in f):
            raise ValueError("mesh face index out of range")
        for name, values in self.scalars.items():
            if len(values) != n:
                raise ValueError(f"scalar '{name}' has {len(values)} values for {n} vertices")


def grid_triangles(nx: int, ny: int) -> list[tuple[int, int, int]]:
    faces = []
    for j in range(ny - 1):
        for i in range(nx - 1):
            v00 = j * nx + i
            v10, v01 = v00 + 1, v00 + nx
            v11 = v01 + 1
            faces.append((v00, v10, v11))
            faces.append((v00, v11, v01))
    return faces


def mesh_from_samples(rows: list[SampleRow], grid: GridSpec) -> MeshGrid:
    return MeshGrid(
        nx=grid.nx,
        ny=grid.ny,
        vertices=[(r.rx, r.ry, r.rz) for r in rows],
        scalars={
            "K": [r.K for r in rows],
            "H": [r.H for r in rows],
            "theta": [r.theta for r in rows],
        },
    )


def build_mesh(S: ParamSurface, grid: GridSpec, threads: int = 1) -> MeshGrid:
    return mesh_from_samples(sample_surface(S, grid, threads), grid)
