"""Parametric tri-ply fiber micro-structure and its voxelization.

The unit cell stacks three equal-thickness plies along axis 3 with fiber
directions [0, -phi, +phi] in the 1-2 plane, one elliptical fiber per ply
per cell. In-plane cell lengths satisfy tan(phi) = L2/L1 so that the
wrapped +/-phi fibers are exactly periodic on the cell, and are sized so
each ply hits its target fiber volume fraction.

Length convention: the ply thickness is the unit of length (t = 1, so the
cell is L3 = 3 tall). Fiber cross-sections are ellipses with the minor
radius a along the thickness axis and the major radius b = a / (a/b)
in-plane; a2 is the thickness radius of the +/-phi fibers as a fraction of
the ply thickness, and the cross-section is clipped to its ply slab. The
0-degree fiber's radius a1 is derived from the 0-ply volume fraction
vf1 = vf1_over_vf2 * vf2 once the cell is fixed by the +/-phi plies.
"""

from dataclasses import dataclass, fields
import math

import numpy as np

from .materials import TransverseIsotropicMaterial, is_spd, rotate_stiffness, stiffness_from_engineering

PARAM_NAMES = ("vf2", "vf1_over_vf2", "a2", "a1_over_b1", "a2_over_b2", "phi")

#: Default admissible intervals for the six geometry parameters.
DEFAULT_BOUNDS = {
    "vf2": (0.60, 0.74),
    "vf1_over_vf2": (0.60, 1.00),
    "a2": (0.45, 0.55),
    "a1_over_b1": (0.167, 0.250),
    "a2_over_b2": (0.167, 0.250),
    "phi": (15.0, 75.0),
}

PLY_THICKNESS = 1.0
N_PLIES = 3
#: material_id convention: 0 = matrix, 1 + p = fiber of ply p.
MATRIX_ID = 0


class GeometryError(ValueError):
    """Geometry cannot be realized (fiber spacing smaller than its diameter)."""


class ResolutionError(ValueError):
    """Voxel grid too coarse to represent a fiber cross-section."""


@dataclass(frozen=True)
class GeometryParams:
    """The six random micro-structure parameters of one RVE realization."""

    vf2: float
    vf1_over_vf2: float
    a2: float
    a1_over_b1: float
    a2_over_b2: float
    phi: float  # off-axis ply angle [degrees]

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in PARAM_NAMES])

    @classmethod
    def from_array(cls, values) -> "GeometryParams":
        return cls(**dict(zip(PARAM_NAMES, map(float, values))))

    def validate(self, bounds: dict | None = None) -> None:
        """Check every parameter against its admissible interval."""
        bounds = DEFAULT_BOUNDS if bounds is None else bounds
        for name in PARAM_NAMES:
            lo, hi = bounds[name]
            val = getattr(self, name)
            if not (lo <= val <= hi):
                raise ValueError(f"{name} = {val} outside [{lo}, {hi}]")


@dataclass(frozen=True)
class FiberSpec:
    """Derived geometry of one ply's fiber family."""

    angle_deg: float     # in-plane fiber direction, from axis 1
    a: float             # thickness (minor) semi-axis, before ply clipping
    b: float             # in-plane (major) semi-axis
    spacing: float       # transverse repeat distance of the wrapped fiber
    z_center: float      # ply mid-height
    target_vf: float


@dataclass(frozen=True)
class CellPlan:
    """Unit-cell lengths plus per-ply fiber specifications."""

    lengths: tuple
    ply_thickness: float
    fibers: tuple  # (FiberSpec, FiberSpec, FiberSpec) for plies [0, -phi, +phi]


def clipped_ellipse_area(a: float, b: float, half_width: float) -> float:
    """Area of an ellipse with semi-axes (a, b) clipped to |z| <= half_width along a."""
    zc = min(a, half_width)
    th = math.asin(zc / a)
    return 2.0 * a * b * (th + math.sin(th) * math.cos(th))


def _solve_thickness_radius(area: float, ratio: float, half_width: float) -> float:
    """Thickness radius a with clipped area 'area', given b = a / ratio."""
    a = math.sqrt(area * ratio / math.pi)
    if a <= half_width:
        return a
    lo, hi = half_width, 2.0 * half_width
    while clipped_ellipse_area(hi, hi / ratio, half_width) < area:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if clipped_ellipse_area(mid, mid / ratio, half_width) < area:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def plan_cell(geom: GeometryParams, bounds: dict | None = None) -> CellPlan:
    """Derive cell lengths and fiber specs; raises GeometryError when infeasible."""
    geom.validate(bounds)
    t = PLY_THICKNESS
    phi = math.radians(geom.phi)
    vf1 = geom.vf1_over_vf2 * geom.vf2

    # +/-phi plies fix the cell: commensurability requires tan(phi) = L2/L1,
    # and the wrapped fiber then repeats at transverse spacing L1*sin(phi).
    a2 = geom.a2 * t
    b2 = a2 / geom.a2_over_b2
    area2 = clipped_ellipse_area(a2, b2, 0.5 * t)
    w2 = area2 / (t * geom.vf2)
    if w2 < 2.0 * b2:
        raise GeometryError(
            f"vf2 = {geom.vf2} needs fiber spacing {w2:.3f} < diameter {2 * b2:.3f}")
    L1 = w2 / math.sin(phi)
    L2 = L1 * math.tan(phi)

    # The 0-degree ply (fibers along axis 1, spacing L2) matches vf1 by
    # sizing its fiber at fixed aspect ratio.
    w1 = L2
    area1 = vf1 * t * w1
    a1 = _solve_thickness_radius(area1, geom.a1_over_b1, 0.5 * t)
    b1 = a1 / geom.a1_over_b1
    if w1 < 2.0 * b1:
        raise GeometryError(
            f"vf1 = {vf1:.3f} needs fiber spacing {w1:.3f} < diameter {2 * b1:.3f}")

    fibers = (
        FiberSpec(0.0, a1, b1, w1, 0.5 * t, vf1),
        FiberSpec(-geom.phi, a2, b2, w2, 1.5 * t, geom.vf2),
        FiberSpec(geom.phi, a2, b2, w2, 2.5 * t, geom.vf2),
    )
    return CellPlan(lengths=(L1, L2, N_PLIES * t), ply_thickness=t, fibers=fibers)


@dataclass(frozen=True)
class VoxelRVE:
    """Structured voxel grid with a per-voxel 6x6 Voigt stiffness table."""

    dims: tuple
    cell_lengths: tuple
    material_id: np.ndarray        # (n1, n2, n3) int
    stiffness_table: np.ndarray    # (n_materials, 6, 6)

    def __post_init__(self):
        if self.material_id.shape != tuple(self.dims):
            raise ValueError("material_id shape does not match dims")
        if self.material_id.min() < 0 or self.material_id.max() >= len(self.stiffness_table):
            raise ValueError("material_id refers to a missing stiffness_table entry")
        for k, C in enumerate(self.stiffness_table):
            if np.abs(C - C.T).max() > 1e-12 * max(np.abs(C).max(), 1.0):
                raise ValueError(f"stiffness_table[{k}] is not symmetric")
            if not is_spd(C):
                raise ValueError(f"stiffness_table[{k}] is not positive definite")

    @property
    def voxel_sizes(self) -> np.ndarray:
        return np.asarray(self.cell_lengths) / np.asarray(self.dims)

    @property
    def volume(self) -> float:
        return float(np.prod(self.cell_lengths))


def uniform_rve(C: np.ndarray, dims=(8, 8, 8), lengths=(1.0, 1.0, 1.0)) -> VoxelRVE:
    """Single-material cell (degenerate but valid RVE)."""
    mat = np.zeros(dims, dtype=np.int32)
    return VoxelRVE(tuple(dims), tuple(lengths), mat, np.asarray(C)[None, :, :].copy())


def laminate_rve(C_bottom: np.ndarray, C_top: np.ndarray, dims=(16, 16, 16),
                 lengths=(1.0, 1.0, 1.0), fraction: float = 0.5) -> VoxelRVE:
    """Two-phase laminate layered along axis 3; bottom layer takes 'fraction'."""
    n1, n2, n3 = dims
    z = (np.arange(n3) + 0.5) / n3
    mat = np.zeros(dims, dtype=np.int32)
    mat[:, :, z >= fraction] = 1
    table = np.stack([np.asarray(C_bottom), np.asarray(C_top)])
    return VoxelRVE(tuple(dims), tuple(lengths), mat, table)


def _voxel_centers(dims, lengths):
    axes = [(np.arange(n) + 0.5) * (L / n) for n, L in zip(dims, lengths)]
    return np.meshgrid(*axes, indexing="ij")


def voxelize(geom: GeometryParams,
             fiber: TransverseIsotropicMaterial,
             matrix: TransverseIsotropicMaterial,
             resolution=(16, 16, 16),
             bounds: dict | None = None) -> VoxelRVE:
    """Rasterize one geometry realization onto a structured voxel grid.

    A voxel belongs to a fiber when its center lies inside the periodically
    wrapped elliptical cylinder of its ply. The stiffness table holds the
    matrix (id 0) and one rotated copy of the fiber stiffness per ply.
    """
    dims = tuple(int(n) for n in resolution)
    if min(dims) < 4:
        raise ResolutionError("resolution must be at least 4 voxels per axis")
    plan = plan_cell(geom, bounds)
    L1, L2, L3 = plan.lengths
    t = plan.ply_thickness
    h3 = L3 / dims[2]

    for spec in plan.fibers:
        if min(spec.a, 0.5 * t) < 2.0 * h3:
            raise ResolutionError(
                f"fiber minor radius {min(spec.a, 0.5 * t):.3f} spans fewer than "
                f"2 voxels (h3 = {h3:.3f})")

    X, Y, Z = _voxel_centers(dims, plan.lengths)
    ply = np.minimum((Z / t).astype(np.int32), N_PLIES - 1)
    material = np.zeros(dims, dtype=np.int32)
    for p, spec in enumerate(plan.fibers):
        th = math.radians(spec.angle_deg)
        # signed in-plane distance from the fiber plane through the origin,
        # wrapped onto the nearest periodic image
        s = -X * math.sin(th) + Y * math.cos(th)
        s -= spec.spacing * np.round(s / spec.spacing)
        zeta = Z - spec.z_center
        inside = (ply == p) & ((zeta / spec.a) ** 2 + (s / spec.b) ** 2 <= 1.0)
        material[inside] = 1 + p

    C_fiber = stiffness_from_engineering(fiber)
    C_matrix = stiffness_from_engineering(matrix)
    table = np.stack([C_matrix] + [rotate_stiffness(C_fiber, spec.angle_deg)
                                   for spec in plan.fibers])
    rve = VoxelRVE(dims, tuple(plan.lengths), material, table)

    achieved = ply_fiber_fractions(rve)
    tol = 2.0 / min(dims)
    for p, spec in enumerate(plan.fibers):
        if abs(achieved[p] - spec.target_vf) > tol:
            raise ResolutionError(
                f"ply {p} voxel fiber fraction {achieved[p]:.3f} misses target "
                f"{spec.target_vf:.3f} by more than {tol:.3f}")
    return rve


def ply_fiber_fractions(rve: VoxelRVE) -> np.ndarray:
    """Rasterized fiber volume of each ply over the exact ply volume.

    Fiber voxels are counted by material id (1 + ply index) and normalized
    by cell_volume / 3, not by the voxel-layer set of the ply: when n3 is
    not a multiple of 3 the layer sets over- or under-cover the ply slabs
    and would bias the fraction.
    """
    voxel_volume = float(np.prod(rve.voxel_sizes))
    ply_volume = rve.volume / N_PLIES
    counts = np.bincount(rve.material_id.ravel(), minlength=N_PLIES + 1)
    return counts[1:N_PLIES + 1] * voxel_volume / ply_volume
