import math

import numpy as np
import pytest

from rveuq.materials import isotropic, stiffness_from_engineering
from rveuq.microstructure import (DEFAULT_BOUNDS, PARAM_NAMES, GeometryError,
                                  GeometryParams, ResolutionError, VoxelRVE,
                                  clipped_ellipse_area, plan_cell,
                                  ply_fiber_fractions, uniform_rve, voxelize)


def midpoint_geometry():
    return GeometryParams(*[(lo + hi) / 2.0 for lo, hi in DEFAULT_BOUNDS.values()])


def test_bounds_validation():
    g = midpoint_geometry()
    g.validate()
    with pytest.raises(ValueError, match="vf2"):
        GeometryParams(0.8, 0.8, 0.5, 0.2, 0.2, 45.0).validate()
    with pytest.raises(ValueError, match="phi"):
        GeometryParams(0.65, 0.8, 0.5, 0.2, 0.2, 5.0).validate()


def test_clipped_ellipse_area_limits():
    assert clipped_ellipse_area(1.0, 2.0, 1.0) == pytest.approx(2.0 * math.pi)
    assert clipped_ellipse_area(1.0, 2.0, 10.0) == pytest.approx(2.0 * math.pi)
    # heavy clipping approaches the 2b-by-2h bounding rectangle of the band
    assert clipped_ellipse_area(100.0, 1.0, 0.5) == pytest.approx(2.0, rel=1e-3)


def test_plan_cell_commensurate_and_on_target():
    g = midpoint_geometry()
    plan = plan_cell(g)
    L1, L2, L3 = plan.lengths
    assert L2 / L1 == pytest.approx(math.tan(math.radians(g.phi)), rel=1e-12)
    assert L3 == pytest.approx(3.0)
    # analytic ply fractions reproduce the targets
    for spec in plan.fibers:
        area = clipped_ellipse_area(spec.a, spec.b, 0.5)
        assert area / spec.spacing == pytest.approx(spec.target_vf, rel=1e-10)
    assert plan.fibers[1].angle_deg == -g.phi
    assert plan.fibers[2].angle_deg == g.phi


def test_infeasible_volume_fraction_raises():
    # small thickness radius cannot carry vf2 = 0.74 without fiber overlap
    g = GeometryParams(0.74, 0.8, 0.45, 0.2, 0.2, 45.0)
    with pytest.raises(GeometryError, match="spacing"):
        plan_cell(g)


def test_voxelize_too_coarse_raises(fiber_material, matrix_material):
    with pytest.raises(ResolutionError):
        voxelize(midpoint_geometry(), fiber_material, matrix_material, (8, 8, 8))
    with pytest.raises(ResolutionError):
        voxelize(midpoint_geometry(), fiber_material, matrix_material, (3, 3, 3))


def test_degenerate_single_material():
    mat = isotropic(3.0, 0.3)
    rve = voxelize(midpoint_geometry(), mat, mat, (16, 16, 16))
    C0 = rve.stiffness_table[0]
    for C in rve.stiffness_table:
        assert np.allclose(C, C0, rtol=1e-12, atol=1e-12)


def test_midpoint_fraction_accuracy(fiber_material, matrix_material):
    g = midpoint_geometry()
    plan = plan_cell(g)
    targets = np.array([s.target_vf for s in plan.fibers])
    rve = voxelize(g, fiber_material, matrix_material, (32, 32, 32))
    achieved = ply_fiber_fractions(rve)
    assert np.abs(achieved - targets).max() <= 0.05


def test_fraction_error_decreases_under_refinement(fiber_material, matrix_material):
    g = midpoint_geometry()
    plan = plan_cell(g)
    targets = np.array([s.target_vf for s in plan.fibers])
    errors = []
    for n in (16, 32, 64):
        rve = voxelize(g, fiber_material, matrix_material, (n, n, n))
        errors.append(np.abs(ply_fiber_fractions(rve) - targets).max())
    assert errors[0] > errors[1] > errors[2]


def membership_oracle(plan, x, y, z):
    """Scalar fiber-membership rule, written independently of the voxelizer."""
    t = plan.ply_thickness
    p = min(int(z / t), 2)
    spec = plan.fibers[p]
    th = math.radians(spec.angle_deg)
    s = -x * math.sin(th) + y * math.cos(th)
    s -= spec.spacing * round(s / spec.spacing)
    zeta = z - spec.z_center
    return 1 + p if (zeta / spec.a) ** 2 + (s / spec.b) ** 2 <= 1.0 else 0


def test_material_field_is_periodic(fiber_material, matrix_material):
    g = midpoint_geometry()
    plan = plan_cell(g)
    rve = voxelize(g, fiber_material, matrix_material, (12, 12, 12))
    L1, L2, L3 = rve.cell_lengths
    h = rve.voxel_sizes
    rng = np.random.default_rng(0)
    for _ in range(200):
        i, j, k = (int(rng.integers(n)) for n in rve.dims)
        x, y, z = (i + 0.5) * h[0], (j + 0.5) * h[1], (k + 0.5) * h[2]
        expected = membership_oracle(plan, x, y, z)
        assert rve.material_id[i, j, k] == expected
        # the same center translated by full in-plane periods keeps its material
        for dx, dy in ((L1, 0.0), (0.0, L2), (2 * L1, -L2)):
            assert membership_oracle(plan, x + dx, y + dy, z) == expected


def test_stiffness_table_symmetric_spd_for_random_geometries(fiber_material,
                                                             matrix_material):
    rng = np.random.default_rng(5)
    lo = np.array([b[0] for b in DEFAULT_BOUNDS.values()])
    hi = np.array([b[1] for b in DEFAULT_BOUNDS.values()])
    checked = 0
    while checked < 5:
        g = GeometryParams(*(lo + (hi - lo) * rng.random(6)))
        try:
            rve = voxelize(g, fiber_material, matrix_material, (16, 16, 16))
        except (GeometryError, ResolutionError):
            continue
        for C in rve.stiffness_table:
            assert np.abs(C - C.T).max() <= 1e-12 * np.abs(C).max()
            assert np.linalg.eigvalsh(C).min() > 0
        checked += 1


def test_voxel_rve_validation():
    C = stiffness_from_engineering(isotropic(2.0, 0.3))
    with pytest.raises(ValueError, match="missing stiffness_table"):
        VoxelRVE((2, 2, 2), (1, 1, 1), np.ones((2, 2, 2), dtype=int), C[None])
    bad = C.copy()
    bad[0, 0] = -5.0
    with pytest.raises(ValueError, match="positive definite"):
        VoxelRVE((2, 2, 2), (1, 1, 1), np.zeros((2, 2, 2), dtype=int), bad[None])


def test_uniform_rve_helper():
    C = stiffness_from_engineering(isotropic(2.0, 0.3))
    rve = uniform_rve(C, dims=(4, 4, 4), lengths=(2.0, 1.0, 1.0))
    assert rve.volume == pytest.approx(2.0)
    assert np.allclose(rve.voxel_sizes, [0.5, 0.25, 0.25])
