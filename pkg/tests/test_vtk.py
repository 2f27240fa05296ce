"""VTK output checked by an independent minimal legacy-format reader."""

import numpy as np
import pytest

from rveuq.fem import build_mesh, assemble, solve_correctors
from rveuq.materials import isotropic, stiffness_from_engineering
from rveuq.microstructure import laminate_rve, uniform_rve
from rveuq.vtkio import write_corrector_vtk, write_structured_points


def parse_legacy_vtk(path):
    """Stand-alone parser for the legacy ASCII subset used here."""
    with open(path) as f:
        tokens = f.read().split()
    out = {"arrays": {}}
    assert tokens[0] == "#" and "vtk" in tokens[1]
    i = tokens.index("DATASET")
    out["dataset"] = tokens[i + 1]
    if out["dataset"] == "STRUCTURED_POINTS":
        i = tokens.index("DIMENSIONS")
        out["dims"] = tuple(int(v) for v in tokens[i + 1:i + 4])
        i = tokens.index("CELL_DATA")
        n = int(tokens[i + 1])
        assert tokens[i + 2] == "SCALARS"
        name = tokens[i + 3]
        i = tokens.index("LOOKUP_TABLE")
        data = np.array([int(v) for v in tokens[i + 2:i + 2 + n]])
        out["arrays"][name] = data
    elif out["dataset"] == "UNSTRUCTURED_GRID":
        i = tokens.index("POINTS")
        npts = int(tokens[i + 1])
        pts = np.array([float(v) for v in tokens[i + 3:i + 3 + 3 * npts]])
        out["points"] = pts.reshape(npts, 3)
        i = tokens.index("CELLS")
        ncells, total = int(tokens[i + 1]), int(tokens[i + 2])
        raw = [int(v) for v in tokens[i + 3:i + 3 + total]]
        cells, pos = [], 0
        for _ in range(ncells):
            size = raw[pos]
            cells.append(raw[pos + 1:pos + 1 + size])
            pos += size + 1
        out["cells"] = cells
        i = tokens.index("CELL_TYPES")
        out["cell_types"] = [int(v) for v in tokens[i + 2:i + 2 + ncells]]
        i = tokens.index("POINT_DATA")
        n = int(tokens[i + 1])
        assert tokens[i + 2] == "VECTORS"
        name = tokens[i + 3]
        data = np.array([float(v) for v in tokens[i + 5:i + 5 + 3 * n]])
        out["arrays"][name] = data.reshape(n, 3)
    return out


def test_structured_points_round_trip(tmp_path, fiber_material, matrix_material):
    C1 = stiffness_from_engineering(isotropic(10.0, 0.3))
    C2 = stiffness_from_engineering(isotropic(1.0, 0.3))
    rve = laminate_rve(C1, C2, dims=(4, 5, 6))
    path = tmp_path / "material.vtk"
    write_structured_points(rve, path)
    doc = parse_legacy_vtk(path)
    assert doc["dims"] == (5, 6, 7)
    ids = doc["arrays"]["material_id"]
    assert len(ids) == 4 * 5 * 6
    # x varies fastest in VTK ordering
    expected = np.transpose(rve.material_id, (2, 1, 0)).ravel()
    assert np.array_equal(ids, expected)


def test_corrector_export_zero_for_homogeneous(tmp_path):
    C = stiffness_from_engineering(isotropic(2.0, 0.3))
    rve = uniform_rve(C, dims=(3, 3, 3))
    mesh = build_mesh(rve)
    corr = solve_correctors(assemble(rve, mesh))
    path = tmp_path / "chi_11.vtk"
    write_corrector_vtk(corr, 0, path)
    doc = parse_legacy_vtk(path)
    assert doc["dataset"] == "UNSTRUCTURED_GRID"
    assert len(doc["points"]) == 4 ** 3
    assert len(doc["cells"]) == 27
    assert all(t == 12 for t in doc["cell_types"])
    assert all(len(c) == 8 for c in doc["cells"])
    assert np.abs(doc["arrays"]["chi_11"]).max() <= 1e-10


def test_corrector_export_field_matches_solution(tmp_path):
    C1 = stiffness_from_engineering(isotropic(10.0, 0.3))
    C2 = stiffness_from_engineering(isotropic(1.0, 0.3))
    rve = laminate_rve(C1, C2, dims=(4, 4, 4))
    mesh = build_mesh(rve)
    corr = solve_correctors(assemble(rve, mesh))
    for case, name in ((2, "chi_33"), (5, "chi_12")):
        path = tmp_path / f"{name}.vtk"
        write_corrector_vtk(corr, case, path)
        doc = parse_legacy_vtk(path)
        assert name in doc["arrays"]
        # 9 significant digits round trip
        assert np.abs(doc["arrays"][name] - corr.chi[case]).max() <= \
            1e-8 * max(np.abs(corr.chi[case]).max(), 1e-12)
        assert np.abs(doc["points"] - mesh.nodes).max() <= 1e-9
        # connectivity references valid nodes
        assert max(max(c) for c in doc["cells"]) < len(doc["points"])


def test_byte_identical_rewrite(tmp_path):
    C = stiffness_from_engineering(isotropic(2.0, 0.3))
    rve = uniform_rve(C, dims=(3, 3, 3))
    mesh = build_mesh(rve)
    corr = solve_correctors(assemble(rve, mesh))
    a, b = tmp_path / "a.vtk", tmp_path / "b.vtk"
    write_corrector_vtk(corr, 3, a)
    write_corrector_vtk(corr, 3, b)
    assert a.read_bytes() == b.read_bytes()
