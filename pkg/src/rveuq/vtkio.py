"""Legacy-ASCII VTK writers for voxel material fields and corrector fields.

All floats are written with 9 significant digits so repeated runs produce
byte-identical files.
"""

import numpy as np

from .fem import CorrectorSolution
from .microstructure import VoxelRVE


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def write_structured_points(rve: VoxelRVE, path, title: str = "material") -> None:
    """Material ids as cell scalars on a STRUCTURED_POINTS dataset."""
    n1, n2, n3 = rve.dims
    h = rve.voxel_sizes
    with open(path, "w") as f:
        f.write("# vtk DataFile Version 3.0\n")
        f.write(f"{title}\n")
        f.write("ASCII\n")
        f.write("DATASET STRUCTURED_POINTS\n")
        f.write(f"DIMENSIONS {n1 + 1} {n2 + 1} {n3 + 1}\n")
        f.write("ORIGIN 0 0 0\n")
        f.write(f"SPACING {_fmt(h[0])} {_fmt(h[1])} {_fmt(h[2])}\n")
        f.write(f"CELL_DATA {n1 * n2 * n3}\n")
        f.write("SCALARS material_id int 1\n")
        f.write("LOOKUP_TABLE default\n")
        # VTK structured data varies x fastest
        ids = np.transpose(rve.material_id, (2, 1, 0)).ravel()
        for v in ids:
            f.write(f"{int(v)}\n")


def write_corrector_vtk(corr: CorrectorSolution, case: int, path) -> None:
    """One corrector field as point vectors on an UNSTRUCTURED_GRID of hexes.

    The field name follows the case: chi_11, chi_22, chi_33, chi_23,
    chi_13, chi_12.
    """
    names = ("chi_11", "chi_22", "chi_33", "chi_23", "chi_13", "chi_12")
    mesh = corr.mesh
    field = corr.chi[case]
    with open(path, "w") as f:
        f.write("# vtk DataFile Version 3.0\n")
        f.write(f"{names[case]}\n")
        f.write("ASCII\n")
        f.write("DATASET UNSTRUCTURED_GRID\n")
        f.write(f"POINTS {mesh.n_nodes} double\n")
        for xyz in mesh.nodes:
            f.write(" ".join(_fmt(v) for v in xyz) + "\n")
        nel = len(mesh.hexes)
        f.write(f"CELLS {nel} {9 * nel}\n")
        for hx in mesh.hexes:
            f.write("8 " + " ".join(str(int(v)) for v in hx) + "\n")
        f.write(f"CELL_TYPES {nel}\n")
        for _ in range(nel):
            f.write("12\n")
        f.write(f"POINT_DATA {mesh.n_nodes}\n")
        f.write(f"VECTORS {names[case]} double\n")
        for vec in field:
            f.write(" ".join(_fmt(v) for v in vec) + "\n")
