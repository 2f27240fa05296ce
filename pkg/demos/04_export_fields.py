"""Export corrector vector fields and the material grid as legacy VTK.

The files open in ParaView or any VTK reader: material.vtk carries the
voxel material ids, chi_mn.vtk the six periodic corrector fields.
"""

import os

from rveuq.pipeline import cmd_doe, cmd_export_vtk, load_config

out = os.path.join(os.path.dirname(__file__), "out_vtk")
config = load_config(None, {"n_runs": 4, "seed": 3, "output_dir": out})

cmd_doe(config)
for path in cmd_export_vtk(config, run_id=0):
    print(path)
