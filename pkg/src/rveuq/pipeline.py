"""Batch orchestration: design, homogenization runs, surrogate fit, analysis.

Commands hand data to each other through files in one output directory:

    design.csv / design.json     Latin Hypercube design and its provenance
    records.jsonl                one homogenization record per run id
    run_timings.json             wall times (volatile; kept out of records)
    pca_model.json               flattened-stiffness PCA
    pce_lambda{m}.json           PCE surrogate per retained component
    fit_report.json              explained variance and fit quality summary
    sobol_lambda{m}.csv          sensitivity indices per component
    samples.csv / samples_meta.json   surrogate-sampled stiffness entries

Every command is deterministic given the configuration and seed; rerunning
produces byte-identical CSV/JSON outputs (timings live in their own file).
"""

import concurrent.futures
import json
import os
import time
import warnings
from dataclasses import dataclass

import numpy as np

from . import fem, pca, pce, sampling, sobol, vtkio
from .materials import TransverseIsotropicMaterial
from .microstructure import (DEFAULT_BOUNDS, PARAM_NAMES, GeometryParams,
                             ply_fiber_fractions, voxelize)

#: Published configuration schema: key -> expected content (defaults below).
CONFIG_SCHEMA = {
    "materials": "fiber and matrix engineering constants {E1, E2, nu12, G12, G23} [GPa]",
    "bounds": "per-parameter [min, max] for " + ", ".join(PARAM_NAMES),
    "n_runs": "number of design points (int >= 1)",
    "seed": "design seed (int)",
    "resolution": "[n1, n2, n3] voxels, each >= 8 for production runs",
    "solver": "{rtol, maxiter_factor, backend: 'cg' | 'direct'}",
    "pca_components": "retained principal components (1..9)",
    "pce_max_degree": "total-degree cap of the adaptive PCE fit",
    "n_surrogate_samples": "sample count for the surrogate histogram command",
    "workers": "worker processes for batch runs (null = all cores)",
    "output_dir": "directory receiving all command outputs",
}

DEFAULT_CONFIG = {
    "materials": {
        "fiber": {"E1": 31.0, "E2": 7.59, "nu12": 0.3, "G12": 3.52, "G23": 2.69},
        "matrix": {"E1": 2.79, "E2": 2.76, "nu12": 0.3, "G12": 1.1, "G23": 1.1},
    },
    "bounds": {name: list(DEFAULT_BOUNDS[name]) for name in PARAM_NAMES},
    "n_runs": 200,
    "seed": 1,
    "resolution": [16, 16, 16],
    "solver": {"rtol": 1e-9, "maxiter_factor": 20.0, "backend": "cg"},
    "pca_components": 4,
    "pce_max_degree": 6,
    "n_surrogate_samples": 10000,
    "workers": None,
    "output_dir": "rveuq_out",
}

OUTPUT_DIR_ENV = "RVEUQ_OUTPUT_DIR"
MAX_FAILURE_FRACTION = 0.10
MIN_RECORDS_FOR_FIT = 20


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment definition (see CONFIG_SCHEMA)."""

    fiber: TransverseIsotropicMaterial
    matrix: TransverseIsotropicMaterial
    bounds: dict
    n_runs: int
    seed: int
    resolution: tuple
    solver: dict
    pca_components: int
    pce_max_degree: int
    n_surrogate_samples: int
    workers: int | None
    output_dir: str

    def bounds_array(self) -> np.ndarray:
        return np.array([self.bounds[name] for name in PARAM_NAMES])


def _merged(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merged(out[key], val)
        elif val is not None:
            out[key] = val
    return out


def load_config(path=None, overrides: dict | None = None) -> ExperimentConfig:
    """Build a config from defaults, an optional JSON file, and overrides.

    Precedence: overrides (CLI flags) > config file > defaults. The output
    directory may additionally come from the RVEUQ_OUTPUT_DIR environment
    variable (overridden by an explicit flag).
    """
    doc = dict(DEFAULT_CONFIG)
    if path is not None:
        with open(path) as f:
            user = json.load(f)
        unknown = set(user) - set(CONFIG_SCHEMA)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        doc = _merged(doc, user)
    env_out = os.environ.get(OUTPUT_DIR_ENV)
    if env_out:
        doc["output_dir"] = env_out
    if overrides:
        doc = _merged(doc, overrides)

    bounds = {k: tuple(map(float, v)) for k, v in doc["bounds"].items()}
    if set(bounds) != set(PARAM_NAMES):
        raise ValueError(f"bounds must cover exactly {PARAM_NAMES}")
    for name, (lo, hi) in bounds.items():
        if not lo < hi:
            raise ValueError(f"degenerate bounds for {name}: [{lo}, {hi}]")
    resolution = tuple(int(n) for n in doc["resolution"])
    if len(resolution) != 3 or min(resolution) < 8:
        raise ValueError("resolution must be three axes of at least 8 voxels")
    n_runs = int(doc["n_runs"])
    if n_runs < 1:
        raise ValueError("n_runs must be at least 1")
    pca_components = int(doc["pca_components"])
    if not 1 <= pca_components <= 9:
        raise ValueError("pca_components must be in 1..9")
    pce_max_degree = int(doc["pce_max_degree"])
    if pce_max_degree < 1:
        raise ValueError("pce_max_degree must be at least 1")
    solver = dict(DEFAULT_CONFIG["solver"], **doc["solver"])
    if solver["backend"] not in ("cg", "direct"):
        raise ValueError("solver backend must be 'cg' or 'direct'")
    workers = doc["workers"]
    return ExperimentConfig(
        fiber=TransverseIsotropicMaterial(**doc["materials"]["fiber"]),
        matrix=TransverseIsotropicMaterial(**doc["materials"]["matrix"]),
        bounds=bounds,
        n_runs=n_runs,
        seed=int(doc["seed"]),
        resolution=resolution,
        solver=solver,
        pca_components=pca_components,
        pce_max_degree=pce_max_degree,
        n_surrogate_samples=int(doc["n_surrogate_samples"]),
        workers=None if workers is None else int(workers),
        output_dir=str(doc["output_dir"]),
    )


@dataclass
class RunRecord:
    """Outcome of one homogenization run."""

    run_id: int
    params: dict
    status: str = "ok"
    achieved_vf: list | None = None
    dh: list | None = None
    residuals: list | None = None
    iterations: list | None = None
    asymmetry: float | None = None
    error: str | None = None
    wall_time: float = 0.0

    def to_json(self) -> str:
        # wall_time is volatile and serialized separately (run_timings.json)
        doc = {
            "run_id": self.run_id,
            "status": self.status,
            "params": {k: self.params[k] for k in PARAM_NAMES},
            "achieved_vf": self.achieved_vf,
            "dh": self.dh,
            "residuals": self.residuals,
            "iterations": self.iterations,
            "asymmetry": self.asymmetry,
            "error": self.error,
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        doc = json.loads(line)
        return cls(run_id=doc["run_id"], params=doc["params"], status=doc["status"],
                   achieved_vf=doc["achieved_vf"], dh=doc["dh"],
                   residuals=doc["residuals"], iterations=doc["iterations"],
                   asymmetry=doc["asymmetry"], error=doc["error"])


def homogenize_geometry(geom: GeometryParams, config: ExperimentConfig):
    """Voxelize and solve one geometry; returns (rve, correctors, homogenized)."""
    rve = voxelize(geom, config.fiber, config.matrix, config.resolution,
                   bounds=config.bounds)
    mesh = fem.build_mesh(rve)
    system = fem.assemble(rve, mesh)
    corr = fem.solve_correctors(system, rtol=config.solver["rtol"],
                                maxiter_factor=config.solver["maxiter_factor"],
                                backend=config.solver["backend"])
    return rve, corr, fem.homogenize(rve, corr)


def run_single(args) -> RunRecord:
    """Worker entry: one design row to one RunRecord (never raises)."""
    run_id, values, config = args
    params = dict(zip(PARAM_NAMES, map(float, values)))
    record = RunRecord(run_id=run_id, params=params)
    t0 = time.perf_counter()
    try:
        geom = GeometryParams(**params)
        rve, corr, hom = homogenize_geometry(geom, config)
        record.achieved_vf = [float(v) for v in ply_fiber_fractions(rve)]
        record.dh = hom.matrix.tolist()
        record.residuals = [float(r) for r in corr.residuals]
        record.iterations = [int(i) for i in corr.iterations]
        record.asymmetry = float(hom.asymmetry)
    except Exception as exc:  # failed runs are data, not crashes
        record.status = "failed"
        record.error = f"{type(exc).__name__}: {exc}"
    record.wall_time = time.perf_counter() - t0
    return record


def _out_dir(config: ExperimentConfig, out=None) -> str:
    path = out if out is not None else config.output_dir
    os.makedirs(path, exist_ok=True)
    return path


def cmd_doe(config: ExperimentConfig, out=None) -> str:
    """Write the Latin Hypercube design CSV plus its JSON sidecar."""
    out = _out_dir(config, out)
    doe = sampling.lhs(config.n_runs, config.bounds_array(), config.seed,
                       names=PARAM_NAMES)
    csv_path = os.path.join(out, "design.csv")
    sampling.write_design(doe, csv_path, os.path.join(out, "design.json"))
    return csv_path


def _load_records(path) -> list:
    records = []
    with open(path) as f:
        for line in f:
            if line.strip():
                records.append(RunRecord.from_json(line))
    records.sort(key=lambda r: r.run_id)
    return records


def cmd_run(config: ExperimentConfig, out=None) -> str:
    """Homogenize every design row over a worker pool; resume by run id.

    Records are written ordered by run id regardless of completion order.
    The command fails (after writing everything) when more than 10% of the
    runs failed.
    """
    out = _out_dir(config, out)
    design_path = os.path.join(out, "design.csv")
    if not os.path.exists(design_path):
        cmd_doe(config, out)
    names, rows = sampling.read_design(design_path)
    if tuple(names) != PARAM_NAMES:
        raise ValueError(f"design columns {names} do not match {PARAM_NAMES}")

    records_path = os.path.join(out, "records.jsonl")
    done: dict[int, RunRecord] = {}
    if os.path.exists(records_path):
        done = {r.run_id: r for r in _load_records(records_path)}
    todo = [(i, rows[i], config) for i in range(len(rows)) if i not in done]

    if todo:
        workers = config.workers or os.cpu_count() or 1
        if workers > 1 and len(todo) > 1:
            with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
                for record in pool.map(run_single, todo, chunksize=1):
                    done[record.run_id] = record
        else:
            for args in todo:
                record = run_single(args)
                done[record.run_id] = record

    records = [done[i] for i in sorted(done)]
    tmp = records_path + ".tmp"
    with open(tmp, "w") as f:
        for record in records:
            f.write(record.to_json() + "\n")
    os.replace(tmp, records_path)
    with open(os.path.join(out, "run_timings.json"), "w") as f:
        json.dump({str(r.run_id): r.wall_time for r in records}, f, indent=2)
        f.write("\n")

    failed = [r for r in records if r.status != "ok"]
    if failed:
        print(f"{len(failed)} of {len(records)} runs failed "
              f"({len(failed) / len(records):.1%})")
    if len(failed) > MAX_FAILURE_FRACTION * len(records):
        raise RuntimeError(
            f"{len(failed)} of {len(records)} runs failed, above the "
            f"{MAX_FAILURE_FRACTION:.0%} threshold")
    return records_path


def cmd_fit(config: ExperimentConfig, out=None) -> dict:
    """Flatten successful records, fit the PCA, then one PCE per component."""
    out = _out_dir(config, out)
    records = [r for r in _load_records(os.path.join(out, "records.jsonl"))
               if r.status == "ok"]
    if len(records) < MIN_RECORDS_FOR_FIT:
        raise ValueError(f"need at least {MIN_RECORDS_FOR_FIT} successful records, "
                         f"have {len(records)}")
    X = np.array([[r.params[name] for name in PARAM_NAMES] for r in records])
    off_pattern_warnings = 0
    data = np.empty((len(records), 9))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        for i, r in enumerate(records):
            data[i] = pca.flatten(np.array(r.dh))
        off_pattern_warnings = len(caught)

    model = pca.fit_pca(data, config.pca_components)
    pca.save_pca(model, os.path.join(out, "pca_model.json"))

    bounds = config.bounds_array()
    loos, degrees = [], []
    for m in range(model.n_components):
        surrogate = pce.fit_lar(X, model.scores[:, m], config.pce_max_degree, bounds)
        pce.save_pce(surrogate, os.path.join(out, f"pce_lambda{m + 1}.json"))
        loos.append(surrogate.loo)
        degrees.append(surrogate.degree)

    report = {
        "n_records_used": len(records),
        "n_components": model.n_components,
        "explained_variance_ratio": model.explained_variance_ratio.tolist(),
        "explained_variance_first": float(
            model.explained_variance_ratio[:model.n_components].sum()),
        "pce_loo": loos,
        "pce_degree": degrees,
        "off_pattern_warnings": off_pattern_warnings,
    }
    with open(os.path.join(out, "fit_report.json"), "w") as f:
        json.dump(report, f, indent=2)
        f.write("\n")
    return report


def cmd_sobol(config: ExperimentConfig, out=None) -> list:
    """Per-component Sobol index CSVs from the fitted PCE coefficients."""
    out = _out_dir(config, out)
    model = pca.load_pca(os.path.join(out, "pca_model.json"))
    share = model.explained_variance_ratio
    paths, meta = [], {}
    for m in range(model.n_components):
        surrogate = pce.load_pce(os.path.join(out, f"pce_lambda{m + 1}.json"))
        indices = sobol.sobol_from_pce(surrogate, names=PARAM_NAMES)
        path = os.path.join(out, f"sobol_lambda{m + 1}.csv")
        sobol.write_sobol_csv(indices, path)
        paths.append(path)
        meta[f"lambda{m + 1}"] = {
            "variance_share": float(share[m]),
            "low_weight": bool(share[m] < 0.01),
        }
    with open(os.path.join(out, "sobol_meta.json"), "w") as f:
        json.dump(meta, f, indent=2)
        f.write("\n")
    return paths


def cmd_sample(config: ExperimentConfig, out=None, n: int | None = None) -> str:
    """Sample the surrogate chain: fresh LHS -> PCE -> PCA reconstruction.

    Writes one reconstructed stiffness 9-vector per row (histogram-ready)
    and a sidecar with the derived seed and the count of samples whose
    reconstructed tensor is not positive definite.
    """
    out = _out_dir(config, out)
    n = int(n) if n is not None else config.n_surrogate_samples
    model = pca.load_pca(os.path.join(out, "pca_model.json"))
    surrogates = [pce.load_pce(os.path.join(out, f"pce_lambda{m + 1}.json"))
                  for m in range(model.n_components)]
    seed = config.seed + 1000  # fresh, decoupled from the training design
    doe = sampling.lhs(n, config.bounds_array(), seed, names=PARAM_NAMES)
    coeffs = np.column_stack([pce.evaluate(s, doe.samples) for s in surrogates])
    entries = pca.reconstruct(model, coeffs)

    path = os.path.join(out, "samples.csv")
    with open(path, "w") as f:
        f.write(",".join(pca.FLATTEN_NAMES) + "\n")
        for row in entries:
            f.write(",".join(repr(float(v)) for v in row) + "\n")

    spd_violations = 0
    for row in entries:
        if np.linalg.eigvalsh(pca.unflatten(row)).min() <= 0.0:
            spd_violations += 1
    meta = {"n": n, "seed": seed, "generator": sampling.GENERATOR_NAME,
            "spd_violations": spd_violations,
            "spd_violation_fraction": spd_violations / n}
    with open(os.path.join(out, "samples_meta.json"), "w") as f:
        json.dump(meta, f, indent=2)
        f.write("\n")
    if spd_violations:
        print(f"{spd_violations} of {n} reconstructed tensors are not positive "
              "definite (surrogate reconstruction does not guarantee SPD)")
    return path


def cmd_export_vtk(config: ExperimentConfig, run_id: int, out=None) -> list:
    """Re-solve one design row and write its corrector and material VTK files."""
    out = _out_dir(config, out)
    names, rows = sampling.read_design(os.path.join(out, "design.csv"))
    if not 0 <= run_id < len(rows):
        raise ValueError(f"run id {run_id} outside the design (n = {len(rows)})")
    geom = GeometryParams(**dict(zip(names, map(float, rows[run_id]))))
    rve, corr, _ = homogenize_geometry(geom, config)

    vtk_dir = os.path.join(out, f"vtk_run{run_id:04d}")
    os.makedirs(vtk_dir, exist_ok=True)
    paths = []
    material_path = os.path.join(vtk_dir, "material.vtk")
    vtkio.write_structured_points(rve, material_path)
    paths.append(material_path)
    for case, name in enumerate(("chi_11", "chi_22", "chi_33",
                                 "chi_23", "chi_13", "chi_12")):
        path = os.path.join(vtk_dir, f"{name}.vtk")
        vtkio.write_corrector_vtk(corr, case, path)
        paths.append(path)
    return paths
