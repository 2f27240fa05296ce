"""Command line interface: doe, run, fit, sobol, sample, export-vtk."""

import argparse

from . import pipeline


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file (defaults are built in)")
    sub.add_argument("--out", help="output directory (overrides config and "
                                   f"${pipeline.OUTPUT_DIR_ENV})")
    sub.add_argument("--n-runs", type=int, dest="n_runs")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--resolution", type=int, nargs=3, metavar=("N1", "N2", "N3"))
    sub.add_argument("--workers", type=int)
    sub.add_argument("--pca-components", type=int, dest="pca_components")
    sub.add_argument("--pce-max-degree", type=int, dest="pce_max_degree")
    sub.add_argument("--backend", choices=["cg", "direct"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rveuq",
        description="Parametric unit-cell homogenization with a PCE/Sobol "
                    "uncertainty pipeline")
    subs = parser.add_subparsers(dest="command", required=True)

    for name, descr in (
            ("doe", "write the Latin Hypercube design"),
            ("run", "homogenize every design row (resumes by run id)"),
            ("fit", "fit the PCA and per-component PCE surrogates"),
            ("sobol", "write per-component Sobol index CSVs"),
            ("sample", "sample the surrogate into a histogram-ready CSV"),
            ("export-vtk", "write corrector and material VTK files for one run")):
        sub = subs.add_parser(name, help=descr)
        _add_common(sub)
        if name == "sample":
            sub.add_argument("--n", type=int, help="number of surrogate samples")
        if name == "export-vtk":
            sub.add_argument("--run-id", type=int, required=True, dest="run_id")
    return parser


def _config_from_args(args) -> pipeline.ExperimentConfig:
    overrides = {key: getattr(args, key, None)
                 for key in ("n_runs", "seed", "workers",
                             "pca_components", "pce_max_degree")}
    if getattr(args, "resolution", None) is not None:
        overrides["resolution"] = list(args.resolution)
    if getattr(args, "backend", None) is not None:
        overrides["solver"] = {"backend": args.backend}
    if args.out is not None:
        overrides["output_dir"] = args.out
    return pipeline.load_config(args.config, overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = _config_from_args(args)
    if args.command == "doe":
        print(pipeline.cmd_doe(config))
    elif args.command == "run":
        print(pipeline.cmd_run(config))
    elif args.command == "fit":
        report = pipeline.cmd_fit(config)
        ratios = report["explained_variance_ratio"][:report["n_components"]]
        print("explained variance:", " ".join(f"{r:.2%}" for r in ratios))
        print("pce loo:", " ".join(f"{v:.3e}" for v in report["pce_loo"]))
    elif args.command == "sobol":
        for path in pipeline.cmd_sobol(config):
            print(path)
    elif args.command == "sample":
        print(pipeline.cmd_sample(config, n=getattr(args, "n", None)))
    elif args.command == "export-vtk":
        for path in pipeline.cmd_export_vtk(config, args.run_id):
            print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
