"""Seeded Latin Hypercube designs over a uniform hyperbox."""

from dataclasses import dataclass
import json

import numpy as np

#: RNG used for all designs: counter-based Philox, keyed by the design seed.
GENERATOR_NAME = "numpy.random.Philox"


@dataclass(frozen=True)
class DesignOfExperiments:
    """An N x d sample matrix in physical units plus its provenance."""

    samples: np.ndarray   # (n, d)
    bounds: np.ndarray    # (d, 2) columns (min, max)
    seed: int
    names: tuple

    @property
    def n(self) -> int:
        return self.samples.shape[0]


def lhs(n: int, bounds, seed: int, names=None) -> DesignOfExperiments:
    """Latin Hypercube design: one jittered sample per equal-probability stratum.

    Each column gets an independent random permutation of the n strata and a
    uniform jitter inside each stratum. Reproducible bit for bit given the
    seed.
    """
    bounds = np.atleast_2d(np.asarray(bounds, dtype=float))
    if n < 1:
        raise ValueError("n must be at least 1")
    if np.any(bounds[:, 1] <= bounds[:, 0]):
        raise ValueError("degenerate interval: every bound must satisfy min < max")
    d = bounds.shape[0]
    names = tuple(names) if names is not None else tuple(f"x{j + 1}" for j in range(d))

    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    samples = np.empty((n, d))
    for j in range(d):
        strata = rng.permutation(n)
        jitter = rng.random(n)
        lo, hi = bounds[j]
        samples[:, j] = lo + (hi - lo) * (strata + jitter) / n
    return DesignOfExperiments(samples, bounds, int(seed), names)


def write_design(doe: DesignOfExperiments, csv_path, sidecar_path=None) -> None:
    """CSV with a header of parameter names plus a JSON sidecar (bounds, seed)."""
    with open(csv_path, "w") as f:
        f.write(",".join(doe.names) + "\n")
        for row in doe.samples:
            f.write(",".join(repr(float(v)) for v in row) + "\n")
    if sidecar_path is not None:
        meta = {
            "generator": GENERATOR_NAME,
            "seed": doe.seed,
            "n": doe.n,
            "names": list(doe.names),
            "bounds": {name: [float(lo), float(hi)]
                       for name, (lo, hi) in zip(doe.names, doe.bounds)},
        }
        with open(sidecar_path, "w") as f:
            json.dump(meta, f, indent=2)
            f.write("\n")


def read_design(csv_path):
    """Load a design CSV; returns (names, samples)."""
    with open(csv_path) as f:
        names = tuple(f.readline().strip().split(","))
        samples = np.array([[float(v) for v in line.strip().split(",")]
                            for line in f if line.strip()])
    return names, samples
