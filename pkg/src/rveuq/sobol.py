"""Analytic Sobol sensitivity indices from polynomial chaos coefficients."""

from dataclasses import dataclass

import numpy as np

from .pce import PCEModel


@dataclass(frozen=True)
class SobolIndices:
    """First-order and total variance shares per input."""

    names: tuple
    first_order: np.ndarray
    total: np.ndarray


def sobol_from_pce(model: PCEModel, names=None) -> SobolIndices:
    """Variance decomposition of the surrogate.

    S_i sums the squared coefficients of terms involving only input i;
    S_Ti sums those of every term involving input i. Both divide by the
    total variance sum_{a != 0} c_a^2.
    """
    d = model.n_inputs
    names = tuple(names) if names is not None else tuple(f"x{j + 1}" for j in range(d))
    idx = model.indices
    c2 = model.coefficients ** 2
    nonzero = idx.any(axis=1)
    variance = c2[nonzero].sum()
    if variance <= 0.0:
        raise ValueError("zero-variance model: Sobol indices are undefined")
    first = np.empty(d)
    total = np.empty(d)
    for i in range(d):
        involves = idx[:, i] > 0
        alone = involves & (idx[:, np.arange(d) != i] == 0).all(axis=1)
        first[i] = c2[alone].sum() / variance
        total[i] = c2[involves].sum() / variance
    return SobolIndices(names, first, total)


def write_sobol_csv(indices: SobolIndices, path) -> None:
    """One row per input, columns S and ST."""
    with open(path, "w") as f:
        f.write("parameter,S,ST\n")
        for name, s, st in zip(indices.names, indices.first_order, indices.total):
            f.write(f"{name},{repr(float(s))},{repr(float(st))}\n")
