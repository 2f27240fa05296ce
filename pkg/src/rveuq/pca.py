"""Flattening of orthotropic stiffness tensors and principal component analysis."""

from dataclasses import dataclass
import json
import warnings

import numpy as np

#: Flattening order of the nine orthotropic stiffness entries.
FLATTEN_NAMES = ("D1111", "D2222", "D3333", "D2323", "D1313", "D1212",
                 "D2233", "D1133", "D1122")
_FLATTEN_IJ = ((0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (5, 5), (1, 2), (0, 2), (0, 1))

OFF_PATTERN_TOL = 1e-6


def flatten(D: np.ndarray, warn_tol: float = OFF_PATTERN_TOL) -> np.ndarray:
    """Orthotropic 9-vector of a 6x6 Voigt stiffness.

    Entries outside the orthotropic pattern are dropped; if any exceeds
    warn_tol times the matrix magnitude a diagnostic warning is emitted
    (they are still dropped).
    """
    D = np.asarray(D, dtype=float)
    pattern = np.zeros((6, 6), dtype=bool)
    for i, j in _FLATTEN_IJ:
        pattern[i, j] = pattern[j, i] = True
    off = np.abs(D[~pattern])
    scale = np.abs(D).max()
    if scale > 0 and off.size and off.max() > warn_tol * scale:
        warnings.warn(
            f"off-pattern stiffness entries up to {off.max() / scale:.2e} of the "
            "matrix magnitude were dropped", stacklevel=2)
    return np.array([D[i, j] for i, j in _FLATTEN_IJ])


def unflatten(v: np.ndarray) -> np.ndarray:
    """Inverse of flatten: symmetric 6x6 with zeros off the orthotropic pattern."""
    v = np.asarray(v, dtype=float)
    D = np.zeros((6, 6))
    for val, (i, j) in zip(v, _FLATTEN_IJ):
        D[i, j] = D[j, i] = val
    return D


@dataclass(frozen=True)
class PCAModel:
    """Mean, orthonormal components and per-run coefficients of a PCA fit."""

    mean: np.ndarray                  # (9,)
    components: np.ndarray            # (n_components, 9), orthonormal rows
    explained_variance_ratio: np.ndarray  # full spectrum, all ranks
    scores: np.ndarray                # (n_runs, n_components) training coefficients

    @property
    def n_components(self) -> int:
        return self.components.shape[0]


def fit_pca(data: np.ndarray, n_components: int) -> PCAModel:
    """Mean-centered SVD; components are the leading right singular vectors.

    The sign of each component is fixed so its largest-magnitude entry is
    positive, making results deterministic.
    """
    data = np.asarray(data, dtype=float)
    n, d = data.shape
    if not (1 <= n_components <= min(n, d)):
        raise ValueError(f"n_components must be in [1, {min(n, d)}]")
    mean = data.mean(axis=0)
    centered = data - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    signs = np.sign(vt[np.arange(len(vt)), np.argmax(np.abs(vt), axis=1)])
    signs[signs == 0] = 1.0
    vt = vt * signs[:, None]
    var = s ** 2
    ratios = var / var.sum() if var.sum() > 0 else np.zeros_like(var)
    components = vt[:n_components]
    scores = centered @ components.T
    return PCAModel(mean, components, ratios, scores)


def transform(model: PCAModel, vectors: np.ndarray) -> np.ndarray:
    """Project (centered) 9-vectors onto the components."""
    vectors = np.asarray(vectors, dtype=float)
    if vectors.shape[-1] != model.mean.shape[0]:
        raise ValueError("dimension mismatch")
    return (vectors - model.mean) @ model.components.T


def reconstruct(model: PCAModel, coeffs: np.ndarray) -> np.ndarray:
    """Rebuild 9-vectors as mean + sum of coefficient * component."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[-1] != model.n_components:
        raise ValueError("dimension mismatch")
    return coeffs @ model.components + model.mean


def save_pca(model: PCAModel, path) -> None:
    doc = {
        "format": "rveuq-pca-1",
        "order": list(FLATTEN_NAMES),
        "mean": model.mean.tolist(),
        "components": model.components.tolist(),
        "explained_variance_ratio": model.explained_variance_ratio.tolist(),
        "scores": model.scores.tolist(),
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def load_pca(path) -> PCAModel:
    with open(path) as f:
        doc = json.load(f)
    if doc.get("format") != "rveuq-pca-1":
        raise ValueError(f"unsupported PCA file format {doc.get('format')!r}")
    return PCAModel(np.array(doc["mean"]), np.array(doc["components"]),
                    np.array(doc["explained_variance_ratio"]),
                    np.array(doc["scores"]))
