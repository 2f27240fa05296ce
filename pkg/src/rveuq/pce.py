"""Sparse orthonormal Legendre polynomial chaos fitted by least angle regression.

Inputs are standardized affinely from their physical bounds to [-1, 1]; the
basis is the tensor product of orthonormal Legendre polynomials truncated
by total degree. Basis selection runs least angle regression per degree,
keeping at every step the ordinary least squares refit on the active set
with the smallest generalized leave-one-out error (hybrid LAR).
"""

from dataclasses import dataclass
import json
import math
import warnings

import numpy as np
import scipy.linalg as sla


def legendre_orthonormal(k: int, x):
    """Legendre polynomial of degree k scaled so that int phi_j phi_k dx/2 = delta_jk."""
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-12):
        raise ValueError("evaluation points must lie in [-1, 1]")
    if k == 0:
        return np.ones_like(x)
    p_prev = np.ones_like(x)
    p = x.copy()
    for j in range(1, k):
        p, p_prev = ((2 * j + 1) * x * p - j * p_prev) / (j + 1), p
    return np.sqrt(2 * k + 1) * p


def build_basis(d: int, p: int) -> np.ndarray:
    """All multi-indices with total degree <= p in graded-lexicographic order.

    Within a grade the leading dimensions carry the high degrees first. The
    count is binomial(d + p, p).
    """
    if d < 1 or p < 0:
        raise ValueError("need d >= 1 and p >= 0")

    def compositions(total, dims):
        if dims == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in compositions(total - first, dims - 1):
                yield (first,) + rest

    indices = []
    for grade in range(p + 1):
        indices.extend(compositions(grade, d))
    return np.array(indices, dtype=np.int64).reshape(-1, d)


def basis_matrix(indices: np.ndarray, x_std: np.ndarray) -> np.ndarray:
    """(N, P) matrix of tensor-product basis values at standardized points."""
    x_std = np.atleast_2d(x_std)
    n, d = x_std.shape
    kmax = int(indices.max())
    table = np.empty((d, kmax + 1, n))
    for j in range(d):
        xj = x_std[:, j]
        table[j, 0] = 1.0
        if kmax >= 1:
            table[j, 1] = xj
        for k in range(1, kmax):
            table[j, k + 1] = ((2 * k + 1) * xj * table[j, k] - k * table[j, k - 1]) / (k + 1)
    scale = np.sqrt(2.0 * np.arange(kmax + 1) + 1.0)
    table *= scale[None, :, None]
    psi = np.ones((len(indices), n))
    for j in range(d):
        psi *= table[j, indices[:, j]]
    return psi.T


@dataclass(frozen=True)
class PCEModel:
    """Active multi-index set with orthonormal Legendre coefficients."""

    bounds: np.ndarray        # (d, 2) physical input intervals
    indices: np.ndarray       # (n_terms, d), zero multi-index included
    coefficients: np.ndarray  # (n_terms,), aligned with indices
    loo: float                # corrected relative leave-one-out error
    degree: int               # total-degree truncation of the winning fit

    @property
    def n_inputs(self) -> int:
        return self.bounds.shape[0]


def standardize(X: np.ndarray, bounds: np.ndarray, clamp: float = 1e-9) -> np.ndarray:
    """Affine map of physical samples onto [-1, 1]^d, clamping tiny overshoot."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    bounds = np.asarray(bounds, dtype=float)
    lo, hi = bounds[:, 0], bounds[:, 1]
    z = 2.0 * (X - lo) / (hi - lo) - 1.0
    over = np.abs(z) - 1.0
    if np.any(over > clamp):
        j = int(np.argmax(over.max(axis=0)))
        raise ValueError(f"input {j} exceeds its bounds beyond the clamp tolerance")
    return np.clip(z, -1.0, 1.0)


def loo_errors(psi: np.ndarray, y: np.ndarray):
    """OLS fit plus leave-one-out errors of the refit on the given columns.

    Returns (coefficients, raw_loo_mse, corrected_relative_loo) or None when
    the column set is rank deficient. raw_loo_mse is the exact mean squared
    leave-one-out residual via the hat-matrix shortcut; the corrected value
    multiplies by (N / (N - P)) * (1 + trace((Psi^T Psi)^-1)) and normalizes
    by the sample variance of y.
    """
    n, p = psi.shape
    if p > n:
        return None
    q, r = np.linalg.qr(psi)
    dr = np.abs(np.diag(r))
    if dr.min() <= 1e-12 * max(dr.max(), 1.0):
        return None
    coef = sla.solve_triangular(r, q.T @ y)
    leverage = np.einsum("ij,ij->i", q, q)
    denom = 1.0 - leverage
    if denom.min() < 1e-12:
        return coef, math.inf, math.inf
    resid = y - psi @ coef
    raw = float(np.mean((resid / denom) ** 2))
    var_y = float(np.var(y, ddof=1)) if n > 1 else 0.0
    if var_y <= 0.0:
        return coef, raw, 0.0
    if n > p:
        r_inv = sla.solve_triangular(r, np.eye(p))
        factor = (n / (n - p)) * (1.0 + np.sum(r_inv ** 2))
        corrected = raw * factor / var_y
    else:
        corrected = math.inf
    return coef, raw, corrected


def _lar_order(Z: np.ndarray, y: np.ndarray, max_steps: int):
    """Least angle regression selection order over the candidate columns.

    Correlation ties break toward the lowest column index, which is the
    lowest graded-lexicographic multi-index by construction. Candidates
    producing a rank-deficient equiangular system are dropped with a
    diagnostic and selection continues.
    """
    n, p = Z.shape
    norms = np.linalg.norm(Z, axis=0)
    usable = norms > 1e-13 * max(norms.max(), 1.0)
    Zn = np.zeros_like(Z)
    Zn[:, usable] = Z[:, usable] / norms[usable]

    mu = np.zeros(n)
    available = usable.copy()
    active: list[int] = []
    signs: list[float] = []
    dropped = 0
    tol = 1e-12 * (np.linalg.norm(y) + 1.0)
    while len(active) < max_steps and available.any():
        c = Zn.T @ (y - mu)
        c_masked = np.abs(c)
        c_masked[~available] = -np.inf
        j = int(np.argmax(c_masked))
        cmax = c_masked[j]
        if cmax < tol:
            break
        available[j] = False
        active.append(j)
        signs.append(1.0 if c[j] >= 0 else -1.0)

        Xa = Zn[:, active] * np.asarray(signs)
        try:
            w = sla.cho_solve(sla.cho_factor(Xa.T @ Xa), np.ones(len(active)))
        except np.linalg.LinAlgError:
            active.pop()
            signs.pop()
            dropped += 1
            continue
        norm_factor = 1.0 / np.sqrt(w.sum())
        u = Xa @ (norm_factor * w)

        gamma = cmax / norm_factor
        if available.any():
            a = Zn.T @ u
            with np.errstate(divide="ignore", invalid="ignore"):
                g1 = (cmax - c) / (norm_factor - a)
                g2 = (cmax + c) / (norm_factor + a)
            cands = np.concatenate([g1[available], g2[available]])
            cands = cands[np.isfinite(cands) & (cands > 1e-14)]
            if cands.size:
                gamma = min(gamma, cands.min())
        mu = mu + gamma * u
    if dropped:
        warnings.warn(f"least angle regression dropped {dropped} rank-deficient "
                      "candidate(s)", stacklevel=3)
    return active


@dataclass(frozen=True)
class _Candidate:
    loo: float
    columns: list
    coefficients: np.ndarray
    degree: int


#: a candidate must beat the incumbent LOO by this relative margin
_IMPROVEMENT = 1e-9
#: normalized LOO below this is a numerically exact fit; stop growing the set
_EXACT_FLOOR = 1e-18


def _scan_degree(psi, y, degree):
    """Walk the LAR path for one truncation degree; return the best LOO refit.

    The orthogonal factorization of the growing active set is updated one
    column at a time, so each step costs O(N * n_active).
    """
    n = len(y)
    yc = y - y.mean()
    order = _lar_order(psi[:, 1:], yc, max_steps=min(psi.shape[1] - 1, n - 1))
    var_y = float(np.var(y, ddof=1))

    smax = min(len(order) + 1, n)
    Q = np.empty((n, smax))
    R = np.zeros((smax, smax))
    Rinv = np.zeros((smax, smax))
    qty = np.empty(smax)
    leverage = np.zeros(n)
    resid = y.astype(float).copy()
    rinv_frob2 = 0.0
    taken: list[int] = []
    best = None
    s = 0
    for col in [0] + [1 + j for j in order]:
        if s == smax:
            break
        v = psi[:, col]
        w = Q[:, :s].T @ v
        u = v - Q[:, :s] @ w
        rho = float(np.linalg.norm(u))
        if rho <= 1e-12 * max(float(np.linalg.norm(v)), 1.0):
            continue  # numerically dependent on the active set
        q = u / rho
        Q[:, s] = q
        R[:s, s] = w
        R[s, s] = rho
        if s:
            Rinv[:s, s] = -Rinv[:s, :s] @ (w / rho)
        Rinv[s, s] = 1.0 / rho
        rinv_frob2 += float(Rinv[:s + 1, s] @ Rinv[:s + 1, s])
        qty[s] = float(q @ y)
        resid -= q * qty[s]
        leverage += q * q
        taken.append(col)
        s += 1

        denom = 1.0 - leverage
        if n <= s or denom.min() < 1e-12:
            continue  # saturated fit: leave-one-out undefined
        raw = float(np.mean((resid / denom) ** 2))
        corrected = raw * (n / (n - s)) * (1.0 + rinv_frob2) / var_y
        if best is None or corrected < best.loo * (1.0 - _IMPROVEMENT):
            coef = Rinv[:s, :s] @ qty[:s]
            best = _Candidate(corrected, taken.copy(), coef, degree)
        if best is not None and best.loo < _EXACT_FLOOR:
            break
    return best


def fit_lar(X: np.ndarray, y: np.ndarray, p_max: int, bounds) -> PCEModel:
    """Adaptive hybrid-LAR fit over total degrees 1..p_max.

    The degree loop stops early after two consecutive degree increases
    without improvement of the leave-one-out error. The returned
    coefficients are the least squares refit on the winning active set.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    bounds = np.asarray(bounds, dtype=float)
    n, d = X.shape
    if n < 3:
        raise ValueError("need at least 3 samples")
    if len(y) != n:
        raise ValueError("X and y sample counts differ")
    x_std = standardize(X, bounds)

    zero = np.zeros((1, d), dtype=np.int64)
    if np.ptp(y) == 0.0:
        return PCEModel(bounds, zero, np.array([y[0]]), 0.0, 0)

    best = None
    stall = 0
    for degree in range(1, p_max + 1):
        indices = build_basis(d, degree)
        psi = basis_matrix(indices, x_std)
        cand = _scan_degree(psi, y, degree)
        if cand is not None and (best is None
                                 or cand.loo < best[0].loo * (1.0 - _IMPROVEMENT)):
            best = (cand, indices)
            stall = 0
        else:
            stall += 1
            if stall >= 2:
                break
        if best is not None and best[0].loo < _EXACT_FLOOR:
            break
    if best is None:
        raise RuntimeError("no admissible model found")
    cand, indices = best
    return PCEModel(bounds, indices[cand.columns],
                    np.asarray(cand.coefficients, dtype=float),
                    float(cand.loo), cand.degree)


def evaluate(model: PCEModel, X: np.ndarray) -> np.ndarray:
    """Surrogate prediction at physical input points."""
    x_std = standardize(X, model.bounds)
    return basis_matrix(model.indices, x_std) @ model.coefficients


def moments(model: PCEModel):
    """(mean, variance) from orthonormality: mean = c_0, variance = sum c_a^2."""
    zero = ~model.indices.any(axis=1)
    mean = float(model.coefficients[zero].sum())
    variance = float((model.coefficients[~zero] ** 2).sum())
    return mean, variance


def save_pce(model: PCEModel, path) -> None:
    doc = {
        "format": "rveuq-pce-1",
        "bounds": model.bounds.tolist(),
        "indices": model.indices.tolist(),
        "coefficients": model.coefficients.tolist(),
        "loo": model.loo,
        "degree": model.degree,
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def load_pce(path) -> PCEModel:
    with open(path) as f:
        doc = json.load(f)
    if doc.get("format") != "rveuq-pce-1":
        raise ValueError(f"unsupported PCE file format {doc.get('format')!r}")
    return PCEModel(np.array(doc["bounds"]), np.array(doc["indices"], dtype=np.int64),
                    np.array(doc["coefficients"]), float(doc["loo"]), int(doc["degree"]))
