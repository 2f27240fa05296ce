"""Periodic corrector problems on a voxel grid and homogenized stiffness.

Discretization: one trilinear hex8 element per voxel, 2x2x2 Gauss
quadrature. Periodicity is enforced by master-slave elimination (slave
boundary nodes accumulate onto their wrapped master images), which keeps
the system symmetric positive definite once one anchor node is pinned to
zero. Six corrector cases are solved, one per macro strain component in
Voigt order (11, 22, 33, 23, 13, 12) with engineering shear.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .microstructure import VoxelRVE

#: local hex8 corner offsets, VTK_HEXAHEDRON ordering
_CORNERS = np.array([
    (0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0),
    (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1),
], dtype=np.int64)


class SolverConvergenceError(RuntimeError):
    """Iterative corrector solve failed to reach the requested residual."""

    def __init__(self, case: int, residual: float, rtol: float):
        self.case = case
        self.residual = residual
        super().__init__(
            f"corrector case {case} did not converge: relative residual "
            f"{residual:.3e} > {rtol:.1e}")


@dataclass(frozen=True)
class PeriodicMesh:
    """Structured hex mesh with periodic master-slave node pairing."""

    dims: tuple
    lengths: tuple
    nodes: np.ndarray       # (n_nodes, 3) coordinates of the full grid
    hexes: np.ndarray       # (n_elements, 8) full-grid node ids
    master: np.ndarray      # (n_nodes,) full-grid id of each node's master
    compressed: np.ndarray  # (n_nodes,) index of the master in 0..n_unique-1
    unique_nodes: np.ndarray  # (n_unique,) full-grid ids of the masters
    anchor: int             # full-grid id of the pinned node (a master)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_unique(self) -> int:
        return len(self.unique_nodes)


def build_mesh(rve: VoxelRVE) -> PeriodicMesh:
    """Mesh the voxel grid and pair every boundary node with its periodic master."""
    n1, n2, n3 = rve.dims
    L1, L2, L3 = rve.cell_lengths
    m2, m3 = n2 + 1, n3 + 1

    I, J, K = np.meshgrid(np.arange(n1 + 1), np.arange(n2 + 1), np.arange(n3 + 1),
                          indexing="ij")
    nodes = np.column_stack([
        (I * (L1 / n1)).ravel(), (J * (L2 / n2)).ravel(), (K * (L3 / n3)).ravel()])

    def node_id(i, j, k):
        return (i * m2 + j) * m3 + k

    master = node_id(I % n1, J % n2, K % n3).ravel()
    compressed = (((I % n1) * n2 + (J % n2)) * n3 + (K % n3)).ravel()

    Iu, Ju, Ku = np.meshgrid(np.arange(n1), np.arange(n2), np.arange(n3), indexing="ij")
    unique_nodes = node_id(Iu, Ju, Ku).ravel()
    hexes = np.stack([node_id(Iu + di, Ju + dj, Ku + dk).ravel()
                      for di, dj, dk in _CORNERS], axis=1)

    return PeriodicMesh(tuple(rve.dims), tuple(rve.cell_lengths), nodes, hexes,
                        master, compressed, unique_nodes, anchor=0)


def hex_basis(h):
    """Strain-displacement matrices of the box hex8 element with edge sizes h.

    Returns (B, detJ, Bavg): B has shape (8, 6, 24) over the 2x2x2 Gauss
    points, detJ is the constant Jacobian weight per point, and Bavg is the
    volume-averaged operator (equal to B at the element center).
    """
    h = np.asarray(h, dtype=float)
    signs = 2.0 * _CORNERS - 1.0
    g = signs / np.sqrt(3.0)  # Gauss points follow the corner pattern
    B = np.zeros((8, 6, 24))
    for q in range(8):
        for a in range(8):
            sa = signs[a]
            f = np.array([1.0 + g[q, 0] * sa[0],
                          1.0 + g[q, 1] * sa[1],
                          1.0 + g[q, 2] * sa[2]])
            dN = np.array([sa[0] * f[1] * f[2],
                           sa[1] * f[0] * f[2],
                           sa[2] * f[0] * f[1]]) / 8.0 * (2.0 / h)
            u, v, w = 3 * a, 3 * a + 1, 3 * a + 2
            B[q, 0, u] = dN[0]
            B[q, 1, v] = dN[1]
            B[q, 2, w] = dN[2]
            B[q, 3, v] = dN[2]
            B[q, 3, w] = dN[1]
            B[q, 4, u] = dN[2]
            B[q, 4, w] = dN[0]
            B[q, 5, u] = dN[1]
            B[q, 5, v] = dN[0]
    detJ = float(np.prod(h)) / 8.0
    Bavg = B.mean(axis=0)
    return B, detJ, Bavg


@dataclass(frozen=True)
class LinearSystem:
    """Periodically reduced, anchor-constrained corrector system."""

    K: sp.csr_matrix          # (n_free, n_free), symmetric positive definite
    rhs: np.ndarray           # (n_free, 6), one column per corrector case
    free: np.ndarray          # free dof indices within the compressed numbering
    n_compressed: int
    mesh: PeriodicMesh

    @property
    def n_free(self) -> int:
        return len(self.free)


def _element_dofs(rve: VoxelRVE, mesh: PeriodicMesh) -> np.ndarray:
    """(n_el, 24) compressed dof ids, columns grouped (u, v, w) per node."""
    cnode = mesh.compressed[mesh.hexes]  # (n_el, 8)
    return (3 * cnode[:, :, None] + np.arange(3)[None, None, :]).reshape(-1, 24)


def assemble(rve: VoxelRVE, mesh: PeriodicMesh, anchor: int | None = None) -> LinearSystem:
    """Assemble the six periodic corrector problems for the voxel stiffness field.

    The bilinear form integrates D_ijkl chi_k,l v_i,j; the right-hand sides
    integrate D_ijmn v_j,i for each of the six unit macro strain cases.
    Periodic dofs are eliminated by accumulation onto masters, then the
    anchor node's three dofs are removed.
    """
    anchor = mesh.anchor if anchor is None else int(anchor)
    if mesh.master[anchor] != anchor:
        raise ValueError("anchor must be a master node")

    B, detJ, _ = hex_basis(rve.voxel_sizes)
    table = rve.stiffness_table
    Ke = np.empty((len(table), 24, 24))
    Fe = np.empty((len(table), 24, 6))
    Bsum = B.sum(axis=0) * detJ  # (6, 24)
    for m, C in enumerate(table):
        Ke[m] = sum(B[q].T @ C @ B[q] for q in range(8)) * detJ
        Fe[m] = Bsum.T @ C

    edof = _element_dofs(rve, mesh).astype(np.int32)
    mat = rve.material_id.ravel()
    ndof = 3 * mesh.n_unique

    K = sp.csr_matrix((ndof, ndof))
    rhs = np.zeros((ndof, 6))
    for m in range(len(table)):
        els = np.flatnonzero(mat == m)
        if len(els) == 0:
            continue
        ed = edof[els]
        rows = np.repeat(ed, 24, axis=1).ravel()
        cols = np.tile(ed, (1, 24)).ravel()
        data = np.tile(Ke[m].ravel(), len(els))
        K = K + sp.coo_matrix((data, (rows, cols)), shape=(ndof, ndof)).tocsr()
        np.add.at(rhs, ed.ravel(), np.tile(Fe[m], (len(els), 1)))

    anchor_c = mesh.compressed[anchor]
    mask = np.ones(ndof, dtype=bool)
    mask[3 * anchor_c:3 * anchor_c + 3] = False
    free = np.flatnonzero(mask)
    K_ff = K[free][:, free].tocsr()
    return LinearSystem(K_ff, rhs[free], free, ndof, mesh)


@dataclass(frozen=True)
class CorrectorSolution:
    """Six periodic corrector fields on the full node grid."""

    mesh: PeriodicMesh
    chi: np.ndarray         # (6, n_nodes, 3); slave values copied from masters
    residuals: np.ndarray   # (6,) relative residuals of the reduced solves
    iterations: np.ndarray  # (6,) iteration counts (0 for the direct backend)


def solve_correctors(system: LinearSystem, rtol: float = 1e-9,
                     maxiter_factor: float = 20.0,
                     backend: str = "cg") -> CorrectorSolution:
    """Solve the six corrector cases.

    backend "cg" runs a diagonally preconditioned conjugate gradient
    iteration capped at maxiter_factor * sqrt(n_dof) iterations; backend
    "direct" uses a sparse LU factorization behind the same contract.
    """
    K, rhs = system.K, system.rhs
    n = system.n_free
    x_free = np.zeros((6, n))
    residuals = np.zeros(6)
    iterations = np.zeros(6, dtype=int)

    lu = None
    if backend == "direct":
        lu = spla.splu(K.tocsc())
    elif backend == "cg":
        dinv = 1.0 / K.diagonal()
        precond = spla.LinearOperator((n, n), matvec=lambda v: dinv * v)
        maxiter = int(maxiter_factor * np.sqrt(n)) + 1
    else:
        raise ValueError(f"unknown backend {backend!r}")

    for case in range(6):
        b = rhs[:, case]
        bnorm = np.linalg.norm(b)
        if bnorm == 0.0:
            continue
        if lu is not None:
            x = lu.solve(b)
        else:
            count = [0]

            def tick(_xk):
                count[0] += 1

            try:
                x, info = spla.cg(K, b, rtol=rtol, atol=0.0, maxiter=maxiter,
                                  M=precond, callback=tick)
            except TypeError:  # scipy < 1.12 spells the tolerance 'tol'
                x, info = spla.cg(K, b, tol=rtol, atol=0.0, maxiter=maxiter,
                                  M=precond, callback=tick)
            iterations[case] = count[0]
            if info != 0:
                res = np.linalg.norm(K @ x - b) / bnorm
                raise SolverConvergenceError(case, res, rtol)
        x_free[case] = x
        residuals[case] = np.linalg.norm(K @ x - b) / bnorm

    # scatter back: free -> compressed (anchor stays zero) -> full node grid
    mesh = system.mesh
    chi_c = np.zeros((6, system.n_compressed))
    chi_c[:, system.free] = x_free
    chi_c = chi_c.reshape(6, -1, 3)
    chi = chi_c[:, mesh.compressed, :]
    return CorrectorSolution(mesh, chi, residuals, iterations)


@dataclass(frozen=True)
class HomogenizedStiffness:
    """Symmetrized homogenized stiffness with its asymmetry diagnostic."""

    matrix: np.ndarray   # (6, 6), engineering Voigt
    asymmetry: float     # max |D - D^T| before symmetrization


def _corrector_strains(rve: VoxelRVE, corr: CorrectorSolution) -> np.ndarray:
    """(6, n_el, 6) element-averaged corrector strains per case."""
    _, _, Bavg = hex_basis(rve.voxel_sizes)
    conn = corr.mesh.hexes
    strains = np.empty((6, len(conn), 6))
    for case in range(6):
        el = corr.chi[case][conn].reshape(len(conn), 24)
        strains[case] = el @ Bavg.T
    return strains


def homogenize(rve: VoxelRVE, corr: CorrectorSolution) -> HomogenizedStiffness:
    """Volume average of D(y) [I - grad chi] over the cell."""
    strains = _corrector_strains(rve, corr)
    mat = rve.material_id.ravel()
    vol_frac = rve.voxel_sizes.prod() / rve.volume
    D = np.zeros((6, 6))
    eye = np.eye(6)
    for m, C in enumerate(rve.stiffness_table):
        els = mat == m
        count = int(els.sum())
        if count == 0:
            continue
        for case in range(6):
            acc = count * eye[case] - strains[case][els].sum(axis=0)
            D[:, case] += C @ acc * vol_frac
    asym = float(np.abs(D - D.T).max())
    return HomogenizedStiffness(0.5 * (D + D.T), asym)


def localization_operator(rve: VoxelRVE, corr: CorrectorSolution) -> np.ndarray:
    """(n_el, 6, 6) per-element map from macro strain to micro stress."""
    strains = _corrector_strains(rve, corr)       # (case, el, comp)
    G = np.transpose(strains, (1, 2, 0))          # (el, comp, case)
    mat = rve.material_id.ravel()
    A = np.eye(6)[None, :, :] - G
    return np.einsum("eij,ejk->eik", rve.stiffness_table[mat], A)


def localize_stress(rve: VoxelRVE, corr: CorrectorSolution,
                    macro_strain: np.ndarray) -> np.ndarray:
    """Element micro stresses sigma = D(y) [I - grad chi] ebar (Voigt, GPa)."""
    eps = np.asarray(macro_strain, dtype=float)
    if eps.shape != (6,) or not np.all(np.isfinite(eps)):
        raise ValueError("macro_strain must be a finite 6-vector")
    return localization_operator(rve, corr) @ eps


def voigt_reuss_bounds(rve: VoxelRVE):
    """(Voigt, Reuss) bound matrices of the same voxel stiffness field."""
    counts = np.bincount(rve.material_id.ravel(), minlength=len(rve.stiffness_table))
    f = counts / counts.sum()
    voigt = np.einsum("m,mij->ij", f, rve.stiffness_table)
    reuss = np.linalg.inv(np.einsum("m,mij->ij", f,
                                    np.linalg.inv(rve.stiffness_table)))
    return voigt, reuss


def zero_mean_shift(corr: CorrectorSolution) -> CorrectorSolution:
    """Shift each corrector field to zero volume mean (gauge change only)."""
    chi = corr.chi.copy()
    means = chi[:, corr.mesh.unique_nodes, :].mean(axis=1)
    chi -= means[:, None, :]
    return CorrectorSolution(corr.mesh, chi, corr.residuals.copy(),
                             corr.iterations.copy())
