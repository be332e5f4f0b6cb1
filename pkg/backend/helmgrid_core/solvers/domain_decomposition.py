"""
Overlapping domain decomposition for the complex-shifted smoother.

The cell lattice is tiled by l_dd x l_dd blocks U^(i) (the last block per
direction takes the remainder); each Omega^(i) adds one layer of cells that
share an edge or vertex with U^(i). Subdomain problems use absorbing
conditions on internal boundaries and inherit the global ones elsewhere.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.sparse as sp

from ..discretization.fespace import FeSpace, assemble_local_helmholtz
from ..discretization.mesh import BoundaryTag, CoefficientField, StructuredMesh
from ..errors import FactorizationError, MeshError
from ..linalg import SparseFactorization
from ..logs.core.logger_config import get_component_logger

logger = get_component_logger(__name__)


@dataclass
class Subdomain:
    core_cells: np.ndarray
    cells: np.ndarray
    dofs: Optional[np.ndarray] = None
    core_dofs: Optional[np.ndarray] = None
    core_positions: Optional[np.ndarray] = None


@dataclass
class DomainDecomposition:
    mesh: StructuredMesh
    l_dd: int
    subdomains: List[Subdomain]
    multiplicity: Optional[np.ndarray] = None
    space: Optional[FeSpace] = field(default=None, repr=False)

    @property
    def n_subdomains(self) -> int:
        return len(self.subdomains)

    def bind(self, space: FeSpace) -> "DomainDecomposition":
        """Attach dof index maps R_i and multiplicities L_j for ``space``."""
        if space.mesh is not self.mesh and space.mesh.n_cells != self.mesh.n_cells:
            raise MeshError("space and decomposition live on different meshes")
        multiplicity = np.zeros(space.n_dofs, dtype=int)
        for sub in self.subdomains:
            sub.dofs = space.cell_dofs(sub.cells)
            sub.core_dofs = space.cell_dofs(sub.core_cells)
            sub.core_positions = np.searchsorted(sub.dofs, sub.core_dofs)
            multiplicity[sub.core_dofs] += 1
        if np.any(multiplicity < 1):
            raise MeshError("some dofs are not covered by any subdomain core")
        self.multiplicity = multiplicity
        self.space = space
        return self


def partition(mesh: StructuredMesh, l_dd: int) -> DomainDecomposition:
    """Tile the cell lattice with l_dd x l_dd blocks and add one overlap layer."""
    if l_dd < 2:
        raise MeshError(f"subdomain size l_dd must be >= 2, got {l_dd}")
    local = mesh.cells - np.asarray(mesh.lattice_min)
    block = local // l_dd
    n_bx = int(block[:, 0].max()) + 1
    block_id = block[:, 1] * n_bx + block[:, 0]
    order = np.argsort(block_id, kind="stable")
    ids, starts = np.unique(block_id[order], return_index=True)
    groups = np.split(order, starts[1:])

    offsets = np.array([(di, dj) for dj in (-1, 0, 1) for di in (-1, 0, 1)])
    subdomains = []
    for core in groups:
        ring = (mesh.cells[core][:, None, :] + offsets[None]).reshape(-1, 2)
        cells = mesh.cell_index(ring[:, 0], ring[:, 1])
        subdomains.append(Subdomain(core_cells=np.sort(core), cells=np.unique(cells[cells >= 0])))
    logger.debug("Partitioned %d cells into %d subdomains (l_dd=%d)", mesh.n_cells, len(subdomains), l_dd)
    return DomainDecomposition(mesh=mesh, l_dd=l_dd, subdomains=subdomains)


def subdomain_absorbing_edges(mesh: StructuredMesh, cells: np.ndarray):
    """Edges of d(Omega_i) treated as absorbing, with the Omega_i cell weighting each one."""
    edges = mesh.cell_edges[cells].ravel()
    owners = np.repeat(cells, 4)
    unique, first, counts = np.unique(edges, return_index=True, return_counts=True)
    boundary = counts == 1
    edge_ids = unique[boundary]
    owner = owners[first[boundary]]
    position = mesh.boundary_position()[edge_ids]
    absorbing = np.ones(len(edge_ids), dtype=bool)
    on_global = position >= 0
    inherited = np.array([mesh.boundary_tags[q] == BoundaryTag.ABSORBING for q in position[on_global]], dtype=bool)
    absorbing[on_global] = inherited
    return edge_ids[absorbing], owner[absorbing]


@dataclass
class SubdomainOperators:
    """Factorized A_s^(i) plus the global shifted operator they correct against."""
    dd: DomainDecomposition
    shifted: sp.csr_matrix
    factorizations: List[SparseFactorization]
    threads: int = 1


def build_subdomain_operators(space: FeSpace, coeffs: CoefficientField, alpha_s: float,
                              dd: DomainDecomposition, shifted: sp.csr_matrix,
                              threads: int = 1) -> SubdomainOperators:
    """Assemble a(.,.; Omega_i, Gamma_abs^(i)) with shift alpha_s on every subdomain and factor it."""
    if dd.space is not space:
        dd.bind(space)

    def factor(index: int) -> SparseFactorization:
        sub = dd.subdomains[index]
        edges, owners = subdomain_absorbing_edges(space.mesh, sub.cells)
        local = assemble_local_helmholtz(space, coeffs, alpha_s, sub.cells, edges, owners,
                                         sub.dofs, space.dirichlet_dofs)
        try:
            return SparseFactorization(local)
        except FactorizationError as exc:
            raise FactorizationError(f"subdomain {index} matrix is singular: {exc}") from exc

    indices = range(dd.n_subdomains)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            factorizations = list(pool.map(factor, indices))
    else:
        factorizations = [factor(i) for i in indices]
    logger.info("Factored %d subdomain matrices (alpha_s=%g, max size %d)", dd.n_subdomains, alpha_s,
                max(len(s.dofs) for s in dd.subdomains))
    return SubdomainOperators(dd=dd, shifted=shifted, factorizations=factorizations, threads=threads)


def dd_step(u: np.ndarray, f: np.ndarray, ops: SubdomainOperators) -> np.ndarray:
    """
    One additive DD step for A_s u = f:

        w_i = R_i u + (A_s^(i))^-1 R_i (f - A_s u),
        u'_j = (1 / L_j) sum over i with j in Dofs(U_i) of (R_i^T w_i)_j.
    """
    dd = ops.dd
    residual = f - ops.shifted @ u

    def local_solve(index: int) -> np.ndarray:
        sub = dd.subdomains[index]
        return u[sub.dofs] + ops.factorizations[index].solve(residual[sub.dofs])

    indices = range(dd.n_subdomains)
    if ops.threads > 1:
        with ThreadPoolExecutor(max_workers=ops.threads) as pool:
            local = list(pool.map(local_solve, indices))
    else:
        local = [local_solve(i) for i in indices]

    combined = np.zeros(len(u), dtype=np.result_type(u, residual, complex))
    for sub, w in zip(dd.subdomains, local):
        combined[sub.core_dofs] += w[sub.core_positions]
    return combined / dd.multiplicity


def csdd_smoother(u: np.ndarray, f: np.ndarray, matrix: sp.spmatrix, ops: SubdomainOperators,
                  n_dd: int = 1) -> np.ndarray:
    """Residual of the unshifted problem, corrected by n_dd DD steps on the shifted one."""
    residual = f - matrix @ u
    v = np.zeros_like(residual, dtype=complex)
    for _ in range(n_dd):
        v = dd_step(v, residual, ops)
    return u + v
