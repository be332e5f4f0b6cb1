"""
Order-p continuous Galerkin spaces on structured meshes and assembly of the
Helmholtz bilinear form

    a(u, v) = (grad u, grad v) - ((k^2 (1 + i alpha) + i eps) u, v) - <i k u, v>_{Gamma_abs}

Dofs are owned by lattice points: point (i, j) owns its vertex, the edges
leaving it in +x, +y (and the diagonal for triangles) and the cell whose lower
left corner it is. Dofs are numbered lexicographically by (j, i, slot), so
a unit cell's dofs form the fixed block ``unit_dofs[j, i, :]``.
"""

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from ..errors import SpaceError
from ..linalg import sparse_lu
from ..logs.core.logger_config import get_component_logger
from .basis import (ReferenceElement, edge_mass_matrix, reference_elements, slot_layout)
from .mesh import EDGE_D, EDGE_H, EDGE_V, BoundaryTag, CoefficientField, StructuredMesh

logger = get_component_logger(__name__)

SUPPORTED_ORDERS = (2, 4, 6, 8)
_EDGE_TAGS = {EDGE_H: ("eh", (1, 0)), EDGE_V: ("ev", (0, 1)), EDGE_D: ("ed", (1, 1))}


@dataclass(frozen=True, eq=False)
class ElementGroup:
    """All elements of one reference shape: element e sits in mesh cell e."""
    reference: ReferenceElement
    dofs: np.ndarray


class FeSpace:
    """Continuous Galerkin space of order p with a hierarchical, translation-compatible basis."""

    def __init__(self, mesh: StructuredMesh, p: int):
        self.mesh = mesh
        self.p = int(p)
        self.kind = mesh.element_kind.value
        self.slots = slot_layout(self.p, self.kind)
        self.slot_index = {desc: s for s, desc in enumerate(self.slots)}

        masks = mesh.entity_masks()
        exists = np.stack([masks[desc[0]] for desc in self.slots], axis=-1)
        self.unit_dofs = np.full(exists.shape, -1, dtype=int)
        self.unit_dofs[exists] = np.arange(int(exists.sum()))
        self.n_dofs = int(exists.sum())

        local = mesh.cells - np.asarray(mesh.lattice_min)
        self.groups: List[ElementGroup] = []
        for ref in reference_elements(self.p, self.kind):
            di = np.array([key[0] for key in ref.keys])
            dj = np.array([key[1] for key in ref.keys])
            slot = np.array([self.slot_index[key[2]] for key in ref.keys])
            dofs = self.unit_dofs[local[:, 1, None] + dj[None], local[:, 0, None] + di[None], slot[None]]
            if np.any(dofs < 0):
                raise SpaceError("element references a dof of a missing entity")
            self.groups.append(ElementGroup(ref, dofs))

        self.edge_dofs = self._build_edge_dofs()
        self.vertex_dofs = self.unit_dofs[mesh.vertices[:, 1] - mesh.lattice_min[1],
                                          mesh.vertices[:, 0] - mesh.lattice_min[0], 0]
        dirichlet_edges = mesh.edges_with_tag(BoundaryTag.DIRICHLET)
        self.dirichlet_dofs = np.unique(self.edge_dofs[dirichlet_edges]) if len(dirichlet_edges) else np.zeros(0, int)
        logger.debug("FeSpace p=%d on %s mesh: %d dofs, %d Dirichlet", self.p, self.kind,
                     self.n_dofs, len(self.dirichlet_dofs))

    def _build_edge_dofs(self) -> np.ndarray:
        mesh = self.mesh
        anchors = mesh.edge_anchors - np.asarray(mesh.lattice_min)
        table = np.empty((mesh.n_edges, self.p + 1), dtype=int)
        for kind, (tag, (di, dj)) in _EDGE_TAGS.items():
            sel = np.flatnonzero(mesh.edge_kinds == kind)
            if len(sel) == 0:
                continue
            i, j = anchors[sel, 0], anchors[sel, 1]
            table[sel, 0] = self.unit_dofs[j, i, 0]
            table[sel, 1] = self.unit_dofs[j + dj, i + di, 0]
            for n in range(2, self.p + 1):
                table[sel, n] = self.unit_dofs[j, i, self.slot_index[(tag, n)]]
        return table

    @property
    def n_slots(self) -> int:
        return len(self.slots)

    def cell_dofs(self, cell_ids: Sequence[int]) -> np.ndarray:
        """Sorted union of the dofs of the given cells."""
        cell_ids = np.asarray(cell_ids, dtype=int)
        return np.unique(np.concatenate([g.dofs[cell_ids].ravel() for g in self.groups]))

    def dof_owner(self) -> np.ndarray:
        """(n_dofs, 3) array of (i, j, slot) owning each dof, absolute lattice coordinates."""
        j, i, s = np.nonzero(self.unit_dofs >= 0)
        return np.column_stack([i + self.mesh.lattice_min[0], j + self.mesh.lattice_min[1], s])

    def nearest_vertex_dof(self, point) -> int:
        coords = self.mesh.vertex_coordinates()
        nearest = int(np.argmin(np.sum((coords - np.asarray(point, float)) ** 2, axis=1)))
        return int(self.vertex_dofs[nearest])

    def locate(self, points: np.ndarray):
        """Cell index and unit-cell coordinates of physical points (cells clamp at the top/right rim)."""
        mesh = self.mesh
        rel = (np.atleast_2d(points) - np.asarray(mesh.origin)) / mesh.h
        lattice = np.floor(rel).astype(int)
        local = rel - lattice
        cell = mesh.cell_index(lattice[:, 0], lattice[:, 1])
        # points on the top/right rim of the domain belong to the cell below/left
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            retry = cell < 0
            if di:
                retry &= local[:, 0] < 1e-12
            if dj:
                retry &= local[:, 1] < 1e-12
            idx = np.flatnonzero(retry)
            if len(idx) == 0:
                continue
            candidate = mesh.cell_index(lattice[idx, 0] - di, lattice[idx, 1] - dj)
            idx, candidate = idx[candidate >= 0], candidate[candidate >= 0]
            cell[idx] = candidate
            local[idx] += np.array([di, dj])
        if np.any(cell < 0):
            raise SpaceError("point outside the mesh")
        return cell, local

    def evaluate(self, coefficients: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Point values of the FE function with the given coefficient vector."""
        cell, local = self.locate(points)
        out = np.zeros(len(cell), dtype=np.result_type(coefficients, float))
        assigned = np.zeros(len(cell), dtype=bool)
        for group in self.groups:
            inside = group.reference.contains(local[:, 0], local[:, 1]) & ~assigned
            if not np.any(inside):
                continue
            values, _ = group.reference.evaluate(local[inside, 0], local[inside, 1])
            out[inside] = np.sum(values * coefficients[group.dofs[cell[inside]]], axis=1)
            assigned |= inside
        return out


def build_space(mesh: StructuredMesh, p: int) -> FeSpace:
    """Order-p space, p in {2, 4, 6, 8}."""
    if p not in SUPPORTED_ORDERS:
        raise SpaceError(f"order must be one of {SUPPORTED_ORDERS} (even, so p/2 coarsening is integral), got {p}")
    return FeSpace(mesh, p)


def build_linear_space(mesh: StructuredMesh) -> FeSpace:
    """Lowest-order space: nodal p=1 functions (QSFEM coarse level and stencil checks)."""
    return FeSpace(mesh, 1)


# ----------------------------------------------------------------------------
# Assembly
# ----------------------------------------------------------------------------

def _assemble(space: FeSpace, *, cell_ids=None, stiffness: float = 0.0, mass_weight=None,
              edge_ids=None, edge_weight=None, local_index: Optional[np.ndarray] = None,
              size: Optional[int] = None) -> sp.csr_matrix:
    """
    COO -> CSR assembly of  stiffness * K + h^2 mass_weight(c) M  over cells plus
    h edge_weight(e) B over edges.
    """
    h = space.mesh.h
    size = space.n_dofs if size is None else size
    rows, cols, data = [], [], []
    if cell_ids is None:
        cell_ids = np.arange(space.mesh.n_cells)
    cell_ids = np.asarray(cell_ids, dtype=int)
    if len(cell_ids) and (stiffness != 0.0 or mass_weight is not None):
        mw = np.zeros(len(cell_ids), complex) if mass_weight is None else np.asarray(mass_weight, complex)
        for group in space.groups:
            ref = group.reference
            block = stiffness * ref.stiffness[None] + (h ** 2) * mw[:, None, None] * ref.mass[None]
            dofs = group.dofs[cell_ids]
            rows.append(np.repeat(dofs, ref.n_local, axis=1).ravel())
            cols.append(np.tile(dofs, (1, ref.n_local)).ravel())
            data.append(block.ravel())
    if edge_ids is not None and len(edge_ids):
        bmat = edge_mass_matrix(space.p)
        dofs = space.edge_dofs[np.asarray(edge_ids, dtype=int)]
        block = h * np.asarray(edge_weight, complex)[:, None, None] * bmat[None]
        rows.append(np.repeat(dofs, space.p + 1, axis=1).ravel())
        cols.append(np.tile(dofs, (1, space.p + 1)).ravel())
        data.append(block.ravel())
    if not data:
        return sp.csr_matrix((size, size), dtype=complex)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    if local_index is not None:
        rows, cols = local_index[rows], local_index[cols]
        if np.any(rows < 0):
            raise SpaceError("assembly touched a dof outside the local index set")
    matrix = sp.coo_matrix((np.concatenate(data), (rows, cols)), shape=(size, size)).tocsr()
    matrix.eliminate_zeros()
    return matrix


def eliminate_dirichlet(matrix: sp.spmatrix, dofs: np.ndarray) -> sp.csr_matrix:
    """Zero the rows and columns of ``dofs`` and put ones on their diagonal."""
    if len(dofs) == 0:
        return sp.csr_matrix(matrix)
    keep = np.ones(matrix.shape[0])
    keep[dofs] = 0.0
    scale = sp.diags(keep)
    result = (scale @ matrix @ scale + sp.diags(1.0 - keep)).tocsr()
    result.eliminate_zeros()
    return result


def assemble_stiffness(space: FeSpace) -> sp.csr_matrix:
    """Raw stiffness matrix (no boundary conditions)."""
    return _assemble(space, stiffness=1.0).real.tocsr()


def assemble_mass_weighted(space: FeSpace, weight) -> sp.csr_matrix:
    """Galerkin mass matrix with a cell-wise (complex) weight; no boundary conditions applied."""
    weight = np.broadcast_to(np.asarray(weight, complex), (space.mesh.n_cells,))
    return _assemble(space, mass_weight=weight)


def boundary_mass(space: FeSpace, coeffs: CoefficientField) -> sp.csr_matrix:
    """<i k u, v> over absorbing edges, k taken from the adjacent cell."""
    mesh = space.mesh
    absorbing = np.array([t == BoundaryTag.ABSORBING for t in mesh.boundary_tags], dtype=bool)
    if not np.any(absorbing):
        return sp.csr_matrix((space.n_dofs, space.n_dofs), dtype=complex)
    edges = mesh.boundary_edges[absorbing]
    weight = 1j * coeffs.k[mesh.boundary_cells[absorbing]]
    return _assemble(space, edge_ids=edges, edge_weight=weight)


def form_weight(coeffs: CoefficientField, shift: float) -> np.ndarray:
    """Cell-wise k^2 (1 + i shift) + i eps."""
    return coeffs.k ** 2 * (1.0 + 1j * shift) + 1j * coeffs.eps


def assemble_helmholtz(space: FeSpace, coeffs: CoefficientField, shift: float = 0.0) -> sp.csr_matrix:
    """Helmholtz matrix (shift=0) or its complex-shifted variant A_s (shift=alpha_s)."""
    if shift < 0:
        raise SpaceError(f"complex shift must be non-negative, got {shift}")
    mesh = space.mesh
    absorbing = np.array([t == BoundaryTag.ABSORBING for t in mesh.boundary_tags], dtype=bool)
    matrix = _assemble(space, stiffness=1.0, mass_weight=-form_weight(coeffs, shift),
                       edge_ids=mesh.boundary_edges[absorbing],
                       edge_weight=-1j * coeffs.k[mesh.boundary_cells[absorbing]])
    return eliminate_dirichlet(matrix, space.dirichlet_dofs)


def assemble_local_helmholtz(space: FeSpace, coeffs: CoefficientField, shift: float,
                             cell_ids: np.ndarray, absorbing_edges: np.ndarray,
                             absorbing_cells: np.ndarray, dofs: np.ndarray,
                             dirichlet_dofs: np.ndarray) -> sp.csr_matrix:
    """
    Helmholtz form restricted to a set of cells, in the local numbering of ``dofs``.

    ``absorbing_cells`` gives, per absorbing edge, the cell whose k weights it.
    """
    local_index = np.full(space.n_dofs, -1, dtype=int)
    local_index[dofs] = np.arange(len(dofs))
    matrix = _assemble(space, cell_ids=cell_ids, stiffness=1.0,
                       mass_weight=-form_weight(coeffs, shift)[cell_ids],
                       edge_ids=absorbing_edges, edge_weight=-1j * coeffs.k[absorbing_cells],
                       local_index=local_index, size=len(dofs))
    local_dirichlet = local_index[dirichlet_dofs]
    return eliminate_dirichlet(matrix, local_dirichlet[local_dirichlet >= 0])


def load_vector(space: FeSpace, func: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> np.ndarray:
    """b_i = integral of func * phi_i, by the element quadrature."""
    mesh = space.mesh
    b = np.zeros(space.n_dofs, dtype=complex)
    for group in space.groups:
        ref = group.reference
        values, _ = ref.evaluate(ref.points[:, 0], ref.points[:, 1])
        x = mesh.origin[0] + mesh.h * (mesh.cells[:, 0, None] + ref.points[None, :, 0])
        y = mesh.origin[1] + mesh.h * (mesh.cells[:, 1, None] + ref.points[None, :, 1])
        fvals = np.asarray(func(x, y), dtype=complex)
        local = mesh.h ** 2 * np.einsum("cq,q,qi->ci", fvals, ref.weights, values)
        np.add.at(b, group.dofs.ravel(), local.ravel())
    return b


def project(space: FeSpace, func: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> np.ndarray:
    """L2 projection of ``func`` onto the space (exact for functions in the space)."""
    mass = assemble_mass_weighted(space, 1.0).tocsc()
    coefficients = sparse_lu(mass).solve(load_vector(space, func))
    return coefficients.real if np.all(np.isreal(coefficients)) else coefficients
