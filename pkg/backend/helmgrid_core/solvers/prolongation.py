"""
Transfer between the order-p space and the square coarse mesh of spacing 2h/p.

The prolongation interpolates coarse nodal values at the coarse vertices
(a/m, b/m), m = p/2, of every fine cell by the order-m hierarchical subset of
the fine basis: vertex coefficients first, then edge coefficients, then cell
interior coefficients, each stage a small dense system on the reference cell.
"""

from typing import List

import numpy as np
import scipy.sparse as sp

from ..discretization.basis import ReferenceElement, descriptor_level, descriptor_order
from ..discretization.fespace import FeSpace
from ..discretization.mesh import StructuredMesh
from ..errors import SpaceError
from ..logs.core.logger_config import get_component_logger

logger = get_component_logger(__name__)

DROP_TOL = 1e-13


def coarse_mesh_for(space: FeSpace) -> StructuredMesh:
    """Square mesh with spacing 2h/p over the same cells, boundary tags inherited."""
    if space.p % 2:
        raise SpaceError(f"coarse mesh needs an even order, got {space.p}")
    return space.mesh.subdivide(space.p // 2)


def _node_levels(ref: ReferenceElement, nodes: np.ndarray) -> np.ndarray:
    """0 at element vertices, 1 on element edges, 2 inside."""
    xi, eta = nodes[:, 0], nodes[:, 1]
    on = lambda v: np.isclose(v, 0.0, atol=1e-12)
    if ref.name == "square":
        zeros = on(xi) + on(1 - xi) + on(eta) + on(1 - eta)
    elif ref.name == "lower":
        zeros = on(1 - xi) + on(xi - eta) + on(eta)
    else:
        zeros = on(1 - eta) + on(xi) + on(eta - xi)
    return np.select([zeros >= 2, zeros == 1], [0, 1], 2)


def local_interpolation(ref: ReferenceElement, m: int):
    """
    Staged interpolation on one reference element.

    Returns (subset, nodes, G) with G[f, n] the coefficient of local function
    ``subset[f]`` produced by a unit value at node n.
    """
    subset = np.array([l for l, desc in enumerate(ref.descriptors) if descriptor_order(desc) <= m])
    a, b = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
    lattice = np.column_stack([a.ravel(), b.ravel()])
    nodes_all = lattice / m
    inside = ref.contains(nodes_all[:, 0], nodes_all[:, 1])
    lattice, nodes = lattice[inside], nodes_all[inside]
    if len(nodes) != len(subset):
        raise SpaceError(f"{ref.name}: {len(nodes)} interpolation nodes for {len(subset)} functions")

    values, _ = ref.evaluate(nodes[:, 0], nodes[:, 1])
    values = values[:, subset]
    func_level = np.array([descriptor_level(ref.descriptors[l]) for l in subset])
    node_level = _node_levels(ref, nodes)
    G = np.zeros((len(subset), len(nodes)))
    identity = np.eye(len(nodes))
    for level in (0, 1, 2):
        fsel = np.flatnonzero(func_level == level)
        nsel = np.flatnonzero(node_level == level)
        if len(fsel) != len(nsel):
            raise SpaceError(f"{ref.name}: level {level} has {len(fsel)} functions but {len(nsel)} nodes")
        if len(fsel) == 0:
            continue
        prev = np.flatnonzero(func_level < level)
        rhs = identity[nsel] - values[np.ix_(nsel, prev)] @ G[prev]
        block = values[np.ix_(nsel, fsel)]
        if np.linalg.cond(block) > 1e12:
            raise SpaceError(f"{ref.name}: singular level-{level} interpolation system")
        G[fsel] = np.linalg.solve(block, rhs)
    G[np.abs(G) < DROP_TOL] = 0.0
    return subset, lattice, G


def _mask_dirichlet(matrix: sp.csr_matrix, fine: FeSpace, coarse: FeSpace) -> sp.csr_matrix:
    rows = np.ones(fine.n_dofs)
    rows[fine.dirichlet_dofs] = 0.0
    cols = np.ones(coarse.n_dofs)
    cols[coarse.dirichlet_dofs] = 0.0
    masked = (sp.diags(rows) @ matrix @ sp.diags(cols)).tocsr()
    masked.eliminate_zeros()
    return masked


def build_prolongation(fine_space: FeSpace, coarse_space: FeSpace) -> sp.csr_matrix:
    """I_P: coarse nodal values (p=1 space on the 2h/p mesh) -> fine coefficients."""
    m = fine_space.p // 2
    if coarse_space.p != 1:
        raise SpaceError("prolongation targets the nodal coarse space")
    mesh = fine_space.mesh
    coarse_min = np.asarray(coarse_space.mesh.lattice_min)
    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    vals: List[np.ndarray] = []
    for group in fine_space.groups:
        subset, lattice, G = local_interpolation(group.reference, m)
        coarse_points = m * mesh.cells[:, None, :] + lattice[None]
        node_dofs = coarse_space.unit_dofs[coarse_points[..., 1] - coarse_min[1],
                                           coarse_points[..., 0] - coarse_min[0], 0]
        if np.any(node_dofs < 0):
            raise SpaceError("coarse mesh does not cover the fine cells")
        rows.append(np.repeat(group.dofs[:, subset], len(lattice), axis=1).ravel())
        cols.append(np.tile(node_dofs, (1, len(subset))).ravel())
        vals.append(np.broadcast_to(G.ravel(), (mesh.n_cells, G.size)).ravel())
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    # shared vertex/edge coefficients come out identical from every cell; keep one copy
    keep = np.unique(np.column_stack([rows, cols]), axis=0, return_index=True)[1]
    rows, cols, vals = rows[keep], cols[keep], vals[keep]
    nonzero = vals != 0.0
    matrix = sp.coo_matrix((vals[nonzero], (rows[nonzero], cols[nonzero])),
                           shape=(fine_space.n_dofs, coarse_space.n_dofs)).tocsr()
    logger.debug("Prolongation %d -> %d dofs, %d entries", coarse_space.n_dofs, fine_space.n_dofs, matrix.nnz)
    return _mask_dirichlet(matrix, fine_space, coarse_space)


def inclusion_prolongation(fine_space: FeSpace, coarse_space: FeSpace) -> sp.csr_matrix:
    """0/1 embedding of a lower-order hierarchical space on the same mesh."""
    owners = coarse_space.dof_owner()
    fine_min = np.asarray(fine_space.mesh.lattice_min)
    fine_slots = np.array([fine_space.slot_index[coarse_space.slots[s]] for s in owners[:, 2]])
    fine_dofs = fine_space.unit_dofs[owners[:, 1] - fine_min[1], owners[:, 0] - fine_min[0], fine_slots]
    if np.any(fine_dofs < 0):
        raise SpaceError("coarse space is not a subset of the fine space")
    matrix = sp.csr_matrix((np.ones(coarse_space.n_dofs), (fine_dofs, np.arange(coarse_space.n_dofs))),
                           shape=(fine_space.n_dofs, coarse_space.n_dofs))
    return _mask_dirichlet(matrix, fine_space, coarse_space)
