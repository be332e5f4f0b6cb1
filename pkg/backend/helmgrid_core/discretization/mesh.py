"""
Regular square and triangle meshes on unions of lattice cells.

A mesh is a set of h x h cells of the lattice (origin + h Z^2). Triangle
meshes split every cell along its lower-left to upper-right diagonal. Meshes
are immutable; tagging or subdividing returns a new mesh.
"""

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ..errors import MeshError
from ..logs.core.logger_config import get_component_logger

logger = get_component_logger(__name__)

EDGE_H, EDGE_V, EDGE_D = 0, 1, 2


class ElementKind(str, Enum):
    SQUARE = "square"
    TRIANGLE = "triangle"


class BoundaryTag(str, Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    ABSORBING = "absorbing"


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    BOTTOM = "bottom"
    TOP = "top"


@dataclass(frozen=True, eq=False)
class StructuredMesh:
    """
    Entity tables of a structured mesh.

    Lattice arrays (``cell_ids``, ``vertex_ids``, ``hedge_ids``, ...) are indexed
    ``[j - lattice_min[1], i - lattice_min[0]]`` and hold -1 where the entity is
    absent. Edges are oriented in +x, +y or along the diagonal; boundary edges
    are listed counterclockwise.
    """
    h: float
    origin: Tuple[float, float]
    element_kind: ElementKind
    cells: np.ndarray
    lattice_min: Tuple[int, int]
    cell_ids: np.ndarray
    vertex_ids: np.ndarray
    hedge_ids: np.ndarray
    vedge_ids: np.ndarray
    dedge_ids: np.ndarray
    vertices: np.ndarray
    edges: np.ndarray
    edge_kinds: np.ndarray
    edge_anchors: np.ndarray
    cell_edges: np.ndarray
    boundary_edges: np.ndarray
    boundary_sides: Tuple[Side, ...]
    boundary_cells: np.ndarray
    boundary_tags: Tuple[Optional[BoundaryTag], ...]

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def n_elements(self) -> int:
        return self.n_cells * (2 if self.element_kind == ElementKind.TRIANGLE else 1)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_boundary_edges(self) -> int:
        return len(self.boundary_edges)

    @property
    def lattice_shape(self) -> Tuple[int, int]:
        """(rows, columns) of the vertex lattice arrays."""
        return self.vertex_ids.shape

    @property
    def extent(self) -> Tuple[float, float, float, float]:
        """Physical bounding box (x_min, x_max, y_min, y_max)."""
        lo = self.cells.min(axis=0)
        hi = self.cells.max(axis=0) + 1
        x0, y0 = self.origin
        return (x0 + self.h * lo[0], x0 + self.h * hi[0], y0 + self.h * lo[1], y0 + self.h * hi[1])

    def vertex_coordinates(self) -> np.ndarray:
        return np.asarray(self.origin) + self.h * self.vertices

    def cell_centers(self) -> np.ndarray:
        return np.asarray(self.origin) + self.h * (self.cells + 0.5)

    def cell_index(self, i, j) -> np.ndarray:
        """Cell index of lattice cell(s) (i, j); -1 outside the mesh."""
        i = np.asarray(i) - self.lattice_min[0]
        j = np.asarray(j) - self.lattice_min[1]
        rows, cols = self.cell_ids.shape
        inside = (i >= 0) & (i < cols) & (j >= 0) & (j < rows)
        out = np.full(np.shape(i), -1, dtype=int)
        out[inside] = self.cell_ids[j[inside], i[inside]]
        return out

    def entity_masks(self) -> Dict[str, np.ndarray]:
        """Presence of each entity type per point of the vertex lattice."""
        shape = self.lattice_shape

        def padded(ids):
            mask = np.zeros(shape, dtype=bool)
            mask[:ids.shape[0], :ids.shape[1]] = ids >= 0
            return mask

        cell_mask = padded(self.cell_ids)
        masks = {"v": self.vertex_ids >= 0, "eh": padded(self.hedge_ids),
                 "ev": padded(self.vedge_ids), "c": cell_mask, "tl": cell_mask, "tu": cell_mask}
        masks["ed"] = cell_mask if self.element_kind == ElementKind.TRIANGLE else np.zeros(shape, bool)
        return masks

    def boundary_position(self) -> np.ndarray:
        """Map edge index -> position in ``boundary_edges`` (-1 for interior edges)."""
        pos = np.full(self.n_edges, -1, dtype=int)
        pos[self.boundary_edges] = np.arange(self.n_boundary_edges)
        return pos

    def edges_with_tag(self, tag: BoundaryTag) -> np.ndarray:
        return np.array([e for e, t in zip(self.boundary_edges, self.boundary_tags) if t == tag], dtype=int)

    def subdivide(self, m: int) -> "StructuredMesh":
        """Square mesh of spacing h/m over the same cells; boundary tags are inherited."""
        if m < 1:
            raise MeshError(f"subdivision factor must be positive, got {m}")
        a, b = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
        fine_cells = (m * self.cells[:, None, :] + np.stack([a.ravel(), b.ravel()], axis=1)[None]).reshape(-1, 2)
        child = build_mesh(fine_cells, self.h / m, ElementKind.SQUARE, self.origin)
        if all(t is None for t in self.boundary_tags):
            return child
        position = self.boundary_position()
        tags = []
        for e in child.boundary_edges:
            ci, cj = child.edge_anchors[e]
            pi, pj = ci // m - self.lattice_min[0], cj // m - self.lattice_min[1]
            table = self.hedge_ids if child.edge_kinds[e] == EDGE_H else self.vedge_ids
            tags.append(self.boundary_tags[position[table[pj, pi]]])
        return dataclasses.replace(child, boundary_tags=tuple(tags))

    def parent_cells(self, parent: "StructuredMesh", m: int) -> np.ndarray:
        """Index in ``parent`` of the cell containing each cell of this m-times subdivided mesh."""
        return parent.cell_index(self.cells[:, 0] // m, self.cells[:, 1] // m)


def _lattice_ids(mask: np.ndarray) -> np.ndarray:
    ids = np.full(mask.shape, -1, dtype=int)
    ids[mask] = np.arange(int(mask.sum()))
    return ids


def build_mesh(cells: Union[Sequence, np.ndarray], h: float,
               element_kind: Union[ElementKind, str] = ElementKind.SQUARE,
               origin: Tuple[float, float] = (0.0, 0.0)) -> StructuredMesh:
    """Build a mesh from an explicit set of lattice cells (i, j)."""
    element_kind = ElementKind(element_kind)
    cells = np.unique(np.asarray(cells, dtype=int).reshape(-1, 2), axis=0)
    if len(cells) == 0:
        raise MeshError("a mesh needs at least one cell")
    if not h > 0:
        raise MeshError(f"mesh spacing must be positive, got {h}")
    cells = cells[np.lexsort((cells[:, 0], cells[:, 1]))]
    lo = cells.min(axis=0)
    local = cells - lo
    ncx, ncy = local.max(axis=0) + 1

    cell_mask = np.zeros((ncy, ncx), dtype=bool)
    cell_mask[local[:, 1], local[:, 0]] = True
    cell_ids = _lattice_ids(cell_mask)

    vertex_mask = np.zeros((ncy + 1, ncx + 1), dtype=bool)
    for dj in (0, 1):
        for di in (0, 1):
            vertex_mask[dj:dj + ncy, di:di + ncx] |= cell_mask
    hedge_mask = np.zeros((ncy + 1, ncx), dtype=bool)
    hedge_mask[:-1] |= cell_mask
    hedge_mask[1:] |= cell_mask
    vedge_mask = np.zeros((ncy, ncx + 1), dtype=bool)
    vedge_mask[:, :-1] |= cell_mask
    vedge_mask[:, 1:] |= cell_mask
    dedge_mask = cell_mask if element_kind == ElementKind.TRIANGLE else np.zeros_like(cell_mask)

    vertex_ids = _lattice_ids(vertex_mask)
    vj, vi = np.nonzero(vertex_mask)
    vertices = np.column_stack([vi, vj]) + lo

    # edges numbered by anchor lattice point (j, i), then h < v < d
    anchors, kinds = [], []
    for kind, mask in ((EDGE_H, hedge_mask), (EDGE_V, vedge_mask), (EDGE_D, dedge_mask)):
        ej, ei = np.nonzero(mask)
        anchors.append(np.column_stack([ei, ej]))
        kinds.append(np.full(len(ej), kind))
    anchors = np.concatenate(anchors)
    kinds = np.concatenate(kinds)
    order = np.lexsort((kinds, anchors[:, 0], anchors[:, 1]))
    anchors, kinds = anchors[order], kinds[order]
    edge_number = np.arange(len(kinds))

    hedge_ids = np.full(hedge_mask.shape, -1, dtype=int)
    vedge_ids = np.full(vedge_mask.shape, -1, dtype=int)
    dedge_ids = np.full(dedge_mask.shape, -1, dtype=int)
    ends = np.empty_like(anchors)
    for kind, table, step in ((EDGE_H, hedge_ids, (1, 0)), (EDGE_V, vedge_ids, (0, 1)), (EDGE_D, dedge_ids, (1, 1))):
        sel = kinds == kind
        table[anchors[sel, 1], anchors[sel, 0]] = edge_number[sel]
        ends[sel] = anchors[sel] + np.array(step)
    edges = np.column_stack([vertex_ids[anchors[:, 1], anchors[:, 0]], vertex_ids[ends[:, 1], ends[:, 0]]])

    ci, cj = local[:, 0], local[:, 1]
    cell_edges = np.column_stack([hedge_ids[cj, ci], vedge_ids[cj, ci + 1], hedge_ids[cj + 1, ci], vedge_ids[cj, ci]])

    _check_connected(cell_ids, cell_mask)

    boundary, sides, adjacent = _find_boundary(cell_mask, cell_ids, hedge_ids, vedge_ids)
    boundary, sides, adjacent = _counterclockwise(boundary, sides, adjacent, edges, vertices.shape[0])

    mesh = StructuredMesh(
        h=float(h), origin=(float(origin[0]), float(origin[1])), element_kind=element_kind,
        cells=cells, lattice_min=(int(lo[0]), int(lo[1])), cell_ids=cell_ids, vertex_ids=vertex_ids,
        hedge_ids=hedge_ids, vedge_ids=vedge_ids, dedge_ids=dedge_ids, vertices=vertices,
        edges=edges, edge_kinds=kinds, edge_anchors=anchors + lo, cell_edges=cell_edges,
        boundary_edges=boundary, boundary_sides=sides, boundary_cells=adjacent,
        boundary_tags=(None,) * len(boundary))
    logger.debug("Built %s mesh: %d cells, %d vertices, %d edges, %d boundary edges",
                 element_kind.value, mesh.n_cells, mesh.n_vertices, mesh.n_edges, mesh.n_boundary_edges)
    return mesh


def _check_connected(cell_ids: np.ndarray, cell_mask: np.ndarray) -> None:
    right = cell_mask[:, :-1] & cell_mask[:, 1:]
    up = cell_mask[:-1, :] & cell_mask[1:, :]
    rows = np.concatenate([cell_ids[:, :-1][right], cell_ids[:-1, :][up]])
    cols = np.concatenate([cell_ids[:, 1:][right], cell_ids[1:, :][up]])
    n = int(cell_mask.sum())
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    n_components, _ = connected_components(graph, directed=False)
    if n_components != 1:
        raise MeshError(f"domain must be connected through cell edges, found {n_components} components")


def _find_boundary(cell_mask, cell_ids, hedge_ids, vedge_ids):
    ncy, ncx = cell_mask.shape
    edges, sides, adjacent = [], [], []
    padded = np.zeros((ncy + 2, ncx + 2), dtype=bool)
    padded[1:-1, 1:-1] = cell_mask
    ids = np.full((ncy + 2, ncx + 2), -1, dtype=int)
    ids[1:-1, 1:-1] = cell_ids

    hj, hi = np.nonzero(hedge_ids >= 0)
    above = padded[hj + 1, hi + 1]
    below = padded[hj, hi + 1]
    for flag, side, cell in ((above & ~below, Side.BOTTOM, ids[hj + 1, hi + 1]),
                             (below & ~above, Side.TOP, ids[hj, hi + 1])):
        edges.append(hedge_ids[hj[flag], hi[flag]])
        sides += [side] * int(flag.sum())
        adjacent.append(cell[flag])

    vj, vi = np.nonzero(vedge_ids >= 0)
    right = padded[vj + 1, vi + 1]
    left = padded[vj + 1, vi]
    for flag, side, cell in ((right & ~left, Side.LEFT, ids[vj + 1, vi + 1]),
                             (left & ~right, Side.RIGHT, ids[vj + 1, vi])):
        edges.append(vedge_ids[vj[flag], vi[flag]])
        sides += [side] * int(flag.sum())
        adjacent.append(cell[flag])
    return np.concatenate(edges), sides, np.concatenate(adjacent)


def _counterclockwise(boundary, sides, adjacent, edges, n_vertices):
    """Order boundary edges along counterclockwise loops (domain on the left)."""
    reverse = np.array([s in (Side.TOP, Side.LEFT) for s in sides])
    start = np.where(reverse, edges[boundary, 1], edges[boundary, 0])
    stop = np.where(reverse, edges[boundary, 0], edges[boundary, 1])
    outgoing: Dict[int, list] = {}
    for pos, v in enumerate(start):
        outgoing.setdefault(int(v), []).append(pos)
    bottom_first = sorted(range(len(boundary)), key=lambda q: (sides[q] != Side.BOTTOM, start[q]))
    visited = np.zeros(len(boundary), dtype=bool)
    walk = []
    for seed in bottom_first:
        current = seed
        while not visited[current]:
            visited[current] = True
            walk.append(current)
            candidates = [q for q in outgoing.get(int(stop[current]), []) if not visited[q]]
            if not candidates:
                break
            current = candidates[0]
    walk = np.array(walk, dtype=int)
    return boundary[walk], tuple(sides[q] for q in walk), adjacent[walk]


def build_rectangle_mesh(nx: int, ny: int, h: float,
                         element_kind: Union[ElementKind, str] = ElementKind.SQUARE,
                         origin: Tuple[float, float] = (0.0, 0.0)) -> StructuredMesh:
    if nx < 1 or ny < 1:
        raise MeshError(f"rectangle needs at least one cell per direction, got {nx}x{ny}")
    i, j = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
    return build_mesh(np.column_stack([i.ravel(), j.ravel()]), h, element_kind, origin)


def build_unit_square_mesh(n_cells_per_side: int,
                           element_kind: Union[ElementKind, str] = ElementKind.SQUARE) -> StructuredMesh:
    """Mesh of the unit square with h = 1/n."""
    if n_cells_per_side < 1:
        raise MeshError(f"n_cells_per_side must be >= 1, got {n_cells_per_side}")
    return build_rectangle_mesh(n_cells_per_side, n_cells_per_side, 1.0 / n_cells_per_side, element_kind)


def tag_boundary(mesh: StructuredMesh,
                 side_tags: Mapping[Union[Side, str], Union[BoundaryTag, str]]) -> StructuredMesh:
    """Tag every boundary edge by the side its outward normal points to."""
    by_side = {Side(side): BoundaryTag(tag) for side, tag in side_tags.items()}
    tags = tuple(by_side.get(side) for side in mesh.boundary_sides)
    missing = sorted({side.value for side, tag in zip(mesh.boundary_sides, tags) if tag is None})
    if missing:
        raise MeshError(f"boundary edges left untagged on side(s): {', '.join(missing)}")
    return dataclasses.replace(mesh, boundary_tags=tags)


def tag_boundary_edges(mesh: StructuredMesh, tags: Sequence[Union[BoundaryTag, str]]) -> StructuredMesh:
    """Tag boundary edges one by one (general unions of cells)."""
    if len(tags) != mesh.n_boundary_edges:
        raise MeshError(f"expected {mesh.n_boundary_edges} tags, got {len(tags)}")
    return dataclasses.replace(mesh, boundary_tags=tuple(BoundaryTag(t) for t in tags))


# ----------------------------------------------------------------------------
# Coefficients
# ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CoefficientField:
    """Cell-wise wavenumber k(c) > 0 and damping eps(c) >= 0."""
    k: np.ndarray
    eps: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        eps = np.asarray(self.eps, dtype=float)
        if k.shape != eps.shape or k.ndim != 1:
            raise MeshError(f"k and eps must be 1-D arrays of equal length, got {k.shape} and {eps.shape}")
        if not np.all(np.isfinite(k)) or np.any(k <= 0):
            raise MeshError("wavenumber must be positive and finite in every cell")
        if not np.all(np.isfinite(eps)) or np.any(eps < 0):
            raise MeshError("damping must be non-negative and finite in every cell")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "eps", eps)

    @classmethod
    def constant(cls, mesh: StructuredMesh, k: float, eps: float = 0.0) -> "CoefficientField":
        return cls(np.full(mesh.n_cells, float(k)), np.full(mesh.n_cells, float(eps)))

    def restrict(self, cell_index: np.ndarray) -> "CoefficientField":
        return CoefficientField(self.k[cell_index], self.eps[cell_index])

    def subdivided(self, mesh: StructuredMesh, m: int) -> "CoefficientField":
        """Coefficients on ``mesh.subdivide(m)``, inherited from the parent cells."""
        child = mesh.subdivide(m)
        return self.restrict(child.parent_cells(mesh, m))


def layer_profile(depth, layer_width: float, k: float):
    """sin^2 ramp from 0 at the inner layer edge to 2k^2/pi at depth layer_width."""
    d = np.clip(np.asarray(depth, dtype=float), 0.0, layer_width)
    return (2.0 * k ** 2 / math.pi) * np.sin(0.5 * math.pi * d / layer_width) ** 2


def cells_for_layer_dofs(layer_dofs: int, p: int) -> int:
    """Layer thickness in cells for a thickness given in dofs (rounded up)."""
    return int(math.ceil(layer_dofs / p))


def absorbing_layer(mesh: StructuredMesh, k: float, layer_sides: Iterable[Union[Side, str]],
                    layer_width: float) -> CoefficientField:
    """Constant k with an eps ramp inside layers along the given sides; depth is the max over sides."""
    sides = [Side(s) for s in layer_sides]
    ratio = layer_width / mesh.h
    if layer_width <= 0 or abs(ratio - round(ratio)) > 1e-9:
        raise MeshError(f"layer width {layer_width} must be a positive multiple of h={mesh.h}")
    x_min, x_max, y_min, y_max = mesh.extent
    centers = mesh.cell_centers()
    depth = np.zeros(mesh.n_cells)
    for side in sides:
        span = x_max - x_min if side in (Side.LEFT, Side.RIGHT) else y_max - y_min
        if layer_width > span + 1e-12:
            raise MeshError(f"layer width {layer_width} exceeds domain size {span} on side {side.value}")
        if side == Side.LEFT:
            d = x_min + layer_width - centers[:, 0]
        elif side == Side.RIGHT:
            d = centers[:, 0] - (x_max - layer_width)
        elif side == Side.BOTTOM:
            d = y_min + layer_width - centers[:, 1]
        else:
            d = centers[:, 1] - (y_max - layer_width)
        depth = np.maximum(depth, d)
    eps = np.where(depth > 0, layer_profile(depth, layer_width, k), 0.0)
    return CoefficientField(np.full(mesh.n_cells, float(k)), eps)
