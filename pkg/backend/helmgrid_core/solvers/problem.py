"""
Benchmark problems on the unit square: k = 2 pi L for L wavelengths, h from
the requested dofs per wavelength, a named boundary set and a point load at
the centre.
"""

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from ..discretization.fespace import FeSpace, build_space
from ..discretization.mesh import (BoundaryTag, CoefficientField, ElementKind, Side, absorbing_layer,
                                   build_rectangle_mesh, cells_for_layer_dofs, tag_boundary)
from ..errors import ConfigError
from ..logs.core.logger_config import get_component_logger

logger = get_component_logger(__name__)

ABS, DIR, NEU = BoundaryTag.ABSORBING, BoundaryTag.DIRICHLET, BoundaryTag.NEUMANN

BOUNDARY_SETS: Dict[str, Dict[Side, BoundaryTag]] = {
    "absorbing": {Side.LEFT: ABS, Side.RIGHT: ABS, Side.BOTTOM: ABS, Side.TOP: ABS},
    "dirichlet2": {Side.LEFT: DIR, Side.BOTTOM: DIR, Side.RIGHT: ABS, Side.TOP: ABS},
    "neumann2": {Side.LEFT: NEU, Side.BOTTOM: NEU, Side.RIGHT: ABS, Side.TOP: ABS},
    "layers": {Side.LEFT: NEU, Side.RIGHT: NEU, Side.BOTTOM: NEU, Side.TOP: NEU},
}
LAYER_SETS = {"layers"}
DEFAULT_LAYER_DOFS = 40


@dataclass
class HelmholtzProblem:
    space: FeSpace
    coeffs: CoefficientField
    rhs: np.ndarray
    k: float
    order: int
    ppw: float
    wavelengths: float
    boundary: str

    @property
    def n_dofs(self) -> int:
        return self.space.n_dofs


def cells_per_side(wavelengths: float, ppw: float, order: int) -> int:
    """Cells along the unit side so that 2 pi p / (k h) is as close to ppw as possible."""
    return max(1, int(round(wavelengths * ppw / order)))


def point_load(space: FeSpace, point: Sequence[float]) -> np.ndarray:
    f = np.zeros(space.n_dofs, dtype=complex)
    f[space.nearest_vertex_dof(point)] = 1.0
    if space.dirichlet_dofs.size:
        f[space.dirichlet_dofs] = 0.0
    return f


def build_problem(order: int, ppw: float, wavelengths: float, boundary: str = "absorbing",
                  element_kind: ElementKind = ElementKind.SQUARE, layer_dofs: int = DEFAULT_LAYER_DOFS,
                  source: Tuple[float, float] = (0.5, 0.5),
                  boundary_sets: Optional[Dict[str, Dict]] = None) -> HelmholtzProblem:
    """Discretize -Delta u - k^2 u = delta_source on [0,1]^2 with the named boundary set."""
    sets = BOUNDARY_SETS if boundary_sets is None else boundary_sets
    if boundary not in sets:
        raise ConfigError(f"unknown boundary set '{boundary}'", [f"choose one of {sorted(sets)}"])
    if wavelengths <= 0 or ppw <= 0:
        raise ConfigError("wavelengths and ppw must be positive")
    k = 2.0 * math.pi * wavelengths
    n = cells_per_side(wavelengths, ppw, order)
    h = 1.0 / n
    if boundary in LAYER_SETS:
        pad = cells_for_layer_dofs(layer_dofs, order)
        mesh = build_rectangle_mesh(n + 2 * pad, n + 2 * pad, h, ElementKind(element_kind), origin=(-pad * h, -pad * h))
        mesh = tag_boundary(mesh, sets[boundary])
        coeffs = absorbing_layer(mesh, k, list(Side), pad * h)
    else:
        mesh = tag_boundary(build_rectangle_mesh(n, n, h, ElementKind(element_kind)), sets[boundary])
        coeffs = CoefficientField.constant(mesh, k)
    space = build_space(mesh, order)
    problem = HelmholtzProblem(space=space, coeffs=coeffs, rhs=point_load(space, source), k=k, order=order,
                               ppw=2.0 * math.pi * order / (k * h), wavelengths=wavelengths, boundary=boundary)
    logger.info("Problem: p=%d, %.4g wavelengths, %d cells/side, ppw=%.3f, boundary=%s, %d dofs", order,
                wavelengths, n, problem.ppw, boundary, space.n_dofs)
    return problem
