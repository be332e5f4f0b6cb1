"""
Discrete dispersion relations of the order-p FE and QSFEM discretizations.

Propagating modes are found on rays from the origin through the true circle
|xi| = k: along each ray the count of negative eigenvalues of the (Hermitian,
eps = 0) FE symbol changes where an eigenvalue crosses zero, and that
eigenvalue is bracketed and solved for. When hk > pi the folded circle
intersects itself on the torus and the neighbourhoods of those points are
additionally sampled on a local grid. Each zero theta* is then mapped to the
wave vector xi = (theta* + 2 pi alpha) / h that is closest to the circle.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import brentq, minimize_scalar

from ..discretization.mesh import ElementKind
from ..discretization.qsfem import build_stencil, radial_zero
from ..errors import SymbolError
from ..logs.core.logger_config import get_component_logger
from .lfa2d import BlockToeplitzView, build_patch, helmholtz_view

logger = get_component_logger(__name__)

DIRECTIONS = 361
RAY_SPAN = 0.3
RAY_SAMPLES = 64
NON_PROPAGATING_ERROR = RAY_SPAN
FOLD_RADIUS = 0.2
FOLD_SAMPLES = 21


class DispersionQuery(BaseModel):
    """A discretization at a resolution; lengths are in units of the mesh (or coarse) spacing."""

    model_config = ConfigDict(extra="forbid")

    scheme: str = Field("fe", pattern="^(fe|qsfem)$")
    order: int = Field(2, ge=1, le=8)
    element_kind: ElementKind = ElementKind.SQUARE
    ppw: float = Field(8.0, gt=2.0, description="dofs per wavelength")

    @property
    def h(self) -> float:
        return 1.0

    @property
    def k(self) -> float:
        """Wavenumber on the unit lattice: ppw = 2 pi p / (k h) for FE, 2 pi / (k h_c) for QSFEM."""
        return 2.0 * math.pi * (self.order if self.scheme == "fe" else 1) / self.ppw

    @property
    def label(self) -> str:
        return "opt" if self.scheme == "qsfem" else f"gal-{self.order}"


@dataclass(frozen=True)
class PropagatingMode:
    theta: Tuple[float, float]
    xi: Tuple[float, float]
    alpha: Tuple[int, int]
    error: float
    direction: Optional[float] = None

    @property
    def wavenumber(self) -> float:
        return math.hypot(*self.xi)


def smallest_eigenvalue(matrix: np.ndarray) -> complex:
    """Eigenvalue of smallest modulus (scalars are returned as they are)."""
    matrix = np.atleast_2d(np.asarray(matrix))
    values = np.linalg.eigvals(matrix)
    return complex(values[np.argmin(np.abs(values))])


@lru_cache(maxsize=32)
def _fe_view(order: int, kind: ElementKind, k: float) -> BlockToeplitzView:
    return helmholtz_view(build_patch(order, kind), k)


def _eigenvalues(view: BlockToeplitzView, theta: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of the Hermitian symbol, stacked over theta."""
    return np.linalg.eigvalsh(view.symbol(theta))


def identify_wave_vector(theta, query: DispersionQuery):
    """(xi, alpha, error): the representative of theta + 2 pi Z^2 nearest to |xi| = k inside [-p pi/h, p pi/h]^2."""
    h, k, p = query.h, query.k, query.order
    wrapped = np.mod(np.asarray(theta, dtype=float) + math.pi, 2.0 * math.pi) - math.pi
    reach = p // 2 + 1
    limit = p * math.pi / h + 1e-12
    best = None
    for a1 in range(-reach, reach + 1):
        for a2 in range(-reach, reach + 1):
            xi = (wrapped + 2.0 * math.pi * np.array([a1, a2])) / h
            if np.max(np.abs(xi)) > limit:
                continue
            error = abs(math.hypot(*xi) / k - 1.0)
            if best is None or error < best[2]:
                best = ((float(xi[0]), float(xi[1])), (a1, a2), error)
    if best is None:
        raise SymbolError(f"no admissible wave vector for theta={tuple(wrapped)}")
    return best


def _mode(theta, query: DispersionQuery, direction: Optional[float] = None) -> PropagatingMode:
    xi, alpha, error = identify_wave_vector(theta, query)
    return PropagatingMode(theta=(float(theta[0]), float(theta[1])), xi=xi, alpha=alpha, error=error,
                           direction=direction)


def _crossings(counts: np.ndarray) -> np.ndarray:
    return np.flatnonzero(counts[:-1] != counts[1:])


def _solve_segment(view: BlockToeplitzView, start: np.ndarray, stop: np.ndarray, n_a: int, n_b: int) -> np.ndarray:
    """theta on [start, stop] where the eigenvalue with index min(n_a, n_b) vanishes."""
    index = min(n_a, n_b)
    step = stop - start

    def g(s):
        return float(_eigenvalues(view, (start + s * step)[None])[0, index])

    s = brentq(g, 0.0, 1.0, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    return start + s * step


def _ray_modes(view: BlockToeplitzView, query: DispersionQuery, t: float) -> List[PropagatingMode]:
    k, h = query.k, query.h
    direction = np.array([math.cos(t), math.sin(t)])
    radii = np.linspace((1.0 - RAY_SPAN) * k, (1.0 + RAY_SPAN) * k, RAY_SAMPLES)
    points = h * radii[:, None] * direction
    counts = np.sum(_eigenvalues(view, points) < 0, axis=-1)
    modes = []
    for c in _crossings(counts):
        theta = _solve_segment(view, points[c], points[c + 1], counts[c], counts[c + 1])
        modes.append(_mode(theta, query, t))
    return modes


def fold_intersections(query: DispersionQuery) -> np.ndarray:
    """Points of the torus where two branches of the folded true circle h|xi| = hk cross."""
    k, h = query.k, query.h
    if h * k <= math.pi:
        return np.zeros((0, 2))
    reach = int(math.ceil(h * k / math.pi))
    points = []
    for a1 in range(-reach, reach + 1):
        for a2 in range(-reach, reach + 1):
            v = 2.0 * math.pi * np.array([a1, a2]) / h
            half = 0.5 * np.linalg.norm(v)
            if half == 0.0 or half > k:
                continue
            normal = np.array([-v[1], v[0]]) / (2.0 * half)
            s = math.sqrt(k * k - half * half)
            for sign in (-1.0, 1.0):
                theta = h * (0.5 * v + sign * s * normal)
                points.append(np.mod(theta + math.pi, 2.0 * math.pi) - math.pi)
    if not points:
        return np.zeros((0, 2))
    return np.unique(np.round(np.array(points), 12), axis=0)


def _fold_modes(view: BlockToeplitzView, query: DispersionQuery) -> List[PropagatingMode]:
    modes = []
    offsets = np.linspace(-FOLD_RADIUS, FOLD_RADIUS, FOLD_SAMPLES)
    for centre in fold_intersections(query):
        for dy in offsets:
            line = np.column_stack([centre[0] + offsets, np.full(FOLD_SAMPLES, centre[1] + dy)])
            counts = np.sum(_eigenvalues(view, line) < 0, axis=-1)
            for c in _crossings(counts):
                theta = _solve_segment(view, line[c], line[c + 1], counts[c], counts[c + 1])
                modes.append(_mode(theta, query))
    return modes


def _directions(query: DispersionQuery, n_directions: int) -> np.ndarray:
    # the triangle split is symmetric under x <-> y but not x -> -x
    span = 0.5 * math.pi if query.element_kind == ElementKind.SQUARE or query.scheme == "qsfem" else math.pi
    return span * np.arange(n_directions) / (n_directions - 1)


def _qsfem_ratio(query: DispersionQuery, t: float, stencil) -> float:
    return radial_zero(stencil, t, query.h) / query.k


def find_zero_curve(query: DispersionQuery, n_directions: int = DIRECTIONS) -> Tuple[List[PropagatingMode], int]:
    """(modes, number of directions without a propagating mode)."""
    modes: List[PropagatingMode] = []
    missing = 0
    if query.scheme == "qsfem":
        stencil = build_stencil(query.k * query.h)
        for t in _directions(query, n_directions):
            r = radial_zero(stencil, t, query.h)
            xi = (r * math.cos(t), r * math.sin(t))
            modes.append(PropagatingMode(theta=(query.h * xi[0], query.h * xi[1]), xi=xi, alpha=(0, 0),
                                         error=abs(r / query.k - 1.0), direction=float(t)))
        return modes, 0
    view = _fe_view(query.order, ElementKind(query.element_kind), query.k)
    for t in _directions(query, n_directions):
        found = _ray_modes(view, query, float(t))
        if not found:
            missing += 1
        modes.extend(found)
    modes.extend(_fold_modes(view, query))
    if missing:
        logger.warning("%s at ppw=%g: %d directions without a propagating mode", query.label, query.ppw, missing)
    return modes, missing


def max_dispersion_error(query: DispersionQuery, n_directions: int = DIRECTIONS) -> float:
    """max over propagating modes of | |xi*| / k - 1 |; a direction without a mode counts as RAY_SPAN."""
    if query.scheme == "qsfem":
        return _qsfem_max_error(query, n_directions)
    modes, missing = find_zero_curve(query, n_directions)
    errors = [m.error for m in modes] + [NON_PROPAGATING_ERROR] * missing
    value = max(errors) if errors else NON_PROPAGATING_ERROR
    logger.debug("%s ppw=%g: max dispersion error %.6e over %d modes", query.label, query.ppw, value, len(modes))
    return float(value)


def _qsfem_max_error(query: DispersionQuery, n_directions: int) -> float:
    stencil = build_stencil(query.k * query.h)
    ts = _directions(query, n_directions)
    errors = np.array([abs(_qsfem_ratio(query, t, stencil) - 1.0) for t in ts])
    worst = int(np.argmax(errors))
    step = ts[1] - ts[0]
    refined = minimize_scalar(lambda t: -abs(_qsfem_ratio(query, t, stencil) - 1.0),
                              bounds=(ts[worst] - step, ts[worst] + step), method="bounded",
                              options={"xatol": 1e-12})
    return float(max(errors[worst], -refined.fun))


def radial_ratios(query: DispersionQuery, n_directions: int = DIRECTIONS) -> np.ndarray:
    """|xi*| / k per direction for the mode nearest the circle; NaN without a mode."""
    ts = _directions(query, n_directions)
    if query.scheme == "qsfem":
        stencil = build_stencil(query.k * query.h)
        return np.array([_qsfem_ratio(query, t, stencil) for t in ts])
    view = _fe_view(query.order, ElementKind(query.element_kind), query.k)
    ratios = np.full(len(ts), np.nan)
    for n, t in enumerate(ts):
        found = _ray_modes(view, query, float(t))
        if found:
            best = min(found, key=lambda m: m.error)
            ratios[n] = best.wavenumber / query.k
    return ratios


def delta_and_R(fine: DispersionQuery, coarse: DispersionQuery, damping: float,
                n_directions: int = DIRECTIONS) -> Tuple[np.ndarray, float]:
    """delta(t) = (r_c(t) - r_f(t)) / k and R = 2 pi max|delta| / D."""
    if damping <= 0:
        raise SymbolError(f"damping D must be positive, got {damping}")
    delta = radial_ratios(coarse, n_directions) - radial_ratios(fine, n_directions)
    if np.all(np.isnan(delta)):
        raise SymbolError("no direction has propagating modes on both levels")
    R = 2.0 * math.pi * float(np.nanmax(np.abs(delta))) / damping
    return delta, R


def coarse_query(fine: DispersionQuery, coarsening: str) -> DispersionQuery:
    """Dispersion query of the coarse level: both coarsenings halve the dofs per wavelength."""
    if fine.scheme != "fe" or fine.order % 2:
        raise SymbolError("coarse levels exist for even-order FE discretizations")
    if coarsening == "optimized_fd":
        return DispersionQuery(scheme="qsfem", order=1, ppw=fine.ppw / 2.0)
    return fine.model_copy(update={"order": fine.order // 2, "ppw": fine.ppw / 2.0})


def dispersion_table(orders, ppw_list, element_kind: ElementKind = ElementKind.SQUARE,
                     include_qsfem: bool = True, n_directions: int = DIRECTIONS) -> List[dict]:
    """Rows (scheme, ppw, max_dispersion_error) for every scheme and resolution."""
    rows = []
    ppw_list = list(ppw_list)
    schemes = [DispersionQuery(scheme="qsfem", order=1)] if include_qsfem else []
    schemes += [DispersionQuery(scheme="fe", order=int(p), element_kind=element_kind) for p in orders]
    for base in schemes:
        for ppw in ppw_list:
            query = base.model_copy(update={"ppw": float(ppw)})
            rows.append({"scheme": query.label, "ppw": float(ppw),
                         "max_dispersion_error": max_dispersion_error(query, n_directions)})
    logger.info("Dispersion table: %d schemes x %d resolutions", len(schemes), len(ppw_list))
    return rows
