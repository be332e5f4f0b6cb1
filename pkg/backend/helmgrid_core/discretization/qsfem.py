"""
QSFEM: the optimized 9-point stencil

    P = [[P2, P1, P2], [P1, P0, P1], [P2, P1, P2]],   P0 = 4,

whose symbol vanishes exactly on the wave vectors k (cos t, sin t) for
t = pi/16 and 3 pi/16, scaled by N(eta) = -eta^2 / sigma_P(0) so that the
scaled symbol equals -k^2 at the origin; plus its quasi-finite-element
assembly on a square coarse mesh with cell-wise coefficients.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import brentq, minimize_scalar

from ..errors import StencilError
from ..logs.core.logger_config import get_component_logger
from .fespace import (FeSpace, assemble_mass_weighted, boundary_mass, eliminate_dirichlet)
from .mesh import CoefficientField, ElementKind

logger = get_component_logger(__name__)

P0 = 4.0
DENOMINATOR_TOL = 1e-14
ZERO_SET_DIRECTIONS = 720
RADIAL_SAMPLES = 256


@dataclass(frozen=True)
class QsfemStencil:
    eta: float
    p0: float
    p1: float
    p2: float
    scaling: float

    @property
    def weights(self) -> dict:
        """Per-cell q-weights keyed by the vertex offset; summing over incident cells gives N*P."""
        n = self.scaling
        q = {(0, 0): n * self.p0 / 4.0}
        for off in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            q[off] = n * self.p1 / 2.0
        for off in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            q[off] = n * self.p2
        return q

    def matrix(self) -> np.ndarray:
        """The scaled 3x3 stencil N*P."""
        return self.scaling * np.array([[self.p2, self.p1, self.p2],
                                        [self.p1, self.p0, self.p1],
                                        [self.p2, self.p1, self.p2]])


def stencil_coefficients(eta: float) -> Tuple[float, float, float]:
    """(P0, P1, P2) at eta = k h_c, valid for 0 < eta < pi."""
    if not 0.0 < eta < math.pi:
        raise StencilError(f"eta = k*h_c must lie in (0, pi), got {eta}")
    c1 = math.cos(eta * math.cos(math.pi / 16))
    s1 = math.cos(eta * math.sin(math.pi / 16))
    c2 = math.cos(eta * math.cos(3 * math.pi / 16))
    s2 = math.cos(eta * math.sin(3 * math.pi / 16))
    den = c2 * s2 * (c1 + s1) - c1 * s1 * (c2 + s2)
    if abs(den) < DENOMINATOR_TOL:
        raise StencilError(f"degenerate QSFEM stencil at eta={eta} (denominator {den:.3e})")
    p1 = 2.0 * (c1 * s1 - c2 * s2) / den
    p2 = (c2 + s2 - c1 - s1) / den
    return P0, p1, p2


def unscaled_symbol(theta1, theta2, p1: float, p2: float):
    """sigma_P at normalized wave numbers theta = h xi."""
    c1 = np.cos(theta1)
    c2 = np.cos(theta2)
    return P0 + 2.0 * p1 * (c1 + c2) + 4.0 * p2 * c1 * c2


def build_stencil(eta: float) -> QsfemStencil:
    p0, p1, p2 = stencil_coefficients(eta)
    sigma0 = unscaled_symbol(0.0, 0.0, p1, p2)
    if abs(sigma0) < DENOMINATOR_TOL:
        raise StencilError(f"QSFEM symbol vanishes at the origin for eta={eta}")
    return QsfemStencil(eta=eta, p0=p0, p1=p1, p2=p2, scaling=-eta ** 2 / sigma0)


def scaled_symbol(xi, k: float, h_c: float):
    """h_c^-2 N(eta) sigma_P(h_c xi); ``xi`` has a trailing axis of length 2."""
    stencil = build_stencil(k * h_c)
    xi = np.asarray(xi, dtype=float)
    sigma = unscaled_symbol(h_c * xi[..., 0], h_c * xi[..., 1], stencil.p1, stencil.p2)
    return (stencil.scaling / h_c ** 2) * sigma + 0j


def radial_zero(stencil: QsfemStencil, t: float, h_c: float) -> float:
    """Radius r in (0, pi/h_c) with sigma_P(h_c r (cos t, sin t)) = 0 closest to the scheme's k."""
    def f(r):
        return unscaled_symbol(h_c * r * math.cos(t), h_c * r * math.sin(t), stencil.p1, stencil.p2)

    r_max = math.pi / h_c
    radii = np.linspace(r_max / RADIAL_SAMPLES, r_max, RADIAL_SAMPLES)
    values = f(radii)
    crossings = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) <= 0)
    if len(crossings) == 0:
        raise StencilError(f"no propagating QSFEM mode in direction t={t:.6f} (eta={stencil.eta})")
    k = stencil.eta / h_c
    roots = [brentq(f, radii[c], radii[c + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps) for c in crossings]
    return min(roots, key=lambda r: abs(r - k))


def zero_set_distance(k: float, h_c: float, n_directions: int = ZERO_SET_DIRECTIONS) -> float:
    """
    max over t of |r(t) - k|, r(t) the radial zero of the symbol in direction t.

    Directions are sampled uniformly on [-pi, pi) and the worst one is refined
    with a bounded scalar search between its grid neighbours.
    """
    stencil = build_stencil(k * h_c)
    ts = -math.pi + 2.0 * math.pi * np.arange(n_directions) / n_directions
    errors = np.array([abs(radial_zero(stencil, t, h_c) - k) for t in ts])
    worst = int(np.argmax(errors))
    step = 2.0 * math.pi / n_directions
    refined = minimize_scalar(lambda t: -abs(radial_zero(stencil, t, h_c) - k),
                              bounds=(ts[worst] - step, ts[worst] + step), method="bounded",
                              options={"xatol": 1e-12})
    distance = max(errors[worst], -refined.fun)
    logger.debug("QSFEM zero-set distance at eta=%.6f: %.6e (relative %.3e)", stencil.eta, distance, distance / k)
    return float(distance)


def assemble_qsfem(coarse_space: FeSpace, coeffs: CoefficientField) -> sp.csr_matrix:
    """
    Quasi-FE QSFEM matrix on a square mesh:

        (A_q)_{a,b} = sum over cells c touching a and b of q_{b-a}(h_c k(c))
                      - i eps(c) (p=1 mass) - <i k phi_a, phi_b>_{Gamma_abs},

    Dirichlet rows and columns eliminated.
    """
    mesh = coarse_space.mesh
    if coarse_space.p != 1 or mesh.element_kind != ElementKind.SQUARE:
        raise StencilError("QSFEM assembly needs the p=1 space of a square mesh")
    group = coarse_space.groups[0]
    # local vertex order of the square element: (0,0), (1,0), (1,1), (0,1)
    offsets = np.array([key[:2] for key in group.reference.keys])
    blocks = np.empty((mesh.n_cells, 4, 4))
    etas = mesh.h * coeffs.k
    stencil_cache = {}
    for c, eta in enumerate(etas):
        if eta not in stencil_cache:
            weights = build_stencil(float(eta)).weights
            stencil_cache[eta] = np.array([[weights[tuple(offsets[b] - offsets[a])] for b in range(4)]
                                           for a in range(4)])
        blocks[c] = stencil_cache[eta]
    dofs = group.dofs
    q_matrix = sp.coo_matrix((blocks.ravel(), (np.repeat(dofs, 4, axis=1).ravel(), np.tile(dofs, (1, 4)).ravel())),
                             shape=(coarse_space.n_dofs,) * 2).tocsr()
    matrix = (q_matrix - assemble_mass_weighted(coarse_space, 1j * coeffs.eps)
              - boundary_mass(coarse_space, coeffs)).tocsr()
    matrix.eliminate_zeros()
    logger.debug("Assembled QSFEM matrix: %d dofs, %d distinct stencils", coarse_space.n_dofs, len(stencil_cache))
    return eliminate_dirichlet(matrix, coarse_space.dirichlet_dofs)
