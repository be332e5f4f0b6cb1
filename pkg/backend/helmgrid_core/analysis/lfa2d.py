"""
Bloch-wave Fourier analysis of the 2-D finite-element two-grid method.

Operators are assembled on a small all-Neumann patch of unit cells (h = 1)
and read back as block-Toeplitz rows around an interior anchor. A block
P_{0,beta} couples the dofs owned by the anchor's unit cell with those of the
unit cell shifted by beta, and the symbol is

    sigma(P)(theta) = sum over beta of exp(i theta . beta) P_{0,beta}.

Fine unit cell: the slots a lattice point owns (p^2 dofs). Coarse unit cell:
for the optimized FD coarsening the (p/2)^2 coarse vertices of one h-cell,
for p-coarsening the slots of the order p/2 space.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, Field

from ..coarsening import create_coarsening
from ..discretization.fespace import FeSpace, assemble_helmholtz, build_space
from ..discretization.mesh import BoundaryTag, CoefficientField, ElementKind, Side, build_rectangle_mesh, tag_boundary
from ..errors import SymbolError
from ..linalg import spectral_radius
from ..logs.core.logger_config import get_component_logger
from ..solvers.solver_config import Coarsening, SolverConfig

logger = get_component_logger(__name__)

PATCH_CELLS = 7
ANCHOR = (3, 3)
CHECK_ANCHORS = ((4, 3), (3, 4))
WINDOW = 1
GRID_POINTS = 64
ANNULUS_RADII = 8
ANNULUS_ANGLES = 64
ANNULUS_SPAN = (0.8, 1.2)
CHUNK = 256
COND_LIMIT = 1e12
THETA_PERTURBATION = 1e-6
TRANSLATION_TOL = 1e-12


class LfaConfig(BaseModel):
    """One point of the two-grid analysis: discretization, damping and cycle parameters."""

    model_config = ConfigDict(extra="forbid")

    order: int = Field(4, ge=1, le=8)
    ppw: float = Field(10.0, gt=0.0, description="fine dofs per wavelength, 2 pi p / (k h)")
    element_kind: ElementKind = ElementKind.SQUARE
    damping: float = Field(0.01, ge=0.0, description="D, eps = k^2 D / pi")
    coarsening: Coarsening = Coarsening.OPTIMIZED_FD
    alpha_s: float = Field(0.2, ge=0.0)
    alpha_c: float = Field(0.0, ge=0.0)
    n_s: int = Field(1, ge=0)
    omega_c: float = Field(1.0, ge=0.0, le=1.0)

    @property
    def k(self) -> float:
        """Wavenumber on the h = 1 lattice."""
        return 2.0 * math.pi * self.order / self.ppw

    @property
    def eps(self) -> float:
        return self.k ** 2 * self.damping / math.pi


@dataclass(frozen=True)
class UnitCell:
    """Dofs owned by one lattice point; ``stride`` > 1 groups stride^2 coarse vertices per h-cell."""
    space: FeSpace
    stride: int = 1

    @property
    def size(self) -> int:
        return self.space.n_slots if self.stride == 1 else self.stride ** 2

    def dofs(self, i: int, j: int) -> np.ndarray:
        lo = self.space.mesh.lattice_min
        if self.stride == 1:
            dofs = self.space.unit_dofs[j - lo[1], i - lo[0], :]
        else:
            m = self.stride
            b, a = np.divmod(np.arange(m * m), m)
            dofs = self.space.unit_dofs[m * j + b - lo[1], m * i + a - lo[0], 0]
        if np.any(dofs < 0):
            raise SymbolError(f"unit cell at ({i}, {j}) is incomplete; anchor too close to the patch rim")
        return dofs


@dataclass
class BlockToeplitzView:
    """Blocks P_{0,beta} for |beta|_inf <= window, stored as blocks[beta_y + w, beta_x + w]."""
    blocks: np.ndarray
    window: int = WINDOW

    @property
    def shape(self) -> Tuple[int, int]:
        return self.blocks.shape[-2:]

    def symbol(self, theta) -> np.ndarray:
        return symbol(self, theta)

    def adjoint(self) -> "BlockToeplitzView":
        """Blocks of P^H: (P^H)_{0,beta} = (P_{0,-beta})^H."""
        flipped = self.blocks[::-1, ::-1]
        return BlockToeplitzView(np.conj(np.swapaxes(flipped, -1, -2)), self.window)


def _read_blocks(matrix: sp.csr_matrix, rows: UnitCell, cols: UnitCell, anchor, window: int) -> np.ndarray:
    i0, j0 = anchor
    row_dofs = rows.dofs(i0, j0)
    offsets = range(-window, window + 1)
    col_dofs = [[cols.dofs(i0 + bx, j0 + by) for bx in offsets] for by in offsets]
    sub = matrix[row_dofs]
    blocks = np.array([[sub[:, c].toarray() for c in line] for line in col_dofs], dtype=complex)
    inside = np.concatenate([c for line in col_dofs for c in line])
    if np.any(~np.isin(sub.indices, inside) & (sub.data != 0)):
        raise SymbolError(f"operator couples beyond a block window of {window}")
    return blocks


def extract_blocks(matrix: sp.spmatrix, rows: UnitCell, cols: UnitCell, window: int = WINDOW,
                   anchor: Tuple[int, int] = ANCHOR,
                   check_anchors: Sequence[Tuple[int, int]] = CHECK_ANCHORS) -> BlockToeplitzView:
    """Block-Toeplitz row of ``matrix`` at ``anchor``, verified against translated anchors."""
    matrix = sp.csr_matrix(matrix)
    blocks = _read_blocks(matrix, rows, cols, anchor, window)
    scale = max(np.max(np.abs(blocks)), 1.0)
    for other in check_anchors:
        shifted = _read_blocks(matrix, rows, cols, other, window)
        if np.max(np.abs(shifted - blocks)) > TRANSLATION_TOL * scale:
            raise SymbolError(f"operator is not translation invariant between anchors {anchor} and {other}")
    return BlockToeplitzView(blocks, window)


def symbol(view: BlockToeplitzView, theta) -> np.ndarray:
    """sigma(P)(theta) for theta of shape (..., 2); result (..., rows, cols)."""
    theta = np.asarray(theta, dtype=float)
    offsets = np.arange(-view.window, view.window + 1)
    phase_x = np.exp(1j * theta[..., 0, None] * offsets)
    phase_y = np.exp(1j * theta[..., 1, None] * offsets)
    return np.einsum("...b,...a,baij->...ij", phase_y, phase_x, view.blocks)


def inverse_symbol(matrix: np.ndarray, cond_limit: float = COND_LIMIT) -> np.ndarray:
    """Inverse of a (stack of) symbol matrices; refuses near-singular ones."""
    matrix = np.asarray(matrix, dtype=complex)
    cond = np.linalg.cond(matrix)
    if np.any(~np.isfinite(cond) | (cond > cond_limit)):
        raise SymbolError(f"symbol is near-singular (condition number {np.max(cond):.3e})")
    return np.linalg.inv(matrix)


def bloch_vector(cell: UnitCell, theta, local: np.ndarray, shape: Tuple[int, int]) -> np.ndarray:
    """Global coefficients exp(i theta . (i, j)) * local on every complete unit cell of the patch."""
    u = np.zeros(cell.space.n_dofs, dtype=complex)
    nx, ny = shape
    for j in range(ny):
        for i in range(nx):
            try:
                dofs = cell.dofs(i, j)
            except SymbolError:
                continue
            u[dofs] = np.exp(1j * (theta[0] * i + theta[1] * j)) * local
    return u


# ----------------------------------------------------------------------------
# Two-grid symbols
# ----------------------------------------------------------------------------

@dataclass
class LfaOperators:
    config: LfaConfig
    fine: BlockToeplitzView
    shifted: BlockToeplitzView
    coarse: Optional[BlockToeplitzView] = None
    prolongation: Optional[BlockToeplitzView] = None


@dataclass
class RateResult:
    rho: float
    theta_max: Tuple[float, float]
    table: np.ndarray
    skipped: List[Tuple[float, float]] = field(default_factory=list)
    perturbed: int = 0


def build_patch(order: int, element_kind: ElementKind = ElementKind.SQUARE) -> FeSpace:
    mesh = build_rectangle_mesh(PATCH_CELLS, PATCH_CELLS, 1.0, element_kind)
    mesh = tag_boundary(mesh, {side: BoundaryTag.NEUMANN for side in Side})
    return FeSpace(mesh, order)


def helmholtz_view(space: FeSpace, k: float, eps: float = 0.0, shift: float = 0.0) -> BlockToeplitzView:
    """Symbol blocks of the Helmholtz matrix with constant coefficients on a patch."""
    coeffs = CoefficientField.constant(space.mesh, k, eps)
    cell = UnitCell(space)
    return extract_blocks(assemble_helmholtz(space, coeffs, shift), cell, cell)


def build_lfa_operators(config: LfaConfig) -> LfaOperators:
    space = build_patch(config.order, config.element_kind)
    coeffs = CoefficientField.constant(space.mesh, config.k, config.eps)
    fine_cell = UnitCell(space)
    ops = LfaOperators(config=config,
                       fine=extract_blocks(assemble_helmholtz(space, coeffs), fine_cell, fine_cell),
                       shifted=extract_blocks(assemble_helmholtz(space, coeffs, config.alpha_s), fine_cell, fine_cell))
    solver_config = SolverConfig(alpha_s=config.alpha_s, alpha_c=config.alpha_c, coarsening=config.coarsening)
    coarsening = create_coarsening(config.coarsening, solver_config)
    if coarsening is not None:
        level = coarsening.build(space, coeffs, factor=False)
        stride = config.order // 2 if config.coarsening == Coarsening.OPTIMIZED_FD else 1
        coarse_cell = UnitCell(level.space, stride)
        ops.coarse = extract_blocks(level.operator, coarse_cell, coarse_cell)
        ops.prolongation = extract_blocks(level.prolongation, fine_cell, coarse_cell)
    logger.debug("LFA operators p=%d ppw=%g %s: fine block %s", config.order, config.ppw,
                 config.coarsening.value, ops.fine.shape)
    return ops


def _matrix_power(matrix: np.ndarray, n: int) -> np.ndarray:
    return np.linalg.matrix_power(matrix, n) if n > 0 else np.broadcast_to(np.eye(matrix.shape[-1]), matrix.shape)


def two_grid_symbol(ops: LfaOperators, theta, n_s: Optional[int] = None,
                    omega_c: Optional[float] = None) -> np.ndarray:
    """M(theta) = S^n_s K S^n_s with S = I - A_s^-1 A and K = I - omega I_P A_c^-1 I_P^H A."""
    n_s = ops.config.n_s if n_s is None else n_s
    omega_c = ops.config.omega_c if omega_c is None else omega_c
    a = ops.fine.symbol(theta)
    identity = np.eye(a.shape[-1])
    smoother = identity - inverse_symbol(ops.shifted.symbol(theta)) @ a
    if ops.coarse is None:
        correction = identity
    else:
        prolong = ops.prolongation.symbol(theta)
        restrict = np.conj(np.swapaxes(prolong, -1, -2))
        correction = identity - omega_c * prolong @ inverse_symbol(ops.coarse.symbol(theta)) @ restrict @ a
    s_power = _matrix_power(smoother, n_s)
    return s_power @ correction @ s_power


def theta_grid(k: float, n_grid: int = GRID_POINTS) -> np.ndarray:
    """Uniform n_grid^2 grid on [-pi, pi)^2 plus an annulus around |theta| = k h, wrapped to the torus."""
    axis = -math.pi + 2.0 * math.pi * np.arange(n_grid) / n_grid
    t1, t2 = np.meshgrid(axis, axis, indexing="ij")
    grid = np.column_stack([t1.ravel(), t2.ravel()])
    radii = np.linspace(ANNULUS_SPAN[0], ANNULUS_SPAN[1], ANNULUS_RADII) * k
    angles = 2.0 * math.pi * np.arange(ANNULUS_ANGLES) / ANNULUS_ANGLES
    r, phi = np.meshgrid(radii, angles, indexing="ij")
    ring = np.column_stack([(r * np.cos(phi)).ravel(), (r * np.sin(phi)).ravel()])
    ring = np.mod(ring + math.pi, 2.0 * math.pi) - math.pi
    return np.vstack([grid, ring])


def _well_conditioned(ops: LfaOperators, theta: np.ndarray) -> np.ndarray:
    ok = np.linalg.cond(ops.shifted.symbol(theta)) <= COND_LIMIT
    if ops.coarse is not None:
        ok &= np.linalg.cond(ops.coarse.symbol(theta)) <= COND_LIMIT
    return ok


def two_grid_rate(ops: LfaOperators, theta: Optional[np.ndarray] = None, n_s: Optional[int] = None,
                  omega_c: Optional[float] = None) -> RateResult:
    """rho = max over sampled theta of the spectral radius of M(theta)."""
    theta = theta_grid(ops.config.k) if theta is None else np.asarray(theta, dtype=float)
    theta = theta.copy()
    skipped: List[Tuple[float, float]] = []
    perturbed = 0
    rho = np.full(len(theta), np.nan)
    for start in range(0, len(theta), CHUNK):
        chunk = theta[start:start + CHUNK]
        ok = _well_conditioned(ops, chunk)
        if not np.all(ok):
            bad = np.flatnonzero(~ok)
            chunk[bad] += THETA_PERTURBATION
            perturbed += len(bad)
            ok = _well_conditioned(ops, chunk)
            for b in np.flatnonzero(~ok):
                skipped.append((float(chunk[b, 0]), float(chunk[b, 1])))
        theta[start:start + CHUNK] = chunk
        good = np.flatnonzero(ok)
        if len(good):
            rho[start + good] = spectral_radius(two_grid_symbol(ops, chunk[good], n_s, omega_c))
    if skipped:
        logger.warning("Skipped %d near-singular theta samples (p=%d, ppw=%g)", len(skipped), ops.config.order,
                       ops.config.ppw)
    if np.all(np.isnan(rho)):
        raise SymbolError("every theta sample was near-singular")
    worst = int(np.nanargmax(rho))
    table = np.column_stack([theta, rho])
    return RateResult(rho=float(rho[worst]), theta_max=(float(theta[worst, 0]), float(theta[worst, 1])),
                      table=table, skipped=skipped, perturbed=perturbed)


def parameter_sweep(base: LfaConfig, orders: Iterable[int], ppw_list: Iterable[float],
                    coarsenings: Iterable[Coarsening], n_s_list: Iterable[int] = (1,),
                    omega_c_list: Iterable[float] = (1.0,)) -> List[Dict]:
    """Rows (order, ppw, coarsening, n_s, omega_c, rho, theta1_max, theta2_max)."""
    rows = []
    n_s_list, omega_c_list = list(n_s_list), list(omega_c_list)
    for order in orders:
        for ppw in ppw_list:
            for coarsening in coarsenings:
                config = base.model_copy(update={"order": int(order), "ppw": float(ppw),
                                                 "coarsening": Coarsening(coarsening)})
                ops = build_lfa_operators(config)
                theta = theta_grid(config.k)
                for n_s in n_s_list:
                    for omega_c in omega_c_list:
                        result = two_grid_rate(ops, theta, n_s, omega_c)
                        rows.append({"order": int(order), "ppw": float(ppw), "coarsening": Coarsening(coarsening).value,
                                     "n_s": int(n_s), "omega_c": float(omega_c), "rho": result.rho,
                                     "theta1_max": result.theta_max[0], "theta2_max": result.theta_max[1]})
                        logger.info("LFA p=%d ppw=%g %s n_s=%d omega_c=%g: rho=%.4f", order, ppw,
                                    Coarsening(coarsening).value, n_s, omega_c, result.rho)
    return rows
