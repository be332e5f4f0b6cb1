"""
Two-grid solver for the high-order Helmholtz system A u = f.

One step: n_s smoothing steps (CSDD or an exact shifted solve), a coarse
correction u += omega_c I_P A_c^-1 I_P^T (f - A u), n_s smoothing steps.
The step is used as a Richardson iteration or as a GMRES preconditioner.
"""

import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, gmres

from ..coarsening import CoarseLevel, create_coarsening
from ..discretization.fespace import FeSpace, assemble_helmholtz
from ..discretization.mesh import CoefficientField
from ..linalg import SparseFactorization
from ..logs.core.logger_config import get_component_logger
from .domain_decomposition import SubdomainOperators, build_subdomain_operators, csdd_smoother, partition
from .solver_config import OuterIteration, SmootherKind, SolverConfig

logger = get_component_logger(__name__)

CONTRACTION_STEPS = 20


@dataclass
class TwoGridOperators:
    space: FeSpace
    coeffs: CoefficientField
    config: SolverConfig
    matrix: sp.csr_matrix
    shifted: sp.csr_matrix
    subdomains: Optional[SubdomainOperators] = None
    shifted_factorization: Optional[SparseFactorization] = None
    coarse: Optional[CoarseLevel] = None
    setup_time: float = 0.0


@dataclass
class SolveResult:
    u: np.ndarray
    iterations: int
    residual_history: List[float] = field(default_factory=list)
    converged: bool = False
    setup_time: float = 0.0
    solve_time: float = 0.0

    @property
    def final_relres(self) -> float:
        return self.residual_history[-1] if self.residual_history else float("nan")


def build_two_grid(space: FeSpace, coeffs: CoefficientField, config: SolverConfig,
                   matrix: Optional[sp.csr_matrix] = None) -> TwoGridOperators:
    """Assemble A and A_s, factor the smoother blocks and build the coarse level."""
    start = time.perf_counter()
    matrix = assemble_helmholtz(space, coeffs) if matrix is None else matrix
    shifted = assemble_helmholtz(space, coeffs, config.alpha_s)
    ops = TwoGridOperators(space=space, coeffs=coeffs, config=config, matrix=matrix, shifted=shifted)

    if config.smoother == SmootherKind.CSDD:
        dd = partition(space.mesh, config.resolved_l_dd(space.p))
        ops.subdomains = build_subdomain_operators(space, coeffs, config.alpha_s, dd, shifted, config.threads)
    else:
        ops.shifted_factorization = SparseFactorization(shifted)

    coarsening = create_coarsening(config.coarsening, config)
    if coarsening is not None:
        ops.coarse = coarsening.build(space, coeffs)

    ops.setup_time = time.perf_counter() - start
    logger.info("Two-grid setup: p=%d, %d dofs, smoother=%s, coarsening=%s, %.3fs", space.p, space.n_dofs,
                config.smoother.value, config.coarsening.value, ops.setup_time)
    return ops


def smooth(u: np.ndarray, f: np.ndarray, ops: TwoGridOperators) -> np.ndarray:
    if ops.subdomains is not None:
        return csdd_smoother(u, f, ops.matrix, ops.subdomains, ops.config.n_dd)
    return u + ops.shifted_factorization.solve(f - ops.matrix @ u)


def coarse_correction(u: np.ndarray, f: np.ndarray, ops: TwoGridOperators) -> np.ndarray:
    coarse = ops.coarse
    residual = coarse.prolongation.T @ (f - ops.matrix @ u)
    return u + ops.config.omega_c * (coarse.prolongation @ coarse.factorization.solve(residual))


def two_grid_step(u: np.ndarray, f: np.ndarray, ops: TwoGridOperators) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    for _ in range(ops.config.n_s):
        u = smooth(u, f, ops)
    if ops.coarse is not None:
        u = coarse_correction(u, f, ops)
    for _ in range(ops.config.n_s):
        u = smooth(u, f, ops)
    return u


def _richardson(f: np.ndarray, ops: TwoGridOperators, history: List[float]):
    config = ops.config
    norm_f = np.linalg.norm(f)
    u = np.zeros(ops.space.n_dofs, dtype=complex)
    for it in range(1, config.max_iters + 1):
        u = two_grid_step(u, f, ops)
        relres = float(np.linalg.norm(f - ops.matrix @ u) / norm_f)
        history.append(relres)
        logger.debug("Richardson iteration %d: relres %.3e", it, relres)
        if not np.isfinite(relres):
            return u, it, False
        if relres <= config.stop_rel_residual:
            return u, it, True
    return u, config.max_iters, False


def _krylov(f: np.ndarray, ops: TwoGridOperators, history: List[float]):
    config = ops.config
    n = ops.space.n_dofs
    zero = np.zeros(n, dtype=complex)
    preconditioner = LinearOperator((n, n), matvec=lambda r: two_grid_step(zero, r, ops), dtype=complex)
    counter = {"iterations": 0}

    def record(pr_norm):
        counter["iterations"] += 1
        history.append(float(pr_norm))

    u = np.zeros(n, dtype=complex)
    f = f.astype(complex)
    norm_f = np.linalg.norm(f)
    relres = 1.0
    # the inner test sees the preconditioned residual; restart from u until the true one is small enough
    while counter["iterations"] < config.max_iters:
        before = counter["iterations"]
        u, _ = gmres(ops.matrix, f, x0=u, rtol=config.stop_rel_residual, restart=config.max_iters - before,
                     maxiter=1, M=preconditioner, callback=record, callback_type="pr_norm")
        relres = float(np.linalg.norm(f - ops.matrix @ u) / norm_f)
        if counter["iterations"] == before:
            break
        history[-1] = relres
        logger.debug("GMRES cycle ended after %d iterations: relres %.3e", counter["iterations"], relres)
        if relres <= config.stop_rel_residual:
            break
    return u, counter["iterations"], relres <= config.stop_rel_residual


def solve(f: np.ndarray, ops: TwoGridOperators) -> SolveResult:
    """Run the outer iteration from u = 0 until ||f - A u|| / ||f|| <= stop_rel_residual."""
    config = ops.config
    f = np.asarray(f, dtype=complex)
    if np.linalg.norm(f) == 0.0:
        return SolveResult(u=np.zeros(ops.space.n_dofs, dtype=complex), iterations=0, residual_history=[0.0],
                           converged=True, setup_time=ops.setup_time)
    history = [1.0]
    start = time.perf_counter()
    if config.outer == OuterIteration.KRYLOV:
        u, iterations, converged = _krylov(f, ops, history)
    else:
        u, iterations, converged = _richardson(f, ops, history)
    result = SolveResult(u=u, iterations=iterations, residual_history=history, converged=converged,
                         setup_time=ops.setup_time, solve_time=time.perf_counter() - start)
    if converged:
        logger.info("%s converged in %d iterations (relres %.3e, %.3fs)", config.outer.value, iterations,
                    result.final_relres, result.solve_time)
    else:
        logger.warning("%s did not converge in %d iterations (relres %.3e)", config.outer.value, iterations,
                       result.final_relres)
    return result


def contraction_factor(ops: TwoGridOperators, n_steps: int = CONTRACTION_STEPS, seed: int = 0) -> float:
    """Observed error reduction per step on A u = 0 from a random start (geometric mean of the last half)."""
    rng = np.random.default_rng(seed)
    n = ops.space.n_dofs
    u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    if ops.space.dirichlet_dofs.size:
        u[ops.space.dirichlet_dofs] = 0.0
    f = np.zeros(n, dtype=complex)
    norms = [np.linalg.norm(u)]
    for _ in range(n_steps):
        u = two_grid_step(u, f, ops)
        norms.append(np.linalg.norm(u))
        if norms[-1] == 0.0:
            return 0.0
    ratios = np.array(norms[1:]) / np.array(norms[:-1])
    tail = ratios[len(ratios) // 2:]
    return float(np.exp(np.mean(np.log(tail))))
