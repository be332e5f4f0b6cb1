"""
Desk-scale reproductions of the published iteration counts and rates.

Run with ``pytest -m slow``; together they take several minutes.
"""

import pytest

from helmgrid_core.analysis.lfa2d import LfaConfig, build_lfa_operators, two_grid_rate
from helmgrid_core.solvers.problem import build_problem
from helmgrid_core.solvers.solver_config import Coarsening, SmootherKind, SolverConfig
from helmgrid_core.solvers.twogrid import build_two_grid, contraction_factor, solve

from .test_config import TestConfiguration

pytestmark = pytest.mark.slow

GALERKIN = SolverConfig(coarsening=Coarsening.GALERKIN_P, alpha_s=0.02, alpha_c=0.02)
OPTIMIZED = SolverConfig(l_dd=4)


def iterations(config: SolverConfig, wavelengths: float = TestConfiguration.ACCEPTANCE_WAVELENGTHS,
               boundary: str = "absorbing", order: int = TestConfiguration.ACCEPTANCE_ORDER,
               ppw: float = TestConfiguration.ACCEPTANCE_PPW) -> int:
    problem = build_problem(order, ppw, wavelengths, boundary)
    result = solve(problem.rhs, build_two_grid(problem.space, problem.coeffs, config))
    assert result.converged
    return result.iterations


class TestIterationCounts:

    def test_optimized_coarsening_iterations(self):
        low, high = TestConfiguration.TABLE1_ITERATION_RANGE
        assert low <= iterations(OPTIMIZED) <= high

    def test_galerkin_needs_more_iterations(self):
        assert iterations(GALERKIN, order=6, ppw=8.0) > iterations(OPTIMIZED, order=6, ppw=8.0)

    def test_size_robustness(self):
        optimized = [iterations(OPTIMIZED, size) for size in TestConfiguration.ACCEPTANCE_SIZES]
        assert max(optimized) <= 1.5 * min(optimized)
        galerkin = [iterations(GALERKIN, size) for size in TestConfiguration.ACCEPTANCE_SIZES]
        assert all(a < b for a, b in zip(galerkin, galerkin[1:]))

    def test_boundary_conditions(self):
        ratio = iterations(GALERKIN, boundary="dirichlet2") / iterations(GALERKIN)
        assert 1.4 <= ratio <= 2.6
        optimized = [iterations(OPTIMIZED, boundary=b) for b in ("absorbing", "dirichlet2", "neumann2")]
        assert max(optimized) <= 1.3 * min(optimized)


class TestFourierPrediction:

    def test_contraction_matches_lfa(self):
        problem = build_problem(TestConfiguration.ACCEPTANCE_ORDER, TestConfiguration.ACCEPTANCE_PPW,
                                TestConfiguration.ACCEPTANCE_WAVELENGTHS)
        ops = build_two_grid(problem.space, problem.coeffs, SolverConfig(smoother=SmootherKind.EXACT))
        measured = contraction_factor(ops)
        predicted = two_grid_rate(build_lfa_operators(LfaConfig(order=TestConfiguration.ACCEPTANCE_ORDER,
                                                                ppw=TestConfiguration.ACCEPTANCE_PPW))).rho
        assert abs(measured - predicted) <= TestConfiguration.LFA_CONSISTENCY_TOL
