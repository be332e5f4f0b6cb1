import math

import numpy as np
import pytest

from helmgrid_core.analysis.lfa2d import (LfaConfig, UnitCell, bloch_vector, build_lfa_operators, build_patch,
                                          extract_blocks, inverse_symbol, parameter_sweep, symbol, theta_grid,
                                          two_grid_rate, two_grid_symbol)
from helmgrid_core.discretization.fespace import assemble_helmholtz
from helmgrid_core.discretization.mesh import CoefficientField, ElementKind
from helmgrid_core.errors import SymbolError
from helmgrid_core.solvers.solver_config import Coarsening

from .test_config import TestConfiguration

THETAS = [(0.0, 0.0), (0.3, -1.1), (math.pi / 2, 2.5), (-3.0, 0.7)]


class TestBlockSymbols:

    @pytest.mark.parametrize("order", [2, 4])
    def test_bloch_consistency(self, element_kind, order, rng):
        space = build_patch(order, element_kind)
        matrix = assemble_helmholtz(space, CoefficientField.constant(space.mesh, 1.3, 0.05))
        cell = UnitCell(space)
        view = extract_blocks(matrix, cell, cell)
        for theta in THETAS:
            local = rng.standard_normal(cell.size) + 1j * rng.standard_normal(cell.size)
            image = matrix @ bloch_vector(cell, theta, local, (8, 8))
            expected = np.exp(1j * (3 * theta[0] + 3 * theta[1])) * (view.symbol(theta) @ local)
            assert np.allclose(image[cell.dofs(3, 3)], expected, atol=TestConfiguration.BLOCH_TOL)

    def test_symbol_is_periodic(self):
        ops = build_lfa_operators(LfaConfig(order=2, ppw=8.0))
        theta = np.array(THETAS)
        assert np.allclose(ops.fine.symbol(theta + [2.0 * math.pi, 0.0]), ops.fine.symbol(theta))
        assert np.allclose(symbol(ops.prolongation, theta + [0.0, -2.0 * math.pi]), symbol(ops.prolongation, theta))

    def test_adjoint_symbol(self):
        ops = build_lfa_operators(LfaConfig(order=4, ppw=10.0))
        theta = np.array(THETAS)
        adjoint = ops.prolongation.adjoint().symbol(theta)
        assert np.allclose(adjoint, np.conj(np.swapaxes(ops.prolongation.symbol(theta), -1, -2)))

    def test_unit_cells(self):
        space = build_patch(4)
        assert UnitCell(space).size == 16
        assert UnitCell(space, stride=2).size == 4
        with pytest.raises(SymbolError):
            UnitCell(space).dofs(7, 3)

    def test_block_shapes(self):
        ops = build_lfa_operators(LfaConfig(order=4, coarsening=Coarsening.OPTIMIZED_FD))
        assert ops.fine.shape == (16, 16)
        assert ops.coarse.shape == (4, 4)
        assert ops.prolongation.shape == (16, 4)
        galerkin = build_lfa_operators(LfaConfig(order=4, coarsening=Coarsening.GALERKIN_P))
        assert galerkin.coarse.shape == (4, 4)
        assert build_lfa_operators(LfaConfig(order=4, coarsening=Coarsening.NONE)).coarse is None

    def test_identity_inverts_to_identity(self):
        assert np.allclose(inverse_symbol(np.eye(3)), np.eye(3))
        with pytest.raises(SymbolError):
            inverse_symbol(np.zeros((2, 2)))


class TestTwoGridSymbol:

    def test_no_coarse_correction_squares_the_smoother(self):
        ops = build_lfa_operators(LfaConfig(order=2, ppw=8.0))
        theta = np.array(THETAS[1:])
        a = ops.fine.symbol(theta)
        smoother = np.eye(a.shape[-1]) - np.linalg.solve(ops.shifted.symbol(theta), a)
        assert np.allclose(two_grid_symbol(ops, theta, n_s=1, omega_c=0.0), smoother @ smoother)

    def test_theta_grid_on_torus(self):
        grid = theta_grid(1.0)
        assert grid.shape == (64 * 64 + 8 * 64, 2)
        assert np.all(grid >= -math.pi) and np.all(grid < math.pi)

    def test_rate_on_explicit_grid(self):
        ops = build_lfa_operators(LfaConfig(order=2, ppw=10.0))
        theta = np.array([[0.5, 0.1], [1.0, 0.2], [-0.4, 0.9]])
        result = two_grid_rate(ops, theta)
        assert result.table.shape == (3, 3)
        assert result.rho == pytest.approx(np.nanmax(result.table[:, 2]))
        assert result.theta_max in {tuple(t) for t in theta}

    def test_empty_sweep(self):
        assert parameter_sweep(LfaConfig(), [], [8.0], [Coarsening.OPTIMIZED_FD]) == []

    def test_sweep_rows(self):
        rows = parameter_sweep(LfaConfig(), [2], [10.0], [Coarsening.OPTIMIZED_FD], n_s_list=[1, 2])
        assert [(row["n_s"], row["coarsening"]) for row in rows] == [(1, "optimized_fd"), (2, "optimized_fd")]
        assert all(np.isfinite(row["rho"]) for row in rows)


@pytest.mark.slow
class TestConvergenceThresholds:

    @pytest.mark.parametrize("order, ppw", [(4, 8.0), (6, 7.0)])
    def test_optimized_coarsening_converges(self, order, ppw):
        optimized = two_grid_rate(build_lfa_operators(LfaConfig(order=order, ppw=ppw))).rho
        galerkin = two_grid_rate(build_lfa_operators(LfaConfig(order=order, ppw=ppw,
                                                               coarsening=Coarsening.GALERKIN_P))).rho
        assert optimized < 1.0
        assert galerkin > optimized

    def test_relaxation_and_more_smoothing_help(self):
        ops = build_lfa_operators(LfaConfig(order=6, ppw=6.0))
        theta = theta_grid(ops.config.k)
        tuned = two_grid_rate(ops, theta, n_s=2, omega_c=0.8).rho
        plain = two_grid_rate(ops, theta, n_s=1, omega_c=1.0).rho
        assert tuned <= plain + 0.02

    def test_heavy_damping(self):
        for coarsening in (Coarsening.OPTIMIZED_FD, Coarsening.GALERKIN_P):
            ops = build_lfa_operators(LfaConfig(order=4, ppw=10.0, damping=10.0, coarsening=coarsening))
            assert two_grid_rate(ops).rho < 0.2

    def test_triangles(self):
        ops = build_lfa_operators(LfaConfig(order=4, ppw=10.0, element_kind=ElementKind.TRIANGLE))
        assert np.isfinite(two_grid_rate(ops).rho)
