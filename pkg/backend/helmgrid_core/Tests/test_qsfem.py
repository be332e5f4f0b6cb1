import math

import numpy as np
import pytest

from helmgrid_core.discretization.fespace import build_linear_space, build_space
from helmgrid_core.discretization.mesh import (BoundaryTag, CoefficientField, ElementKind, Side, build_rectangle_mesh,
                                               tag_boundary)
from helmgrid_core.discretization.qsfem import (assemble_qsfem, build_stencil, radial_zero, scaled_symbol,
                                                stencil_coefficients, unscaled_symbol, zero_set_distance)
from helmgrid_core.errors import StencilError


class TestStencil:

    @pytest.mark.parametrize("eta", np.linspace(0.3, 2.5, 50))
    def test_scaled_symbol_at_origin(self, eta):
        k = 10.0
        value = scaled_symbol(np.zeros(2), k, eta / k)
        assert abs(value + k ** 2) < 1e-12 * k ** 2

    @pytest.mark.parametrize("eta", [0.5, 1.0, 2.0])
    def test_symbol_vanishes_on_optimized_directions(self, eta):
        _, p1, p2 = stencil_coefficients(eta)
        for t in (math.pi / 16, 3 * math.pi / 16):
            value = unscaled_symbol(eta * math.cos(t), eta * math.sin(t), p1, p2)
            assert abs(value) < 1e-12

    @pytest.mark.parametrize("eta", [0.0, -0.5, math.pi, 4.0])
    def test_window(self, eta):
        with pytest.raises(StencilError):
            stencil_coefficients(eta)

    def test_stencil_matrix_is_symmetric(self):
        stencil = build_stencil(1.2)
        matrix = stencil.matrix()
        assert np.allclose(matrix, matrix.T)
        assert np.allclose(matrix, matrix[::-1, ::-1])
        assert matrix.sum() == pytest.approx(-1.2 ** 2)


class TestZeroSet:

    def test_radial_zero_on_optimized_direction(self):
        k, h_c = 1.0, 0.8
        stencil = build_stencil(k * h_c)
        assert radial_zero(stencil, math.pi / 16, h_c) == pytest.approx(k, rel=1e-10)

    def test_distance_small_at_moderate_resolution(self):
        k = 2.0 * math.pi
        h_c = 1.0 / 8.0
        distance = zero_set_distance(k, h_c)
        assert 0.0 <= distance / k < 1e-2

    def test_distance_grows_with_eta(self):
        k = 1.0
        assert zero_set_distance(k, 0.5, 180) < zero_set_distance(k, 1.5, 180)


class TestQsfemAssembly:

    def test_interior_row_is_scaled_stencil(self):
        mesh = tag_boundary(build_rectangle_mesh(4, 4, 0.5), {side: BoundaryTag.NEUMANN for side in Side})
        k = 1.7
        space = build_linear_space(mesh)
        matrix = assemble_qsfem(space, CoefficientField.constant(mesh, k)).tocsr()
        centre = (1.0, 1.0)
        row = matrix.getrow(space.nearest_vertex_dof(centre)).toarray().ravel()
        expected = build_stencil(k * 0.5).matrix()
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                dof = space.nearest_vertex_dof((centre[0] + 0.5 * dx, centre[1] + 0.5 * dy))
                assert row[dof] == pytest.approx(expected[dy + 1, dx + 1], abs=1e-13)

    def test_damping_enters_as_mass(self):
        mesh = tag_boundary(build_rectangle_mesh(3, 3, 1.0), {side: BoundaryTag.NEUMANN for side in Side})
        space = build_linear_space(mesh)
        undamped = assemble_qsfem(space, CoefficientField.constant(mesh, 1.0))
        damped = assemble_qsfem(space, CoefficientField.constant(mesh, 1.0, 0.5))
        difference = (damped - undamped).toarray()
        assert np.allclose(difference.real, 0.0)
        assert np.all(np.diag(difference).imag < 0.0)

    def test_dirichlet_elimination(self):
        mesh = tag_boundary(build_rectangle_mesh(3, 3, 1.0), {Side.LEFT: "dirichlet", Side.RIGHT: "absorbing",
                                                            Side.BOTTOM: "absorbing", Side.TOP: "absorbing"})
        space = build_linear_space(mesh)
        matrix = assemble_qsfem(space, CoefficientField.constant(mesh, 1.0)).toarray()
        for dof in space.dirichlet_dofs:
            assert matrix[dof, dof] == 1.0
            assert np.count_nonzero(matrix[dof]) == 1

    def test_requires_linear_square_space(self):
        mesh = build_rectangle_mesh(2, 2, 1.0)
        with pytest.raises(StencilError):
            assemble_qsfem(build_space(mesh, 2), CoefficientField.constant(mesh, 1.0))
        triangles = build_rectangle_mesh(2, 2, 1.0, ElementKind.TRIANGLE)
        with pytest.raises(StencilError):
            assemble_qsfem(build_linear_space(triangles), CoefficientField.constant(triangles, 1.0))
