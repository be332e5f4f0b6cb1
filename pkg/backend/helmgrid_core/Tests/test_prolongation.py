import numpy as np
import pytest

from helmgrid_core.discretization.basis import reference_elements
from helmgrid_core.discretization.fespace import build_linear_space, build_space
from helmgrid_core.discretization.mesh import BoundaryTag, Side, build_unit_square_mesh, tag_boundary
from helmgrid_core.errors import SpaceError
from helmgrid_core.solvers.prolongation import (build_prolongation, coarse_mesh_for, inclusion_prolongation,
                                                local_interpolation)

from .test_config import TestConfiguration


def bilinear(x, y):
    return x + 2.0 * y + 3.0 * x * y


class TestLocalInterpolation:

    @pytest.mark.parametrize("p", [2, 4, 6, 8])
    def test_interpolation_property(self, element_kind, p):
        m = p // 2
        for ref in reference_elements(p, element_kind.value):
            subset, lattice, G = local_interpolation(ref, m)
            nodes = lattice / m
            values, _ = ref.evaluate(nodes[:, 0], nodes[:, 1])
            assert np.allclose(values[:, subset] @ G, np.eye(len(nodes)), atol=1e-10)


class TestProlongation:

    def test_coarse_mesh_spacing(self, p4_space):
        coarse = coarse_mesh_for(p4_space)
        assert coarse.h == pytest.approx(p4_space.mesh.h / 2)
        assert coarse.n_cells == 4 * p4_space.mesh.n_cells

    @pytest.mark.parametrize("p", [4, 6])
    def test_reproduces_bilinear(self, element_kind, p, rng):
        fine = build_space(build_unit_square_mesh(2, element_kind), p)
        coarse = build_linear_space(coarse_mesh_for(fine))
        xy = coarse.mesh.vertex_coordinates()
        nodal = np.zeros(coarse.n_dofs)
        nodal[coarse.vertex_dofs] = bilinear(xy[:, 0], xy[:, 1])
        coefficients = build_prolongation(fine, coarse) @ nodal
        points = rng.uniform(0.0, 1.0, size=(25, 2))
        assert np.allclose(fine.evaluate(coefficients, points), bilinear(points[:, 0], points[:, 1]),
                           atol=TestConfiguration.REPRODUCTION_TOL)

    def test_dirichlet_rows_and_columns_vanish(self):
        mesh = tag_boundary(build_unit_square_mesh(3), {Side.LEFT: BoundaryTag.DIRICHLET,
                                                        Side.BOTTOM: BoundaryTag.ABSORBING,
                                                        Side.RIGHT: BoundaryTag.ABSORBING,
                                                        Side.TOP: BoundaryTag.ABSORBING})
        fine = build_space(mesh, 4)
        coarse = build_linear_space(coarse_mesh_for(fine))
        prolongation = build_prolongation(fine, coarse).toarray()
        assert np.all(prolongation[fine.dirichlet_dofs] == 0.0)
        assert np.all(prolongation[:, coarse.dirichlet_dofs] == 0.0)

    def test_requires_linear_coarse_space(self, p4_space):
        with pytest.raises(SpaceError):
            build_prolongation(p4_space, build_space(coarse_mesh_for(p4_space), 2))


class TestInclusion:

    def test_columns_are_orthonormal(self, p4_space):
        coarse = build_space(p4_space.mesh, 2)
        inclusion = inclusion_prolongation(p4_space, coarse)
        assert inclusion.shape == (p4_space.n_dofs, coarse.n_dofs)
        assert np.array_equal((inclusion.T @ inclusion).toarray(), np.eye(coarse.n_dofs))

    def test_same_function(self, element_kind, rng):
        mesh = build_unit_square_mesh(2, element_kind)
        fine, coarse = build_space(mesh, 6), build_space(mesh, 2)
        coefficients = rng.standard_normal(coarse.n_dofs)
        points = rng.uniform(0.0, 1.0, size=(15, 2))
        embedded = inclusion_prolongation(fine, coarse) @ coefficients
        assert np.allclose(fine.evaluate(embedded, points), coarse.evaluate(coefficients, points),
                           atol=TestConfiguration.REPRODUCTION_TOL)
