import math

import numpy as np
import pytest

from helmgrid_core.discretization.mesh import (BoundaryTag, CoefficientField, ElementKind, Side, absorbing_layer,
                                               build_mesh, build_rectangle_mesh, build_unit_square_mesh,
                                               cells_for_layer_dofs, layer_profile, tag_boundary,
                                               tag_boundary_edges)
from helmgrid_core.errors import MeshError


class TestMeshConstruction:

    def test_unit_square_counts(self):
        mesh = build_unit_square_mesh(3)
        assert mesh.h == pytest.approx(1.0 / 3.0)
        assert mesh.n_cells == 9
        assert mesh.n_vertices == 16
        assert mesh.n_edges == 24
        assert mesh.n_boundary_edges == 12
        assert mesh.extent == pytest.approx((0.0, 1.0, 0.0, 1.0))

    def test_triangle_mesh_adds_diagonals(self):
        mesh = build_unit_square_mesh(3, ElementKind.TRIANGLE)
        assert mesh.n_elements == 18
        assert mesh.n_edges == 24 + 9
        assert mesh.n_boundary_edges == 12

    def test_boundary_is_one_counterclockwise_loop(self):
        mesh = build_unit_square_mesh(3)
        sides = list(mesh.boundary_sides)
        assert sides[0] == Side.BOTTOM
        assert [sides.count(s) for s in (Side.BOTTOM, Side.RIGHT, Side.TOP, Side.LEFT)] == [3, 3, 3, 3]
        # consecutive edges share a vertex, closing the loop
        edges = [set(mesh.edges[e]) for e in mesh.boundary_edges]
        for first, second in zip(edges, edges[1:] + edges[:1]):
            assert first & second

    def test_l_shaped_domain(self):
        mesh = build_mesh([(0, 0), (1, 0), (0, 1)], 0.5)
        assert mesh.n_cells == 3
        assert mesh.n_vertices == 8
        assert mesh.n_boundary_edges == 8
        assert mesh.cell_index(1, 1) == -1
        assert mesh.cell_index(0, 1) >= 0

    def test_cells_are_deduplicated(self):
        mesh = build_mesh([(0, 0), (0, 0), (1, 0)], 1.0)
        assert mesh.n_cells == 2

    @pytest.mark.parametrize("cells", [[(0, 0), (2, 0)], [(0, 0), (1, 1)]])
    def test_disconnected_cells_rejected(self, cells):
        with pytest.raises(MeshError):
            build_mesh(cells, 1.0)

    def test_invalid_input_rejected(self):
        with pytest.raises(MeshError):
            build_mesh(np.zeros((0, 2), dtype=int), 1.0)
        with pytest.raises(MeshError):
            build_mesh([(0, 0)], 0.0)
        with pytest.raises(MeshError):
            build_rectangle_mesh(0, 3, 1.0)

    def test_cell_centers_and_coordinates(self):
        mesh = build_rectangle_mesh(2, 1, 0.5, origin=(1.0, -1.0))
        assert np.allclose(mesh.cell_centers(), [[1.25, -0.75], [1.75, -0.75]])
        assert np.allclose(mesh.vertex_coordinates().min(axis=0), [1.0, -1.0])
        assert np.allclose(mesh.vertex_coordinates().max(axis=0), [2.0, -0.5])


class TestBoundaryTagging:

    def test_tag_by_side(self):
        mesh = tag_boundary(build_unit_square_mesh(2), {Side.LEFT: BoundaryTag.DIRICHLET, Side.BOTTOM: "dirichlet",
                                                        Side.RIGHT: "absorbing", Side.TOP: BoundaryTag.NEUMANN})
        for side, tag in zip(mesh.boundary_sides, mesh.boundary_tags):
            expected = {Side.LEFT: BoundaryTag.DIRICHLET, Side.BOTTOM: BoundaryTag.DIRICHLET,
                        Side.RIGHT: BoundaryTag.ABSORBING, Side.TOP: BoundaryTag.NEUMANN}[side]
            assert tag == expected
        assert len(mesh.edges_with_tag(BoundaryTag.DIRICHLET)) == 4

    def test_missing_side_rejected(self):
        with pytest.raises(MeshError):
            tag_boundary(build_unit_square_mesh(2), {Side.LEFT: BoundaryTag.NEUMANN})

    def test_tag_edges_one_by_one(self):
        mesh = build_mesh([(0, 0), (1, 0), (0, 1)], 1.0)
        tags = [BoundaryTag.ABSORBING] * mesh.n_boundary_edges
        assert tag_boundary_edges(mesh, tags).boundary_tags == tuple(tags)
        with pytest.raises(MeshError):
            tag_boundary_edges(mesh, tags[:-1])

    def test_tagging_returns_new_mesh(self):
        mesh = build_unit_square_mesh(2)
        tagged = tag_boundary(mesh, {side: BoundaryTag.ABSORBING for side in Side})
        assert all(t is None for t in mesh.boundary_tags)
        assert tagged is not mesh


class TestSubdivision:

    def test_subdivide_counts_and_spacing(self):
        mesh = build_unit_square_mesh(2, ElementKind.TRIANGLE)
        child = mesh.subdivide(3)
        assert child.n_cells == 36
        assert child.h == pytest.approx(mesh.h / 3)
        assert child.element_kind == ElementKind.SQUARE

    def test_subdivide_inherits_tags(self):
        mesh = tag_boundary(build_unit_square_mesh(2), {Side.LEFT: "dirichlet", Side.RIGHT: "absorbing",
                                                        Side.BOTTOM: "neumann", Side.TOP: "absorbing"})
        child = mesh.subdivide(2)
        for side, tag in zip(child.boundary_sides, child.boundary_tags):
            assert tag == {Side.LEFT: BoundaryTag.DIRICHLET, Side.RIGHT: BoundaryTag.ABSORBING,
                           Side.BOTTOM: BoundaryTag.NEUMANN, Side.TOP: BoundaryTag.ABSORBING}[side]

    def test_parent_cells(self):
        mesh = build_unit_square_mesh(2)
        child = mesh.subdivide(2)
        parents = child.parent_cells(mesh, 2)
        assert np.bincount(parents).tolist() == [4, 4, 4, 4]
        assert np.allclose(mesh.cell_centers()[parents], child.cell_centers(), atol=0.25 * mesh.h + 1e-12)

    def test_invalid_factor(self):
        with pytest.raises(MeshError):
            build_unit_square_mesh(2).subdivide(0)


class TestCoefficients:

    def test_constant_field(self):
        mesh = build_unit_square_mesh(3)
        coeffs = CoefficientField.constant(mesh, 5.0, 0.1)
        assert coeffs.k.shape == (9,)
        assert np.all(coeffs.eps == 0.1)

    def test_invalid_values_rejected(self):
        with pytest.raises(MeshError):
            CoefficientField(np.array([1.0, -1.0]), np.zeros(2))
        with pytest.raises(MeshError):
            CoefficientField(np.array([1.0, 1.0]), np.array([0.0, -0.1]))
        with pytest.raises(MeshError):
            CoefficientField(np.array([1.0, 1.0]), np.zeros(3))

    def test_subdivided_field(self):
        mesh = build_unit_square_mesh(2)
        coeffs = CoefficientField(np.array([1.0, 2.0, 3.0, 4.0]), np.zeros(4))
        child = coeffs.subdivided(mesh, 2)
        assert child.k.shape == (16,)
        assert sorted(np.unique(child.k)) == [1.0, 2.0, 3.0, 4.0]


class TestAbsorbingLayer:

    def test_profile_endpoints(self):
        k = 3.0
        assert layer_profile(0.0, 1.0, k) == pytest.approx(0.0)
        assert layer_profile(1.0, 1.0, k) == pytest.approx(2.0 * k ** 2 / math.pi)
        assert layer_profile(2.0, 1.0, k) == pytest.approx(2.0 * k ** 2 / math.pi)

    def test_layer_cells(self):
        assert cells_for_layer_dofs(40, 4) == 10
        assert cells_for_layer_dofs(40, 6) == 7
        assert cells_for_layer_dofs(40, 8) == 5

    def test_layer_leaves_interior_undamped(self):
        mesh = build_rectangle_mesh(10, 10, 0.1)
        coeffs = absorbing_layer(mesh, 4.0, list(Side), 0.2)
        centers = mesh.cell_centers()
        interior = np.all((centers > 0.2) & (centers < 0.8), axis=1)
        assert np.all(coeffs.eps[interior] == 0.0)
        assert np.all(coeffs.eps[~interior] > 0.0)
        assert np.all(coeffs.k == 4.0)

    def test_layer_width_must_fit_lattice(self):
        mesh = build_rectangle_mesh(10, 10, 0.1)
        with pytest.raises(MeshError):
            absorbing_layer(mesh, 4.0, [Side.LEFT], 0.15)
        with pytest.raises(MeshError):
            absorbing_layer(mesh, 4.0, [Side.LEFT], 2.0)
