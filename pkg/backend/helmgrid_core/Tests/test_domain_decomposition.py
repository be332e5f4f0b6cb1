import numpy as np
import pytest
from scipy.sparse.linalg import spsolve

from helmgrid_core.discretization.fespace import assemble_helmholtz, build_space
from helmgrid_core.discretization.mesh import BoundaryTag, CoefficientField, Side, build_rectangle_mesh, tag_boundary
from helmgrid_core.errors import MeshError
from helmgrid_core.solvers.domain_decomposition import (build_subdomain_operators, csdd_smoother, dd_step,
                                                        partition, subdomain_absorbing_edges)


def _absorbing_mesh(n, h=0.125):
    return tag_boundary(build_rectangle_mesh(n, n, h), {side: BoundaryTag.ABSORBING for side in Side})


def _operators(mesh, l_dd, threads=1, order=2, alpha_s=0.2):
    space = build_space(mesh, order)
    coeffs = CoefficientField.constant(mesh, 6.0)
    shifted = assemble_helmholtz(space, coeffs, alpha_s)
    return space, shifted, build_subdomain_operators(space, coeffs, alpha_s, partition(mesh, l_dd), shifted,
                                                     threads)


class TestPartition:

    def test_cores_tile_the_mesh(self):
        mesh = _absorbing_mesh(8)
        dd = partition(mesh, 4)
        assert dd.n_subdomains == 4
        cores = np.concatenate([sub.core_cells for sub in dd.subdomains])
        assert sorted(cores.tolist()) == list(range(mesh.n_cells))
        # 4 x 4 core plus one ring clipped by two domain sides
        assert sorted(len(sub.cells) for sub in dd.subdomains) == [25, 25, 25, 25]

    def test_remainder_block(self):
        dd = partition(_absorbing_mesh(5), 2)
        assert dd.n_subdomains == 9
        assert min(len(sub.core_cells) for sub in dd.subdomains) == 1

    def test_subdomain_size_at_least_two(self):
        with pytest.raises(MeshError):
            partition(_absorbing_mesh(4), 1)

    def test_multiplicity_counts_core_sharing(self):
        mesh = _absorbing_mesh(4)
        space = build_space(mesh, 2)
        dd = partition(mesh, 2).bind(space)
        assert dd.multiplicity.min() == 1
        # the centre vertex is shared by all four cores
        assert dd.multiplicity[space.nearest_vertex_dof((0.25, 0.25))] == 4


class TestAbsorbingEdges:

    def test_whole_mesh_inherits_global_tags(self):
        mesh = _absorbing_mesh(4)
        edges, owners = subdomain_absorbing_edges(mesh, np.arange(mesh.n_cells))
        assert len(edges) == 16
        assert len(owners) == 16

    def test_internal_boundary_is_absorbing(self, neumann_patch):
        corner = neumann_patch.cell_index(np.array([0, 1, 0, 1]), np.array([0, 0, 1, 1]))
        edges, owners = subdomain_absorbing_edges(neumann_patch, corner)
        assert len(edges) == 4
        assert set(owners.tolist()) <= set(corner.tolist())


class TestDdStep:

    def test_single_subdomain_is_exact_shifted_solve(self, rng):
        mesh = _absorbing_mesh(4)
        space, shifted, ops = _operators(mesh, 4)
        assert ops.dd.n_subdomains == 1
        f = rng.standard_normal(space.n_dofs) + 1j * rng.standard_normal(space.n_dofs)
        u = dd_step(np.zeros(space.n_dofs, dtype=complex), f, ops)
        assert np.allclose(u, spsolve(shifted.tocsc(), f), atol=1e-10)

    def test_threads_do_not_change_result(self, rng):
        mesh = _absorbing_mesh(6)
        space, _, serial = _operators(mesh, 2)
        _, _, threaded = _operators(mesh, 2, threads=2)
        f = rng.standard_normal(space.n_dofs) + 0j
        u0 = rng.standard_normal(space.n_dofs) + 0j
        assert np.allclose(dd_step(u0, f, serial), dd_step(u0, f, threaded), atol=1e-13)

    def test_smoother_fixed_point(self, rng):
        mesh = _absorbing_mesh(6)
        space = build_space(mesh, 2)
        coeffs = CoefficientField.constant(mesh, 6.0)
        matrix = assemble_helmholtz(space, coeffs)
        shifted = assemble_helmholtz(space, coeffs, 0.2)
        ops = build_subdomain_operators(space, coeffs, 0.2, partition(mesh, 3), shifted)
        f = rng.standard_normal(space.n_dofs) + 0j
        exact = spsolve(matrix.tocsc(), f)
        assert np.allclose(csdd_smoother(exact, f, matrix, ops, n_dd=2), exact, atol=1e-10)

    def test_high_frequency_mode_is_damped(self):
        # order 2 at 10 points per wavelength on a 16 x 16 absorbing mesh
        mesh = _absorbing_mesh(16, h=1.0 / 16)
        k = 2.0 * np.pi * 2 * 16 / 10.0
        space = build_space(mesh, 2)
        coeffs = CoefficientField.constant(mesh, k)
        matrix = assemble_helmholtz(space, coeffs)
        shifted = assemble_helmholtz(space, coeffs, 0.2)
        ops = build_subdomain_operators(space, coeffs, 0.2, partition(mesh, 4), shifted)

        # checkerboard on the vertices: theta = (pi, pi)
        error = np.zeros(space.n_dofs, dtype=complex)
        error[space.vertex_dofs] = (-1.0) ** (mesh.vertices[:, 0] + mesh.vertices[:, 1])
        f = np.zeros(space.n_dofs, dtype=complex)

        smoothed = csdd_smoother(error, f, matrix, ops)
        ratio = np.linalg.norm(matrix @ smoothed) / np.linalg.norm(matrix @ error)
        assert ratio < 0.5
