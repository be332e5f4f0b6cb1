"""QSFEM coarse operator on the square mesh of spacing 2h/p with interpolating transfer."""

import scipy.sparse as sp

from ..discretization.fespace import FeSpace, build_linear_space
from ..discretization.mesh import CoefficientField
from ..discretization.qsfem import assemble_qsfem
from ..solvers.prolongation import build_prolongation, coarse_mesh_for
from .base_coarsening import BaseCoarsening


class OptimizedFdCoarsening(BaseCoarsening):
    kind = "optimized_fd"

    def coarse_space(self, space: FeSpace) -> FeSpace:
        return build_linear_space(coarse_mesh_for(space))

    def coarse_operator(self, space: FeSpace, coarse: FeSpace, coeffs: CoefficientField) -> sp.csr_matrix:
        return assemble_qsfem(coarse, coeffs.subdivided(space.mesh, space.p // 2))

    def prolongation(self, space: FeSpace, coarse: FeSpace) -> sp.csr_matrix:
        return build_prolongation(space, coarse)
