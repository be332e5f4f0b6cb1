"""
Order-p/2 finite elements on the fine mesh as the coarse level.

The coarse basis is the order-p/2 subset of the hierarchical fine basis, so
the transfer is a 0/1 inclusion. A small complex shift alpha_c on the coarse
operator stabilizes the coarse solve for larger k.
"""

import scipy.sparse as sp

from ..discretization.fespace import FeSpace, assemble_helmholtz
from ..discretization.mesh import CoefficientField
from ..errors import SpaceError
from ..solvers.prolongation import inclusion_prolongation
from .base_coarsening import BaseCoarsening


class GalerkinPCoarsening(BaseCoarsening):
    kind = "galerkin_p"

    def coarse_space(self, space: FeSpace) -> FeSpace:
        if space.p % 2:
            raise SpaceError(f"p-coarsening needs an even order, got {space.p}")
        return FeSpace(space.mesh, space.p // 2)

    def coarse_operator(self, space: FeSpace, coarse: FeSpace, coeffs: CoefficientField) -> sp.csr_matrix:
        return assemble_helmholtz(coarse, coeffs, self.config.alpha_c)

    def prolongation(self, space: FeSpace, coarse: FeSpace) -> sp.csr_matrix:
        return inclusion_prolongation(space, coarse)
