from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional, Type

import scipy.sparse as sp

from ..discretization.fespace import FeSpace
from ..discretization.mesh import CoefficientField
from ..errors import FactorizationError
from ..linalg import SparseFactorization
from ..logs.core.logger_config import get_component_logger
from ..solvers.solver_config import SolverConfig


@dataclass
class CoarseLevel:
    """Coarse operator A_c, prolongation I_P (restriction is its transpose) and the factored A_c."""
    space: FeSpace
    operator: sp.csr_matrix
    prolongation: sp.csr_matrix
    factorization: Optional[SparseFactorization] = None

    @property
    def restriction(self) -> sp.csr_matrix:
        return self.prolongation.T.tocsr()

    def factor(self) -> "CoarseLevel":
        try:
            self.factorization = SparseFactorization(self.operator)
        except FactorizationError as exc:
            raise FactorizationError(f"coarse operator is singular: {exc}") from exc
        return self


class BaseCoarsening(ABC):
    """
    Blueprint for coarse-level constructions of the two-grid method.

    Subclasses set ``kind`` to the value of ``Coarsening`` they implement and
    are added to ``registry`` when their module is imported.
    """

    registry: Dict[str, Type["BaseCoarsening"]] = {}
    kind: str = ""

    def __init__(self, config: SolverConfig):
        self.config = config
        self.logger = get_component_logger(f"helmgrid.solvers.coarsening.{self.kind}")

    def __init_subclass__(cls, **kwargs) -> None:
        super().__init_subclass__(**kwargs)
        if not cls.kind:
            raise TypeError(f"{cls.__name__} must set kind")
        BaseCoarsening.registry[cls.kind] = cls

    @abstractmethod
    def coarse_space(self, space: FeSpace) -> FeSpace:
        """Space the coarse operator acts on."""

    @abstractmethod
    def coarse_operator(self, space: FeSpace, coarse: FeSpace, coeffs: CoefficientField) -> sp.csr_matrix:
        pass

    @abstractmethod
    def prolongation(self, space: FeSpace, coarse: FeSpace) -> sp.csr_matrix:
        pass

    def build(self, space: FeSpace, coeffs: CoefficientField, factor: bool = True) -> CoarseLevel:
        coarse = self.coarse_space(space)
        level = CoarseLevel(space=coarse,
                            operator=self.coarse_operator(space, coarse, coeffs),
                            prolongation=self.prolongation(space, coarse))
        if factor:
            level.factor()
            self.logger.info("Coarse level %s: %d -> %d dofs, factor nnz %d", self.kind, space.n_dofs,
                             coarse.n_dofs, level.factorization.nnz)
        return level
