"""
Method parameters of the two-grid solver.

All fields are validated by pydantic; unknown keys are rejected so that a typo
in a run configuration fails loudly instead of silently using a default.
"""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

QSFEM_DEFAULT_L_DD = 4
GALERKIN_SUBDOMAIN_DOFS = 40


class Coarsening(str, Enum):
    OPTIMIZED_FD = "optimized_fd"
    GALERKIN_P = "galerkin_p"
    NONE = "none"


class OuterIteration(str, Enum):
    RICHARDSON = "richardson"
    KRYLOV = "krylov"


class SmootherKind(str, Enum):
    CSDD = "csdd"
    EXACT = "exact"


class SolverConfig(BaseModel):
    """Parameters of TwoGridStep, the CSDD smoother and the outer loop."""

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    alpha_s: float = Field(0.2, ge=0.0, description="smoother complex shift")
    alpha_c: float = Field(0.0, ge=0.0, description="Galerkin coarse-level complex shift")
    n_s: int = Field(1, ge=1, description="pre- and post-smoothing steps")
    n_dd: int = Field(1, ge=1, description="domain decomposition iterations per smoother step")
    omega_c: float = Field(1.0, ge=0.0, le=1.0, description="coarse correction relaxation")
    l_dd: Optional[int] = Field(None, ge=2, description="subdomain size in mesh cells")
    coarsening: Coarsening = Coarsening.OPTIMIZED_FD
    outer: OuterIteration = OuterIteration.RICHARDSON
    smoother: SmootherKind = SmootherKind.CSDD
    stop_rel_residual: float = Field(1e-6, gt=0.0)
    max_iters: int = Field(100, ge=1)
    threads: int = Field(1, ge=1, description="workers for concurrent subdomain solves")

    def resolved_l_dd(self, order: int) -> int:
        """Subdomain size in cells; Galerkin runs aim at about 40 dofs per direction."""
        if self.l_dd is not None:
            return self.l_dd
        if self.coarsening == Coarsening.GALERKIN_P:
            return max(2, int(round(GALERKIN_SUBDOMAIN_DOFS / order)))
        return QSFEM_DEFAULT_L_DD
