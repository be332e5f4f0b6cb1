"""
Pydantic models of a run configuration: one section per CLI command plus the
named boundary sets. Unknown keys are rejected everywhere.
"""

from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..discretization.fespace import SUPPORTED_ORDERS
from ..discretization.mesh import BoundaryTag, ElementKind, Side
from ..solvers.problem import BOUNDARY_SETS, DEFAULT_LAYER_DOFS
from ..solvers.solver_config import Coarsening, SolverConfig


def _check_orders(orders: List[int]) -> List[int]:
    bad = [p for p in orders if p not in SUPPORTED_ORDERS]
    if bad:
        raise ValueError(f"orders must be in {SUPPORTED_ORDERS}, got {bad}")
    return orders


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class _OrderSweep(_Section):
    @field_validator("orders", check_fields=False)
    @classmethod
    def _even_orders(cls, value: List[int]) -> List[int]:
        return _check_orders(value)


class SolveConfig(_Section):
    order: int = 4
    ppw: float = Field(10.0, gt=0.0)
    wavelengths: float = Field(20.0, gt=0.0)
    boundary: str = "absorbing"
    element_kind: ElementKind = ElementKind.SQUARE
    layer_dofs: int = Field(DEFAULT_LAYER_DOFS, ge=1)
    source: Tuple[float, float] = (0.5, 0.5)
    solver: SolverConfig = SolverConfig()

    @field_validator("order")
    @classmethod
    def _even_order(cls, value: int) -> int:
        return _check_orders([value])[0]


class Lfa1dConfig(_Section):
    half_width: int = Field(2, ge=1, le=2)
    wavelengths: float = Field(20.0, gt=0.0)
    damping: float = Field(0.01, gt=0.0)
    alpha_s: float = Field(0.2, ge=0.0)
    nu1: int = Field(1, ge=0)
    nu2: int = Field(1, ge=0)
    ppw_list: List[float] = [8.0, 10.0, 12.0, 16.0, 20.0]

    @field_validator("ppw_list")
    @classmethod
    def _resolved(cls, values: List[float]) -> List[float]:
        if any(v <= 2.0 for v in values):
            raise ValueError("points per wavelength must exceed 2")
        return values


class Lfa2dConfig(_OrderSweep):
    orders: List[int] = [4, 6]
    ppw_list: List[float] = [6.0, 7.0, 8.0, 10.0]
    coarsenings: List[Coarsening] = [Coarsening.OPTIMIZED_FD, Coarsening.GALERKIN_P]
    n_s_list: List[int] = [1]
    omega_c_list: List[float] = [1.0]
    element_kind: ElementKind = ElementKind.SQUARE
    damping: float = Field(0.01, ge=0.0)
    alpha_s: float = Field(0.2, ge=0.0)
    alpha_c: float = Field(0.0, ge=0.0)


class DispersionConfig(_OrderSweep):
    orders: List[int] = [2, 4, 6, 8]
    ppw_list: List[float] = [6.0, 8.0, 10.0, 14.0]
    element_kind: ElementKind = ElementKind.SQUARE
    include_qsfem: bool = True
    n_directions: int = Field(361, ge=3)
    overlay_coarsenings: List[Coarsening] = []
    damping: float = Field(0.01, gt=0.0)


class BenchConfig(_OrderSweep):
    orders: List[int] = [4]
    ppw_list: List[float] = [10.0]
    wavelengths_list: List[float] = [10.0, 20.0]
    boundary_sets: List[str] = ["absorbing", "dirichlet2", "neumann2"]
    coarsenings: List[Coarsening] = [Coarsening.OPTIMIZED_FD, Coarsening.GALERKIN_P]
    element_kind: ElementKind = ElementKind.SQUARE
    layer_dofs: int = Field(DEFAULT_LAYER_DOFS, ge=1)
    galerkin_alpha: float = Field(0.02, ge=0.0, description="alpha_s and alpha_c of p-coarsening runs")
    solver: SolverConfig = SolverConfig()


class RunConfig(_Section):
    solve: SolveConfig = SolveConfig()
    lfa1d: Lfa1dConfig = Lfa1dConfig()
    lfa2d: Lfa2dConfig = Lfa2dConfig()
    dispersion: DispersionConfig = DispersionConfig()
    bench: BenchConfig = BenchConfig()
    boundary_sets: Dict[str, Dict[Side, BoundaryTag]] = Field(default_factory=lambda: dict(BOUNDARY_SETS))

    @model_validator(mode="after")
    def _known_boundary_sets(self) -> "RunConfig":
        names = [self.solve.boundary] + list(self.bench.boundary_sets)
        unknown = sorted({n for n in names if n not in self.boundary_sets})
        if unknown:
            raise ValueError(f"undefined boundary set(s): {', '.join(unknown)}")
        return self


COMMANDS = ("solve", "lfa1d", "lfa2d", "dispersion", "bench")
