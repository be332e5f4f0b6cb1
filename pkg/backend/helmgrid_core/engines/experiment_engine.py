"""
Experiment engine behind the helmgrid CLI.

Each command reads its section of a validated RunConfig, runs the solver or
one of the analyses and returns a table of rows. Writing the CSV artifacts is
done by run(), so the commands themselves stay free of I/O.
"""

import math
import os
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..analysis.dispersion import DispersionQuery, coarse_query, delta_and_R, dispersion_table
from ..analysis.lfa1d import ToyConfig, sweep_ppw
from ..analysis.lfa2d import LfaConfig, build_lfa_operators, parameter_sweep, two_grid_rate
from ..config.run_config import RunConfig
from ..discretization.fespace import assemble_helmholtz
from ..logs.core.logger_config import get_component_logger
from ..output import ConsoleOutput, CsvOutput
from ..solvers.problem import build_problem
from ..solvers.solver_config import Coarsening, SolverConfig
from ..solvers.twogrid import build_two_grid, solve
from .command_registry import CommandRegistry, command_registry, discover_commands, expose_command

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3

SOLVE_COLUMNS = ["iter", "relres"]
LFA1D_COLUMNS = ["ppw", "rho", "R", "zeta_f", "zeta_c", "delta"]
LFA2D_COLUMNS = ["order", "ppw", "coarsening", "n_s", "omega_c", "rho", "theta1_max", "theta2_max"]
DISPERSION_COLUMNS = ["scheme", "ppw", "max_dispersion_error"]
OVERLAY_COLUMNS = ["scheme_pair", "ppw", "R", "rho"]
BENCH_COLUMNS = ["order", "ppw", "wavelengths", "boundary", "coarsening", "iterations", "converged",
                 "final_relres", "setup_s", "solve_s"]


@dataclass
class CommandResult:
    rows: List[Dict]
    exit_code: int = EXIT_OK
    summary: Optional[str] = None
    extra_tables: Dict[str, Tuple[List[str], List[Dict]]] = field(default_factory=dict)


def extra_table_path(out: str, suffix: str) -> str:
    stem, ext = os.path.splitext(out)
    return f"{stem}_{suffix}{ext or '.csv'}"


class ExperimentEngine:
    """
    Runs the five helmgrid commands against one RunConfig.

    ``threads`` overrides the solver's worker count for solve and bench.
    """

    def __init__(self, config: RunConfig, threads: Optional[int] = None,
                 registry: CommandRegistry = command_registry):
        self.config = config
        self.threads = threads
        self.registry = registry
        self.logger = get_component_logger(__name__)
        discover_commands(self, registry)

    def _solver(self, solver: SolverConfig, **updates) -> SolverConfig:
        if self.threads is not None:
            updates["threads"] = self.threads
        return solver.model_copy(update=updates) if updates else solver

    @expose_command(
        name="solve",
        description="solve one benchmark problem with the two-grid method",
        columns=SOLVE_COLUMNS,
        examples=["helmgrid solve --config run.json --out history.csv"],
        notes="relres[0] = 1; exit code 3 when the stopping tolerance is not reached"
    )
    def cmd_solve(self) -> CommandResult:
        cfg = self.config.solve
        solver = self._solver(cfg.solver)
        problem = build_problem(cfg.order, cfg.ppw, cfg.wavelengths, cfg.boundary, cfg.element_kind,
                                cfg.layer_dofs, cfg.source, self.config.boundary_sets)
        ops = build_two_grid(problem.space, problem.coeffs, solver)
        result = solve(problem.rhs, ops)
        rows = [{"iter": it, "relres": relres} for it, relres in enumerate(result.residual_history)]
        summary = ConsoleOutput.format_solve_summary(order=cfg.order, ppw=problem.ppw, wavelengths=cfg.wavelengths,
                                                     coarsening=solver.coarsening.value,
                                                     iterations=result.iterations, converged=result.converged,
                                                     final_relres=result.final_relres)
        return CommandResult(rows=rows, exit_code=EXIT_OK if result.converged else EXIT_NOT_CONVERGED,
                             summary=summary)

    @expose_command(
        name="lfa1d",
        description="1-D finite-difference two-grid rate rho next to the dispersion ratio R",
        columns=LFA1D_COLUMNS,
        examples=["helmgrid lfa1d --out lfa1d.csv"]
    )
    def cmd_lfa1d(self) -> CommandResult:
        cfg = self.config.lfa1d
        toy = ToyConfig(half_width=cfg.half_width, k=2.0 * math.pi * cfg.wavelengths, damping=cfg.damping,
                        alpha_s=cfg.alpha_s, nu1=cfg.nu1, nu2=cfg.nu2)
        return CommandResult(rows=sweep_ppw(toy, cfg.ppw_list))

    @expose_command(
        name="lfa2d",
        description="Bloch-wave two-grid convergence rate of the 2-D finite-element method",
        columns=LFA2D_COLUMNS,
        examples=["helmgrid lfa2d --out lfa2d.csv"],
        notes="theta1_max, theta2_max: Bloch wave of the largest spectral radius"
    )
    def cmd_lfa2d(self) -> CommandResult:
        cfg = self.config.lfa2d
        base = LfaConfig(element_kind=cfg.element_kind, damping=cfg.damping, alpha_s=cfg.alpha_s,
                         alpha_c=cfg.alpha_c)
        rows = parameter_sweep(base, cfg.orders, cfg.ppw_list, cfg.coarsenings, cfg.n_s_list, cfg.omega_c_list)
        return CommandResult(rows=rows)

    @expose_command(
        name="dispersion",
        description="maximum dispersion error of QSFEM and order-p finite elements",
        columns=DISPERSION_COLUMNS,
        examples=["helmgrid dispersion --out dispersion.csv"],
        notes=f"with overlay_coarsenings set, <out>_overlay.csv holds {','.join(OVERLAY_COLUMNS)}"
    )
    def cmd_dispersion(self) -> CommandResult:
        cfg = self.config.dispersion
        rows = dispersion_table(cfg.orders, cfg.ppw_list, cfg.element_kind, cfg.include_qsfem, cfg.n_directions)
        result = CommandResult(rows=rows)
        if cfg.overlay_coarsenings:
            result.extra_tables["overlay"] = (OVERLAY_COLUMNS, self._overlay_rows())
        return result

    def _overlay_rows(self) -> List[Dict]:
        """R from the fine/coarse zero curves next to the LFA rate of the same pair."""
        cfg, lfa = self.config.dispersion, self.config.lfa2d
        rows = []
        for order in cfg.orders:
            for coarsening in cfg.overlay_coarsenings:
                if coarsening == Coarsening.NONE:
                    continue
                for ppw in cfg.ppw_list:
                    fine = DispersionQuery(scheme="fe", order=order, element_kind=cfg.element_kind, ppw=ppw)
                    coarse = coarse_query(fine, coarsening.value)
                    _, R = delta_and_R(fine, coarse, cfg.damping, cfg.n_directions)
                    ops = build_lfa_operators(LfaConfig(order=order, ppw=ppw, element_kind=cfg.element_kind,
                                                        damping=cfg.damping, coarsening=coarsening,
                                                        alpha_s=lfa.alpha_s, alpha_c=lfa.alpha_c))
                    rows.append({"scheme_pair": f"{fine.label}/{coarse.label}", "ppw": float(ppw), "R": R,
                                 "rho": two_grid_rate(ops).rho})
        return rows

    @expose_command(
        name="bench",
        description="iteration counts over orders, resolutions, sizes, boundary sets and coarsenings",
        columns=BENCH_COLUMNS,
        examples=["helmgrid bench --config bench.json --out bench.csv --threads 4"],
        notes="galerkin_p runs use alpha_s = alpha_c = galerkin_alpha"
    )
    def cmd_bench(self) -> CommandResult:
        cfg = self.config.bench
        rows = []
        for order in cfg.orders:
            for ppw in cfg.ppw_list:
                for wavelengths in cfg.wavelengths_list:
                    for boundary in cfg.boundary_sets:
                        problem = build_problem(order, ppw, wavelengths, boundary, cfg.element_kind, cfg.layer_dofs,
                                                boundary_sets=self.config.boundary_sets)
                        matrix = assemble_helmholtz(problem.space, problem.coeffs)
                        for coarsening in cfg.coarsenings:
                            rows.append(self._bench_run(problem, matrix, float(ppw), Coarsening(coarsening)))
        return CommandResult(rows=rows)

    def _bench_run(self, problem, matrix, ppw: float, coarsening: Coarsening) -> Dict:
        updates = {"coarsening": coarsening}
        if coarsening == Coarsening.GALERKIN_P:
            updates.update(alpha_s=self.config.bench.galerkin_alpha, alpha_c=self.config.bench.galerkin_alpha)
        solver = self._solver(self.config.bench.solver, **updates)
        ops = build_two_grid(problem.space, problem.coeffs, solver, matrix=matrix)
        result = solve(problem.rhs, ops)
        self.logger.info("bench p=%d ppw=%g L=%g %s %s: %d iterations", problem.order, problem.ppw,
                         problem.wavelengths, problem.boundary, coarsening.value, result.iterations)
        return {"order": problem.order, "ppw": ppw, "wavelengths": problem.wavelengths,
                "boundary": problem.boundary, "coarsening": coarsening.value, "iterations": result.iterations,
                "converged": result.converged, "final_relres": result.final_relres,
                "setup_s": result.setup_time, "solve_s": result.solve_time}

    def run(self, command: str, out: Optional[str] = None) -> CommandResult:
        """Run ``command`` and write its CSV to ``out``; without ``out`` the CSV goes to stdout."""
        method = self.registry.get_command(command)
        metadata = self.registry.get_metadata(command)[command]
        start = time.perf_counter()
        result = method()
        self.logger.info(f"{command} finished in {time.perf_counter() - start:.2f}s with {len(result.rows)} rows")

        text = CsvOutput(metadata.columns).write(result.rows, out)
        if out is None:
            print(text, end='')
        for suffix, (columns, rows) in result.extra_tables.items():
            path = extra_table_path(out, suffix) if out else None
            extra = CsvOutput(columns).write(rows, path)
            if path is None:
                print()
                print(extra, end='')

        if result.summary:
            self.logger.info(result.summary)
        if out is not None:
            if result.summary:
                ConsoleOutput.render_summary(result.summary)
            else:
                ConsoleOutput.render_table_summary(command, result.rows, out)
        return result
