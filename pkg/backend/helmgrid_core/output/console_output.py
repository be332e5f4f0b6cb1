"""
Console output for helmgrid runs.

Summaries go to stdout as single lines so that a run can be grepped from a
batch log; everything else is logged.
"""

from typing import Dict, List, Optional


class ConsoleOutput:
    """Static helpers that print run summaries."""

    @staticmethod
    def format_solve_summary(order: int, ppw: float, wavelengths: float, coarsening: str, iterations: int,
                             converged: bool, final_relres: float) -> str:
        status = "converged" if converged else "NOT converged"
        return (f"solve: order={order} ppw={ppw:.4g} wavelengths={wavelengths:.4g} coarsening={coarsening} "
                f"iters={iterations} relres={final_relres:.3e} ({status})")

    @staticmethod
    def render_summary(line: str):
        print(line)

    @staticmethod
    def render_table_summary(command: str, rows: List[Dict], path: Optional[str]):
        target = path if path else "stdout"
        print(f"{command}: {len(rows)} rows -> {target}")

    @staticmethod
    def format_error(message: str, details: Optional[List[str]] = None):
        """Diagnostics for the operator; printed by main.py to stderr."""
        lines = [f"error: {message}"]
        for detail in details or []:
            lines.append(f"  - {detail}")
        return "\n".join(lines)
