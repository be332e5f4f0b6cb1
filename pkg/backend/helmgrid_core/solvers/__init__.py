"""
Two-grid solver pieces. Import twogrid directly; it depends on the coarsening
package, which in turn imports from here.
"""

from .solver_config import Coarsening, OuterIteration, SmootherKind, SolverConfig

__all__ = ['Coarsening', 'OuterIteration', 'SmootherKind', 'SolverConfig']
