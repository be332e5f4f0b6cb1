"""
Coarse-level constructions for the two-grid solver.

Files named *_coarsening.py are imported at import time; every BaseCoarsening
subclass defined there registers itself under its ``kind``.
"""

import importlib
import os
from typing import Dict, Optional, Type, Union

from ..errors import ConfigError
from ..logs.core.logger_config import get_component_logger
from ..solvers.solver_config import Coarsening, SolverConfig
from .base_coarsening import BaseCoarsening, CoarseLevel

logger = get_component_logger("helmgrid.solvers.coarsening")


def discover_coarsenings() -> Dict[str, Type[BaseCoarsening]]:
    package_dir = os.path.dirname(__file__)
    for filename in sorted(os.listdir(package_dir)):
        if filename.endswith("_coarsening.py") and not filename.startswith("base_"):
            importlib.import_module(f".{filename[:-3]}", package=__name__)
    logger.debug("Discovered coarsenings: %s", ", ".join(sorted(BaseCoarsening.registry)))
    return dict(BaseCoarsening.registry)


AVAILABLE_COARSENINGS = discover_coarsenings()


def create_coarsening(kind: Union[Coarsening, str], config: SolverConfig) -> Optional[BaseCoarsening]:
    """Instance for ``kind``; None when coarse correction is switched off."""
    try:
        kind = Coarsening(kind).value
    except ValueError:
        raise ConfigError(f"unknown coarsening '{kind}'",
                          [f"coarsening: expected one of {[c.value for c in Coarsening]}"]) from None
    if kind == Coarsening.NONE.value:
        return None
    if kind not in AVAILABLE_COARSENINGS:
        raise ConfigError(f"no coarsening registered for '{kind}'",
                          [f"coarsening: available are {sorted(AVAILABLE_COARSENINGS)}"])
    return AVAILABLE_COARSENINGS[kind](config)


__all__ = ["BaseCoarsening", "CoarseLevel", "AVAILABLE_COARSENINGS", "create_coarsening", "discover_coarsenings"]
