"""Run configuration: pydantic models and the JSON config manager."""

from .config_manager import ConfigManager
from .run_config import (COMMANDS, BenchConfig, DispersionConfig, Lfa1dConfig, Lfa2dConfig, RunConfig,
                         SolveConfig)

__all__ = ['ConfigManager', 'RunConfig', 'SolveConfig', 'Lfa1dConfig', 'Lfa2dConfig', 'DispersionConfig',
           'BenchConfig', 'COMMANDS']
