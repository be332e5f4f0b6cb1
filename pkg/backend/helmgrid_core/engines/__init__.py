from .command_registry import (CommandMetadata, CommandRegistry, collect_metadata, command_registry,
                               discover_commands, expose_command, format_help)
from .experiment_engine import (EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_OK, CommandResult, ExperimentEngine,
                                extra_table_path)

__all__ = ['CommandMetadata', 'CommandRegistry', 'collect_metadata', 'command_registry', 'discover_commands',
           'expose_command', 'format_help', 'CommandResult', 'ExperimentEngine', 'extra_table_path', 'EXIT_OK',
           'EXIT_CONFIG', 'EXIT_NOT_CONVERGED']
