"""
Command registry for the helmgrid CLI.

Engine methods are marked with @expose_command; discover_commands() collects
them from an engine instance so main.py can dispatch by name and print the
CSV schema of every command in --help.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from ..logs.core.logger_config import get_component_logger


@dataclass
class CommandMetadata:
    """What a command does and the columns of the CSV it writes."""
    name: str
    description: str
    columns: List[str]
    examples: List[str] = field(default_factory=list)
    notes: str = ""

    def schema(self) -> str:
        return ",".join(self.columns)


class CommandRegistry:
    """Maps command names to bound engine methods and their metadata."""

    def __init__(self):
        self.commands: Dict[str, Dict] = {}
        self.logger = get_component_logger('helmgrid.commands')

    def register_command(self, method: Callable, metadata: CommandMetadata):
        self.commands[metadata.name] = {"method": method, "metadata": metadata}
        self.logger.debug(f"Registered command: {metadata.name}")

    def get_metadata(self, name: Optional[str] = None) -> Dict[str, CommandMetadata]:
        if name is not None:
            return {name: self.commands[name]["metadata"]} if name in self.commands else {}
        return {key: entry["metadata"] for key, entry in self.commands.items()}

    def get_command(self, name: str) -> Callable:
        if name not in self.commands:
            raise KeyError(f"unknown command '{name}', available: {', '.join(self.names())}")
        return self.commands[name]["method"]

    def names(self) -> List[str]:
        return list(self.commands)


def format_help(metadatas) -> str:
    """Epilog for argparse: one block per command with its CSV header."""
    lines = ["commands and CSV schemas:"]
    for metadata in metadatas:
        lines.append(f"  {metadata.name}: {metadata.description}")
        lines.append(f"    columns: {metadata.schema()}")
        if metadata.notes:
            lines.append(f"    {metadata.notes}")
        for example in metadata.examples:
            lines.append(f"    e.g. {example}")
    return "\n".join(lines)


command_registry = CommandRegistry()


def expose_command(name: str, description: str, columns: List[str], examples: Optional[List[str]] = None,
                   notes: str = ""):
    """
    Mark an engine method as a CLI command.

    Example:
        @expose_command(
            name="lfa1d",
            description="1-D toy two-grid rate and dispersion ratio",
            columns=["ppw", "rho", "R"],
            examples=["helmgrid lfa1d --out lfa1d.csv"]
        )
    """
    def decorator(method):
        method._command_metadata = CommandMetadata(name=name, description=description, columns=list(columns),
                                                   examples=examples or [], notes=notes)
        method._is_exposed_command = True
        return method
    return decorator


def discover_commands(engine, registry: CommandRegistry = command_registry) -> List[CommandMetadata]:
    """Register every exposed method of ``engine``, in definition order."""
    discovered = []
    for attr_name in type(engine).__dict__:
        attr = getattr(engine, attr_name, None)
        if callable(attr) and getattr(attr, '_is_exposed_command', False):
            registry.register_command(attr, attr._command_metadata)
            discovered.append(attr._command_metadata)
    registry.logger.debug(f"Discovered {len(discovered)} commands on {type(engine).__name__}")
    return discovered


def collect_metadata(engine_cls) -> List[CommandMetadata]:
    """Metadata of the exposed methods of a class, without registering anything."""
    return [attr._command_metadata for attr in engine_cls.__dict__.values()
            if getattr(attr, '_is_exposed_command', False)]
