"""
HelmGrid error hierarchy.

Every failure raised by the library derives from HelmgridError so callers
(the CLI in particular) can catch once and map to an exit code.
"""

from typing import Optional


class HelmgridError(ValueError):
    """Base class for all library errors."""


class ConfigError(HelmgridError):
    """Invalid run configuration (CLI exit code 2)."""

    def __init__(self, message: str, errors: Optional[list] = None):
        super().__init__(message)
        self.errors = list(errors or [])


class MeshError(HelmgridError):
    """Invalid mesh construction, boundary tagging or coefficient field."""


class SpaceError(HelmgridError):
    """Invalid finite element order or basis construction failure."""


class StencilError(HelmgridError):
    """QSFEM stencil evaluated outside its validity window or degenerate."""


class SymbolError(HelmgridError):
    """Symbol computation failure: missing zero, resonance, broken translation invariance."""


class FactorizationError(HelmgridError):
    """Singular sparse or dense matrix."""

    def __init__(self, message: str, pivot: Optional[int] = None):
        if pivot is not None:
            message = f"{message} (zero pivot at index {pivot})"
        super().__init__(message)
        self.pivot = pivot
