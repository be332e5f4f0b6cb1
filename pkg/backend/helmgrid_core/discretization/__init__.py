"""Structured meshes, hierarchical finite-element spaces and the QSFEM stencil."""

from .fespace import SUPPORTED_ORDERS, FeSpace, assemble_helmholtz, build_linear_space, build_space
from .mesh import (BoundaryTag, CoefficientField, ElementKind, Side, StructuredMesh, build_mesh,
                   build_rectangle_mesh, build_unit_square_mesh, tag_boundary)
from .qsfem import QsfemStencil, assemble_qsfem, build_stencil

__all__ = ['SUPPORTED_ORDERS', 'FeSpace', 'assemble_helmholtz', 'build_linear_space', 'build_space',
           'BoundaryTag', 'CoefficientField', 'ElementKind', 'Side', 'StructuredMesh', 'build_mesh',
           'build_rectangle_mesh', 'build_unit_square_mesh', 'tag_boundary', 'QsfemStencil', 'assemble_qsfem',
           'build_stencil']
