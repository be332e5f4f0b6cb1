import numpy as np
import pytest

from helmgrid_core.discretization.fespace import build_space
from helmgrid_core.discretization.mesh import (BoundaryTag, CoefficientField, ElementKind, Side,
                                               build_rectangle_mesh, build_unit_square_mesh, tag_boundary)
from helmgrid_core.solvers.problem import build_problem

from .test_config import TestConfiguration


def tag_all(mesh, tag):
    return tag_boundary(mesh, {side: tag for side in Side})


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def square_mesh():
    """4 x 4 unit square, absorbing everywhere."""
    return tag_all(build_unit_square_mesh(4), BoundaryTag.ABSORBING)


@pytest.fixture
def neumann_patch():
    """5 x 5 patch with h = 1 and Neumann sides (no boundary terms)."""
    return tag_all(build_rectangle_mesh(5, 5, 1.0), BoundaryTag.NEUMANN)


@pytest.fixture(params=[ElementKind.SQUARE, ElementKind.TRIANGLE], ids=["square", "triangle"])
def element_kind(request):
    return request.param


@pytest.fixture
def small_problem():
    return build_problem(TestConfiguration.SMALL_ORDER, TestConfiguration.SMALL_PPW,
                         TestConfiguration.SMALL_WAVELENGTHS)


@pytest.fixture
def p4_space(square_mesh):
    return build_space(square_mesh, 4)


@pytest.fixture
def constant_coeffs(square_mesh):
    return CoefficientField.constant(square_mesh, 2.0 * np.pi)
