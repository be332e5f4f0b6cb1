"""
Test configuration for the HelmGrid test suite: tolerances and the problem
sizes shared by several test modules.
"""


class TestConfiguration:
    """Configuration settings for the test suite"""

    __test__ = False

    # Structural tolerances
    FIXED_POINT_TOL = 1e-12
    LINEARITY_TOL = 1e-12
    REPRODUCTION_TOL = 1e-10
    BLOCH_TOL = 1e-10
    STENCIL_TOL = 1e-14

    # Small problems that run in well under a second
    SMALL_ORDER = 4
    SMALL_PPW = 10.0
    SMALL_WAVELENGTHS = 2.0

    # Acceptance runs (pytest -m slow)
    ACCEPTANCE_ORDER = 4
    ACCEPTANCE_PPW = 10.0
    ACCEPTANCE_WAVELENGTHS = 20.0
    ACCEPTANCE_SIZES = [10.0, 20.0, 40.0]
    TABLE1_ITERATION_RANGE = (4, 10)
    LFA_CONSISTENCY_TOL = 0.15

    # 1-D toy sweep
    TOY_PPW = [8.0, 10.0, 12.0, 16.0, 20.0]
