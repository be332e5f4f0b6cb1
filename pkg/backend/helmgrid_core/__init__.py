"""
HelmGrid core: high-order finite elements for the Helmholtz equation, a
two-grid solver with a dispersion-matched coarse level, and the Fourier and
dispersion analyses that predict its convergence.
"""

__version__ = "1.0.0"
