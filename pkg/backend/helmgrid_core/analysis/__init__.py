"""Fourier analysis (1-D toy and 2-D Bloch waves) and dispersion analysis."""
