"""
Fourier analysis of a 1-D finite-difference two-grid method for
-u'' - (k^2 + i eps) u = f on the lattice hZ, coarse lattice 2hZ.

Fine modes theta and theta + pi share one coarse mode; every operator acts on
the pair as a 2x2 symbol. The smoother inverts A_s = A - i alpha_s k^2 exactly.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import brentq, minimize_scalar

from ..errors import SymbolError
from ..logs.core.logger_config import get_component_logger

logger = get_component_logger(__name__)

THETA_POINTS = 1024
RESONANCE_TOL = 1e-14


class ToyConfig(BaseModel):
    """Parameters of the 1-D model problem; h follows from k and ppw."""

    model_config = ConfigDict(extra="forbid")

    half_width: int = Field(2, ge=1, le=2, description="stencil half-width M (1: 2nd order, 2: 4th order)")
    k: float = Field(2.0 * math.pi * 20, gt=0.0)
    ppw: float = Field(10.0, gt=2.0, description="fine points per wavelength")
    damping: float = Field(0.01, ge=0.0, description="D, damping per wavelength")
    alpha_s: float = Field(0.2, ge=0.0)
    nu1: int = Field(1, ge=0)
    nu2: int = Field(1, ge=0)

    @property
    def h(self) -> float:
        return 2.0 * math.pi / (self.k * self.ppw)

    @property
    def eps(self) -> float:
        return self.k ** 2 * self.damping / math.pi


@dataclass(frozen=True)
class ToyDispersion:
    zeta_f: float
    zeta_c: float
    delta: float
    R: float


def fd_symbol(theta, M: int, h: float, k: float, eps: float):
    """Symbol of the central (2M+1)-point -d^2/dx^2 minus (k^2 + i eps)."""
    theta = np.asarray(theta, dtype=float)
    if M == 1:
        laplace = 2.0 - 2.0 * np.cos(theta)
    elif M == 2:
        laplace = 2.5 - (8.0 / 3.0) * np.cos(theta) + (1.0 / 6.0) * np.cos(2.0 * theta)
    else:
        raise SymbolError(f"stencil half-width must be 1 or 2, got {M}")
    return laplace / h ** 2 - (k ** 2 + 1j * eps)


def transfer_symbols(theta) -> Tuple[np.ndarray, np.ndarray]:
    """(I_R, I_P): full weighting row [(1 + cos)/2, (1 - cos)/2] and its transpose."""
    c = np.cos(np.asarray(theta, dtype=float))
    restriction = np.stack([0.5 + 0.5 * c, 0.5 - 0.5 * c], axis=-1)[..., None, :]
    return restriction, np.swapaxes(restriction, -1, -2)


def smoother_symbol(theta, config: ToyConfig):
    a = fd_symbol(theta, config.half_width, config.h, config.k, config.eps)
    return 1.0 - a / (a - 1j * config.alpha_s * config.k ** 2)


def two_grid_symbol(theta, config: ToyConfig) -> np.ndarray:
    """M(theta) = S^nu2 K S^nu1 with K = I - I_P A_c^-1 I_R diag(A(theta), A(theta + pi))."""
    theta = np.asarray(theta, dtype=float)
    M, h, k, eps = config.half_width, config.h, config.k, config.eps
    pair = np.stack([theta, theta + math.pi], axis=-1)
    a = fd_symbol(pair, M, h, k, eps)
    a_c = fd_symbol(2.0 * theta, M, 2.0 * h, k, eps)
    if np.any(np.abs(a_c) < RESONANCE_TOL * k ** 2):
        raise SymbolError("coarse symbol vanishes: undamped coarse resonance")
    restriction, prolongation = transfer_symbols(theta)
    coarse = (prolongation @ restriction) / a_c[..., None, None]
    K = np.eye(2) - coarse * a[..., None, :]
    s = smoother_symbol(pair, config)
    return (s[..., :, None] ** config.nu2) * K * (s[..., None, :] ** config.nu1)


def spectral_radius_2x2(matrix: np.ndarray) -> np.ndarray:
    tr = matrix[..., 0, 0] + matrix[..., 1, 1]
    det = matrix[..., 0, 0] * matrix[..., 1, 1] - matrix[..., 0, 1] * matrix[..., 1, 0]
    root = np.sqrt(tr ** 2 / 4.0 - det + 0j)
    return np.maximum(np.abs(tr / 2.0 + root), np.abs(tr / 2.0 - root))


def asymptotic_rate(config: ToyConfig, n_theta: int = THETA_POINTS) -> float:
    """sup over theta in [-pi/2, pi/2) of rho(M(theta)), grid plus local refinement."""
    if n_theta < 64:
        raise SymbolError(f"need at least 64 theta samples, got {n_theta}")
    theta = -0.5 * math.pi + math.pi * np.arange(n_theta) / n_theta
    rho = spectral_radius_2x2(two_grid_symbol(theta, config))
    worst = int(np.argmax(rho))
    step = math.pi / n_theta
    refined = minimize_scalar(lambda t: -float(spectral_radius_2x2(two_grid_symbol(t, config))),
                              bounds=(theta[worst] - step, theta[worst] + step), method="bounded",
                              options={"xatol": 1e-12})
    value = max(float(rho[worst]), -float(refined.fun))
    logger.debug("1-D rate M=%d ppw=%g D=%g: rho=%.6f at theta=%.6f", config.half_width, config.ppw,
                 config.damping, value, theta[worst])
    return value


def _positive_root(func, label: str) -> float:
    lo, hi = 1e-12, math.pi
    if func(lo) * func(hi) > 0:
        raise SymbolError(f"no {label} zero in (0, pi): the wave is not resolved")
    return brentq(func, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def dispersion_zeros(config: ToyConfig) -> ToyDispersion:
    """Fine and coarse symbol zeros at eps = 0 on the fine normalized scale, delta and R."""
    M, h, k = config.half_width, config.h, config.k
    zeta_f = _positive_root(lambda t: fd_symbol(t, M, h, k, 0.0).real, "fine")
    zeta_c = 0.5 * _positive_root(lambda t: fd_symbol(t, M, 2.0 * h, k, 0.0).real, "coarse")
    delta = (zeta_c - zeta_f) / (k * h)
    R = 2.0 * math.pi * abs(delta) / config.damping if config.damping > 0 else math.inf
    return ToyDispersion(zeta_f=zeta_f, zeta_c=zeta_c, delta=delta, R=R)


def lemma_max(c: float, R: float) -> float:
    """max |1 - c (t - zeta_f - i e) / (t - zeta_c - i e)| over real t, with R = |zeta_f - zeta_c| / e."""
    if not 0.0 <= c <= 1.0 or R < 0:
        raise SymbolError(f"need c in [0, 1] and R >= 0, got c={c}, R={R}")
    return math.sqrt((1.0 - c) ** 2 + (c * R / 2.0) ** 2) + c * R / 2.0


def lemma_function(theta, c: float, zeta_f: float, zeta_c: float, eps_t: float):
    theta = np.asarray(theta, dtype=float)
    return 1.0 - c * (theta - zeta_f - 1j * eps_t) / (theta - zeta_c - 1j * eps_t)


def lemma_brute_force(c: float, zeta_f: float, zeta_c: float, eps_t: float, n: int = 200001) -> float:
    """Sampled max of |f|; t = zeta_c + eps_t tan(phi / 2) sweeps the whole image circle."""
    phi = np.linspace(-math.pi, math.pi, n + 2)[1:-1]
    theta = zeta_c + eps_t * np.tan(phi / 2.0)
    return float(np.max(np.abs(lemma_function(theta, c, zeta_f, zeta_c, eps_t))))


def transfer_factor(kh: float) -> float:
    """c = (1 + cos kh)^2 / 2."""
    return 0.5 * (1.0 + math.cos(kh)) ** 2


def sweep_ppw(config: ToyConfig, ppw_values) -> list:
    """Rows (ppw, rho, R, zeta_f, zeta_c, delta) for each ppw."""
    rows = []
    for ppw in ppw_values:
        cfg = config.model_copy(update={"ppw": float(ppw)})
        disp = dispersion_zeros(cfg)
        rows.append({"ppw": float(ppw), "rho": asymptotic_rate(cfg), "R": disp.R, "zeta_f": disp.zeta_f,
                     "zeta_c": disp.zeta_c, "delta": disp.delta})
    logger.info("1-D sweep M=%d over %d ppw values", config.half_width, len(rows))
    return rows
