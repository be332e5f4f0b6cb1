"""
Hierarchical reference bases and quadrature on the unit lattice cell.

Squares use tensor products of the 1-D functions

    psi_0 = 1 - s,  psi_1 = s,  psi_n = L_n(2s - 1)  (n >= 2)

with L_n = (P_n - P_{n-2}) / (2n - 1) the integrated Legendre polynomials.
Triangles (the unit square split along its lower-left/upper-right diagonal)
use barycentric vertex functions, scaled integrated Legendre edge functions
and lambda_0 lambda_1 lambda_2 P_a(lambda_1 - lambda_0) P_b(2 lambda_2 - 1)
interior bubbles.

Every local function is keyed by the lattice offset (di, dj) of the point
that owns it and by a slot descriptor. Descriptors do not depend on the
order, which makes the order-q space an index subset of the order-p space.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Tuple

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.special import roots_jacobi, roots_legendre

from ..errors import SpaceError

MAX_ORDER = 8

Descriptor = Tuple


def integrated_legendre_monomials(n: int) -> np.ndarray:
    """Monomial coefficients (ascending) of L_n(x) = (P_n(x) - P_{n-2}(x)) / (2n - 1)."""
    if n < 2:
        raise SpaceError(f"integrated Legendre polynomials start at n=2, got {n}")
    coef = np.zeros(n + 1)
    coef[n] = 1.0
    coef[n - 2] = -1.0
    return npleg.leg2poly(coef) / (2 * n - 1)


def legendre_with_derivative(n: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    coef = np.zeros(n + 1)
    coef[n] = 1.0
    return npleg.legval(x, coef), npleg.legval(x, npleg.legder(coef))


def edge_functions(p: int, s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Values and s-derivatives of [psi_0, psi_1, psi_2, ..., psi_p] at s in [0, 1]."""
    s = np.asarray(s, dtype=float)
    x = 2.0 * s - 1.0
    values = np.empty(s.shape + (p + 1,))
    derivs = np.empty(s.shape + (p + 1,))
    values[..., 0] = 1.0 - s
    derivs[..., 0] = -1.0
    values[..., 1] = s
    derivs[..., 1] = 1.0
    for n in range(2, p + 1):
        pn, _ = legendre_with_derivative(n, x)
        pn2, _ = legendre_with_derivative(n - 2, x)
        pn1, _ = legendre_with_derivative(n - 1, x)
        values[..., n] = (pn - pn2) / (2 * n - 1)
        derivs[..., n] = 2.0 * pn1
    return values, derivs


def scaled_edge_function(n: int, x: np.ndarray, t: np.ndarray):
    """t^n L_n(x/t) as a homogeneous polynomial; returns value and partials in x and t."""
    coef = integrated_legendre_monomials(n)
    value = np.zeros_like(x)
    d_x = np.zeros_like(x)
    d_t = np.zeros_like(x)
    for m, c in enumerate(coef):
        if c == 0.0:
            continue
        value += c * x ** m * t ** (n - m)
        if m >= 1:
            d_x += c * m * x ** (m - 1) * t ** (n - m)
        if n - m >= 1:
            d_t += c * (n - m) * x ** m * t ** (n - m - 1)
    return value, d_x, d_t


def triangle_bubble_pairs(p: int) -> List[Tuple[int, int]]:
    """(a, b) indices of the triangle interior functions, ordered by total degree."""
    return [(a, d - a) for d in range(max(p - 2, 0)) for a in range(d, -1, -1)]


def slot_layout(p: int, kind: str) -> List[Descriptor]:
    """Slot descriptors owned by one lattice point (its unit cell), in numbering order."""
    layout: List[Descriptor] = [("v",)]
    layout += [("eh", n) for n in range(2, p + 1)]
    layout += [("ev", n) for n in range(2, p + 1)]
    if kind == "triangle":
        layout += [("ed", n) for n in range(2, p + 1)]
        layout += [("tl",) + ab for ab in triangle_bubble_pairs(p)]
        layout += [("tu",) + ab for ab in triangle_bubble_pairs(p)]
    else:
        layout += [("c", a, b) for a in range(2, p + 1) for b in range(2, p + 1)]
    return layout


def descriptor_order(desc: Descriptor) -> int:
    """Smallest order whose space contains the function described by ``desc``."""
    tag = desc[0]
    if tag == "v":
        return 1
    if tag in ("eh", "ev", "ed"):
        return desc[1]
    if tag == "c":
        return max(desc[1], desc[2])
    return 3 + desc[1] + desc[2]


def descriptor_level(desc: Descriptor) -> int:
    """Hierarchy level: 0 vertex, 1 edge, 2 interior."""
    tag = desc[0]
    if tag == "v":
        return 0
    if tag in ("eh", "ev", "ed"):
        return 1
    return 2


# ----------------------------------------------------------------------------
# Quadrature
# ----------------------------------------------------------------------------

def gauss_legendre_unit(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """n-point Gauss-Legendre rule on [0, 1]."""
    x, w = roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


def square_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    s, w = gauss_legendre_unit(n)
    xi, eta = np.meshgrid(s, s, indexing="ij")
    return np.column_stack([xi.ravel(), eta.ravel()]), np.outer(w, w).ravel()


def collapsed_triangle_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rule on {x, y >= 0, x + y <= 1}, exact for total degree 2n - 1.

    Duffy collapse x = u (1 - v), y = v: Gauss-Legendre in u, and
    Gauss-Jacobi with weight (1 - v) in v so the Jacobian is integrated exactly.
    """
    u, wu = gauss_legendre_unit(n)
    t, wt = roots_jacobi(n, 1.0, 0.0)
    v = 0.5 * (t + 1.0)
    wv = 0.25 * wt
    uu, vv = np.meshgrid(u, v, indexing="ij")
    x = uu * (1.0 - vv)
    return np.column_stack([x.ravel(), vv.ravel()]), np.outer(wu, wv).ravel()


# ----------------------------------------------------------------------------
# Reference elements
# ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ReferenceElement:
    """One element shape of the unit cell with its local functions and exact matrices."""
    name: str
    p: int
    keys: Tuple[Tuple[int, int, Descriptor], ...]
    evaluator: Callable
    points: np.ndarray
    weights: np.ndarray
    stiffness: np.ndarray
    mass: np.ndarray

    @property
    def n_local(self) -> int:
        return len(self.keys)

    @property
    def descriptors(self) -> List[Descriptor]:
        return [key[2] for key in self.keys]

    def evaluate(self, xi, eta):
        """Values (npts, n_local) and gradients (npts, n_local, 2) in unit-cell coordinates."""
        return self.evaluator(np.atleast_1d(np.asarray(xi, float)), np.atleast_1d(np.asarray(eta, float)))

    def contains(self, xi, eta, tol: float = 1e-12) -> np.ndarray:
        xi = np.asarray(xi, float)
        eta = np.asarray(eta, float)
        inside = (xi >= -tol) & (xi <= 1 + tol) & (eta >= -tol) & (eta <= 1 + tol)
        if self.name == "lower":
            inside &= eta <= xi + tol
        elif self.name == "upper":
            inside &= eta >= xi - tol
        return inside


def _square_functions(p: int):
    """Local functions of the square as (key, ix, iy) into the 1-D tables."""
    funcs = [((0, 0, ("v",)), 0, 0), ((1, 0, ("v",)), 1, 0),
             ((1, 1, ("v",)), 1, 1), ((0, 1, ("v",)), 0, 1)]
    for n in range(2, p + 1):
        funcs.append(((0, 0, ("eh", n)), n, 0))
        funcs.append(((1, 0, ("ev", n)), 1, n))
        funcs.append(((0, 1, ("eh", n)), n, 1))
        funcs.append(((0, 0, ("ev", n)), 0, n))
    for a in range(2, p + 1):
        for b in range(2, p + 1):
            funcs.append(((0, 0, ("c", a, b)), a, b))
    return funcs


def _square_element(p: int) -> ReferenceElement:
    funcs = _square_functions(p)
    keys = tuple(f[0] for f in funcs)
    ix = np.array([f[1] for f in funcs])
    iy = np.array([f[2] for f in funcs])

    def evaluator(xi, eta):
        vx, dx = edge_functions(p, xi)
        vy, dy = edge_functions(p, eta)
        values = vx[:, ix] * vy[:, iy]
        grads = np.stack([dx[:, ix] * vy[:, iy], vx[:, ix] * dy[:, iy]], axis=-1)
        return values, grads

    points, weights = square_rule(p + 1)
    return _finish("square", p, keys, evaluator, points, weights)


# barycentric coordinates (lambda_0, lambda_1, lambda_2) as affine maps of (xi, eta)
_TRIANGLES = {
    "lower": {
        "affine": (np.array([1.0, 0.0, 0.0]), np.array([[-1.0, 0.0], [1.0, -1.0], [0.0, 1.0]])),
        "vertices": [(0, 0), (1, 0), (1, 1)],
        # (start, end, owner offset, descriptor tag)
        "edges": [(0, 1, (0, 0), "eh"), (1, 2, (1, 0), "ev"), (0, 2, (0, 0), "ed")],
        "bubble": "tl",
        "to_cell": lambda x, y: (x + y, y),
    },
    "upper": {
        "affine": (np.array([1.0, 0.0, 0.0]), np.array([[0.0, -1.0], [1.0, 0.0], [-1.0, 1.0]])),
        "vertices": [(0, 0), (1, 1), (0, 1)],
        "edges": [(0, 1, (0, 0), "ed"), (2, 1, (0, 1), "eh"), (0, 2, (0, 0), "ev")],
        "bubble": "tu",
        "to_cell": lambda x, y: (x, x + y),
    },
}


def _triangle_element(p: int, name: str) -> ReferenceElement:
    layout = _TRIANGLES[name]
    const, lin = layout["affine"]
    keys = [(di, dj, ("v",)) for di, dj in layout["vertices"]]
    edge_funcs = []
    for a, b, (di, dj), tag in layout["edges"]:
        for n in range(2, p + 1):
            keys.append((di, dj, (tag, n)))
            edge_funcs.append((a, b, n))
    pairs = triangle_bubble_pairs(p)
    keys += [(0, 0, (layout["bubble"], a, b)) for a, b in pairs]

    def evaluator(xi, eta):
        lam = const[None, :] + xi[:, None] * lin[None, :, 0] + eta[:, None] * lin[None, :, 1]
        glam = lin
        npts = xi.shape[0]
        values = np.empty((npts, len(keys)))
        grads = np.empty((npts, len(keys), 2))
        for l in range(3):
            values[:, l] = lam[:, l]
            grads[:, l, :] = glam[l]
        col = 3
        for a, b, n in edge_funcs:
            x = lam[:, b] - lam[:, a]
            t = lam[:, a] + lam[:, b]
            val, d_x, d_t = scaled_edge_function(n, x, t)
            values[:, col] = val
            grads[:, col, :] = d_x[:, None] * (glam[b] - glam[a]) + d_t[:, None] * (glam[a] + glam[b])
            col += 1
        l0, l1, l2 = lam[:, 0], lam[:, 1], lam[:, 2]
        bub = l0 * l1 * l2
        gbub = (l1 * l2)[:, None] * glam[0] + (l0 * l2)[:, None] * glam[1] + (l0 * l1)[:, None] * glam[2]
        for a, b in pairs:
            pa, dpa = legendre_with_derivative(a, l1 - l0)
            pb, dpb = legendre_with_derivative(b, 2.0 * l2 - 1.0)
            values[:, col] = bub * pa * pb
            grads[:, col, :] = (gbub * (pa * pb)[:, None]
                                + (bub * dpa * pb)[:, None] * (glam[1] - glam[0])
                                + (bub * pa * dpb)[:, None] * (2.0 * glam[2]))
            col += 1
        return values, grads

    ref_points, weights = collapsed_triangle_rule(p + 1)
    xi, eta = layout["to_cell"](ref_points[:, 0], ref_points[:, 1])
    return _finish(name, p, tuple(keys), evaluator, np.column_stack([xi, eta]), weights)


def _finish(name, p, keys, evaluator, points, weights) -> ReferenceElement:
    values, grads = evaluator(points[:, 0], points[:, 1])
    stiffness = np.einsum("q,qid,qjd->ij", weights, grads, grads)
    mass = np.einsum("q,qi,qj->ij", weights, values, values)
    return ReferenceElement(name=name, p=p, keys=keys, evaluator=evaluator, points=points,
                            weights=weights, stiffness=stiffness, mass=mass)


@lru_cache(maxsize=None)
def reference_elements(p: int, kind: str) -> Tuple[ReferenceElement, ...]:
    """Reference elements covering the unit cell: one square, or the lower and upper triangle."""
    if not 1 <= p <= MAX_ORDER:
        raise SpaceError(f"order must lie in [1, {MAX_ORDER}], got {p}")
    if kind == "square":
        return (_square_element(p),)
    if kind == "triangle":
        return (_triangle_element(p, "lower"), _triangle_element(p, "upper"))
    raise SpaceError(f"unknown element kind '{kind}'")


@lru_cache(maxsize=None)
def edge_mass_matrix(p: int) -> np.ndarray:
    """1-D mass matrix of [psi_0, psi_1, psi_2..psi_p] on the unit interval."""
    s, w = gauss_legendre_unit(p + 1)
    values, _ = edge_functions(p, s)
    return np.einsum("q,qi,qj->ij", w, values, values)
