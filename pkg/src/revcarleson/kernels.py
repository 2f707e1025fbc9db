"""Cauchy and Poisson-type kernels on the unit ball, kernel norms, normalized
kernels, the window-averaged balayage function, boundary H^p norms of
test functions, and radial-limit extrapolation.

A note on the kernel-norm closed form (1-|w|^2)^(-d/q): it is an exact
identity for the boundary L^p norm of the Cauchy kernel only at p = 2.  For
p != 2 it is a two-sided estimate; the deviation factor of the p-th power is
the Gauss hypergeometric value 2F1(d - pd/2, d - pd/2; d; |w|^2), identically
one exactly when pd/2 = d.  kernel_norm exposes both the closed form and the
quadrature value; normalization of kernels uses the true (quadrature) norm,
with the closed form as a fast path at p = 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import BallPoint, NonisotropicBall, SpherePoint
from .quadrature import RadialRule, SphereGrid, integrate_sphere, integrate_window

__all__ = ["Exponents", "TestFunction", "cauchy_kernel", "kernel_norm",
           "normalized_kernel", "poisson_kernel", "phi_h", "hp_norm",
           "boundary_radial_limit", "RadialLimit"]


@dataclass(frozen=True)
class Exponents:
    """Conjugate pair 1/p + 1/q = 1 with the ambient dimension."""

    p: float
    d: int
    q: float = field(init=False)

    def __post_init__(self):
        if not 1.0 < self.p < math.inf:
            raise ValueError("p must lie in (1, infinity)")
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        object.__setattr__(self, "q", self.p / (self.p - 1.0))


def _coords(z) -> np.ndarray:
    if isinstance(z, (BallPoint, SpherePoint)):
        return z.coords
    return np.asarray(z, dtype=complex).reshape(-1)


def cauchy_kernel(w, z) -> complex:
    """k_w(z) = (1 - <z, w>)^(-d); requires |w| < 1 so k_w is bounded."""
    wc, zc = _coords(w), _coords(z)
    if np.linalg.norm(wc) >= 1:
        raise ValueError("kernel pole w must be interior, |w| < 1")
    d = wc.size
    return complex((1.0 - np.sum(zc * np.conj(wc))) ** (-d))


def cauchy_kernel_at(w: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Vectorized k_w over an (n, d) stack of points."""
    d = np.asarray(w).size
    return (1.0 - pts @ np.conj(w)) ** (-d)


@dataclass(frozen=True)
class TestFunction:
    """Finite combination sum_j c_j k_{w_j} plus a polynomial part.

    Continuous on the closed ball by construction (all poles interior).
    kernel_terms: tuple of (coefficient, pole coords); poly_terms: tuple of
    (coefficient, multi-index) with z^alpha = prod z_k^alpha_k.
    """

    d: int
    kernel_terms: tuple = ()
    poly_terms: tuple = ()

    def __post_init__(self):
        for _, w in self.kernel_terms:
            if np.linalg.norm(w) >= 1:
                raise ValueError("kernel poles must be interior")

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=complex))
        out = np.zeros(len(pts), dtype=complex)
        for c, w in self.kernel_terms:
            out += c * cauchy_kernel_at(np.asarray(w), pts)
        for c, alpha in self.poly_terms:
            term = np.full(len(pts), complex(c))
            for k, a in enumerate(alpha):
                if a:
                    term = term * pts[:, k] ** a
            out += term
        return out

    def scaled(self, c: complex) -> "TestFunction":
        return TestFunction(
            self.d,
            tuple((c * cj, w) for cj, w in self.kernel_terms),
            tuple((c * cj, a) for cj, a in self.poly_terms))


def kernel_norm(w, exponents: Exponents, grid: SphereGrid | None = None) -> float:
    """H^p norm of the Cauchy kernel k_w.

    Without a grid, returns the closed form (1-|w|^2)^(-d/q) (exact at p = 2).
    With a grid, returns the boundary quadrature value (integral of |k_w|^p)^(1/p).
    """
    wc = _coords(w)
    a = np.linalg.norm(wc)
    if a >= 1:
        raise ValueError("kernel pole w must be interior, |w| < 1")
    if grid is None:
        return float((1.0 - a * a) ** (-exponents.d / exponents.q))
    p = exponents.p

    def f(pts):
        return np.abs(cauchy_kernel_at(wc, pts)) ** p

    return float(np.real(integrate_sphere(f, grid))) ** (1.0 / p)


def normalized_kernel(w, exponents: Exponents,
                      grid: SphereGrid | None = None) -> TestFunction:
    """K_w = k_w / ||k_w||_p with unit H^p norm.

    At p = 2 the closed form is the exact norm; otherwise a grid is required
    so the normalization is genuine.
    """
    if abs(exponents.p - 2.0) < 1e-12:
        nrm = kernel_norm(w, exponents)
    else:
        if grid is None:
            raise ValueError("p != 2 needs a quadrature grid for the norm")
        nrm = kernel_norm(w, exponents, grid)
    wc = _coords(w)
    return TestFunction(exponents.d, kernel_terms=((1.0 / nrm, wc),))


def poisson_kernel(w, xi, d: int | None = None) -> float:
    """(1 - |w|^2)^d / |1 - <w, xi>|^(2d), the invariant Poisson-type kernel."""
    wc, xc = _coords(w), _coords(xi)
    if np.linalg.norm(wc) >= 1:
        raise ValueError("Poisson kernel requires |w| < 1")
    d = wc.size if d is None else d
    a2 = float(np.abs(np.sum(wc * np.conj(wc))))
    return float((1.0 - a2) ** d / np.abs(1.0 - np.sum(wc * np.conj(xc))) ** (2 * d))


def poisson_kernel_at(w: np.ndarray, pts: np.ndarray) -> np.ndarray:
    d = np.asarray(w).size
    a2 = float(np.linalg.norm(w)) ** 2
    return (1.0 - a2) ** d / np.abs(1.0 - pts @ np.conj(w)) ** (2 * d)


def phi_h(z, Q: NonisotropicBall, h: float, exponents: Exponents,
          grid: SphereGrid, radial: RadialRule | None = None) -> float:
    """Window-averaged kernel mass
    (1/h) * integral over S_{Q,h} of (1-|w|^2)^(pd-d) / |1-<z,w>|^(pd) dnu(w).

    The value is reported under the unit-ball volume normalization; only its
    uniformity in h and its decay off Q are meaningful, not the constant.
    """
    from .geometry import CarlesonWindow
    from .quadrature import radial_rule
    if not 0.0 < h <= 1.0:
        raise ValueError("h must lie in (0, 1]")
    zc = _coords(z)
    p, d = exponents.p, exponents.d
    if radial is None or abs(radial.depth - h) > 1e-12:
        radial = radial_rule(d, 32 if radial is None else radial.resolution, h)
    S = CarlesonWindow(Q, h)

    def f(pts):
        r2 = np.sum(np.abs(pts) ** 2, axis=1)
        return ((1.0 - r2) ** (p * d - d)
                / np.abs(1.0 - pts @ np.conj(zc)) ** (p * d))

    return float(np.real(integrate_window(f, S, grid, radial))) / h


def hp_norm(f, exponents: Exponents, grid: SphereGrid) -> float:
    """Boundary L^p norm; equals the H^p norm for boundary-continuous f."""
    p = exponents.p

    def g(pts):
        return np.abs(f(pts)) ** p

    return float(np.real(integrate_sphere(g, grid))) ** (1.0 / p)


@dataclass(frozen=True)
class RadialLimit:
    value: complex | None
    diverged: bool


def boundary_radial_limit(f, zeta: SpherePoint, k_max: int = 40,
                          tol: float = 1e-7) -> RadialLimit:
    """Limit of f(r * zeta) along r_k = 1 - 2^(-k).

    Returns the extrapolated value once the tail is Cauchy within tol; a
    divergence flag (not an exception) otherwise.
    """
    zc = zeta.coords
    prev = None
    stable = 0
    for k in range(1, k_max + 1):
        r = 1.0 - 2.0 ** (-k)
        val = complex(np.asarray(f((r * zc)[None, :]))[0])
        if not np.isfinite(val.real) or not np.isfinite(val.imag):
            return RadialLimit(None, True)
        if prev is not None:
            scale = max(1.0, abs(val))
            if abs(val - prev) <= tol * scale:
                stable += 1
                if stable >= 2:
                    return RadialLimit(val, False)
            else:
                stable = 0
        prev = val
    return RadialLimit(None, True)
