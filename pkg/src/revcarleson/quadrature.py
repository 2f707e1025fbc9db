"""Quadrature against the normalized surface measure sigma on S^{2d-1} and
against normalized volume on Carleson windows via polar coordinates.

Schemes: d=1 uniform angles (trapezoid, spectrally accurate), d=2 a
torus-product rule in Hopf coordinates, d>=3 seeded Monte Carlo.  Volume is
normalized so that the full ball has measure one, i.e. dnu = 2d r^(2d-1) dr dsigma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import CarlesonWindow

__all__ = ["SphereGrid", "RadialRule", "sphere_grid", "radial_rule",
           "integrate_sphere", "integrate_window", "refine"]


@dataclass(frozen=True)
class SphereGrid:
    """Nodes and weights integrating the normalized measure on S^{2d-1}."""

    d: int
    nodes: np.ndarray          # (n, d) complex, unit rows
    weights: np.ndarray        # (n,), sums to 1
    scheme: str                # "uniform" | "torus" | "monte-carlo"
    resolution: int
    seed: int | None = None

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")

    def __len__(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class RadialRule:
    """Nodes r_j in (0, 1) with weights carrying the 2d r^(2d-1) Jacobian."""

    d: int
    nodes: np.ndarray
    weights: np.ndarray        # include the polar Jacobian and normalization
    depth: float               # rule spans [1-depth, 1)
    resolution: int

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("radial nodes must be strictly increasing")


def _uniform_circle(n: int) -> tuple[np.ndarray, np.ndarray]:
    theta = 2.0 * math.pi * np.arange(n) / n
    nodes = np.exp(1j * theta)[:, None]
    return nodes, np.full(n, 1.0 / n)


def _torus_product(n: int) -> tuple[np.ndarray, np.ndarray]:
    # Hopf coordinates zeta = (e^{i phi1} cos th, e^{i phi2} sin th);
    # with u = sin^2 th the normalized measure is du dphi1 dphi2 / (2 pi)^2.
    x, wu = np.polynomial.legendre.leggauss(n)
    u = 0.5 * (x + 1.0)
    wu = 0.5 * wu
    phi = np.exp(2j * math.pi * np.arange(n) / n)
    c = np.sqrt(1.0 - u)
    s = np.sqrt(u)
    U, P1, P2 = np.meshgrid(np.arange(n), np.arange(n), np.arange(n),
                            indexing="ij")
    nodes = np.empty((n * n * n, 2), dtype=complex)
    nodes[:, 0] = (c[U] * phi[P1]).ravel()
    nodes[:, 1] = (s[U] * phi[P2]).ravel()
    weights = np.broadcast_to(wu[:, None, None] / (n * n), (n, n, n)).ravel()
    return nodes, weights.copy()


def sphere_grid(d: int, resolution: int, scheme: str = "auto",
                seed: int = 0) -> SphereGrid:
    """Build a quadrature grid on S^{2d-1}.

    resolution means: number of angles (d=1), points per torus axis (d=2),
    total sample count (d>=3 Monte Carlo).
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if resolution < 4:
        raise ValueError("resolution must be at least 4")
    if scheme == "auto":
        scheme = {1: "uniform", 2: "torus"}.get(d, "monte-carlo")
    if scheme == "uniform":
        if d != 1:
            raise ValueError("uniform-angle scheme requires d = 1")
        nodes, weights = _uniform_circle(resolution)
        return SphereGrid(d, nodes, weights, "uniform", resolution)
    if scheme == "torus":
        if d != 2:
            raise ValueError("torus-product scheme requires d = 2")
        nodes, weights = _torus_product(resolution)
        return SphereGrid(d, nodes, weights, "torus", resolution)
    if scheme == "monte-carlo":
        rng = np.random.default_rng(seed)
        z = rng.standard_normal((resolution, d)) + 1j * rng.standard_normal((resolution, d))
        nodes = z / np.linalg.norm(z, axis=1, keepdims=True)
        weights = np.full(resolution, 1.0 / resolution)
        return SphereGrid(d, nodes, weights, "monte-carlo", resolution, seed)
    raise ValueError(f"unknown scheme {scheme!r}")


def radial_rule(d: int, resolution: int, depth: float = 1.0) -> RadialRule:
    """Gauss-Legendre rule on [1-depth, 1) with the polar Jacobian folded in."""
    if not 0.0 < depth <= 1.0:
        raise ValueError("depth must lie in (0, 1]")
    x, w = np.polynomial.legendre.leggauss(resolution)
    lo, hi = 1.0 - depth, 1.0 - 1e-14
    r = 0.5 * (hi - lo) * (x + 1.0) + lo
    wr = 0.5 * (hi - lo) * w * 2.0 * d * r ** (2 * d - 1)
    return RadialRule(d, r, wr, depth, resolution)


def integrate_sphere(f, grid: SphereGrid) -> complex:
    """Sum_i w_i f(node_i); f maps an (n, d) complex array to (n,) values."""
    vals = np.asarray(f(grid.nodes))
    bad = ~np.isfinite(vals)
    if bad.any():
        i = int(np.argmax(bad))
        raise ArithmeticError(
            f"integrand not finite at node {i}: {grid.nodes[i]}")
    return complex(np.sum(grid.weights * vals))


def integrate_window(f, S: CarlesonWindow, grid: SphereGrid,
                     radial: RadialRule) -> complex:
    """Polar-coordinate integral of f over the window S against volume.

    Nodes are r_j * zeta_i for sphere nodes zeta_i inside the cap of S; the
    boundary sphere |z| = 1 never carries volume nodes.
    """
    if radial.depth > S.depth + 1e-12:
        raise ValueError("radial rule exceeds the window depth")
    mask = S.ball.contains_coords(grid.nodes)
    if not mask.any():
        return 0.0 + 0.0j
    zeta = grid.nodes[mask]
    w_ang = grid.weights[mask]
    total = 0.0 + 0.0j
    for r, wr in zip(radial.nodes, radial.weights):
        vals = np.asarray(f(r * zeta))
        bad = ~np.isfinite(vals)
        if bad.any():
            i = int(np.argmax(bad))
            raise ArithmeticError(
                f"integrand not finite at radius {r}, node {zeta[i]}")
        total += wr * np.sum(w_ang * vals)
    return complex(total)


def refine(obj):
    """Double the resolution of a grid or radial rule, same scheme lineage."""
    if isinstance(obj, SphereGrid):
        return sphere_grid(obj.d, 2 * obj.resolution, obj.scheme,
                           seed=obj.seed if obj.seed is not None else 0)
    if isinstance(obj, RadialRule):
        return radial_rule(obj.d, 2 * obj.resolution, obj.depth)
    raise TypeError(f"cannot refine {type(obj).__name__}")
