"""Finite positive measures on the closed unit ball, represented by their
Lebesgue decomposition: interior atoms, an interior density against volume,
a boundary density against sigma, and finitely many boundary singular atoms.

Densities come from a small closed expression grammar so that measures are
serializable (YAML) and reproducible.  L^2-type integrals may legitimately be
infinite; infinity is produced deliberately (math.inf), never by overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import yaml

from .geometry import BallPoint, CarlesonWindow, NonisotropicBall, SpherePoint, TOL
from .quadrature import RadialRule, SphereGrid, integrate_window

__all__ = ["DensityExpr", "parse_density", "BallMeasure", "sigma_measure",
           "measure_of_ball", "measure_of_window", "integrate_measure",
           "radon_nikodym_profile", "load_measure", "dump_measure"]


# ---------------------------------------------------------------------------
# density expressions

class DensityExpr:
    """A nonnegative closed-form density on ball/sphere points.

    Grammar (nested dicts / numbers):
      number                               constant
      {"const": c}
      {"abs_z": null}                      Euclidean |z|
      {"re": k} / {"im": k}                Re/Im of coordinate k
      {"abs_inner": {"w": point}}          |<z, w0>|
      {"indicator": {"center": point, "delta": d}}   cap indicator (radial projection)
      {"sum": [...]}, {"prod": [...]}, {"pow": [expr, exponent]}
    """

    def __init__(self, spec):
        self.spec = spec
        self._check(spec)

    @staticmethod
    def _check(spec):
        if isinstance(spec, (int, float)):
            return
        if not isinstance(spec, dict) or len(spec) != 1:
            raise ValueError(f"malformed density node: {spec!r}")
        (op, arg), = spec.items()
        if op == "const":
            float(arg)
        elif op == "abs_z":
            pass
        elif op in ("re", "im"):
            int(arg)
        elif op == "abs_inner":
            _parse_point(arg["w"])
        elif op == "indicator":
            _parse_point(arg["center"])
            float(arg["delta"])
        elif op in ("sum", "prod"):
            for a in arg:
                DensityExpr._check(a)
        elif op == "pow":
            DensityExpr._check(arg[0])
            float(arg[1])
        else:
            raise ValueError(f"unknown density op {op!r}")

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=complex))
        return self._eval(self.spec, pts)

    @classmethod
    def _eval(cls, spec, pts: np.ndarray) -> np.ndarray:
        n = len(pts)
        if isinstance(spec, (int, float)):
            return np.full(n, float(spec))
        (op, arg), = spec.items()
        if op == "const":
            return np.full(n, float(arg))
        if op == "abs_z":
            return np.linalg.norm(pts, axis=1)
        if op == "re":
            return pts[:, int(arg)].real
        if op == "im":
            return pts[:, int(arg)].imag
        if op == "abs_inner":
            w0 = _parse_point(arg["w"])
            return np.abs(pts @ np.conj(w0))
        if op == "indicator":
            center = _parse_point(arg["center"])
            delta = float(arg["delta"])
            r = np.linalg.norm(pts, axis=1)
            out = np.zeros(n)
            ok = r > 0
            proj = pts[ok] / r[ok, None]
            out[ok] = (np.abs(1.0 - proj @ np.conj(center)) <= delta + TOL)
            return out
        if op == "sum":
            return np.sum([cls._eval(a, pts) for a in arg], axis=0)
        if op == "prod":
            return np.prod([cls._eval(a, pts) for a in arg], axis=0)
        if op == "pow":
            return cls._eval(arg[0], pts) ** float(arg[1])
        raise ValueError(f"unknown density op {op!r}")


def parse_density(spec) -> DensityExpr | None:
    return None if spec is None else DensityExpr(spec)


def _parse_point(obj) -> np.ndarray:
    """Point serialization: list of [re, im] pairs, one per coordinate."""
    arr = np.asarray(obj, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    return arr[:, 0] + 1j * arr[:, 1]


def _dump_point(coords: np.ndarray) -> list:
    return [[float(c.real), float(c.imag)] for c in np.asarray(coords)]


# ---------------------------------------------------------------------------
# the composite measure

@dataclass(frozen=True)
class BallMeasure:
    """mu = interior atoms + density * volume + g * sigma + boundary atoms."""

    d: int
    interior_atoms: tuple = ()              # ((BallPoint, mass), ...)
    interior_density: DensityExpr | None = None
    boundary_density: DensityExpr | None = None
    boundary_atoms: tuple = ()              # ((SpherePoint, mass), ...)

    def __post_init__(self):
        for pt, mass in self.interior_atoms:
            if mass <= 0:
                raise ValueError("atom masses must be positive")
            if not pt.is_interior:
                raise ValueError("interior atoms must satisfy |z| < 1")
        for pt, mass in self.boundary_atoms:
            if mass <= 0:
                raise ValueError("atom masses must be positive")

    def scaled(self, c: float) -> "BallMeasure":
        if c <= 0:
            raise ValueError("scaling must be positive")

        def s(dens):
            if dens is None:
                return None
            return DensityExpr({"prod": [{"const": c}, dens.spec]})

        return BallMeasure(
            self.d,
            tuple((p, c * m) for p, m in self.interior_atoms),
            s(self.interior_density),
            s(self.boundary_density),
            tuple((p, c * m) for p, m in self.boundary_atoms),
        )

    def boundary_density_values(self, grid: SphereGrid) -> np.ndarray:
        if self.boundary_density is None:
            return np.zeros(len(grid))
        vals = self.boundary_density(grid.nodes)
        if np.any(vals < -TOL):
            raise ValueError("boundary density is negative at a grid node")
        if not np.all(np.isfinite(vals)):
            raise ArithmeticError("boundary density not finite at a grid node")
        return np.clip(vals, 0.0, None)

    def total_mass(self, grid: SphereGrid, radial: RadialRule) -> float:
        return integrate_measure(self, lambda z: np.ones(len(z)), grid, radial)


def sigma_measure(d: int) -> BallMeasure:
    """The normalized surface measure itself (g identically 1)."""
    return BallMeasure(d, boundary_density=DensityExpr(1.0))


def measure_of_ball(mu: BallMeasure, Q: NonisotropicBall,
                    grid: SphereGrid) -> float:
    """mu(Q) for a cap Q on the sphere; only boundary parts contribute."""
    mask = Q.contains_coords(grid.nodes)
    g = mu.boundary_density_values(grid)
    total = float(np.sum(grid.weights[mask] * g[mask]))
    for pt, mass in mu.boundary_atoms:
        if Q.contains_coords(pt.coords[None, :])[0]:
            total += mass
    return total


def measure_of_window(mu: BallMeasure, S: CarlesonWindow, grid: SphereGrid,
                      radial: RadialRule) -> float:
    """mu(S) = interior density over S + interior atoms in S
    + (if the window is outer-closed) the boundary parts over its cap."""
    total = 0.0
    if mu.interior_density is not None:
        total += float(np.real(integrate_window(mu.interior_density, S, grid,
                                                _match_depth(radial, S))))
    for pt, mass in mu.interior_atoms:
        if S.contains_coords(pt.coords[None, :])[0]:
            total += mass
    if S.closed_outer:
        total += measure_of_ball(mu, S.ball, grid)
    return total


def _match_depth(radial: RadialRule, S: CarlesonWindow) -> RadialRule:
    from .quadrature import radial_rule
    if abs(radial.depth - S.depth) < 1e-12 and radial.d == S.d:
        return radial
    return radial_rule(S.d, radial.resolution, S.depth)


def integrate_measure(mu: BallMeasure, f, grid: SphereGrid,
                      radial: RadialRule,
                      boundary_f=None, atom_f=None) -> float:
    """integral of a nonnegative f against mu over the closed ball.

    f maps an (n, d) complex array of interior points to values; boundary_f
    (default f) is evaluated at sphere nodes for the density part; atom_f
    (default boundary_f) is evaluated at boundary singular atoms and may
    return math.inf when a radial limit diverges there.
    """
    boundary_f = boundary_f if boundary_f is not None else f
    atom_f = atom_f if atom_f is not None else boundary_f
    total = 0.0
    if mu.interior_density is not None:
        full = CarlesonWindow(NonisotropicBall(_pole(mu.d), 2.0), 1.0)

        def fg(z):
            return np.asarray(f(z)) * mu.interior_density(z)

        total += float(np.real(integrate_window(fg, full, grid,
                                                _match_depth(radial, full))))
    for pt, mass in mu.interior_atoms:
        v = float(np.real(f(pt.coords[None, :])[0]))
        if v < -1e-10:
            raise ValueError("integrand must be nonnegative")
        total += mass * v
    if mu.boundary_density is not None:
        g = mu.boundary_density_values(grid)
        vals = np.real(np.asarray(boundary_f(grid.nodes)))
        if np.any(vals < -1e-10):
            raise ValueError("integrand must be nonnegative")
        total += float(np.sum(grid.weights * g * vals))
    for pt, mass in mu.boundary_atoms:
        v = float(np.real(atom_f(pt.coords[None, :])[0]))
        if math.isinf(v):
            return math.inf
        total += mass * v
    return total


def _pole(d: int) -> SpherePoint:
    e1 = np.zeros(d, dtype=complex)
    e1[0] = 1.0
    return SpherePoint(e1)


@dataclass(frozen=True)
class RadonNikodymProfile:
    centers: tuple
    deltas: tuple
    ratios: np.ndarray         # (n_centers, n_deltas)


def radon_nikodym_profile(mu: BallMeasure, centers, deltas,
                          grid: SphereGrid) -> RadonNikodymProfile:
    """Ratios mu(Q(center, delta)) / sigma(Q(center, delta)) on a table.

    Numerator and denominator both use node-indicator sums on the same grid,
    so the ratio is consistent even where the grid's sigma estimate is crude.
    Cells whose grid estimate of sigma(Q) vanishes give nan.
    """
    deltas = tuple(deltas)
    if any(b <= 0 for b in deltas):
        raise ValueError("deltas must be positive")
    if any(b1 <= b2 for b1, b2 in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be strictly decreasing")
    out = np.full((len(centers), len(deltas)), np.nan)
    for i, c in enumerate(centers):
        for j, delta in enumerate(deltas):
            Q = NonisotropicBall(c, delta)
            mask = Q.contains_coords(grid.nodes)
            s = float(grid.weights[mask].sum())
            if s <= 0:
                continue
            out[i, j] = measure_of_ball(mu, Q, grid) / s
    return RadonNikodymProfile(tuple(centers), deltas, out)


# ---------------------------------------------------------------------------
# serialization

def measure_to_dict(mu: BallMeasure) -> dict:
    return {
        "dimension": mu.d,
        "interior_atoms": [
            {"point": _dump_point(p.coords), "mass": float(m)}
            for p, m in mu.interior_atoms],
        "interior_density": None if mu.interior_density is None
        else mu.interior_density.spec,
        "boundary_density": None if mu.boundary_density is None
        else mu.boundary_density.spec,
        "boundary_atoms": [
            {"point": _dump_point(p.coords), "mass": float(m)}
            for p, m in mu.boundary_atoms],
    }


def measure_from_dict(doc: dict) -> BallMeasure:
    d = int(doc["dimension"])
    for key in ("interior_atoms", "boundary_atoms"):
        for entry in doc.get(key) or []:
            if float(entry["mass"]) <= 0:
                raise ValueError(f"non-positive mass in {key}")
    interior = tuple(
        (BallPoint(_parse_point(e["point"])), float(e["mass"]))
        for e in doc.get("interior_atoms") or [])
    boundary = tuple(
        (SpherePoint(_parse_point(e["point"])), float(e["mass"]))
        for e in doc.get("boundary_atoms") or [])
    return BallMeasure(
        d, interior,
        parse_density(doc.get("interior_density")),
        parse_density(doc.get("boundary_density")),
        boundary)


def load_measure(path) -> BallMeasure:
    with open(path) as fh:
        return measure_from_dict(yaml.safe_load(fh))


def dump_measure(mu: BallMeasure, path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(measure_to_dict(mu), fh, sort_keys=True)
