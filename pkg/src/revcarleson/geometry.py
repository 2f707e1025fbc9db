"""Points, the nonisotropic quasi-metric on the unit sphere of C^d, its balls,
Carleson windows, cap surface measure, and greedy maximal packings.

Conventions: the inner product is <a, b> = sum_k a_k * conj(b_k).  A
nonisotropic ball is parameterized by delta acting on |1 - <center, xi>|
directly (not on its square root); the metric rho = |1 - <.,.>|^(1/2) is
exposed separately.  Dilation scales delta: r * Q(c, delta) = Q(c, r*delta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy import integrate

TOL = 1e-12

__all__ = [
    "BallPoint",
    "SpherePoint",
    "NonisotropicBall",
    "CarlesonWindow",
    "niso_distance",
    "ball_contains",
    "window_contains",
    "scale_ball",
    "sigma_of_ball",
    "greedy_packing",
    "sample_sphere",
    "sample_cap",
]


def _as_coords(coords) -> np.ndarray:
    arr = np.asarray(coords, dtype=complex).reshape(-1)
    if arr.size < 1:
        raise ValueError("need at least one coordinate")
    return arr


@dataclass(frozen=True)
class BallPoint:
    """A point of the closed unit ball of C^d."""

    coords: np.ndarray

    def __post_init__(self):
        arr = _as_coords(self.coords)
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)
        if self.norm > 1 + TOL:
            raise ValueError(f"point has norm {self.norm} > 1")

    @property
    def d(self) -> int:
        return self.coords.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    @property
    def is_interior(self) -> bool:
        return self.norm < 1 - TOL

    def direction(self) -> "SpherePoint":
        n = self.norm
        if n == 0.0:
            raise ValueError("radial projection undefined at the origin")
        return SpherePoint(self.coords / n)


@dataclass(frozen=True)
class SpherePoint:
    """A point of the unit sphere S^{2d-1} in C^d."""

    coords: np.ndarray

    def __post_init__(self):
        arr = _as_coords(self.coords)
        n = np.linalg.norm(arr)
        if abs(n - 1.0) > 1e-10:
            raise ValueError(f"not a unit vector (norm {n})")
        arr = arr / n
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @property
    def d(self) -> int:
        return self.coords.size

    def as_ball_point(self) -> BallPoint:
        return BallPoint(self.coords)


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    return complex(np.sum(np.asarray(a) * np.conj(np.asarray(b))))


def niso_gap(center: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """|1 - <center, pts_i>| for a stack of points, vectorized."""
    pts = np.atleast_2d(pts)
    return np.abs(1.0 - pts @ np.conj(np.asarray(center)))


@dataclass(frozen=True)
class NonisotropicBall:
    """Q(center, delta) = {xi on the sphere : |1 - <center, xi>| <= delta}."""

    center: SpherePoint
    delta: float

    def __post_init__(self):
        if not 0.0 < self.delta <= 2.0 + TOL:
            raise ValueError(f"delta must lie in (0, 2], got {self.delta}")

    @property
    def d(self) -> int:
        return self.center.d

    def contains_coords(self, pts: np.ndarray) -> np.ndarray:
        return niso_gap(self.center.coords, pts) <= self.delta + TOL


@dataclass(frozen=True)
class CarlesonWindow:
    """Radial shell of depth h over a spherical cap.

    closed_outer selects between |z| <= 1 (default) and the open variant
    |z| < 1 used in part of the theory.
    """

    ball: NonisotropicBall
    depth: float
    closed_outer: bool = True

    def __post_init__(self):
        if not 0.0 < self.depth <= 1.0 + TOL:
            raise ValueError(f"depth must lie in (0, 1], got {self.depth}")

    @property
    def d(self) -> int:
        return self.ball.d

    def contains_coords(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        r = np.linalg.norm(pts, axis=1)
        ok_outer = r <= 1 + TOL if self.closed_outer else r < 1 - TOL
        radial = (r >= 1 - self.depth - TOL) & ok_outer
        mask = radial & (r > 0)
        out = np.zeros(len(pts), dtype=bool)
        if mask.any():
            proj = pts[mask] / r[mask, None]
            out[mask] = self.ball.contains_coords(proj)
        if self.depth >= 1 - TOL:
            # origin belongs to the full-depth window by convention
            out |= radial & (r == 0)
        return out


def niso_distance(a: SpherePoint, b: SpherePoint) -> float:
    """The nonisotropic metric |1 - <a, b>|^(1/2); values lie in [0, sqrt(2)]."""
    if a.d != b.d:
        raise ValueError("dimension mismatch")
    return math.sqrt(abs(1.0 - inner(a.coords, b.coords)))


def ball_contains(Q: NonisotropicBall, xi: SpherePoint) -> bool:
    return bool(Q.contains_coords(xi.coords[None, :])[0])


def window_contains(S: CarlesonWindow, z: BallPoint) -> bool:
    """Membership in the shell; z = 0 is outside every window of depth < 1."""
    return bool(S.contains_coords(z.coords[None, :])[0])


def scale_ball(Q: NonisotropicBall, r: float) -> NonisotropicBall:
    """Dilation r*Q = Q(center, r*delta), radius clamped at 2 (full sphere)."""
    if r <= 0:
        raise ValueError("scale factor must be positive")
    return replace(Q, delta=min(r * Q.delta, 2.0))


def _inner_product_density(w2: float, d: int) -> float:
    # density of <zeta, e1> on the unit disk for zeta uniform on S^{2d-1}
    return (d - 1) / math.pi * (1.0 - w2) ** (d - 2)


@lru_cache(maxsize=4096)
def _sigma_cached(delta: float, d: int) -> float:
    if d == 1:
        return (2.0 / math.pi) * math.asin(min(delta, 2.0) / 2.0)
    if delta >= 2.0:
        return 1.0

    # integrate the density of w = <zeta, e1> over {|1 - w| <= delta, |w| <= 1}
    def ymax(x: float) -> float:
        return min(math.sqrt(max(0.0, 1 - x * x)),
                   math.sqrt(max(0.0, delta * delta - (1 - x) ** 2)))

    def integrand(y: float, x: float) -> float:
        return _inner_product_density(x * x + y * y, d)

    x_lo = max(-1.0, 1.0 - delta)
    val, _ = integrate.dblquad(integrand, x_lo, 1.0,
                               lambda x: 0.0, ymax, epsabs=1e-11, epsrel=1e-10)
    return 2.0 * val


def sigma_of_ball(delta: float, d: int) -> float:
    """Normalized surface measure of Q(center, delta); center-independent.

    d = 1 uses the closed-form arc length (2/pi) asin(delta/2); d >= 2
    integrates the inner-product density over a disk region numerically.
    """
    if not 0.0 < delta <= 2.0 + TOL:
        raise ValueError(f"delta must lie in (0, 2], got {delta}")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return _sigma_cached(round(min(delta, 2.0), 14), d)


def sample_sphere(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n points uniform on S^{2d-1}, as an (n, d) complex array."""
    # one row-contiguous draw so the first n points of a larger draw from the
    # same generator state coincide (nested refinement relies on this)
    g = rng.standard_normal((n, 2 * d))
    z = g[:, :d] + 1j * g[:, d:]
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def sample_cap(Q: NonisotropicBall, n: int, rng: np.random.Generator,
               max_tries: int = 400) -> np.ndarray:
    """n uniform points of the cap Q by rejection from the sphere."""
    d = Q.d
    out = []
    got = 0
    batch = max(4 * n, 4096)
    for _ in range(max_tries):
        pts = sample_sphere(d, batch, rng)
        pts = pts[Q.contains_coords(pts)]
        if len(pts):
            out.append(pts)
            got += len(pts)
        if got >= n:
            break
    else:
        raise RuntimeError(f"cap sampling failed for delta={Q.delta}")
    return np.concatenate(out)[:n]


def _cap_overlap(beta: complex, h: float, t_grid: np.ndarray) -> bool:
    # Exact overlap test for two caps of radius h at inner product beta = <b, a>:
    # after a unitary sending a to e1, membership of a common point reduces to
    # exists t in {|1 - t| <= h, |t| <= 1} with
    #   |1 - b1 * t| - s * sqrt(1 - |t|^2) <= h,   b1 = beta, s = sqrt(1 - |b1|^2).
    s = math.sqrt(max(0.0, 1.0 - abs(beta) ** 2))
    if s <= 1e-9:
        # both centers on the same complex line (always the case for d = 1):
        # arcs of half-angle 2 asin(h/2) overlap iff the angular separation
        # is at most twice that, and the closed caps touch at equality
        theta_h = 2.0 * math.asin(min(h / 2.0, 1.0))
        return abs(math.atan2(beta.imag, beta.real)) <= 2.0 * theta_h + TOL
    lhs = np.abs(1.0 - beta * t_grid)
    rhs = h + s * np.sqrt(np.clip(1.0 - np.abs(t_grid) ** 2, 0.0, None))
    if np.any(lhs <= rhs + TOL):
        return True
    # the grid can miss a marginal tangency; polish from the best grid point,
    # but only when the margin is below the grid's resolution error (the
    # objective is Lipschitz ~ 1 + s/sqrt(2h) on the grid scale h/48)
    gap = lhs - rhs
    margin = 0.5 * (h / 48.0) * (1.0 + s / math.sqrt(2.0 * h)) * 2.0 * math.pi
    if float(gap.min()) > margin:
        return False
    t0 = t_grid[int(np.argmin(gap))]
    r0 = abs(1.0 - t0)
    a0 = math.atan2((1.0 - t0).imag, (1.0 - t0).real)
    rad_w, ang_w = h / 48.0, 2.0 * math.pi / 48.0
    best = float(gap.min())
    for _ in range(6):            # zoom x4 per round: resolves ~1e-3 h / 48^?
        rr = np.clip(np.linspace(r0 - rad_w, r0 + rad_w, 33), 0.0, h)
        aa = np.linspace(a0 - ang_w, a0 + ang_w, 33)
        t = 1.0 - rr[:, None] * np.exp(1j * aa[None, :])
        ok = np.abs(t) <= 1.0
        f = np.where(
            ok,
            np.abs(1.0 - beta * t)
            - s * np.sqrt(np.clip(1.0 - np.abs(t) ** 2, 0.0, None)) - h,
            np.inf)
        i, j = np.unravel_index(int(np.argmin(f)), f.shape)
        best = min(best, float(f[i, j]))
        if best <= TOL:
            return True
        r0, a0 = float(rr[i]), float(aa[j])
        rad_w /= 4.0
        ang_w /= 4.0
    return bool(best <= TOL)


def _overlap_t_grid(h: float, n: int = 48) -> np.ndarray:
    r = np.linspace(0.0, h, n)
    th = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    t = 1.0 - (r[:, None] * np.exp(1j * th[None, :])).ravel()
    return t[np.abs(t) <= 1.0]


def _candidate_centers(Q: NonisotropicBall, h: float, seed: int) -> np.ndarray:
    """Quasi-uniform candidate grid on 2Q with nonisotropic spacing ~h/4."""
    d = Q.d
    c = Q.center.coords
    delta2 = min(2.0 * Q.delta, 2.0)
    if d == 1:
        theta0 = 2.0 * math.asin(min(delta2, 2.0) / 2.0)
        step = 2.0 * math.asin(min(h / 8.0, 1.0))
        k = max(int(math.ceil(theta0 / step)), 1)
        offs = np.arange(-k, k + 1) * step
        return (c[0] * np.exp(1j * offs))[:, None]
    # d >= 2: seeded quasi-uniform sample of 2Q, dense at scale h/4
    rng = np.random.default_rng(seed)
    n_cells = (delta2 / (h / 4.0)) ** d
    n = int(min(20000, max(2000, 8 * n_cells)))
    twoQ = NonisotropicBall(Q.center, delta2)
    return sample_cap(twoQ, n, rng)


@dataclass(frozen=True)
class PackingCertificate:
    """Grid-oracle evidence attached to a greedy packing."""

    disjoint: bool
    covered_fraction: float  # fraction of Q-grid points inside some 2Q_j
    grid_size: int


def greedy_packing(Q: NonisotropicBall, h: float, seed: int = 0,
                   certificate_grid: int = 0):
    """Maximal family of pairwise disjoint balls Q_j(center_j, h) inside 2Q.

    First-fit greedy over a quasi-uniform candidate grid, candidates ordered
    outward from the center of Q.  Rejection uses the exact cap-overlap test,
    so the family is maximal with respect to genuine disjointness.  With
    certificate_grid > 0, a PackingCertificate over that many uniform points
    of Q (doubled-ball coverage, pairwise disjointness) is attached.

    Returns (balls, certificate_or_None).
    """
    if h >= Q.delta:
        raise ValueError("packing radius h must be smaller than delta")
    if h <= 0:
        raise ValueError("packing radius h must be positive")
    cands = _candidate_centers(Q, h, seed)
    if len(cands) == 0:
        raise RuntimeError("empty candidate grid")
    order = np.argsort(niso_gap(Q.center.coords, cands))
    cands = cands[order]

    # conservative containment: rho(c, center) + sqrt(h) <= sqrt(2 delta)
    rho_c = np.sqrt(niso_gap(Q.center.coords, cands))
    budget = math.sqrt(min(2.0 * Q.delta, 2.0)) - math.sqrt(h)
    cands = cands[rho_c <= budget + TOL]

    t_grid = _overlap_t_grid(h)
    selected: list[np.ndarray] = []
    for cand in cands:
        ok = True
        for zj in selected:
            gap = abs(1.0 - np.sum(cand * np.conj(zj)))
            if gap > 4.0 * h:          # triangle inequality: surely disjoint
                continue
            if gap <= h:               # cand lies inside the other ball
                ok = False
                break
            if _cap_overlap(np.sum(cand * np.conj(zj)), h, t_grid):
                ok = False
                break
        if ok:
            selected.append(cand)
    if not selected:
        raise RuntimeError("greedy selection produced no balls")
    balls = [NonisotropicBall(SpherePoint(c), h) for c in selected]

    cert = None
    if certificate_grid > 0:
        rng = np.random.default_rng(seed + 1)
        grid = sample_cap(Q, certificate_grid, rng)
        centers = np.array(selected)
        gaps = np.abs(1.0 - grid @ np.conj(centers.T))
        member = gaps <= h + TOL
        disjoint = bool((member.sum(axis=1) <= 1).all())
        covered = float((gaps <= 2.0 * h + TOL).any(axis=1).mean())
        cert = PackingCertificate(disjoint, covered, certificate_grid)
    return balls, cert
