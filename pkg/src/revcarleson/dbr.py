"""Symbols b: ball -> disk, de Branges-Rovnyak kernels, the kernel-based
necessary test for reverse Carleson measures of H(b), the pointwise necessary
condition and its 1/(1-|b|) integrability obstruction, inner-ness estimation,
and sampling-sequence refutation.

Verdict vocabulary is deliberately asymmetric: candidate measures are only
ever refuted or left open, never confirmed (the pointwise condition is
necessary, not sufficient).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import yaml

from .geometry import BallPoint, SpherePoint, sample_sphere
from .kernels import boundary_radial_limit, cauchy_kernel_at
from .measures import BallMeasure, integrate_measure
from .quadrature import RadialRule, SphereGrid, refine

__all__ = ["Symbol", "eval_symbol", "dbr_kernel", "dbr_kernel_diag",
           "kernel_test", "necessary_condition_constant",
           "one_minus_b_integral", "is_inner_estimate",
           "sampling_candidate_measure", "refute_sampling",
           "load_symbol", "dump_symbol", "EPS_INNER"]

EPS_INNER = 1e-6


@dataclass(frozen=True)
class Symbol:
    """A holomorphic b with sup |b| <= 1 in one of three closed forms.

    kind "constant":  data = c (complex, |c| < 1)
    kind "polynomial": data = tuple of (coeff, multi-index), any d
    kind "blaschke":  data = (zeros tuple, unimodular phase), d = 1 only;
                      the zero a = 0 contributes the factor z itself.
    """

    kind: str
    d: int
    data: object

    def __post_init__(self):
        if self.kind == "constant":
            if abs(complex(self.data)) >= 1:
                raise ValueError("constant symbol must satisfy |c| < 1")
        elif self.kind == "blaschke":
            if self.d != 1:
                raise ValueError("Blaschke symbols are d = 1 only")
            zeros, phase = self.data
            if any(abs(a) >= 1 for a in zeros):
                raise ValueError("Blaschke zeros must be interior")
            if abs(abs(complex(phase)) - 1.0) > 1e-10:
                raise ValueError("Blaschke phase must be unimodular")
        elif self.kind == "polynomial":
            sup = self.sup_modulus_estimate()
            if sup > 1 + 1e-10:
                raise ValueError(f"polynomial symbol has sup |b| ~ {sup} > 1")
        else:
            raise ValueError(f"unknown symbol kind {self.kind!r}")

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=complex))
        if self.kind == "constant":
            return np.full(len(pts), complex(self.data))
        if self.kind == "polynomial":
            out = np.zeros(len(pts), dtype=complex)
            for c, alpha in self.data:
                term = np.full(len(pts), complex(c))
                for k, a in enumerate(alpha):
                    if a:
                        term = term * pts[:, k] ** a
                out += term
            return out
        zeros, phase = self.data
        z = pts[:, 0]
        out = np.full(len(pts), complex(phase))
        for a in zeros:
            a = complex(a)
            if a == 0:
                out = out * z
            else:
                out = out * (abs(a) / a) * (a - z) / (1.0 - np.conj(a) * z)
        return out

    @property
    def boundary_modulus_closed_form(self) -> bool:
        return self.kind in ("constant", "blaschke")

    def boundary_modulus(self, nodes: np.ndarray) -> np.ndarray:
        if self.kind == "constant":
            return np.full(len(nodes), abs(complex(self.data)))
        if self.kind == "blaschke":
            return np.ones(len(nodes))
        return np.abs(self(nodes))

    def sup_modulus_estimate(self, n: int = 20000, seed: int = 7) -> float:
        """Numerical sup of |b| over a dense boundary sample (maximum
        principle: the sup over the closed ball is attained on the sphere)."""
        if self.kind == "constant":
            return abs(complex(self.data))
        if self.kind == "blaschke":
            return 1.0
        rng = np.random.default_rng(seed)
        pts = sample_sphere(self.d, n, rng)
        return float(np.abs(self(pts)).max())


def eval_symbol(b: Symbol, z) -> complex:
    """b(z); boundary points use the closed-form representation directly
    (all three representations extend continuously to the closed ball)."""
    zc = z.coords if isinstance(z, (BallPoint, SpherePoint)) else \
        np.asarray(z, dtype=complex).reshape(-1)
    return complex(b(zc[None, :])[0])


def mu_admissible_at_atoms(b: Symbol, mu: BallMeasure):
    """Radial-limit check of b at the boundary atoms of mu; returns the list
    of atoms where the limit diverges (empty means admissible)."""
    bad = []
    for pt, _ in mu.boundary_atoms:
        lim = boundary_radial_limit(b, pt)
        if lim.diverged:
            bad.append(pt)
    return bad


def dbr_kernel(b: Symbol, w, z) -> complex:
    """(1 - b(z) conj(b(w))) / (1 - <z, w>)^d; reduces to the Cauchy kernel
    for b identically zero."""
    wc = w.coords if isinstance(w, BallPoint) else np.asarray(w, dtype=complex).reshape(-1)
    zc = z.coords if isinstance(z, (BallPoint, SpherePoint)) else \
        np.asarray(z, dtype=complex).reshape(-1)
    if np.linalg.norm(wc) >= 1:
        raise ValueError("kernel point w must be interior")
    bw = eval_symbol(b, wc)
    bz = eval_symbol(b, zc)
    d = wc.size
    return complex((1.0 - bz * np.conj(bw)) / (1.0 - np.sum(zc * np.conj(wc))) ** d)


def dbr_kernel_at(b: Symbol, w: np.ndarray, pts: np.ndarray) -> np.ndarray:
    bw = eval_symbol(b, w)
    return (1.0 - b(pts) * np.conj(bw)) * cauchy_kernel_at(w, pts)


def dbr_kernel_diag(b: Symbol, w) -> float:
    """K^b(w, w) = (1 - |b(w)|^2) / (1 - |w|^2)^d > 0 for non-unimodular b."""
    wc = w.coords if isinstance(w, BallPoint) else np.asarray(w, dtype=complex).reshape(-1)
    a2 = float(np.linalg.norm(wc)) ** 2
    if a2 >= 1:
        raise ValueError("kernel point w must be interior")
    bw = eval_symbol(b, wc)
    return float((1.0 - abs(bw) ** 2) / (1.0 - a2) ** wc.size)


def kernel_test(mu: BallMeasure, b: Symbol, sgrid, grid: SphereGrid,
                radial: RadialRule):
    """Necessary-condition profile: min over the w-grid of
    integral |K^b_w|^2 dmu / K^b(w, w).

    A reverse Carleson measure for H(b) keeps this bounded below; a profile
    collapsing to zero under refinement is a numerical witness against it.
    """
    from .criteria import CriterionProfile, _w_points
    bad = mu_admissible_at_atoms(b, mu)
    if bad:
        raise ValueError(f"symbol not mu-admissible at boundary atom {bad[0]}")
    params, values = [], []
    for w in _w_points(sgrid):
        diag = dbr_kernel_diag(b, w)
        if diag <= 0:
            continue

        def f(pts, w=w):
            return np.abs(dbr_kernel_at(b, w, pts)) ** 2

        values.append(integrate_measure(mu, f, grid, radial) / diag)
        params.append(tuple(w))
    return CriterionProfile.from_values("hb-kernel", params, values, reverse=True)


@dataclass(frozen=True)
class NecessaryConstant:
    value: float               # may be math.inf
    violating_nodes: tuple     # nodes where g vanishes but |b| < 1 - eps
    exempt_fraction: float     # sigma-weight of nodes with |b| >= 1 - eps


def necessary_condition_constant(b: Symbol, g, grid: SphereGrid,
                                 eps_inner: float = EPS_INNER) -> NecessaryConstant:
    """Smallest C with 1 - |b|^2 <= C (1 - |b|^2)^2 g at the grid nodes.

    Nodes with |b| >= 1 - eps_inner are exempt (the condition is vacuous
    where the boundary modulus is one).  If g vanishes at a non-exempt node
    the constant is infinite and the node is reported.
    """
    mod = b.boundary_modulus(grid.nodes)
    gv = g(grid.nodes) if callable(g) else np.full(len(grid), float(g))
    active = mod < 1.0 - eps_inner
    exempt_w = float(grid.weights[~active].sum())
    if not active.any():
        return NecessaryConstant(0.0, (), exempt_w)
    denom = (1.0 - mod[active] ** 2) * gv[active]
    if np.any(denom <= 0.0):
        idx = np.flatnonzero(active)[denom <= 0.0]
        nodes = tuple(tuple(grid.nodes[i]) for i in idx[:8])
        return NecessaryConstant(math.inf, nodes, exempt_w)
    return NecessaryConstant(float((1.0 / denom).max()), (), exempt_w)


@dataclass(frozen=True)
class IntegrabilityVerdict:
    estimates: tuple
    verdict: str               # "finite" | "divergent" | "inconclusive"


def one_minus_b_integral(b: Symbol, grid: SphereGrid,
                         refinements: int = 3) -> IntegrabilityVerdict:
    """Quadrature of 1/(1-|b|) over {|b| < 1} at successive grid refinements.

    Divergent when estimates grow by a factor >= 1.5 per refinement; finite
    when the last two agree within 5%; inconclusive otherwise.
    """
    ests = []
    g = grid
    for _ in range(refinements + 1):
        mod = b.boundary_modulus(g.nodes)
        mask = mod < 1.0
        ests.append(float(np.sum(g.weights[mask] / (1.0 - mod[mask]))))
        g = refine(g)
    growing = all(b_ >= 1.5 * a_ for a_, b_ in zip(ests, ests[1:]) if a_ > 0)
    if growing and ests[-1] > ests[0]:
        return IntegrabilityVerdict(tuple(ests), "divergent")
    if ests[-1] == 0.0 or abs(ests[-1] - ests[-2]) <= 0.05 * max(ests[-1], 1e-300):
        return IntegrabilityVerdict(tuple(ests), "finite")
    return IntegrabilityVerdict(tuple(ests), "inconclusive")


def is_inner_estimate(b: Symbol, grid: SphereGrid,
                      eps_inner: float = EPS_INNER) -> float:
    """Sigma-weighted fraction of nodes with |b| >= 1 - eps_inner; fraction
    one is inner-like, anything less is a non-inner certificate."""
    mod = b.boundary_modulus(grid.nodes)
    return float(grid.weights[mod >= 1.0 - eps_inner].sum())


def sampling_candidate_measure(b: Symbol, points) -> BallMeasure:
    """The atomic measure sum_j delta_{w_j} / K^b(w_j, w_j) attached to a
    would-be sampling sequence; its boundary density is zero by construction."""
    atoms = []
    for w in points:
        pt = w if isinstance(w, BallPoint) else BallPoint(w)
        if not pt.is_interior:
            raise ValueError("sampling points must be interior")
        diag = dbr_kernel_diag(b, pt)
        if diag <= 0 or not math.isfinite(1.0 / diag):
            raise ValueError(f"kernel diagonal degenerate at {pt}")
        atoms.append((pt, 1.0 / diag))
    return BallMeasure(atoms[0][0].d, interior_atoms=tuple(atoms))


@dataclass(frozen=True)
class SamplingRefutation:
    verdict: str               # "refuted" | "inconclusive"
    inner_fraction: float
    boundary_density_zero: bool
    kernel_test_trend: tuple   # min of the kernel test per w-grid refinement
    detail: str


def refute_sampling(b: Symbol, points, sgrid, grid: SphereGrid,
                    radial: RadialRule, refinements: int = 3,
                    eps_inner: float = EPS_INNER) -> SamplingRefutation:
    """Numerical refutation of a sampling sequence for H(b), non-inner b.

    Combines the non-inner certificate, the vanishing boundary density of the
    candidate measure, and the kernel-test minimum collapsing under w-grid
    refinement.  For inner-like b the theorem does not apply.
    """
    frac = is_inner_estimate(b, grid, eps_inner)
    if frac >= 1.0 - 1e-12:
        return SamplingRefutation(
            "inconclusive", frac, True, (),
            "inner-like symbol: the non-inner hypothesis fails, theorem does not apply")
    mu = sampling_candidate_measure(b, points)
    trend = []
    sg = sgrid
    for _ in range(refinements):
        trend.append(kernel_test(mu, b, sg, grid, radial).extremal)
        sg = sg.refine()
    detail = ("candidate measure has zero boundary density while b is not "
              f"inner (inner fraction {frac:.6f}); kernel-test minimum trend "
              f"{tuple(trend)} collapses, violating the necessary lower bound")
    return SamplingRefutation("refuted", frac, True, tuple(trend), detail)


# ---------------------------------------------------------------------------
# serialization

def symbol_to_dict(b: Symbol) -> dict:
    if b.kind == "constant":
        c = complex(b.data)
        return {"kind": "constant", "dimension": b.d,
                "data": {"value": [c.real, c.imag]}}
    if b.kind == "polynomial":
        return {"kind": "polynomial", "dimension": b.d,
                "data": {"terms": [
                    {"coeff": [complex(c).real, complex(c).imag],
                     "exponents": list(alpha)} for c, alpha in b.data]}}
    zeros, phase = b.data
    ph = complex(phase)
    return {"kind": "blaschke", "dimension": 1,
            "data": {"zeros": [[complex(a).real, complex(a).imag] for a in zeros],
                     "phase": [ph.real, ph.imag]}}


def symbol_from_dict(doc: dict) -> Symbol:
    kind = doc["kind"]
    d = int(doc.get("dimension", 1))
    data = doc["data"]
    if kind == "constant":
        re, im = data["value"]
        return Symbol("constant", d, complex(re, im))
    if kind == "polynomial":
        terms = tuple((complex(t["coeff"][0], t["coeff"][1]),
                       tuple(int(a) for a in t["exponents"]))
                      for t in data["terms"])
        return Symbol("polynomial", d, terms)
    if kind == "blaschke":
        zeros = tuple(complex(a, bb) for a, bb in data["zeros"])
        ph = data.get("phase", [1.0, 0.0])
        return Symbol("blaschke", 1, (zeros, complex(ph[0], ph[1])))
    raise ValueError(f"unknown symbol kind {kind!r}")


def load_symbol(path) -> Symbol:
    with open(path) as fh:
        return symbol_from_dict(yaml.safe_load(fh))


def dump_symbol(b: Symbol, path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(symbol_to_dict(b), fh, sort_keys=True)
