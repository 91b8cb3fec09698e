"""Gibbons-Hawking ALE orbifolds: potentials, curvature, defining equations,
and the rescaled-limit schedule of a colliding monopole family.

A configuration of monopole points x_i in R^3 with multiplicities m_i
determines the harmonic potential f(x) = (1/2) sum m_i / |x - x_i| and an
ALE space asymptotic to C^2/Gamma_k with k = sum m_i; its curvature norm
is |Riem|^2 = (1/4) Lap Lap (1/f).  Planar configurations are the complex
surfaces uv = prod (z - z_i)^{m_i}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import NonPlanar, SingularPoint, StepUnderflow
from .exact import (GAUSS_ONE, INFINITE_ORDER, GaussRat, Germ, PolyFamily,
                    _to_rat)
from .vtree import VanishingTree, build_tree, section_depths

R3 = tuple[Fraction, Fraction, Fraction]


def _to_r3(p) -> R3:
    x, y, z = p
    return (_to_rat(x), _to_rat(y), _to_rat(z))


@dataclass(frozen=True)
class MonopolePoint:
    position: R3
    multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "position", _to_r3(self.position))
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be a positive integer")


@dataclass(frozen=True)
class MonopoleConfig:
    points: tuple[MonopolePoint, ...]

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValueError("need at least one monopole point")
        if len({p.position for p in pts}) != len(pts):
            raise ValueError("monopole positions must be pairwise distinct")

    @property
    def total_charge(self) -> int:
        """Order of the asymptotic cone C^2/Gamma_k: k = sum of multiplicities."""
        return sum(p.multiplicity for p in self.points)

    def position_array(self) -> np.ndarray:
        return np.array([[float(c) for c in p.position] for p in self.points])

    def multiplicity_array(self) -> np.ndarray:
        return np.array([float(p.multiplicity) for p in self.points])

    @staticmethod
    def planar(points) -> "MonopoleConfig":
        """Build from (complex position as GaussRat, multiplicity) pairs."""
        return MonopoleConfig(tuple(
            MonopolePoint((z.re, z.im, Fraction(0)), m) for z, m in points))

    def to_json(self) -> dict:
        return {"points": [
            {"position": [str(c) for c in p.position], "multiplicity": p.multiplicity}
            for p in self.points]}


def potential(config: MonopoleConfig, x) -> float:
    """Harmonic potential f(x) = (1/2) sum m_i / |x - x_i|."""
    xs = np.array([[float(c) for c in x]])
    pos = config.position_array()
    if np.any(np.all(pos == xs, axis=1)):
        raise SingularPoint(f"potential evaluated at monopole point {tuple(x)}")
    return float(_kernels.gh_potential(xs, pos, config.multiplicity_array())[0])


# Composition of two 4th-order central second-difference stencils per axis
# pair gives the bi-Laplacian weights on a fixed offset star.
_D2 = {-2: -1.0 / 12, -1: 16.0 / 12, 0: -30.0 / 12, 1: 16.0 / 12, 2: -1.0 / 12}


def _bilaplacian_star() -> tuple[np.ndarray, np.ndarray]:
    acc: dict[tuple[int, int, int], float] = {}
    for ax_a in range(3):
        for ax_b in range(3):
            for oa, wa in _D2.items():
                for ob, wb in _D2.items():
                    off = [0, 0, 0]
                    off[ax_a] += oa
                    off[ax_b] += ob
                    key = tuple(off)
                    acc[key] = acc.get(key, 0.0) + wa * wb
    offsets = sorted(acc)
    return (np.array(offsets, dtype=float),
            np.array([acc[o] for o in offsets]))


_STAR_OFFSETS, _STAR_WEIGHTS = _bilaplacian_star()


def _bilaplacian_inv_f(config: MonopoleConfig, x: np.ndarray, h: float) -> float:
    pts = x[None, :] + h * _STAR_OFFSETS
    f = _kernels.gh_potential(pts, config.position_array(),
                              config.multiplicity_array())
    return float(_STAR_WEIGHTS @ (1.0 / f)) / h ** 4


def curvature_norm(config: MonopoleConfig, x, guard: float = 1e-7) -> float:
    """|Riem|^2 = (1/4) Lap Lap f^{-1} by nested 4th-order central
    differences, Richardson-extrapolated once.

    The step is 1/16 of the distance to the nearest monopole so all
    stencil samples stay clear of the singularities.
    """
    xv = np.array([float(c) for c in x])
    pos = config.position_array()
    d_min = float(np.min(np.linalg.norm(pos - xv[None, :], axis=1)))
    if d_min <= guard:
        raise SingularPoint(
            f"point within guard distance {guard} of a monopole")
    h = d_min / 16.0
    if h / 2.0 < 1e-10 * max(1.0, float(np.max(np.abs(xv)))):
        raise StepUnderflow(f"step {h / 2.0:g} below floating-point resolution")
    coarse = _bilaplacian_inv_f(config, xv, h)
    fine = _bilaplacian_inv_f(config, xv, h / 2.0)
    return 0.25 * (16.0 * fine - coarse) / 15.0


def defining_equation(config: MonopoleConfig) -> PolyFamily:
    """The complex surface uv = prod (z - z_i)^{m_i} of a planar configuration."""
    zs: list[tuple[GaussRat, int]] = []
    for p in config.points:
        if p.position[2] != 0:
            raise NonPlanar(f"monopole at {p.position} is off the x3 = 0 plane")
        zs.append((GaussRat(p.position[0], p.position[1]), p.multiplicity))
    variables = ("u", "v", "z")
    u = PolyFamily.variable(variables, "u")
    v = PolyFamily.variable(variables, "v")
    z = PolyFamily.variable(variables, "z")
    prod = PolyFamily.constant(variables, 1)
    for zi, m in zs:
        prod = prod * (z - PolyFamily.constant(variables, GAUSS_ONE * zi)) ** m
    return u * v - prod


# ---------------------------------------------------------------------------
# Rescaled limits of a colliding family (planar, unit charges)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonopoleFamily:
    """Planar monopole paths z_i(t) (unit multiplicity) with a section."""

    z_paths: tuple[Germ, ...]
    section: Germ

    def __post_init__(self):
        object.__setattr__(self, "z_paths", tuple(self.z_paths))


@dataclass(frozen=True)
class ALEOrbifoldModel:
    config: MonopoleConfig
    basepoint_index: int | None     # None: base at the origin, off the monopoles

    @property
    def basepoint_multiplicity(self) -> int:
        if self.basepoint_index is None:
            return 1
        return self.config.points[self.basepoint_index].multiplicity

    @property
    def orbifold_index(self) -> int:
        """The A_k type at the basepoint; 0 means a smooth point."""
        return self.basepoint_multiplicity - 1

    def to_json(self) -> dict:
        return {"config": self.config.to_json(),
                "basepoint_index": self.basepoint_index,
                "orbifold_type": f"A{self.orbifold_index}"}


@dataclass(frozen=True)
class AkBreakpoint:
    alpha: Fraction            # = d/2 at section-relative depth d
    depth: int
    node: int                  # node id in the section-centered tree
    model: ALEOrbifoldModel


@dataclass(frozen=True)
class AkRegime:
    """Cone regime C^2/Gamma_order for alpha in (alpha_lo, alpha_hi)."""

    alpha_lo: Fraction
    alpha_hi: Fraction | None   # None: unbounded terminal regime
    order: int


@dataclass(frozen=True)
class AkLimitReport:
    tree: VanishingTree
    breakpoints: tuple[AkBreakpoint, ...]
    cones: tuple[AkRegime, ...]
    section_rides_monopole: bool

    def to_json(self) -> dict:
        timeline: list[dict] = []
        for cone, bp in zip(self.cones, self.breakpoints):
            timeline.append({"alpha_range": [str(cone.alpha_lo),
                                             str(cone.alpha_hi)],
                             "cone_order": cone.order})
            timeline.append({"alpha": str(bp.alpha), "depth": bp.depth,
                             "node": bp.node, "model": bp.model.to_json()})
        last = self.cones[-1]
        timeline.append({"alpha_range": [str(last.alpha_lo), None],
                         "cone_order": last.order})
        return {"tree": self.tree.to_json(), "timeline": timeline,
                "section_rides_monopole": self.section_rides_monopole}


def ak_rescaled_limits(family: MonopoleFamily) -> AkLimitReport:
    """Rescaled pointed limits along the section: at alpha = d/2 for each
    section-relative vanishing depth d, the ALE orbifold whose monopoles
    are the t**d coefficient clusters (multiplicity = cluster size,
    basepoint at the cluster riding the section); between depths, the cone
    C^2/Gamma_m of the surviving cluster; flat C^2 beyond the last depth.
    """
    centered = [z - family.section for z in family.z_paths]
    depths, match = section_depths(family.z_paths, family.section)
    tree = build_tree(centered)
    finite = sorted({d for d in depths if d != INFINITE_ORDER})
    n = len(centered)

    breakpoints: list[AkBreakpoint] = []
    cones: list[AkRegime] = []
    prev_alpha = Fraction(0)
    for d in finite:
        members = tuple(sorted(j for j in range(n) if depths[j] >= d))
        nid = tree.id_of_members(members)
        assert nid is not None
        alpha = Fraction(d, 2)
        cones.append(AkRegime(prev_alpha, alpha, len(members)))
        groups: dict[tuple, list[int]] = {}
        for j in members:
            if depths[j] > d:
                c = GaussRat()
            else:
                c = centered[j].coefficient(d)
            groups.setdefault((c.re, c.im), []).append(j)
        ordered = sorted(groups.items(), key=lambda kv: kv[0])
        pts = tuple(MonopolePoint((re, im, Fraction(0)), len(js))
                    for (re, im), js in ordered)
        # the coefficient-zero cluster consists exactly of the paths that
        # agree with the section beyond depth d: it carries the basepoint
        base = None
        for i, ((re, im), _) in enumerate(ordered):
            if re == 0 and im == 0:
                base = i
        breakpoints.append(AkBreakpoint(
            alpha, d, nid, ALEOrbifoldModel(MonopoleConfig(pts), base)))
        prev_alpha = alpha
    cones.append(AkRegime(prev_alpha, None, 1))
    return AkLimitReport(tree, tuple(breakpoints), tuple(cones), match is not None)
