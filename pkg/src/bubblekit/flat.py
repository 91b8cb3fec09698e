"""Flat conical metrics on the plane and the sphere: bubbles and rescaled limits.

An infinite flat metric with cone angles 2*pi*beta_i at p_i and total
angle deficit below 2*pi is a cone of angle 2*pi*gamma at infinity, with
1 - gamma equal to the sum of the deficits 1 - beta_i.  Families of such
metrics whose cone points collide are resolved scale by scale: the
exponents alpha_i where the pointed rescaled limit jumps from a cone to a
bubble are exact rationals computed here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ClusterMismatch, CollapseViolation
from .exact import GAUSS_ZERO, INFINITE_ORDER, GaussRat, Germ, Rat, _to_rat
from .vtree import SectionPath, VanishingTree, build_tree, section_depths, section_path

PLANE_AMBIENT = "plane"
SPHERE_AMBIENT = "sphere"


@dataclass(frozen=True)
class AngleVector:
    betas: tuple[Fraction, ...]

    def __post_init__(self):
        betas = tuple(_to_rat(b) for b in self.betas)
        for b in betas:
            if not (0 < b < 1):
                raise ValueError(f"cone angle parameter {b} outside (0,1)")
        object.__setattr__(self, "betas", betas)

    def __len__(self) -> int:
        return len(self.betas)

    def deficit(self, indices=None) -> Fraction:
        """Sum of 1 - beta_i over the given indices (all by default)."""
        idx = range(len(self.betas)) if indices is None else indices
        return sum((1 - self.betas[i] for i in idx), Fraction(0))


@dataclass(frozen=True)
class ConeModel:
    """The 2-cone of total angle 2*pi*gamma; gamma = 1 is the flat plane."""

    gamma: Fraction

    def __post_init__(self):
        g = _to_rat(self.gamma)
        if not (0 < g <= 1):
            raise ValueError(f"cone angle {g} outside (0,1]")
        object.__setattr__(self, "gamma", g)

    @property
    def is_plane(self) -> bool:
        return self.gamma == 1


PLANE = ConeModel(Fraction(1))


@dataclass(frozen=True)
class ConePoint:
    position: GaussRat
    angle: Fraction


@dataclass(frozen=True)
class BubbleModel:
    """Infinite flat metric on C with finitely many cone points.

    The angle at infinity is determined by the cone angles; the
    constructor enforces that closure exactly.
    """

    cone_points: tuple[ConePoint, ...]
    gamma_infinity: Fraction
    basepoint: GaussRat = GAUSS_ZERO

    def __post_init__(self):
        pts = self.cone_points
        positions = [p.position for p in pts]
        if len({(q.re, q.im) for q in positions}) != len(positions):
            raise ValueError("cone point positions must be pairwise distinct")
        deficit = sum((1 - p.angle for p in pts), Fraction(0))
        for p in pts:
            if not (0 < p.angle < 1):
                raise ValueError(f"cone angle {p.angle} outside (0,1)")
        if deficit >= 1:
            raise CollapseViolation(range(len(pts)), deficit)
        if 1 - self.gamma_infinity != deficit:
            raise ValueError("angle at infinity inconsistent with cone angles")

    def to_json(self) -> dict:
        return {
            "points": [p.position.to_json() for p in self.cone_points],
            "angles": [str(p.angle) for p in self.cone_points],
            "gamma_inf": str(self.gamma_infinity),
            "basepoint": self.basepoint.to_json(),
        }


@dataclass(frozen=True)
class FamilyConfig:
    """Holomorphic paths of cone points with fixed angles, on C or on CP^1."""

    points: tuple[Germ, ...]
    angles: AngleVector
    ambient: str = PLANE_AMBIENT

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if len(self.points) != len(self.angles):
            raise ValueError("one angle per cone point path required")
        if self.ambient not in (PLANE_AMBIENT, SPHERE_AMBIENT):
            raise ValueError(f"unknown ambient {self.ambient!r}")
        total = self.angles.deficit()
        if self.ambient == PLANE_AMBIENT:
            if total >= 1:
                raise CollapseViolation(range(len(self.points)), total)
        else:
            if total != 2:
                raise ValueError(
                    f"Gauss-Bonnet violated: total angle deficit {total} != 2")

    def clusters(self) -> list[tuple[GaussRat, tuple[int, ...]]]:
        """Collision clusters at t = 0 (sphere families), ordered by first index."""
        seen: dict[tuple, list[int]] = {}
        order: list[tuple] = []
        values: dict[tuple, GaussRat] = {}
        for i, p in enumerate(self.points):
            q = p.coefficient(0)
            key = (q.re, q.im)
            if key not in seen:
                seen[key] = []
                order.append(key)
                values[key] = q
            seen[key].append(i)
        return [(values[k], tuple(seen[k])) for k in order]


def subcone_angle(angles) -> Fraction:
    """Angle at infinity gamma with 1 - gamma the total angle deficit."""
    betas = [_to_rat(b) for b in angles]
    for b in betas:
        if not (0 < b < 1):
            raise ValueError(f"cone angle parameter {b} outside (0,1)")
    deficit = sum((1 - b for b in betas), Fraction(0))
    if deficit >= 1:
        raise CollapseViolation(range(len(betas)), deficit)
    return 1 - deficit


def _merged_bubble(positions_angles: list[tuple[GaussRat, Fraction]],
                   gamma_inf: Fraction,
                   basepoint: GaussRat = GAUSS_ZERO) -> BubbleModel:
    pts = tuple(ConePoint(pos, ang) for pos, ang in
                sorted(positions_angles, key=lambda pa: pa[0].sort_key()))
    return BubbleModel(pts, gamma_inf, basepoint)


def bubble_at_node(tree: VanishingTree, node_id: int, config: FamilyConfig) -> BubbleModel:
    """Bubble of an interior node: one cone point per child class.

    Positions are the Taylor coefficients of t**k at the node's split
    order k; each child's angle merges the deficits of its members.
    """
    node = tree.node(node_id)
    if node.is_leaf:
        raise ValueError(f"node {node_id} is a leaf, not interior")
    betas = config.angles.betas
    deficit = config.angles.deficit(node.members)
    if deficit >= 1:
        raise CollapseViolation(node.members, deficit)
    k = node.split_order
    pas: list[tuple[GaussRat, Fraction]] = []
    for cid in node.children:
        child = tree.node(cid)
        pos = config.points[child.members[0]].coefficient(k)
        angle = 1 - config.angles.deficit(child.members)
        pas.append((pos, angle))
    return _merged_bubble(pas, 1 - deficit)


@dataclass(frozen=True)
class ClusterBubbles:
    members: tuple[int, ...]
    tree: VanishingTree
    bubbles: tuple[tuple[int, BubbleModel], ...]  # (node id, bubble)


@dataclass(frozen=True)
class BubbleTreeReport:
    clusters: tuple[ClusterBubbles, ...]
    limit_positions: tuple[GaussRat, ...] | None = None  # sphere only
    limit_angles: tuple[Fraction, ...] | None = None

    def all_bubbles(self) -> list[tuple[int, int, BubbleModel]]:
        """(cluster index, node id, bubble) triples in deterministic order."""
        out = []
        for ci, cb in enumerate(self.clusters):
            for nid, b in cb.bubbles:
                out.append((ci, nid, b))
        return out


def bubble_tree(config: FamilyConfig) -> BubbleTreeReport:
    """All bubbles of the family, one per interior node of each cluster tree.

    On the plane the whole configuration is a single cluster.  On the
    sphere each collision cluster at t = 0 gets its own tree, and the
    limit configuration (positions and merged angles) is reported too.
    """
    if config.ambient == PLANE_AMBIENT:
        tree = build_tree(config.points)
        bubbles = tuple((nid, bubble_at_node(tree, nid, config))
                        for nid in tree.interior_ids())
        cluster = ClusterBubbles(tuple(range(len(config.points))), tree, bubbles)
        return BubbleTreeReport((cluster,))

    clusters = config.clusters()
    out: list[ClusterBubbles] = []
    positions: list[GaussRat] = []
    gammas: list[Fraction] = []
    for value, members in clusters:
        deficit = config.angles.deficit(members)
        if deficit >= 1:
            raise CollapseViolation(members, deficit)
        positions.append(value)
        gammas.append(1 - deficit)
        sub = [config.points[i] for i in members]
        tree = build_tree(sub)
        subconf = FamilyConfig(
            tuple(sub),
            AngleVector(tuple(config.angles.betas[i] for i in members)),
            PLANE_AMBIENT,
        ) if deficit < 1 else None
        bubbles = tuple((nid, bubble_at_node(tree, nid, subconf))
                        for nid in tree.interior_ids())
        out.append(ClusterBubbles(members, tree, bubbles))
    return BubbleTreeReport(tuple(out), tuple(positions), tuple(gammas))


@dataclass(frozen=True)
class Breakpoint:
    d: int                 # section-relative order of vanishing
    alpha: Fraction
    node: int              # node id in the analysis tree (may be a leaf)
    bubble: BubbleModel    # section-centered: basepoint at the origin


@dataclass(frozen=True)
class SectionAnalysis:
    """Exact breakpoint data of the pointed rescaled limits along a section.

    ``cone_gammas[i]`` is the cone angle of the limit for alpha strictly
    between breakpoints i-1 and i; ``terminal`` covers every alpha beyond
    the last breakpoint (the flat plane for a generic section, the 2-cone
    of the matched cone point otherwise).
    """

    tree: VanishingTree
    working: tuple[int, ...]
    betas: tuple[Fraction, ...]
    depths: tuple[int | float, ...]
    gamma: Fraction
    breakpoints: tuple[Breakpoint, ...]
    cone_gammas: tuple[Fraction, ...]
    path: SectionPath
    terminal: ConeModel

    def alphas(self) -> tuple[Fraction, ...]:
        return tuple(bp.alpha for bp in self.breakpoints)

    def to_json(self) -> dict:
        return {
            "path": self.path.to_json(),
            "gamma": str(self.gamma),
            "breakpoints": [
                {"d": bp.d, "alpha": str(bp.alpha), "node": bp.node,
                 "bubble": bp.bubble.to_json()}
                for bp in self.breakpoints
            ],
            "cone_gammas": [str(g) for g in self.cone_gammas],
            "terminal": "plane" if self.terminal.is_plane
            else {"cone": str(self.terminal.gamma)},
        }


def _section_centered_coefficient(point: Germ, section: Germ,
                                  depth: int | float, d: int) -> GaussRat:
    if depth > d:  # includes the exact match at infinite depth
        return GAUSS_ZERO
    return (point - section).coefficient(d)


def alpha_exponents(config: FamilyConfig, section: Germ) -> SectionAnalysis:
    """Breakpoints alpha_i = d_i*gamma + sum over shallower points of
    (1 - beta_j)(d_i - d(j)), with the bubble at each breakpoint rebuilt in
    section-centered coordinates.

    On the sphere the computation restricts to the collision cluster the
    section lands in, and gamma is that cluster's angle at infinity.
    """
    if config.ambient == SPHERE_AMBIENT:
        s0 = section.coefficient(0)
        working = None
        for value, members in config.clusters():
            if value == s0:
                working = members
                break
        if working is None:
            raise ClusterMismatch(
                f"section starts at {s0}, not a collision point of the family")
        deficit = config.angles.deficit(working)
        if deficit >= 1:
            raise CollapseViolation(working, deficit)
    else:
        working = tuple(range(len(config.points)))
        s0 = section.coefficient(0)
        for i in working:
            if config.points[i].coefficient(0) != s0:
                raise ClusterMismatch(
                    f"cone point {i} does not collide with the section at t=0")

    germs = [config.points[i] for i in working]
    betas = tuple(config.angles.betas[i] for i in working)
    gamma = 1 - sum((1 - b for b in betas), Fraction(0))
    tree = build_tree(germs)
    depths, match = section_depths(germs, section)
    path = section_path(germs, section, tree)

    finite = sorted({d for d in depths if d != INFINITE_ORDER})
    breakpoints: list[Breakpoint] = []
    cone_gammas: list[Fraction] = []
    for d in finite:
        members = tuple(sorted(i for i in range(len(germs)) if depths[i] >= d))
        nid = tree.id_of_members(members)
        assert nid is not None
        alpha = d * gamma + sum(((1 - betas[j]) * (d - depths[j])
                                 for j in range(len(germs)) if depths[j] < d),
                                Fraction(0))
        groups: dict[tuple, list[int]] = {}
        for j in members:
            c = _section_centered_coefficient(germs[j], section, depths[j], d)
            groups.setdefault((c.re, c.im), []).append(j)
        pas = [(GaussRat(re, im), 1 - sum((1 - betas[j] for j in js), Fraction(0)))
               for (re, im), js in groups.items()]
        deficit_v = sum((1 - betas[j] for j in members), Fraction(0))
        bubble = _merged_bubble(pas, 1 - deficit_v)
        breakpoints.append(Breakpoint(d, alpha, nid, bubble))
        cone_gammas.append(1 - deficit_v)

    terminal = PLANE if match is None else ConeModel(betas[match])
    alphas = [bp.alpha for bp in breakpoints]
    assert all(a < b for a, b in zip(alphas, alphas[1:]))
    return SectionAnalysis(tree, working, betas, tuple(depths), gamma,
                           tuple(breakpoints), tuple(cone_gammas), path, terminal)


def alpha_of_lambda(analysis: SectionAnalysis, lam) -> Fraction:
    """The piecewise-linear convex rescaling profile; alpha(d_i) = alpha_i."""
    lam = _to_rat(lam)
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    out = analysis.gamma * lam
    for j, d in enumerate(analysis.depths):
        if d < lam:
            out += (1 - analysis.betas[j]) * (lam - d)
    return out


def classify_rescaled_limit(analysis: SectionAnalysis, alpha):
    """Limit space at rescaling exponent alpha > 0.

    Returns a ConeModel (pointed at its vertex; gamma 1 means the flat
    plane) in the cone regimes and beyond the last breakpoint, or a
    (BubbleModel, basepoint) pair exactly at a breakpoint.
    """
    a = _to_rat(alpha)
    if a <= 0:
        raise ValueError("alpha must be positive")
    for bp, cg in zip(analysis.breakpoints, analysis.cone_gammas):
        if a == bp.alpha:
            return (bp.bubble, bp.bubble.basepoint)
        if a < bp.alpha:
            return ConeModel(cg)
    return analysis.terminal
