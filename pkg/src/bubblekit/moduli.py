"""Stability of weighted point configurations and nodal-curve combinatorics.

Weights are the angle deficits b(x_i) = 1 - beta_i; a marked tuple is
stable when every collision block has total weight below 1.  For stable
nodal curves the unique component with all node weights below 1 resolves
the curve to a stable tuple, and the component tree matches the metric
bubble tree of a degenerating sphere family.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (CollapseViolation, PrincipalNotFound, PrincipalNotUnique,
                     WeightOne)
from .exact import GaussRat
from .flat import SPHERE_AMBIENT, AngleVector, FamilyConfig
from .vtree import build_tree


class InfinityPoint:
    """The point at infinity on the projective line."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"


INF = InfinityPoint()


def _value_key(v):
    if isinstance(v, InfinityPoint):
        return ("inf",)
    return (v.re, v.im)


@dataclass(frozen=True)
class MarkedTuple:
    """N marked points on CP^1 given by a partition into distinct values."""

    assignment: tuple[int, ...]   # mark index -> value index
    values: tuple                 # GaussRat or INF, pairwise distinct

    def __post_init__(self):
        keys = [_value_key(v) for v in self.values]
        if len(set(keys)) != len(keys):
            raise ValueError("values must be pairwise distinct")
        used = set(self.assignment)
        if used != set(range(len(self.values))):
            raise ValueError("every value must label a non-empty block")

    @staticmethod
    def from_values(points) -> "MarkedTuple":
        """Build from one value per mark, collapsing equal values to blocks."""
        values: list = []
        keys: dict[tuple, int] = {}
        assignment = []
        for p in points:
            k = _value_key(p)
            if k not in keys:
                keys[k] = len(values)
                values.append(p)
            assignment.append(keys[k])
        return MarkedTuple(tuple(assignment), tuple(values))

    def blocks(self) -> list[tuple[int, ...]]:
        out: list[list[int]] = [[] for _ in self.values]
        for i, v in enumerate(self.assignment):
            out[v].append(i)
        return [tuple(b) for b in out]

    def to_json(self) -> dict:
        return {
            "blocks": [[i + 1 for i in b] for b in self.blocks()],
            "values": [None if isinstance(v, InfinityPoint) else v.to_json()
                       for v in self.values],
        }


def non_collapse_check(betas: AngleVector) -> bool:
    """True iff no subset of angle deficits sums to exactly 1.

    Exact subset-sum over rationals; exponential in N but N is the number
    of cone points (small).  Achievable partial sums are memoized as a set.
    """
    if betas.deficit() != 2:
        raise ValueError("Gauss-Bonnet constraint required: deficits must sum to 2")
    sums = {Fraction(0)}
    one = Fraction(1)
    for b in betas.betas:
        w = 1 - b
        sums |= {s + w for s in sums}
        if one in sums:
            return False
    return True


def is_beta_stable(marked: MarkedTuple, betas: AngleVector) -> bool:
    """Every collision block must have total angle deficit below 1."""
    if len(marked.assignment) != len(betas):
        raise ValueError("one angle per mark required")
    return all(betas.deficit(b) < 1 for b in marked.blocks())


@dataclass(frozen=True)
class Component:
    id: int
    marks: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "marks", frozenset(self.marks))


@dataclass(frozen=True)
class NodalCurve:
    """Dual tree of a stable nodal curve: components, marks, nodes as edges."""

    components: tuple[Component, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        ids = [c.id for c in comps]
        if len(set(ids)) != len(ids):
            raise ValueError("component ids must be distinct")
        idset = set(ids)
        edges = tuple((a, b) for a, b in self.edges)
        object.__setattr__(self, "edges", edges)
        for a, b in edges:
            if a not in idset or b not in idset or a == b:
                raise ValueError(f"invalid edge ({a}, {b})")
        if len(edges) != len(comps) - 1:
            raise ValueError("component graph must be a tree")
        # connectivity
        adj = self.adjacency()
        seen = {ids[0]}
        stack = [ids[0]]
        while stack:
            for n in adj[stack.pop()]:
                if n not in seen:
                    seen.add(n)
                    stack.append(n)
        if seen != idset:
            raise ValueError("component graph must be connected")
        # marks partition {0..N-1}
        all_marks: set[int] = set()
        for c in comps:
            if all_marks & c.marks:
                raise ValueError("marks must be disjoint across components")
            all_marks |= c.marks
        if all_marks != set(range(len(all_marks))):
            raise ValueError("marks must cover 0..N-1")
        # stability: marks + nodes >= 3 on every component
        deg = {i: len(adj[i]) for i in idset}
        for c in comps:
            if len(c.marks) + deg[c.id] < 3:
                raise ValueError(
                    f"component {c.id} has {len(c.marks)} marks and degree "
                    f"{deg[c.id]}: not stable")

    @property
    def n_marks(self) -> int:
        return sum(len(c.marks) for c in self.components)

    def component(self, cid: int) -> Component:
        for c in self.components:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {c.id: [] for c in self.components}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return {k: sorted(v) for k, v in adj.items()}

    def side_marks(self, away_from: int, toward: int) -> frozenset[int]:
        """Marks in the subtree containing ``toward`` after cutting the edge."""
        adj = self.adjacency()
        seen = {away_from, toward}
        stack = [toward]
        marks: set[int] = set()
        while stack:
            cur = stack.pop()
            marks |= self.component(cur).marks
            for n in adj[cur]:
                if n not in seen:
                    seen.add(n)
                    stack.append(n)
        return frozenset(marks)

    def to_json(self) -> dict:
        return {
            "components": [{"id": c.id, "marks": sorted(m + 1 for m in c.marks)}
                           for c in self.components],
            "edges": [[a, b] for a, b in self.edges],
        }

    @staticmethod
    def from_json(data) -> "NodalCurve":
        comps = tuple(Component(c["id"], frozenset(m - 1 for m in c["marks"]))
                      for c in data["components"])
        edges = tuple((a, b) for a, b in data["edges"])
        return NodalCurve(comps, edges)


@dataclass(frozen=True, eq=False)
class NodeWeighting:
    """Weight b(y) per directed edge (component, neighbour): the total
    angle deficit on the far side of the node."""

    weights: dict[tuple[int, int], Fraction]

    def toward(self, comp: int, neighbour: int) -> Fraction:
        return self.weights[(comp, neighbour)]


def node_weights(curve: NodalCurve, betas: AngleVector) -> NodeWeighting:
    """Directed node weights b(y); b(y) + b(y') = 2 across each edge."""
    if len(betas) != curve.n_marks:
        raise ValueError("one angle per mark required")
    if betas.deficit() != 2:
        raise ValueError("Gauss-Bonnet constraint required: deficits must sum to 2")
    weights: dict[tuple[int, int], Fraction] = {}
    for a, b in curve.edges:
        far_b = betas.deficit(curve.side_marks(a, b))
        weights[(a, b)] = far_b
        weights[(b, a)] = 2 - far_b
        if far_b == 1:
            raise WeightOne((a, b))
    return NodeWeighting(weights)


def principal_component(curve: NodalCurve, betas: AngleVector,
                        weighting: NodeWeighting | None = None) -> int:
    """The unique component all of whose incident node weights are below 1.

    Found by walking toward the heavy side; marked-point weights 1 - beta
    are below 1 automatically.
    """
    w = weighting if weighting is not None else node_weights(curve, betas)
    adj = curve.adjacency()
    cur = curve.components[0].id
    prev = None
    while True:
        heavy = [n for n in adj[cur] if n != prev and w.toward(cur, n) > 1]
        if not heavy:
            break
        if len(heavy) > 1:  # pragma: no cover - impossible when weights sum to 2
            raise PrincipalNotUnique(f"two heavy directions at component {cur}")
        prev, cur = cur, heavy[0]
    if any(w.toward(cur, n) > 1 for n in adj[cur]):
        raise PrincipalNotFound("walk terminated on a non-principal component")
    return cur


def principal_component_bruteforce(curve: NodalCurve, betas: AngleVector) -> int:
    """Independent scan over all components; raises when not unique."""
    w = node_weights(curve, betas)
    adj = curve.adjacency()
    found = [c.id for c in curve.components
             if all(w.toward(c.id, n) < 1 for n in adj[c.id])]
    if not found:
        raise PrincipalNotFound("no component has all node weights below 1")
    if len(found) > 1:
        raise PrincipalNotUnique(f"components {found} all qualify")
    return found[0]


def resolve(curve: NodalCurve, betas: AngleVector) -> MarkedTuple:
    """Collapse every mark beyond a node of the principal component to that node.

    Marks on the principal component keep their own (abstract) values; the
    output values are synthetic distinct labels, one per surviving point.
    """
    w = node_weights(curve, betas)
    principal = principal_component(curve, betas, w)
    adj = curve.adjacency()
    n = curve.n_marks
    assignment = [-1] * n
    values: list[GaussRat] = []
    for i in sorted(curve.component(principal).marks):
        assignment[i] = len(values)
        values.append(GaussRat(Fraction(len(values))))
    for neighbour in adj[principal]:
        vid = len(values)
        values.append(GaussRat(Fraction(vid)))
        for i in curve.side_marks(principal, neighbour):
            assignment[i] = vid
    out = MarkedTuple(tuple(assignment), tuple(values))
    assert is_beta_stable(out, betas), "resolution must be beta-stable"
    return out


# ---------------------------------------------------------------------------
# Bubble tree <-> nodal curve correspondence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BubbleShape:
    """Abstract bubble-tree shape: marks at the vertex, cone-end angle and
    children.  The root carries no cone end."""

    marks: tuple[int, ...]
    cone_end: Fraction | None
    children: tuple["BubbleShape", ...]

    def min_mark(self) -> int:
        candidates = list(self.marks) + [c.min_mark() for c in self.children]
        return min(candidates)

    @staticmethod
    def make(marks, cone_end, children) -> "BubbleShape":
        kids = tuple(sorted(children, key=lambda c: c.min_mark()))
        return BubbleShape(tuple(sorted(marks)), cone_end, kids)


def bubbletree_shape(config: FamilyConfig) -> BubbleShape:
    """Shape of the metric bubble tree of a sphere family: root marked by
    non-clustered limits, one vertex per interior node of each cluster tree,
    cone ends labelled by the merged angle deficits."""
    if config.ambient != SPHERE_AMBIENT:
        raise ValueError("bubble tree shapes are defined for sphere families")
    root_marks: list[int] = []
    children: list[BubbleShape] = []
    for value, members in config.clusters():
        deficit = config.angles.deficit(members)
        if deficit >= 1:
            raise CollapseViolation(members, deficit)
        if len(members) == 1:
            root_marks.append(members[0])
            continue
        tree = build_tree([config.points[i] for i in members])

        def vertex(node_id: int) -> BubbleShape:
            node = tree.node(node_id)
            marks = []
            kids = []
            for cid in node.children:
                child = tree.node(cid)
                if child.is_leaf:
                    marks.append(members[child.members[0]])
                else:
                    kids.append(vertex(cid))
            gamma = 1 - config.angles.deficit(members[i] for i in node.members)
            return BubbleShape.make(marks, gamma, kids)

        children.append(vertex(tree.root))
    return BubbleShape.make(root_marks, None, children)


def bubbletree_to_nodal_curve(config: FamilyConfig) -> NodalCurve:
    """Dual curve of the bubble tree: one component per bubble vertex, the
    root component carrying the non-clustered marks."""
    shape = bubbletree_shape(config)
    components: list[Component] = []
    edges: list[tuple[int, int]] = []

    def emit(node: BubbleShape, parent: int | None) -> None:
        cid = len(components)
        components.append(Component(cid, frozenset(node.marks)))
        if parent is not None:
            edges.append((parent, cid))
        for child in node.children:
            emit(child, cid)

    emit(shape, None)
    return NodalCurve(tuple(components), tuple(edges))


def nodal_curve_to_bubbletree_shape(curve: NodalCurve, betas: AngleVector) -> BubbleShape:
    """Inverse correspondence: root at the principal component, cone end
    2*pi*(b(y) - 1) at each component's node toward the root."""
    w = node_weights(curve, betas)
    principal = principal_component(curve, betas, w)
    adj = curve.adjacency()

    def vertex(cid: int, parent: int | None) -> BubbleShape:
        comp = curve.component(cid)
        cone_end = None if parent is None else w.toward(cid, parent) - 1
        kids = [vertex(n, cid) for n in adj[cid] if n != parent]
        return BubbleShape.make(comp.marks, cone_end, kids)

    return vertex(principal, None)


def curve_to_dot(curve: NodalCurve, betas: AngleVector | None = None,
                 name: str = "nodal_curve") -> str:
    lines = [f"graph {name} {{"]
    for c in curve.components:
        label = "{" + ",".join(f"x{m + 1}" for m in sorted(c.marks)) + "}"
        lines.append(f'  c{c.id} [label="{label}"];')
    w = node_weights(curve, betas) if betas is not None else None
    for a, b in curve.edges:
        if w is not None:
            lines.append(f'  c{a} -- c{b} [label="{w.toward(a, b)}|{w.toward(b, a)}"];')
        else:
            lines.append(f"  c{a} -- c{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
