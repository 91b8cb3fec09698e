"""Vanishing trees of finite germ sets and section paths.

Germs are grouped by their relative order of vanishing: f ~ g at level k
when ord(f - g) >= k.  The tree keeps one node per distinct equivalence
class, so interior chains with a single child never appear; the root is
kept even for a singleton input.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AmbiguousTruncation
from .exact import INFINITE_ORDER, Germ, agree_order


@dataclass(frozen=True)
class TreeNode:
    id: int
    members: tuple[int, ...]          # sorted germ indices
    split_order: int | None           # None on leaves
    children: tuple[int, ...]         # node ids

    @property
    def is_leaf(self) -> bool:
        return self.split_order is None


@dataclass(frozen=True)
class VanishingTree:
    nodes: tuple[TreeNode, ...]
    root: int

    def node(self, node_id: int) -> TreeNode:
        return self.nodes[node_id]

    def interior_ids(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes if not n.is_leaf)

    def id_of_members(self, members) -> int | None:
        key = tuple(sorted(members))
        for n in self.nodes:
            if n.members == key:
                return n.id
        return None

    def parent_of(self, node_id: int) -> int | None:
        for n in self.nodes:
            if node_id in n.children:
                return n.id
        return None

    def ancestors_of_leaf(self, index: int) -> tuple[int, ...]:
        """Interior ancestors of the leaf {index}, root first."""
        path = []
        cur = self.node(self.root)
        while not cur.is_leaf:
            path.append(cur.id)
            for c in cur.children:
                if index in self.node(c).members:
                    cur = self.node(c)
                    break
            else:  # pragma: no cover - partition invariant
                raise AssertionError("index missing from children")
        return tuple(path)

    def to_json(self) -> dict:
        return {
            "root": self.root,
            "nodes": [
                {
                    "id": n.id,
                    "members": [m + 1 for m in n.members],
                    "split_order": n.split_order,
                    "children": list(n.children),
                }
                for n in self.nodes
            ],
        }

    def to_dot(self, name: str = "vanishing_tree") -> str:
        lines = [f"digraph {name} {{"]
        for n in self.nodes:
            label = "{" + ",".join(f"p{m + 1}" for m in n.members) + "}"
            if n.split_order is not None:
                label += f"\\nk={n.split_order}"
            lines.append(f'  n{n.id} [label="{label}"];')
        for n in self.nodes:
            for c in n.children:
                lines.append(f"  n{n.id} -> n{c};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _pairwise_orders(germs: list[Germ]) -> dict[tuple[int, int], int]:
    orders: dict[tuple[int, int], int] = {}
    n = len(germs)
    for i in range(n):
        for j in range(i + 1, n):
            o = agree_order(germs[i], germs[j])
            if o == INFINITE_ORDER:
                raise AmbiguousTruncation(i, j)
            orders[(i, j)] = int(o)
    return orders


def build_tree(germs) -> VanishingTree:
    """Tree of level-k agreement classes, truncated once all classes are singletons.

    Raises AmbiguousTruncation when two inputs agree on their whole common
    truncation window.
    """
    S = list(germs)
    if not S:
        raise ValueError("need at least one germ")
    orders = _pairwise_orders(S)

    nodes: list[TreeNode] = []
    # BFS so node ids are deterministic: root 0, then level by level,
    # children ordered by smallest member index.
    queue: list[tuple[int, tuple[int, ...]]] = [(0, tuple(range(len(S))))]
    nodes.append(None)  # type: ignore[arg-type]  # placeholder for root
    next_id = 1
    while queue:
        node_id, members = queue.pop(0)
        if len(members) == 1:
            nodes[node_id] = TreeNode(node_id, members, None, ())
            continue
        split = min(orders[(min(i, j), max(i, j))]
                    for a, i in enumerate(members) for j in members[a + 1:])
        # children: classes of "agreement order > split"
        parent = {i: i for i in members}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, i in enumerate(members):
            for j in members[a + 1:]:
                if orders[(min(i, j), max(i, j))] > split:
                    parent[find(i)] = find(j)
        groups: dict[int, list[int]] = {}
        for i in members:
            groups.setdefault(find(i), []).append(i)
        child_sets = sorted((tuple(sorted(g)) for g in groups.values()),
                            key=lambda g: g[0])
        child_ids = []
        for cs in child_sets:
            cid = next_id
            next_id += 1
            nodes.append(None)  # type: ignore[arg-type]
            child_ids.append(cid)
            queue.append((cid, cs))
        nodes[node_id] = TreeNode(node_id, members, split, tuple(child_ids))
    return VanishingTree(tuple(nodes), 0)


@dataclass(frozen=True)
class SectionPath:
    """Interior nodes of the germ-set tree traversed by a section.

    ``matches`` records the input index the section coincides with, or
    None when the section is generic.
    """

    nodes: tuple[int, ...]
    matches: int | None

    def to_json(self) -> dict:
        return {"nodes": list(self.nodes),
                "terminal": "generic" if self.matches is None
                else {"matches": self.matches + 1}}


def section_depths(germs, section: Germ) -> tuple[list[int | float], int | None]:
    """Orders of vanishing of p_i - s, and the index matched exactly by s.

    A germ whose stored coefficients equal the section's is treated as an
    exact match (depth INFINITE_ORDER); indistinguishable-but-unequal pairs
    raise AmbiguousTruncation.
    """
    depths: list[int | float] = []
    match: int | None = None
    for i, p in enumerate(germs):
        diff = p - section
        if diff.is_zero():
            if p.same_coefficients(section):
                if match is not None:  # pragma: no cover - inputs not distinct
                    raise AmbiguousTruncation(match, i)
                match = i
                depths.append(INFINITE_ORDER)
            else:
                raise AmbiguousTruncation(i, None)
        else:
            depths.append(int(diff.items[0][0]))
    return depths, match


def section_path(germs, section: Germ, tree: VanishingTree | None = None) -> SectionPath:
    """Path in the tree of ``germs`` determined by the section.

    Visits the interior nodes whose members all agree with the section to
    at least the node's entry depth; nodes that are leaves of the germ-set
    tree are not part of the path.
    """
    S = list(germs)
    if tree is None:
        tree = build_tree(S)
    depths, match = section_depths(S, section)
    finite = sorted({d for d in depths if d != INFINITE_ORDER})
    node_ids = []
    for d in finite:
        members = tuple(sorted(i for i in range(len(S)) if depths[i] >= d))
        if len(members) < 2:
            continue
        nid = tree.id_of_members(members)
        if nid is None:  # pragma: no cover - ultrametric guarantee
            raise AssertionError(f"section class {members} is not a tree node")
        node_ids.append(nid)
    return SectionPath(tuple(node_ids), match)
