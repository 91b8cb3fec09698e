import random
from fractions import Fraction

import pytest

from bubblekit import (GaussRat, Germ, build_tree, parse_germ, section_path)
from bubblekit.errors import AmbiguousTruncation
from conftest import distinguishable, germ, random_vanishing_germ


def members_of(tree):
    return {node.id: set(node.members) for node in tree.nodes}


class TestBuildTree:
    def test_fig4_golden(self, fig4_germs):
        tree = build_tree(fig4_germs)
        root = tree.node(tree.root)
        assert set(root.members) == {0, 1, 2, 3}
        assert root.split_order == 1
        kids = [tree.node(c) for c in root.children]
        assert [set(k.members) for k in kids] == [{0, 1, 2}, {3}]
        inner = kids[0]
        assert inner.split_order == 4
        assert [set(tree.node(c).members) for c in inner.children] == [
            {0}, {1}, {2}]
        assert tree.node(kids[1].id).is_leaf

    def test_singleton(self):
        tree = build_tree([germ("t")])
        assert len(tree.nodes) == 1
        assert tree.node(tree.root).is_leaf

    def test_zero_and_cube(self):
        tree = build_tree([germ("0 + O(t^6)"), germ("t^3 + O(t^6)")])
        root = tree.node(tree.root)
        assert root.split_order == 3
        assert len(root.children) == 2

    def test_ambiguous_truncation(self):
        with pytest.raises(AmbiguousTruncation) as err:
            build_tree([germ("t + O(t^3)"), germ("t + t^4 + O(t^5)")])
        assert (err.value.i, err.value.j) == (0, 1)

    def test_empty_input(self):
        with pytest.raises(ValueError):
            build_tree([])

    def test_affine_invariance(self):
        rng = random.Random(7)
        for _ in range(25):
            germs = [random_vanishing_germ(rng) for _ in range(4)]
            if not distinguishable(germs):
                continue
            a = GaussRat(Fraction(3), Fraction(-2))
            c = Germ.constant(GaussRat(Fraction(5), Fraction(1)), 12)
            moved = [g * a + c for g in germs]
            t1, t2 = build_tree(germs), build_tree(moved)
            assert members_of(t1) == members_of(t2)
            assert [n.split_order for n in t1.nodes] == [
                n.split_order for n in t2.nodes]

    def test_node_count_bound(self):
        rng = random.Random(11)
        for _ in range(25):
            n = rng.randint(1, 6)
            germs = [random_vanishing_germ(rng) for _ in range(n)]
            if not distinguishable(germs):
                continue
            assert len(build_tree(germs).nodes) <= 2 * n - 1

    def test_split_orders_increase_along_paths(self):
        rng = random.Random(13)
        for _ in range(25):
            germs = [random_vanishing_germ(rng) for _ in range(5)]
            if not distinguishable(germs):
                continue
            tree = build_tree(germs)
            for node in tree.nodes:
                if node.is_leaf:
                    continue
                for cid in tree.node(node.id).children:
                    child = tree.node(cid)
                    if not child.is_leaf:
                        assert child.split_order > node.split_order


class TestSectionPath:
    def test_fig5_golden(self, fig4_germs):
        path = section_path(fig4_germs, germ("t - t^4 + t^5 + O(t^6)"))
        tree = build_tree(fig4_germs)
        assert [set(tree.node(i).members) for i in path.nodes] == [
            {0, 1, 2, 3}, {0, 1, 2}]
        assert path.matches is None

    def test_exact_match(self, fig4_germs):
        path = section_path(fig4_germs, germ("t^2"))
        tree = build_tree(fig4_germs)
        assert [set(tree.node(i).members) for i in path.nodes] == [{0, 1, 2, 3}]
        assert path.matches == 3

    def test_singleton_no_interior(self):
        path = section_path([germ("0 + O(t^6)")], germ("5*t + O(t^6)"))
        assert path.nodes == ()
        assert path.matches is None

    def test_ambiguous_section(self):
        with pytest.raises(AmbiguousTruncation) as err:
            section_path([germ("t + t^5 + O(t^6)")], germ("t + O(t^3)"))
        assert err.value.j is None

    def test_path_consistency_with_leaf_ancestors(self):
        # removing one germ and using it as the section visits exactly the
        # interior ancestors of its leaf
        rng = random.Random(17)
        done = 0
        while done < 25:
            germs = [random_vanishing_germ(rng) for _ in range(5)]
            if not distinguishable(germs):
                continue
            done += 1
            tree = build_tree(germs)
            i = rng.randrange(5)
            rest = germs[:i] + germs[i + 1:]
            if not distinguishable(rest):
                continue
            sub = section_path(rest, germs[i])
            subtree = build_tree(rest)
            expected = []
            for nid in tree.ancestors_of_leaf(i):
                members = [m for m in tree.node(nid).members if m != i]
                mapped = tuple(sorted(m - (1 if m > i else 0) for m in members))
                if len(mapped) >= 2:
                    expected.append(subtree.id_of_members(mapped))
            # every interior ancestor (with i removed) appears on the path
            assert set(expected) <= set(sub.nodes)

    def test_dot_and_json_exports(self, fig4_germs):
        tree = build_tree(fig4_germs)
        dot = tree.to_dot()
        assert 'n0 [label="{p1,p2,p3,p4}\\nk=1"];' in dot
        assert "n0 -> n1;" in dot
        data = tree.to_json()
        assert data["root"] == 0
        assert data["nodes"][0]["members"] == [1, 2, 3, 4]
