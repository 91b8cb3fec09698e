import random
from fractions import Fraction as F

import pytest

from bubblekit import (AngleVector, Component, GaussRat, INF, MarkedTuple,
                       NodalCurve, bubbletree_shape, bubbletree_to_nodal_curve,
                       is_beta_stable, nodal_curve_to_bubbletree_shape,
                       node_weights, non_collapse_check, principal_component,
                       principal_component_bruteforce, resolve)
from bubblekit.errors import WeightOne
from conftest import random_deficits, random_sphere_family


def two_component_curve():
    return NodalCurve((Component(0, frozenset({0, 1})),
                       Component(1, frozenset({2, 3}))), ((0, 1),))


def chain_curve():
    return NodalCurve((Component(0, frozenset({0, 1})),
                       Component(1, frozenset({2})),
                       Component(2, frozenset({3, 4}))), ((0, 1), (1, 2)))


def star_curve():
    return NodalCurve((Component(0, frozenset({6})),
                       Component(1, frozenset({0, 1})),
                       Component(2, frozenset({2, 3})),
                       Component(3, frozenset({4, 5}))),
                      ((0, 1), (0, 2), (0, 3)))


def random_stable_curve(rng: random.Random):
    """Random stable dual tree with a non-collapsing angle vector.

    An odd total for the integer deficit numerators rules out subset sums
    hitting exactly half, so non-collapse holds by construction.
    """
    n_comp = rng.randint(1, 5)
    edges = []
    for cid in range(1, n_comp):
        edges.append((rng.randrange(cid), cid))
    degree = {i: 0 for i in range(n_comp)}
    for a, b in edges:
        degree[a] += 1
        degree[b] += 1
    marks_per = [max(0, 3 - degree[i]) + rng.randint(0, 2)
                 for i in range(n_comp)]
    n = sum(marks_per)
    order = list(range(n))
    rng.shuffle(order)
    comps = []
    cursor = 0
    for cid, k in enumerate(marks_per):
        comps.append(Component(cid, frozenset(order[cursor:cursor + k])))
        cursor += k
    curve = NodalCurve(tuple(comps), tuple(edges))
    while True:
        raw = [rng.randint(1, 40) for _ in range(n)]
        if sum(raw) % 2 == 0:
            continue
        deficits = [F(2 * a, sum(raw)) for a in raw]
        if all(d < 1 for d in deficits):
            betas = AngleVector(tuple(1 - d for d in deficits))
            return curve, betas


class TestMarkedTuple:
    def test_from_values_blocks(self):
        mt = MarkedTuple.from_values([GaussRat(F(0)), GaussRat(F(1)),
                                      GaussRat(F(0)), INF])
        assert mt.blocks() == [(0, 2), (1,), (3,)]

    def test_distinct_values_required(self):
        with pytest.raises(ValueError):
            MarkedTuple((0, 1), (GaussRat(F(1)), GaussRat(F(1))))


class TestNonCollapse:
    def test_symmetric_violation(self):
        assert non_collapse_check(AngleVector((F(1, 2),) * 4)) is False

    def test_five_point_example(self):
        betas = AngleVector((F(7, 10),) * 4 + (F(1, 5),))
        assert betas.deficit() == 2
        assert non_collapse_check(betas) is True
        # independent exhaustive enumeration
        deficits = [1 - b for b in betas.betas]
        sums = set()
        for mask in range(1, 2 ** 5):
            sums.add(sum(d for i, d in enumerate(deficits) if mask >> i & 1))
        assert F(1) not in sums

    def test_requires_gauss_bonnet(self):
        with pytest.raises(ValueError):
            non_collapse_check(AngleVector((F(1, 2),)))


class TestBetaStable:
    def test_all_distinct(self):
        mt = MarkedTuple.from_values([GaussRat(F(k)) for k in range(5)])
        betas = AngleVector((F(7, 10),) * 4 + (F(1, 5),))
        assert is_beta_stable(mt, betas) is True

    def test_triple_collision_wall(self):
        vals = [GaussRat(F(0)), GaussRat(F(0)), GaussRat(F(0)),
                GaussRat(F(1)), GaussRat(F(2))]
        mt = MarkedTuple.from_values(vals)
        stable_side = AngleVector((F(7, 10),) * 4 + (3 - 4 * F(7, 10),))
        assert is_beta_stable(mt, stable_side) is True
        unstable_side = AngleVector((F(6, 10),) * 4 + (3 - 4 * F(6, 10),))
        assert is_beta_stable(mt, unstable_side) is False


class TestNodeWeights:
    def test_direct_sum(self):
        betas = AngleVector((F(3, 4), F(3, 4), F(1, 4), F(1, 4)))
        w = node_weights(two_component_curve(), betas)
        assert w.toward(0, 1) == F(3, 2)
        assert w.toward(1, 0) == F(1, 2)
        assert w.toward(0, 1) + w.toward(1, 0) == 2

    def test_single_component_empty(self):
        curve = NodalCurve((Component(0, frozenset({0, 1, 2, 3})),), ())
        betas = AngleVector((F(1, 2),) * 4)
        assert node_weights(curve, betas).weights == {}

    def test_weight_one(self):
        betas = AngleVector((F(1, 2),) * 4)
        with pytest.raises(WeightOne):
            node_weights(two_component_curve(), betas)

    def test_two_direction_identity_random(self):
        rng = random.Random(41)
        for _ in range(30):
            curve, betas = random_stable_curve(rng)
            w = node_weights(curve, betas)
            for a, b in curve.edges:
                assert w.toward(a, b) + w.toward(b, a) == 2
                assert (w.toward(a, b) < 1) != (w.toward(b, a) < 1)


class TestPrincipal:
    def test_two_component(self):
        betas = AngleVector((F(3, 4), F(3, 4), F(1, 4), F(1, 4)))
        assert principal_component(two_component_curve(), betas) == 1

    def test_single_component(self):
        curve = NodalCurve((Component(0, frozenset({0, 1, 2})),), ())
        betas = AngleVector((F(1, 3),) * 3)
        assert principal_component(curve, betas) == 0

    def test_chain(self):
        betas = AngleVector((F(2, 3), F(2, 3), F(1, 3), F(2, 3), F(2, 3)))
        curve = chain_curve()
        assert (principal_component(curve, betas)
                == principal_component_bruteforce(curve, betas))

    def test_matches_bruteforce_random(self):
        rng = random.Random(43)
        for _ in range(40):
            curve, betas = random_stable_curve(rng)
            assert (principal_component(curve, betas)
                    == principal_component_bruteforce(curve, betas))


class TestResolve:
    def test_single_component_identity(self):
        curve = NodalCurve((Component(0, frozenset({0, 1, 2})),), ())
        betas = AngleVector((F(1, 3),) * 3)
        mt = resolve(curve, betas)
        assert mt.blocks() == [(0,), (1,), (2,)]

    def test_two_component_collapse(self):
        betas = AngleVector((F(3, 4), F(3, 4), F(1, 4), F(1, 4)))
        mt = resolve(two_component_curve(), betas)
        assert sorted(mt.blocks()) == [(0, 1), (2,), (3,)]
        assert is_beta_stable(mt, betas)

    def test_star_three_petals(self):
        # center principal: petal marks collapse into one block per petal
        deficits = [F(1, 4)] * 6 + [F(1, 2)]
        betas = AngleVector(tuple(1 - d for d in deficits))
        assert sum(deficits) == 2
        mt = resolve(star_curve(), betas)
        assert sorted(mt.blocks()) == [(0, 1), (2, 3), (4, 5), (6,)]

    def test_output_always_stable(self):
        rng = random.Random(47)
        for _ in range(40):
            curve, betas = random_stable_curve(rng)
            assert is_beta_stable(resolve(curve, betas), betas)


class TestCorrespondence:
    def test_no_collision_single_component(self):
        from bubblekit import FamilyConfig, Germ
        points = tuple(Germ.constant(k, 4) for k in range(4))
        config = FamilyConfig(points, AngleVector((F(1, 2),) * 4), "sphere")
        curve = bubbletree_to_nodal_curve(config)
        assert len(curve.components) == 1
        assert curve.components[0].marks == frozenset({0, 1, 2, 3})

    def test_one_pair_cluster(self):
        from bubblekit import FamilyConfig, Germ
        from conftest import germ
        points = (germ("t + O(t^4)"), germ("-t + O(t^4)"),
                  Germ.constant(1, 4), Germ.constant(2, 4), Germ.constant(3, 4))
        angles = AngleVector((F(4, 5), F(4, 5), F(7, 15), F(7, 15), F(7, 15)))
        config = FamilyConfig(points, angles, "sphere")
        curve = bubbletree_to_nodal_curve(config)
        assert len(curve.components) == 2
        marks = sorted(sorted(c.marks) for c in curve.components)
        assert marks == [[0, 1], [2, 3, 4]]
        assert principal_component(curve, angles) == 0
        shape = nodal_curve_to_bubbletree_shape(curve, angles)
        assert shape == bubbletree_shape(config)
        assert shape.children[0].cone_end == F(3, 5)

    def test_fig4_embedded_in_sphere(self, fig4_germs):
        from bubblekit import FamilyConfig, Germ
        extra = [Germ.constant(k, 6) for k in (1, 2, 3)]
        angles = AngleVector((F(9, 10),) * 4 + (F(7, 15),) * 3)
        config = FamilyConfig(tuple(fig4_germs) + tuple(extra), angles, "sphere")
        curve = bubbletree_to_nodal_curve(config)
        assert len(curve.components) == 3
        assert principal_component(curve, angles) == 0

    def test_round_trip_random(self):
        rng = random.Random(53)
        for _ in range(25):
            config = random_sphere_family(rng)
            shape = bubbletree_shape(config)
            curve = bubbletree_to_nodal_curve(config)
            assert nodal_curve_to_bubbletree_shape(curve, config.angles) == shape

    def test_curve_json_round_trip(self):
        curve = chain_curve()
        assert NodalCurve.from_json(curve.to_json()) == curve
