import random
from fractions import Fraction as F

import pytest

from bubblekit import (AngleVector, ConeModel, FamilyConfig, GaussRat, Germ,
                       alpha_exponents, alpha_of_lambda, bubble_at_node,
                       bubble_tree, build_tree, classify_rescaled_limit,
                       subcone_angle)
from bubblekit.errors import ClusterMismatch, CollapseViolation
from conftest import germ, random_plane_instance, random_sphere_family


class TestSubconeAngle:
    def test_two_points(self):
        assert subcone_angle([F(7, 10), F(6, 10)]) == F(3, 10)

    def test_single(self):
        assert subcone_angle([F(2, 3)]) == F(2, 3)

    def test_collapse(self):
        with pytest.raises(CollapseViolation):
            subcone_angle([F(1, 2), F(1, 2)])


class TestBubbleAtNode:
    def test_fig4_inner_node(self, fig4_germs):
        config = FamilyConfig(tuple(fig4_germs), AngleVector((F(9, 10),) * 4))
        tree = build_tree(fig4_germs)
        inner = next(n.id for n in tree.nodes if set(n.members) == {0, 1, 2})
        bubble = bubble_at_node(tree, inner, config)
        assert {(p.position.re, p.position.im) for p in bubble.cone_points} == {
            (0, 0), (-1, 0), (1, 0)}
        assert all(p.angle == F(9, 10) for p in bubble.cone_points)
        assert bubble.gamma_infinity == F(7, 10)

    def test_leaf_rejected(self):
        tree = build_tree([germ("t")])
        config = FamilyConfig((germ("t"),), AngleVector((F(3, 4),)))
        with pytest.raises(ValueError, match="leaf"):
            bubble_at_node(tree, tree.root, config)

    def test_opposite_pair(self):
        germs = (germ("t"), germ("-t"))
        config = FamilyConfig(germs, AngleVector((F(3, 4), F(3, 4))))
        tree = build_tree(germs)
        bubble = bubble_at_node(tree, tree.root, config)
        assert {(p.position.re, p.position.im) for p in bubble.cone_points} == {
            (1, 0), (-1, 0)}
        assert bubble.gamma_infinity == F(1, 2)


class TestBubbleTree:
    def test_example_plane(self, fig4_germs):
        config = FamilyConfig(tuple(fig4_germs), AngleVector((F(9, 10),) * 4))
        report = bubble_tree(config)
        assert len(report.clusters) == 1
        bubbles = dict(report.clusters[0].bubbles)
        assert len(bubbles) == 2
        tree = report.clusters[0].tree
        root_bubble = bubbles[tree.root]
        assert root_bubble.gamma_infinity == F(6, 10)
        assert {str(p.angle) for p in root_bubble.cone_points} == {"7/10", "9/10"}

    def test_sphere_no_collision(self):
        points = tuple(Germ.constant(k, 4) for k in range(4))
        config = FamilyConfig(points, AngleVector((F(1, 2),) * 4), "sphere")
        report = bubble_tree(config)
        assert report.limit_positions == tuple(GaussRat(F(k)) for k in range(4))
        assert report.limit_angles == (F(1, 2),) * 4
        assert all(not c.bubbles for c in report.clusters)

    def test_sphere_collision_cluster_boundary(self):
        points = (germ("1 + t + O(t^4)"), germ("1 - t + O(t^4)"),
                  Germ.constant(0, 4), Germ.constant(2, 4))
        angles = AngleVector((F(1, 2), F(1, 2), F(1, 2), F(1, 2)))
        config = FamilyConfig(points, angles, "sphere")
        with pytest.raises(CollapseViolation):
            bubble_tree(config)

    def test_gauss_bonnet_closure_on_limits(self):
        rng = random.Random(23)
        for _ in range(10):
            config = random_sphere_family(rng)
            report = bubble_tree(config)
            assert sum((1 - g for g in report.limit_angles), F(0)) == 2

    def test_angle_conservation_every_node(self):
        rng = random.Random(29)
        for _ in range(10):
            config, _ = random_plane_instance(rng)
            report = bubble_tree(config)
            for _, bubble in report.clusters[0].bubbles:
                deficit = sum((1 - p.angle for p in bubble.cone_points), F(0))
                assert 1 - bubble.gamma_infinity == deficit


class TestAlphaExponents:
    def test_two_point_collision(self):
        germs = (germ("t"), germ("-t"))
        b1, b2 = F(7, 10), F(6, 10)
        config = FamilyConfig(germs, AngleVector((b1, b2)))
        analysis = alpha_exponents(config, germ("0 + O(t^2)"))
        assert analysis.alphas() == (b1 + b2 - 1,)
        assert analysis.breakpoints[0].d == 1
        assert analysis.terminal.is_plane

    def test_two_scale_family(self):
        germs = tuple(germ(s) for s in ["t + O(t^4)", "-t + O(t^4)",
                                        "t^2 + O(t^4)", "-t^2 + O(t^4)"])
        config = FamilyConfig(germs, AngleVector((F(9, 10),) * 4))
        analysis = alpha_exponents(config, germ("0 + O(t^4)"))
        assert analysis.alphas() == (F(6, 10), F(14, 10))

    def test_terminal_matched_cone(self, fig4_germs):
        config = FamilyConfig(tuple(fig4_germs), AngleVector((F(9, 10),) * 4))
        analysis = alpha_exponents(config, germ("t^2"))
        assert analysis.terminal == ConeModel(F(9, 10))

    def test_sphere_restricts_to_cluster(self):
        points = (germ("t + O(t^4)"), germ("-t + O(t^4)"),
                  Germ.constant(1, 4), Germ.constant(2, 4), Germ.constant(3, 4))
        angles = AngleVector((F(4, 5), F(4, 5), F(7, 15), F(7, 15), F(7, 15)))
        assert angles.deficit() == 2
        config = FamilyConfig(points, angles, "sphere")
        analysis = alpha_exponents(config, germ("0 + O(t^4)"))
        # cluster gamma: 1 - 2*(1/5) = 3/5, so alpha_1 = 3/5
        assert analysis.gamma == F(3, 5)
        assert analysis.alphas() == (F(3, 5),)

    def test_sphere_cluster_mismatch(self):
        points = (germ("t + O(t^4)"), germ("-t + O(t^4)"),
                  Germ.constant(1, 4), Germ.constant(2, 4), Germ.constant(3, 4))
        angles = AngleVector((F(4, 5), F(4, 5), F(7, 15), F(7, 15), F(7, 15)))
        config = FamilyConfig(points, angles, "sphere")
        with pytest.raises(ClusterMismatch):
            alpha_exponents(config, germ("5 + t + O(t^4)"))

    def test_plane_requires_collision(self):
        points = (germ("t + O(t^4)"), germ("1 + t + O(t^4)"))
        config = FamilyConfig(points, AngleVector((F(9, 10), F(9, 10))))
        with pytest.raises(ClusterMismatch):
            alpha_exponents(config, germ("0 + O(t^4)"))

    def test_section_centered_bubble_positions(self, fig4_germs):
        config = FamilyConfig(tuple(fig4_germs), AngleVector((F(9, 10),) * 4))
        analysis = alpha_exponents(config, germ("t - t^4 + t^5 + O(t^6)"))
        assert [bp.d for bp in analysis.breakpoints] == [1, 4, 5]
        level4 = analysis.breakpoints[1].bubble
        assert {(p.position.re, p.position.im) for p in level4.cone_points} == {
            (0, 0), (1, 0), (2, 0)}
        assert analysis.breakpoints[1].alpha == F(27, 10)


class TestClassify:
    def make(self):
        germs = (germ("t"), germ("-t"))
        config = FamilyConfig(germs, AngleVector((F(7, 10), F(6, 10))))
        return alpha_exponents(config, germ("0 + O(t^2)"))

    def test_cone_regime(self):
        analysis = self.make()
        gamma = F(3, 10)
        result = classify_rescaled_limit(analysis, gamma / 2)
        assert isinstance(result, ConeModel)
        assert result.gamma == gamma

    def test_bubble_at_breakpoint(self):
        analysis = self.make()
        bubble, base = classify_rescaled_limit(analysis, F(3, 10))
        assert base == bubble.basepoint
        assert len(bubble.cone_points) == 2

    def test_terminal_plane(self):
        analysis = self.make()
        result = classify_rescaled_limit(analysis, F(3, 10) + 1)
        assert isinstance(result, ConeModel) and result.is_plane

    def test_alpha_must_be_positive(self):
        with pytest.raises(ValueError):
            classify_rescaled_limit(self.make(), 0)


class TestAlphaOfLambda:
    def test_zero(self):
        germs = (germ("t"), germ("-t"))
        config = FamilyConfig(germs, AngleVector((F(7, 10), F(6, 10))))
        analysis = alpha_exponents(config, germ("0 + O(t^2)"))
        assert alpha_of_lambda(analysis, 0) == 0
        assert alpha_of_lambda(analysis, F(1, 2)) == F(3, 10) / 2

    def test_matches_breakpoints_and_convex(self):
        rng = random.Random(31)
        for _ in range(30):
            config, section = random_plane_instance(rng)
            try:
                analysis = alpha_exponents(config, section)
            except ClusterMismatch:
                continue
            alphas = analysis.alphas()
            assert all(a < b for a, b in zip(alphas, alphas[1:]))
            for bp in analysis.breakpoints:
                assert alpha_of_lambda(analysis, bp.d) == bp.alpha
            # convexity of the piecewise-linear profile: slopes increase
            grid = [F(k, 4) for k in range(0, 41)]
            vals = [alpha_of_lambda(analysis, x) for x in grid]
            slopes = [(b - a) * 4 for a, b in zip(vals, vals[1:])]
            assert all(s2 >= s1 for s1, s2 in zip(slopes, slopes[1:]))
            assert all(s > 0 for s in slopes)


class TestEquivariance:
    def test_affine_reparameterization(self):
        rng = random.Random(37)
        count = 0
        while count < 15:
            config, section = random_plane_instance(rng)
            try:
                base = alpha_exponents(config, section)
            except ClusterMismatch:
                continue
            count += 1
            a = GaussRat(F(2), F(1))
            c = Germ.constant(GaussRat(F(-3), F(2)), 12)
            moved = FamilyConfig(tuple(p * a + c for p in config.points),
                                 config.angles)
            moved_analysis = alpha_exponents(moved, section * a + c)
            assert moved_analysis.alphas() == base.alphas()
            assert [bp.d for bp in moved_analysis.breakpoints] == [
                bp.d for bp in base.breakpoints]
            for bp_m, bp_b in zip(moved_analysis.breakpoints, base.breakpoints):
                scaled = sorted(((p.position * a).sort_key()
                                 for p in bp_b.bubble.cone_points))
                got = sorted((p.position.sort_key()
                              for p in bp_m.bubble.cone_points))
                assert got == scaled
