import random
from fractions import Fraction

import pytest

from bubblekit import (AngleVector, FamilyConfig, GaussRat, Germ, parse_germ,
                       agree_order, INFINITE_ORDER)


def germ(text: str) -> Germ:
    return parse_germ(text)


FIG4_TEXTS = ["t + O(t^6)", "t - t^4 + O(t^6)", "t + t^4 + O(t^6)",
              "t^2 + O(t^6)"]


@pytest.fixture
def fig4_germs():
    return [germ(t) for t in FIG4_TEXTS]


def random_gauss(rng: random.Random, span: int = 4) -> GaussRat:
    return GaussRat(Fraction(rng.randint(-span, span)),
                    Fraction(rng.randint(-span, span)))


def random_vanishing_germ(rng: random.Random, trunc: int = 12,
                          max_order: int = 4) -> Germ:
    order = rng.randint(1, max_order)
    coeffs = {}
    lead = GaussRat(Fraction(rng.choice([-3, -2, -1, 1, 2, 3])),
                    Fraction(rng.randint(-2, 2)))
    coeffs[order] = lead
    for k in range(order + 1, trunc):
        if rng.random() < 0.3:
            coeffs[k] = random_gauss(rng)
    return Germ(coeffs, trunc)


def distinguishable(germs) -> bool:
    for i in range(len(germs)):
        for j in range(i + 1, len(germs)):
            if agree_order(germs[i], germs[j]) == INFINITE_ORDER:
                return False
    return True


def random_deficits(rng: random.Random, n: int, total_num: int,
                    total_den: int) -> list[Fraction]:
    """n positive rational deficits summing exactly to total_num/total_den,
    each strictly below 1."""
    while True:
        raw = [rng.randint(1, 40) for _ in range(n)]
        s = sum(raw)
        deficits = [Fraction(a * total_num, s * total_den) for a in raw]
        if all(d < 1 for d in deficits):
            return deficits


def random_plane_instance(rng: random.Random, n_min: int = 2, n_max: int = 5):
    """Pairwise distinguishable colliding germs with subcritical angles and
    a section vanishing at t = 0."""
    while True:
        n = rng.randint(n_min, n_max)
        germs = [random_vanishing_germ(rng) for _ in range(n)]
        if not distinguishable(germs):
            continue
        deficits = random_deficits(rng, n, 1, 2)  # total deficit 1/2
        betas = AngleVector(tuple(1 - d for d in deficits))
        roll = rng.random()
        if roll < 0.15:
            section = germs[rng.randrange(n)]
        elif roll < 0.5:
            base = germs[rng.randrange(n)]
            section = base + random_vanishing_germ(rng, max_order=6)
        else:
            section = random_vanishing_germ(rng)
        bad = False
        for g in germs:
            diff = g - section
            if diff.is_zero() and not g.same_coefficients(section):
                bad = True
        if bad:
            continue
        config = FamilyConfig(tuple(germs), betas, "plane")
        return config, section


def random_sphere_family(rng: random.Random):
    """Sphere family with at least one multi-point collision cluster."""
    while True:
        n_clusters = rng.randint(3, 5)
        sizes = [rng.randint(1, 3) for _ in range(n_clusters)]
        if max(sizes) < 2:
            sizes[0] = 2
        values = rng.sample(range(-8, 9), n_clusters)
        germs = []
        for value, size in zip(values, sizes):
            const = Germ.constant(Fraction(value), 12)
            cluster = []
            while len(cluster) != size or not distinguishable(cluster):
                cluster = [const + random_vanishing_germ(rng)
                           for _ in range(size)]
            germs.extend(cluster)
        cluster_deficits = random_deficits(rng, n_clusters, 2, 1)
        deficits = []
        for d, size in zip(cluster_deficits, sizes):
            deficits.extend(Fraction(d, size) for _ in range(size))
        betas = AngleVector(tuple(1 - d for d in deficits))
        return FamilyConfig(tuple(germs), betas, "sphere")
