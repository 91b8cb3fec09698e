"""Numeric cross-checks of the symbolic predictions.

Line elements prod |z - p_i|**(beta_i - 1) are integrated along polylines
with adaptive Gauss-Kronrod panels; a segment ending on a cone point gets
the substitution u = v**(1/beta), which removes that factor's integrable
singularity exactly.  On top of the length routine sit cone-angle probes,
a polyline distance surrogate with a slope fit, and the total-area
integral of sphere configurations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import adaptive_gk, line_element
from .errors import RadiiTooLarge
from .flat import SPHERE_AMBIENT, FamilyConfig


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    max_depth: int = 40
    singularity_guard: float = 1e-9

    def __post_init__(self):
        if not (0 < self.rel_tol <= 1e-2):
            raise ValueError("rel_tol must be in (0, 1e-2]")
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")


@dataclass(frozen=True)
class NumericConeConfig:
    """Cone points frozen to floats for quadrature."""

    positions: tuple[complex, ...]
    angles: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(complex(p) for p in self.positions))
        object.__setattr__(self, "angles", tuple(float(b) for b in self.angles))
        if len(self.positions) != len(self.angles):
            raise ValueError("one angle per cone point required")
        object.__setattr__(self, "_p_re",
                           np.array([p.real for p in self.positions]))
        object.__setattr__(self, "_p_im",
                           np.array([p.imag for p in self.positions]))
        object.__setattr__(self, "_bm1",
                           np.array(self.angles) - 1.0)

    @staticmethod
    def from_family(config: FamilyConfig, t: complex) -> "NumericConeConfig":
        return NumericConeConfig(
            tuple(p.evaluate(t) for p in config.points),
            tuple(float(b) for b in config.angles.betas))

    def arrays(self, skip: int | None = None):
        if skip is None:
            return self._p_re, self._p_im, self._bm1
        keep = np.arange(len(self.positions)) != skip
        return self._p_re[keep], self._p_im[keep], self._bm1[keep]


def _eval_lambda(cfg: NumericConeConfig, zs: np.ndarray,
                 skip: int | None = None) -> np.ndarray:
    p_re, p_im, bm1 = cfg.arrays(skip)
    if p_re.size == 0:
        return np.ones(zs.shape[0])
    return line_element(np.ascontiguousarray(zs.real),
                        np.ascontiguousarray(zs.imag), p_re, p_im, bm1)


def _nearest_point(cfg: NumericConeConfig, z: complex) -> tuple[int | None, float]:
    best, dist = None, math.inf
    for i, p in enumerate(cfg.positions):
        d = abs(z - p)
        if d < dist:
            best, dist = i, d
    return best, dist


def _segment_length(cfg: NumericConeConfig, za: complex, zb: complex,
                    spec: QuadratureSpec) -> float:
    """Metric length of the straight segment [za, zb]."""
    dz = zb - za
    seg = abs(dz)
    if seg == 0.0:
        return 0.0
    scale = max(1.0, abs(za), abs(zb))
    snap = spec.singularity_guard * scale

    # split at interior passes through (or exactly onto) cone points
    cuts = [0.0, 1.0]
    for p in cfg.positions:
        u = ((p - za).real * dz.real + (p - za).imag * dz.imag) / (seg * seg)
        if 1e-12 < u < 1 - 1e-12:
            perp = abs(za + u * dz - p)
            if perp <= max(snap, 0.05 * seg):
                cuts.append(u)
    cuts = sorted(set(cuts))

    total = 0.0
    for u0, u1 in zip(cuts, cuts[1:]):
        a = za + u0 * dz
        b = za + u1 * dz
        ia, da = _nearest_point(cfg, a)
        ib, db = _nearest_point(cfg, b)
        hit_a = ia if da <= snap else None
        hit_b = ib if db <= snap else None
        if hit_a is not None and hit_b is not None:
            m = 0.5 * (a + b)
            total += _single_segment(cfg, a, m, hit_a, None, spec)
            total += _single_segment(cfg, m, b, None, hit_b, spec)
        else:
            total += _single_segment(cfg, a, b, hit_a, hit_b, spec)
    return total


def _single_segment(cfg: NumericConeConfig, a: complex, b: complex,
                    hit_a: int | None, hit_b: int | None,
                    spec: QuadratureSpec) -> float:
    if hit_b is not None:
        return _single_segment(cfg, b, a, hit_b, None, spec)
    dz = b - a
    seg = abs(dz)
    if hit_a is None:
        def f(us):
            return _eval_lambda(cfg, a + us * dz) * seg
        return adaptive_gk(f, 0.0, 1.0, spec.rel_tol, spec.max_depth)
    beta = cfg.angles[hit_a]
    p = cfg.positions[hit_a]

    # z(u) = p + u*dz up to the snap offset; the hit factor contributes
    # (u*seg)**(beta-1) and u = v**(1/beta) removes it exactly
    def f(vs):
        us = vs ** (1.0 / beta)
        zs = p + us * dz
        return _eval_lambda(cfg, zs, skip=hit_a) * seg ** beta / beta
    return adaptive_gk(f, 0.0, 1.0, spec.rel_tol, spec.max_depth)


def path_length(cfg: NumericConeConfig, polyline, spec: QuadratureSpec | None = None) -> float:
    """Length of a polyline in the conical flat metric.

    Segments may start or end on cone points; the singular factor is
    integrated in closed form through a power-law substitution.
    """
    spec = spec or QuadratureSpec()
    pts = [complex(z) for z in polyline]
    if len(pts) < 2:
        raise ValueError("polyline needs at least two vertices")
    for u, v in zip(pts, pts[1:]):
        if u == v:
            raise ValueError("polyline vertices must be distinct")
    return sum(_segment_length(cfg, u, v, spec) for u, v in zip(pts, pts[1:]))


# ---------------------------------------------------------------------------
# Cone angle probes
# ---------------------------------------------------------------------------


def _circumference(cfg: NumericConeConfig, center: complex, r: float,
                   spec: QuadratureSpec) -> float:
    def f(thetas):
        zs = center + r * np.exp(1j * thetas)
        return _eval_lambda(cfg, zs) * r
    return adaptive_gk(f, 0.0, 2.0 * math.pi, spec.rel_tol, spec.max_depth)


def _neville_at_zero(xs: list[float], ys: list[float]) -> float:
    vals = list(ys)
    n = len(vals)
    for level in range(1, n):
        for i in range(n - level):
            x0, x1 = xs[i], xs[i + level]
            vals[i] = (x1 * vals[i] - x0 * vals[i + 1]) / (x1 - x0)
    return vals[0]


def cone_angle_probe(cfg: NumericConeConfig, center: complex, radii,
                     spec: QuadratureSpec | None = None) -> float:
    """Cone angle at a point (or at infinity) as a multiple of 2*pi.

    Decreasing radii probe the point: the ratio circumference/metric
    radius tends to 2*pi*beta and is Richardson-extrapolated to radius 0.
    Increasing radii probe the cone end at infinity via the growth rate of
    the circumference, which approaches 2*pi*R**gamma.
    """
    spec = spec or QuadratureSpec()
    center = complex(center)
    rs = [float(r) for r in radii]
    if len(rs) < 2 or any(r <= 0 for r in rs):
        raise ValueError("need at least two positive radii")
    increasing = all(a < b for a, b in zip(rs, rs[1:]))
    decreasing = all(a > b for a, b in zip(rs, rs[1:]))
    if not (increasing or decreasing):
        raise ValueError("radii must be strictly monotone")

    if increasing:
        spread = max((abs(p - center) for p in cfg.positions), default=0.0)
        if rs[0] <= 2.0 * spread:
            raise RadiiTooLarge(
                "at-infinity probe needs radii beyond twice the configuration spread")
        logs = np.log(np.array(rs))
        logc = np.log(np.array([_circumference(cfg, center, r, spec) for r in rs]))
        slope = np.polyfit(logs, logc, 1)[0]
        return float(slope)

    others = [abs(p - center) for p in cfg.positions if abs(p - center) > 0]
    if others and max(rs) >= 0.5 * min(others):
        raise RadiiTooLarge(
            f"largest radius {max(rs)} reaches halfway to another cone point")
    ratios = []
    for r in rs:
        circ = _circumference(cfg, center, r, spec)
        rad = _segment_length(cfg, center, center + r, spec)
        ratios.append(circ / (2.0 * math.pi * rad))
    tail = min(3, len(rs))
    return _neville_at_zero(rs[-tail:], ratios[-tail:])


# ---------------------------------------------------------------------------
# Distance surrogate and scaling slopes
# ---------------------------------------------------------------------------


def distance_surrogate(cfg: NumericConeConfig, za: complex, zb: complex,
                       spec: QuadratureSpec | None = None,
                       n_interior: int = 7, max_sweeps: int = 200) -> float:
    """Upper bound for the distance between za and zb: the infimum of
    polyline lengths over a local vertex-perturbation descent seeded with
    the straight segment.

    Only the scaling exponent of the output is used downstream; the
    surrogate is within a constant factor of the distance.
    """
    spec = spec or QuadratureSpec()
    za, zb = complex(za), complex(zb)
    coarse = QuadratureSpec(max(spec.rel_tol, 1e-7), spec.max_depth,
                            spec.singularity_guard)
    verts = [za + (zb - za) * k / (n_interior + 1) for k in range(n_interior + 2)]
    seg_costs = [_segment_length(cfg, u, v, coarse)
                 for u, v in zip(verts, verts[1:])]
    h = abs(zb - za) / (n_interior + 1) / 2.0
    h_min = abs(zb - za) * 1e-4
    for _ in range(max_sweeps):
        improved = False
        for i in range(1, n_interior + 1):
            base = seg_costs[i - 1] + seg_costs[i]
            best = None
            for dv in (h, -h, 1j * h, -1j * h):
                cand = verts[i] + dv
                c_prev = _segment_length(cfg, verts[i - 1], cand, coarse)
                c_next = _segment_length(cfg, cand, verts[i + 1], coarse)
                if c_prev + c_next < base * (1 - 1e-10):
                    base = c_prev + c_next
                    best = (cand, c_prev, c_next)
            if best is not None:
                verts[i], seg_costs[i - 1], seg_costs[i] = best
                improved = True
        if not improved:
            h /= 2.0
            if h < h_min:
                break
    return sum(_segment_length(cfg, u, v, spec)
               for u, v in zip(verts, verts[1:]))


@dataclass(frozen=True)
class SlopeFit:
    samples: tuple[tuple[float, float], ...]   # (log t, log value)
    slope: float
    r2: float

    def __post_init__(self):
        if len(self.samples) < 4:
            raise ValueError("need at least 4 samples for a slope fit")

    def to_csv(self) -> str:
        lines = ["log_t,log_value"]
        lines += [f"{x!r},{y!r}" for x, y in self.samples]
        lines.append(f"# slope={self.slope!r} r2={self.r2!r}")
        return "\n".join(lines) + "\n"


def fit_loglog(ts, values) -> SlopeFit:
    xs = np.log(np.abs(np.array(ts, dtype=float)))
    ys = np.log(np.array(values, dtype=float))
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - np.mean(ys)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return SlopeFit(tuple(zip(xs.tolist(), ys.tolist())), float(slope), r2)


def scaling_slope(family: FamilyConfig, a, b, t_samples,
                  spec: QuadratureSpec | None = None) -> SlopeFit:
    """Least-squares slope of log(distance surrogate between the sections
    a and b) against log|t|."""
    spec = spec or QuadratureSpec()
    distances = []
    for t in t_samples:
        cfg = NumericConeConfig.from_family(family, t)
        za, zb = a.evaluate(t), b.evaluate(t)
        if za == zb:
            raise ValueError(f"sections coincide at t = {t}")
        distances.append(distance_surrogate(cfg, za, zb, spec))
    return fit_loglog(list(t_samples), distances)


# ---------------------------------------------------------------------------
# Total area of a sphere configuration
# ---------------------------------------------------------------------------


def _merge_intervals(intervals: list[tuple[float, float]]) -> list[tuple[float, float]]:
    out: list[tuple[float, float]] = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def _density_squared(cfg: NumericConeConfig, zs: np.ndarray) -> np.ndarray:
    return _eval_lambda(cfg, zs) ** 2


def _patch_area(cfg: NumericConeConfig, i: int, rho: float,
                spec: QuadratureSpec) -> float:
    """Area of the disc of radius rho around cone point i in local polar
    coordinates; the radial factor s**(2 beta - 1) is removed exactly by
    u = s**(2 beta)."""
    beta = cfg.angles[i]
    p = cfg.positions[i]

    def ring(s: float) -> float:
        def f(thetas):
            zs = p + s * np.exp(1j * thetas)
            return _eval_lambda(cfg, zs, skip=i) ** 2
        return adaptive_gk(f, 0.0, 2.0 * math.pi, spec.rel_tol, spec.max_depth)

    def outer(us):
        vals = []
        for u in us:
            s = float(u) ** (1.0 / (2.0 * beta))
            vals.append(ring(s))
        return np.array(vals)

    return adaptive_gk(outer, 0.0, rho ** (2.0 * beta),
                       spec.rel_tol, spec.max_depth) / (2.0 * beta)


def sphere_area(cfg: NumericConeConfig, spec: QuadratureSpec | None = None) -> float:
    """Total area of prod |z - p_i|**(2 beta_i - 2) dA over C.

    Finite by Gauss-Bonnet (deficits sum to 2, so the integrand decays
    like |z|**-4).  Decomposition: a local polar patch around each cone
    point with the radial singularity substituted away, the remaining disc
    in polar coordinates with the patch arcs excluded ring by ring, and
    the inverted chart w = 1/z for the neighbourhood of infinity, where
    the integrand extends smoothly.
    """
    spec = spec or QuadratureSpec()
    total_deficit = sum(1.0 - b for b in cfg.angles)
    if abs(total_deficit - 2.0) > 1e-9:
        raise ValueError("sphere area needs the Gauss-Bonnet constraint")
    ps = cfg.positions
    r0 = 2.0 * max([1.0] + [abs(p) for p in ps])
    if len(ps) > 1:
        min_gap = min(abs(a - b) for k, a in enumerate(ps) for b in ps[k + 1:])
        rho = 0.25 * min(min_gap, r0)
    else:
        rho = 0.25 * r0

    patches = sum(_patch_area(cfg, i, rho, spec) for i in range(len(ps)))

    def ring_background(r: float) -> float:
        excluded: list[tuple[float, float]] = []
        for p in ps:
            m = abs(p)
            if r + m <= rho:          # whole ring inside this patch
                return 0.0
            if abs(r - m) >= rho:     # ring clear of this patch
                continue
            if m == 0.0:
                continue
            cosphi = (r * r + m * m - rho * rho) / (2.0 * r * m)
            phi = math.acos(max(-1.0, min(1.0, cosphi)))
            th = math.atan2(p.imag, p.real)
            excluded.append((th - phi, th + phi))
        # normalize arcs into [0, 2pi), splitting wrap-arounds, then keep
        # the complement
        norm: list[tuple[float, float]] = []
        for lo, hi in excluded:
            shift = math.floor(lo / (2.0 * math.pi)) * 2.0 * math.pi
            lo, hi = lo - shift, hi - shift
            if hi <= 2.0 * math.pi:
                norm.append((lo, hi))
            else:
                norm.append((lo, 2.0 * math.pi))
                norm.append((0.0, hi - 2.0 * math.pi))
        keep: list[tuple[float, float]] = []
        cursor = 0.0
        for lo, hi in _merge_intervals(norm):
            if lo > cursor:
                keep.append((cursor, lo))
            cursor = max(cursor, hi)
        if cursor < 2.0 * math.pi:
            keep.append((cursor, 2.0 * math.pi))

        def f(thetas):
            zs = r * np.exp(1j * thetas)
            return _density_squared(cfg, zs) * r
        return sum(adaptive_gk(f, lo, hi, spec.rel_tol, spec.max_depth)
                   for lo, hi in keep if hi - lo > 1e-15)

    def outer_batch(rs):
        return np.array([ring_background(float(r)) for r in rs])

    cuts = {0.0, r0}
    for p in ps:
        m = abs(p)
        for c in (m - rho, m + rho, rho - m):
            if 0.0 < c < r0:
                cuts.add(c)
    cut_list = sorted(cuts)
    background = sum(adaptive_gk(outer_batch, lo, hi, spec.rel_tol, spec.max_depth)
                     for lo, hi in zip(cut_list, cut_list[1:]))

    # inverted chart w = 1/z: the integrand becomes prod |1 - p_i w|^(2b-2)
    pw = np.array([p for p in ps]) if ps else np.zeros(0, dtype=complex)
    bm1 = np.array(cfg.angles) - 1.0

    def ring_inf(r: float) -> float:
        def f(thetas):
            ws = r * np.exp(1j * thetas)
            fac = 1.0 - ws[:, None] * pw[None, :]
            vals = np.prod(np.abs(fac) ** (2.0 * bm1[None, :]), axis=1)
            return vals * r
        return adaptive_gk(f, 0.0, 2.0 * math.pi, spec.rel_tol, spec.max_depth)

    def outer_inf(rs):
        return np.array([ring_inf(float(r)) for r in rs])

    outer_part = adaptive_gk(outer_inf, 0.0, 1.0 / r0, spec.rel_tol, spec.max_depth)
    return patches + background + outer_part
