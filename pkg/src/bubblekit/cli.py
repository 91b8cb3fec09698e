"""Command-line front end: parse family spec files, run analyses, emit reports.

Reports are deterministic (sorted keys, stable ordering) so identical
inputs produce byte-identical output.  Exit codes: 0 success, 1 spec-file
validation error, 2 numeric check failure.  Indices in files and reports
are 1-based; the Python API is 0-based.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
from fractions import Fraction

import jsonschema

from . import gh, moduli, verify as vf
from . import rescale as _rescale_module  # noqa: F401  (keep module importable)
from .rescale import WeightVector, breakpoints, iterate_cascade
from .rescale import rescale as rescale_family
from .errors import BubblekitError, SpecFileError
from .exact import Germ
from .flat import (AngleVector, FamilyConfig, PLANE_AMBIENT, SPHERE_AMBIENT,
                   alpha_exponents, bubble_tree)
from .moduli import MarkedTuple, NodalCurve
from .parser import parse_germ, parse_poly
from .vtree import build_tree

FAMILY_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["plane", "sphere", "ghmonopole", "polyfamily"]},
        "angles": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "points": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "paths": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "sections": {"type": "object",
                     "additionalProperties": {"type": "string"}},
        "family": {"type": "string"},
        "variables": {"type": "array", "items": {"type": "string"},
                      "minItems": 1},
        "weights": {"type": "array", "items": {"type": "string"}},
        "curve": {
            "type": "object",
            "required": ["components", "edges"],
            "additionalProperties": False,
            "properties": {
                "components": {"type": "array"},
                "edges": {"type": "array"},
            },
        },
        "verify": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rel_tol": {"type": "number"},
                "max_depth": {"type": "integer"},
                "singularity_guard": {"type": "number"},
                "t": {"type": "number"},
            },
        },
    },
}

_KIND_REQUIRES = {
    "plane": ["angles", "points"],
    "sphere": ["angles", "points"],
    "ghmonopole": ["paths", "sections"],
    "polyfamily": ["family", "variables"],
}


class Spec:
    """A validated spec file plus helpers that attach JSON pointers to errors."""

    def __init__(self, path: str):
        self.path = path
        try:
            with open(path, "r", encoding="utf-8") as fh:
                self.data = json.load(fh)
        except OSError as exc:
            raise SpecFileError(path, "", f"cannot read file: {exc}")
        except json.JSONDecodeError as exc:
            raise SpecFileError(path, "", f"invalid JSON: {exc}")
        try:
            jsonschema.validate(self.data, FAMILY_SCHEMA)
        except jsonschema.ValidationError as exc:
            pointer = "/" + "/".join(str(p) for p in exc.absolute_path)
            raise SpecFileError(path, pointer, exc.message)
        kind = self.data["kind"]
        for field in _KIND_REQUIRES[kind]:
            if field not in self.data:
                raise SpecFileError(path, f"/{field}",
                                    f"required for kind {kind!r}")

    def fail(self, pointer: str, message: str):
        raise SpecFileError(self.path, pointer, message)

    @property
    def kind(self) -> str:
        return self.data["kind"]

    def angles(self) -> AngleVector:
        try:
            return AngleVector(tuple(Fraction(a) for a in self.data["angles"]))
        except (ValueError, ZeroDivisionError) as exc:
            self.fail("/angles", str(exc))

    def germs(self, field: str) -> tuple[Germ, ...]:
        out = []
        for i, text in enumerate(self.data[field]):
            try:
                out.append(parse_germ(text))
            except BubblekitError as exc:
                self.fail(f"/{field}/{i}", str(exc))
        return tuple(out)

    def section(self, name: str | None) -> Germ:
        sections = self.data.get("sections", {})
        if not sections:
            self.fail("/sections", "no sections defined")
        if name is None:
            if len(sections) > 1:
                self.fail("/sections", "several sections; pick one with --name")
            name = next(iter(sections))
        if name not in sections:
            self.fail(f"/sections/{name}", "no such section")
        try:
            return parse_germ(sections[name])
        except BubblekitError as exc:
            self.fail(f"/sections/{name}", str(exc))

    def family_config(self) -> FamilyConfig:
        ambient = PLANE_AMBIENT if self.kind == "plane" else SPHERE_AMBIENT
        try:
            return FamilyConfig(self.germs("points"), self.angles(), ambient)
        except (BubblekitError, ValueError) as exc:
            self.fail("", str(exc))

    def poly(self):
        variables = tuple(self.data["variables"])
        try:
            return parse_poly(self.data["family"], variables), variables
        except BubblekitError as exc:
            self.fail("/family", str(exc))

    def curve(self) -> NodalCurve:
        try:
            return NodalCurve.from_json(self.data["curve"])
        except (KeyError, TypeError, ValueError) as exc:
            self.fail("/curve", str(exc))

    def quadrature(self) -> vf.QuadratureSpec:
        v = self.data.get("verify", {})
        return vf.QuadratureSpec(
            rel_tol=v.get("rel_tol", 1e-8),
            max_depth=v.get("max_depth", 40),
            singularity_guard=v.get("singularity_guard", 1e-9))

    def t_value(self) -> float:
        return float(self.data.get("verify", {}).get("t", 0.125))


def _emit(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, payload) -> None:
    _emit(args, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _tree_of(spec: Spec):
    if spec.kind in ("plane", "sphere"):
        return build_tree(spec.germs("points"))
    if spec.kind == "ghmonopole":
        return build_tree(spec.germs("paths"))
    spec.fail("/kind", "tree requires a plane, sphere, or ghmonopole family")


def cmd_tree(args) -> int:
    spec = Spec(args.specfile)
    tree = _tree_of(spec)
    if args.format == "json":
        _emit_json(args, tree.to_json())
    else:
        _emit(args, tree.to_dot())
    return 0


def cmd_bubbles(args) -> int:
    spec = Spec(args.specfile)
    if spec.kind not in ("plane", "sphere"):
        spec.fail("/kind", "bubbles requires a plane or sphere family")
    report = bubble_tree(spec.family_config())
    payload = {"clusters": [
        {"members": [m + 1 for m in cb.members],
         "tree": cb.tree.to_json(),
         "bubbles": [{"node": nid, **b.to_json()} for nid, b in cb.bubbles]}
        for cb in report.clusters]}
    if report.limit_positions is not None:
        payload["limit"] = {
            "positions": [q.to_json() for q in report.limit_positions],
            "gammas": [str(g) for g in report.limit_angles],
        }
    _emit_json(args, payload)
    return 0


def cmd_section(args) -> int:
    spec = Spec(args.specfile)
    if spec.kind not in ("plane", "sphere"):
        spec.fail("/kind", "section requires a plane or sphere family")
    config = spec.family_config()
    section = spec.section(args.name)
    analysis = alpha_exponents(config, section)
    payload = {
        "tree": analysis.tree.to_json(),
        "bubbles": [{"node": bp.node, **bp.bubble.to_json()}
                    for bp in analysis.breakpoints],
        "section": {
            "alphas": [str(a) for a in analysis.alphas()],
            **analysis.to_json(),
        },
    }
    _emit_json(args, payload)
    return 0


def cmd_stability(args) -> int:
    spec = Spec(args.specfile)
    if spec.kind != "sphere":
        spec.fail("/kind", "stability requires a sphere family")
    config = spec.family_config()
    betas = config.angles
    limit = MarkedTuple.from_values([p.coefficient(0) for p in config.points])
    payload = {
        "gauss_bonnet": str(betas.deficit()),
        "non_collapse": moduli.non_collapse_check(betas),
        "beta_stable": moduli.is_beta_stable(limit, betas),
        "limit_blocks": [[i + 1 for i in b] for b in limit.blocks()],
    }
    _emit_json(args, payload)
    return 0


def cmd_resolve(args) -> int:
    spec = Spec(args.specfile)
    if "curve" in spec.data:
        curve = spec.curve()
        betas = spec.angles()
    elif spec.kind == "sphere":
        config = spec.family_config()
        curve = moduli.bubbletree_to_nodal_curve(config)
        betas = config.angles
    else:
        spec.fail("/curve", "resolve needs a curve or a sphere family")
    weighting = moduli.node_weights(curve, betas)
    principal = moduli.principal_component(curve, betas, weighting)
    resolved = moduli.resolve(curve, betas)
    payload = {
        "curve": curve.to_json(),
        "weights": [{"from": a, "to": b, "weight": str(w)}
                    for (a, b), w in sorted(weighting.weights.items())],
        "principal": principal,
        "resolved": resolved.to_json(),
        "beta_stable": moduli.is_beta_stable(resolved, betas),
    }
    if args.format == "dot":
        _emit(args, moduli.curve_to_dot(curve, betas))
    else:
        _emit_json(args, payload)
    return 0


def cmd_ghlimits(args) -> int:
    spec = Spec(args.specfile)
    if spec.kind != "ghmonopole":
        spec.fail("/kind", "ghlimits requires a ghmonopole family")
    family = gh.MonopoleFamily(spec.germs("paths"), spec.section(args.name))
    report = gh.ak_rescaled_limits(family)
    _emit_json(args, report.to_json())
    return 0


def _parse_weightvec(text: str) -> WeightVector:
    return WeightVector(tuple(Fraction(w) for w in text.split(",")))


def cmd_rescale(args) -> int:
    spec = Spec(args.specfile)
    if spec.kind != "polyfamily":
        spec.fail("/kind", "rescale requires a polyfamily spec")
    family, _ = spec.poly()
    stages = []
    if args.schedule:
        schedule = [_parse_weightvec(s) for s in args.schedule.split(";")]
        results = iterate_cascade(family, schedule)
        for w, res in zip(schedule, results):
            stages.append((w, res, breakpoints(family, w) if res is results[0]
                           else None))
    else:
        if args.weights:
            w = _parse_weightvec(args.weights)
        elif spec.data.get("weights"):
            w = WeightVector(tuple(Fraction(x) for x in spec.data["weights"]))
        else:
            spec.fail("/weights", "no weights given (use --weights)")
        bps = breakpoints(family, w)
        if args.c is not None:
            c = Fraction(args.c)
        elif args.auto:
            if not bps:
                spec.fail("/family", "no positive breakpoint for these weights")
            c = bps[0]
        else:
            spec.fail("", "pass --c or --auto")
        stages.append((w, rescale_family(family, w, c), bps))
    payload = [{
        "weights": [str(x) for x in w.weights],
        "c": str(res.c_used),
        "limit": res.limit.render(),
        "rescaled": res.rescaled.render(),
        "dropped": [t for t in _monomials(res.dropped)],
        **({"breakpoints": [str(b) for b in bps]} if bps is not None else {}),
    } for (w, res, bps) in stages]
    _emit_json(args, payload)
    return 0


def _monomials(poly) -> list[str]:
    from .exact import PolyFamily
    return [PolyFamily(poly.variables, {k: v}).render() for k, v in poly.items]


def _rng() -> random.Random:
    return random.Random(int(os.environ.get("BUBBLEKIT_SEED", "20260810")))


def cmd_verify(args) -> int:
    spec = Spec(args.specfile)
    qspec = spec.quadrature()
    failures = []
    lines = []
    checks = args.check.split(",") if args.check else ["lengths"]
    for check in checks:
        if check == "cone_angles":
            ok, msg = _check_cone_angles(spec, qspec)
        elif check == "slope":
            ok, msg = _check_slope(spec, qspec, args)
        elif check == "lengths":
            ok, msg = _check_lengths(spec, qspec)
        elif check == "area":
            ok, msg = _check_area(spec, qspec)
        else:
            spec.fail("", f"unknown check {check!r}")
        lines.append(f"{'PASS' if ok else 'FAIL'} {check}: {msg}")
        if not ok:
            failures.append(check)
    _emit(args, "\n".join(lines) + "\n")
    return 2 if failures else 0


def _check_cone_angles(spec: Spec, qspec) -> tuple[bool, str]:
    config = spec.family_config()
    t = spec.t_value()
    cfg = vf.NumericConeConfig.from_family(config, t)
    worst = 0.0
    for i, p in enumerate(cfg.positions):
        others = [abs(q - p) for j, q in enumerate(cfg.positions) if j != i]
        r0 = 0.4 * min(others) if others else 0.5
        est = vf.cone_angle_probe(cfg, p, [r0, r0 / 2, r0 / 4], qspec)
        worst = max(worst, abs(est - cfg.angles[i]))
    ok = worst < 1e-3
    gamma = 1.0 - sum(1.0 - b for b in cfg.angles)
    msg = f"max cone-angle error {worst:.2e}"
    if config.ambient == PLANE_AMBIENT:
        spread = max(abs(q) for q in cfg.positions) + 1.0
        ginf = vf.cone_angle_probe(cfg, 0.0, [64 * spread, 128 * spread,
                                              256 * spread], qspec)
        ok = ok and abs(ginf - gamma) < 1e-2
        msg += f", angle-at-infinity error {abs(ginf - gamma):.2e}"
    return ok, msg


def _check_slope(spec: Spec, qspec, args) -> tuple[bool, str]:
    config = spec.family_config()
    sections = spec.data.get("sections", {})
    if len(sections) < 2:
        spec.fail("/sections", "slope check needs two named sections")
    names = [args.a or sorted(sections)[0], args.b or sorted(sections)[1]]
    a, b = (spec.section(n) for n in names)
    ts = [2.0 ** (-k) for k in range(4, 10)]
    fit = vf.scaling_slope(config, a, b, ts, qspec)
    d = (a - b).items[0][0]
    analysis = alpha_exponents(config, a)
    from .flat import alpha_of_lambda
    predicted = float(alpha_of_lambda(analysis, d))
    err = abs(fit.slope - predicted) / predicted
    ok = err < 0.02 and fit.r2 > 0.999
    if args.samples:
        with open(args.samples, "w", encoding="utf-8") as fh:
            fh.write(fit.to_csv())
    return ok, (f"slope {fit.slope:.4f} vs predicted {predicted:.4f} "
                f"(rel err {err:.2e}, r2 {fit.r2:.6f})")


def _check_lengths(spec: Spec, qspec) -> tuple[bool, str]:
    config = spec.family_config()
    cfg = vf.NumericConeConfig.from_family(config, spec.t_value())
    rng = _rng()
    worst = 0.0
    for _ in range(5):
        pts = [complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(3)]
        full = vf.path_length(cfg, pts, qspec)
        split = (vf.path_length(cfg, pts[:2], qspec)
                 + vf.path_length(cfg, pts[1:], qspec))
        sym = vf.path_length(cfg, list(reversed(pts)), qspec)
        worst = max(worst, abs(full - split) / full, abs(full - sym) / full)
    return worst < 1e-6, f"additivity/symmetry max rel dev {worst:.2e}"


def _check_area(spec: Spec, qspec) -> tuple[bool, str]:
    if spec.kind != "sphere":
        spec.fail("/kind", "area check requires a sphere family")
    config = spec.family_config()
    cfg = vf.NumericConeConfig.from_family(config, spec.t_value())
    coarse = vf.sphere_area(cfg, vf.QuadratureSpec(1e-5, qspec.max_depth))
    fine = vf.sphere_area(cfg, vf.QuadratureSpec(1e-7, qspec.max_depth))
    dev = abs(coarse - fine) / fine
    ok = fine > 0 and dev < 1e-3 and math.isfinite(fine)
    return ok, f"area {fine:.8f}, self-convergence dev {dev:.2e}"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bubblekit",
        description="bubble trees of degenerating conical metrics and "
                    "A_k ALE spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(cmd, fn, **extra):
        p = sub.add_parser(cmd)
        p.add_argument("specfile")
        p.add_argument("--format", choices=["json", "dot", "csv"],
                       default=extra.pop("default_format", "json"))
        p.add_argument("--out")
        for flag, kw in extra.items():
            p.add_argument(f"--{flag}", **kw)
        p.set_defaults(func=fn)
        return p

    add("tree", cmd_tree, default_format="dot")
    add("bubbles", cmd_bubbles)
    add("section", cmd_section, name={"default": None})
    add("stability", cmd_stability)
    add("resolve", cmd_resolve)
    add("ghlimits", cmd_ghlimits, name={"default": None})
    add("rescale", cmd_rescale, weights={"default": None},
        c={"default": None}, auto={"action": "store_true"},
        schedule={"default": None})
    add("verify", cmd_verify, check={"default": "lengths"},
        a={"default": None}, b={"default": None}, samples={"default": None})

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BubblekitError as exc:
        print(f"error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
