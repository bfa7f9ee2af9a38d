"""Command-line front end.

Subcommands
-----------
compute     construct a frame of a requested type along a curve
classify    pattern-classify an exported frame path
transform   conjugate a Bishop frame (type B) or run the D -> C pipeline (type C)
synthesize  integrate a curve from Bishop coefficient data
diagnose    type-D / type-F admissibility evidence for a curve
gallery     run the regression suite against the shipped manifest
patterns    print the sixteen admissible coefficient patterns with orbit labels

Every command that constructs a frame path verifies orthonormality drift and
classification before writing and refuses to write on failure unless
--force is given.  Domain errors exit with status 1, usage errors with 2.
The environment variable FRAMES_SEED fixes the rotation-selection scan.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import construct, gallery as gallery_mod, serialize
from .curves import DEFAULT_STEP, load_curve_spec, regularity_report, reparametrize
from .errors import FrameError
from .frames import FrameLabel, classify_path, enumerate_patterns
from .minkowski import inner


@dataclass
class RunConfig:
    """Parsed invocation; invariants: step and tolerances positive."""

    command: str
    gallery: str = None
    input: str = None
    frame_type: str = "B"
    step: float = DEFAULT_STEP
    tol_drift: float = 1e-8
    tol_pattern: float = 1e-5
    clearance_deg: float = 0.5
    project: bool = False
    output: str = None
    fmt: str = "csv"
    force: bool = False
    names: list = None

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("--step must be positive")
        for name in ("tol_drift", "tol_pattern", "clearance_deg"):
            if getattr(self, name) <= 0:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")


def _positive(text):
    val = float(text)
    if val <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return val


def build_parser():
    parser = argparse.ArgumentParser(
        prog="frames",
        description="Generalized Bishop frames along time-like curves in Lorentz 4-space.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, curve=True, out=True):
        if curve:
            src = p.add_mutually_exclusive_group(required=True)
            src.add_argument("--gallery", help="gallery curve name")
            src.add_argument("--input", help="curve-spec JSON file")
        p.add_argument("--step", type=_positive, default=DEFAULT_STEP,
                       help="proper-time grid step (default 1e-3)")
        p.add_argument("--tol-drift", type=_positive, default=1e-8, dest="tol_drift")
        p.add_argument("--tol-pattern", type=_positive, default=1e-5, dest="tol_pattern")
        p.add_argument("--clearance-deg", type=_positive, default=0.5, dest="clearance_deg")
        p.add_argument("--project", action="store_true",
                       help="re-orthonormalize after every integration step")
        if out:
            p.add_argument("--output", help="output file (default: stdout)")
            p.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")
            p.add_argument("--force", action="store_true",
                           help="write even when verification fails")

    p = sub.add_parser("compute", help="construct a frame path of a given type")
    add_common(p)
    p.add_argument("--type", choices=tuple("BCDF"), default="B", dest="frame_type")

    p = sub.add_parser("classify", help="classify an exported frame path")
    p.add_argument("--input", required=True, help="frame-path CSV or JSON")
    p.add_argument("--tol-pattern", type=_positive, default=1e-5, dest="tol_pattern")

    p = sub.add_parser("transform", help="conjugate-bishop (B) or d-to-c (C)")
    add_common(p)
    p.add_argument("--type", choices=("B", "C"), default="C", dest="frame_type")

    p = sub.add_parser("synthesize", help="curve from Bishop coefficient data")
    add_common(p)

    p = sub.add_parser("diagnose", help="type-D / type-F admissibility evidence")
    add_common(p, out=False)

    p = sub.add_parser("gallery", help="run the gallery regression suite")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--all", action="store_true")
    grp.add_argument("--name", action="append", dest="names")
    p.add_argument("--step", type=_positive, default=DEFAULT_STEP)
    p.add_argument("--tol-drift", type=_positive, default=1e-8, dest="tol_drift")
    p.add_argument("--tol-pattern", type=_positive, default=1e-5, dest="tol_pattern")

    sub.add_parser("patterns", help="print the sixteen admissible patterns")
    return parser


def _config_from_args(args):
    kwargs = {"command": args.command}
    for field_name in ("gallery", "input", "frame_type", "step", "tol_drift",
                       "tol_pattern", "clearance_deg", "project", "output",
                       "fmt", "force", "names"):
        if hasattr(args, field_name):
            val = getattr(args, field_name)
            if val is not None:
                kwargs[field_name] = val
    return RunConfig(**kwargs)


def _load_curve(config):
    if config.gallery:
        spec = gallery_mod.make_gallery_curve(config.gallery).spec
    else:
        spec = load_curve_spec(config.input)
    if spec.kind == "bishop-data":
        return construct.curve_from_bishop_data(spec, None, None, None, config.step,
                                                project=config.project)
    return reparametrize(spec, config.step), None


def _verify_and_write(config, path, coeffs=None):
    drift = path.drift()
    cls = classify_path(coeffs if coeffs is not None else path, tol=config.tol_pattern)
    problems = []
    if drift > config.tol_drift:
        problems.append(f"orthonormality drift {drift:.3e} exceeds {config.tol_drift:.1e}")
    if cls.label is FrameLabel.NON_GB:
        problems.append(f"classification failed: {cls.note}")
    for msg in problems:
        print(f"verification: {msg}", file=sys.stderr)
    if problems and not config.force:
        raise FrameError("; ".join(problems) + " (use --force to write anyway)")
    text = (serialize.dumps_csv(path, coeffs) if config.fmt == "csv"
            else serialize.dumps_json(path, coeffs))
    if config.output:
        serialize.export_frame_path(path, config.fmt, config.output, coeffs)
        print(f"wrote {len(path)} nodes to {config.output} "
              f"[{cls}] drift {drift:.2e}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return cls


def _compute_path(config, ptc, premade):
    kind = config.frame_type
    if kind == "B":
        if premade is not None:
            return premade, None
        initial = construct.default_initial_frame(ptc)
        return construct.construct_bishop(ptc, initial, project=config.project), None
    if kind == "F":
        res = construct.construct_frenet(ptc)
        return res.path, None
    normal = construct.principal_normal_from_2regular(ptc)
    if kind == "D":
        return construct.construct_type_d(ptc, normal, project=config.project), None
    bishop = (premade if premade is not None
              else construct.construct_bishop(ptc, construct.default_initial_frame(ptc),
                                              project=config.project))
    result = construct.d_to_c_transform(bishop, normal,
                                        clearance_deg=config.clearance_deg)
    print(f"rotation clearance {result.rotation.clearance_deg:.2f} deg, "
          f"xi = {np.round(result.rotation.xi, 6).tolist()}", file=sys.stderr)
    return result.path, None


def cmd_compute(config):
    ptc, premade = _load_curve(config)
    path, coeffs = _compute_path(config, ptc, premade)
    _verify_and_write(config, path, coeffs)
    return 0


def cmd_classify(config):
    path, coeffs = serialize.import_frame_path(config.input)
    cls = classify_path(coeffs, tol=config.tol_pattern)
    print(str(cls))
    if cls.label is FrameLabel.NON_GB and cls.node_labels:
        labels = [str(l) for l in cls.node_labels]
        uniq = sorted(set(labels))
        print("per-node labels: " + ", ".join(f"{u} x{labels.count(u)}" for u in uniq))
        print(f"union pattern: {sorted(cls.pattern)}")
    return 0


def cmd_transform(config):
    ptc, premade = _load_curve(config)
    bishop = (premade if premade is not None
              else construct.construct_bishop(ptc, construct.default_initial_frame(ptc),
                                              project=config.project))
    if config.frame_type == "B":
        seed = int(os.environ.get("FRAMES_SEED", "0"))
        rng = np.random.default_rng(seed)
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        path = construct.conjugate_bishop(bishop, q)
        print(f"conjugated by Q (seed {seed}); residual vs constant G: "
              f"{construct.transformation_residual(bishop, path):.2e}", file=sys.stderr)
    else:
        normal = construct.principal_normal_from_2regular(ptc)
        result = construct.d_to_c_transform(bishop, normal,
                                            clearance_deg=config.clearance_deg)
        path = result.path
        print(f"rotation clearance {result.rotation.clearance_deg:.2f} deg; "
              f"residual vs Bishop path: "
              f"{construct.transformation_residual(bishop, path):.2e}", file=sys.stderr)
    _verify_and_write(config, path)
    return 0


def cmd_synthesize(config):
    ptc, path = _load_curve(config)
    if path is None:
        raise FrameError("synthesize needs a bishop-data curve "
                         "(gallery prop-3-3 or a bishop-data JSON spec)")
    t = ptc.tangent(path.grid)
    unit = float(np.max(np.abs(inner(t, t) + 1.0)))
    print(f"unit-speed defect max |<T,T>+1| = {unit:.2e}", file=sys.stderr)
    _verify_and_write(config, path)
    return 0


def cmd_diagnose(config):
    ptc, _ = _load_curve(config)
    report = regularity_report(ptc)
    print(f"curve: {ptc.name}")
    print(f"  time-like everywhere: {report.is_timelike_everywhere} "
          f"(min -<g',g'> = {report.min_speed_sq:.6g})")
    print(f"  2-regular: {report.is_2_regular} "
          f"(min |T'| = {report.min_tangent_derivative_norm:.3e})")
    diag = gallery_mod.diagnose_type_d(ptc)
    print(f"type D: {diag.verdict}")
    for s, gap, pgap in zip(diag.zeros, diag.gaps_deg, diag.projective_gaps_deg):
        print(f"  zero of |T'| near s = {s:.6g}: "
              f"limit gap {gap:.2f} deg (projective {pgap:.2f} deg)")
    if diag.note:
        print(f"  note: {diag.note}")
    rep = gallery_mod.diagnose_type_f_evidence(ptc)
    print(f"type F: {rep.verdict}")
    for s, gap, pgap in zip(rep.zeros, rep.gaps_deg, rep.projective_gaps_deg):
        print(f"  second-level zero near s = {s:.6g}: "
              f"limit gap {gap:.2f} deg (projective {pgap:.2f} deg)")
    print(f"  note: {rep.note}")
    return 0


def cmd_gallery(config):
    rows = gallery_mod.run_gallery(config.names, step=config.step,
                                   drift_tol=config.tol_drift,
                                   pattern_tol=config.tol_pattern)
    width = max(len(r["name"]) for r in rows)
    print(f"{'entry':<{width}}  {'B':<6} {'C':<10} {'D':<12} {'F':<14} result")
    all_ok = True
    for r in rows:
        cells = []
        for key in ("B", "C", "D", "F"):
            chk = r["checks"][key]
            mark = "" if chk["ok"] else "!"
            cells.append(f"{mark}{chk['computed']}")
        status = "ok" if r["ok"] else "MISMATCH"
        all_ok = all_ok and r["ok"]
        print(f"{r['name']:<{width}}  {cells[0]:<6} {cells[1]:<10} "
              f"{cells[2]:<12} {cells[3]:<14} {status}")
        if not r["ok"]:
            for key, chk in r["checks"].items():
                if not chk["ok"]:
                    print(f"    {key}: expected {chk['expected']!r}, "
                          f"computed {chk['computed']!r} ({chk['detail']})")
    if not all_ok:
        raise FrameError("gallery regression mismatches (see table)")
    return 0


def cmd_patterns(_config):
    infos = enumerate_patterns()
    counts = {}
    print(f"{'#':>2}  {'type':<4}  positions (x1, x2, x3)")
    for k, info in enumerate(infos, start=1):
        counts[str(info.label)] = counts.get(str(info.label), 0) + 1
        pos = "  ".join(f"x{m}@{p}" for m, p in enumerate(info.positions, start=1))
        print(f"{k:>2}  {str(info.label):<4}  {pos}")
    sizes = ", ".join(f"{lab}: {counts[lab]}" for lab in ("F", "C", "D", "B"))
    print(f"total {len(infos)} patterns; orbit sizes {sizes}")
    return 0


_COMMANDS = {
    "compute": cmd_compute,
    "classify": cmd_classify,
    "transform": cmd_transform,
    "synthesize": cmd_synthesize,
    "diagnose": cmd_diagnose,
    "gallery": cmd_gallery,
    "patterns": cmd_patterns,
}


def run(config):
    """Execute one command; returns the process exit status."""
    try:
        return _COMMANDS[config.command](config)
    except FrameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
    except ValueError as exc:
        parser.error(str(exc))
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
