"""Command-line interface: ``monopole {flux, table, check, convergence}``.

Exit status is 0 on success, 1 when the two methods disagree or a check
fails, and 2 for bad arguments.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from .connection import gauge_transform, random_gauge_pair
from .crossed import (
    CoveringCrossedModule,
    alpha_conjugacy_classes,
    conjugation_module,
    cyclic_automorphism_module,
    interchange_violations,
    inv_alpha,
    ker_tau,
    reduced_group,
    symmetric_group,
)
from .errors import HolonomyError, MethodDisagreement, UnsupportedFamily
from .liegroups import all_coverings
from .monopoles import catalog, flux_label, magnetic_flux, make_config
from .surface import glued_sphere_integral
from .transport import TransportConfig

FAMILY_CHOICES = {"u1": "U1", "so3": "SO3", "sunzn": "SUnZn", "un": "Un"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _positive_int(text):
    v = int(text)
    if v < 8:
        raise argparse.ArgumentTypeError("must be at least 8")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser():
    p = _Parser(prog="monopole", description="Magnetic flux of sphere monopoles as 2-group surface holonomy.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def resolution(q):
        q.add_argument("--samples", type=_positive_int, default=512, help="partition count (default 512)")
        q.add_argument("--tol", type=_positive_float, default=1e-8, help="refinement tolerance (default 1e-8)")

    f = sub.add_parser("flux", help="flux of one configuration")
    f.add_argument("--family", required=True, choices=sorted(FAMILY_CHOICES))
    f.add_argument("--n", type=int, default=None, help="matrix size for sunzn (2-4) and un (1-3)")
    f.add_argument("--charge", type=int, default=None, help="monopole charge (default 1)")
    f.add_argument("--method", choices=("lift", "integral", "both"), default="both")
    f.add_argument("--json", metavar="PATH", help="write the JSON report here instead of stdout")
    resolution(f)

    t = sub.add_parser("table", help="every catalog configuration against its expected flux")
    t.add_argument("--json", metavar="PATH", help="also write all reports as a JSON list")
    resolution(t)

    sub.add_parser("check", help="algebraic and gauge-invariance checks")

    c = sub.add_parser("convergence", help="integral-method error against resolution, as CSV")
    c.add_argument("--family", required=True, choices=sorted(FAMILY_CHOICES))
    c.add_argument("--n", type=int, default=None)
    c.add_argument("--charge", type=int, default=None)
    c.add_argument("--max-samples", type=_positive_int, default=512)
    c.add_argument("--out", metavar="PATH", help="write the CSV here instead of stdout")
    return p


def _use_color(stream):
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def _status(ok, stream=sys.stdout):
    word = "PASS" if ok else "FAIL"
    if _use_color(stream):
        return f"\033[{32 if ok else 31}m{word}\033[0m"
    return word


def _config_from(args):
    family = FAMILY_CHOICES[args.family]
    charge = 1 if args.charge is None else args.charge
    return make_config(family, args.n, charge)


def _cmd_flux(args, out):
    cfg = TransportConfig(steps=args.samples, tolerance=args.tol)
    config = _config_from(args)
    report = magnetic_flux(config, args.method, cfg)
    text = report.to_json(indent=2)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
        print(f"{config.connection.name}: flux {report.flux['label']} ({args.method})", file=out)
    else:
        print(text, file=out)
    return 0


def _cmd_table(args, out):
    cfg = TransportConfig(steps=args.samples, tolerance=args.tol)
    rows, reports, ok_all = [], [], True
    for config in catalog():
        expected = flux_label(config.covering, config.expected_index)
        try:
            report = magnetic_flux(config, "both", cfg)
            got, ok = report.flux["label"], report.matches_expected
            reports.append(report.to_dict())
        except MethodDisagreement as exc:
            got, ok = f"disagree ({exc})", False
        ok_all &= ok
        rows.append((config.connection.name, expected, got, ok))
    width = max(len(r[0]) for r in rows)
    wexp = max(len(r[1]) for r in rows)
    for name, expected, got, ok in rows:
        print(f"{name:<{width}}  expected {expected:<{wexp}}  got {got:<{wexp}}  {_status(ok, out)}", file=out)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(reports, fh, indent=2)
            fh.write("\n")
    return 0 if ok_all else 1


def run_checks(rng=None):
    """``[(name, ok, detail)]`` for the algebraic and gauge checks."""
    rng = rng if rng is not None else np.random.default_rng(2024)
    results = []
    for p in (3, 5, 7):
        cm = cyclic_automorphism_module(p)
        n_cls, n_red = len(alpha_conjugacy_classes(cm)), reduced_group(cm).order
        results.append((f"(Z{p}, Aut Z{p}) classes and reduced group", n_cls == 2 and n_red == 1, f"{n_cls} classes, |H/[G,H]| = {n_red}"))
    s3 = conjugation_module(symmetric_group(3))
    n_cls, n_red = len(alpha_conjugacy_classes(s3)), reduced_group(s3).order
    results.append(("(S3, S3, id, conj) classes and reduced group", n_cls == 3 and n_red == 2, f"{n_cls} classes, |H/[G,H]| = {n_red}"))
    for name, cm in (("Z5", cyclic_automorphism_module(5)), ("S3", s3)):
        bad = interchange_violations(cm)
        results.append((f"interchange law on {name}", bad == 0, f"{bad} violations"))
        inv = inv_alpha(cm)
        ker = ker_tau(cm)
        results.append((f"ker tau and Inv(alpha) central on {name}", ker.central, f"|ker| = {len(ker.elements)}, |Inv| = {len(inv)}"))
    for cp in all_coverings():
        cm = CoveringCrossedModule(cp)
        peiffer, equiv = cm.identity_errors(rng, samples=50)
        ker = ker_tau(cm, rng, samples=20)
        ok = peiffer < 1e-10 and equiv < 1e-10 and ker.central
        results.append((f"crossed-module identities for {cp!r}", ok, f"Peiffer {peiffer:.1e}, equivariance {equiv:.1e}"))
    cfg = TransportConfig(steps=64, tolerance=1e-4)
    for family, n, charge in (("U1", None, 2), ("SO3", None, 1), ("SUnZn", 3, 1), ("Un", 2, 1)):
        config = make_config(family, n, charge)
        gauged = gauge_transform(config.connection, random_gauge_pair(config.covering.base, rng, scale=0.3))
        try:
            report = magnetic_flux(config, "both", cfg, connection=gauged)
            ok = report.kernel_index == config.expected_index
            detail = f"flux {report.flux['label']}"
        except HolonomyError as exc:
            ok, detail = False, str(exc)
        results.append((f"gauge invariance of {config.connection.name}", ok, detail))
    return results


def _cmd_check(args, out):
    results = run_checks()
    for name, ok, detail in results:
        print(f"{_status(ok, out)}  {name}: {detail}", file=out)
    return 0 if all(ok for _, ok, _ in results) else 1


def convergence_rows(config, max_samples=512):
    """``(samples, abs_error)`` of the unrefined integral against the exact flux."""
    rows = []
    m = 8
    target = config.expected_flux
    while m <= max_samples:
        cfg = TransportConfig(steps=m, tolerance=float("inf"), richardson=False, max_doublings=0)
        r = glued_sphere_integral(config.connection, cfg)
        rows.append((m, float(config.covering.cover.dist(r.h.matrix, target))))
        m *= 2
    return rows


def _cmd_convergence(args, out):
    config = _config_from(args)
    rows = convergence_rows(config, args.max_samples)
    fh = open(args.out, "w", newline="") if args.out else out
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["samples", "abs_error"])
        for m, err in rows:
            w.writerow([m, f"{err:.6e}"])
    finally:
        if args.out:
            fh.close()
    return 0


COMMANDS = {"flux": _cmd_flux, "table": _cmd_table, "check": _cmd_check, "convergence": _cmd_convergence}


def run_cli(argv=None, out=None):
    """Run one command; returns the exit status."""
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"monopole: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except UnsupportedFamily as exc:
        print(f"monopole: error: {exc}", file=sys.stderr)
        return 2
    except MethodDisagreement as exc:
        print(f"monopole: methods disagree: {exc}", file=sys.stderr)
        return 1
    except HolonomyError as exc:
        print(f"monopole: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
