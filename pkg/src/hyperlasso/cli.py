"""Command line entry point: ``hyperlasso run|verify|export``."""

from __future__ import annotations

import argparse
import logging
import sys
import time

from .basis import basis_for
from .config import load_config
from .errors import HyperlassoError
from .experiment import build_rule, export_config, run
from .quadrature import (Domain, cube_rule, disc_rule, gauss_legendre_rule, load_t_design,
                         sphere_product_rule, verify_exactness)


def _verify_rule(args):
    dom = Domain.parse(args.domain)
    L = args.L
    if args.t_design:
        if dom is not Domain.SPHERE:
            raise HyperlassoError("--t-design only applies to the sphere")
        return load_t_design(args.t_design, args.t if args.t is not None else 2 * L)
    n = args.N
    if dom is Domain.INTERVAL:
        return gauss_legendre_rule(n if n is not None else L + 1)
    if dom is Domain.DISC:
        return disc_rule(n if n is not None else L)
    if dom is Domain.SPHERE:
        return sphere_product_rule(n if n is not None else L)
    return cube_rule(L)


def cmd_run(args) -> int:
    config = load_config(args.config)
    result = run(config, args.out)
    for r in result.rows:
        lam = "" if r.lam is None else f"{r.lam:.4g}"
        print(f"{r.estimator:9s} lambda={lam:9s} {r.noise_param:22s} "
              f"error={r.mean_l2_error:.6g} l0={r.mean_beta_l0:g}")
    print(f"wrote {result.table_path} and {result.meta_path}")
    return 0


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    rule = _verify_rule(args)
    basis = basis_for(args.domain, args.L)
    report = verify_exactness(rule, basis, tol=args.tol)
    status = "PASS" if report.passed else "FAIL"
    print(f"{status} {rule.domain.value} L={args.L}: {rule.size} nodes, exactness "
          f"{rule.exactness_degree}, {basis.size} basis elements, max |G - I| = "
          f"{report.max_deviation:.3e} at {report.worst_pair} "
          f"(tol {args.tol:g}, {time.perf_counter() - t0:.1f}s)")
    return 0 if report.passed else 1


def cmd_export(args) -> int:
    config = load_config(args.config)
    build_rule(config)
    for path in export_config(config, args.grid, args.out):
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperlasso", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run an experiment config and write table.csv / meta.json")
    r.add_argument("--config", required=True)
    r.add_argument("--out", help="output directory (default: the config's output_dir)")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="check the discrete Gram matrix of a rule against the identity")
    v.add_argument("--domain", required=True, choices=[d.value for d in Domain])
    v.add_argument("--L", type=int, required=True)
    v.add_argument("--N", type=int, help="rule parameter (Gauss points, disc N, sphere product degree)")
    v.add_argument("--t-design", help="sphere: t-design point file")
    v.add_argument("--t", type=int, help="strength of the t-design (default 2L)")
    v.add_argument("--tol", type=float, default=1e-8)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("export", help="sample one fitted trial on a plot grid")
    e.add_argument("--config", required=True)
    e.add_argument("--grid", required=True,
                   help="uniform[:n] | polar[:nr,nt] | latlon[:nlat,nlon] | x=0.5[:n];z=0 ...")
    e.add_argument("--out", help="output directory (default: the config's output_dir)")
    e.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (HyperlassoError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
