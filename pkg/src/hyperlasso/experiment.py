"""Experiment runner: trials over noise settings and lambda grids, CSV/JSON output,
and grid exports for plotting."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import platform
import re
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .analysis import (NodeEvaluator, L2Evaluator, assert_invariants, check_stability,
                       error_report, evaluation_rule, lasso_invariants)
from .basis import BasisSet, basis_for, dimension
from .config import USER_FUNCTION, ExperimentConfig
from .errors import ConfigError, InvalidArgument
from .estimators import (Expansion, filtered_coefficients, hyper_coefficients,
                         laplace_beltrami_penalty, lasso_coefficients,
                         tikhonov_coefficients)
from .functions import BUILTINS, TestFunction, load_user_function
from .noise import apply_noise, max_abs_noise
from .quadrature import (Domain, QuadratureRule, cube_rule, disc_rule, gauss_legendre_rule,
                         load_t_design, sphere_product_rule)

log = logging.getLogger(__name__)

CSV_HEADER = ["estimator", "lambda", "noise_kind", "noise_param",
              "mean_l2_error", "mean_beta_l0", "trials", "seed"]


@dataclass
class ResultRow:
    estimator: str
    lam: float | None
    noise_index: int
    noise_kind: str
    noise_param: str
    errors: list = field(default_factory=list)
    sparsity: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def mean_l2_error(self) -> float:
        return math.fsum(self.errors) / len(self.errors)

    @property
    def mean_beta_l0(self) -> float:
        return math.fsum(self.sparsity) / len(self.sparsity)

    @property
    def trials(self) -> int:
        return len(self.errors)

    def sort_key(self):
        return (self.estimator, -math.inf if self.lam is None else self.lam, self.noise_index)


@dataclass
class RunResult:
    config: ExperimentConfig
    rows: list
    table_path: Path | None = None
    meta_path: Path | None = None

    def row(self, estimator, lam=None, noise_index=0) -> ResultRow:
        for r in self.rows:
            same_lam = (r.lam is None and lam is None) or (
                r.lam is not None and lam is not None and math.isclose(r.lam, lam, rel_tol=1e-12))
            if r.estimator == estimator and same_lam and r.noise_index == noise_index:
                return r
        raise KeyError((estimator, lam, noise_index))


def _fmt(x: float) -> str:
    return f"{x:.6g}"


# ---------------------------------------------------------------------------
# pipeline construction
# ---------------------------------------------------------------------------


def build_rule(config: ExperimentConfig) -> QuadratureRule:
    """The fitting rule for ``config``; raises ConfigError if it is not exact to 2L."""
    dom, L, q = config.kind, config.L, config.quadrature
    if dom is Domain.INTERVAL:
        rule = gauss_legendre_rule(q if q is not None else L + 1)
    elif dom is Domain.DISC:
        rule = disc_rule(q if q is not None else L)
    elif dom is Domain.SPHERE:
        if config.t_design is not None:
            rule = load_t_design(config.t_design, config.t)
        else:
            rule = sphere_product_rule(q if q is not None else L)
    else:
        rule = cube_rule(L)
    if rule.exactness_degree < 2 * L:
        raise ConfigError(
            f"{dom.value} rule with {rule.size} nodes is exact to degree {rule.exactness_degree} "
            f"< 2L = {2 * L}; a rule exact to degree 2L needs at least dim P_L = "
            f"{dimension(dom, L)} nodes"
            + (f" (Gauss-Legendre needs N >= {L + 1})" if dom is Domain.INTERVAL else "")
        )
    return rule


def _rule_parameter(config: ExperimentConfig):
    # N of the fitting rule on the interval and disc, None elsewhere
    if config.kind is Domain.INTERVAL:
        return config.quadrature if config.quadrature is not None else config.L + 1
    if config.kind is Domain.DISC:
        return config.quadrature if config.quadrature is not None else config.L
    return None


def test_function_for(config: ExperimentConfig) -> TestFunction:
    if config.test_function == USER_FUNCTION:
        return load_user_function(config.function_file, config.kind)
    return BUILTINS[config.test_function]


def _node_args(rule: QuadratureRule):
    return rule.nodes[:, 0] if rule.domain is Domain.INTERVAL else rule.nodes


def _tikhonov_penalty(config: ExperimentConfig, basis: BasisSet):
    if config.tikhonov_penalty == "laplace_beltrami":
        return laplace_beltrami_penalty(basis)
    return 1.0


def _lambda_values(config: ExperimentConfig, estimator: str):
    if estimator in ("hyper", "filtered"):
        return [None]
    if estimator == "tikhonov" and config.tikhonov_lambda is not None:
        return [config.tikhonov_lambda]
    return list(config.lambda_grid)


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------


def run(config: ExperimentConfig, out_dir=None, *, write: bool = True) -> RunResult:
    """Run every (estimator, lambda, noise) cell over ``config.trials`` noise draws.

    Each trial draws noise once per noise setting; all estimators and
    lambdas in that trial see the same noisy samples.  The Lasso invariant
    suite runs on every fit and raises InvariantViolation on failure.
    Writes ``table.csv`` and ``meta.json`` to ``out_dir`` (default
    ``config.output_dir``) unless ``write`` is false.
    """
    t_start = time.perf_counter()
    rule = build_rule(config)
    basis = basis_for(config.kind, config.L)
    fn = test_function_for(config)
    ev_rule = evaluation_rule(config.kind, config.L, _rule_parameter(config))
    l2 = L2Evaluator(basis, fn, ev_rule)
    at_nodes = NodeEvaluator(basis, rule)
    clean = np.asarray(fn(_node_args(rule)), dtype=float)
    mask = clean != 0 if config.noise_mask == "nonzero" else None
    tik_pen = _tikhonov_penalty(config, basis)
    mu = np.asarray(config.mu, dtype=float)

    rows = {}
    for ni, spec in enumerate(config.noise):
        for est in config.estimators:
            for lg in _lambda_values(config, est):
                rows[(est, lg, ni)] = ResultRow(est, None if lg is None else 10.0**lg, ni,
                                                spec.kind, spec.label())
        for trial in range(config.trials):
            samples = apply_noise(clean, spec, config.seed, trial, mask=mask)
            alpha = hyper_coefficients(rule, basis, samples.noisy)
            sup = None if fn.sup_norm is None else fn.sup_norm + max_abs_noise(samples)
            for est in config.estimators:
                for lg in _lambda_values(config, est):
                    t0 = time.perf_counter()
                    lam = None if lg is None else 10.0**lg
                    if est == "hyper":
                        beta = alpha
                    elif est == "filtered":
                        beta = filtered_coefficients(alpha, basis)
                    elif est == "tikhonov":
                        beta = tikhonov_coefficients(alpha, lam, tik_pen)
                    else:
                        beta = lasso_coefficients(alpha, lam, mu)
                        _check_lasso(alpha, beta, lam, mu, samples, rule, at_nodes, sup,
                                     f"{config.name}: lasso lambda=10^{lg:g} {spec.label()} trial {trial}")
                    row = rows[(est, lg, ni)]
                    row.errors.append(l2.error(beta))
                    row.sparsity.append(int(np.count_nonzero(beta)))
                    row.wall_time += time.perf_counter() - t0

    ordered = sorted(rows.values(), key=ResultRow.sort_key)
    result = RunResult(config, ordered)
    if write:
        out = Path(out_dir if out_dir is not None else config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        result.table_path = out / "table.csv"
        result.table_path.write_text(table_csv(result), encoding="utf-8", newline="")
        result.meta_path = out / "meta.json"
        meta = _meta(result, rule, ev_rule, time.perf_counter() - t_start)
        result.meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8", newline="")
    log.info("%s: %d rows in %.2fs", config.name, len(ordered), time.perf_counter() - t_start)
    return result


def _check_lasso(alpha, beta, lam, mu, samples, rule, at_nodes, sup, context):
    fit = at_nodes(beta)
    checks = lasso_invariants(alpha, beta, lam, mu, samples.noisy, fit, rule, sup_norm=sup)
    report = error_report(alpha, beta, samples, rule, lam, mu, sup_norm=sup)
    stab = check_stability(Expansion(at_nodes.basis, beta), samples, rule, report)
    checks["stability"] = (stab.passed, f"{stab.coeff_norm_sq:.6e} vs {stab.identity_bound:.6e}")
    assert_invariants(checks, context)


def table_csv(result: RunResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in result.rows:
        w.writerow([
            r.estimator,
            "" if r.lam is None else _fmt(r.lam),
            r.noise_kind,
            r.noise_param,
            _fmt(r.mean_l2_error),
            _fmt(r.mean_beta_l0),
            r.trials,
            result.config.seed,
        ])
    return buf.getvalue()


def _rule_info(rule: QuadratureRule) -> dict:
    return {"domain": rule.domain.value, "nodes": rule.size, "exactness": rule.exactness_degree}


def _meta(result: RunResult, rule, ev_rule, elapsed) -> dict:
    cfg = result.config
    return {
        "config": cfg.to_dict(),
        "versions": {
            "hyperlasso": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "seeds": {
            "seed": cfg.seed,
            "trial_keys": [[cfg.seed, t] for t in range(cfg.trials)],
        },
        "quadrature": _rule_info(rule),
        "evaluation_rule": _rule_info(ev_rule),
        "wall_time_s": {
            "total": round(elapsed, 3),
            "rows": [
                {"estimator": r.estimator, "lambda": r.lam, "noise": r.noise_param,
                 "seconds": round(r.wall_time, 4)}
                for r in result.rows
            ],
        },
    }


def load_meta_config(path) -> ExperimentConfig:
    """The config echoed into a ``meta.json`` file."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return ExperimentConfig.from_dict(data["config"])


# ---------------------------------------------------------------------------
# grid export
# ---------------------------------------------------------------------------

_SLICE = re.compile(r"^\s*([xyz])\s*=\s*([-+0-9.eE]+)\s*(?::\s*(\d+))?\s*$")


def _parse_counts(spec: str, prefix: str, defaults):
    body = spec.strip()
    if body.startswith(prefix):
        body = body[len(prefix):].lstrip(":")
    elif body:
        raise InvalidArgument(f"grid spec {spec!r} should start with {prefix!r}")
    if not body:
        return defaults
    try:
        counts = tuple(int(p) for p in body.split(","))
    except ValueError:
        raise InvalidArgument(f"bad grid counts in {spec!r}") from None
    if len(counts) != len(defaults) or min(counts) < 1:
        raise InvalidArgument(f"grid spec {spec!r} needs {len(defaults)} positive count(s)")
    return counts


def grid_points(domain, grid_spec: str):
    """Points and column names for a plot grid.

    interval ``uniform[:n]``; disc ``polar[:nr,ntheta]``; sphere
    ``latlon[:nlat,nlon]``; cube one or more ``;``-separated slice planes
    ``x=0.5[:n]`` sampled on an ``n x n`` grid.
    """
    dom = Domain.parse(domain)
    if dom is Domain.INTERVAL:
        (n,) = _parse_counts(grid_spec, "uniform", (201,))
        return np.linspace(-1.0, 1.0, n).reshape(-1, 1), ["x"]
    if dom is Domain.DISC:
        nr, nt = _parse_counts(grid_spec, "polar", (41, 72))
        r = np.linspace(0.0, 1.0, nr)
        th = 2 * np.pi * np.arange(nt) / nt
        R, TH = np.meshgrid(r, th, indexing="ij")
        pts = np.column_stack([(R * np.cos(TH)).ravel(), (R * np.sin(TH)).ravel()])
        return np.clip(pts, -1.0, 1.0), ["x1", "x2"]
    if dom is Domain.SPHERE:
        nlat, nlon = _parse_counts(grid_spec, "latlon", (91, 181))
        lat = np.linspace(-np.pi / 2, np.pi / 2, nlat)
        lon = np.linspace(-np.pi, np.pi, nlon)
        LA, LO = np.meshgrid(lat, lon, indexing="ij")
        pts = np.column_stack([(np.cos(LA) * np.cos(LO)).ravel(),
                               (np.cos(LA) * np.sin(LO)).ravel(),
                               np.sin(LA).ravel()])
        return pts / np.linalg.norm(pts, axis=1, keepdims=True), ["x", "y", "z"]
    blocks = []
    for part in grid_spec.split(";"):
        m = _SLICE.match(part)
        if not m:
            raise InvalidArgument(f"bad cube slice {part!r}; expected e.g. 'x=0.5' or 'z=0:51'")
        axis, value, n = "xyz".index(m.group(1)), float(m.group(2)), int(m.group(3) or 101)
        if not -1.0 <= value <= 1.0:
            raise InvalidArgument(f"slice {part.strip()!r} lies outside [-1, 1]")
        if n < 1:
            raise InvalidArgument("slice resolution must be positive")
        u = np.linspace(-1.0, 1.0, n)
        U, W = np.meshgrid(u, u, indexing="ij")
        free = [a for a in range(3) if a != axis]
        pts = np.empty((n * n, 3))
        pts[:, axis] = value
        pts[:, free[0]] = U.ravel()
        pts[:, free[1]] = W.ravel()
        blocks.append(pts)
    return np.vstack(blocks), ["x", "y", "z"]


def export_grid(expansion: Expansion, grid_spec: str, path, f=None) -> Path:
    """Write ``coordinates, approx, true, error`` rows on a plot grid to ``path``.

    ``true`` and ``error`` are left empty when no reference function ``f``
    is given.
    """
    pts, cols = grid_points(expansion.basis.domain, grid_spec)
    approx = expansion(pts)
    true = None
    if f is not None:
        arg = pts[:, 0] if expansion.basis.domain is Domain.INTERVAL else pts
        true = np.asarray(f(arg), dtype=float)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols + ["approx", "true", "error"])
        for i in range(pts.shape[0]):
            coords = [_fmt(c) for c in pts[i]]
            if true is None:
                w.writerow(coords + [_fmt(approx[i]), "", ""])
            else:
                w.writerow(coords + [_fmt(approx[i]), _fmt(true[i]), _fmt(approx[i] - true[i])])
    return path


def export_config(config: ExperimentConfig, grid_spec: str, out_dir=None) -> list:
    """One trial (trial 0, first noise setting, first lambda) of every estimator,
    exported on ``grid_spec`` as ``grid_<estimator>.csv``."""
    rule = build_rule(config)
    basis = basis_for(config.kind, config.L)
    fn = test_function_for(config)
    clean = np.asarray(fn(_node_args(rule)), dtype=float)
    mask = clean != 0 if config.noise_mask == "nonzero" else None
    samples = apply_noise(clean, config.noise[0], config.seed, 0, mask=mask)
    alpha = hyper_coefficients(rule, basis, samples.noisy)
    out = Path(out_dir if out_dir is not None else config.output_dir)
    paths = []
    for est in config.estimators:
        lg = _lambda_values(config, est)[0]
        lam = None if lg is None else 10.0**lg
        if est == "hyper":
            beta = alpha
        elif est == "filtered":
            beta = filtered_coefficients(alpha, basis)
        elif est == "tikhonov":
            beta = tikhonov_coefficients(alpha, lam, _tikhonov_penalty(config, basis))
        else:
            beta = lasso_coefficients(alpha, lam, config.mu)
        paths.append(export_grid(Expansion(basis, beta), grid_spec, out / f"grid_{est}.csv", fn))
    return paths
