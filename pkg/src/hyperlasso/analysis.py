"""Diagnostics for fitted expansions: L2 errors, the K functional, stability
inequalities and the per-run invariant suite.

All discrete inner products use the weights of the fitting rule,
``<u, v>_N = sum_j w_j u(x_j) v(x_j)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .basis import BasisSet, ChebyshevProductBasis
from .errors import InvalidArgument, InvariantViolation
from .estimators import Expansion, _penalty, cube_synthesis, lambda_max, soft_threshold
from .quadrature import CubeRule, Domain, QuadratureRule, cube_rule, disc_rule, \
    gauss_legendre_rule, sphere_product_rule

IDENTITY_TOL = 1e-9


@dataclass(frozen=True)
class ErrorReport:
    l2_error: float
    sparsity: int
    k_functional: float
    discrete_f_norm_sq: float
    stability_bound: float | None
    lambda_max: float

    def as_dict(self):
        return asdict(self)


def inner(rule: QuadratureRule, u, v) -> float:
    """Discrete inner product of two node-value vectors."""
    return float(np.dot(rule.weights, np.asarray(u) * np.asarray(v)))


# ---------------------------------------------------------------------------
# L2 error
# ---------------------------------------------------------------------------


def evaluation_rule(domain, L: int, N: int | None = None) -> QuadratureRule:
    """Fine rule used to estimate L2 errors of degree-``L`` fits.

    interval: Gauss-Legendre with ``2N`` points; disc: ``disc_rule(2N)``;
    sphere: product rule of degree ``2L``; cube: ``cube_rule(L + 10)``.
    Each is raised if needed so that its exactness is at least ``2L + 10``.
    """
    domain = Domain.parse(domain)
    if domain is Domain.INTERVAL:
        n = 2 * (N if N is not None else L + 1)
        return gauss_legendre_rule(max(n, L + 6))
    if domain is Domain.DISC:
        n = 2 * (N if N is not None else L)
        return disc_rule(max(n, L + 5))
    if domain is Domain.SPHERE:
        return sphere_product_rule(max(2 * L, L + 5))
    return cube_rule(L + 10)


def doubled_rule(rule: QuadratureRule) -> QuadratureRule:
    """A rule of roughly twice the exactness on the same domain."""
    e = rule.exactness_degree
    if rule.domain is Domain.INTERVAL:
        return gauss_legendre_rule(rule.size * 2)
    if rule.domain is Domain.DISC:
        return disc_rule(e)
    if rule.domain is Domain.SPHERE:
        return sphere_product_rule(e)
    return cube_rule(e)


class NodeEvaluator:
    """Values of ``sum c_l p_l`` at the nodes of a fixed rule, for many ``c``.

    Cube lattice rules use the cosine synthesis; otherwise the basis values
    are cached when they fit in ``max_cache`` entries.
    """

    def __init__(self, basis: BasisSet, rule: QuadratureRule, max_cache: int = 30_000_000):
        if rule.domain is not basis.domain:
            raise InvalidArgument("rule and basis live on different domains")
        self.basis = basis
        self.rule = rule
        self._lattice = isinstance(rule, CubeRule) and isinstance(basis, ChebyshevProductBasis)
        self._A = None
        if not self._lattice and rule.size * basis.size <= max_cache:
            self._A = basis.evaluate(rule.nodes)

    def __call__(self, coeffs) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=float)
        if self._lattice:
            return cube_synthesis(self.basis, coeffs, self.rule)
        if self._A is not None:
            return self._A @ coeffs
        return Expansion(self.basis, coeffs).on_rule(self.rule)


class L2Evaluator:
    """Reusable ``||sum beta_l p_l - f||_2`` estimator on a fixed fine rule."""

    def __init__(self, basis: BasisSet, f, rule: QuadratureRule, max_cache: int = 30_000_000):
        if rule.exactness_degree < 2 * basis.degree_cap + 10:
            raise InvalidArgument(
                f"evaluation rule exactness {rule.exactness_degree} is below "
                f"2 x {basis.degree_cap} + 10"
            )
        self.values = NodeEvaluator(basis, rule, max_cache)
        self.rule = rule
        pts = rule.nodes[:, 0] if rule.domain is Domain.INTERVAL else rule.nodes
        self.f_values = np.asarray(f(pts), dtype=float) if callable(f) else np.asarray(f, float)

    def error(self, coeffs) -> float:
        r = self.values(coeffs) - self.f_values
        return math.sqrt(inner(self.rule, r, r))


def self_convergence(basis: BasisSet, f, rule: QuadratureRule, coeffs) -> float:
    """Relative change of the L2 error estimate when ``rule`` is replaced by
    :func:`doubled_rule`."""
    e1 = L2Evaluator(basis, f, rule).error(coeffs)
    e2 = L2Evaluator(basis, f, doubled_rule(rule)).error(coeffs)
    return abs(e2 - e1) / max(e2, np.finfo(float).tiny)


def l2_error(approx: Expansion, f, eval_rule: QuadratureRule) -> float:
    """Quadrature estimate of ``||approx - f||_2``; needs exactness >= 2 deg + 10."""
    return L2Evaluator(approx.basis, f, eval_rule).error(approx.coeffs)


# ---------------------------------------------------------------------------
# K functional, stability, regularisation error
# ---------------------------------------------------------------------------


def k_functional(alpha, lam: float, mu=1.0) -> float:
    """``K = sum_l (S(alpha_l) alpha_l - S(alpha_l)^2)`` with ``S = S_{lam mu_l}``."""
    alpha = np.asarray(alpha, dtype=float)
    if lam < 0:
        raise InvalidArgument("regularisation parameter must be non-negative")
    s = soft_threshold(alpha, lam * _penalty(mu, alpha.size))
    return float(np.sum(s * alpha - s * s))


@dataclass(frozen=True)
class StabilityCheck:
    coeff_norm_sq: float
    identity_bound: float
    sup_bound: float | None
    tol: float

    @property
    def passed(self) -> bool:
        ok = self.coeff_norm_sq <= self.identity_bound + self.tol
        if self.sup_bound is not None:
            ok = ok and self.coeff_norm_sq <= self.sup_bound + self.tol
        return ok

    def __bool__(self):
        return self.passed


def check_stability(expansion: Expansion, samples, rule: QuadratureRule,
                    report: ErrorReport, tol: float = IDENTITY_TOL) -> StabilityCheck:
    """Check ``sum beta^2 <= <f, f>_N - 2K`` and, when a sup-norm bound is known,
    ``sum beta^2 <= V ||f||_inf^2``.

    ``samples`` are the values the expansion was fitted to (a vector or a
    :class:`~hyperlasso.noise.SampleSet`, whose noisy values are used).
    """
    f = np.asarray(getattr(samples, "noisy", samples), dtype=float)
    fnorm = inner(rule, f, f)
    if not math.isclose(fnorm, report.discrete_f_norm_sq, rel_tol=1e-12, abs_tol=1e-15):
        raise InvalidArgument("report was computed from different samples")
    beta_sq = float(np.dot(expansion.coeffs, expansion.coeffs))
    return StabilityCheck(
        coeff_norm_sq=beta_sq,
        identity_bound=fnorm - 2.0 * report.k_functional,
        sup_bound=report.stability_bound,
        tol=tol,
    )


def regularization_error(c, lam: float, mu=1.0) -> float:
    """``||phi - L^lam phi||_2`` for ``phi = sum c_l p_l``, by Parseval."""
    c = np.asarray(c, dtype=float)
    k = lam * _penalty(mu, c.size)
    small = np.abs(c) <= k
    return float(math.sqrt(np.sum(c[small] ** 2) + np.sum(k[~small] ** 2)))


def error_report(alpha, beta, samples, rule: QuadratureRule, lam: float, mu=1.0, *,
                 l2: float = float("nan"), sup_norm: float | None = None) -> ErrorReport:
    f = np.asarray(getattr(samples, "noisy", samples), dtype=float)
    V = rule.domain.volume
    return ErrorReport(
        l2_error=float(l2),
        sparsity=int(np.count_nonzero(beta)),
        k_functional=k_functional(alpha, lam, mu),
        discrete_f_norm_sq=inner(rule, f, f),
        stability_bound=None if sup_norm is None else V * sup_norm**2,
        lambda_max=lambda_max(alpha),
    )


# ---------------------------------------------------------------------------
# invariant suite
# ---------------------------------------------------------------------------


def _ulp_tol(*arrays):
    scale = np.maximum.reduce([np.abs(np.asarray(a, dtype=float)) for a in arrays])
    return 4.0 * np.spacing(scale)


def lasso_invariants(alpha, beta, lam: float, mu, f_values, fit_values,
                     rule: QuadratureRule, *, sup_norm: float | None = None,
                     tol: float = IDENTITY_TOL) -> dict:
    """Evaluate every Lasso identity for one fit; returns ``{name: (ok, detail)}``.

    ``f_values`` are the fitted samples and ``fit_values`` the expansion at
    the nodes of ``rule``.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    k = lam * _penalty(mu, alpha.size)
    f = np.asarray(f_values, dtype=float)
    g = np.asarray(fit_values, dtype=float)
    K = k_functional(alpha, lam, mu)
    ff = inner(rule, f, f)
    gg = inner(rule, g, g)
    rr = inner(rule, f - g, f - g)
    cross = inner(rule, f - g, g)
    checks = {}

    checks["k_bounds"] = (0.0 <= K <= ff / 2 + 1e-12, f"K={K:.6e}, <f,f>/2={ff / 2:.6e}")
    checks["cross_identity"] = (abs(cross - K) <= tol, f"|<f-Lf,Lf> - K| = {abs(cross - K):.3e}")
    lhs = gg + rr
    checks["decomposition"] = (
        abs(lhs - (ff - 2 * K)) <= tol,
        f"|<Lf,Lf> + <f-Lf,f-Lf> - (<f,f> - 2K)| = {abs(lhs - (ff - 2 * K)):.3e}",
    )
    checks["discrete_stability"] = (gg <= ff - 2 * K + tol, f"{gg:.6e} <= {ff - 2 * K:.6e}")
    bsq = float(np.dot(beta, beta))
    checks["coefficient_stability"] = (bsq <= ff - 2 * K + tol, f"{bsq:.6e} <= {ff - 2 * K:.6e}")
    if sup_norm is not None:
        bound = rule.domain.volume * sup_norm**2
        checks["sup_stability"] = (bsq <= bound + tol, f"{bsq:.6e} <= {bound:.6e}")

    nz = beta != 0
    resid = beta[nz] - alpha[nz] + k[nz] * np.sign(beta[nz])
    kkt_active = np.all(np.abs(resid) <= _ulp_tol(alpha[nz], k[nz]))
    kkt_zero = np.all(np.abs(alpha[~nz]) <= k[~nz])
    sign_ok = np.all(np.sign(beta[nz]) == np.sign(alpha[nz]))
    checks["kkt"] = (bool(kkt_active and kkt_zero and sign_ok),
                     f"{int(nz.sum())} active, {int((~nz).sum())} zero")

    dropped = int(np.count_nonzero((np.abs(alpha) <= k) & (alpha != 0)))
    expected = int(np.count_nonzero(alpha)) - dropped
    checks["sparsity_identity"] = (int(nz.sum()) == expected,
                                   f"||beta||_0={int(nz.sum())}, predicted {expected}")
    lam_crit = float(np.max(np.abs(alpha) / (k / lam))) if alpha.size else 0.0
    checks["nonzero_guarantee"] = (not (lam < lam_crit) or int(nz.sum()) >= 1,
                                   f"lambda={lam:.3e}, threshold={lam_crit:.3e}")
    return checks


def assert_invariants(checks: dict, context: str = ""):
    failed = {name: detail for name, (ok, detail) in checks.items() if not ok}
    if failed:
        lines = "; ".join(f"{n}: {d}" for n, d in failed.items())
        raise InvariantViolation(f"{context}: {lines}" if context else lines)
