"""Hyperinterpolation coefficients and the coefficient transforms built on them.

Because the discrete Gram matrix of the basis is the identity, every
estimator here acts on the hyperinterpolation coefficients
``alpha_l = <f, p_l>_N`` one entry at a time:

* Lasso:     ``beta_l = S_{lambda mu_l}(alpha_l)`` (soft threshold)
* filtered:  ``beta_l = h(deg p_l / L) alpha_l``
* Tikhonov:  ``beta_l = alpha_l / (1 + lambda h_l)``
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisSet, ChebyshevProductBasis
from .errors import InvalidArgument
from .quadrature import CubeRule, Domain, QuadratureRule


@dataclass(frozen=True, eq=False)
class Expansion:
    """``sum_l coeffs[l] * basis[l]``."""

    basis: BasisSet
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.shape != (self.basis.size,):
            raise InvalidArgument(
                f"expected {self.basis.size} coefficients, got shape {c.shape}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __call__(self, points) -> np.ndarray:
        return evaluate(self, points)

    def norm(self) -> float:
        """L2 norm by Parseval: ``sqrt(sum coeffs^2)``."""
        return float(np.sqrt(np.dot(self.coeffs, self.coeffs)))

    def sparsity(self) -> int:
        return int(np.count_nonzero(self.coeffs))

    def on_rule(self, rule: QuadratureRule) -> np.ndarray:
        """Values at the nodes of ``rule`` (fast path for the cube lattice)."""
        if isinstance(rule, CubeRule) and isinstance(self.basis, ChebyshevProductBasis):
            return cube_synthesis(self.basis, self.coeffs, rule)
        return evaluate(self, rule.nodes)


def _as_vector(values, name="coefficients") -> np.ndarray:
    a = np.asarray(values, dtype=float)
    if a.ndim != 1:
        raise InvalidArgument(f"{name} must be one-dimensional")
    return a


def _penalty(mu, d: int) -> np.ndarray:
    mu = np.broadcast_to(np.asarray(mu, dtype=float), (d,))
    if not np.all(mu > 0):
        raise InvalidArgument("penalty parameters must be positive")
    return mu


# ---------------------------------------------------------------------------
# hyperinterpolation
# ---------------------------------------------------------------------------


def hyper_coefficients(rule: QuadratureRule, basis: BasisSet, samples, *,
                       method: str = "auto", chunk: int = 4096) -> np.ndarray:
    """``alpha_l = sum_j w_j p_l(x_j) f_j`` for every basis element.

    ``method="transform"`` (the default for the cube lattice rule) uses three
    nested cosine sums over the zero-padded lattice tensor; ``"direct"``
    accumulates ``A^T W f`` over chunks of nodes without forming ``A``.
    """
    f = _as_vector(samples, "samples")
    if f.shape[0] != rule.size:
        raise InvalidArgument(f"got {f.shape[0]} samples for a rule with {rule.size} nodes")
    if rule.domain is not basis.domain:
        raise InvalidArgument("rule and basis live on different domains")
    if rule.exactness_degree < 2 * basis.degree_cap:
        raise InvalidArgument(
            f"rule exactness {rule.exactness_degree} < 2 x basis degree {basis.degree_cap}"
        )
    fast = isinstance(rule, CubeRule) and isinstance(basis, ChebyshevProductBasis)
    if method == "transform" and not fast:
        raise InvalidArgument("the cosine transform needs a cube lattice rule and Chebyshev basis")
    if method not in ("auto", "direct", "transform"):
        raise InvalidArgument(f"unknown method {method!r}")
    wf = rule.weights * f
    if fast and method != "direct":
        return cube_analysis(basis, rule, wf)
    alpha = np.zeros(basis.size)
    for start in range(0, rule.size, chunk):
        sl = slice(start, start + chunk)
        alpha += basis.evaluate(rule.nodes[sl]).T @ wf[sl]
    return alpha


def _cosine_matrix(kmax: int, M: int) -> np.ndarray:
    # C[k, i] = cos(k i pi / M), i = 0..M
    return np.cos(np.outer(np.arange(kmax + 1), np.arange(M + 1)) * (np.pi / M))


def cube_analysis(basis: ChebyshevProductBasis, rule: CubeRule, weighted) -> np.ndarray:
    """Cube coefficients from ``weighted = w * f`` by three 1-D cosine sums."""
    F = rule.padded_tensor(weighted)
    C = _cosine_matrix(basis.degree_cap, rule.grid_size - 1)
    T = np.tensordot(C, F, axes=(1, 0))            # (l1, j, k)
    T = np.tensordot(T, C, axes=(1, 1))            # (l1, k, l2)
    T = np.tensordot(T, C, axes=(1, 1))            # (l1, l2, l3)
    return basis.scaling * basis.gather(T)


def cube_synthesis(basis: ChebyshevProductBasis, coeffs, rule: CubeRule) -> np.ndarray:
    """Values of ``sum_l c_l p_l`` at the lattice nodes of ``rule``."""
    G = basis.coefficient_tensor(basis.scaling * np.asarray(coeffs, dtype=float))
    C = _cosine_matrix(basis.degree_cap, rule.grid_size - 1)
    V = np.tensordot(C, G, axes=(0, 0))            # (i, l2, l3)
    V = np.tensordot(V, C, axes=(1, 0))            # (i, l3, j)
    V = np.tensordot(V, C, axes=(1, 0))            # (i, j, k)
    i, j, k = rule.lattice.T
    return V[i, j, k]


# ---------------------------------------------------------------------------
# coefficient transforms
# ---------------------------------------------------------------------------


def soft_threshold(a, k):
    """``S_k(a) = max(0, a - k) + min(0, a + k)``.

    Entries with ``|a| <= k`` come out as exact zeros.
    """
    a = np.asarray(a, dtype=float)
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise InvalidArgument("threshold must be non-negative")
    out = np.where(a > k, a - k, np.where(a < -k, a + k, 0.0))
    return float(out) if out.ndim == 0 else out


def lasso_coefficients(alpha, lam: float, mu=1.0) -> np.ndarray:
    """Lasso hyperinterpolation coefficients ``S_{lam mu_l}(alpha_l)``; ``lam > 0``."""
    alpha = _as_vector(alpha)
    if not lam > 0:
        raise InvalidArgument(f"regularisation parameter must be positive, got {lam!r}")
    return soft_threshold(alpha, lam * _penalty(mu, alpha.size))


def trig_filter(x):
    """1 on [0, 1/2], ``sin^2(pi x)`` on [1/2, 1], 0 beyond."""
    x = np.asarray(x, dtype=float)
    return np.where(x <= 0.5, 1.0, np.where(x >= 1.0, 0.0, np.sin(np.pi * x) ** 2))


def filtered_coefficients(alpha, basis: BasisSet) -> np.ndarray:
    alpha = _as_vector(alpha)
    if basis.degree_cap < 1:
        raise InvalidArgument("filtering needs a basis of degree at least 1")
    if alpha.size != basis.size:
        raise InvalidArgument("coefficient vector does not match the basis")
    return trig_filter(basis.element_degree / basis.degree_cap) * alpha


def tikhonov_coefficients(alpha, lam: float, penalty=1.0) -> np.ndarray:
    """Minimiser of ``1/2 |W^1/2 (A b - f)|^2 + lam/2 b^T H b`` for diagonal ``H``."""
    alpha = _as_vector(alpha)
    if lam < 0:
        raise InvalidArgument("regularisation parameter must be non-negative")
    return alpha / (1.0 + lam * _penalty(penalty, alpha.size))


def laplace_beltrami_penalty(basis: BasisSet) -> np.ndarray:
    """Diagonal penalty ``(1 + l(l+1))^2`` on spherical harmonics of degree ``l``.

    A diagonal stand-in for a Laplace-Beltrami-weighted Tikhonov scheme.
    """
    if basis.domain is not Domain.SPHERE:
        raise InvalidArgument("the Laplace-Beltrami penalty is defined on the sphere only")
    l = basis.element_degree.astype(float)
    return (1.0 + l * (l + 1.0)) ** 2


def lasso_objective(rule: QuadratureRule, basis: BasisSet, samples, beta, lam: float,
                    mu=1.0) -> np.ndarray:
    """``1/2 sum_j w_j (p(x_j) - f_j)^2 + lam sum_l mu_l |beta_l|`` with ``p = sum beta_l p_l``.

    ``beta`` may be a stack of coefficient vectors ``(m, d)``; the sum is
    computed from node values, not from the reduced coefficient form.
    """
    f = _as_vector(samples, "samples")
    B = np.atleast_2d(np.asarray(beta, dtype=float))
    A = basis.evaluate(rule.nodes)
    resid = B @ A.T - f
    mu = _penalty(mu, basis.size)
    out = 0.5 * (resid * resid) @ rule.weights + lam * (np.abs(B) @ mu)
    return out if np.ndim(beta) == 2 else float(out[0])


def lambda_max(alpha) -> float:
    """``max_l |alpha_l|``: any ``lambda`` below it keeps a nonzero coefficient (mu = 1)."""
    alpha = _as_vector(alpha)
    if alpha.size == 0:
        raise InvalidArgument("empty coefficient vector")
    return float(np.max(np.abs(alpha)))


def evaluate(expansion: Expansion, points, chunk: int = 4096) -> np.ndarray:
    basis = expansion.basis
    pts = basis.domain.check_points(points)
    out = np.empty(pts.shape[0])
    for start in range(0, pts.shape[0], chunk):
        sl = slice(start, start + chunk)
        out[sl] = basis._evaluate(pts[sl]) @ expansion.coeffs
    return out
