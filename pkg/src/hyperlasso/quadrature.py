"""Positive-weight quadrature rules on the interval, disc, sphere and cube.

Every rule carries the degree up to which it integrates polynomials
exactly.  For hyperinterpolation of degree ``L`` that degree must be at
least ``2L`` so that the discrete Gram matrix of an orthonormal basis of
degree ``L`` is the identity.

Measures
--------
interval  dx on [-1, 1]                         (volume 2)
disc      dx / pi on the unit disc              (volume 1)
sphere    surface measure on S^2                (volume 4 pi)
cube      prod_i 1 / (pi sqrt(1 - x_i^2)) dx_i  (volume 1)
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    EvaluationError,
    ExactnessError,
    InvalidArgument,
    ParseError,
    ValidationError,
)

#: absolute tolerance for domain membership and unit-norm checks
MEMBERSHIP_TOL = 1e-12


class Domain(enum.Enum):
    INTERVAL = "interval"
    DISC = "disc"
    SPHERE = "sphere"
    CUBE = "cube"

    @property
    def volume(self) -> float:
        return _VOLUMES[self]

    @property
    def ambient_dim(self) -> int:
        return _DIMS[self]

    @classmethod
    def parse(cls, value) -> "Domain":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidArgument(f"unknown domain {value!r}") from None

    def check_points(self, points) -> np.ndarray:
        """Return ``points`` as an ``(n, dim)`` array, raising if any lies outside."""
        pts = np.asarray(points, dtype=float)
        dim = self.ambient_dim
        if dim == 1 and pts.ndim <= 1:
            pts = pts.reshape(-1, 1)
        elif pts.ndim == 1:
            pts = pts.reshape(1, -1)
        if pts.ndim != 2 or pts.shape[1] != dim:
            raise InvalidArgument(
                f"{self.value} points must have {dim} coordinate(s), got shape {pts.shape}"
            )
        if not np.all(np.isfinite(pts)):
            raise InvalidArgument("points must be finite")
        tol = MEMBERSHIP_TOL
        if self in (Domain.INTERVAL, Domain.CUBE):
            bad = np.any(np.abs(pts) > 1.0 + tol, axis=1)
        elif self is Domain.DISC:
            bad = np.hypot(pts[:, 0], pts[:, 1]) > 1.0 + tol
        else:
            bad = np.abs(np.linalg.norm(pts, axis=1) - 1.0) > tol
        if np.any(bad):
            first = int(np.flatnonzero(bad)[0])
            raise InvalidArgument(f"point {pts[first].tolist()} lies outside the {self.value}")
        return pts


_VOLUMES = {
    Domain.INTERVAL: 2.0,
    Domain.DISC: 1.0,
    Domain.SPHERE: 4.0 * math.pi,
    Domain.CUBE: 1.0,
}
_DIMS = {Domain.INTERVAL: 1, Domain.DISC: 2, Domain.SPHERE: 3, Domain.CUBE: 3}


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes ``(N, dim)``, positive weights ``(N,)`` and declared exactness degree."""

    domain: Domain
    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int

    def __post_init__(self):
        nodes = _frozen(self.nodes)
        if nodes.ndim == 1:
            nodes = _frozen(nodes.reshape(-1, 1))
        weights = _frozen(self.weights)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape[0] != weights.shape[0]:
            raise ValidationError("nodes and weights differ in length")
        if np.any(weights <= 0):
            raise ValidationError("quadrature weights must be positive")

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    def __len__(self):
        return self.size


@dataclass(frozen=True, eq=False)
class CubeRule(QuadratureRule):
    """Cube rule whose nodes sit on the Chebyshev-Lobatto lattice.

    ``lattice[j]`` holds the integer indices ``(i1, i2, i3)`` of node ``j``,
    i.e. ``nodes[j] == cos(lattice[j] * pi / (L + 1))``.
    """

    degree: int = 0
    lattice: np.ndarray = field(default=None)

    def __post_init__(self):
        super().__post_init__()
        lat = np.array(self.lattice, dtype=np.int64)
        lat.setflags(write=False)
        object.__setattr__(self, "lattice", lat)

    @property
    def grid_size(self) -> int:
        """Number of Chebyshev-Lobatto points per axis, ``L + 2``."""
        return self.degree + 2

    def padded_tensor(self, values) -> np.ndarray:
        """Scatter per-node ``values`` into the zero-padded ``(L+2)^3`` lattice tensor."""
        n = self.grid_size
        F = np.zeros((n, n, n))
        i, j, k = self.lattice.T
        F[i, j, k] = values
        return F


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def _legendre_and_derivative(n: int, x: np.ndarray):
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    if n == 0:
        return p0, np.zeros_like(x)
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


def gauss_legendre(n: int):
    """Gauss-Legendre nodes (ascending) and weights on [-1, 1].

    Newton iteration on the three-term recurrence, started from the
    asymptotic guess ``cos(pi (i - 1/4) / (n + 1/2))``.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidArgument(f"number of Gauss points must be a positive integer, got {n!r}")
    n = int(n)
    i = np.arange(1, n + 1)
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))
    for _ in range(100):
        p, dp = _legendre_and_derivative(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= 1e-15:
            break
    _, dp = _legendre_and_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    x = x[::-1]
    w = w[::-1]
    # exact mirror symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return x, w


def gauss_legendre_rule(n: int) -> QuadratureRule:
    """``n``-point Gauss-Legendre rule on [-1, 1], exact to degree ``2n - 1``."""
    x, w = gauss_legendre(n)
    return QuadratureRule(Domain.INTERVAL, x.reshape(-1, 1), w, 2 * int(n) - 1)


def disc_rule(N: int) -> QuadratureRule:
    """Trapezoid-in-angle times Gauss-in-radius rule on the unit disc.

    Uses ``N + 1`` Gauss-Legendre radii on [0, 1] and ``2N + 1`` equispaced
    angles ``2 pi m / (2N + 1)``; exact to degree ``2N`` for ``dx / pi``.
    """
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise InvalidArgument(f"disc rule parameter must be a positive integer, got {N!r}")
    N = int(N)
    x, w = gauss_legendre(N + 1)
    r = 0.5 * (x + 1.0)
    wr = 0.5 * w
    theta = 2.0 * np.pi * np.arange(2 * N + 1) / (2 * N + 1)
    R, TH = np.meshgrid(r, theta, indexing="ij")
    W = np.outer(wr * r, np.full(theta.size, 2.0 / (2 * N + 1)))
    nodes = np.column_stack([(R * np.cos(TH)).ravel(), (R * np.sin(TH)).ravel()])
    return QuadratureRule(Domain.DISC, nodes, W.ravel(), 2 * N)


def sphere_product_rule(L: int) -> QuadratureRule:
    """Gauss-in-``z`` times trapezoid-in-azimuth rule on S^2, exact to degree ``2L``."""
    if not isinstance(L, (int, np.integer)) or L < 0:
        raise InvalidArgument(f"degree must be a non-negative integer, got {L!r}")
    L = int(L)
    z, wz = gauss_legendre(L + 1)
    m = 2 * L + 1
    phi = 2.0 * np.pi * np.arange(m) / m
    Z, PHI = np.meshgrid(z, phi, indexing="ij")
    rho = np.sqrt(1.0 - Z * Z)
    nodes = np.column_stack(
        [(rho * np.cos(PHI)).ravel(), (rho * np.sin(PHI)).ravel(), Z.ravel()]
    )
    W = np.outer(wz, np.full(m, 2.0 * np.pi / m))
    return QuadratureRule(Domain.SPHERE, nodes, W.ravel(), 2 * L)


def cube_node_classes(lattice: np.ndarray, n_last: int) -> np.ndarray:
    """Number of boundary coordinates per node: 0 interior, 1 face, 2 edge, 3 vertex."""
    lat = np.asarray(lattice)
    return np.sum((lat == 0) | (lat == n_last), axis=1)


def cube_rule(L: int) -> CubeRule:
    """Chebyshev-lattice cubature on [-1, 1]^3 of exactness ``2L``.

    Nodes are ``(C^E)^3 U (C^O)^3`` where ``C = {cos(k pi / (L+1)), k = 0..L+1}``
    split by parity of ``k``.  Weights are ``4 / (L+1)^3`` scaled by 1, 1/2,
    1/4, 1/8 for interior, face, edge and vertex nodes.
    """
    if not isinstance(L, (int, np.integer)) or L < 1:
        raise InvalidArgument(f"cube degree must be a positive integer, got {L!r}")
    L = int(L)
    M = L + 1
    idx = np.arange(M + 1)
    blocks = []
    for parity in (0, 1):
        sub = idx[idx % 2 == parity]
        g = np.stack(np.meshgrid(sub, sub, sub, indexing="ij"), axis=-1).reshape(-1, 3)
        blocks.append(g)
    lattice = np.concatenate(blocks)
    order = np.lexsort((lattice[:, 2], lattice[:, 1], lattice[:, 0]))
    lattice = lattice[order]
    nodes = np.cos(lattice * np.pi / M)
    classes = cube_node_classes(lattice, M)
    weights = 4.0 / M**3 * np.ldexp(1.0, -classes)
    return CubeRule(Domain.CUBE, nodes, weights, 2 * L, degree=L, lattice=lattice)


def load_t_design(path, t: int, *, tol: float = 1e-8) -> QuadratureRule:
    """Load an equal-weight spherical ``t``-design from a text file.

    One point per line as three whitespace-separated numbers; blank lines and
    ``#`` comments are skipped.  A relative path that does not exist is
    looked up in ``$HYPERLASSO_TDESIGN_DIR``.  Exactness up to degree ``t``
    is checked against real spherical harmonics before the rule is returned.
    """
    path = os.fspath(path)
    if not os.path.isabs(path) and not os.path.exists(path):
        base = os.environ.get("HYPERLASSO_TDESIGN_DIR")
        if base:
            path = os.path.join(base, path)
    if not isinstance(t, (int, np.integer)) or t < 0:
        raise InvalidArgument(f"design strength must be a non-negative integer, got {t!r}")
    points = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 3:
                raise ParseError(f"expected 3 coordinates, found {len(parts)}", lineno)
            try:
                xyz = [float(p) for p in parts]
            except ValueError:
                raise ParseError(f"non-numeric coordinate in {text!r}", lineno) from None
            norm = math.sqrt(sum(c * c for c in xyz))
            if not math.isfinite(norm) or abs(norm - 1.0) > 1e-8:
                raise ValidationError(f"line {lineno}: point has norm {norm!r}, expected 1")
            points.append(xyz)
    if not points:
        raise ParseError("file contains no points")
    nodes = np.asarray(points)
    nodes /= np.linalg.norm(nodes, axis=1, keepdims=True)
    weights = np.full(len(nodes), 4.0 * math.pi / len(nodes))
    rule = QuadratureRule(Domain.SPHERE, nodes, weights, int(t))
    residual, worst = harmonic_residual(rule, int(t))
    if residual > tol:
        raise ExactnessError(
            f"points are not a {t}-design: worst harmonic residual {residual:.3e} "
            f"at (degree, order) = {worst}",
            residual=residual,
            worst=worst,
        )
    return rule


def harmonic_residual(rule: QuadratureRule, t: int):
    """Worst ``|sum_j w_j Y(x_j) - int Y|`` over real harmonics of degree <= ``t``.

    Returns ``(residual, (degree, order))``.
    """
    from .basis import spherical_harmonic_basis

    basis = spherical_harmonic_basis(t)
    sums = basis.evaluate(rule.nodes).T @ rule.weights
    exact = np.zeros(basis.size)
    exact[0] = math.sqrt(4.0 * math.pi)
    resid = np.abs(sums - exact)
    k = int(np.argmax(resid))
    return float(resid[k]), tuple(int(v) for v in basis.indices[k])


# ---------------------------------------------------------------------------
# integration and exactness checks
# ---------------------------------------------------------------------------


def integrate(rule: QuadratureRule, f: Callable[[np.ndarray], np.ndarray]) -> float:
    """Return ``sum_j w_j f(x_j)``.

    ``f`` receives the ``(N, dim)`` node array and returns ``N`` values
    (for the interval a flat array of abscissae is passed).
    """
    pts = rule.nodes[:, 0] if rule.domain is Domain.INTERVAL else rule.nodes
    vals = np.broadcast_to(np.asarray(f(pts), dtype=float), (rule.size,))
    if not np.all(np.isfinite(vals)):
        bad = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise EvaluationError(f"integrand is not finite at node {bad}: {rule.nodes[bad].tolist()}")
    return float(np.dot(rule.weights, vals))


@dataclass(frozen=True)
class ExactnessReport:
    max_deviation: float
    worst_pair: tuple
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol

    def __bool__(self):
        return self.passed


def discrete_gram(rule: QuadratureRule, basis, chunk: int = 4096) -> np.ndarray:
    """Dense ``A^T W A`` accumulated over node chunks in a fixed order."""
    d = basis.size
    G = np.zeros((d, d))
    for start in range(0, rule.size, chunk):
        sl = slice(start, start + chunk)
        A = basis.evaluate(rule.nodes[sl])
        G += A.T @ (rule.weights[sl, None] * A)
    return G


def verify_exactness(rule: QuadratureRule, basis, tol: float = 1e-8) -> ExactnessReport:
    """Max-entry deviation of the discrete Gram matrix from the identity.

    Requires ``2 * basis.degree_cap <= rule.exactness_degree``.  For the cube
    lattice rule with the Chebyshev product basis the Gram matrix is formed
    from the rule's Chebyshev moments instead of a dense ``N x d`` matrix.
    """
    if basis.domain is not rule.domain:
        raise InvalidArgument(
            f"basis on {basis.domain.value} cannot be checked against a {rule.domain.value} rule"
        )
    if 2 * basis.degree_cap > rule.exactness_degree:
        raise InvalidArgument(
            f"rule exactness {rule.exactness_degree} is below twice the basis degree "
            f"{basis.degree_cap}"
        )
    if isinstance(rule, CubeRule) and hasattr(basis, "multi_indices"):
        dev, pair = _cube_gram_deviation(rule, basis)
    else:
        G = discrete_gram(rule, basis)
        G[np.diag_indices_from(G)] -= 1.0
        np.abs(G, out=G)
        k = int(np.argmax(G))
        pair = tuple(int(v) for v in np.unravel_index(k, G.shape))
        dev = float(G[pair])
    return ExactnessReport(dev, pair, tol)


def chebyshev_moments(rule: CubeRule, kmax: int) -> np.ndarray:
    """``M[a, b, c] = sum_j w_j T_a(x_j1) T_b(x_j2) T_c(x_j3)`` for ``a, b, c <= kmax``."""
    n = rule.grid_size
    theta = np.arange(n) * np.pi / (n - 1)
    C = np.cos(np.outer(np.arange(kmax + 1), theta))
    W = rule.padded_tensor(rule.weights)
    return np.einsum("ai,bj,ck,ijk->abc", C, C, C, W, optimize=True)


def _cube_gram_deviation(rule: CubeRule, basis, block: int = 512):
    # T~_a T~_b = (g_a g_b / 2)(T_{a+b} + T_{|a-b|}) with g_0 = 1, g_k = sqrt 2,
    # so each Gram entry is a combination of eight Chebyshev moments.  The
    # third axis is pre-summed into Q[a3] (one cache-sized slab per row
    # degree a3), leaving four lookups per entry.  Pairs are visited once,
    # with the row's third index not above the column's.
    idx = basis.multi_indices.astype(np.int32)
    L = basis.degree_cap
    K = 2 * L + 1
    M = chebyshev_moments(rule, 2 * L)
    g = np.prod(np.where(idx > 0, math.sqrt(2.0), 1.0), axis=1) / math.sqrt(8.0)
    b3 = np.arange(L + 1)
    worst = -1.0
    pair = (0, 0)
    for a3 in range(L + 1):
        slab = (M[:, :, a3 + b3] + M[:, :, np.abs(a3 - b3)]).reshape(-1)
        row_ids = np.flatnonzero(idx[:, 2] == a3)
        col_ids = np.flatnonzero(idx[:, 2] >= a3)
        cols = idx[col_ids]
        for start in range(0, row_ids.size, block):
            rid = row_ids[start:start + block]
            rows = idx[rid]
            p1 = (rows[:, None, 0] + cols[None, :, 0]) * K
            m1 = np.abs(rows[:, None, 0] - cols[None, :, 0]) * K
            p2 = rows[:, None, 1] + cols[None, :, 1]
            m2 = np.abs(rows[:, None, 1] - cols[None, :, 1])
            c3 = cols[None, :, 2]
            acc = np.zeros(p1.shape)
            for k1 in (p1, m1):
                for k2 in (p2, m2):
                    acc += slab.take((k1 + k2) * (L + 1) + c3)
            acc *= g[rid, None] * g[None, col_ids]
            acc[np.arange(rid.size), np.searchsorted(col_ids, rid)] -= 1.0
            np.abs(acc, out=acc)
            k = int(np.argmax(acc))
            i, j = np.unravel_index(k, acc.shape)
            if acc[i, j] > worst:
                worst = float(acc[i, j])
                pair = (int(rid[i]), int(col_ids[j]))
    return worst, pair
