"""Orthonormal polynomial bases on the four domains.

Each basis is ordered by total degree; ties are broken lexicographically
on the per-domain index tuple stored in ``BasisSet.indices``:

=========  ===================  =========================================
domain     index tuple          element
=========  ===================  =========================================
interval   (l,)                 sqrt((2l+1)/2) P_l(x)
disc       (m, k), k = 0..m     U_m(x1 cos(k pi/(m+1)) + x2 sin(k pi/(m+1)))
sphere     (l, m), |m| <= l     real harmonic Y_lm, m < 0 -> sin, m > 0 -> cos
cube       (l1, l2, l3)         T~_l1(x1) T~_l2(x2) T~_l3(x3)
=========  ===================  =========================================

All are orthonormal with respect to the measures listed in
:mod:`hyperlasso.quadrature`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .quadrature import Domain

SQRT2 = math.sqrt(2.0)


def dimension(domain, L: int) -> int:
    """Dimension of the polynomial space of degree ``<= L`` on ``domain``."""
    domain = Domain.parse(domain)
    if not isinstance(L, (int, np.integer)) or L < 0:
        raise InvalidArgument(f"degree must be a non-negative integer, got {L!r}")
    L = int(L)
    if domain is Domain.INTERVAL:
        return L + 1
    if domain is Domain.DISC:
        return (L + 1) * (L + 2) // 2
    if domain is Domain.SPHERE:
        return (L + 1) ** 2
    return (L + 1) * (L + 2) * (L + 3) // 6


@dataclass(frozen=True, eq=False)
class BasisSet:
    """An ordered orthonormal basis of the polynomials of degree ``<= degree_cap``."""

    domain: Domain
    degree_cap: int
    indices: np.ndarray
    element_degree: np.ndarray

    def __post_init__(self):
        for name in ("indices", "element_degree"):
            a = np.array(getattr(self, name), dtype=np.int64)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def size(self) -> int:
        return self.element_degree.shape[0]

    def __len__(self):
        return self.size

    def evaluate(self, points) -> np.ndarray:
        """Basis values at ``points`` as an ``(n_points, size)`` matrix."""
        pts = self.domain.check_points(points)
        return self._evaluate(pts)

    def _evaluate(self, pts: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError


def eval_all(basis: BasisSet, point) -> np.ndarray:
    """All ``d`` basis values at a single point (one row of the design matrix)."""
    pts = basis.domain.check_points(point)
    if pts.shape[0] != 1:
        raise InvalidArgument("eval_all takes a single point; use BasisSet.evaluate for many")
    return basis._evaluate(pts)[0]


def _check_degree(L):
    if not isinstance(L, (int, np.integer)) or L < 0:
        raise InvalidArgument(f"degree must be a non-negative integer, got {L!r}")
    return int(L)


# ---------------------------------------------------------------------------
# interval
# ---------------------------------------------------------------------------


def legendre_table(L: int, x: np.ndarray) -> np.ndarray:
    """Orthonormal Legendre values ``p_l(x)``, shape ``(len(x), L + 1)``."""
    x = np.asarray(x, dtype=float).ravel()
    out = np.empty((x.size, L + 1))
    out[:, 0] = 1.0 / SQRT2
    if L >= 1:
        out[:, 1] = math.sqrt(1.5) * x
    # p_{l+1} = a_l x p_l - (a_l / a_{l-1}) p_{l-1},  a_l = sqrt((2l+1)(2l+3)) / (l+1)
    for l in range(1, L):
        a = math.sqrt((2 * l + 1) * (2 * l + 3)) / (l + 1)
        b = math.sqrt((2 * l + 3) / (2 * l - 1)) * l / (l + 1)
        out[:, l + 1] = a * x * out[:, l] - b * out[:, l - 1]
    return out


class LegendreBasis(BasisSet):
    def _evaluate(self, pts):
        return legendre_table(self.degree_cap, pts[:, 0])


def legendre_basis(L: int) -> LegendreBasis:
    L = _check_degree(L)
    deg = np.arange(L + 1)
    return LegendreBasis(Domain.INTERVAL, L, deg[:, None], deg)


# ---------------------------------------------------------------------------
# disc
# ---------------------------------------------------------------------------


class RidgeBasis(BasisSet):
    def _evaluate(self, pts):
        x1, x2 = pts[:, 0], pts[:, 1]
        out = np.empty((pts.shape[0], self.size))
        col = 0
        for m in range(self.degree_cap + 1):
            theta = np.arange(m + 1) * np.pi / (m + 1)
            t = np.outer(x1, np.cos(theta)) + np.outer(x2, np.sin(theta))
            u_prev = np.ones_like(t)
            u = u_prev if m == 0 else 2.0 * t
            for _ in range(2, m + 1):
                u, u_prev = 2.0 * t * u - u_prev, u
            out[:, col:col + m + 1] = u
            col += m + 1
        return out


def ridge_basis(L: int) -> RidgeBasis:
    """Logan-Shepp ridge polynomials, orthonormal for ``dx / pi`` on the disc."""
    L = _check_degree(L)
    idx = [(m, k) for m in range(L + 1) for k in range(m + 1)]
    idx = np.array(idx, dtype=np.int64).reshape(-1, 2)
    return RidgeBasis(Domain.DISC, L, idx, idx[:, 0])


# ---------------------------------------------------------------------------
# sphere
# ---------------------------------------------------------------------------


def normalized_legendre_functions(L: int, z: np.ndarray, s: np.ndarray | None = None):
    """Fully normalised associated Legendre functions ``Q[l][m]``, ``0 <= m <= l <= L``.

    ``Q_l^m(z) = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(z)`` without the
    Condon-Shortley phase, so that ``Q_l^0`` and ``sqrt(2) Q_l^m cos(m phi)``
    have unit norm on S^2.  ``s`` is ``sqrt(1 - z^2)``; pass it when it is
    available more accurately than from ``z``.  Returned as an array of shape
    ``(L + 1, L + 1, len(z))`` with zeros above the diagonal.
    """
    z = np.asarray(z, dtype=float)
    if s is None:
        s = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    Q = np.zeros((L + 1, L + 1) + z.shape)
    Q[0, 0] = 1.0 / math.sqrt(4.0 * math.pi)
    for m in range(1, L + 1):
        Q[m, m] = math.sqrt((2 * m + 1) / (2 * m)) * s * Q[m - 1, m - 1]
    for m in range(0, L):
        Q[m + 1, m] = math.sqrt(2 * m + 3) * z * Q[m, m]
    for m in range(0, L + 1):
        for l in range(m + 2, L + 1):
            a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
            Q[l, m] = a * (z * Q[l - 1, m] - b * Q[l - 2, m])
    return Q


class SphericalHarmonicBasis(BasisSet):
    def _evaluate(self, pts):
        L = self.degree_cap
        x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
        s = np.hypot(x, y)
        phi = np.arctan2(y, x)
        Q = normalized_legendre_functions(L, np.clip(z, -1.0, 1.0), s)
        out = np.empty((pts.shape[0], self.size))
        m = np.arange(1, L + 1)
        cos_m = np.cos(np.outer(phi, m)).T * SQRT2
        sin_m = np.sin(np.outer(phi, m)).T * SQRT2
        for l in range(L + 1):
            c = l * l + l
            out[:, c] = Q[l, 0]
            for mm in range(1, l + 1):
                out[:, c + mm] = Q[l, mm] * cos_m[mm - 1]
                out[:, c - mm] = Q[l, mm] * sin_m[mm - 1]
        return out


def spherical_harmonic_basis(L: int) -> SphericalHarmonicBasis:
    """Real spherical harmonics of degree ``<= L``, orthonormal under surface measure."""
    L = _check_degree(L)
    idx = [(l, m) for l in range(L + 1) for m in range(-l, l + 1)]
    idx = np.array(idx, dtype=np.int64).reshape(-1, 2)
    return SphericalHarmonicBasis(Domain.SPHERE, L, idx, idx[:, 0])


# ---------------------------------------------------------------------------
# cube
# ---------------------------------------------------------------------------


def chebyshev_table(L: int, x: np.ndarray) -> np.ndarray:
    """Normalised Chebyshev values ``T~_k(x)`` for ``k <= L``, shape ``(len(x), L + 1)``."""
    theta = np.arccos(np.clip(np.asarray(x, dtype=float).ravel(), -1.0, 1.0))
    out = np.cos(np.outer(theta, np.arange(L + 1))) * SQRT2
    out[:, 0] = 1.0
    return out


class ChebyshevProductBasis(BasisSet):
    @property
    def multi_indices(self) -> np.ndarray:
        return self.indices

    @property
    def scaling(self) -> np.ndarray:
        """``gamma_l = prod_s (sqrt 2 if l_s > 0 else 1)`` per element."""
        return np.prod(np.where(self.indices > 0, SQRT2, 1.0), axis=1)

    def _evaluate(self, pts, chunk: int = 2048):
        L = self.degree_cap
        i1, i2, i3 = self.indices.T
        out = np.empty((pts.shape[0], self.size))
        for start in range(0, pts.shape[0], chunk):
            sl = slice(start, start + chunk)
            T1 = chebyshev_table(L, pts[sl, 0])
            T2 = chebyshev_table(L, pts[sl, 1])
            T3 = chebyshev_table(L, pts[sl, 2])
            out[sl] = T1[:, i1] * T2[:, i2] * T3[:, i3]
        return out

    def coefficient_tensor(self, coeffs) -> np.ndarray:
        """Scatter a coefficient vector into an ``(L+1)^3`` tensor (zeros outside the simplex)."""
        L = self.degree_cap
        C = np.zeros((L + 1,) * 3)
        i1, i2, i3 = self.indices.T
        C[i1, i2, i3] = coeffs
        return C

    def gather(self, tensor) -> np.ndarray:
        i1, i2, i3 = self.indices.T
        return np.asarray(tensor)[i1, i2, i3]


def chebyshev_product_basis(L: int) -> ChebyshevProductBasis:
    """Tensor Chebyshev basis over ``l1 + l2 + l3 <= L``, graded then lexicographic."""
    L = _check_degree(L)
    idx = [
        (a, b, n - a - b)
        for n in range(L + 1)
        for a in range(n + 1)
        for b in range(n - a + 1)
    ]
    idx = np.array(idx, dtype=np.int64).reshape(-1, 3)
    return ChebyshevProductBasis(Domain.CUBE, L, idx, idx.sum(axis=1))


def basis_for(domain, L: int) -> BasisSet:
    """The standard basis for ``domain`` at degree ``L``."""
    domain = Domain.parse(domain)
    return {
        Domain.INTERVAL: legendre_basis,
        Domain.DISC: ridge_basis,
        Domain.SPHERE: spherical_harmonic_basis,
        Domain.CUBE: chebyshev_product_basis,
    }[domain](L)
