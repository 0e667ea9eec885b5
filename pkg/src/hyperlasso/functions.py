"""Built-in test functions, each with an analytic upper bound on its sup-norm."""

from __future__ import annotations

import importlib.util
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError
from .quadrature import Domain

#: scale of the normalised Wendland function, 9 Gamma(5/2) / (2 Gamma(3))
WENDLAND_DELTA = 9.0 * math.gamma(2.5) / (2.0 * math.gamma(3.0))

#: the six axis poles used as Wendland cap centres
POLES = np.array([
    [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0], [0.0, -1.0, 0.0],
    [0.0, 0.0, 1.0], [0.0, 0.0, -1.0],
])


def wendland(r):
    """Original Wendland function ``(max(1 - r, 0))^6 (35 r^2 + 18 r + 3) / 3``."""
    r = np.asarray(r, dtype=float)
    return np.maximum(1.0 - r, 0.0) ** 6 * (35.0 * r * r + 18.0 * r + 3.0) / 3.0


def exp_sq(x):
    return np.exp(-np.asarray(x, dtype=float) ** 2)


def disc_poisson(p):
    p = np.atleast_2d(p)
    x1, x2 = p[:, 0], p[:, 1]
    return (1.0 - (x1 * x1 + x2 * x2)) * np.exp(x1 * np.cos(x2))


def wendland_caps(p):
    p = np.atleast_2d(p)
    dist = np.linalg.norm(p[:, None, :] - POLES[None, :, :], axis=-1)
    return wendland(dist / WENDLAND_DELTA).sum(axis=1)


def cube_exp(p):
    p = np.atleast_2d(p)
    r2 = np.sum(p * p, axis=1)
    out = np.zeros_like(r2)
    pos = r2 > 0
    out[pos] = np.exp(-1.0 / r2[pos])
    return out


@dataclass(frozen=True)
class TestFunction:
    name: str
    domain: Domain
    func: Callable
    sup_norm: float | None

    def __call__(self, points):
        return self.func(points)


BUILTINS = {
    "exp_sq": TestFunction("exp_sq", Domain.INTERVAL, exp_sq, 1.0),
    # |1 - r^2| <= 1 and |x1 cos x2| <= 1 on the disc
    "disc_poisson": TestFunction("disc_poisson", Domain.DISC, disc_poisson, math.e),
    # six caps, each at most wendland(0) = 1
    "wendland_caps": TestFunction("wendland_caps", Domain.SPHERE, wendland_caps, 6.0),
    "cube_exp": TestFunction("cube_exp", Domain.CUBE, cube_exp, math.exp(-1.0 / 3.0)),
}


def built_in_function(name: str, point=None):
    """The named test function, or its value at ``point`` when one is given."""
    try:
        fn = BUILTINS[name]
    except KeyError:
        raise ConfigError(f"unknown test function {name!r}; choose from {sorted(BUILTINS)}") from None
    if point is None:
        return fn
    pts = fn.domain.check_points(point)
    arg = pts[:, 0] if fn.domain is Domain.INTERVAL else pts
    return float(np.asarray(fn(arg)).ravel()[0])


def load_user_function(path, domain) -> TestFunction:
    """Load ``f(points)`` (and optional ``SUP_NORM``) from a Python file."""
    spec = importlib.util.spec_from_file_location("hyperlasso_user_function", path)
    if spec is None or spec.loader is None:
        raise ConfigError(f"cannot load test function from {path}")
    mod = importlib.util.module_from_spec(spec)
    try:
        spec.loader.exec_module(mod)
    except FileNotFoundError:
        raise ConfigError(f"test function file {path} not found") from None
    if not callable(getattr(mod, "f", None)):
        raise ConfigError(f"{path} does not define a callable f(points)")
    sup = getattr(mod, "SUP_NORM", None)
    return TestFunction(f"user:{path}", Domain.parse(domain), mod.f,
                        None if sup is None else float(sup))
