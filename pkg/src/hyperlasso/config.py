"""Experiment configuration: a frozen dataclass with strict JSON round-tripping."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .basis import dimension
from .errors import ConfigError, InvalidArgument
from .functions import BUILTINS
from .noise import NoiseSpec
from .quadrature import Domain

ESTIMATORS = ("hyper", "filtered", "tikhonov", "lasso")
PENALTIES = ("identity", "laplace_beltrami")
MASKS = ("all", "nonzero")
USER_FUNCTION = "user-file"


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a domain pipeline, estimator set, lambda grid and noise settings.

    ``lambda_grid`` and ``tikhonov_lambda`` are base-10 exponents.
    ``quadrature`` is the Gauss point count N on the interval, the disc
    rule parameter N, or the product-rule degree on the sphere (default L);
    the cube rule is fixed by L.  ``noise_mask="nonzero"`` perturbs only
    nodes where the clean function value is nonzero.
    """

    domain: str
    L: int
    test_function: str
    lambda_grid: tuple = (-1.0,)
    estimators: tuple = ESTIMATORS
    noise: tuple = (NoiseSpec(),)
    trials: int = 5
    seed: int = 0
    quadrature: int | None = None
    t_design: str | None = None
    t: int | None = None
    tikhonov_lambda: float | None = None
    tikhonov_penalty: str = "identity"
    mu: float | tuple = 1.0
    noise_mask: str = "all"
    function_file: str | None = None
    name: str = "experiment"
    output_dir: str = "results"

    def __post_init__(self):
        fix = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        try:
            dom = Domain.parse(self.domain)
        except InvalidArgument as exc:
            raise ConfigError(str(exc)) from None
        fix("domain", dom.value)
        if isinstance(self.L, bool) or not isinstance(self.L, int) or self.L < 1:
            raise ConfigError(f"L must be a positive integer, got {self.L!r}")
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")

        est = tuple(self.estimators)
        bad = [e for e in est if e not in ESTIMATORS]
        if bad or not est or len(set(est)) != len(est):
            raise ConfigError(f"estimators must be distinct values from {ESTIMATORS}, got {list(est)}")
        fix("estimators", est)

        grid = tuple(float(x) for x in self.lambda_grid)
        if ({"lasso", "tikhonov"} & set(est)) and not grid:
            raise ConfigError("lambda_grid is empty")
        fix("lambda_grid", grid)
        if self.tikhonov_lambda is not None:
            fix("tikhonov_lambda", float(self.tikhonov_lambda))
        if self.tikhonov_penalty not in PENALTIES:
            raise ConfigError(f"tikhonov_penalty must be one of {PENALTIES}")
        if self.tikhonov_penalty == "laplace_beltrami" and dom is not Domain.SPHERE:
            raise ConfigError("the laplace_beltrami penalty is only defined on the sphere")

        mu = self.mu
        if isinstance(mu, (list, tuple)):
            mu = tuple(float(m) for m in mu)
            if len(mu) != dimension(dom, self.L):
                raise ConfigError(f"mu has {len(mu)} entries, expected {dimension(dom, self.L)}")
            ok = all(m > 0 for m in mu)
        else:
            mu = float(mu)
            ok = mu > 0
        if not ok:
            raise ConfigError("penalty parameters mu must be positive")
        fix("mu", mu)

        noise = tuple(n if isinstance(n, NoiseSpec) else NoiseSpec.from_dict(n) for n in self.noise)
        if not noise:
            raise ConfigError("noise list is empty; use [{\"kind\": \"none\"}] for clean data")
        fix("noise", noise)
        if self.noise_mask not in MASKS:
            raise ConfigError(f"noise_mask must be one of {MASKS}")

        if self.test_function == USER_FUNCTION:
            if not self.function_file:
                raise ConfigError("test_function 'user-file' needs function_file")
        elif self.test_function not in BUILTINS:
            raise ConfigError(f"unknown test function {self.test_function!r}")
        elif BUILTINS[self.test_function].domain is not dom:
            raise ConfigError(f"{self.test_function} is defined on the {BUILTINS[self.test_function].domain.value}")

        if self.t_design is not None:
            if dom is not Domain.SPHERE:
                raise ConfigError("t_design is only meaningful on the sphere")
            if self.t is None:
                raise ConfigError("t_design needs its strength t")
            if self.quadrature is not None:
                raise ConfigError("give either t_design or quadrature, not both")
        if dom is Domain.CUBE and self.quadrature is not None:
            raise ConfigError("the cube rule is determined by L; drop 'quadrature'")

    @property
    def kind(self) -> Domain:
        return Domain(self.domain)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "noise":
                v = [n.to_dict() for n in v]
            elif isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        missing = [k for k in ("domain", "L", "test_function") if k not in data]
        if missing:
            raise ConfigError(f"missing config keys: {missing}")
        try:
            return cls(**data)
        except InvalidArgument as exc:
            raise ConfigError(str(exc)) from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return ExperimentConfig.from_dict(data)
