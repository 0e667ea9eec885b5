"""Reproducible additive noise on quadrature-node samples.

Draws come from a Philox counter-based generator keyed by
``(seed, trial, stream)``, so the value at node ``j`` depends only on that
key and ``j``, never on how many nodes are generated or in what order.
Gaussian variates use the inverse normal CDF, one uniform per node.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .errors import InvalidArgument

KINDS = ("none", "gaussian", "impulse", "mixed")


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model.

    ``gaussian``: N(0, sigma^2) per node.
    ``impulse``: ``amplitude * u * b`` with ``u ~ U[-1, 1]``, ``b ~ Bernoulli(prob)``.
    ``mixed``: the sum of ``components``.
    """

    kind: str = "none"
    sigma: float = 0.0
    amplitude: float = 0.0
    prob: float = 0.5
    components: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown noise kind {self.kind!r}")
        if self.sigma < 0 or self.amplitude < 0:
            raise InvalidArgument("noise scale must be non-negative")
        if not 0.0 <= self.prob <= 1.0:
            raise InvalidArgument("impulse probability must lie in [0, 1]")
        object.__setattr__(self, "components", tuple(self.components))
        if self.kind == "mixed":
            if not self.components:
                raise InvalidArgument("mixed noise needs at least one component")
            if any(c.kind == "mixed" for c in self.components):
                raise InvalidArgument("mixed noise components cannot be mixed themselves")

    @classmethod
    def gaussian(cls, sigma):
        return cls("gaussian", sigma=float(sigma))

    @classmethod
    def impulse(cls, amplitude, prob=0.5):
        return cls("impulse", amplitude=float(amplitude), prob=float(prob))

    @classmethod
    def mixed(cls, *components):
        return cls("mixed", components=tuple(components))

    def leaves(self):
        return self.components if self.kind == "mixed" else (self,)

    def label(self) -> str:
        """Short parameter string, e.g. ``sigma=0.15`` or ``sigma=0.02;a=0.02``."""
        parts = []
        for c in self.leaves():
            if c.kind == "gaussian":
                parts.append(f"sigma={c.sigma:g}")
            elif c.kind == "impulse":
                parts.append(f"a={c.amplitude:g}")
                if c.prob != 0.5:
                    parts.append(f"p={c.prob:g}")
        return ";".join(parts) or "-"

    def to_dict(self) -> dict:
        if self.kind == "mixed":
            return {"kind": "mixed", "components": [c.to_dict() for c in self.components]}
        if self.kind == "gaussian":
            return {"kind": "gaussian", "sigma": self.sigma}
        if self.kind == "impulse":
            return {"kind": "impulse", "amplitude": self.amplitude, "prob": self.prob}
        return {"kind": "none"}

    @classmethod
    def from_dict(cls, d) -> "NoiseSpec":
        d = dict(d)
        allowed = {"kind", "sigma", "amplitude", "prob", "components"}
        unknown = set(d) - allowed
        if unknown:
            raise InvalidArgument(f"unknown noise keys: {sorted(unknown)}")
        comps = tuple(cls.from_dict(c) for c in d.pop("components", ()))
        return cls(components=comps, **d)


@dataclass(frozen=True, eq=False)
class SampleSet:
    clean: np.ndarray
    noisy: np.ndarray
    noise: np.ndarray


def _uniform01(seed: int, trial: int, stream: int, n: int) -> np.ndarray:
    """``n`` uniforms in the open interval (0, 1) from the keyed Philox stream."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, ((trial & 0xFFFFFFFF) << 32) | stream],
                   dtype=np.uint64)
    raw = np.random.Philox(key=key).random_raw(n)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def draw_noise(spec: NoiseSpec, n: int, seed: int = 0, trial: int = 0) -> np.ndarray:
    """Noise vector of length ``n`` for ``spec``; deterministic in ``(seed, trial)``."""
    eps = np.zeros(n)
    stream = 0
    for comp in spec.leaves():
        if comp.kind == "gaussian":
            if comp.sigma > 0:
                eps += comp.sigma * ndtri(_uniform01(seed, trial, stream, n))
            stream += 1
        elif comp.kind == "impulse":
            if comp.amplitude > 0:
                u = 1.0 - 2.0 * _uniform01(seed, trial, stream, n)
                fire = _uniform01(seed, trial, stream + 1, n) < comp.prob
                eps += comp.amplitude * u * fire
            stream += 2
    return eps


def apply_noise(clean, spec: NoiseSpec, seed: int = 0, trial: int = 0,
                mask=None) -> SampleSet:
    """Add noise to ``clean``; ``mask`` (bool array) restricts it to selected nodes.

    Pass ``mask=clean != 0`` to perturb only nonzero function values.
    """
    clean = np.array(clean, dtype=float)
    eps = draw_noise(spec, clean.size, seed, trial)
    if mask is not None:
        eps = np.where(np.asarray(mask, dtype=bool), eps, 0.0)
    return SampleSet(clean, clean + eps, eps)


def max_abs_noise(samples: SampleSet) -> float:
    """``||eps||_inf``."""
    return float(np.max(np.abs(samples.noise))) if samples.noise.size else 0.0
