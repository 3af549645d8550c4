"""Proposal kernels.

A kernel is an object with three things: ``kind`` ("local" or "long", used
for acceptance bookkeeping), ``sample(x, rng) -> y``, and
``log_ratio(x, y) -> log q(y,x) - log q(x,y)`` (zero for symmetric kernels).

Locality is a property of the pairing between kernel and target: a kernel is
local when its typical displacement is below the within-mode spread, and
long-range when its mean displacement exceeds the target's barycenter
spread.  Heavy-tailed kernels (Cauchy) have infinite mean displacement and
are long-range against any target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .empirical import EmpiricalMeasure
from .errors import ConfigurationError
from .phylo import PhyloTarget, TreeTopology

LOCAL = "local"
LONG = "long"


def _require_positive(name: str, value: float) -> None:
    if not (value > 0) or not math.isfinite(value):
        raise ConfigurationError(f"{name} must be positive and finite, got {value}")


@dataclass(frozen=True)
class BallKernel:
    """Uniform draw from the euclidean ball of given radius around x."""

    radius: float
    kind: str = LOCAL

    def __post_init__(self):
        _require_positive("radius", self.radius)

    def sample(self, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        d = x.shape[0]
        direction = rng.standard_normal(d)
        norm = math.sqrt(float(direction @ direction))
        while norm == 0.0:  # probability zero, but stay well defined
            direction = rng.standard_normal(d)
            norm = math.sqrt(float(direction @ direction))
        r = self.radius * rng.random() ** (1.0 / d)
        return x + (r / norm) * direction

    def log_ratio(self, x, y) -> float:
        return 0.0


@dataclass(frozen=True)
class GaussianKernel:
    """Isotropic Gaussian step of the given scale."""

    scale: float
    kind: str = LOCAL

    def __post_init__(self):
        _require_positive("scale", self.scale)

    def sample(self, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return x + self.scale * rng.standard_normal(x.shape[0])

    def log_ratio(self, x, y) -> float:
        return 0.0


@dataclass(frozen=True)
class CauchyKernel:
    """Independent per-coordinate Cauchy steps; heavy tailed, long range."""

    scale: float
    kind: str = LONG

    def __post_init__(self):
        _require_positive("scale", self.scale)

    def sample(self, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return x + self.scale * rng.standard_cauchy(x.shape[0])

    def log_ratio(self, x, y) -> float:
        return 0.0


@dataclass(frozen=True)
class EmpiricalKernel:
    """Independence proposal drawing uniformly from an empirical measure.

    Meant for the tempered jump acceptance, which needs no proposal density;
    there is no closed-form q, so log_ratio refuses.
    """

    measure: EmpiricalMeasure
    kind: str = LONG

    def sample(self, x, rng: np.random.Generator):
        return self.measure.draw(rng)

    def log_ratio(self, x, y) -> float:
        raise ConfigurationError(
            "empirical kernel has no closed-form density; "
            "use the tempered jump acceptance instead of plain MH"
        )


# -- lattice kernels (integer cell states) ---------------------------------


@dataclass(frozen=True)
class LatticeStepKernel:
    """Uniform step of 1..width cells in either direction.

    Off-lattice proposals are emitted as-is; the target assigns them zero
    mass, so they are rejected and the kernel stays symmetric.
    """

    width: int = 1
    kind: str = LOCAL

    def __post_init__(self):
        if self.width < 1:
            raise ConfigurationError(f"width must be >= 1, got {self.width}")

    def sample(self, x: int, rng: np.random.Generator) -> int:
        step = int(rng.integers(1, self.width + 1))
        if int(rng.integers(2)):
            step = -step
        return int(x) + step

    def log_ratio(self, x, y) -> float:
        return 0.0


@dataclass(frozen=True)
class LatticeUniformKernel:
    """Independence draw uniform over all n cells."""

    n: int
    kind: str = LONG

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError(f"n must be >= 1, got {self.n}")

    def sample(self, x: int, rng: np.random.Generator) -> int:
        return int(rng.integers(self.n))

    def log_ratio(self, x, y) -> float:
        return 0.0


@dataclass(frozen=True)
class LatticeCauchyKernel:
    """Cauchy-length step rounded to whole cells; heavy tailed on the lattice."""

    scale: float
    kind: str = LONG

    def __post_init__(self):
        _require_positive("scale", self.scale)

    def sample(self, x: int, rng: np.random.Generator) -> int:
        return int(x) + int(np.rint(self.scale * rng.standard_cauchy()))

    def log_ratio(self, x, y) -> float:
        return 0.0


# -- tree kernels ----------------------------------------------------------


@dataclass(frozen=True)
class NniKernel:
    """One uniform nearest-neighbor interchange; symmetric (2(n-3) both ways)."""

    kind: str = LOCAL

    def sample(self, x: TreeTopology, rng: np.random.Generator) -> TreeTopology:
        return x.random_nni(rng)

    def log_ratio(self, x, y) -> float:
        return 0.0


@dataclass(frozen=True)
class CompoundNniKernel:
    """K successive random NNIs with K ~ 2 + Geometric(p).

    P(K=2) = p, P(K=3) = p(1-p), ...  The chain of moves can wander far
    across topology space.  The kernel is treated as symmetric: the reverse
    move sequence has the same length distribution and step probabilities,
    and the jump acceptance uses this approximation.
    """

    p: float = 0.5
    kind: str = LONG

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise ConfigurationError(f"p must lie in (0, 1), got {self.p}")

    def draw_k(self, rng: np.random.Generator) -> int:
        return 1 + int(rng.geometric(self.p))

    def sample(self, x: TreeTopology, rng: np.random.Generator) -> TreeTopology:
        k = self.draw_k(rng)
        for _ in range(k):
            x = x.random_nni(rng)
        return x

    def log_ratio(self, x, y) -> float:
        return 0.0


@dataclass(frozen=True)
class InterningKernel:
    """Wrap a tree kernel so sampled topologies are pooled by identity.

    Long runs then hold one object per distinct visited topology instead of
    one per accepted move.
    """

    base: object
    target: PhyloTarget
    kind: str = field(init=False, default=LOCAL)

    def __post_init__(self):
        object.__setattr__(self, "kind", self.base.kind)

    def sample(self, x, rng: np.random.Generator):
        return self.target.intern(self.base.sample(x, rng))

    def log_ratio(self, x, y) -> float:
        return self.base.log_ratio(x, y)


# -- displacement diagnostics ---------------------------------------------


def displacement_sample(kernel, x0: np.ndarray, rng: np.random.Generator, n: int) -> np.ndarray:
    """Euclidean displacement lengths of n draws from one start point."""
    if n <= 0:
        raise ConfigurationError("n must be positive")
    out = np.empty(n)
    for i in range(n):
        y = kernel.sample(x0, rng)
        diff = y - x0
        out[i] = math.sqrt(float(diff @ diff))
    return out
