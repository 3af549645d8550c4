"""Target densities.

All density arithmetic is done on unnormalized log densities; a state of
zero mass has log density -inf and is handled explicitly by the acceptance
rules (never accepted as a proposal, always left when current).

A target is any object with a ``log_density(x)`` method/callable and a
``space`` descriptor, one of::

    ("continuous", d)   x is a length-d float array
    ("discrete", n)     x is an integer cell index in [0, n)
    ("tree", n_taxa)    x is a phylo.TreeTopology

``TargetDensity`` wraps a bare callable; richer targets (Gaussian mixtures,
lattice targets, phylogenetic likelihoods) are their own classes with the
same two attributes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import ConfigurationError, DimensionMismatchError

Space = tuple[str, int]


@dataclass(frozen=True)
class TargetDensity:
    """Unnormalized log density over a declared state space."""

    log_density: Callable[[Any], float]
    space: Space

    def __post_init__(self):
        kind, size = self.space
        if kind not in ("continuous", "discrete", "tree"):
            raise ConfigurationError(f"unknown space kind {kind!r}")
        if size <= 0:
            raise ConfigurationError(f"space size must be positive, got {size}")


def log_density_at(target, x) -> float:
    """Evaluate ``target.log_density(x)`` with state validation.

    Raises DimensionMismatchError when a continuous state has the wrong
    length.  The samplers call ``target.log_density`` directly on states they
    constructed themselves; this checked entry point is for user-facing code.
    """
    kind, size = target.space
    if kind == "continuous":
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.shape[0] != size:
            actual = x.shape[0] if x.ndim == 1 else x.ndim
            raise DimensionMismatchError(size, actual)
    elif kind == "discrete":
        x = int(x)
    return float(target.log_density(x))


@dataclass(frozen=True)
class TemperedDensity:
    """pi^(1/t): divides the base log density by the temperature."""

    base: Any
    temperature: float

    def __post_init__(self):
        if not (self.temperature > 0.0) or not math.isfinite(self.temperature):
            raise ConfigurationError(
                f"temperature must be positive and finite, got {self.temperature}"
            )

    @property
    def space(self) -> Space:
        return self.base.space

    def log_density(self, x) -> float:
        return self.base.log_density(x) / self.temperature


class MixtureTarget:
    """Mixture of independent-coordinate Gaussians.

    Parameters
    ----------
    weights : sequence of float
        Positive mixture weights, normalized internally.
    means : array (m, d)
    variances : array (m, d)
        Per-coordinate variances of each component.
    partition : optional sequence of predicates
        Region hints A_i used by mode-decomposition diagnostics.
    """

    def __init__(self, weights, means, variances, partition=None):
        w = np.asarray(weights, dtype=float)
        mu = np.atleast_2d(np.asarray(means, dtype=float))
        var = np.atleast_2d(np.asarray(variances, dtype=float))
        if w.ndim != 1 or w.shape[0] != mu.shape[0] or mu.shape != var.shape:
            raise ConfigurationError("weights/means/variances shapes are inconsistent")
        if np.any(w <= 0) or np.any(var <= 0):
            raise ConfigurationError("weights and variances must be positive")
        w = w / w.sum()
        self.weights = w
        self.means = mu
        self.variances = var
        self.partition = tuple(partition) if partition is not None else None
        m, d = mu.shape
        self.space: Space = ("continuous", d)
        self._inv_var = 1.0 / var
        # log w_i + log of the component normalizing constant
        self._const = np.log(w) - 0.5 * (d * math.log(2.0 * math.pi) + np.log(var).sum(axis=1))
        self._two_components = m == 2

    def component_log_densities(self, x) -> np.ndarray:
        diff = x - self.means
        return self._const - 0.5 * np.einsum("md,md->m", diff * self._inv_var, diff)

    def log_density(self, x) -> float:
        q = self.component_log_densities(x)
        if self._two_components:
            a = q[0]
            b = q[1]
            if a < b:
                a, b = b, a
            gap = b - a
            if gap < -745.0:
                return float(a)
            return float(a) + math.log1p(math.exp(gap))
        top = q.max()
        return float(top + np.log(np.exp(q - top).sum()))


def needles_mixture(separation: Sequence[float] = (5.0, 5.0), variance: float = 0.01) -> MixtureTarget:
    """Two narrow equal-weight 2-d Gaussian needles, one at the origin.

    The hard two-mode benchmark: local kernels are trapped in a single
    needle, so crossing requires a genuinely long-range move.
    """
    mu2 = np.asarray(separation, dtype=float)
    means = np.array([[0.0, 0.0], mu2])
    variances = np.full((2, 2), float(variance))
    midpoint = 0.5 * mu2

    def near_origin(x, _mid=midpoint, _mu2=mu2):
        return float(np.dot(x, x)) <= float(np.dot(x - _mu2, x - _mu2))

    def near_far(x, _mid=midpoint, _mu2=mu2):
        return float(np.dot(x, x)) > float(np.dot(x - _mu2, x - _mu2))

    return MixtureTarget([0.5, 0.5], means, variances, partition=(near_origin, near_far))


def gaussian_ball_mass(mix: MixtureTarget, center, radius: float) -> float:
    """Exact mixture mass of a euclidean ball, for isotropic components."""
    from scipy.stats import chi2, ncx2

    center = np.asarray(center, dtype=float)
    d = mix.space[1]
    total = 0.0
    for w, mu, var in zip(mix.weights, mix.means, mix.variances):
        if not np.allclose(var, var[0]):
            raise ConfigurationError("ball mass requires isotropic components")
        s2 = float(var[0])
        nc = float(np.dot(mu - center, mu - center)) / s2
        q = radius * radius / s2
        mass = chi2.cdf(q, d) if nc < 1e-12 else ncx2.cdf(q, d, nc)
        total += float(w) * float(mass)
    return total


@dataclass(frozen=True)
class LatticeTarget:
    """Finite target over cells 0..n-1; out-of-range states have zero mass."""

    log_weights: np.ndarray
    space: Space = field(init=False)

    def __post_init__(self):
        lw = np.asarray(self.log_weights, dtype=float)
        if lw.ndim != 1 or lw.size == 0:
            raise ConfigurationError("log_weights must be a nonempty vector")
        if np.any(np.isnan(lw)) or np.any(lw == np.inf):
            raise ConfigurationError("log_weights must be finite or -inf")
        object.__setattr__(self, "log_weights", lw)
        object.__setattr__(self, "space", ("discrete", lw.size))

    def log_density(self, i) -> float:
        if 0 <= i < self.log_weights.size:
            return float(self.log_weights[i])
        return -math.inf

    def probabilities(self) -> np.ndarray:
        """Exact normalized stationary vector."""
        top = self.log_weights.max()
        w = np.exp(self.log_weights - top)
        return w / w.sum()


def laplace_mixture_1d(means: Sequence[float], scale: float, weights: Sequence[float] | None = None) -> TargetDensity:
    """1-d mixture of Laplace (double exponential) needles.

    Tails are alpha-smooth (|grad log f| bounded), the regime where tempering
    widens a peak by exactly t^(-1) per dimension.
    """
    mu = np.asarray(means, dtype=float)
    if weights is None:
        w = np.full(mu.size, 1.0 / mu.size)
    else:
        w = np.asarray(weights, dtype=float)
        w = w / w.sum()
    if scale <= 0:
        raise ConfigurationError("scale must be positive")
    const = np.log(w) - math.log(2.0 * scale)

    def logf(x, _mu=mu, _c=const, _b=scale):
        q = _c - np.abs(float(x[0]) - _mu) / _b
        top = q.max()
        return float(top + np.log(np.exp(q - top).sum()))

    return TargetDensity(logf, ("continuous", 1))


def exponential_target(rate: float = 1.0) -> TargetDensity:
    """Exp(rate) on [0, inf), normalized; zero mass on negatives."""
    if rate <= 0:
        raise ConfigurationError("rate must be positive")
    lograte = math.log(rate)

    def logf(x):
        v = float(x[0])
        if v < 0.0:
            return -math.inf
        return lograte - rate * v

    return TargetDensity(logf, ("continuous", 1))


def shifted_ridge_target(optimum: Sequence[float] = (1.5, -0.5), curvature: float = 2.0) -> TargetDensity:
    """Unimodal 2-d target with a curved narrow ridge, maximum at ``optimum``.

    A banana-shaped valley: easy to enter, slow to traverse with local moves,
    used to exercise the optimizer on a non-axis-aligned geometry.
    """
    c0, c1 = float(optimum[0]), float(optimum[1])

    def logf(x):
        u = float(x[0]) - c0
        v = float(x[1]) - c1
        return -(u * u / 20.0 + curvature * (v - u * u) ** 2)

    return TargetDensity(logf, ("continuous", 2))
