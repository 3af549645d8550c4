"""Empirical measure built from chain output.

A hotter chain pushes its visited states here; a colder chain draws from the
measure as an independence proposal.  The measure is append-only: repeated
states accumulate multiplicity, and draws are uniform over everything stored,
so the measure converges to the hotter chain's occupation distribution.

Pushes are filtered by the measure's own burn-in and thinning: push number k
(counting from 1 over the chain's whole run) is stored only when
k > burn_in and k % thin == 0.
"""

from __future__ import annotations

import math
import struct
from typing import Any, Callable

import numpy as np

from .errors import ConfigurationError

_MAGIC = b"XIEM"
_VERSION = 1


class EmpiricalMeasure:
    """Uniform empirical distribution over pushed states."""

    def __init__(self, burn_in: int = 0, thin: int = 1):
        if burn_in < 0:
            raise ConfigurationError(f"burn_in must be >= 0, got {burn_in}")
        if thin < 1:
            raise ConfigurationError(f"thin must be >= 1, got {thin}")
        self.burn_in = int(burn_in)
        self.thin = int(thin)
        self.pushes = 0
        self._states: list[Any] = []
        self._log_density: list[float] = []

    def __len__(self) -> int:
        return len(self._states)

    @property
    def states(self) -> list:
        return self._states

    def push(self, x, log_density: float = math.nan) -> "EmpiricalMeasure":
        """Offer a state; stored only if it passes burn-in/thinning."""
        self.pushes += 1
        if self.pushes > self.burn_in and self.pushes % self.thin == 0:
            self._states.append(x)
            self._log_density.append(float(log_density))
        return self

    def draw(self, rng: np.random.Generator):
        """Uniform draw over stored states."""
        n = len(self._states)
        if n == 0:
            raise ValueError("draw from empty empirical measure")
        return self._states[int(rng.integers(n))]

    def draw_indexed(self, rng: np.random.Generator) -> tuple[Any, float]:
        """Uniform draw returning (state, cached log density)."""
        n = len(self._states)
        if n == 0:
            raise ValueError("draw from empty empirical measure")
        i = int(rng.integers(n))
        return self._states[i], self._log_density[i]


def drift_bound(m: EmpiricalMeasure, x_new, v: Callable[[Any], float]) -> float:
    """V-norm bound on how much one more push can move the measure.

    Returns (V(x_new) + mean of V over the current states) / n with n the
    current count; an empty measure divides by 1.  Decays like 1/n, so a
    stabilized bound is the cheap witness that the proposal distribution has
    settled.
    """
    n = len(m)
    if n == 0:
        return float(v(x_new))
    mean_v = sum(v(s) for s in m.states) / n
    return (float(v(x_new)) + mean_v) / n


def measure_drift(m_prev: EmpiricalMeasure, m_next: EmpiricalMeasure, v: Callable[[Any], float]) -> float:
    """Drift bound across one push, given the before and after measures."""
    if len(m_next) != len(m_prev) + 1:
        raise ConfigurationError(
            f"m_next must hold exactly one more state than m_prev "
            f"({len(m_next)} vs {len(m_prev)})"
        )
    return drift_bound(m_prev, m_next.states[-1], v)


def drift_series(v_values: np.ndarray) -> np.ndarray:
    """Drift bounds for a whole push sequence, vectorized.

    ``v_values[k]`` is V of the k-th stored state; entry k of the result is
    the bound for the push that added it.  Matches drift_bound applied
    incrementally (cross-checked in the tests).
    """
    v = np.asarray(v_values, dtype=float)
    n = v.size
    out = np.empty(n)
    if n == 0:
        return out
    out[0] = v[0]
    if n > 1:
        counts = np.arange(1, n)
        prev_means = np.cumsum(v)[:-1] / counts
        out[1:] = (v[1:] + prev_means) / counts
    return out


def save_measure(m: EmpiricalMeasure, path) -> None:
    """Binary dump: magic, version, dimension, count, flat float64 coords."""
    if len(m) == 0:
        dim = 0
        flat = np.empty(0)
    else:
        first = np.atleast_1d(np.asarray(m.states[0], dtype=float))
        dim = first.size
        flat = np.asarray([np.atleast_1d(np.asarray(s, dtype=float)) for s in m.states], dtype=float)
        if flat.shape != (len(m), dim):
            raise ConfigurationError("states are not fixed-dimension coordinate vectors")
    header = struct.pack("<4sIIQ", _MAGIC, _VERSION, dim, len(m))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(flat.astype("<f8").tobytes())


def load_measure(path) -> EmpiricalMeasure:
    """Load a dumped measure; stored states come back as float vectors."""
    with open(path, "rb") as fh:
        raw = fh.read()
    head = struct.calcsize("<4sIIQ")
    if len(raw) < head:
        raise ConfigurationError(f"truncated measure file: {path}")
    magic, version, dim, count = struct.unpack_from("<4sIIQ", raw)
    if magic != _MAGIC:
        raise ConfigurationError(f"not a measure file (bad magic): {path}")
    if version != _VERSION:
        raise ConfigurationError(f"unsupported measure file version {version}")
    body = np.frombuffer(raw, dtype="<f8", offset=head)
    if body.size != count * dim:
        raise ConfigurationError(f"measure file length mismatch: {path}")
    m = EmpiricalMeasure()
    for row in body.reshape(count, dim):
        m.push(row.copy())
    return m
