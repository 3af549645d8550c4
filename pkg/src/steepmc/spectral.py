"""Exact finite-chain diagnostics: conductance, spectral gaps, decompositions.

Small finite chains are where the mixing theory can be checked without
Monte Carlo error: transition matrices are assembled in closed form,
conductance is minimized by explicit subset enumeration, and gaps come from
dense symmetric eigensolves.  The checks mirror the design inequalities the
samplers rely on:

* Cheeger sandwich            h^2/2 <= Gap <= 2h
* mode decomposition          Gap(P) >= Gap(P_c)/2 * min_i Gap(P restricted to A_i)
* kernel mixture              Gap((1-s)P1 + sP2) >= max(((1-s)h1)^2, (s h2)^2)/2
* uniform minorization        Gap(P) >= n * min_ij P_ij
* tempered peak flattening    peak(pi_t)/peak(pi) >= t^-d, with equality for
                              exponential tails
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import product as _cartesian
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.linalg import eigvalsh

from .errors import ConfigurationError, NumericalError

_ATOL = 1e-12


@dataclass(frozen=True)
class FiniteChain:
    """Row-stochastic matrix with its stationary distribution.

    Invariants (checked to 1e-12 at construction): rows sum to one, entries
    nonnegative, pi positive and normalized, pi P = pi, and detailed balance
    when the reversible flag is set.
    """

    P: np.ndarray
    pi: np.ndarray
    reversible: bool = True

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        pi = np.asarray(self.pi, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or pi.shape != (P.shape[0],):
            raise ConfigurationError(f"bad shapes: P {P.shape}, pi {pi.shape}")
        if P.min() < -_ATOL:
            raise NumericalError(f"negative transition entry {P.min():.3e}")
        P = np.clip(P, 0.0, None)
        rows = P.sum(axis=1)
        if np.abs(rows - 1.0).max() > 1e-10:
            raise NumericalError(f"rows deviate from stochastic by {np.abs(rows - 1.0).max():.3e}")
        if pi.min() <= 0.0:
            raise NumericalError("stationary vector must be strictly positive")
        if abs(pi.sum() - 1.0) > 1e-9:
            raise NumericalError(f"stationary vector sums to {pi.sum()!r}")
        pi = pi / pi.sum()
        flow = pi[:, None] * P
        if np.abs(pi @ P - pi).max() > 1e-10:
            raise NumericalError("pi is not stationary for P")
        if self.reversible and np.abs(flow - flow.T).max() > _ATOL:
            raise NumericalError(
                f"detailed balance violated by {np.abs(flow - flow.T).max():.3e}"
            )
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "pi", pi)

    def __len__(self) -> int:
        return self.P.shape[0]


# -- grids and discretization ----------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Regular grid over a box; states are cell centers, C-order flattened."""

    bounds: tuple[tuple[float, float], ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        counts = tuple(int(c) for c in self.counts)
        if len(bounds) != len(counts) or not bounds:
            raise ConfigurationError("bounds and counts must align and be nonempty")
        for lo, hi in bounds:
            if not lo < hi:
                raise ConfigurationError(f"empty axis [{lo}, {hi}]")
        if any(c < 1 for c in counts):
            raise ConfigurationError("each axis needs at least one cell")
        total = math.prod(counts)
        if total > 20_000:
            raise ConfigurationError(f"{total} cells exceeds the 20000-cell cap")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "counts", counts)

    @property
    def d(self) -> int:
        return len(self.counts)

    def centers(self) -> np.ndarray:
        axes = [
            lo + (np.arange(c) + 0.5) * (hi - lo) / c
            for (lo, hi), c in zip(self.bounds, self.counts)
        ]
        pts = np.array(list(_cartesian(*axes)))
        return pts.reshape(math.prod(self.counts), self.d)


@dataclass(frozen=True)
class DiscretizedTarget:
    """Normalized cell masses of pi^(1/t); zero-mass cells are dropped."""

    pi: np.ndarray
    centers: np.ndarray
    indices: np.ndarray   # surviving cell indices within the original grid

    def __len__(self) -> int:
        return self.pi.size


def discretize_target(target, grid: GridSpec, temperature: float = 1.0) -> DiscretizedTarget:
    if not (temperature > 0.0):
        raise ConfigurationError(f"temperature must be positive, got {temperature}")
    centers = grid.centers()
    logs = np.array([target.log_density(c) for c in centers]) / temperature
    keep = np.isfinite(logs)
    if not keep.any():
        raise NumericalError("target has zero mass on every grid cell")
    logs = logs[keep]
    top = logs.max()
    w = np.exp(logs - top)
    return DiscretizedTarget(w / w.sum(), centers[keep], np.nonzero(keep)[0])


def grid_local_proposal(centers: np.ndarray, radius: float) -> np.ndarray:
    """Uniform proposal over cells within ``radius``, self excluded."""
    if radius <= 0:
        raise ConfigurationError("radius must be positive")
    diff = centers[:, None, :] - centers[None, :, :]
    close = (diff * diff).sum(axis=2) <= radius * radius
    np.fill_diagonal(close, False)
    counts = close.sum(axis=1)
    if counts.min() == 0:
        raise ConfigurationError("a cell has no neighbors within the local radius")
    return close / counts[:, None]


def grid_uniform_proposal(n: int) -> np.ndarray:
    if n < 1:
        raise ConfigurationError("n must be >= 1")
    return np.full((n, n), 1.0 / n)


def grid_cauchy_proposal(centers: np.ndarray, scale: float) -> np.ndarray:
    """Row-normalized product-Cauchy weights between cell centers."""
    if scale <= 0:
        raise ConfigurationError("scale must be positive")
    diff = (centers[:, None, :] - centers[None, :, :]) / scale
    w = 1.0 / (1.0 + diff * diff).prod(axis=2)
    return w / w.sum(axis=1, keepdims=True)


# -- transition-matrix assembly --------------------------------------------


def _check_proposal(pi: np.ndarray, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pi = np.asarray(pi, dtype=float)
    Q = np.asarray(Q, dtype=float)
    n = pi.size
    if Q.shape != (n, n):
        raise ConfigurationError(f"proposal shape {Q.shape} does not match {n} states")
    if Q.min() < 0 or np.abs(Q.sum(axis=1) - 1.0).max() > 1e-10:
        raise ConfigurationError("proposal matrix must be row-stochastic")
    if pi.min() <= 0:
        raise ConfigurationError("pi must be strictly positive")
    return pi / pi.sum(), Q


def assemble_mh_matrix(pi: np.ndarray, Q: np.ndarray) -> FiniteChain:
    """Metropolis-Hastings chain for target pi and proposal Q.

    Off-diagonal flow is min(pi_i Q_ij, pi_j Q_ji), which makes detailed
    balance exact in floating point; rejected mass goes to the diagonal.
    """
    pi, Q = _check_proposal(pi, Q)
    W = pi[:, None] * Q
    flow = np.minimum(W, W.T)
    P = flow / pi[:, None]
    np.fill_diagonal(P, 0.0)
    np.fill_diagonal(P, np.clip(1.0 - P.sum(axis=1), 0.0, None))
    return FiniteChain(P, pi, reversible=True)


def assemble_small_world_matrix(pi: np.ndarray, Q_local: np.ndarray,
                                Q_long: np.ndarray, s: float) -> FiniteChain:
    """(1-s) * MH(pi, Q_local) + s * MH(pi, Q_long)."""
    if not (0.0 < s < 1.0):
        raise ConfigurationError(f"s must lie in (0, 1), got {s}")
    local = assemble_mh_matrix(pi, Q_local)
    longr = assemble_mh_matrix(pi, Q_long)
    P = (1.0 - s) * local.P + s * longr.P
    return FiniteChain(P, local.pi, reversible=True)


def assemble_idealized_sampling_matrix(pi_cold: np.ndarray, pi_hot: np.ndarray,
                                       Q_local: np.ndarray, s: float) -> FiniteChain:
    """Sampling chain with its jump source replaced by the exact hot law.

    The long-range branch proposes j ~ pi_hot independently of i and accepts
    with min(1, pi_cold(j) pi_hot(i) / (pi_cold(i) pi_hot(j))): the
    large-sample limit of proposing from the hotter chain's empirical
    measure.  Reversible with respect to pi_cold.
    """
    if not (0.0 < s < 1.0):
        raise ConfigurationError(f"s must lie in (0, 1), got {s}")
    pi_cold, Q_local = _check_proposal(pi_cold, Q_local)
    pi_hot = np.asarray(pi_hot, dtype=float)
    if pi_hot.shape != pi_cold.shape or pi_hot.min() <= 0:
        raise ConfigurationError("pi_hot must be positive and match pi_cold in length")
    pi_hot = pi_hot / pi_hot.sum()
    W = pi_cold[:, None] * pi_hot[None, :]
    flow = np.minimum(W, W.T)          # pi_cold_i * K_ij for the jump branch
    K = flow / pi_cold[:, None]
    np.fill_diagonal(K, 0.0)
    np.fill_diagonal(K, np.clip(1.0 - K.sum(axis=1), 0.0, None))
    local = assemble_mh_matrix(pi_cold, Q_local)
    P = (1.0 - s) * local.P + s * K
    return FiniteChain(P, pi_cold, reversible=True)


# -- conductance and gap ---------------------------------------------------


def conductance(fc: FiniteChain, cuts: Sequence[Sequence[int]] | None = None,
                max_exact: int = 22) -> float:
    """Bottleneck ratio h = inf over 0 < pi(S) <= 1/2 of flow(S, S^c)/pi(S).

    Exact mode enumerates every subset and needs n <= ``max_exact``; for
    larger chains pass ``cuts`` (index sets) to get the minimum over that
    family, which is only an upper bound on h.
    """
    n = len(fc)
    F = fc.pi[:, None] * fc.P
    if cuts is not None:
        best = math.inf
        for cut in cuts:
            mask = np.zeros(n, dtype=bool)
            mask[np.asarray(cut, dtype=int)] = True
            if not mask.any() or mask.all():
                raise ConfigurationError("cuts must be proper nonempty subsets")
            if fc.pi[mask].sum() > 0.5:
                mask = ~mask
            flow = F[np.ix_(mask, ~mask)].sum()
            best = min(best, flow / fc.pi[mask].sum())
        return float(best)
    if n > max_exact:
        raise ConfigurationError(
            f"exact conductance enumerates 2^{n} subsets; n <= {max_exact} "
            f"required, or supply a cut family"
        )
    if n < 2:
        raise ConfigurationError("conductance needs at least two states")
    best = math.inf
    total = 1 << n
    shifts = np.arange(n, dtype=np.uint32)
    chunk = 1 << 16
    for start in range(1, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.uint32)
        bits = ((masks[:, None] >> shifts) & 1).astype(float)
        pis = bits @ fc.pi
        valid = (pis > 0.0) & (pis <= 0.5 + _ATOL)
        if not valid.any():
            continue
        b = bits[valid]
        inner = np.einsum("mi,ij,mj->m", b, F, b)
        flow = np.clip(b @ fc.pi - inner, 0.0, None)
        ratios = flow / pis[valid]
        best = min(best, float(ratios.min()))
    return best


def spectral_gap(fc: FiniteChain) -> float:
    """1 - max |eigenvalue| over the non-unit spectrum (reversible chains).

    Works on the symmetrized D^(1/2) P D^(-1/2) with the sqrt(pi) direction
    deflated away; negative eigenvalues count, so a periodic chain reports
    gap 0.
    """
    if not fc.reversible:
        raise NumericalError("spectral gap requires a reversible chain")
    sq = np.sqrt(fc.pi)
    A = fc.P * (sq[:, None] / sq[None, :])
    A = 0.5 * (A + A.T)
    A -= np.outer(sq, sq)
    if len(fc) == 1:
        return 1.0
    ev = eigvalsh(A)
    return float(1.0 - np.abs(ev).max())


def component_chain(fc: FiniteChain, labels: Sequence[int]) -> FiniteChain:
    """Collapse a partition to the lazy block-hopping chain.

    Off-diagonal entries are the pi-weighted average flow from block i into
    block j divided by 2 pi(A_i); the half keeps the chain lazy enough to be
    a valid lower-bound ingredient for the decomposition inequality.
    """
    labels = np.asarray(labels, dtype=int)
    if labels.shape != (len(fc),):
        raise ConfigurationError("labels must assign one block per state")
    m = labels.max() + 1
    if labels.min() < 0:
        raise ConfigurationError("labels must be 0-based block ids")
    onehot = np.zeros((len(fc), m))
    onehot[np.arange(len(fc)), labels] = 1.0
    if (onehot.sum(axis=0) == 0).any():
        raise ConfigurationError("every block must be nonempty")
    F = fc.pi[:, None] * fc.P
    G = onehot.T @ F @ onehot
    pi_blk = onehot.T @ fc.pi
    Pc = G / (2.0 * pi_blk[:, None])
    np.fill_diagonal(Pc, 0.0)
    np.fill_diagonal(Pc, 1.0 - Pc.sum(axis=1))
    return FiniteChain(Pc, pi_blk, reversible=fc.reversible)


def restricted_chain(fc: FiniteChain, block: Sequence[int]) -> FiniteChain:
    """Chain confined to ``block``: escaping mass is returned to the diagonal."""
    idx = np.asarray(block, dtype=int)
    if idx.size == 0:
        raise ConfigurationError("block must be nonempty")
    sub = fc.P[np.ix_(idx, idx)].copy()
    escape = 1.0 - sub.sum(axis=1)
    sub[np.diag_indices_from(sub)] += np.clip(escape, 0.0, None)
    pi = fc.pi[idx]
    return FiniteChain(sub, pi / pi.sum(), reversible=fc.reversible)


# -- inequality records ----------------------------------------------------


@dataclass(frozen=True)
class CheegerRecord:
    conductance: float
    gap: float
    lower: float
    upper: float
    holds: bool


def cheeger_check(fc: FiniteChain, slack: float = 1e-9) -> CheegerRecord:
    """h^2/2 <= Gap <= 2h with the given additive slack."""
    h = conductance(fc)
    gap = spectral_gap(fc)
    lower = 0.5 * h * h
    upper = 2.0 * h
    holds = (gap >= lower - slack) and (gap <= upper + slack)
    return CheegerRecord(h, gap, lower, upper, holds)


@dataclass(frozen=True)
class DecompositionRecord:
    gap: float
    gap_component: float
    min_gap_restricted: float
    bound: float
    holds: bool


def decomposition_check(fc: FiniteChain, labels: Sequence[int],
                        slack: float = 1e-9) -> DecompositionRecord:
    """Gap(P) >= Gap(P_c)/2 * min_i Gap(P_{A_i})."""
    labels = np.asarray(labels, dtype=int)
    gap = spectral_gap(fc)
    comp = spectral_gap(component_chain(fc, labels))
    blocks = [np.nonzero(labels == b)[0] for b in range(labels.max() + 1)]
    restr = min(spectral_gap(restricted_chain(fc, b)) for b in blocks)
    bound = 0.5 * comp * restr
    return DecompositionRecord(gap, comp, restr, bound, gap >= bound - slack)


@dataclass(frozen=True)
class MixtureBoundRecord:
    gap: float
    h_local: float
    h_long: float
    bound: float
    holds: bool


def mixture_bound_check(pi: np.ndarray, Q_local: np.ndarray, Q_long: np.ndarray,
                        s: float, slack: float = 1e-9) -> MixtureBoundRecord:
    """Gap of the mixture against conductances of each pure MH kernel."""
    mix = assemble_small_world_matrix(pi, Q_local, Q_long, s)
    h1 = conductance(assemble_mh_matrix(pi, Q_local))
    h2 = conductance(assemble_mh_matrix(pi, Q_long))
    gap = spectral_gap(mix)
    bound = 0.5 * max(((1.0 - s) * h1) ** 2, (s * h2) ** 2)
    return MixtureBoundRecord(gap, h1, h2, bound, gap >= bound - slack)


def uniform_minorization_bounds(fc: FiniteChain) -> tuple[float, float]:
    """(n * min over all entries, n * min over off-diagonal entries).

    The first is a classical lower bound on the gap.  The second is reported
    for comparison only: it can exceed the gap (e.g. the two-state flip
    chain), so nothing asserts it.
    """
    n = len(fc)
    off = fc.P[~np.eye(n, dtype=bool)]
    return float(n * fc.P.min()), float(n * off.min())


# -- tempered peak ratios --------------------------------------------------


def _integrate(fn: Callable[[float], float], lo: float, hi: float) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            # default stopping tolerances are looser than the 1e-8 relative
            # budget enforced below, so ask for more than we require
            val, err = quad(fn, lo, hi, limit=200, epsabs=1e-12, epsrel=1e-12)
        except IntegrationWarning as exc:
            raise NumericalError(f"quadrature failed on [{lo}, {hi}]: {exc}") from exc
    if not math.isfinite(val) or val <= 0.0:
        raise NumericalError(f"integral on [{lo}, {hi}] came out {val!r}")
    if err > 1e-8 * max(val, 1.0):
        raise NumericalError(
            f"quadrature error {err:.3e} too large for integral {val:.6e} on [{lo}, {hi}]"
        )
    return val


def tempered_peak_ratio(target, t: float, support: tuple[float, float],
                        peak: float = 0.0) -> float:
    """peak density of normalized pi^(1/t) over peak density of normalized pi.

    One-dimensional; ``support`` brackets the mass (may be infinite).
    Tempering flattens: the ratio is at least t^-1 for targets with
    exponential-type tails, with equality for Exp(1).
    """
    if t < 1.0:
        raise ConfigurationError(f"t must be >= 1, got {t}")
    logf = lambda x: target.log_density(np.array([x]))

    def f(x: float) -> float:
        v = logf(x)
        return math.exp(v) if v > -math.inf else 0.0

    def ft(x: float) -> float:
        v = logf(x)
        return math.exp(v / t) if v > -math.inf else 0.0

    z1 = _integrate(f, *support)
    zt = _integrate(ft, *support)
    lp = logf(peak)
    if lp == -math.inf:
        raise ConfigurationError("peak location has zero density")
    return math.exp(lp * (1.0 / t - 1.0)) * z1 / zt


@dataclass(frozen=True)
class PeakRatioRecord:
    t: float
    ratio: float
    floor: float
    holds: bool


def peak_ratio_check(target, t: float, support: tuple[float, float],
                     peak: float = 0.0, d: int = 1,
                     rel_slack: float = 1e-9) -> PeakRatioRecord:
    ratio = tempered_peak_ratio(target, t, support, peak)
    floor = t ** (-d)
    return PeakRatioRecord(t, ratio, floor, ratio >= floor * (1.0 - rel_slack))


@dataclass(frozen=True)
class NormalizationRecord:
    min_ratio: float
    max_ratio: float
    holds: bool


def piecewise_normalization_check(
    pieces: Sequence[tuple[float, object, tuple[float, float]]],
    t_values: Sequence[float] = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0),
    band: tuple[float, float] = (1e-3, 1e3),
) -> NormalizationRecord:
    """Per-piece vs pooled normalization of a tempered mixture.

    Each piece is (weight, target, support).  For every t the ratio of the
    piece's own normalizer to the pooled average must stay inside ``band``:
    normalizing pieces separately or together changes nothing but bounded
    constants.
    """
    if len(pieces) < 2:
        raise ConfigurationError("need at least two pieces")
    lo = math.inf
    hi = -math.inf
    m = len(pieces)
    for t in t_values:
        if t < 1.0:
            raise ConfigurationError("t values must be >= 1")
        norms = []
        for w, target, support in pieces:
            if w <= 0:
                raise ConfigurationError("piece weights must be positive")
            logf = lambda x: target.log_density(np.array([x]))
            ft = lambda x: math.exp((math.log(w) + logf(x)) / t) if logf(x) > -math.inf else 0.0
            norms.append(_integrate(ft, *support))
        pooled = sum(norms) / m
        for v in norms:
            r = v / pooled
            lo = min(lo, r)
            hi = max(hi, r)
    return NormalizationRecord(lo, hi, band[0] <= lo and hi <= band[1])


def ball_conductance_bound(alpha: float, delta: float, d: int, m_pi: float) -> float:
    """Worst-case conductance floor for a delta-ball kernel on a log-concave
    target: delta * exp(-alpha * delta) / (1024 * sqrt(d) * m_pi).

    alpha is the log-density Lipschitz constant, m_pi the mean distance from
    the barycenter.  Deliberately conservative; used as a sanity floor.
    """
    for name, v in (("alpha", alpha), ("delta", delta), ("m_pi", m_pi)):
        if not (v > 0) or not math.isfinite(v):
            raise ConfigurationError(f"{name} must be positive and finite, got {v}")
    if d < 1:
        raise ConfigurationError(f"d must be >= 1, got {d}")
    return delta * math.exp(-alpha * delta) / (1024.0 * math.sqrt(d) * m_pi)


# -- temperature scaling experiment ----------------------------------------


@dataclass(frozen=True)
class ScalingRow:
    t: float
    gap_exploring: float
    gap_sampling: float
    h_exploring: float
    h_sampling: float
    saturated_exploring: bool
    saturated_sampling: bool


@dataclass(frozen=True)
class ScalingReport:
    rows: tuple[ScalingRow, ...]
    slope_exploring: float
    slope_sampling: float
    sampling_monotone: bool
    exploring_ceiling: float
    sampling_ceiling: float


def log_log_slope(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.log(np.asarray(x, dtype=float))
    y = np.log(np.asarray(y, dtype=float))
    if x.size < 2:
        raise NumericalError("slope fit needs at least two unsaturated points")
    return float(np.polyfit(x, y, 1)[0])


def two_mode_grid_instance(separation: float = 10.0, scale: float = 0.05,
                           n_cells: int = 721, margin: float = 4.0):
    """Standard 1-d two-needle instance: Laplace pair, grid, mode labels.

    Defaults keep the tempered needle width (scale * t) well below the
    separation for t <= 16, so the scan stays out of the merged regime,
    and the margin at five times the widest needle, so truncation is
    negligible.  Cell width is half the needle scale.
    """
    from .targets import laplace_mixture_1d

    target = laplace_mixture_1d([0.0, separation], scale)
    grid = GridSpec(((-margin, separation + margin),), (n_cells,))
    centers = grid.centers()
    labels = (centers[:, 0] > separation / 2.0).astype(int)
    return target, grid, labels


def temperature_scaling_experiment(
    target, grid: GridSpec, labels: Sequence[int],
    temperatures: Sequence[float] = (1.0, 2.0, 4.0, 8.0, 16.0),
    s: float = 1.0 / 3.0,
    local_radius: float = 0.3,
    saturation_tol: float = 1e-3,
) -> ScalingReport:
    """How the two block-level gaps move with the exploring temperature.

    For each t the exploring chain is the small-world matrix on pi^(1/t)
    (uniform long-range branch) and the sampling chain is the idealized jump
    matrix from pi^(1/t) down to pi; both are collapsed onto the mode
    partition.  Expected trends on a two-needle 1-d target: the exploring
    block gap grows about linearly in t, the sampling block gap falls
    between t^-1 and t^-2 and never increases.

    Each chain has a structural ceiling: the exploring chain cannot beat
    the flat-target (t -> infinity) limit, and the sampling chain cannot
    beat exact resampling, which is what its jump branch becomes at t = 1.
    Rows with a gap within ``saturation_tol`` of the ceiling are flagged
    and left out of that slope fit; in particular the t = 1 sampling row
    sits exactly at its ceiling and never enters the decay fit.
    """
    temps = [float(t) for t in temperatures]
    if len(temps) < 2 or any(t < 1.0 for t in temps):
        raise ConfigurationError("need >= 2 temperatures, all >= 1")
    labels = np.asarray(labels, dtype=int)
    base = discretize_target(target, grid, 1.0)
    if len(base) != labels.size:
        raise ConfigurationError(
            "labels must cover the discretized support exactly; "
            f"{labels.size} labels for {len(base)} cells"
        )
    q_local = grid_local_proposal(base.centers, local_radius)
    q_long = grid_uniform_proposal(len(base))

    flat = np.full(len(base), 1.0 / len(base))
    ceiling_e = spectral_gap(component_chain(
        assemble_small_world_matrix(flat, q_local, q_long, s), labels))
    ceiling_s = spectral_gap(component_chain(
        assemble_idealized_sampling_matrix(base.pi, base.pi, q_local, s), labels))

    rows = []
    for t in temps:
        hot = discretize_target(target, grid, t)
        if len(hot) != len(base) or not np.array_equal(hot.indices, base.indices):
            raise NumericalError("discretized support changed with temperature")
        ec = component_chain(
            assemble_small_world_matrix(hot.pi, q_local, q_long, s), labels)
        sc = component_chain(
            assemble_idealized_sampling_matrix(base.pi, hot.pi, q_local, s), labels)
        gap_e = spectral_gap(ec)
        gap_s = spectral_gap(sc)
        rows.append(ScalingRow(
            t=t,
            gap_exploring=gap_e,
            gap_sampling=gap_s,
            h_exploring=conductance(ec),
            h_sampling=conductance(sc),
            saturated_exploring=gap_e >= ceiling_e - saturation_tol,
            saturated_sampling=gap_s >= ceiling_s - saturation_tol,
        ))

    fit_e = [(r.t, r.gap_exploring) for r in rows if not r.saturated_exploring]
    fit_s = [(r.t, r.gap_sampling) for r in rows if not r.saturated_sampling]
    slope_e = log_log_slope([p[0] for p in fit_e], [p[1] for p in fit_e])
    slope_s = log_log_slope([p[0] for p in fit_s], [p[1] for p in fit_s])
    monotone = all(
        rows[i + 1].gap_sampling <= rows[i].gap_sampling + 1e-12
        for i in range(len(rows) - 1)
    )
    return ScalingReport(tuple(rows), slope_e, slope_s, monotone,
                         ceiling_e, ceiling_s)


def random_reversible_chain(rng: np.random.Generator, n: int) -> FiniteChain:
    """Random MH chain: Dirichlet target, random row-stochastic proposal."""
    if n < 2:
        raise ConfigurationError("n must be >= 2")
    pi = rng.dirichlet(np.ones(n)) + 1e-6
    pi = pi / pi.sum()
    Q = rng.random((n, n)) + 1e-3
    Q = Q / Q.sum(axis=1, keepdims=True)
    return assemble_mh_matrix(pi, Q)
