"""Metropolis-Hastings, small-world mixtures, and the tempered ladder runs.

The ladder run couples H+1 chains at temperatures 1 = t_0 < ... < t_H.  The
hottest chain explores pi^(1/t_H) with a small-world kernel (local moves
mixed with a heavy-tailed long-range kernel) and pushes every kept state
into its empirical measure.  Each colder chain i proposes either a local
move or a draw from the measure of chain i+1, accepted with the tempered
jump rule; every chain feeds its own measure for the chain below.

Information flows strictly hot-to-cold: no chain ever reads a colder
chain's state.  Random streams are numbered from the hot end (exploring
chain = stream 0), so the hot chains' trajectories are bit-for-bit
unchanged if the cold chains are removed.

Within one iteration the sweep runs hot to cold, so a jump proposal is
drawn from the hotter measure as already updated this iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .empirical import EmpiricalMeasure
from .errors import ConfigurationError, DiagnosticError, NumericalError
from .rng import RngStream
from .targets import log_density_at

KIND_LOCAL = 0
KIND_LONG = 1
KIND_NAMES = ("local", "long")

_INF = math.inf


class AcceptCounts:
    """Accept/attempt counters split by move kind."""

    __slots__ = ("local_accepted", "local_attempted", "long_accepted", "long_attempted")

    def __init__(self):
        self.local_accepted = 0
        self.local_attempted = 0
        self.long_accepted = 0
        self.long_attempted = 0

    def update(self, is_long: bool, accepted: bool) -> None:
        if is_long:
            self.long_attempted += 1
            self.long_accepted += accepted
        else:
            self.local_attempted += 1
            self.local_accepted += accepted

    def local_rate(self) -> float:
        return self.local_accepted / self.local_attempted if self.local_attempted else 0.0

    def long_rate(self) -> float:
        return self.long_accepted / self.long_attempted if self.long_attempted else 0.0

    def as_dict(self) -> dict:
        return {
            "local_accepted": self.local_accepted,
            "local_attempted": self.local_attempted,
            "long_accepted": self.long_accepted,
            "long_attempted": self.long_attempted,
        }


@dataclass(slots=True)
class ChainState:
    """Current state plus its cached base (t = 1) log density."""

    current: Any
    log_base: float
    counts: AcceptCounts = field(default_factory=AcceptCounts)


def make_chain(target, init) -> ChainState:
    return ChainState(init, log_density_at(target, init))


def _accept(log_a: float, rng: np.random.Generator) -> bool:
    """Metropolis coin.  Always consumes one uniform to keep streams aligned."""
    u = rng.random()
    if log_a >= 0.0:
        return True
    if log_a == -_INF:
        return False
    return u < math.exp(log_a)


def mh_step(chain: ChainState, target, kernel, rng: np.random.Generator,
            temperature: float = 1.0) -> bool:
    """One Metropolis-Hastings update of ``chain`` on pi^(1/temperature).

    Zero-mass rules: a proposal with log density -inf is never accepted; a
    chain currently at -inf accepts any finite proposal.
    """
    y = kernel.sample(chain.current, rng)
    ly = target.log_density(y)
    if ly != ly:
        raise NumericalError("target log density returned NaN")
    if ly == -_INF:
        log_a = -_INF
    elif chain.log_base == -_INF:
        log_a = _INF
    else:
        log_a = (ly - chain.log_base) / temperature + kernel.log_ratio(chain.current, y)
    accepted = _accept(log_a, rng)
    chain.counts.update(kernel.kind == "long", accepted)
    if accepted:
        chain.current = y
        chain.log_base = ly
    return accepted


def small_world_step(chain: ChainState, target, local, long_range, s: float,
                     rng: np.random.Generator, temperature: float = 1.0) -> tuple[int, bool]:
    """Local move with probability 1-s, long-range move with probability s.

    Each branch is a full MH update with its own kernel; a mixture of
    reversible kernels stays reversible.  Returns (kind, accepted).

    At s = 0 the mixing coin is skipped entirely, so the chain consumes the
    same random numbers as plain local MH and their traces match exactly.
    """
    use_long = s > 0.0 and rng.random() < s
    kernel = long_range if use_long else local
    accepted = mh_step(chain, target, kernel, rng, temperature)
    return (KIND_LONG if use_long else KIND_LOCAL), accepted


def tempered_jump_log_accept(log_pi_x: float, log_pi_y: float,
                             t_i: float, t_j: float) -> float:
    """Log acceptance for adopting state y of the chain at t_j into the chain at t_i.

    Equals (1/t_i - 1/t_j) * (log pi(y) - log pi(x)) on base log densities;
    t_i < t_j.  A -inf proposal returns -inf (never accepted); a -inf
    current state returns +inf (any finite proposal accepted).
    """
    if log_pi_y == -_INF:
        return -_INF
    if log_pi_x == -_INF:
        return _INF
    return (1.0 / t_i - 1.0 / t_j) * (log_pi_y - log_pi_x)


# -- temperature ladders ---------------------------------------------------


@dataclass(frozen=True)
class TemperatureLadder:
    """Geometric ladder 1 = t_0 < t_1 < ... < t_H."""

    temperatures: tuple[float, ...]

    def __post_init__(self):
        t = tuple(float(v) for v in self.temperatures)
        object.__setattr__(self, "temperatures", t)
        if len(t) < 2:
            raise ConfigurationError("ladder needs at least two temperatures")
        if t[0] != 1.0:
            raise ConfigurationError(f"ladder must start at t = 1, got {t[0]}")
        for lo, hi in zip(t, t[1:]):
            if not hi > lo:
                raise ConfigurationError(f"ladder must be strictly increasing, got {t}")
        r0 = t[1] / t[0]
        for lo, hi in zip(t, t[1:]):
            if abs(hi / lo - r0) > 1e-9 * r0:
                raise ConfigurationError(f"ladder is not geometric within 1e-9: {t}")

    @property
    def ratio(self) -> float:
        return self.temperatures[1] / self.temperatures[0]

    @property
    def top(self) -> float:
        return self.temperatures[-1]

    def __len__(self) -> int:
        return len(self.temperatures)

    def __iter__(self):
        return iter(self.temperatures)

    def __getitem__(self, i):
        return self.temperatures[i]


def geometric_ladder(t_top: float, tau: float) -> TemperatureLadder:
    """Ladder from 1 to ``t_top`` with ratio approximately ``tau``.

    The rung count is round(log t_top / log tau), at least 1; the ratio is
    then re-anchored to t_top**(1/H) so the ladder ends exactly at t_top
    while staying geometric.
    """
    if not (t_top > 1.0) or not math.isfinite(t_top):
        raise ConfigurationError(f"t_top must exceed 1, got {t_top}")
    if not (tau > 1.0) or not math.isfinite(tau):
        raise ConfigurationError(f"tau must exceed 1, got {tau}")
    h = max(1, round(math.log(t_top) / math.log(tau)))
    tau_eff = t_top ** (1.0 / h)
    temps = [tau_eff ** k for k in range(h + 1)]
    temps[0] = 1.0
    temps[-1] = t_top
    return TemperatureLadder(tuple(temps))


# -- run configuration and traces -----------------------------------------


@dataclass
class SteepConfig:
    """Configuration of a ladder run.

    ``n_iter`` counts post-burn-in iterations; every chain runs
    burn_in + n_iter steps in total.  ``thin`` is the stride used for trace
    statistics; ``xi_thin`` thins pushes into the empirical measures
    (default 1: every post-burn-in state feeds the measure).

    ``xi_burn_in`` controls how many of each chain's own pushes its measure
    discards: ``None`` copies ``burn_in``, an int applies to every chain, a
    sequence gives one value per chain (cold to hot).  Hotter measures with
    a shorter exclusion window come online earlier, giving colder chains a
    warmed-up proposal source by the time their kept window starts.
    """

    temperatures: Sequence[float]
    local: Any
    long_range: Any
    init: Any
    seed: int
    s: float = 0.33
    n_iter: int = 10_000
    burn_in: int = 0
    thin: int = 1
    xi_thin: int = 1
    xi_burn_in: Any = None
    stream_base: int = 0
    record: bool = True
    check_every: int = 100_000

    def __post_init__(self):
        temps = tuple(float(t) for t in self.temperatures)
        if not temps:
            raise ConfigurationError("at least one temperature is required")
        for lo, hi in zip(temps, temps[1:]):
            if not hi > lo:
                raise ConfigurationError("temperatures must be strictly increasing")
        if any(not (t > 0) or not math.isfinite(t) for t in temps):
            raise ConfigurationError("temperatures must be positive and finite")
        self.temperatures = temps
        # s = 0 is allowed: it degenerates to plain local MH on every chain
        if not (0.0 <= self.s < 1.0):
            raise ConfigurationError(f"s must lie in [0, 1), got {self.s}")
        if self.n_iter < 0:
            raise ConfigurationError("n_iter must be >= 0")
        if self.burn_in < 0:
            raise ConfigurationError("burn_in must be >= 0")
        if self.thin < 1 or self.xi_thin < 1:
            raise ConfigurationError("thin and xi_thin must be >= 1")
        if self.xi_burn_in is not None:
            try:
                xb = [int(v) for v in self.xi_burn_in]
            except TypeError:
                xb = [int(self.xi_burn_in)] * len(temps)
            if len(xb) != len(temps):
                raise ConfigurationError(
                    f"xi_burn_in needs one value per chain "
                    f"({len(temps)}), got {len(xb)}"
                )
            if any(v < 0 for v in xb):
                raise ConfigurationError("xi_burn_in values must be >= 0")
            self.xi_burn_in = tuple(xb)

    def measure_burn_ins(self) -> tuple[int, ...]:
        if self.xi_burn_in is None:
            return (self.burn_in,) * len(self.temperatures)
        return self.xi_burn_in


@dataclass
class ChainTrace:
    """Per-iteration record of one chain (all iterations, burn-in included)."""

    temperature: float
    states: Any                 # (n, d) array for continuous runs, else a list
    log_density: np.ndarray
    kind: np.ndarray
    accepted: np.ndarray
    counts: AcceptCounts

    def state_at(self, i: int):
        return self.states[i]

    def __len__(self) -> int:
        return len(self.log_density)


@dataclass
class SteepResult:
    temperatures: tuple[float, ...]
    chains: list[ChainTrace]       # index 0 = coldest
    measures: list[EmpiricalMeasure]
    burn_in: int
    thin: int

    @property
    def sampling_chain(self) -> ChainTrace:
        return self.chains[0]

    @property
    def exploring_chain(self) -> ChainTrace:
        return self.chains[-1]

    def kept_slice(self) -> slice:
        """Indices of post-burn-in, thinned iterations (the trace rows)."""
        return slice(self.burn_in + self.thin - 1, None, self.thin)


def _alloc_trace(target, temperature: float, total: int, record: bool) -> ChainTrace:
    if record and target.space[0] == "continuous":
        states: Any = np.empty((total, target.space[1]))
    else:
        states = [] if record else None
    n = total if record else 0
    return ChainTrace(
        temperature=temperature,
        states=states,
        log_density=np.empty(n),
        kind=np.zeros(n, dtype=np.uint8),
        accepted=np.zeros(n, dtype=bool),
        counts=AcceptCounts(),
    )


def _record(trace: ChainTrace, i: int, chain: ChainState, kind: int, accepted: bool,
            continuous: bool) -> None:
    if continuous:
        trace.states[i] = chain.current
    else:
        trace.states.append(chain.current)
    trace.log_density[i] = chain.log_base
    trace.kind[i] = kind
    trace.accepted[i] = accepted


def steep_run(target, cfg: SteepConfig,
              on_step: Callable[[int, int, ChainState, int, bool], None] | None = None,
              ) -> SteepResult:
    """Run the full ladder.

    ``on_step(chain_index, iteration, chain, kind, accepted)`` is invoked
    after every chain update when given (chain_index 0 = coldest,
    iteration 1-based).
    """
    temps = cfg.temperatures
    h = len(temps) - 1
    total = cfg.burn_in + cfg.n_iter
    continuous = target.space[0] == "continuous"

    inits = cfg.init if isinstance(cfg.init, list) else [cfg.init] * (h + 1)
    if len(inits) != h + 1:
        raise ConfigurationError(f"need {h + 1} initial states, got {len(inits)}")

    chains = [make_chain(target, init) for init in inits]
    # streams count down from the hot end: exploring chain = stream_base
    rngs = [RngStream(cfg.seed, cfg.stream_base + (h - i)).generator() for i in range(h + 1)]
    xi_burns = cfg.measure_burn_ins()
    measures = [EmpiricalMeasure(burn_in=xi_burns[i], thin=cfg.xi_thin) for i in range(h + 1)]
    traces = [_alloc_trace(target, temps[i], total, cfg.record) for i in range(h + 1)]
    s = cfg.s

    for it in range(1, total + 1):
        row = it - 1
        # exploring chain: plain small-world on the hottest tempered target
        kind, acc = small_world_step(chains[h], target, cfg.local, cfg.long_range,
                                     s, rngs[h], temps[h])
        measures[h].push(chains[h].current, chains[h].log_base)
        if cfg.record:
            _record(traces[h], row, chains[h], kind, acc, continuous)
        if on_step is not None:
            on_step(h, it, chains[h], kind, acc)

        for i in range(h - 1, -1, -1):
            rng = rngs[i]
            chain = chains[i]
            src = measures[i + 1]
            if s > 0.0 and rng.random() < s and len(src) > 0:
                y, ly = src.draw_indexed(rng)
                log_a = tempered_jump_log_accept(chain.log_base, ly, temps[i], temps[i + 1])
                accepted = _accept(log_a, rng)
                chain.counts.update(True, accepted)
                if accepted:
                    chain.current = y
                    chain.log_base = ly
                kind = KIND_LONG
            else:
                # includes the fallback while the hotter measure is still empty
                accepted = mh_step(chain, target, cfg.local, rng, temps[i])
                kind = KIND_LOCAL
            measures[i].push(chain.current, chain.log_base)
            if cfg.record:
                _record(traces[i], row, chain, kind, accepted, continuous)
            if on_step is not None:
                on_step(i, it, chain, kind, accepted)

        if cfg.check_every and it % cfg.check_every == 0:
            for chain in chains:
                fresh = target.log_density(chain.current)
                if fresh == -_INF and chain.log_base == -_INF:
                    continue
                if abs(fresh - chain.log_base) > 1e-8:
                    raise NumericalError(
                        f"cached log density drifted: cached {chain.log_base!r}, "
                        f"recomputed {fresh!r}"
                    )

    for trace, chain in zip(traces, chains):
        trace.counts = chain.counts
    return SteepResult(temps, traces, measures, cfg.burn_in, cfg.thin)


def steep_two_chain_run(target, cfg: SteepConfig,
                        on_step=None) -> SteepResult:
    """Two-temperature special case; identical to steep_run with H = 1."""
    if len(cfg.temperatures) != 2:
        raise ConfigurationError(
            f"two-chain run needs exactly two temperatures, got {len(cfg.temperatures)}"
        )
    return steep_run(target, cfg, on_step)


def mh_run(target, kernel, init, seed: int, n_iter: int,
           temperature: float = 1.0, stream_base: int = 0,
           record: bool = True) -> ChainTrace:
    """Plain single-kernel MH chain, the no-tempering baseline."""
    if n_iter < 1:
        raise ConfigurationError("n_iter must be >= 1")
    chain = make_chain(target, init)
    rng = RngStream(seed, stream_base).generator()
    continuous = target.space[0] == "continuous"
    trace = _alloc_trace(target, temperature, n_iter, record)
    for it in range(n_iter):
        accepted = mh_step(chain, target, kernel, rng, temperature)
        if record:
            _record(trace, it, chain, KIND_LOCAL if kernel.kind == "local" else KIND_LONG,
                    accepted, continuous)
    trace.counts = chain.counts
    return trace


# -- two-chain swap baseline ----------------------------------------------


@dataclass
class BaselineResult:
    cold: ChainTrace
    hot: ChainTrace
    swap_attempted: int
    swap_accepted: int


def tempering_baseline_run(target, temperature: float, local, init, seed: int,
                           n_iter: int, s: float = 0.33,
                           record: bool = True) -> BaselineResult:
    """Classic two-chain swap tempering, the pre-ladder baseline.

    Each iteration: with probability s, attempt a state swap between the
    cold chain (t = 1) and hot chain (t = temperature), accepted with the
    tempered jump rule on the pair; otherwise both chains take independent
    local MH steps.  Streams: hot = 0, cold = 1, swap supervisor = 2.
    """
    if not (0.0 < s < 1.0):
        raise ConfigurationError(f"s must lie in (0, 1), got {s}")
    if not (temperature >= 1.0):
        raise ConfigurationError(f"temperature must be >= 1, got {temperature}")
    cold = make_chain(target, init)
    hot = make_chain(target, init)
    rng_hot = RngStream(seed, 0).generator()
    rng_cold = RngStream(seed, 1).generator()
    rng_sup = RngStream(seed, 2).generator()
    continuous = target.space[0] == "continuous"
    cold_trace = _alloc_trace(target, 1.0, n_iter, record)
    hot_trace = _alloc_trace(target, temperature, n_iter, record)
    attempted = accepted_swaps = 0
    for it in range(n_iter):
        cold_kind = hot_kind = KIND_LOCAL
        cold_acc = hot_acc = False
        if rng_sup.random() < s:
            attempted += 1
            log_a = tempered_jump_log_accept(cold.log_base, hot.log_base,
                                             1.0, temperature)
            if _accept(log_a, rng_sup):
                accepted_swaps += 1
                cold.current, hot.current = hot.current, cold.current
                cold.log_base, hot.log_base = hot.log_base, cold.log_base
                cold_acc = hot_acc = True
            cold_kind = hot_kind = KIND_LONG
        else:
            hot_acc = mh_step(hot, target, local, rng_hot, temperature)
            cold_acc = mh_step(cold, target, local, rng_cold, 1.0)
        if record:
            _record(cold_trace, it, cold, cold_kind, cold_acc, continuous)
            _record(hot_trace, it, hot, hot_kind, hot_acc, continuous)
    cold_trace.counts = cold.counts
    hot_trace.counts = hot.counts
    return BaselineResult(cold_trace, hot_trace, attempted, accepted_swaps)


# -- optimizer -------------------------------------------------------------


@dataclass
class OptimizeResult:
    best_state: Any
    best_log_density: float
    run: SteepResult


def optimize_run(target, cfg: SteepConfig, extra_cold: int = 3,
                 tau: float | None = None) -> OptimizeResult:
    """Mode finding: extend the ladder below t = 1 and track the best state.

    Appends temperatures tau^-1, ..., tau^-extra_cold below the configured
    ladder (tau defaults to the ladder's own ratio), runs the full sweep,
    and returns the highest base-log-density state the coldest chain ever
    visited.  extra_cold = 0 reproduces steep_run exactly.
    """
    if extra_cold < 0:
        raise ConfigurationError("extra_cold must be >= 0")
    if tau is None:
        if len(cfg.temperatures) < 2:
            raise ConfigurationError("need a ladder of >= 2 temperatures or explicit tau")
        tau = cfg.temperatures[1] / cfg.temperatures[0]
    if not (tau > 1.0):
        raise ConfigurationError(f"tau must exceed 1, got {tau}")
    below = [tau ** (-k) for k in range(extra_cold, 0, -1)]
    ext = dict(cfg.__dict__)
    ext["temperatures"] = tuple(below) + tuple(cfg.temperatures)
    if isinstance(cfg.init, list):
        ext["init"] = [cfg.init[0]] * extra_cold + cfg.init
    result = steep_run(target, SteepConfig(**ext))
    coldest = result.chains[0]
    best = int(np.argmax(coldest.log_density))
    return OptimizeResult(coldest.state_at(best), float(coldest.log_density[best]), result)


# -- ladder tuning ---------------------------------------------------------


def tune_ladder(target, local, long_range, init, seed: int,
                floor: float = 0.2, s: float = 0.33,
                t_init: float = 2.0, t_max: float = 1e9,
                pilot_iters: int = 4000) -> TemperatureLadder:
    """Choose (t_top, tau) from pilot runs.

    Doubles t from ``t_init`` until a single-chain small-world pilot at
    temperature t accepts at least ``floor`` of its long-range proposals,
    then halves tau downward from t until a two-chain pilot's jump
    acceptance reaches the floor.  Returns geometric_ladder(t, tau).
    """
    if not (0.0 <= floor < 1.0):
        raise ConfigurationError(f"floor must lie in [0, 1), got {floor}")
    t = float(t_init)
    if not (t > 1.0):
        raise ConfigurationError(f"t_init must exceed 1, got {t_init}")
    while True:
        cfg = SteepConfig(temperatures=[t], local=local, long_range=long_range,
                          init=init, seed=seed, s=s, n_iter=pilot_iters,
                          record=False, check_every=0)
        pilot = steep_run(target, cfg)
        if pilot.exploring_chain.counts.long_rate() >= floor:
            break
        t *= 2.0
        if t > t_max:
            raise DiagnosticError(
                f"no temperature <= {t_max:g} reaches long-range acceptance "
                f">= {floor}; rescale the target or raise t_max"
            )
    tau = t
    while True:
        cfg = SteepConfig(temperatures=[t / tau, t], local=local,
                          long_range=long_range, init=init, seed=seed, s=s,
                          n_iter=pilot_iters, record=False, check_every=0)
        pilot = steep_run(target, cfg)
        if pilot.sampling_chain.counts.long_rate() >= floor:
            break
        tau /= 2.0
        if tau <= 1.0 + 1e-9:
            raise DiagnosticError(
                "no ladder ratio above 1 reaches the jump acceptance floor; "
                "the target may be too rough for this kernel pair"
            )
    return geometric_ladder(t, tau)


# -- convergence-rate diagnostic ------------------------------------------


def convergence_rate_bound(n: int, rho: float, c1: float = 1.0, c2: float = 1.0) -> float:
    """min over 1 <= k < n of c1*k/(n-k) + c2*rho^k.

    Bounds the distance of an n-sample empirical-measure proposal from its
    limit as felt by the colder chain: burn-in leakage (first term) against
    dependence decay (second).  Behaves like log(n)/n for fixed rho.
    """
    if n < 2:
        raise ConfigurationError(f"n must be >= 2, got {n}")
    if not (0.0 < rho < 1.0):
        raise ConfigurationError(f"rho must lie in (0, 1), got {rho}")
    k = np.arange(1, n, dtype=float)
    with np.errstate(under="ignore"):
        vals = c1 * k / (n - k) + c2 * np.power(rho, k)
    return float(vals.min())
