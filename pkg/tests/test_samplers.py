"""MH steps, small-world mixtures, ladders, runs, tuning, and the optimizer."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import pytest

from steepmc import samplers
from steepmc.errors import ConfigurationError, DiagnosticError, NumericalError
from steepmc.proposals import BallKernel, CauchyKernel, LatticeStepKernel
from steepmc.rng import RngStream
from steepmc.samplers import (
    KIND_LOCAL,
    KIND_LONG,
    AcceptCounts,
    SteepConfig,
    SteepResult,
    TemperatureLadder,
    convergence_rate_bound,
    geometric_ladder,
    make_chain,
    mh_run,
    mh_step,
    optimize_run,
    small_world_step,
    steep_run,
    steep_two_chain_run,
    tempered_jump_log_accept,
    tempering_baseline_run,
    tune_ladder,
)
from steepmc.targets import (
    LatticeTarget,
    MixtureTarget,
    exponential_target,
    needles_mixture,
    shifted_ridge_target,
)


def generator(seed: int, stream: int = 0) -> np.random.Generator:
    return RngStream(seed, stream).generator()


def unit_gaussian() -> MixtureTarget:
    return MixtureTarget([1.0], [(0.0, 0.0)], [(1.0, 1.0)])


@dataclass
class FixedKernel:
    """Deterministic proposal used to force specific transitions."""

    y: np.ndarray
    kind: str = "local"

    def sample(self, x, rng):
        return self.y

    def log_ratio(self, x, y):
        return 0.0


class FlatTarget:
    space = ("continuous", 2)

    def log_density(self, x):
        return 0.0


class CountingTarget:
    """Returns a strictly growing value on every call: any cache must drift."""

    space = ("continuous", 1)

    def __init__(self):
        self.calls = 0

    def log_density(self, x):
        self.calls += 1
        return float(self.calls)


# -- accept/reject core ----------------------------------------------------


def test_accept_consumes_exactly_one_uniform():
    for log_a in (0.5, 0.0, -0.7, -math.inf):
        rng = generator(1)
        ref = generator(1)
        samplers._accept(log_a, rng)
        ref.random()
        assert rng.random() == ref.random()


def test_accept_decisions():
    rng = generator(2)
    assert samplers._accept(0.0, rng) is True
    assert samplers._accept(1.0, rng) is True
    assert samplers._accept(-math.inf, rng) is False


def test_accept_counts_bookkeeping():
    c = AcceptCounts()
    assert c.local_rate() == 0.0 and c.long_rate() == 0.0
    c.update(False, True)
    c.update(False, False)
    c.update(True, True)
    assert c.local_rate() == 0.5
    assert c.long_rate() == 1.0
    assert c.as_dict() == {
        "local_accepted": 1,
        "local_attempted": 2,
        "long_accepted": 1,
        "long_attempted": 1,
    }


def test_mh_step_uphill_is_always_accepted():
    target = unit_gaussian()
    chain = make_chain(target, np.array([3.0, 3.0]))
    accepted = mh_step(chain, target, FixedKernel(np.zeros(2)), generator(3))
    assert accepted
    assert chain.current is not None and np.allclose(chain.current, 0.0)
    assert chain.log_base == pytest.approx(target.log_density(np.zeros(2)))


def test_mh_step_zero_mass_proposal_never_accepted():
    target = exponential_target()
    chain = make_chain(target, np.array([1.0]))
    for _ in range(50):
        assert not mh_step(chain, target, FixedKernel(np.array([-1.0])), generator(4))
    assert chain.current[0] == 1.0
    assert chain.counts.local_attempted == 50
    assert chain.counts.local_accepted == 0


def test_mh_step_escapes_zero_mass_state():
    target = exponential_target()
    chain = make_chain(target, np.array([-2.0]))
    assert chain.log_base == -math.inf
    assert mh_step(chain, target, FixedKernel(np.array([0.5])), generator(5))
    assert chain.log_base == pytest.approx(target.log_density(np.array([0.5])))


def test_mh_step_rejects_nan_density():
    class NanTarget:
        space = ("continuous", 1)

        def log_density(self, x):
            return math.nan

    chain = samplers.ChainState(np.zeros(1), 0.0)
    with pytest.raises(NumericalError):
        mh_step(chain, NanTarget(), FixedKernel(np.ones(1)), generator(6))


def test_mh_step_flat_target_accepts_everything():
    target = FlatTarget()
    chain = make_chain(target, np.zeros(2))
    rng = generator(7)
    for _ in range(200):
        assert mh_step(chain, target, BallKernel(0.5), rng)
    assert chain.counts.local_rate() == 1.0


def test_mh_run_requires_iterations():
    with pytest.raises(ConfigurationError):
        mh_run(unit_gaussian(), BallKernel(0.5), np.zeros(2), seed=0, n_iter=0)


# -- small-world mixture ---------------------------------------------------


def test_small_world_long_move_fraction():
    target = unit_gaussian()
    chain = make_chain(target, np.zeros(2))
    rng = generator(8)
    local, long_range = BallKernel(0.5), CauchyKernel(1.0)
    n = 50_000
    for _ in range(n):
        small_world_step(chain, target, local, long_range, 0.33, rng)
    expect = 0.33 * n
    sigma = math.sqrt(n * 0.33 * 0.67)
    assert abs(chain.counts.long_attempted - expect) < 4 * sigma
    assert chain.counts.long_attempted + chain.counts.local_attempted == n


def test_small_world_s_zero_matches_plain_local_mh():
    target = unit_gaussian()
    trace = mh_run(target, BallKernel(0.5), np.zeros(2), seed=9, n_iter=500)
    chain = make_chain(target, np.zeros(2))
    rng = generator(9)  # mh_run uses stream_base = 0
    states = []
    for _ in range(500):
        kind, _ = small_world_step(chain, target, BallKernel(0.5), CauchyKernel(1.0), 0.0, rng)
        assert kind == KIND_LOCAL
        states.append(np.array(chain.current))
    assert np.array_equal(np.asarray(states), np.asarray(trace.states))


def test_small_world_reports_move_kind():
    target = unit_gaussian()
    chain = make_chain(target, np.zeros(2))
    rng = generator(10)
    kinds = set()
    for _ in range(200):
        kind, accepted = small_world_step(
            chain, target, BallKernel(0.5), CauchyKernel(1.0), 0.5, rng
        )
        assert kind in (KIND_LOCAL, KIND_LONG)
        assert isinstance(accepted, bool)
        kinds.add(kind)
    assert kinds == {KIND_LOCAL, KIND_LONG}


# -- tempered jump rule ----------------------------------------------------


def test_tempered_jump_closed_form():
    # (1/t_i - 1/t_j) * (L(y) - L(x)) with t_i = 1, t_j = 6
    assert tempered_jump_log_accept(0.0, -1.0, 1.0, 6.0) == pytest.approx(-5.0 / 6.0)
    assert tempered_jump_log_accept(-1.0, 0.0, 1.0, 6.0) == pytest.approx(5.0 / 6.0)


def test_tempered_jump_equal_states_or_temperatures():
    assert tempered_jump_log_accept(-3.0, -3.0, 1.0, 8.0) == 0.0
    assert tempered_jump_log_accept(0.0, -1.0, 4.0, 4.0) == 0.0


def test_tempered_jump_zero_mass_rules():
    assert tempered_jump_log_accept(0.0, -math.inf, 1.0, 6.0) == -math.inf
    assert tempered_jump_log_accept(-math.inf, 0.0, 1.0, 6.0) == math.inf
    # a zero-mass proposal loses even against a zero-mass current state
    assert tempered_jump_log_accept(-math.inf, -math.inf, 1.0, 6.0) == -math.inf


# -- temperature ladders ---------------------------------------------------


def test_ladder_accessors():
    ladder = TemperatureLadder((1.0, 2.0, 4.0))
    assert ladder.ratio == 2.0
    assert ladder.top == 4.0
    assert len(ladder) == 3
    assert list(ladder) == [1.0, 2.0, 4.0]
    assert ladder[1] == 2.0


def test_ladder_validation():
    with pytest.raises(ConfigurationError):
        TemperatureLadder((1.0,))
    with pytest.raises(ConfigurationError):
        TemperatureLadder((2.0, 4.0))
    with pytest.raises(ConfigurationError):
        TemperatureLadder((1.0, 1.0))
    with pytest.raises(ConfigurationError):
        TemperatureLadder((1.0, 2.0, 5.0))
    with pytest.raises(ConfigurationError):
        TemperatureLadder((1.0, 2.0, 4.0000001))


def test_geometric_ladder_examples():
    six = geometric_ladder(7776.0, 6.0)
    assert len(six) == 6
    assert six.top == 7776.0
    assert six[1] == pytest.approx(6.0, rel=1e-12)

    four = geometric_ladder(1000.0, 10.0)
    assert len(four) == 4
    assert four.top == 1000.0

    assert tuple(geometric_ladder(5.0, 5.0)) == (1.0, 5.0)


def test_geometric_ladder_reanchors_the_ratio():
    # round(log 30 / log 6) = 2 rungs, so the ratio becomes sqrt(30)
    ladder = geometric_ladder(30.0, 6.0)
    assert len(ladder) == 3
    assert ladder[1] == pytest.approx(math.sqrt(30.0), rel=1e-12)
    assert ladder.top == 30.0


def test_geometric_ladder_validation():
    for t_top, tau in [(1.0, 2.0), (0.5, 2.0), (math.inf, 2.0), (10.0, 1.0), (10.0, math.inf)]:
        with pytest.raises(ConfigurationError):
            geometric_ladder(t_top, tau)


# -- run configuration -----------------------------------------------------


def kernels():
    return dict(local=BallKernel(0.1), long_range=CauchyKernel(1.0))


def test_steep_config_validation():
    base = dict(temperatures=(1.0, 6.0), init=np.zeros(2), seed=0, **kernels())
    SteepConfig(**base)
    for bad in [
        dict(s=1.0),
        dict(s=-0.1),
        dict(n_iter=-1),
        dict(burn_in=-1),
        dict(thin=0),
        dict(xi_thin=0),
        dict(temperatures=()),
        dict(temperatures=(6.0, 1.0)),
        dict(temperatures=(1.0, math.inf)),
        dict(xi_burn_in=(1, 2, 3)),
        dict(xi_burn_in=-1),
    ]:
        with pytest.raises(ConfigurationError):
            SteepConfig(**{**base, **bad})


def test_steep_config_measure_burn_ins():
    base = dict(temperatures=(1.0, 6.0, 36.0), init=np.zeros(2), seed=0, **kernels())
    assert SteepConfig(**base, burn_in=5).measure_burn_ins() == (5, 5, 5)
    assert SteepConfig(**base, xi_burn_in=7).measure_burn_ins() == (7, 7, 7)
    assert SteepConfig(**base, xi_burn_in=[3, 2, 1]).measure_burn_ins() == (3, 2, 1)


def test_steep_rejects_wrong_init_count():
    cfg = SteepConfig(
        temperatures=(1.0, 6.0, 36.0),
        init=[np.zeros(2), np.zeros(2)],
        seed=0,
        n_iter=10,
        **kernels(),
    )
    with pytest.raises(ConfigurationError):
        steep_run(needles_mixture(), cfg)


# -- ladder runs -----------------------------------------------------------


def test_two_chain_run_requires_two_temperatures():
    cfg = SteepConfig(temperatures=(1.0, 6.0, 36.0), init=np.zeros(2), seed=0,
                      n_iter=10, **kernels())
    with pytest.raises(ConfigurationError):
        steep_two_chain_run(needles_mixture(), cfg)


def test_two_chain_run_matches_general_ladder():
    target = needles_mixture()
    mk = lambda: SteepConfig(temperatures=(1.0, 36.0), init=np.zeros(2), seed=3,
                             n_iter=300, **kernels())
    a = steep_run(target, mk())
    b = steep_two_chain_run(target, mk())
    for ca, cb in zip(a.chains, b.chains):
        assert np.array_equal(ca.states, cb.states)


def test_exploring_chain_ignores_colder_chains():
    # removing cold rungs must not perturb the hottest trajectory: streams
    # count down from the hot end and information flows strictly hot-to-cold
    target = needles_mixture()
    short = SteepConfig(temperatures=(1.0, 216.0), init=np.zeros(2), seed=7,
                        n_iter=2000, **kernels())
    tall = SteepConfig(temperatures=(1.0, 6.0, 36.0, 216.0), init=np.zeros(2), seed=7,
                       n_iter=2000, **kernels())
    a = steep_run(target, short).exploring_chain
    b = steep_run(target, tall).exploring_chain
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.log_density, b.log_density)


def test_exploring_long_acceptance_rises_with_temperature():
    target = needles_mixture()
    rates = []
    for t in (1.0, 6.0, 36.0, 216.0):
        cfg = SteepConfig(temperatures=(t,), init=np.zeros(2), seed=11,
                          n_iter=4000, **kernels())
        rates.append(steep_run(target, cfg).exploring_chain.counts.long_rate())
    assert rates == sorted(rates)
    assert rates[0] < 0.1
    assert rates[-1] > 0.35


def test_steep_run_zero_iterations():
    cfg = SteepConfig(temperatures=(1.0, 36.0), init=np.zeros(2), seed=0,
                      n_iter=0, **kernels())
    res = steep_run(needles_mixture(), cfg)
    assert all(len(c) == 0 for c in res.chains)
    assert all(len(m) == 0 for m in res.measures)
    assert res.sampling_chain is res.chains[0]
    assert res.exploring_chain is res.chains[-1]


def test_kept_slice_window():
    res = SteepResult((1.0, 6.0), [], [], burn_in=100, thin=10)
    kept = np.arange(600)[res.kept_slice()]
    assert kept[0] == 109
    assert kept[-1] == 599
    assert len(kept) == 50
    assert np.all(np.diff(kept) == 10)


def test_on_step_callback_order():
    seen = []
    cfg = SteepConfig(temperatures=(1.0, 36.0), init=np.zeros(2), seed=1,
                      n_iter=3, **kernels())
    steep_run(needles_mixture(), cfg,
              on_step=lambda i, it, chain, kind, acc: seen.append((i, it)))
    # hot chain updates first within each iteration; iterations are 1-based
    assert seen == [(1, 1), (0, 1), (1, 2), (0, 2), (1, 3), (0, 3)]


def test_cached_density_audit_detects_drift():
    target = CountingTarget()
    cfg = SteepConfig(temperatures=(1.0,), init=np.zeros(1), seed=0, s=0.0,
                      n_iter=50, check_every=5, local=BallKernel(0.5),
                      long_range=CauchyKernel(1.0))
    with pytest.raises(NumericalError):
        steep_run(target, cfg)


def test_cached_density_audit_can_be_disabled():
    target = CountingTarget()
    cfg = SteepConfig(temperatures=(1.0,), init=np.zeros(1), seed=0, s=0.0,
                      n_iter=50, check_every=0, local=BallKernel(0.5),
                      long_range=CauchyKernel(1.0))
    res = steep_run(target, cfg)
    assert len(res.chains[0]) == 50


# -- two-chain swap baseline -----------------------------------------------


def test_baseline_validation():
    target = unit_gaussian()
    for temperature, s in [(8.0, 0.0), (8.0, 1.0), (0.5, 0.33)]:
        with pytest.raises(ConfigurationError):
            tempering_baseline_run(target, temperature, BallKernel(0.5),
                                   np.zeros(2), seed=0, n_iter=10, s=s)


def test_baseline_unit_temperature_swaps_always_accept():
    # at t = 1 both chains share one law, so the swap rule degenerates to 1
    res = tempering_baseline_run(unit_gaussian(), 1.0, BallKernel(0.5),
                                 np.zeros(2), seed=4, n_iter=2000, s=0.4)
    assert res.swap_attempted > 0
    assert res.swap_accepted == res.swap_attempted


def test_baseline_mixes_two_mode_lattice():
    target = LatticeTarget(np.array([2.0, -3.0, -3.0, -3.0, 2.0]))
    res = tempering_baseline_run(target, 8.0, LatticeStepKernel(1),
                                 2, seed=5, n_iter=100_000, s=0.33)
    kept = np.asarray(res.cold.states[2000:])
    emp = np.bincount(kept, minlength=5) / len(kept)
    tv = 0.5 * np.abs(emp - target.probabilities()).sum()
    assert tv < 0.05
    assert res.swap_accepted > 0


# -- ladder tuning ---------------------------------------------------------


def test_tune_ladder_on_the_two_needle_mixture():
    ladder = tune_ladder(needles_mixture(), BallKernel(0.1), CauchyKernel(1.0),
                         np.zeros(2), seed=0)
    assert tuple(ladder) == pytest.approx((1.0, 5.656854249492381, 32.0), rel=1e-12)


def test_tuned_ladder_meets_the_acceptance_floor_in_a_full_run():
    target = needles_mixture()
    ladder = tune_ladder(target, BallKernel(0.1), CauchyKernel(1.0), np.zeros(2), seed=0)
    cfg = SteepConfig(temperatures=tuple(ladder), init=np.zeros(2), seed=1,
                      n_iter=6000, burn_in=1000, **kernels())
    res = steep_run(target, cfg)
    assert res.sampling_chain.counts.long_rate() >= 0.2


def test_tune_ladder_unimodal_target_stays_cool():
    ladder = tune_ladder(unit_gaussian(), BallKernel(0.5), CauchyKernel(1.0),
                         np.zeros(2), seed=0)
    assert ladder.top <= 4.0


def test_tune_ladder_zero_floor_returns_minimal_ladder():
    ladder = tune_ladder(needles_mixture(), BallKernel(0.1), CauchyKernel(1.0),
                         np.zeros(2), seed=0, floor=0.0)
    assert tuple(ladder) == (1.0, 2.0)


def test_tune_ladder_gives_up_at_t_max():
    # long-range kernel that always lands in a zero-mass region never
    # reaches the floor at any temperature
    target = exponential_target()
    with pytest.raises(DiagnosticError):
        tune_ladder(target, BallKernel(0.5), FixedKernel(np.array([-1.0]), kind="long"),
                    np.array([1.0]), seed=0, t_max=16.0, pilot_iters=200)


# -- optimizer -------------------------------------------------------------


def test_optimize_validation():
    cfg = SteepConfig(temperatures=(1.0, 6.0), init=np.zeros(2), seed=0,
                      n_iter=10, **kernels())
    with pytest.raises(ConfigurationError):
        optimize_run(needles_mixture(), cfg, extra_cold=-1)
    with pytest.raises(ConfigurationError):
        optimize_run(needles_mixture(), cfg, tau=1.0)
    single = SteepConfig(temperatures=(1.0,), init=np.zeros(2), seed=0,
                         n_iter=10, **kernels())
    with pytest.raises(ConfigurationError):
        optimize_run(needles_mixture(), single)


def test_optimize_zero_extra_chains_reproduces_the_run():
    target = needles_mixture()
    mk = lambda: SteepConfig(temperatures=(1.0, 6.0, 36.0), init=np.zeros(2), seed=2,
                             n_iter=400, **kernels())
    opt = optimize_run(target, mk(), extra_cold=0)
    plain = steep_run(target, mk())
    assert np.array_equal(opt.run.sampling_chain.states, plain.sampling_chain.states)
    coldest = opt.run.sampling_chain
    best = int(np.argmax(coldest.log_density))
    assert opt.best_log_density == coldest.log_density[best]
    assert np.array_equal(opt.best_state, coldest.states[best])


def test_optimize_extends_the_ladder_below_unit_temperature():
    cfg = SteepConfig(temperatures=(1.0, 6.0, 36.0), init=np.zeros(2), seed=0,
                      n_iter=50, **kernels())
    opt = optimize_run(needles_mixture(), cfg, extra_cold=3)
    temps = opt.run.temperatures
    assert len(temps) == 6
    assert temps[3:] == (1.0, 6.0, 36.0)
    assert temps[:3] == pytest.approx((6.0 ** -3, 6.0 ** -2, 6.0 ** -1))


def test_optimize_locates_a_needle_mode():
    cfg = SteepConfig(temperatures=(1.0, 6.0, 36.0), init=np.array([2.5, 2.5]),
                      seed=0, n_iter=4000, burn_in=500, **kernels())
    opt = optimize_run(needles_mixture(), cfg, extra_cold=3)
    d = min(np.linalg.norm(opt.best_state),
            np.linalg.norm(opt.best_state - np.array([5.0, 5.0])))
    assert d < 0.05


def test_optimize_locates_the_ridge_optimum():
    target = shifted_ridge_target()
    for seed in (0, 1, 2):
        cfg = SteepConfig(temperatures=(1.0, 6.0, 36.0), init=np.zeros(2),
                          seed=seed, n_iter=6000, burn_in=500,
                          local=BallKernel(0.2), long_range=CauchyKernel(1.0))
        opt = optimize_run(target, cfg, extra_cold=3)
        assert np.linalg.norm(opt.best_state - np.array([1.5, -0.5])) < 0.05
        assert opt.best_log_density <= 0.0


# -- empirical-proposal convergence bound ----------------------------------


def test_convergence_rate_bound_closed_form():
    # n = 2 leaves a single k = 1 term: c1/(n-1) + c2 * rho
    assert convergence_rate_bound(2, 0.5) == 1.5
    assert convergence_rate_bound(2, 0.5, c1=2.0, c2=4.0) == 4.0


def test_convergence_rate_bound_decreases_with_sample_size():
    values = [convergence_rate_bound(n, 0.5) for n in (10, 100, 1000, 10_000)]
    assert values == sorted(values, reverse=True)
    assert all(v > 0 for v in values)


def test_convergence_rate_bound_scales_like_log_n_over_n():
    ratios = [
        convergence_rate_bound(n, 0.5) * n / math.log(n)
        for n in (100, 1000, 10_000, 100_000)
    ]
    diffs = [abs(a - b) for a, b in zip(ratios, ratios[1:])]
    assert diffs == sorted(diffs, reverse=True)
    assert abs(ratios[-1] - ratios[-2]) < 0.03


def test_convergence_rate_bound_validation():
    with pytest.raises(ConfigurationError):
        convergence_rate_bound(1, 0.5)
    for rho in (0.0, 1.0, -0.5):
        with pytest.raises(ConfigurationError):
            convergence_rate_bound(100, rho)
