import math

import numpy as np
import pytest

from steepmc.errors import ConfigurationError, DimensionMismatchError
from steepmc.targets import (
    LatticeTarget,
    MixtureTarget,
    TargetDensity,
    TemperedDensity,
    exponential_target,
    gaussian_ball_mass,
    laplace_mixture_1d,
    log_density_at,
    needles_mixture,
    shifted_ridge_target,
)

# log of the standard normal density at its mode
LOG_STD_NORMAL_PEAK = -0.5 * math.log(2.0 * math.pi)


def test_standard_gaussian_log_density_at_zero():
    target = MixtureTarget([1.0], [[0.0]], [[1.0]])
    assert log_density_at(target, [0.0]) == pytest.approx(LOG_STD_NORMAL_PEAK, abs=1e-12)


def test_needles_log_density_at_origin():
    # peak of one needle: log(0.5 / (2*pi*0.01)); the far needle adds ~e^-2500
    target = needles_mixture((5.0, 5.0), 0.01)
    expected = math.log(0.5 / (2.0 * math.pi * 0.01))
    assert log_density_at(target, [0.0, 0.0]) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(2.0741459390188, abs=1e-10)


def test_needles_symmetric_between_modes():
    target = needles_mixture((5.0, 5.0), 0.01)
    assert target.log_density(np.array([0.0, 0.0])) == pytest.approx(
        target.log_density(np.array([5.0, 5.0])), abs=1e-12
    )


def test_zero_mass_state_is_minus_inf():
    target = exponential_target(1.0)
    assert log_density_at(target, [-0.5]) == -math.inf


def test_dimension_mismatch_names_both_sizes():
    target = needles_mixture()
    with pytest.raises(DimensionMismatchError) as err:
        log_density_at(target, [0.0, 0.0, 0.0])
    assert "expected d=2" in str(err.value)
    assert "got d=3" in str(err.value)


def test_tempered_density_identity_and_division():
    base = TargetDensity(lambda x: -10.0, ("continuous", 1))
    assert TemperedDensity(base, 1.0).log_density([0.0]) == -10.0
    assert TemperedDensity(base, 2.0).log_density([0.0]) == -5.0


def test_tempered_density_preserves_minus_inf():
    target = exponential_target(1.0)
    for t in (1.0, 2.0, 1000.0):
        assert TemperedDensity(target, t).log_density([-1.0]) == -math.inf


def test_tempered_density_rejects_bad_temperature():
    base = TargetDensity(lambda x: 0.0, ("continuous", 1))
    for t in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(ConfigurationError):
            TemperedDensity(base, t)


def test_tempering_preserves_ordering():
    target = needles_mixture()
    x = np.array([0.01, 0.0])
    y = np.array([0.3, 0.0])
    assert target.log_density(x) > target.log_density(y)
    for t in (2.0, 10.0, 7776.0):
        tempered = TemperedDensity(target, t)
        assert tempered.log_density(x) > tempered.log_density(y)


def test_exponential_tempered_peak_ratio_is_one_over_t():
    # Exp(1)^(1/t) renormalizes to Exp(1/t), so normalized peak ratio = 1/t
    target = exponential_target(1.0)
    for t in (2.0, 4.0, 8.0):
        log_peak_t = target.log_density([0.0]) / t
        # normalizer of exp(-x/t) on [0, inf) is t
        normalized_ratio = math.exp(log_peak_t) / t / math.exp(target.log_density([0.0]))
        assert normalized_ratio == pytest.approx(1.0 / t, rel=1e-12)


def test_mixture_logsumexp_matches_direct_sum():
    rng = np.random.default_rng(5)
    target = MixtureTarget(
        [0.2, 0.5, 0.3],
        [[0.0, 0.0], [3.0, -1.0], [-2.0, 2.0]],
        [[1.0, 0.5], [0.3, 0.3], [2.0, 1.0]],
    )
    for _ in range(50):
        x = rng.normal(scale=3.0, size=2)
        direct = 0.0
        for w, mu, var in zip(target.weights, target.means, target.variances):
            norm = np.prod(1.0 / np.sqrt(2.0 * math.pi * var))
            direct += w * norm * math.exp(-0.5 * np.sum((x - mu) ** 2 / var))
        assert target.log_density(x) == pytest.approx(math.log(direct), rel=1e-12)


def test_mixture_rejects_inconsistent_shapes_and_signs():
    with pytest.raises(ConfigurationError):
        MixtureTarget([1.0, 1.0], [[0.0]], [[1.0]])
    with pytest.raises(ConfigurationError):
        MixtureTarget([1.0, -1.0], [[0.0], [1.0]], [[1.0], [1.0]])
    with pytest.raises(ConfigurationError):
        MixtureTarget([1.0], [[0.0]], [[0.0]])


def test_needles_partition_predicates_split_the_plane():
    target = needles_mixture((5.0, 5.0), 0.01)
    near, far = target.partition
    assert near(np.array([0.1, -0.2])) and not far(np.array([0.1, -0.2]))
    assert far(np.array([4.9, 5.2])) and not near(np.array([4.9, 5.2]))


def test_gaussian_ball_mass_matches_chi_square():
    from scipy.stats import chi2

    single = MixtureTarget([1.0], [[0.0, 0.0]], [[1.0, 1.0]])
    assert gaussian_ball_mass(single, [0.0, 0.0], 1.0) == pytest.approx(
        chi2.cdf(1.0, 2), rel=1e-12
    )
    # the needles region: half the mass sits in the origin needle,
    # a radius-0.5 ball captures essentially all of it (5 sigma)
    needles = needles_mixture((5.0, 5.0), 0.01)
    mass = gaussian_ball_mass(needles, [0.0, 0.0], 0.5)
    assert mass == pytest.approx(0.5 * chi2.cdf(25.0, 2), rel=1e-12)
    assert 0.49999 < mass < 0.5


def test_gaussian_ball_mass_rejects_anisotropic():
    aniso = MixtureTarget([1.0], [[0.0, 0.0]], [[1.0, 2.0]])
    with pytest.raises(ConfigurationError):
        gaussian_ball_mass(aniso, [0.0, 0.0], 1.0)


def test_lattice_target_probabilities_and_range():
    lat = LatticeTarget(np.log(np.array([2.0, 1.0, 1.0])))
    probs = lat.probabilities()
    assert probs == pytest.approx([0.5, 0.25, 0.25], abs=1e-15)
    assert lat.log_density(-1) == -math.inf
    assert lat.log_density(3) == -math.inf


def test_lattice_target_rejects_nan_and_plus_inf():
    with pytest.raises(ConfigurationError):
        LatticeTarget(np.array([0.0, math.nan]))
    with pytest.raises(ConfigurationError):
        LatticeTarget(np.array([0.0, math.inf]))


def test_laplace_mixture_is_normalized():
    from scipy.integrate import quad

    target = laplace_mixture_1d([0.0, 3.0], 0.15)
    total, _ = quad(lambda v: math.exp(target.log_density([v])), -10.0, 13.0)
    assert total == pytest.approx(1.0, abs=1e-9)


def test_shifted_ridge_maximum_location():
    target = shifted_ridge_target((1.5, -0.5), 2.0)
    assert target.log_density([1.5, -0.5]) == 0.0
    rng = np.random.default_rng(0)
    for _ in range(200):
        x = np.array([1.5, -0.5]) + rng.normal(scale=0.5, size=2)
        if not np.allclose(x, [1.5, -0.5]):
            assert target.log_density(x) < 0.0
