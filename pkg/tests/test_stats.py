import numpy as np
import pytest

from toruswalk.measures import Atoms, Dirac, Uniform, WrappedGaussian
from toruswalk.sequences import IidTail, MeasureSequence
from toruswalk.simulate import ChainConfig, DeterministicAnchor, simulate
from toruswalk.stats import (
    RegimeMismatchError,
    ShapeMismatchError,
    TooFewSamplesError,
    bucket_uniformity,
    ecf_threshold,
    independence,
    joint_character,
    measurability_check,
    noise_recovery_residual,
    pathwise_determinism_residual,
    recursion_residual,
    telescope_residual,
    two_sample_ecf_distance,
    uniformity,
)

HALF_ATOMS = Atoms([(0, "1/2"), ("1/2", "1/2")])
SEQ_C3 = MeasureSequence(IidTail(HALF_ATOMS))
SEQ_C2 = MeasureSequence(IidTail(Dirac("1/3")))
SEQ_C1 = MeasureSequence(IidTail(WrappedGaussian(0.0, 0.5)))


def test_uniformity_grid_cancellation():
    # n-th roots of unity cancel exactly at p not a multiple of n
    grid = np.arange(1000) / 1000.0
    rep = uniformity(grid, 5)
    assert rep.passed and rep.max_modulus < 1e-12


def test_uniformity_seeded_run():
    n = 100_000
    rep = uniformity(Uniform().sample(n, seed=42), 10)
    assert rep.passed
    # expected modulus sqrt(pi)/(2 sqrt(n)) ~ 0.0028; 4/sqrt(n) leaves room
    assert rep.max_modulus < 0.01


def test_uniformity_point_mass_fails():
    rep = uniformity(np.full(1000, 0.7), 4)
    assert not rep.passed
    assert all(r.modulus == pytest.approx(1.0) for r in rep.rows)


def test_uniformity_needs_samples():
    with pytest.raises(TooFewSamplesError):
        uniformity(np.linspace(0, 0.99, 50), 3)


def test_independence_seeded_null():
    n = 100_000
    theta = Uniform().sample(n, seed=1)
    noise = Uniform().sample(n, seed=2, slot=5)
    rep = independence(theta, {0: noise}, [1, 2], [1, 2])
    assert rep.passed
    assert rep.max_modulus < 0.01


def test_independence_perfect_dependence_fails():
    x = Uniform().sample(5000, seed=3)
    rep = independence(x, {0: x}, [1], [1])
    assert not rep.passed
    assert rep.rows[0].modulus == pytest.approx(1.0)


def test_independence_c2_exhibits_dependence():
    # deterministic chain: theta_0 is constant, modulus 1 against any character
    ens = simulate(ChainConfig(SEQ_C2, 9, DeterministicAnchor(0.0), 5000, 1))
    rep = independence(ens.eta0, {0: ens.noise_at(0)}, [1], [1])
    assert not rep.passed
    assert rep.max_modulus == pytest.approx(1.0)


def test_independence_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        independence(np.zeros(100), {0: np.zeros(50)}, [1], [1])


def test_independence_bias_callable():
    theta = Uniform().sample(1000, seed=4)
    rep = independence(theta, {0: theta}, [1], [1], bias=lambda p, q, j: 1.0)
    assert rep.passed  # threshold absorbs the declared bias


def test_joint_character():
    n = 50_000
    theta = Uniform().sample(n, seed=5)
    x1 = Uniform().sample(n, seed=6, slot=1)
    x2 = Uniform().sample(n, seed=7, slot=2)
    m = joint_character(theta, 1, [(1, x1), (1, x2)])
    assert m < ecf_threshold(n)
    # fully dependent combination: theta - theta = const
    m = joint_character(theta, 1, [(1, theta)])
    assert m == pytest.approx(1.0)


def test_bucket_uniformity():
    n = 100_000
    rep = bucket_uniformity(Uniform().sample(n, seed=8), 2)
    assert rep.passed
    rep = bucket_uniformity(np.full(1000, 0.1), 2)
    assert not rep.passed
    with pytest.raises(TooFewSamplesError):
        bucket_uniformity(np.linspace(0, 0.99, 150), 8)
    with pytest.raises(ValueError):
        bucket_uniformity(np.zeros(1000), 1)


def test_bucket_uniformity_c3_scenario():
    from toruswalk.simulate import UniformAnchor

    ens = simulate(ChainConfig(SEQ_C3, 10, UniformAnchor(), 100_000, 42))
    assert bucket_uniformity(ens.eta0, 2).passed


def test_measurability_check_passes_on_coset():
    rep = measurability_check(SEQ_C3, 2, 20_000, 42, depth=15)
    assert rep.passed
    assert rep.max_discrepancy <= 1e-9
    assert rep.base_anchor == 0.0 and rep.shifted_anchor == 0.5


def test_measurability_negative_control():
    rep = measurability_check(SEQ_C3, 2, 20_000, 42, depth=15, shift=0.25)
    assert not rep.passed
    assert rep.max_discrepancy == pytest.approx(0.5)


def test_measurability_regime_guard():
    with pytest.raises(RegimeMismatchError):
        measurability_check(SEQ_C2, 1, 100, 1)
    with pytest.raises(RegimeMismatchError):
        measurability_check(SEQ_C3, 4, 100, 1)  # generator is 2, not 4


def test_two_sample_ecf_distance():
    u = Uniform().sample(100_000, seed=9)
    assert two_sample_ecf_distance(u, u, 5) == 0.0
    v = Uniform().sample(100_000, seed=10, slot=3)
    assert two_sample_ecf_distance(u, v, 5) < 0.02
    assert two_sample_ecf_distance(u, np.zeros(1000), 1) > 0.99


def test_pathwise_residuals():
    ens = simulate(ChainConfig(SEQ_C1, 20, DeterministicAnchor(0.3), 2000, 17))
    assert recursion_residual(ens) == 0.0
    assert telescope_residual(ens) <= 1e-9
    assert noise_recovery_residual(ens) <= 1e-12
    assert pathwise_determinism_residual(ens) <= 1e-9


def test_non_interchange_witness():
    # the C1 trap: eta_0 is pathwise determined by (eta_j, later noise) for
    # every j, yet statistically independent of the whole noise sequence
    n = 100_000
    ens = simulate(ChainConfig(SEQ_C1, 30, DeterministicAnchor(0.0), n, 42))
    assert pathwise_determinism_residual(ens) <= 1e-9
    rep = independence(
        ens.eta0, {j: ens.noise_at(j) for j in (0, -5, -10)}, [1, 2], [1, 2]
    )
    assert rep.passed
