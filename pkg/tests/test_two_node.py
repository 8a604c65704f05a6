import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdbeam import two_node
from fdbeam.optimizer import Constraint, OptimizerConfig, ascend, finite_difference_gradient, init_gaussian, init_svd
from fdbeam.two_node import LinkPowers, TwoNodeScenario, two_node_gradients, two_node_sum_rate, upper_bound

from conftest import make_two_node, random_point

ONE = np.ones((1, 1), dtype=complex)


def scalar_scenario(rho=1.0, tau=0.0, sigma2=1.0, gain=1.0):
    p = LinkPowers(rho, tau, sigma2)
    return TwoNodeScenario(gain * ONE, gain * ONE, ONE, ONE, p, p)


def svd_start(s, constraint="unit_norm"):
    f1, w2 = init_svd(s.h12, constraint)
    f2, w1 = init_svd(s.h21, constraint)
    return [f1, f2, w1, w2]


def optimise(s, constraint="unit_norm", x0=None):
    obj, grads = two_node.objective_and_gradients(s)
    return ascend(obj, grads, x0 or svd_start(s, constraint), OptimizerConfig(constraint=constraint))


def test_rate_interference_free_unit_gains():
    one = np.ones(1, dtype=complex)
    assert two_node_sum_rate(scalar_scenario(), one, one, one, one) == pytest.approx(2.0)


def test_rate_zero_power():
    rng = np.random.default_rng(0)
    s = make_two_node(rng, n=4)
    p = LinkPowers(0.0, 1.0, 1.0)
    s = TwoNodeScenario(s.h12, s.h21, s.h11, s.h22, p, p)
    assert two_node_sum_rate(s, *random_point(rng, s.sizes)) == 0.0


def test_dimension_mismatch():
    rng = np.random.default_rng(0)
    s = make_two_node(rng, n=4)
    x = random_point(rng, s.sizes)
    x[2] = x[2][:3]
    with pytest.raises(ValueError, match="w1"):
        two_node_sum_rate(s, *x)
    with pytest.raises(ValueError):
        two_node_gradients(s, *x)
    with pytest.raises(ValueError):
        TwoNodeScenario(s.h12, s.h21, s.h11[:3], s.h22, s.powers1, s.powers2)


@pytest.mark.parametrize("seed", range(5))
def test_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    s = make_two_node(rng, sizes=(3, 4, 5, 2), snr_db=8.0, tau=3.0)
    x = random_point(rng, s.sizes)
    obj, grads = two_node.objective_and_gradients(s)
    analytic = np.concatenate(grads(x))
    numeric = np.concatenate(finite_difference_gradient(obj, x))
    assert np.linalg.norm(analytic - numeric) / np.linalg.norm(numeric) < 1e-4


def test_gradient_stationary_at_top_singular_pair():
    rng = np.random.default_rng(4)
    s = make_two_node(rng, n=4, tau=0.0)
    x = svd_start(s)
    g_f1, g_f2, g_w1, g_w2 = two_node_gradients(s, *x)
    for v, g in ((x[1], g_f2), (x[2], g_w1), (x[0], g_f1), (x[3], g_w2)):
        tangential = g - np.vdot(v, g).real * v
        assert np.linalg.norm(tangential) < 1e-6


@given(st.floats(1e-3, 1e3))
@settings(max_examples=30, deadline=None)
def test_gradients_invariant_to_common_power_scaling(c):
    rng = np.random.default_rng(11)
    s = make_two_node(rng, n=3, tau=2.0)
    x = random_point(rng, s.sizes)
    scaled = TwoNodeScenario(s.h12, s.h21, s.h11, s.h22, s.powers1.scaled(c), s.powers2.scaled(c))
    for a, b in zip(two_node_gradients(s, *x), two_node_gradients(scaled, *x)):
        np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12)


def test_upper_bound_scalar():
    assert upper_bound(scalar_scenario(rho=3.0)) == pytest.approx(4.0)


def test_upper_bound_rank_one():
    u = np.array([2.0, 0.0, 0.0])
    v = np.array([0.6, 0.8j])
    h = np.outer(u, v.conj())
    p = LinkPowers(1.0, 0.0, 1.0)
    s = TwoNodeScenario(h, h.copy(), np.zeros((3, 2)), np.zeros((3, 2)), p, p)
    assert upper_bound(s) == pytest.approx(2 * np.log2(1 + 4.0))


@pytest.mark.parametrize("seed", range(5))
def test_upper_bound_against_eigenvalues(seed):
    rng = np.random.default_rng(seed)
    s = make_two_node(rng, n=4, snr_db=3.0)
    lam12 = np.linalg.eigvalsh(s.h12.conj().T @ s.h12).max()
    lam21 = np.linalg.eigvalsh(s.h21.conj().T @ s.h21).max()
    rho = s.powers1.rho
    expected = np.log2(1 + lam12 * rho) + np.log2(1 + lam21 * rho)
    assert upper_bound(s) == pytest.approx(expected, abs=1e-8)


def test_interference_free_optimum_reaches_bound():
    rng = np.random.default_rng(21)
    s = make_two_node(rng, n=4, tau=0.0)
    x0 = [init_gaussian(n, rng) for n in s.sizes]
    trace = optimise(s, x0=x0)
    assert trace.objective == pytest.approx(upper_bound(s), abs=1e-3)


@pytest.mark.parametrize("seed", range(15))
def test_bound_and_constraint_ordering(seed):
    rng = np.random.default_rng(100 + seed)
    s = make_two_node(rng, n=8, tau=1.0)
    un = optimise(s, "unit_norm").objective
    ca = optimise(s, "constant_amplitude").objective
    assert un <= upper_bound(s) + 1e-9
    assert ca <= un + 1e-9


@given(st.floats(0, 100), st.floats(0, 100), st.integers(0, 1000))
@settings(max_examples=40, deadline=None)
def test_rate_monotone_in_transmit_power(rho, extra, seed):
    rng = np.random.default_rng(seed)
    s = make_two_node(rng, n=3, tau=1.0)
    x = random_point(rng, s.sizes)
    lo = TwoNodeScenario(s.h12, s.h21, s.h11, s.h22, LinkPowers(rho, 1.0), LinkPowers(rho, 1.0))
    hi = TwoNodeScenario(s.h12, s.h21, s.h11, s.h22, LinkPowers(rho + extra, 1.0), LinkPowers(rho, 1.0))
    assert two_node_sum_rate(hi, *x) >= two_node_sum_rate(lo, *x) - 1e-12


@given(st.lists(st.floats(-np.pi, np.pi), min_size=4, max_size=4))
@settings(max_examples=30)
def test_rate_phase_invariant(thetas):
    rng = np.random.default_rng(1)
    s = make_two_node(rng, n=4)
    x = random_point(rng, s.sizes)
    rot = [np.exp(1j * t) * v for t, v in zip(thetas, x)]
    assert two_node_sum_rate(s, *rot) == pytest.approx(two_node_sum_rate(s, *x), abs=1e-12)


@pytest.mark.parametrize("init", ["svd", "gaussian"])
def test_convergence_on_default_scenario(init):
    """Every seeded Table-I-sized trial converges from either initialisation."""
    cfg = OptimizerConfig()
    for seed in range(100):
        rng = np.random.default_rng(seed)
        s = make_two_node(rng, n=16, snr_db=5.0, tau=1.0)
        obj, grads = two_node.objective_and_gradients(s)
        if init == "svd":
            x0 = svd_start(s, cfg.constraint)
        else:
            x0 = [init_gaussian(n, rng, cfg.constraint) for n in s.sizes]
        trace = ascend(obj, grads, x0, cfg)
        assert trace.converged, f"seed {seed} did not converge"
