import math
from fractions import Fraction

import numpy as np
import pytest

from rlnc_bounds.bounds import NetworkParams, lb_new, lb_old, ub_new, ub_old
from rlnc_bounds.fields import make_field
from rlnc_bounds.linalg import is_decodable
from rlnc_bounds.simulate import (StateSpaceExceeded, estimate_pfail,
                                  exact_pfail, sample_coefficient,
                                  sample_received_matrix, trial_rng)
from support import exact_pfail_full_joint


def P(n, m, q, esr, erd):
    return NetworkParams(n, m, q, esr, erd)


# ---------------------------------------------------------------------------
# coefficient sampling


def test_total_erasure_always_samples_zero():
    f = make_field(4)
    rng = np.random.default_rng(0)
    assert all(sample_coefficient(f, 1.0, rng) == 0 for _ in range(50))


def test_binary_no_erasure_always_samples_one():
    f = make_field(2)
    rng = np.random.default_rng(0)
    assert all(sample_coefficient(f, 0.0, rng) == 1 for _ in range(50))


def test_coefficient_frequencies_match_the_model():
    # 10^6 draws at eps_sr=0.5 over F_4: zero half the time, each nonzero 1/6
    f = make_field(4)
    rng = np.random.default_rng(123)
    n = 1_000_000
    counts = np.bincount([sample_coefficient(f, 0.5, rng) for _ in range(n)],
                         minlength=4)
    for value, want in enumerate([0.5, 1 / 6, 1 / 6, 1 / 6]):
        tol = 4.0 * math.sqrt(want * (1 - want) / n)
        assert abs(counts[value] / n - want) < tol, (value, counts[value] / n)


# ---------------------------------------------------------------------------
# matrix sampling


def test_full_relay_erasure_gives_empty_matrix():
    a = sample_received_matrix(P(3, 4, 2, 0.2, 1.0), np.random.default_rng(1))
    assert a.rows == 0 and a.cols == 3


def test_binary_perfect_channels_give_all_ones():
    a = sample_received_matrix(P(3, 4, 2, 0.0, 0.0), np.random.default_rng(1))
    assert a.rows == 4
    assert (a.entries == 1).all()


def test_mean_delivered_rows():
    p = P(2, 8, 2, 0.5, 0.3)
    rng = np.random.default_rng(5)
    n = 100_000
    total = sum(sample_received_matrix(p, rng).rows for _ in range(n))
    want = 8 * 0.7
    tol = 4.0 * math.sqrt(8 * 0.3 * 0.7 / n)
    assert abs(total / n - want) < tol


# ---------------------------------------------------------------------------
# exact oracle


def test_exact_single_source_squares_the_erasure():
    r = exact_pfail(P(1, 2, 2, 0.5, 0.0))
    assert r.p_fail == pytest.approx(0.25, abs=1e-15)


def test_exact_degenerate_all_ones_always_fails():
    r = exact_pfail(P(2, 2, 2, 0.0, 0.0))
    assert r.p_fail == 1.0


def test_exact_frozen_value_and_state_count():
    r = exact_pfail(P(2, 3, 2, 0.2, 0.1))
    assert r.p_fail == pytest.approx(float(Fraction(780893, 1953125)), abs=1e-15)
    assert r.state_count == 512  # 2^(3*2) matrices x 2^3 erasure patterns


def test_exact_guard_rejects_large_instances():
    with pytest.raises(StateSpaceExceeded):
        exact_pfail(P(3, 20, 64, 0.2, 0.1))


@pytest.mark.parametrize("n,m,q,esr,erd", [
    (2, 3, 2, 0.2, 0.1),
    (2, 2, 3, 0.25, 0.5),
    (1, 3, 2, 0.9, 0.25),
])
def test_exact_matches_full_joint_enumeration(n, m, q, esr, erd):
    f = make_field(q)
    want = exact_pfail_full_joint(f, n, m, Fraction(esr), Fraction(erd))
    got = exact_pfail(P(n, m, q, esr, erd))
    assert got.p_fail == pytest.approx(float(want), abs=1e-15)


def test_exact_sits_inside_all_bounds_on_a_small_grid():
    for (n, m) in ((1, 3), (2, 3), (2, 4)):
        for q in (2, 3):
            for esr in (0.0, 0.25, 0.9):
                for erd in (0.0, 0.5):
                    p = P(n, m, q, esr, erd)
                    ex = exact_pfail(p).p_fail
                    assert lb_new(p) - 1e-9 <= ex <= ub_new(p) + 1e-9
                    assert lb_old(p) - 1e-9 <= ex <= min(1.0, ub_old(p)) + 1e-9


# ---------------------------------------------------------------------------
# Monte Carlo estimator


def test_estimate_is_exactly_one_under_total_erasure():
    e = estimate_pfail(P(2, 3, 2, 1.0, 0.0), trials=2000, seed=9)
    assert e.failures == e.trials
    assert e.estimate == 1.0
    assert e.ci_low == e.ci_high == 1.0


def test_single_source_estimate_matches_closed_form():
    p = P(1, 5, 2, 0.3, 0.2)
    e = estimate_pfail(p, trials=100_000, seed=11)
    want = 0.44**5
    sigma = math.sqrt(want * (1 - want) / e.trials)
    assert abs(e.estimate - want) < 4 * sigma


def test_estimate_matches_exact_oracle():
    p = P(2, 3, 2, 0.2, 0.1)
    ex = exact_pfail(p).p_fail
    e = estimate_pfail(p, trials=100_000, seed=13)
    sigma = math.sqrt(ex * (1 - ex) / e.trials)
    assert abs(e.estimate - ex) < 4 * sigma
    assert e.ci_low <= e.estimate <= e.ci_high


def test_estimates_are_deterministic():
    p = P(3, 5, 4, 0.4, 0.2)
    a = estimate_pfail(p, trials=4000, seed=21)
    b = estimate_pfail(p, trials=4000, seed=21)
    assert a == b
    c = estimate_pfail(p, trials=4000, seed=22)
    assert c.failures != a.failures or c.seed != a.seed


def test_batch_partitioning_does_not_change_the_estimate():
    p = P(3, 6, 4, 0.5, 0.3)
    a = estimate_pfail(p, trials=3000, seed=5, batch_size=4096)
    b = estimate_pfail(p, trials=3000, seed=5, batch_size=7)
    c = estimate_pfail(p, trials=3000, seed=5, batch_size=1000)
    assert a == b == c


def test_batched_estimator_equals_per_trial_sampling():
    # the fast path must replay exactly the per-trial substream draws
    p = P(2, 4, 3, 0.3, 0.25)
    trials, seed = 1500, 17
    failures = sum(not is_decodable(sample_received_matrix(p, trial_rng(p, seed, t)))
                   for t in range(trials))
    assert estimate_pfail(p, trials, seed).failures == failures


def test_trials_must_be_positive():
    with pytest.raises(ValueError):
        estimate_pfail(P(1, 1, 2, 0.5, 0.5), trials=0)
