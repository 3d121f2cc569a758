import math

import numpy as np
import pytest

from qwskeleton import qwrw as qwrw_mod
from qwskeleton.coin import KET_L, hadamard
from qwskeleton.engine import iter_walk, run_walk
from qwskeleton.errors import ParityViolation, UndefinedTransitionReached
from qwskeleton.qwrw import (
    TransitionField,
    path_weight_transition,
    path_weight_transition_field,
    qwrw_marginal,
    sample_qwrw,
    transition_field,
    transition_fields,
)
from qwskeleton.sampling import total_variation

from conftest import random_coins, random_phi

SQ = 1 / math.sqrt(2)


def test_initial_field(had):
    f = transition_field(run_walk(had, KET_L, 0), had)
    assert f.at(0) == pytest.approx((0.5, 0.5, True), abs=1e-15)


def test_two_step_field_at_origin(had):
    st = run_walk(had, KET_L, 2)
    np.testing.assert_allclose(st.at(0), [0.5, 0.5], atol=1e-15)
    p, q, ok = transition_field(st, had).at(0)
    assert ok
    assert p == pytest.approx(1.0, abs=1e-15)
    assert q == pytest.approx(0.0, abs=1e-15)


def test_probabilities_sum_to_one(rng):
    for coin in random_coins(17, 5):
        phi = random_phi(rng)
        for st in iter_walk(coin, phi, 300):
            f = transition_field(st, coin)
            d = f.defined
            assert np.all(np.abs(f.p[d] + f.q[d] - 1) < 1e-12)
            assert np.all((f.p[d] >= 0) & (f.p[d] <= 1 + 1e-15))


def test_underflowed_sites_are_flagged(had):
    # mu at x = +-n is 2^-n for the Hadamard walk; 2^-1100 is far below the floor
    f = transition_field(run_walk(had, KET_L, 1100), had)
    assert not f.defined[0] and not f.defined[-1]
    assert f.p[0] == 0.5 and f.q[-1] == 0.5
    assert f.defined[len(f.p) // 2]


def test_gudder_route_hadamard(had):
    phi = np.array([SQ, 1j * SQ])
    for st in iter_walk(had, phi, 50):
        direct = transition_field(st, had)
        via = path_weight_transition_field(st.n, had, phi)
        np.testing.assert_allclose(via.p, direct.p, atol=1e-10)
        np.testing.assert_allclose(via.q, direct.q, atol=1e-10)


def test_gudder_route_random_coins(rng):
    for coin in random_coins(23, 6):
        phi = random_phi(rng)
        for n in (0, 1, 7, 30):
            direct = transition_field(run_walk(coin, phi, n), coin)
            via = path_weight_transition_field(n, coin, phi)
            np.testing.assert_allclose(via.p, direct.p, atol=1e-10)
        # the determinant phase drops out of the ratio
        other = coin.with_delta(0.3)
        np.testing.assert_allclose(
            path_weight_transition_field(12, other, phi).p,
            path_weight_transition_field(12, coin, phi).p,
            atol=1e-12,
        )


def test_path_weight_transition_scalar(had, rng):
    phi = random_phi(rng)
    p, q = path_weight_transition(0, 0, had, phi)
    assert p == pytest.approx(np.linalg.norm(had.P @ phi) ** 2, abs=1e-14)
    with pytest.raises(ParityViolation):
        path_weight_transition(3, 0, had, phi)


def test_marginal_small_cases(had):
    assert [list(v) for v in qwrw_marginal(had, KET_L, 0)] == [[1.0]]
    nu2 = qwrw_marginal(had, KET_L, 2)[2]
    np.testing.assert_allclose(nu2, [0.25, 0.5, 0.25], atol=1e-15)


def test_marginal_replicates_walk(rng):
    for coin in random_coins(29, 10):
        phi = random_phi(rng)
        nus = qwrw_marginal(coin, phi, 200)
        for st, nu in zip(iter_walk(coin, phi, 200), nus):
            assert np.max(np.abs(nu - st.mu)) < 1e-10
            assert abs(nu.sum() - 1) < 1e-10


def test_marginal_refuses_mass_on_undefined_site(had, monkeypatch):
    bad = [TransitionField(0, np.array([0.5]), np.array([0.5]), np.array([False]))]
    monkeypatch.setattr(qwrw_mod, "transition_fields", lambda *a: bad)
    with pytest.raises(UndefinedTransitionReached):
        qwrw_marginal(had, KET_L, 1)


def test_sampler_refuses_undefined_site(had):
    bad = [TransitionField(0, np.array([0.5]), np.array([0.5]), np.array([False]))]
    with pytest.raises(UndefinedTransitionReached):
        sample_qwrw(had, KET_L, 1, 10, 0, fields=bad)


def test_single_step_left_fraction(rng):
    coin = random_coins(31, 1)[0]
    phi = random_phi(rng)
    trials = 200_000
    batch = sample_qwrw(coin, phi, 1, trials, seed=5)
    p0 = np.linalg.norm(coin.P @ phi) ** 2
    sd = math.sqrt(trials * p0 * (1 - p0))
    assert abs(batch.endpoints[-1] - trials * p0) < 3 * sd


def test_seed_determinism_and_paths(had):
    a = sample_qwrw(had, KET_L, 20, 1000, seed=42, record_paths=True)
    b = sample_qwrw(had, KET_L, 20, 1000, seed=42, record_paths=True)
    c = sample_qwrw(had, KET_L, 20, 1000, seed=43)
    np.testing.assert_array_equal(a.counts, b.counts)
    np.testing.assert_array_equal(a.paths, b.paths)
    assert not np.array_equal(a.counts, c.counts)
    assert a.paths.shape == (1000, 21)
    assert np.all(a.paths[:, 0] == 0)
    assert np.all(np.abs(np.diff(a.paths, axis=1)) == 1)
    final = np.bincount((a.paths[:, -1] + 20) // 2, minlength=21)
    np.testing.assert_array_equal(final, a.counts)
    assert a.counts.sum() == 1000
    assert all((x - 20) % 2 == 0 for x in a.nonzero_endpoints())


def test_histogram_converges(had):
    phi = np.array([SQ, 1j * SQ])
    fields = transition_fields(had, phi, 100)
    mu = run_walk(had, phi, 100).mu
    big = sample_qwrw(had, phi, 100, 10**6, seed=1, threads=4, fields=fields)
    small = sample_qwrw(had, phi, 100, 10**4, seed=1, fields=fields)
    tv_big = total_variation(big.counts, mu)
    tv_small = total_variation(small.counts, mu)
    assert tv_big < 5e-3
    assert tv_big < tv_small
