import math
from collections import OrderedDict

import numpy as np
import pytest

from uavcache.errors import ConfigurationError
from uavcache.placement import (Catalog, PlacementVector, ee_softmax_scores,
                                feasible_s_pop_range, hitrate_objective,
                                hitrate_solver, lru_reference, mpcp,
                                mprc_optimize, mprc_probs, mprc_profile, rshr,
                                virtual_capacity, zipf_popularity)


class TestZipf:
    def test_uniform_at_zero_skew(self):
        cat = zipf_popularity(8, 0.0)
        assert cat.weights == pytest.approx(np.full(8, 1 / 8))

    def test_two_contents(self):
        cat = zipf_popularity(2, 1.0)
        assert cat.popularity == pytest.approx((2 / 3, 1 / 3))

    def test_normalized_and_decreasing(self):
        cat = zipf_popularity(20, 1.2)
        w = cat.weights
        assert w.sum() == pytest.approx(1.0, abs=1e-12)
        assert all(a > b for a, b in zip(w, w[1:]))

    def test_increasing_popularity_rejected(self):
        with pytest.raises(ConfigurationError):
            Catalog(size=3, skew=0.0, popularity=(0.2, 0.3, 0.5))


class TestPlacementVector:
    def test_box_violation(self):
        with pytest.raises(ConfigurationError):
            PlacementVector(probs=(1.2, 0.8), cache_size=2.0)

    def test_sum_violation(self):
        with pytest.raises(ConfigurationError):
            PlacementVector(probs=(0.5, 0.4), cache_size=2.0)

    def test_csv_rows(self):
        cat = zipf_popularity(3, 1.0)
        vec = PlacementVector.from_array([1.0, 0.5, 0.5], 2.0)
        rows = list(vec.to_csv_rows(cat))
        assert rows[0] == (1, cat.popularity[0], 1.0)
        assert len(rows) == 3


class TestMpcp:
    def test_basic(self):
        cat = zipf_popularity(5, 1.0)
        assert mpcp(cat, 2).probs == pytest.approx((1, 1, 0, 0, 0))

    def test_full_and_empty(self):
        cat = zipf_popularity(4, 0.5)
        assert mpcp(cat, 4).probs == pytest.approx((1, 1, 1, 1))
        assert mpcp(cat, 0).probs == pytest.approx((0, 0, 0, 0))


class TestMprc:
    def test_reference_vector(self):
        cat = zipf_popularity(5, 1.0)
        vec = mprc_probs(cat, 2, 1)
        assert vec.probs == pytest.approx((1.0, 0.25, 0.25, 0.25, 0.25))
        assert sum(vec.probs) == pytest.approx(2.0)

    def test_all_popular_equals_mpcp(self):
        cat = zipf_popularity(7, 0.8)
        assert mprc_probs(cat, 3, 3).probs == pytest.approx(mpcp(cat, 3).probs)

    def test_budget_identity_exhaustive(self):
        # The piecewise profile sums to S wherever the sliding window fits
        # (the branch ranges overlap outside the feasible split range).
        checked = 0
        for size in range(1, 13):
            for cache in range(0, size + 1):
                for s_pop in feasible_s_pop_range(size, cache):
                    p = mprc_profile(size, cache, s_pop)
                    assert p.sum() == pytest.approx(cache, abs=1e-9)
                    checked += 1
        assert checked > 250

    def test_box_constraint_on_feasible_range(self):
        for size in range(1, 13):
            for cache in range(0, size + 1):
                for s_pop in feasible_s_pop_range(size, cache):
                    vec = mprc_probs(zipf_popularity(size, 0.7), cache, s_pop)
                    assert np.all(vec.array <= 1.0 + 1e-12)

    def test_infeasible_split_rejected(self):
        cat = zipf_popularity(10, 0.5)
        with pytest.raises(ConfigurationError):
            mprc_probs(cat, 8, 0)  # randomized span 8 > 3 window positions


class TestMprcOptimize:
    def test_constant_objective_breaks_ties_popular(self):
        cat = zipf_popularity(6, 1.0)
        s_pop, placement = mprc_optimize(cat, 2, lambda p: 1.0)
        assert s_pop == 2
        assert placement.probs == pytest.approx(mpcp(cat, 2).probs)

    def test_prefers_first_content(self):
        cat = zipf_popularity(6, 1.0)
        s_pop, _ = mprc_optimize(cat, 2, lambda p: p.array[0])
        assert s_pop >= 1

    def test_matches_exhaustive_argmax(self):
        rng = np.random.default_rng(5)
        cat = zipf_popularity(6, 1.1)
        weights = rng.random(6)

        def ee_eval(placement):
            return float(weights @ placement.array)

        s_pop, placement = mprc_optimize(cat, 2, ee_eval)
        best = max(feasible_s_pop_range(6, 2),
                   key=lambda s: (ee_eval(mprc_probs(cat, 2, s)), s))
        assert s_pop == best
        assert placement.probs == pytest.approx(mprc_probs(cat, 2, best).probs)


def kkt_residual(weights, theta, placement):
    """Max multiplier spread across interior coordinates (optimality check)."""
    p = placement.array
    w = np.asarray(weights, dtype=float)
    interior = (p > 1e-9) & (p < 1 - 1e-9) & (w > 0)
    if interior.sum() < 2:
        return 0.0
    mult = w[interior] * theta * np.exp(-theta * p[interior])
    return float(mult.max() - mult.min()) / float(mult.max())


class TestHitrateSolver:
    def test_equal_weights_uniform(self):
        vec = hitrate_solver(np.full(10, 0.1), theta_cop=3.0, cache_size=4)
        assert vec.array == pytest.approx(np.full(10, 0.4), abs=1e-9)

    def test_small_theta_concentrates(self):
        w = zipf_popularity(10, 1.0).weights
        vec = hitrate_solver(w, theta_cop=0.05, cache_size=3)
        assert vec.array[:3] == pytest.approx(np.ones(3), abs=1e-6)
        assert vec.array[4:] == pytest.approx(np.zeros(6), abs=1e-6)

    def test_large_theta_spreads(self):
        w = zipf_popularity(10, 1.0).weights
        vec = hitrate_solver(w, theta_cop=500.0, cache_size=3)
        assert np.all(vec.array > 0.2)
        assert vec.array.max() - vec.array.min() < 0.05

    def test_kkt_residual(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            f = int(rng.integers(4, 30))
            w = rng.random(f) + 0.01
            theta = float(rng.uniform(0.5, 30.0))
            s = int(rng.integers(1, f))
            vec = hitrate_solver(w, theta, s)
            assert vec.array.sum() == pytest.approx(s, abs=1e-8)
            assert kkt_residual(w, theta, vec) <= 1e-8

    def test_brute_force_grid_f3(self):
        w = np.array([0.5, 0.3, 0.2])
        theta = 1.0
        vec = hitrate_solver(w, theta, 1)
        # Exhaustive 1e-3 grid over the two free coordinates.
        g = np.arange(0, 1.0001, 1e-3)
        p1, p2 = np.meshgrid(g, g, indexing="ij")
        p3 = 1.0 - p1 - p2
        valid = (p3 >= 0) & (p3 <= 1)
        obj = np.where(valid,
                       w[0] * (1 - np.exp(-theta * p1))
                       + w[1] * (1 - np.exp(-theta * p2))
                       + w[2] * (1 - np.exp(-theta * np.where(valid, p3, 0))),
                       -np.inf)
        best = np.unravel_index(np.argmax(obj), obj.shape)
        grid_best = np.array([p1[best], p2[best], p3[best]])
        assert hitrate_objective(w, theta, vec) >= obj[best] - 1e-9
        assert np.max(np.abs(vec.array - grid_best)) <= 2e-3

    def test_dominates_mpcp_and_uniform(self):
        rng = np.random.default_rng(23)
        for _ in range(8):
            f = int(rng.integers(5, 25))
            s = int(rng.integers(1, f))
            kappa = float(rng.uniform(0.0, 1.6))
            theta = float(rng.uniform(0.2, 40.0))
            cat = zipf_popularity(f, kappa)
            solved = hitrate_solver(cat.weights, theta, s)
            best = hitrate_objective(cat.weights, theta, solved)
            for rival in (mpcp(cat, s),
                          PlacementVector.from_array(np.full(f, s / f), s)):
                assert best >= hitrate_objective(cat.weights, theta, rival) \
                    - 1e-9

    def test_all_zero_weights(self):
        with pytest.warns(RuntimeWarning):
            vec = hitrate_solver(np.zeros(5), 2.0, 2)
        assert vec.array == pytest.approx(np.full(5, 0.4))

    def test_sparse_positive_weights(self):
        vec = hitrate_solver(np.array([1.0, 0.0, 0.0, 0.0]), 2.0, 3)
        assert vec.array[0] == pytest.approx(1.0)
        assert vec.array[1:] == pytest.approx(np.full(3, 2 / 3))


class TestSoftmaxScores:
    def test_shift_invariance_exact(self):
        eta = np.array([0.25, 1.5, 0.75, 2.0])
        shifted = ee_softmax_scores(eta + 2.0, gain=5.0)
        assert np.array_equal(ee_softmax_scores(eta, gain=5.0), shifted)

    def test_scale_invariance(self):
        eta = np.array([1.0, 3.0, 2.0])
        assert ee_softmax_scores(eta, 4.0) == pytest.approx(
            ee_softmax_scores(10.0 * eta, 4.0))

    def test_flat_input_uniform(self):
        scores = ee_softmax_scores(np.full(6, 3.3), 4.0)
        assert scores == pytest.approx(np.full(6, 1 / 6))

    def test_distribution(self):
        scores = ee_softmax_scores(np.array([0.0, 1.0, 2.0]), 3.0)
        assert scores.sum() == pytest.approx(1.0)
        assert scores[2] > scores[1] > scores[0]


class TestRshr:
    def test_single_iteration_is_hitrate(self):
        cat = zipf_popularity(12, 0.9)
        theta = 8.0
        result = rshr(cat, 4, theta, lambda p: p, max_iter=1)
        reference = hitrate_solver(cat.weights, theta, 4)
        assert result.placement.array == pytest.approx(reference.array)
        assert result.iterations == 1

    def test_constant_ee_fixed_point(self):
        cat = zipf_popularity(10, 1.0)
        theta = 6.0
        result = rshr(cat, 3, theta, lambda p: 1.0, max_iter=20)
        reference = hitrate_solver(cat.weights, theta, 3)
        assert result.converged
        assert result.iterations <= 3
        assert result.placement.array == pytest.approx(reference.array)

    def test_objective_history_recorded(self):
        cat = zipf_popularity(10, 1.0)
        result = rshr(cat, 3, 25.0, lambda p: math.log1p(3 * p), max_iter=25)
        assert len(result.objectives) == result.iterations
        assert result.objectives[-1] >= result.objectives[0] - 1e-12

    def test_non_finite_ee_aborts(self):
        cat = zipf_popularity(6, 1.0)
        calls = {"n": 0}

        def flaky(p):
            calls["n"] += 1
            return math.nan if calls["n"] > 6 else p

        result = rshr(cat, 2, 5.0, flaky, max_iter=10)
        assert result.aborted
        assert "non-finite" in result.note
        assert isinstance(result.placement, PlacementVector)

    def test_invalid_max_iter(self):
        with pytest.raises(ConfigurationError):
            rshr(zipf_popularity(4, 1.0), 2, 5.0, lambda p: p, max_iter=0)


def simulate_lru_occupancy(weights, cache_size, requests, warmup, seed):
    """Trace-driven LRU: per-content hit frequency at request instants."""
    rng = np.random.default_rng(seed)
    draws = rng.choice(len(weights), size=warmup + requests, p=weights)
    cache = OrderedDict()
    hits = np.zeros(len(weights))
    counts = np.zeros(len(weights))
    for i, c in enumerate(draws):
        c = int(c)
        measuring = i >= warmup
        if measuring:
            counts[c] += 1
        if c in cache:
            cache.move_to_end(c)
            if measuring:
                hits[c] += 1
        else:
            cache[c] = True
            if len(cache) > cache_size:
                cache.popitem(last=False)
    with np.errstate(invalid="ignore"):
        return np.where(counts > 0, hits / counts, 0.0)


class TestLruReference:
    def test_uniform_popularity(self):
        cat = zipf_popularity(10, 0.0)
        vec = lru_reference(cat, 4)
        assert vec.array == pytest.approx(np.full(10, 0.4), abs=1e-9)

    def test_high_skew_concentrates(self):
        cat = zipf_popularity(20, 3.0)
        vec = lru_reference(cat, 5)
        assert vec.array[0] > 0.99
        assert vec.array[-1] < 5 / 20

    def test_edge_budgets(self):
        cat = zipf_popularity(6, 1.0)
        assert lru_reference(cat, 0).array == pytest.approx(np.zeros(6))
        assert lru_reference(cat, 6).array == pytest.approx(np.ones(6))

    def test_trace_driven_oracle(self):
        cat = zipf_popularity(50, 1.2)
        vec = lru_reference(cat, 10)
        occupancy = simulate_lru_occupancy(cat.weights, 10,
                                           requests=1_200_000,
                                           warmup=200_000, seed=17)
        assert np.max(np.abs(vec.array - occupancy)) <= 0.02


class TestVirtualCapacity:
    def test_zero(self):
        assert virtual_capacity(0.0, 2.0) == 0.0

    def test_strictly_increasing(self):
        grid = np.linspace(0.0, 1.0, 21)
        vals = [virtual_capacity(float(p), 2.0) for p in grid]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_requires_theta_above_one(self):
        with pytest.raises(ConfigurationError):
            virtual_capacity(0.5, 1.0)
