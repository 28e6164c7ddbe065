import numpy as np
import pytest

from qubotomo import (
    QuboModel,
    SolveConfig,
    anneal,
    auto_temperature,
    brute_force,
    energy,
)


def random_model(rng, n=16, density=1.0):
    linear = {}
    for v in range(n):
        c = rng.uniform(-2, 2)
        if c != 0.0:
            linear[v] = c
    quadratic = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() <= density:
                c = rng.uniform(-2, 2)
                if c != 0.0:
                    quadratic[(i, j)] = c
    return QuboModel(num_vars=n, linear=linear, quadratic=quadratic)


TWO_PIXEL_RAY = QuboModel(
    num_vars=2, linear={0: -3.0, 1: -3.0}, quadratic={(0, 1): 2.0}
)


class TestBruteForce:
    def test_single_variable(self):
        res = brute_force(QuboModel(num_vars=1, linear={0: -1.0}))
        np.testing.assert_array_equal(res.best_bits, [1])
        assert res.best_energy == -1.0

    def test_two_pixel_ray_model(self):
        res = brute_force(TWO_PIXEL_RAY)
        np.testing.assert_array_equal(res.best_bits, [1, 1])
        assert res.best_energy == -4.0

    def test_empty_model(self):
        res = brute_force(QuboModel(num_vars=0))
        assert res.best_bits.size == 0
        assert res.best_energy == 0.0

    def test_refuses_large_models(self):
        with pytest.raises(ValueError, match="24"):
            brute_force(QuboModel(num_vars=25))

    def test_lexicographic_tie_break(self):
        # constant-zero landscape: every assignment ties at 0
        res = brute_force(QuboModel(num_vars=3))
        np.testing.assert_array_equal(res.best_bits, [0, 0, 0])

    def test_matches_exhaustive_oracle(self, rng):
        import itertools

        model = random_model(rng, n=8)
        res = brute_force(model)
        oracle = min(
            energy(model, np.array(b, dtype=np.uint8))
            for b in itertools.product((0, 1), repeat=8)
        )
        assert abs(res.best_energy - oracle) < 1e-12
        assert abs(energy(model, res.best_bits) - res.best_energy) < 1e-12


class TestAutoTemperature:
    def test_single_linear(self):
        t0, t1 = auto_temperature(QuboModel(num_vars=1, linear={0: -1.0}))
        assert t0 == 1.0 and t1 == 1e-3

    def test_two_pixel_ray_model(self):
        t0, t1 = auto_temperature(TWO_PIXEL_RAY)
        assert t0 == 5.0 and t1 == 2e-3

    def test_homogeneous_scaling(self):
        scaled = QuboModel(
            num_vars=2, linear={0: -30.0, 1: -30.0}, quadratic={(0, 1): 20.0}
        )
        t0, t1 = auto_temperature(TWO_PIXEL_RAY)
        s0, s1 = auto_temperature(scaled)
        assert abs(s0 - 10 * t0) < 1e-12 and abs(s1 - 10 * t1) < 1e-12

    def test_empty_model_rejected(self):
        with pytest.raises(ValueError):
            auto_temperature(QuboModel(num_vars=0))


class TestAnneal:
    def test_single_improving_flip(self):
        model = QuboModel(num_vars=1, linear={0: -1.0})
        res = anneal(model, SolveConfig(restarts=1, sweeps=5, seed=0))
        assert res.best_energy == -1.0

    def test_matches_oracle_on_random_models(self):
        hits = 0
        for inst in range(30):
            rng = np.random.default_rng(inst)
            model = random_model(rng, n=16)
            bf = brute_force(model)
            res = anneal(model, SolveConfig(restarts=50, sweeps=200, seed=inst))
            hits += abs(res.best_energy - bf.best_energy) < 1e-9
        assert hits >= 29

    def test_deterministic(self, rng):
        model = random_model(rng, n=12)
        cfg = SolveConfig(restarts=5, sweeps=100, seed=9)
        a = anneal(model, cfg)
        b = anneal(model, SolveConfig(restarts=5, sweeps=100, seed=9))
        np.testing.assert_array_equal(a.best_bits, b.best_bits)
        assert a.best_energy == b.best_energy
        assert a.restart_energies == b.restart_energies

    def test_thread_count_does_not_change_result(self, rng):
        model = random_model(rng, n=12)
        a = anneal(model, SolveConfig(restarts=6, sweeps=100, seed=3, threads=1))
        b = anneal(model, SolveConfig(restarts=6, sweeps=100, seed=3, threads=3))
        np.testing.assert_array_equal(a.best_bits, b.best_bits)
        assert a.restart_energies == b.restart_energies

    def test_best_energy_consistent_with_bits(self, rng):
        model = random_model(rng, n=14)
        res = anneal(model, SolveConfig(restarts=3, sweeps=50, seed=2))
        assert abs(res.best_energy - energy(model, res.best_bits)) < 1e-9
        assert res.best_energy == min(res.restart_energies)

    def test_never_worse_than_all_zero_start(self, rng):
        for inst in range(10):
            gen = np.random.default_rng(100 + inst)
            model = random_model(gen, n=10)
            res = anneal(model, SolveConfig(restarts=1, sweeps=3, seed=inst))
            zero_energy = energy(model, np.zeros(10, dtype=np.uint8))
            assert res.best_energy <= zero_energy + 1e-12

    def test_monotone_in_restarts(self, rng):
        model = random_model(rng, n=12)
        prev = np.inf
        for restarts in (1, 3, 6, 12):
            res = anneal(model, SolveConfig(restarts=restarts, sweeps=60, seed=4))
            assert res.best_energy <= prev + 1e-12
            prev = res.best_energy

    def test_incremental_delta_matches_energy_difference(self, rng):
        # the kernel's flip rule: delta = +-(linear[v] + sum of active couplings)
        from qubotomo.solver import _adjacency, _coefficient_arrays

        model = random_model(rng, n=10)
        lin = _coefficient_arrays(model)[0]
        indptr, nbr, nbr_w = _adjacency(model)
        for _ in range(50):
            bits = rng.integers(0, 2, 10).astype(np.uint8)
            v = int(rng.integers(0, 10))
            field = lin[v]
            for p in range(indptr[v], indptr[v + 1]):
                field += nbr_w[p] * bits[nbr[p]]
            delta = field if bits[v] == 0 else -field
            flipped = bits.copy()
            flipped[v] ^= 1
            exact = energy(model, flipped) - energy(model, bits)
            assert abs(delta - exact) < 1e-6 * max(1.0, abs(exact))

    def test_time_budget_returns_best_so_far(self, rng):
        model = random_model(rng, n=12)
        res = anneal(
            model, SolveConfig(restarts=500, sweeps=200, seed=0, time_budget=0.05)
        )
        assert 1 <= len(res.restart_energies) <= 500
        assert abs(res.best_energy - energy(model, res.best_bits)) < 1e-9

    def test_coefficient_free_model(self):
        res = anneal(QuboModel(num_vars=3, offset=2.0), SolveConfig(restarts=2, sweeps=5))
        assert res.best_energy == 2.0

    def test_result_json(self, rng):
        model = random_model(rng, n=4)
        res = anneal(model, SolveConfig(restarts=2, sweeps=10, seed=1))
        import json

        doc = json.loads(res.to_json())
        assert set(doc) == {"energy", "bits", "restart_energies", "elapsed_ms"}
        assert len(doc["bits"]) == 4
        doc = json.loads(res.to_json(include_elapsed=False))
        assert "elapsed_ms" not in doc


class TestSolveConfigValidation:
    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            SolveConfig(restarts=0)
        with pytest.raises(ValueError):
            SolveConfig(sweeps=0)

    def test_rejects_inverted_temperatures(self):
        with pytest.raises(ValueError):
            SolveConfig(initial_temperature=0.1, final_temperature=1.0)
