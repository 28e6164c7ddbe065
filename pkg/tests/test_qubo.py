import itertools

import numpy as np
import pytest

from qubotomo import (
    QuboModel,
    build_system_matrix,
    combine,
    default_geometry,
    encode_image,
    energy,
    export_model,
    fidelity_qubo,
    forward_project,
    import_model,
    mac_difference_scheme,
    mac_scheme,
    tv_qubo,
    variable_map,
)
from qubotomo.errors import ParseError
from qubotomo.geometry import ProjectionGeometry, SystemMatrix
from qubotomo.metrics import tv_squared
from scipy.sparse import csr_matrix
from tests.conftest import smooth_phantom


def manual_system_matrix(rows, n_pixels, geom):
    """Build a SystemMatrix from explicit (pixel, weight) ray lists."""
    data, indices, indptr = [], [], [0]
    for row in rows:
        for pix, w in row:
            indices.append(pix)
            data.append(w)
        indptr.append(len(indices))
    mat = csr_matrix((data, indices, indptr), shape=(len(rows), n_pixels))
    return SystemMatrix(geometry=geom, matrix=mat)


def brute_min(model):
    """Oracle: minimum energy by enumerating every assignment."""
    best = np.inf
    best_bits = None
    for bits in itertools.product((0, 1), repeat=model.num_vars):
        e = energy(model, np.array(bits, dtype=np.uint8))
        if e < best:
            best, best_bits = e, bits
    return best, best_bits


class TestFidelityQubo:
    def test_single_pixel_single_ray(self):
        # hand expansion: (q - 1)^2 - 1 = -q
        geom = ProjectionGeometry(1, 1, (0.0,), 1)
        sm = manual_system_matrix([[(0, 1.0)]], 1, geom)
        scheme = mac_scheme((1.0,))
        model = fidelity_qubo(np.array([[1.0]]), sm, scheme, variable_map((1, 1), scheme))
        assert model.linear == {0: -1.0}
        assert model.quadratic == {}
        assert model.offset == 0.0
        assert energy(model, np.array([1])) == -1.0

    def test_zero_sinogram_minimum_at_zero(self):
        geom = ProjectionGeometry(2, 1, (0.0,), 2)
        sm = manual_system_matrix([[(0, 1.0)], [(1, 1.0)]], 2, geom)
        scheme = mac_scheme((1.0,))
        model = fidelity_qubo(np.zeros((1, 2)), sm, scheme, variable_map((1, 2), scheme))
        assert all(c >= 0 for c in model.linear.values())
        best, bits = brute_min(model)
        assert best == 0.0 and bits == (0, 0)

    def test_two_pixels_one_ray(self):
        # (q0 + q_fit - 2)^2 - 4 expands to -3 q0 - 3 q_fit + 2 q0 q_fit
        geom = ProjectionGeometry(2, 1, (0.0,), 1)
        sm = manual_system_matrix([[(0, 1.0), (1, 1.0)]], 2, geom)
        scheme = mac_scheme((1.0,))
        model = fidelity_qubo(np.array([[2.0]]), sm, scheme, variable_map((1, 2), scheme))
        assert model.linear == {0: -3.0, 1: -3.0}
        assert model.quadratic == {(0, 1): 2.0}
        best, bits = brute_min(model)
        assert best == -4.0 and bits == (1, 1)

    def test_ground_truth_energy_is_negative_sino_norm(self, rng):
        for levels in ((1.0,), (1.0, 2.0, 3.0)):
            ph = smooth_phantom(rng, 8, levels)
            geom = default_geometry(8, 8, 3)
            sm = build_system_matrix(geom)
            sino = forward_project(ph, sm)
            scheme = mac_difference_scheme(levels)
            vmap = variable_map(ph.shape, scheme)
            model = fidelity_qubo(sino, sm, scheme, vmap)
            e = energy(model, encode_image(ph, scheme))
            expected = -(sino ** 2).sum()
            assert abs(e - expected) <= 1e-6 * abs(expected)

    def test_ground_truth_identity_holds_for_every_encoding(self, rng):
        from qubotomo import radix2_scheme

        levels = (1.0, 2.0, 3.0)
        ph = smooth_phantom(rng, 6, levels)
        geom = default_geometry(6, 6, 3)
        sm = build_system_matrix(geom)
        sino = forward_project(ph, sm)
        expected = -(sino ** 2).sum()
        for scheme in (
            mac_scheme(levels),
            mac_difference_scheme(levels),
            radix2_scheme(0, 1),  # integer pixel values 0..3
        ):
            vmap = variable_map(ph.shape, scheme)
            bits = encode_image(ph, scheme)
            e = energy(fidelity_qubo(sino, sm, scheme, vmap), bits)
            assert abs(e - expected) <= 1e-6 * abs(expected)

    def test_dimension_mismatch(self):
        geom = default_geometry(4, 4, 2)
        sm = build_system_matrix(geom)
        scheme = mac_scheme((1.0,))
        with pytest.raises(ValueError):
            fidelity_qubo(np.zeros((3, 3)), sm, scheme, variable_map((4, 4), scheme))


class TestTvQubo:
    def test_single_pixel_empty_model(self):
        scheme = mac_scheme((1.0,))
        model = tv_qubo(scheme, variable_map((1, 1), scheme))
        assert model.linear == {} and model.quadratic == {}
        assert energy(model, np.array([1])) == 0.0

    def test_two_pixel_pair_energies(self):
        # (q0 - q_fit)^2 over the four assignments: 0, 1, 1, 0
        scheme = mac_scheme((1.0,))
        model = tv_qubo(scheme, variable_map((1, 2), scheme))
        assert model.linear == {0: 1.0, 1: 1.0}
        assert model.quadratic == {(0, 1): -2.0}
        energies = [
            energy(model, np.array(b)) for b in ((0, 0), (0, 1), (1, 0), (1, 1))
        ]
        assert energies == [0.0, 1.0, 1.0, 0.0]

    def test_constant_image_scores_zero(self, rng):
        levels = (1.0, 2.0, 3.0)
        scheme = mac_difference_scheme(levels)
        for size in (2, 4, 7):
            vmap = variable_map((size, size), scheme)
            model = tv_qubo(scheme, vmap)
            img = np.full((size, size), 2.0)
            assert energy(model, encode_image(img, scheme)) == 0.0

    def test_matches_direct_tv_on_ground_truth(self, rng):
        levels = (1.0, 2.0, 3.0)
        scheme = mac_difference_scheme(levels)
        for _ in range(5):
            ph = smooth_phantom(rng, 7, levels)
            vmap = variable_map(ph.shape, scheme)
            model = tv_qubo(scheme, vmap)
            e = energy(model, encode_image(ph, scheme))
            assert abs(e - tv_squared(ph)) < 1e-9

    def test_quadratic_entry_count_bound(self):
        levels = (1.0, 2.0, 3.0)
        scheme = mac_difference_scheme(levels)
        vmap = variable_map((5, 6), scheme)
        model = tv_qubo(scheme, vmap)
        bpp = 3
        pairs = 5 * (6 - 1) + 6 * (5 - 1)
        pixels = 30
        bound = pairs * bpp ** 2 + pixels * (bpp * (bpp - 1) // 2)
        assert len(model.quadratic) <= bound


class TestCombine:
    def _models(self, rng):
        levels = (1.0, 2.0)
        ph = smooth_phantom(rng, 4, levels)
        geom = default_geometry(4, 4, 3)
        sm = build_system_matrix(geom)
        sino = forward_project(ph, sm)
        scheme = mac_difference_scheme(levels)
        vmap = variable_map(ph.shape, scheme)
        return fidelity_qubo(sino, sm, scheme, vmap), tv_qubo(scheme, vmap)

    def test_identity_weights(self, rng):
        q_fit, q_tv = self._models(rng)
        c = combine(q_fit, q_tv, 1.0, 0.0)
        assert c.linear == q_fit.linear and c.quadratic == q_fit.quadratic

    def test_pure_scaling(self, rng):
        q_fit, q_tv = self._models(rng)
        c = combine(q_fit, q_tv, 0.0, 2.0)
        assert c.linear == {k: 2 * v for k, v in q_tv.linear.items()}
        assert c.quadratic == {k: 2 * v for k, v in q_tv.quadratic.items()}

    def test_energy_linearity(self, rng):
        q_fit, q_tv = self._models(rng)
        c = combine(q_fit, q_tv, 1.0, 2.0)
        gen = np.random.default_rng(5)
        for _ in range(10):
            bits = gen.integers(0, 2, q_fit.num_vars).astype(np.uint8)
            lhs = energy(c, bits)
            rhs = energy(q_fit, bits) + 2.0 * energy(q_tv, bits)
            assert abs(lhs - rhs) < 1e-9

    def test_variable_count_mismatch(self):
        with pytest.raises(ValueError):
            combine(QuboModel(num_vars=2), QuboModel(num_vars=3), 1, 1)

    def test_zero_results_pruned(self):
        a = QuboModel(num_vars=2, linear={0: 1.0}, quadratic={(0, 1): 1.0})
        b = QuboModel(num_vars=2, linear={0: 1.0}, quadratic={(0, 1): -1.0})
        c = combine(a, b, 1.0, 1.0)
        assert c.quadratic == {}
        assert c.linear == {0: 2.0}


class TestEnergy:
    def test_empty_model(self):
        assert energy(QuboModel(num_vars=0), np.empty(0, dtype=np.uint8)) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            energy(QuboModel(num_vars=3), np.array([0, 1]))

    def test_ground_truth_combined_energy(self, rng):
        # independent oracle: -sum P^2 from the sinogram, squared neighbor
        # differences straight from the image
        ph = smooth_phantom(rng, 4, (1.0,))
        geom = default_geometry(4, 4, 3)
        sm = build_system_matrix(geom)
        sino = forward_project(ph, sm)
        scheme = mac_difference_scheme((1.0,))
        vmap = variable_map(ph.shape, scheme)
        q = combine(
            fidelity_qubo(sino, sm, scheme, vmap), tv_qubo(scheme, vmap), 1.0, 1.0
        )
        bits = encode_image(ph, scheme)
        dh = np.diff(ph, axis=1)
        dv = np.diff(ph, axis=0)
        expected = -(sino ** 2).sum() + (dh ** 2).sum() + (dv ** 2).sum()
        assert abs(energy(q, bits) - expected) <= 1e-6 * abs(expected)


class TestModelIO:
    def test_empty_model_document(self, tmp_path):
        path = tmp_path / "empty.json"
        export_model(QuboModel(num_vars=0), path)
        assert (
            path.read_text()
            == '{"num_vars":0,"offset":0.0,"linear":[],"quadratic":[]}\n'
        )
        loaded = import_model(path)
        assert loaded.num_vars == 0

    def test_roundtrip_random_model(self, tmp_path, rng):
        linear = {int(v): float(c) for v, c in enumerate(rng.normal(size=50)) if c}
        quadratic = {}
        for _ in range(200):
            i, j = sorted(rng.integers(0, 50, 2))
            if i != j:
                quadratic[(int(i), int(j))] = float(rng.normal())
        model = QuboModel(num_vars=50, linear=linear, quadratic=quadratic, offset=1.5)
        path = tmp_path / "model.json"
        export_model(model, path)
        loaded = import_model(path)
        assert loaded.num_vars == model.num_vars
        assert loaded.offset == model.offset
        assert loaded.linear == model.linear
        assert loaded.quadratic == model.quadratic

    def test_export_deterministic(self, tmp_path, rng):
        model = QuboModel(num_vars=4, linear={1: 0.25}, quadratic={(0, 3): -1.0})
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        export_model(model, a)
        export_model(model, b)
        assert a.read_bytes() == b.read_bytes()

    def test_import_rejects_lower_triangle(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"num_vars":3,"offset":0.0,"linear":[],"quadratic":[[2,1,1.0]]}')
        with pytest.raises(ParseError):
            import_model(path)

    def test_import_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            import_model(path)
