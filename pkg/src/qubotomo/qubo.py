"""QUBO assembly: data-fidelity term, total-variation term, combination.

A model stores linear coefficients, strictly upper-triangular quadratic
coefficients, and a constant offset:

    E(q) = offset + sum_v linear[v] q_v + sum_{i<j} quadratic[i,j] q_i q_j

The data-fidelity term expands sum_rays (sum_v w_v q_v - P)^2 - P^2 with
w_v = chord_length * bit_coefficient; the squared measurement constants
cancel against the subtracted P^2, so its offset is zero and a bitstring
that reproduces the sinogram exactly scores -sum P^2. The TV term sums
(pixel - neighbor)^2 over all horizontally and vertically adjacent pairs,
expanded with q^2 = q.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix

from .encoding import coefficients
from .errors import ParseError


@dataclass
class QuboModel:
    num_vars: int
    linear: dict = field(default_factory=dict)
    quadratic: dict = field(default_factory=dict)
    offset: float = 0.0

    def validate(self):
        for v, c in self.linear.items():
            if not (0 <= v < self.num_vars):
                raise ValueError(f"linear index {v} out of range")
            if not np.isfinite(c):
                raise ValueError(f"non-finite linear coefficient at {v}")
            if c == 0.0:
                raise ValueError(f"stored zero linear coefficient at {v}")
        for (i, j), c in self.quadratic.items():
            if not (0 <= i < j < self.num_vars):
                raise ValueError(f"quadratic key ({i}, {j}) is not upper-triangular")
            if not np.isfinite(c):
                raise ValueError(f"non-finite quadratic coefficient at ({i}, {j})")
            if c == 0.0:
                raise ValueError(f"stored zero quadratic coefficient at ({i}, {j})")
        if not np.isfinite(self.offset):
            raise ValueError("non-finite offset")
        return self


def _set_pruned(target, key, value):
    if value != 0.0:
        target[key] = value


def fidelity_qubo(sino, sm, scheme, vmap):
    """Data-fidelity model: penalize deviation from the measured sinogram.

    Per ray with weights w and measurement P, the expansion contributes
    w_v^2 - 2 P w_v to linear[v] and 2 w_u w_v to quadratic[u < v]; the
    offset stays zero by cancellation.
    """
    sino = np.asarray(sino, dtype=np.float64)
    geom = sm.geometry
    if sino.shape != (geom.n_angles, geom.detector_bins):
        raise ValueError(
            f"sinogram shape {sino.shape} does not match geometry "
            f"({geom.n_angles}, {geom.detector_bins})"
        )
    if (vmap.width, vmap.height) != (geom.image_width, geom.image_height):
        raise ValueError("variable map does not match the projection geometry")
    coeffs = coefficients(scheme)
    bpp = vmap.bits_per_pixel
    if bpp != coeffs.size:
        raise ValueError("variable map bits_per_pixel does not match the scheme")
    n = vmap.total_vars

    lin = np.zeros(n)
    pair_i, pair_j, pair_c = [], [], []
    measurements = sino.ravel()
    bit_range = np.arange(bpp, dtype=np.int64)
    for ray in range(sm.n_rays):
        lo, hi = sm.matrix.indptr[ray], sm.matrix.indptr[ray + 1]
        if lo == hi:
            continue
        pix = sm.matrix.indices[lo:hi].astype(np.int64)
        chords = sm.matrix.data[lo:hi]
        v_idx = (pix[:, None] * bpp + bit_range[None, :]).ravel()
        w = (chords[:, None] * coeffs[None, :]).ravel()
        p = measurements[ray]
        lin[v_idx] += w * w - 2.0 * p * w
        iu, iv = np.triu_indices(v_idx.size, k=1)
        pair_i.append(v_idx[iu])
        pair_j.append(v_idx[iv])
        pair_c.append(2.0 * w[iu] * w[iv])

    quad = {}
    if pair_i:
        acc = coo_matrix(
            (np.concatenate(pair_c),
             (np.concatenate(pair_i), np.concatenate(pair_j))),
            shape=(n, n),
        ).tocsr()
        acc.sum_duplicates()
        acc = acc.tocoo()
        for i, j, c in zip(acc.row, acc.col, acc.data):
            _set_pruned(quad, (int(i), int(j)), float(c))
    linear = {}
    for v in np.nonzero(lin)[0]:
        linear[int(v)] = float(lin[v])
    return QuboModel(num_vars=n, linear=linear, quadratic=quad).validate()


def tv_qubo(scheme, vmap):
    """Smoothness model: squared difference of every adjacent pixel pair.

    For each pair, every bit gains coeff_k^2 linearly, bits within one
    pixel couple by +2 c_{k1} c_{k2}, and bits across the pair couple by
    -2 c_{k1} c_{k2}.
    """
    coeffs = coefficients(scheme)
    bpp = vmap.bits_per_pixel
    if bpp != coeffs.size:
        raise ValueError("variable map bits_per_pixel does not match the scheme")
    n = vmap.total_vars

    lin = np.zeros(n)
    quad = {}

    def add_quad(u, v, value):
        key = (u, v) if u < v else (v, u)
        quad[key] = quad.get(key, 0.0) + value

    pairs = []
    for i in range(vmap.height):          # horizontal neighbors, row-major
        for j in range(vmap.width - 1):
            pairs.append((i * vmap.width + j, i * vmap.width + j + 1))
    for i in range(vmap.height - 1):      # vertical neighbors
        for j in range(vmap.width):
            pairs.append((i * vmap.width + j, (i + 1) * vmap.width + j))

    for p, p2 in pairs:
        base, base2 = p * bpp, p2 * bpp
        for k in range(bpp):
            lin[base + k] += coeffs[k] ** 2
            lin[base2 + k] += coeffs[k] ** 2
        for k1 in range(bpp):
            for k2 in range(k1 + 1, bpp):
                cross = 2.0 * coeffs[k1] * coeffs[k2]
                add_quad(base + k1, base + k2, cross)
                add_quad(base2 + k1, base2 + k2, cross)
        for k1 in range(bpp):
            for k2 in range(bpp):
                add_quad(base + k1, base2 + k2, -2.0 * coeffs[k1] * coeffs[k2])

    linear = {int(v): float(lin[v]) for v in np.nonzero(lin)[0]}
    quad = {k: v for k, v in sorted(quad.items()) if v != 0.0}
    return QuboModel(num_vars=n, linear=linear, quadratic=quad).validate()


def combine(first, second, a, b):
    """Coefficient-wise linear combination a*first + b*second, zeros pruned."""
    if first.num_vars != second.num_vars:
        raise ValueError(
            f"variable counts differ: {first.num_vars} vs {second.num_vars}"
        )
    linear = {}
    for v in sorted(set(first.linear) | set(second.linear)):
        _set_pruned(
            linear, v, a * first.linear.get(v, 0.0) + b * second.linear.get(v, 0.0)
        )
    quadratic = {}
    for key in sorted(set(first.quadratic) | set(second.quadratic)):
        _set_pruned(
            quadratic, key,
            a * first.quadratic.get(key, 0.0) + b * second.quadratic.get(key, 0.0),
        )
    return QuboModel(
        num_vars=first.num_vars,
        linear=linear,
        quadratic=quadratic,
        offset=a * first.offset + b * second.offset,
    )


def energy(model, bits):
    """Evaluate offset + linear . bits + sum of active quadratic couplings."""
    bits = np.asarray(bits)
    if bits.ndim != 1 or bits.size != model.num_vars:
        raise ValueError(f"expected {model.num_vars} bits, got {bits.size}")
    total = model.offset
    for v, c in model.linear.items():
        if bits[v]:
            total += c
    for (i, j), c in model.quadratic.items():
        if bits[i] and bits[j]:
            total += c
    return total


def export_model(model, path):
    """JSON with index-sorted coefficient lists; round-trips exactly."""
    model.validate()
    doc = {
        "num_vars": model.num_vars,
        "offset": float(model.offset),
        "linear": [[int(v), float(c)] for v, c in sorted(model.linear.items())],
        "quadratic": [
            [int(i), int(j), float(c)]
            for (i, j), c in sorted(model.quadratic.items())
        ],
    }
    with open(path, "w", newline="\n") as fh:
        json.dump(doc, fh, separators=(",", ":"))
        fh.write("\n")


def import_model(path):
    path = str(path)
    try:
        with open(path, "r") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", path=path) from None
    try:
        model = QuboModel(
            num_vars=int(doc["num_vars"]),
            linear={int(v): float(c) for v, c in doc["linear"]},
            quadratic={(int(i), int(j)): float(c) for i, j, c in doc["quadratic"]},
            offset=float(doc["offset"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad QUBO document: {exc}", path=path) from None
    try:
        return model.validate()
    except ValueError as exc:
        raise ParseError(f"invalid QUBO model: {exc}", path=path) from None
