"""Few-view reconstruction shoot-out: annealed QUBO vs classical baselines.

A 16x16 binary phantom is projected at only 4 angles (a quarter of the
usual requirement), reconstructed four ways, and scored against the
truth. The TV-regularized QUBO recovers the phantom exactly; the
fidelity-only QUBO and the classical algorithms do not. The same
comparison is then repeated with 5% detector noise.
"""

import numpy as np

from qubotomo import (
    SartConfig,
    SolveConfig,
    abs_error,
    add_noise,
    anneal,
    build_system_matrix,
    combine,
    decode,
    default_geometry,
    evaluate,
    fbp,
    fidelity_qubo,
    format_report_table,
    forward_project,
    gaussian_blur,
    mac_difference_scheme,
    quantize,
    sart,
    shepp_logan,
    target_energy,
    tv_qubo,
    variable_map,
)

phantom = quantize(gaussian_blur(shepp_logan(16), 0.8), (1.0,))
geom = default_geometry(16, 16, 4)
sm = build_system_matrix(geom)
sino = forward_project(phantom, sm)
print(f"phantom 16x16, {int(phantom.sum())} foreground pixels, "
      f"projected at angles {geom.angles_deg}")

scheme = mac_difference_scheme((1.0,))
vmap = variable_map(phantom.shape, scheme)
q_fit = fidelity_qubo(sino, sm, scheme, vmap)
q_tv = tv_qubo(scheme, vmap)
config = SolveConfig(restarts=50, sweeps=5000, seed=0, threads=4)


def reconstructions(measured):
    q_fit_measured = fidelity_qubo(measured, sm, scheme, vmap)
    with_tv = anneal(combine(q_fit_measured, q_tv, 1.0, 1.0), config)
    plain = anneal(combine(q_fit_measured, q_tv, 1.0, 0.0), config)
    return {
        "anneal+tv": decode(with_tv.best_bits, scheme, vmap),
        "anneal": decode(plain.best_bits, scheme, vmap),
        "sart": sart(measured, sm, SartConfig(iterations=6)),
        "fbp": fbp(measured, geom),
    }, with_tv


print("\n--- ideal sinogram ---")
images, result = reconstructions(sino)
target = target_energy(phantom, sino, 1.0, 1.0)
print(f"annealed energy {result.best_energy:.4f} vs target {target:.4f}")

reports = [
    evaluate(img, phantom, method, scenario="4 proj, ideal")
    for method, img in images.items()
]

print("\n--- 5% detector noise ---")
noisy = add_noise(sino, 0.05, seed=1)
images_noisy, _ = reconstructions(noisy)
reports += [
    evaluate(img, phantom, method, scenario="4 proj, 5% noise")
    for method, img in images_noisy.items()
]

print()
print(format_report_table(reports))
print("\n(absolute error: sum over pixels of |reconstruction - truth|)")

exact = [r.method for r in reports if r.error_free]
print(f"error-free reconstructions: {exact}")
