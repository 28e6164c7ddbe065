"""Binary pixel encodings: how solver bits turn into attenuation values.

A pixel is a weighted sum of binary variables. The level-difference
encoding makes adjacent levels one bit flip apart, which keeps the
squared-difference smoothness term small for small level changes.
"""

import numpy as np

from qubotomo import (
    coefficients,
    decode,
    encode_image,
    mac_difference_scheme,
    mac_scheme,
    radix2_scheme,
    variable_map,
)

levels = (1.0, 2.0, 3.0)

for name, scheme in (
    ("radix2 (exponents 0..2)", radix2_scheme(0, 2)),
    ("one bit per level", mac_scheme(levels)),
    ("level differences", mac_difference_scheme(levels)),
):
    print(f"{name:28s} weights = {coefficients(scheme)}")

# Level differences for levels 1 < 2 < 3 have unit weights, so a value k
# is written as k leading ones (a thermometer pattern).
scheme = mac_difference_scheme(levels)
img = np.array([[0.0, 1.0], [2.0, 3.0]])
bits = encode_image(img, scheme)
print("\npixels", img.ravel(), "-> bits", bits)

vmap = variable_map(img.shape, scheme)
print("decode(bits) restores the image exactly:",
      np.array_equal(decode(bits, scheme, vmap), img))

# The representation is degenerate: non-thermometer patterns also decode
# to valid values, e.g. 010 carries the same value as 100.
single = variable_map((1, 1), scheme)
for pattern in ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, 0, 1)):
    value = decode(np.array(pattern, dtype=np.uint8), scheme, single)[0, 0]
    print(f"  bits {pattern} -> value {value}")

# The flat variable order is (row, column, bit), row-major.
print("\nvariable index of (row 1, col 0, bit 2):", vmap.index(1, 0, 2))
print("total variables for a 2x2 image at 3 bits/pixel:", vmap.total_vars)
