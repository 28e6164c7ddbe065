"""Binary pixel encodings and flat variable indexing.

A pixel value is a weighted sum of binary variables. Three weightings
are supported:

* radix2          -- powers of two 2^-m1 .. 2^m2
* mac             -- one bit per attenuation level, weight alpha_k
* mac_difference  -- thermometer-style steps beta_1 = alpha_1,
                     beta_k = alpha_k - alpha_{k-1}

The difference form keeps neighboring-level transitions one bit flip
apart, which is what makes the total-variation term behave; it is the
default throughout the package.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EncodingError, ParseError
from .phantom import as_image, check_levels


@dataclass(frozen=True)
class EncodingScheme:
    kind: str                 # "radix2" | "mac" | "mac_difference"
    levels: tuple = ()        # attenuation levels (mac / mac_difference)
    m1: int = 0               # radix2 exponent range -m1..m2
    m2: int = 0

    def __post_init__(self):
        if self.kind == "radix2":
            if self.m1 + self.m2 + 1 < 1:
                raise ValueError("radix2 range must contain at least one exponent")
        elif self.kind in ("mac", "mac_difference"):
            object.__setattr__(
                self, "levels", tuple(float(v) for v in check_levels(self.levels))
            )
        else:
            raise ValueError(f"unknown encoding kind {self.kind!r}")

    @property
    def bits_per_pixel(self):
        if self.kind == "radix2":
            return self.m1 + self.m2 + 1
        return len(self.levels)


def radix2_scheme(m1, m2):
    return EncodingScheme(kind="radix2", m1=m1, m2=m2)


def mac_scheme(levels):
    return EncodingScheme(kind="mac", levels=tuple(levels))


def mac_difference_scheme(levels):
    return EncodingScheme(kind="mac_difference", levels=tuple(levels))


def coefficients(scheme):
    """Per-bit weights of the scheme, lowest bit first."""
    if scheme.kind == "radix2":
        return 2.0 ** np.arange(-scheme.m1, scheme.m2 + 1, dtype=np.float64)
    levels = np.asarray(scheme.levels, dtype=np.float64)
    if scheme.kind == "mac":
        return levels
    return np.diff(levels, prepend=0.0)  # beta_1 = alpha_1, beta_k = step


@dataclass(frozen=True)
class VariableMap:
    """Bijection between (row, col, bit) triples and flat variable indices."""

    width: int
    height: int
    bits_per_pixel: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1 or self.bits_per_pixel < 1:
            raise ValueError("VariableMap dimensions must be >= 1")

    @property
    def total_vars(self):
        return self.width * self.height * self.bits_per_pixel

    def index(self, i, j, k):
        return ((i * self.width) + j) * self.bits_per_pixel + k


def variable_map(shape, scheme):
    """VariableMap for an image shape (height, width) under a scheme."""
    height, width = shape
    return VariableMap(width=width, height=height,
                       bits_per_pixel=scheme.bits_per_pixel)


def decode(bits, scheme, vmap):
    """Image whose pixel (i, j) is sum_k coefficient[k] * bits[index(i,j,k)]."""
    bits = np.asarray(bits)
    if bits.ndim != 1 or bits.size != vmap.total_vars:
        raise ValueError(
            f"expected {vmap.total_vars} bits, got {bits.size}"
        )
    coeffs = coefficients(scheme)
    cube = bits.reshape(vmap.height, vmap.width, vmap.bits_per_pixel)
    return cube.astype(np.float64) @ coeffs


def encode_image(img, scheme):
    """Exact bitstring for an image whose pixels are all representable.

    mac_difference uses the thermometer pattern (level t => first t bits
    set); mac uses one bit per level; radix2 uses the binary expansion of
    value * 2^m1. Unrepresentable values raise EncodingError.
    """
    img = as_image(img)
    bpp = scheme.bits_per_pixel
    bits = np.zeros(img.size * bpp, dtype=np.uint8)
    flat = img.ravel()
    width = img.shape[1]

    def fail(p, value):
        i, j = divmod(p, width)
        raise EncodingError(
            f"pixel ({i}, {j}) value {value} is not representable "
            f"in the {scheme.kind} encoding"
        )

    if scheme.kind in ("mac", "mac_difference"):
        levels = np.asarray(scheme.levels)
        for p, value in enumerate(flat):
            if value == 0.0:
                continue
            matches = np.nonzero(levels == value)[0]
            if matches.size == 0:
                fail(p, value)
            t = matches[0]
            if scheme.kind == "mac_difference":
                bits[p * bpp : p * bpp + t + 1] = 1
            else:
                bits[p * bpp + t] = 1
    else:
        scale = 2.0 ** scheme.m1
        limit = 2 ** (scheme.m1 + scheme.m2 + 1)
        for p, value in enumerate(flat):
            scaled = value * scale
            n = int(round(scaled))
            if scaled != n or not (0 <= n < limit):
                fail(p, value)
            for k in range(bpp):
                bits[p * bpp + k] = (n >> k) & 1
    return bits


def save_bits(bits, path):
    """One line of '0'/'1' characters, LF-terminated."""
    bits = np.asarray(bits)
    with open(path, "w", newline="\n") as fh:
        fh.write("".join("1" if b else "0" for b in bits))
        fh.write("\n")


def load_bits(path):
    path = str(path)
    with open(path, "r") as fh:
        line = fh.readline().strip()
    if not line or any(c not in "01" for c in line):
        raise ParseError("bitstring file must be one line of 0/1 characters",
                         path=path, line=1)
    return np.frombuffer(line.encode("ascii"), dtype=np.uint8) - ord("0")
