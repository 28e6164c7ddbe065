"""Test-image generation and preparation.

Images are plain 2D float64 numpy arrays (rows x columns) holding
non-negative attenuation values. Phantom preparation follows the usual
recipe for discrete-level samples: generate or load an image, optionally
resize, blur it so values change smoothly, then quantize to a declared
set of attenuation levels.
"""

import numpy as np
from scipy.ndimage import correlate1d

from .errors import ParseError

# Ten-ellipse head phantom: (added value, half-axis a, half-axis b,
# center x, center y, rotation in degrees). Contrast values follow the
# widely used variant whose composite values stay inside [0, 1].
SHEPP_LOGAN_ELLIPSES = (
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.605, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
)


def as_image(img, non_negative=True):
    """Coerce to a 2D float64 array and check basic image invariants.

    Attenuation images must be non-negative; raw reconstruction outputs
    (which may undershoot) pass non_negative=False.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a non-empty 2D image, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite pixel values")
    if non_negative and np.any(arr < 0):
        raise ValueError("image contains negative pixel values")
    return arr


def check_levels(levels):
    """Validate an attenuation-level sequence: strictly increasing, positive."""
    lv = np.asarray(levels, dtype=np.float64)
    if lv.ndim != 1 or lv.size == 0:
        raise ValueError("levels must be a non-empty 1D sequence")
    if np.any(lv <= 0) or not np.all(np.isfinite(lv)):
        raise ValueError("levels must be finite and positive")
    if lv.size > 1 and np.any(np.diff(lv) <= 0):
        raise ValueError("levels must be strictly increasing")
    return lv


def shepp_logan(size):
    """Rasterize the classical ten-ellipse head phantom on a size x size grid.

    Pixel centers sample [-1, 1]^2; each ellipse adds its contrast value
    to the pixels whose centers fall inside it. Output values lie in
    [0, 1].
    """
    if size < 2:
        raise ValueError(f"size must be >= 2, got {size}")
    coords = (np.arange(size) + 0.5) * (2.0 / size) - 1.0
    x = coords[None, :]
    y = -coords[:, None]  # row 0 is the top of the image
    img = np.zeros((size, size))
    for value, a, b, x0, y0, phi_deg in SHEPP_LOGAN_ELLIPSES:
        phi = np.radians(phi_deg)
        xr = (x - x0) * np.cos(phi) + (y - y0) * np.sin(phi)
        yr = -(x - x0) * np.sin(phi) + (y - y0) * np.cos(phi)
        img[(xr / a) ** 2 + (yr / b) ** 2 <= 1.0] += value
    return np.clip(img, 0.0, 1.0)


def gaussian_blur(img, sigma):
    """Separable Gaussian blur with the kernel truncated at 3 sigma.

    Border handling replicates the edge pixel, so a constant image stays
    constant. sigma = 0 returns the input unchanged.
    """
    img = as_image(img)
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    radius = int(3.0 * sigma + 0.5)
    if sigma == 0 or radius == 0:
        return img.copy()
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-0.5 * (offsets / sigma) ** 2)
    kernel /= kernel.sum()
    out = correlate1d(img, kernel, axis=0, mode="nearest")
    out = correlate1d(out, kernel, axis=1, mode="nearest")
    return out


def quantize(img, levels, thresholds=None):
    """Map pixels onto the discrete attenuation levels.

    Pixels below thresholds[0] become 0; pixels in
    [thresholds[k-1], thresholds[k]) become levels[k-1]; pixels at or
    above the last threshold become the last level.

    When thresholds is None the image is min-max normalized, scaled to
    [0, levels[-1]], and cut at the midpoints of consecutive members of
    (0, levels[0], ..., levels[-1]).
    """
    img = as_image(img)
    lv = check_levels(levels)
    if thresholds is None:
        lo, hi = img.min(), img.max()
        span = hi - lo
        scaled = np.zeros_like(img) if span == 0 else (img - lo) / span * lv[-1]
        bounds = np.concatenate(([0.0], lv))
        thr = (bounds[:-1] + bounds[1:]) / 2.0
        return quantize(scaled, lv, thr)
    thr = np.asarray(thresholds, dtype=np.float64)
    if thr.shape != lv.shape:
        raise ValueError(
            f"need one threshold per level, got {thr.size} thresholds "
            f"for {lv.size} levels"
        )
    if thr[0] <= 0 or (thr.size > 1 and np.any(np.diff(thr) <= 0)):
        raise ValueError("thresholds must be strictly increasing and positive")
    idx = np.searchsorted(thr, img, side="right")  # 0 => below all thresholds
    table = np.concatenate(([0.0], lv))
    return table[idx]


def resize_area(img, new_height, new_width):
    """Resize by exact box overlap averaging (area average when shrinking)."""
    img = as_image(img)
    if new_height < 1 or new_width < 1:
        raise ValueError("target dimensions must be >= 1")

    def overlap_matrix(n_out, n_in):
        # R[k, j] = |[k, k+1) * n_in/n_out  intersect  [j, j+1)| / (n_in/n_out)
        scale = n_in / n_out
        R = np.zeros((n_out, n_in))
        for k in range(n_out):
            lo, hi = k * scale, (k + 1) * scale
            j0, j1 = int(np.floor(lo)), min(int(np.ceil(hi)), n_in)
            for j in range(j0, j1):
                R[k, j] = min(hi, j + 1) - max(lo, j)
        return R / scale

    rows = overlap_matrix(new_height, img.shape[0])
    cols = overlap_matrix(new_width, img.shape[1])
    return rows @ img @ cols.T


def save_image(img, path):
    """Write an image as CSV (any values) or 8-bit PGM (.pgm extension).

    CSV rows are comma-separated decimal reals, one image row per line.
    PGM output requires every pixel to be an exact integer in 0..255.
    """
    img = as_image(img, non_negative=False)
    path = str(path)
    if path.endswith(".pgm"):
        rounded = np.rint(img)
        if np.any(rounded != img) or img.max() > 255 or img.min() < 0:
            raise ValueError(
                "PGM output requires integer pixel values in 0..255; "
                "use CSV for real-valued images"
            )
        h, w = img.shape
        with open(path, "wb") as fh:
            fh.write(f"P5 {w} {h} 255\n".encode("ascii"))
            fh.write(rounded.astype(np.uint8).tobytes())
    elif path.endswith(".csv"):
        with open(path, "w", newline="\n") as fh:
            for row in img:
                fh.write(",".join(repr(float(v)) for v in row))
                fh.write("\n")
    else:
        raise ValueError(f"unsupported image format for {path!r} (use .pgm or .csv)")


def load_image(path):
    """Read an image written by save_image (CSV or binary 8-bit PGM)."""
    path = str(path)
    if path.endswith(".pgm"):
        return _load_pgm(path)
    if path.endswith(".csv"):
        return _load_csv(path)
    raise ValueError(f"unsupported image format for {path!r} (use .pgm or .csv)")


def _load_csv(path):
    rows = []
    width = None
    with open(path, "r") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = [float(tok) for tok in line.split(",")]
            except ValueError as exc:
                raise ParseError(f"bad number: {exc}", path=path, line=lineno) from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ParseError(
                    f"row has {len(row)} values, expected {width}",
                    path=path, line=lineno,
                )
            rows.append(row)
    if not rows:
        raise ParseError("empty image file", path=path, line=1)
    return as_image(np.array(rows), non_negative=False)


def _load_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()

    pos = 0

    def next_token():
        nonlocal pos
        while pos < len(data):
            if data[pos : pos + 1].isspace():
                pos += 1
            elif data[pos : pos + 1] == b"#":  # comment runs to end of line
                while pos < len(data) and data[pos : pos + 1] != b"\n":
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ParseError("unexpected end of header", path=path, offset=start)
        return data[start:pos], start

    magic, at = next_token()
    if magic != b"P5":
        raise ParseError(f"not a binary PGM (magic {magic!r})", path=path, offset=at)
    fields = []
    for name in ("width", "height", "maxval"):
        tok, at = next_token()
        try:
            fields.append(int(tok))
        except ValueError:
            raise ParseError(f"bad {name} field {tok!r}", path=path, offset=at) from None
    width, height, maxval = fields
    if width < 1 or height < 1 or not (1 <= maxval <= 255):
        raise ParseError(
            f"unsupported PGM dimensions/maxval ({width}x{height}, maxval {maxval})",
            path=path, offset=at,
        )
    pos += 1  # single whitespace byte after maxval
    expected = width * height
    payload = data[pos : pos + expected]
    if len(payload) < expected:
        raise ParseError(
            f"truncated pixel payload: expected {expected} bytes, got {len(payload)}",
            path=path, offset=pos + len(payload),
        )
    pixels = np.frombuffer(payload, dtype=np.uint8).astype(np.float64)
    return pixels.reshape(height, width)
