"""Parallel-beam projection geometry and the sparse system matrix.

Conventions: the image occupies the square [-W/2, W/2] x [-H/2, H/2]
with unit pixels; column j spans x in [-W/2 + j, -W/2 + j + 1] and row i
spans y in [H/2 - i - 1, H/2 - i] (row 0 on top). A projection at angle
theta (degrees) integrates along the lines x cos(theta) + y sin(theta) = t,
so theta = 0 sends rays straight down the columns with the detector axis
along x. Detector bin k sits at t = (k - (bins - 1)/2) * bin_width.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix

from .errors import ParseError
from .phantom import as_image


def isometric_angles(count):
    """Evenly spaced projection angles 0, d, 2d, ... 180 - d with d = 180/count."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    step = 180.0 / count
    return tuple(k * step for k in range(count))


@dataclass(frozen=True)
class ProjectionGeometry:
    """Parallel-beam acquisition: image size, angles, detector layout."""

    image_width: int
    image_height: int
    angles_deg: tuple
    detector_bins: int
    bin_width: float = 1.0

    def __post_init__(self):
        if self.image_width < 1 or self.image_height < 1:
            raise ValueError("image dimensions must be >= 1")
        if self.detector_bins < 1:
            raise ValueError("detector_bins must be >= 1")
        if self.bin_width <= 0:
            raise ValueError("bin_width must be positive")
        angles = tuple(float(a) for a in self.angles_deg)
        if len(angles) == 0:
            raise ValueError("need at least one projection angle")
        if any(not (0.0 <= a < 180.0) for a in angles):
            raise ValueError("angles must lie in [0, 180)")
        if any(b <= a for a, b in zip(angles, angles[1:])):
            raise ValueError("angles must be strictly increasing")
        object.__setattr__(self, "angles_deg", angles)

    @property
    def n_angles(self):
        return len(self.angles_deg)

    def detector_offsets(self):
        """Signed distance of each bin center from the rotation center."""
        k = np.arange(self.detector_bins, dtype=np.float64)
        return (k - (self.detector_bins - 1) / 2.0) * self.bin_width

    def pixel_centers(self):
        """(x of each column center, y of each row center)."""
        xs = np.arange(self.image_width) + 0.5 - self.image_width / 2.0
        ys = self.image_height / 2.0 - (np.arange(self.image_height) + 0.5)
        return xs, ys


def default_geometry(width, height, projections):
    """Geometry with evenly spaced angles and a diagonal-covering detector.

    The detector gets ceil(sqrt(2) * max(width, height)) unit bins, bumped
    to the next odd count so a bin sits exactly on the rotation center.
    """
    angles = projections if hasattr(projections, "__len__") else isometric_angles(projections)
    bins = int(np.ceil(np.sqrt(2.0) * max(width, height)))
    if bins % 2 == 0:
        bins += 1
    return ProjectionGeometry(width, height, tuple(angles), bins, 1.0)


@dataclass(frozen=True)
class SystemMatrix:
    """Sparse ray-pixel intersection lengths, one row per (angle, bin)."""

    geometry: ProjectionGeometry
    matrix: csr_matrix = field(repr=False)

    @property
    def n_rays(self):
        return self.matrix.shape[0]

    def ray_entries(self, angle_index, bin_index):
        """(pixel indices, weights) of the ray at (angle_index, bin_index)."""
        row = angle_index * self.geometry.detector_bins + bin_index
        lo, hi = self.matrix.indptr[row], self.matrix.indptr[row + 1]
        return self.matrix.indices[lo:hi], self.matrix.data[lo:hi]


def _ray_crossings(width, height, cos_t, sin_t, t):
    """Pixel indices and chord lengths of one ray through the image square.

    The ray is x cos + y sin = t, parametrized as
    (x, y) = (t cos - s sin, t sin + s cos). Crossing parameters with the
    pixel grid lines are merged and each segment is assigned to the pixel
    containing its midpoint.
    """
    half_w, half_h = width / 2.0, height / 2.0
    # Clip the parameter range to the image square.
    s_min, s_max = -np.inf, np.inf
    if abs(sin_t) > 1e-12:
        s_a = (t * cos_t - (-half_w)) / sin_t
        s_b = (t * cos_t - half_w) / sin_t
        s_min = max(s_min, min(s_a, s_b))
        s_max = min(s_max, max(s_a, s_b))
    elif not (-half_w <= t * cos_t <= half_w):
        return np.empty(0, np.int64), np.empty(0)
    if abs(cos_t) > 1e-12:
        s_a = ((-half_h) - t * sin_t) / cos_t
        s_b = (half_h - t * sin_t) / cos_t
        s_min = max(s_min, min(s_a, s_b))
        s_max = min(s_max, max(s_a, s_b))
    elif not (-half_h <= t * sin_t <= half_h):
        return np.empty(0, np.int64), np.empty(0)
    if not (s_min < s_max):
        return np.empty(0, np.int64), np.empty(0)

    params = [np.array([s_min, s_max])]
    if abs(sin_t) > 1e-12:
        xs = np.arange(width + 1) - half_w
        params.append((t * cos_t - xs) / sin_t)
    if abs(cos_t) > 1e-12:
        ys = np.arange(height + 1) - half_h
        params.append((ys - t * sin_t) / cos_t)
    s = np.concatenate(params)
    s = np.unique(s[(s >= s_min - 1e-12) & (s <= s_max + 1e-12)])
    if s.size < 2:
        return np.empty(0, np.int64), np.empty(0)

    lengths = np.diff(s)
    mids = (s[:-1] + s[1:]) / 2.0
    keep = lengths > 1e-12
    lengths, mids = lengths[keep], mids[keep]
    x_mid = t * cos_t - mids * sin_t
    y_mid = t * sin_t + mids * cos_t
    cols = np.clip(np.floor(x_mid + half_w).astype(np.int64), 0, width - 1)
    rows = np.clip(np.floor(half_h - y_mid).astype(np.int64), 0, height - 1)
    return rows * width + cols, lengths


def build_system_matrix(geom):
    """Trace every (angle, bin) ray and collect chord lengths per pixel."""
    width, height = geom.image_width, geom.image_height
    offsets = geom.detector_offsets()
    indptr = [0]
    indices = []
    data = []
    for angle in geom.angles_deg:
        rad = np.radians(angle)
        cos_t, sin_t = np.cos(rad), np.sin(rad)
        for t in offsets:
            pix, wts = _ray_crossings(width, height, cos_t, sin_t, t)
            order = np.argsort(pix, kind="stable")
            indices.append(pix[order])
            data.append(wts[order])
            indptr.append(indptr[-1] + pix.size)
    mat = csr_matrix(
        (
            np.concatenate(data) if data else np.empty(0),
            np.concatenate(indices) if indices else np.empty(0, np.int64),
            np.array(indptr, dtype=np.int64),
        ),
        shape=(geom.n_angles * geom.detector_bins, width * height),
    )
    mat.sum_duplicates()
    return SystemMatrix(geometry=geom, matrix=mat)


def forward_project(img, sm):
    """Sinogram of an image: each entry is the weighted sum along one ray."""
    img = as_image(img, non_negative=False)
    geom = sm.geometry
    if img.shape != (geom.image_height, geom.image_width):
        raise ValueError(
            f"image shape {img.shape} does not match geometry "
            f"({geom.image_height}, {geom.image_width})"
        )
    values = sm.matrix @ img.ravel()
    return values.reshape(geom.n_angles, geom.detector_bins)


def add_noise(sino, level, seed):
    """Multiplicative Gaussian noise: each value v becomes v + (level*v)*z.

    z is a standard normal draw from a generator seeded with `seed`, so
    identical calls produce identical output. level = 0 returns a copy.
    """
    sino = np.asarray(sino, dtype=np.float64)
    if level < 0:
        raise ValueError(f"noise level must be >= 0, got {level}")
    if level == 0:
        return sino.copy()
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(sino.shape)
    return sino + level * sino * z


def save_sinogram(sino, path):
    """CSV with a '# angles=<a> bins=<b>' header, one row per angle."""
    sino = np.asarray(sino, dtype=np.float64)
    if sino.ndim != 2:
        raise ValueError(f"sinogram must be 2D, got shape {sino.shape}")
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# angles={sino.shape[0]} bins={sino.shape[1]}\n")
        for row in sino:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def load_sinogram(path):
    path = str(path)
    with open(path, "r") as fh:
        header = fh.readline().strip()
        parts = header.split()
        if (
            len(parts) != 3
            or parts[0] != "#"
            or not parts[1].startswith("angles=")
            or not parts[2].startswith("bins=")
        ):
            raise ParseError(f"bad sinogram header {header!r}", path=path, line=1)
        try:
            n_angles = int(parts[1].split("=", 1)[1])
            n_bins = int(parts[2].split("=", 1)[1])
        except ValueError:
            raise ParseError(f"bad sinogram header {header!r}", path=path, line=1) from None
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                row = [float(tok) for tok in line.split(",")]
            except ValueError as exc:
                raise ParseError(f"bad number: {exc}", path=path, line=lineno) from None
            if len(row) != n_bins:
                raise ParseError(
                    f"row has {len(row)} values, expected {n_bins}",
                    path=path, line=lineno,
                )
            rows.append(row)
    if len(rows) != n_angles:
        raise ParseError(
            f"expected {n_angles} angle rows, found {len(rows)}", path=path,
        )
    return np.array(rows)
