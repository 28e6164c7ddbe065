"""Classical reconstruction baselines: ramp-filtered back projection and SART."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SartConfig:
    iterations: int = 6
    relaxation: float = 1.0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not (0.0 < self.relaxation <= 2.0):
            raise ValueError("relaxation must lie in (0, 2]")


def _ramp_filter(size, spacing):
    """Frequency response of the discrete ramp (Ram-Lak) filter.

    Built from the band-limited spatial-domain taps (1/(4 spacing^2) at
    zero, -1/(pi n spacing)^2 at odd lags) so the DC term is handled
    correctly; the factor 2 pairs with the pi/(2 n_angles) scaling of the
    back projection.
    """
    odd = np.concatenate((
        np.arange(1, size // 2 + 1, 2, dtype=np.int64),
        np.arange(size // 2 - 1, 0, -2, dtype=np.int64),
    ))
    taps = np.zeros(size)
    taps[0] = 0.25 / spacing ** 2
    taps[1::2] = -1.0 / (np.pi * odd * spacing) ** 2
    return 2.0 * np.real(np.fft.fft(taps))


def fbp(sino, geom):
    """Filtered back projection with the ramp filter.

    Projections are filtered in the frequency domain after zero padding
    to the next power of two at least twice the detector length, then
    smeared back with linear interpolation and scaled by
    pi / (2 * number of angles).
    """
    sino = np.asarray(sino, dtype=np.float64)
    if sino.shape != (geom.n_angles, geom.detector_bins):
        raise ValueError(
            f"sinogram shape {sino.shape} does not match geometry "
            f"({geom.n_angles}, {geom.detector_bins})"
        )
    bins = geom.detector_bins
    padded = 1 << int(np.ceil(np.log2(2 * bins)))
    response = _ramp_filter(padded, geom.bin_width)
    spectra = np.fft.fft(sino, n=padded, axis=1) * response[None, :]
    filtered = np.real(np.fft.ifft(spectra, axis=1))[:, :bins] * geom.bin_width

    xs, ys = geom.pixel_centers()
    offsets = geom.detector_offsets()
    image = np.zeros((geom.image_height, geom.image_width))
    for a, angle in enumerate(geom.angles_deg):
        rad = np.radians(angle)
        t = xs[None, :] * np.cos(rad) + ys[:, None] * np.sin(rad)
        image += np.interp(t, offsets, filtered[a], left=0.0, right=0.0)
    return image * np.pi / (2.0 * geom.n_angles)


def sart(sino, sm, config=None):
    """Simultaneous algebraic reconstruction, one angle per update.

    Starting from zero, each angle's ray residuals are normalized by the
    ray weight sums, back-distributed through the system matrix, and
    normalized by the per-pixel weight sums before applying relaxation.
    """
    if config is None:
        config = SartConfig()
    sino = np.asarray(sino, dtype=np.float64)
    geom = sm.geometry
    if sino.shape != (geom.n_angles, geom.detector_bins):
        raise ValueError(
            f"sinogram shape {sino.shape} does not match geometry "
            f"({geom.n_angles}, {geom.detector_bins})"
        )
    bins = geom.detector_bins
    x = np.zeros(geom.image_width * geom.image_height)
    blocks = []
    for a in range(geom.n_angles):
        block = sm.matrix[a * bins : (a + 1) * bins]
        ray_sums = np.asarray(block.sum(axis=1)).ravel()
        pixel_sums = np.asarray(block.sum(axis=0)).ravel()
        blocks.append((block, ray_sums, pixel_sums))
    tiny = 1e-12
    for _ in range(config.iterations):
        for a, (block, ray_sums, pixel_sums) in enumerate(blocks):
            residual = sino[a] - block @ x
            scaled = np.divide(
                residual, ray_sums,
                out=np.zeros_like(residual), where=ray_sums > tiny,
            )
            update = block.T @ scaled
            update = np.divide(
                update, pixel_sums,
                out=np.zeros_like(update), where=pixel_sums > tiny,
            )
            x += config.relaxation * update
    return x.reshape(geom.image_height, geom.image_width)
