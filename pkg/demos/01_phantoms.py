"""Generate, blur, and quantize test phantoms.

The preparation recipe for discrete-attenuation samples: start from a
high-contrast image, blur it so values change smoothly, then snap every
pixel onto a declared set of attenuation levels.
"""

import numpy as np

from qubotomo import gaussian_blur, quantize, save_image, shepp_logan

GLYPHS = " .:-=+*#%@"


def show(img, title):
    print(f"\n{title}")
    lo, hi = img.min(), img.max()
    span = (hi - lo) or 1.0
    for row in img:
        line = "".join(
            GLYPHS[int((v - lo) / span * (len(GLYPHS) - 1))] * 2 for v in row
        )
        print("  " + line)


# The classical ten-ellipse head phantom, rasterized at 30x30.
phantom = shepp_logan(30)
show(phantom, "Shepp-Logan, 30x30, continuous values in [0, 1]")

# Blurring spreads the boundaries over a few pixels; this smoothness is
# what keeps the few-view reconstruction problem well posed later on.
blurred = gaussian_blur(phantom, 1.5)
show(blurred, "after Gaussian blur (sigma = 1.5)")

# Snap to a single attenuation level: a binary sample.
binary = quantize(blurred, levels=(1.0,))
show(binary, "quantized to one level {0, 1}")
print(f"foreground pixels: {int(binary.sum())}")

# Or to three levels, as for a sample made of three materials.
three = quantize(blurred, levels=(1.0, 2.0, 3.0))
show(three, "quantized to levels {0, 1, 2, 3}")
print(f"level histogram: {dict(zip(*np.unique(three, return_counts=True)))}")

save_image(three, "phantom_three_levels.csv")
save_image(three, "phantom_three_levels.pgm")
print("\nwrote phantom_three_levels.csv / .pgm")
