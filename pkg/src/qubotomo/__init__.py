"""Few-view tomographic reconstruction by QUBO compilation and annealing.

The pipeline: prepare a quantized phantom, forward-project it into a
sinogram, compile a data-fidelity + total-variation QUBO from the
sinogram, minimize it with simulated annealing (or brute force at tiny
scale), and decode the best bitstring back into an image.
"""

from .phantom import (
    shepp_logan,
    gaussian_blur,
    quantize,
    resize_area,
    load_image,
    save_image,
)
from .geometry import (
    ProjectionGeometry,
    SystemMatrix,
    isometric_angles,
    default_geometry,
    build_system_matrix,
    forward_project,
    add_noise,
    load_sinogram,
    save_sinogram,
)
from .encoding import (
    EncodingScheme,
    VariableMap,
    radix2_scheme,
    mac_scheme,
    mac_difference_scheme,
    coefficients,
    variable_map,
    decode,
    encode_image,
    load_bits,
    save_bits,
)
from .qubo import (
    QuboModel,
    fidelity_qubo,
    tv_qubo,
    combine,
    energy,
    export_model,
    import_model,
)
from .solver import (
    SolveConfig,
    SolveResult,
    auto_temperature,
    brute_force,
    anneal,
)
from .baselines import SartConfig, fbp, sart
from .metrics import (
    ReconstructionReport,
    abs_error,
    tv_squared,
    tv_absolute,
    target_energy,
    evaluate,
    format_report_table,
)

__version__ = "0.1.0"

__all__ = [
    "shepp_logan", "gaussian_blur", "quantize", "resize_area",
    "load_image", "save_image",
    "ProjectionGeometry", "SystemMatrix", "isometric_angles",
    "default_geometry", "build_system_matrix", "forward_project",
    "add_noise", "load_sinogram", "save_sinogram",
    "EncodingScheme", "VariableMap", "radix2_scheme", "mac_scheme",
    "mac_difference_scheme", "coefficients", "variable_map", "decode",
    "encode_image", "load_bits", "save_bits",
    "QuboModel", "fidelity_qubo", "tv_qubo", "combine", "energy",
    "export_model", "import_model",
    "SolveConfig", "SolveResult", "auto_temperature", "brute_force",
    "anneal",
    "SartConfig", "fbp", "sart",
    "ReconstructionReport", "abs_error", "tv_squared", "tv_absolute",
    "target_energy", "evaluate", "format_report_table",
    "__version__",
]
