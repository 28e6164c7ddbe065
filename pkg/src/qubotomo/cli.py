"""Command-line pipeline: phantom -> project -> build -> solve -> reconstruct.

Every command reads and writes files in an output directory, records its
parameters in a provenance JSON, and is byte-deterministic given its
flags, so pipelines can be resumed, diffed, and fed to external QUBO
solvers at the exported-model boundary.

Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 validation error.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .baselines import SartConfig, fbp, sart
from .encoding import (
    decode,
    encode_image,
    mac_difference_scheme,
    mac_scheme,
    radix2_scheme,
    variable_map,
)
from .errors import ParseError
from .geometry import (
    add_noise,
    build_system_matrix,
    default_geometry,
    forward_project,
    load_sinogram,
    save_sinogram,
)
from .metrics import evaluate, format_report_table, target_energy
from .phantom import gaussian_blur, load_image, quantize, resize_area, save_image, shepp_logan
from .qubo import combine, export_model, fidelity_qubo, import_model, tv_qubo
from .solver import SolveConfig, anneal, brute_force


def _write_json(path, doc):
    with open(path, "w", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_json(path):
    try:
        with open(path, "r") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", path=str(path)) from None


def _provenance(outdir, command, args):
    params = {
        k: v for k, v in sorted(vars(args).items())
        if k not in ("func", "outdir") and v is not None
    }
    _write_json(
        os.path.join(outdir, f"{command}.provenance.json"),
        {"tool": "qubotomo", "version": __version__, "command": command,
         "parameters": params},
    )


def _parse_levels(text):
    levels = tuple(float(tok) for tok in text.split(","))
    return levels


def _scheme_from_flags(encoding, levels, m1, m2):
    if encoding == "mac-difference":
        return mac_difference_scheme(levels)
    if encoding == "mac":
        return mac_scheme(levels)
    return radix2_scheme(m1, m2)


def cmd_phantom(args):
    os.makedirs(args.outdir, exist_ok=True)
    levels = _parse_levels(args.levels)
    if args.kind == "shepp-logan":
        img = shepp_logan(args.size)
    else:
        if not args.input:
            raise ValueError("--kind file requires --input")
        img = load_image(args.input)
        if args.size:
            img = resize_area(img, args.size, args.size)
    img = gaussian_blur(img, args.blur)
    thresholds = _parse_levels(args.thresholds) if args.thresholds else None
    img = quantize(img, levels, thresholds)
    save_image(img, os.path.join(args.outdir, "phantom.csv"))
    if np.all(np.rint(img) == img) and img.max() <= 255:
        save_image(img, os.path.join(args.outdir, "phantom.pgm"))
    _provenance(args.outdir, "phantom", args)
    print(f"phantom: {img.shape[0]}x{img.shape[1]}, levels {levels}, "
          f"foreground pixels {int(np.count_nonzero(img))}")
    return 0


def cmd_project(args):
    phantom_path = args.phantom or os.path.join(args.outdir, "phantom.csv")
    img = load_image(phantom_path)
    if args.projections < 1:
        raise ValueError("--projections must be >= 1")
    geom = default_geometry(img.shape[1], img.shape[0], args.projections)
    sino = forward_project(img, build_system_matrix(geom))
    save_sinogram(sino, os.path.join(args.outdir, "sinogram.csv"))
    if args.noise > 0:
        noisy = add_noise(sino, args.noise, args.seed)
        save_sinogram(noisy, os.path.join(args.outdir, "sinogram_noisy.csv"))
    _write_json(
        os.path.join(args.outdir, "geometry.json"),
        {
            "image_width": geom.image_width,
            "image_height": geom.image_height,
            "angles_deg": list(geom.angles_deg),
            "detector_bins": geom.detector_bins,
            "bin_width": geom.bin_width,
        },
    )
    _provenance(args.outdir, "project", args)
    print(f"sinogram: {geom.n_angles} angles x {geom.detector_bins} bins"
          + (f" (+ noisy copy at level {args.noise})" if args.noise > 0 else ""))
    return 0


def _load_geometry(outdir):
    doc = _read_json(os.path.join(outdir, "geometry.json"))
    from .geometry import ProjectionGeometry

    return ProjectionGeometry(
        image_width=int(doc["image_width"]),
        image_height=int(doc["image_height"]),
        angles_deg=tuple(doc["angles_deg"]),
        detector_bins=int(doc["detector_bins"]),
        bin_width=float(doc["bin_width"]),
    )


def cmd_build(args):
    if args.a < 0 or args.b < 0:
        raise ValueError("--a and --b must be non-negative")
    if args.a == 0 and args.b == 0:
        raise ValueError("degenerate model: --a and --b are both zero")
    geom = _load_geometry(args.outdir)
    sino_path = args.sinogram or os.path.join(args.outdir, "sinogram.csv")
    sino = load_sinogram(sino_path)
    levels = _parse_levels(args.levels)
    scheme = _scheme_from_flags(args.encoding, levels, args.m1, args.m2)
    vmap = variable_map((geom.image_height, geom.image_width), scheme)
    sm = build_system_matrix(geom)
    model = combine(
        fidelity_qubo(sino, sm, scheme, vmap),
        tv_qubo(scheme, vmap),
        args.a, args.b,
    )
    export_model(model, os.path.join(args.outdir, "qubo.json"))

    target = None
    phantom_path = os.path.join(args.outdir, "phantom.csv")
    ideal_path = os.path.join(args.outdir, "sinogram.csv")
    if os.path.exists(phantom_path) and os.path.exists(ideal_path):
        truth = load_image(phantom_path)
        ideal = load_sinogram(ideal_path)
        target = target_energy(truth, ideal, args.a, args.b)
        encode_image(truth, scheme)  # fail early if the phantom is unrepresentable
    _write_json(
        os.path.join(args.outdir, "qubo.target.json"),
        {
            "a": args.a,
            "b": args.b,
            "encoding": args.encoding,
            "levels": list(levels),
            "m1": args.m1,
            "m2": args.m2,
            "num_vars": model.num_vars,
            "target_energy": target,
            "sinogram": os.path.basename(sino_path),
        },
    )
    _provenance(args.outdir, "build", args)
    print(f"qubo: {model.num_vars} variables, {len(model.quadratic)} couplings, "
          f"a={args.a} b={args.b}, target energy {target}")
    return 0


def cmd_solve(args):
    model = import_model(os.path.join(args.outdir, "qubo.json"))
    if args.exact:
        result = brute_force(model)
    else:
        threads = args.threads if args.threads else os.cpu_count() or 1
        config = SolveConfig(
            restarts=args.restarts,
            sweeps=args.sweeps,
            seed=args.seed,
            threads=threads,
            time_budget=args.time_budget,
        )
        result = anneal(model, config)
    for r, e in enumerate(result.restart_energies):
        print(f"restart {r}: energy {e}")
    with open(os.path.join(args.outdir, "solution.json"), "w", newline="\n") as fh:
        fh.write(result.to_json(include_elapsed=False))
        fh.write("\n")
    _provenance(args.outdir, "solve", args)
    print(f"best energy {result.best_energy} "
          f"({'exact' if args.exact else 'annealed'}, {result.elapsed:.2f}s)")
    return 0


def cmd_reconstruct(args):
    doc = _read_json(os.path.join(args.outdir, "solution.json"))
    sidecar = _read_json(os.path.join(args.outdir, "qubo.target.json"))
    geom = _load_geometry(args.outdir)
    scheme = _scheme_from_flags(
        sidecar["encoding"], tuple(sidecar["levels"]),
        int(sidecar.get("m1", 0)), int(sidecar.get("m2", 0)),
    )
    vmap = variable_map((geom.image_height, geom.image_width), scheme)
    bits = np.frombuffer(doc["bits"].encode("ascii"), dtype=np.uint8) - ord("0")
    img = decode(bits, scheme, vmap)
    label = args.label or ("anneal+tv" if sidecar["b"] > 0 else "anneal")
    save_image(img, os.path.join(args.outdir, f"recon_{label}.csv"))
    _write_json(
        os.path.join(args.outdir, f"recon_{label}.meta.json"),
        {
            "method": label,
            "a": sidecar["a"],
            "b": sidecar["b"],
            "achieved_energy": doc["energy"],
            "target_energy": sidecar["target_energy"],
        },
    )
    _provenance(args.outdir, "reconstruct", args)
    print(f"reconstruction written: recon_{label}.csv")
    return 0


def cmd_baseline(args):
    geom = _load_geometry(args.outdir)
    sino_path = args.sinogram or os.path.join(args.outdir, "sinogram.csv")
    sino = load_sinogram(sino_path)
    if args.method == "fbp":
        img = fbp(sino, geom)
    else:
        sm = build_system_matrix(geom)
        img = sart(sino, sm, SartConfig(iterations=args.iterations,
                                        relaxation=args.relaxation))
    save_image(img, os.path.join(args.outdir, f"recon_{args.method}.csv"))
    _provenance(args.outdir, f"baseline_{args.method}", args)
    print(f"baseline written: recon_{args.method}.csv")
    return 0


def cmd_compare(args):
    truth = load_image(os.path.join(args.outdir, "phantom.csv"))
    projections = None
    geom_path = os.path.join(args.outdir, "geometry.json")
    if os.path.exists(geom_path):
        projections = len(_read_json(geom_path)["angles_deg"])
    scenario = args.scenario or (
        f"{projections} projections" if projections else "reconstruction"
    )
    reports = []
    for name in sorted(os.listdir(args.outdir)):
        if not (name.startswith("recon_") and name.endswith(".csv")):
            continue
        method = name[len("recon_"):-len(".csv")]
        recon = load_image(os.path.join(args.outdir, name))
        meta_path = os.path.join(args.outdir, f"recon_{method}.meta.json")
        meta = _read_json(meta_path) if os.path.exists(meta_path) else {}
        reports.append(
            evaluate(
                recon, truth, method,
                projections=projections,
                a=meta.get("a"), b=meta.get("b"),
                achieved_energy=meta.get("achieved_energy"),
                target=meta.get("target_energy"),
                scenario=scenario,
            )
        )
    if not reports:
        raise FileNotFoundError(
            f"no recon_*.csv files found in {args.outdir!r}; "
            "run reconstruct or baseline first"
        )
    _write_json(
        os.path.join(args.outdir, "report.json"),
        [json.loads(r.to_json()) for r in reports],
    )
    table = format_report_table(reports)
    with open(os.path.join(args.outdir, "report.txt"), "w", newline="\n") as fh:
        fh.write(table)
        fh.write("\n")
    print(table)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qubotomo",
        description="Few-view CT reconstruction via QUBO compilation and annealing",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="generate and quantize a test image")
    p.add_argument("--kind", choices=("shepp-logan", "file"), default="shepp-logan")
    p.add_argument("--size", type=int, required=True, help="output is size x size")
    p.add_argument("--levels", required=True, help="comma-separated attenuation levels")
    p.add_argument("--blur", type=float, default=0.0, help="Gaussian blur sigma")
    p.add_argument("--thresholds", help="comma-separated quantization thresholds")
    p.add_argument("--input", help="source image for --kind file (.csv or .pgm)")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("project", help="forward-project a phantom into a sinogram")
    p.add_argument("--in", dest="phantom",
                   help="phantom CSV (default: <outdir>/phantom.csv)")
    p.add_argument("--projections", type=int, required=True)
    p.add_argument("--noise", type=float, default=0.0,
                   help="relative noise level; also writes sinogram_noisy.csv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("build", help="compile sinogram + smoothness into a QUBO")
    p.add_argument("--sinogram", help="sinogram CSV (default: <outdir>/sinogram.csv)")
    p.add_argument("--a", type=float, required=True, help="data-fidelity weight")
    p.add_argument("--b", type=float, required=True, help="total-variation weight")
    p.add_argument("--encoding", choices=("mac-difference", "mac", "radix2"),
                   default="mac-difference")
    p.add_argument("--levels", required=True, help="comma-separated attenuation levels")
    p.add_argument("--m1", type=int, default=0, help="radix2 negative exponent range")
    p.add_argument("--m2", type=int, default=0, help="radix2 positive exponent range")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("solve", help="minimize the exported QUBO")
    p.add_argument("--exact", action="store_true",
                   help="brute-force enumeration (<= 24 variables)")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--sweeps", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=0,
                   help="annealing threads (default: all cores)")
    p.add_argument("--time-budget", type=float, default=None,
                   help="wall-clock cap in seconds, checked between restarts")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("reconstruct", help="decode the solver bits into an image")
    p.add_argument("--label", help="method label (default anneal / anneal+tv)")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("baseline", help="classical reconstruction for comparison")
    p.add_argument("--method", choices=("fbp", "sart"), required=True)
    p.add_argument("--sinogram", help="sinogram CSV (default: <outdir>/sinogram.csv)")
    p.add_argument("--iterations", type=int, default=6)
    p.add_argument("--relaxation", type=float, default=1.0)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("compare", help="score every reconstruction in the directory")
    p.add_argument("--scenario", help="row label for the report table")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
