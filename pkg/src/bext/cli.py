"""Command-line front end; every computation behind one subcommand.

Output is machine-readable (CSV or JSON, schemas frozen in docs/FORMATS.md)
and deterministic: identical invocations produce byte-identical bytes.
Floats are printed with 17 significant digits for round-trip fidelity.
All angles are radians; energies are dimensionless (hbar = 1, 2m = 1).

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .boundary import BoundaryUnitary, cayley_to_robin
from .entangle import (
    HybridState,
    entanglement_entropy,
    sweep_entropy_closed_form,
)
from .fem import ConvergenceStudy, FemProblem, convergence_study, solve_lowest
from .halfline import (
    bound_state_energy,
    compatibility_curve,
    halfline_boundary_unitary,
    sweep_state,
)
from .rotor import MatchingProblem, rotor_boundary_unitary, solve_spectrum

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

CONVENTIONS = {
    "angles": "radians",
    "units": "hbar = 1, 2m = 1; energies in 1/length^2",
    "kinetic_operator": "-d^2/dx^2 per level",
    "half_angle": "tan(alpha/2) parameterization throughout; sweep parameter s = alpha/2",
    "bound_state": "channel bound state exists iff tan(alpha/2) > 0, E = lambda - tan(alpha/2)^2",
    "boundary_derivative": "outward normal: phidot = (-Phi'(0), +Phi'(L))",
    "halfline_angle_to_unitary": "half-line angle alpha maps to the boundary unitary exp(-i*alpha)",
    "boundary_ordering": "spin-major: level index outer, boundary point inner",
    "eigenfunction_phase": "largest-magnitude sample rotated to the positive real axis",
}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INVALID):
        super().__init__(message)
        self.code = code


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise CliError(f"non-finite value in output: {x}", EXIT_NUMERICAL)
    return f"{x:.17g}"


def _json_dumps(obj, indent: int = 0) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    pad = " " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            f"{pad}  {json.dumps(str(k))}: {_json_dumps(v, indent + 2)}"
            for k, v in obj.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        inner = ", ".join(_json_dumps(v, indent) for v in seq)
        return "[" + inner + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _payload(command: str, config: dict, result: dict) -> str:
    return _json_dumps(
        {
            "meta": {
                "version": __version__,
                "command": command,
                "config": config,
                "conventions": CONVENTIONS,
            },
            "result": result,
        }
    ) + "\n"


def _csv_lines(command: str, config: dict, header: list[str], rows) -> str:
    lines = [
        f"# bext {__version__}",
        f"# command: {command}",
        f"# config: {json.dumps(config, sort_keys=True)}",
        f"# conventions: {json.dumps(CONVENTIONS, sort_keys=True)}",
        ",".join(header),
    ]
    for row in rows:
        cells = []
        for cell in row:
            if cell is None:
                cells.append("")
            elif isinstance(cell, str):
                cells.append(cell)
            else:
                cells.append(_fmt_float(float(cell)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _write(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok != ""]
    except ValueError as exc:
        raise CliError(f"cannot parse float list {text!r}") from exc


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("BEXT_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def _function_record(grid: np.ndarray, fn) -> dict:
    state = HybridState.normalized(grid, fn.values)
    report = entanglement_entropy(state)
    return {
        "energy": fn.energy,
        "entropy": report.entropy,
        "up_re": fn.values[:, 0].real,
        "up_im": fn.values[:, 0].imag,
        "down_re": fn.values[:, 1].real,
        "down_im": fn.values[:, 1].imag,
    }


def cmd_compat_curve(args) -> None:
    sigmas = _float_list(args.sigma)
    if not sigmas:
        raise CliError("need at least one sigma")
    for sigma in sigmas:
        if sigma <= 0:
            raise CliError(f"sigma must be positive, got {sigma}")
    if args.samples < 2:
        raise CliError("need at least 2 samples")
    config = {"sigma": sigmas, "samples": args.samples}
    rows = []
    for sigma in sigmas:
        curve = compatibility_curve(sigma, args.samples)
        rows.extend((sigma, a1, a2) for a1, a2 in curve.points)
    if args.format == "json":
        result = {
            "curves": [
                {
                    "sigma": sigma,
                    "alpha1": [r[1] for r in rows if r[0] == sigma],
                    "alpha2": [r[2] for r in rows if r[0] == sigma],
                }
                for sigma in sigmas
            ]
        }
        _write(_payload("compat-curve", config, result), args.output)
    else:
        _write(
            _csv_lines("compat-curve", config, ["sigma", "alpha1", "alpha2"], rows),
            args.output,
        )


def cmd_halfline(args) -> None:
    lambdas = _float_list(args.lam)
    alphas = _float_list(args.alpha)
    if len(lambdas) != len(alphas):
        raise CliError("--lambda and --alpha must have the same length")
    if not lambdas:
        raise CliError("need at least one channel")
    config = {"lambda": lambdas, "alpha": alphas}
    channels = []
    for lam, alpha in zip(lambdas, alphas):
        energy = bound_state_energy(lam, alpha)
        channels.append(
            {
                "lambda": lam,
                "alpha": alpha,
                "bound": energy is not None,
                "energy": energy,
                "decay_rate": math.tan(alpha / 2.0) if energy is not None else None,
            }
        )
    energies = [c["energy"] for c in channels if c["energy"] is not None]
    degenerate = (
        len(energies) == len(channels) > 1
        and max(energies) - min(energies) < 1e-10
    )
    result = {"channels": channels, "shared_bound_state": degenerate}
    _write(_payload("halfline", config, result), args.output)


def cmd_rotor_spectrum(args) -> None:
    if args.mu < 0:
        raise CliError("mu must be nonnegative")
    if args.k < 1:
        raise CliError("k must be positive")
    e_min, e_max = args.window
    if not e_min < e_max:
        raise CliError("window must satisfy a < b")
    boundary = rotor_boundary_unitary(args.delta, args.family, args.angle)
    problem = MatchingProblem(mu=args.mu, boundary=boundary)
    result = solve_spectrum(
        problem,
        e_min,
        e_max,
        args.k,
        m=args.grid,
        step=args.scan_step,
        threads=_threads(args),
    )
    if not result.eigenvalues:
        raise CliError(
            f"no eigenvalues found in window [{e_min}, {e_max}]", EXIT_NUMERICAL
        )
    config = {
        "mu": args.mu,
        "delta": args.delta,
        "family": args.family,
        "angle": args.angle,
        "window": [e_min, e_max],
        "k": args.k,
        "grid": args.grid,
        "scan_step": args.scan_step,
        "seed": args.seed,
    }
    payload = {
        "eigenvalues": list(result.eigenvalues),
        "multiplicities": list(result.multiplicities),
        "grid": result.grid,
        "eigenfunctions": [_function_record(result.grid, fn) for fn in result.functions],
    }
    _write(_payload("rotor-spectrum", config, payload), args.output)


def _boundary_from_config(spec: dict, n_levels: int, halfline: bool) -> BoundaryUnitary:
    kind = spec.get("kind")
    if kind == "rotor":
        if halfline or n_levels != 2:
            raise CliError("rotor boundary requires the interval with 2 levels")
        return rotor_boundary_unitary(
            float(spec["delta"]), str(spec["family"]), float(spec["angle"])
        )
    if kind == "halfline-angles":
        if not halfline:
            raise CliError("halfline-angles boundary requires geometry 'halfline'")
        alphas = [float(a) for a in spec["alphas"]]
        if len(alphas) != n_levels:
            raise CliError("need one angle per level")
        return halfline_boundary_unitary(alphas)
    if kind == "matrix":
        re = np.asarray(spec["re"], dtype=float)
        im = np.asarray(spec.get("im", np.zeros_like(re)), dtype=float)
        try:
            return BoundaryUnitary(re + 1j * im)
        except ValueError as exc:
            raise CliError(str(exc)) from exc
    raise CliError(f"unknown boundary kind {kind!r}")


def cmd_fem(args) -> None:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config: {exc}") from exc
    try:
        geometry = cfg["geometry"]
        n_levels = int(cfg["n_levels"])
        n_elements = int(cfg["n_elements"])
        bulk = tuple(float(x) for x in cfg["bulk_eigenvalues"])
        k = int(cfg.get("k", 6))
        length = float(cfg.get("domain_length", 40.0 if geometry == "halfline" else 1.0))
        order = int(cfg.get("element_order", 1))
        boundary_spec = cfg["boundary"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"invalid config: {exc}") from exc
    if geometry not in ("interval", "halfline"):
        raise CliError("geometry must be 'interval' or 'halfline'")
    halfline = geometry == "halfline"
    boundary = _boundary_from_config(boundary_spec, n_levels, halfline)
    expected_dim = n_levels if halfline else 2 * n_levels
    if boundary.dim != expected_dim:
        raise CliError(
            f"boundary dimension {boundary.dim} does not match geometry ({expected_dim})"
        )
    potential = None
    if "potential" in cfg and cfg["potential"] is not None:
        coeffs = [float(c) for c in cfg["potential"]["coeffs"]]

        def potential(x, _c=tuple(coeffs)):
            return np.polynomial.polynomial.polyval(x, _c)

    problem = FemProblem(
        n_elements=n_elements,
        n_levels=n_levels,
        domain_length=length,
        bulk_eigenvalues=bulk,
        robin=cayley_to_robin(boundary),
        potential=potential,
        element_order=order,
    )
    try:
        pairs = solve_lowest(problem, k)
    except Exception as exc:
        raise CliError(f"eigensolve failed: {exc}", EXIT_NUMERICAL) from exc
    result = {
        "eigenvalues": pairs.eigenvalues,
        "mesh": pairs.mesh,
        "eigenfunctions": [
            {
                "energy": pairs.eigenvalues[j],
                "levels_re": [pairs.eigenfunction(j)[:, a].real for a in range(n_levels)],
                "levels_im": [pairs.eigenfunction(j)[:, a].imag for a in range(n_levels)],
            }
            for j in range(len(pairs.eigenvalues))
        ],
    }
    if "refinements" in cfg:
        reference = cfg.get("reference")
        if reference is None:
            raise CliError("refinements require a reference spectrum")
        study = convergence_study(
            problem, min(k, len(reference)), [int(n) for n in cfg["refinements"]], reference
        )
        result["convergence"] = {
            "h": study.h_values,
            "errors": [list(row) for row in study.errors],
            "orders": study.orders,
        }
    _write(_payload("fem", cfg, result), args.output)


def cmd_entangle(args) -> None:
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        grid = np.asarray(data["grid"], dtype=float)
        re = np.asarray(data["values_re"], dtype=float)
        im = np.asarray(data.get("values_im", np.zeros_like(re)), dtype=float)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise CliError(f"cannot read state file: {exc}") from exc
    try:
        state = HybridState.normalized(grid, re + 1j * im)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    report = entanglement_entropy(state)
    result = {
        "entropy": report.entropy,
        "separable": report.separable,
        "schmidt_coefficients": report.schmidt_coefficients,
        "reduced_density_re": [row.real for row in report.reduced_density],
        "reduced_density_im": [row.imag for row in report.reduced_density],
    }
    _write(_payload("entangle", {"input": args.input}, result), args.output)


def cmd_sweep(args) -> None:
    if args.sigma <= 0:
        raise CliError("sigma must be positive")
    if args.steps < 1:
        raise CliError("steps must be positive")
    config = {
        "sigma": args.sigma,
        "s_start": args.s_start,
        "s_end": args.s_end,
        "steps": args.steps,
        "c1": args.c1,
        "c2": args.c2,
    }
    rows = []
    for s in np.linspace(args.s_start, args.s_end, args.steps):
        try:
            solution = sweep_state(s, args.sigma, args.c1, args.c2)
        except ValueError:
            rows.append((float(s), None, None, "below_threshold"))
            continue
        entropy = sweep_entropy_closed_form(s, args.sigma, args.c1, args.c2)
        rows.append((float(s), solution.energy, entropy, "ok"))
    _write(
        _csv_lines("sweep", config, ["s", "energy", "entropy", "status"], rows),
        args.output,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bext",
        description="Spectra and boundary-driven entanglement of 1D hybrid quantum systems",
    )
    parser.add_argument("--version", action="version", version=f"bext {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--output", "-o", default="-", help="output path ('-' = stdout)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: BEXT_THREADS or 1)")
        p.add_argument("--seed", type=int, default=0,
                       help="seed recorded in metadata for randomized studies")

    p = sub.add_parser("compat-curve", help="two-channel compatibility curves")
    p.add_argument("--sigma", required=True, help="comma-separated spectral gaps")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    common(p)
    p.set_defaults(func=cmd_compat_curve)

    p = sub.add_parser("halfline", help="half-line bound states per channel")
    p.add_argument("--lambda", dest="lam", required=True, help="comma-separated level energies")
    p.add_argument("--alpha", required=True, help="comma-separated boundary angles")
    common(p)
    p.set_defaults(func=cmd_halfline)

    p = sub.add_parser("rotor-spectrum", help="interval x spin spectrum by plane-wave matching")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--family", choices=["diag", "antidiag"], required=True)
    p.add_argument("--angle", type=float, required=True)
    p.add_argument("--window", type=float, nargs=2, required=True, metavar=("A", "B"))
    p.add_argument("--k", type=int, default=6, help="number of roots to return")
    p.add_argument("--grid", type=int, default=1001, help="eigenfunction sample points")
    p.add_argument("--scan-step", type=float, default=0.01)
    common(p)
    p.set_defaults(func=cmd_rotor_spectrum)

    p = sub.add_parser("fem", help="finite-element eigensolve from a config file")
    p.add_argument("--config", required=True)
    common(p)
    p.set_defaults(func=cmd_fem)

    p = sub.add_parser("entangle", help="entanglement report for a sampled state")
    p.add_argument("--input", required=True, help="JSON state file")
    common(p)
    p.set_defaults(func=cmd_entangle)

    p = sub.add_parser("sweep", help="adiabatic boundary sweep: energy and entropy vs s")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--s-start", type=float, required=True)
    p.add_argument("--s-end", type=float, required=True)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--c1", type=float, default=2.0**-0.5)
    p.add_argument("--c2", type=float, default=2.0**-0.5)
    common(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except CliError as exc:
        print(f"bext: error: {exc}", file=sys.stderr)
        return exc.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
