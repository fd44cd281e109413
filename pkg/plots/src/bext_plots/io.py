"""Readers for the frozen bext CSV/JSON schemas, with validation.

These scripts couple to the solver package through files only; any
deviation from the documented schemas is a SchemaError and a nonzero exit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


class SchemaError(Exception):
    pass


@dataclass(frozen=True)
class CompatCurves:
    sigmas: list[float]
    branches: dict[float, np.ndarray]  # sigma -> (n, 2) columns (alpha1, alpha2)


@dataclass(frozen=True)
class SpectrumFile:
    grid: np.ndarray
    energies: list[float]
    components: list[np.ndarray]  # one (m, 2) complex array per eigenfunction


def read_compat_csv(path: str) -> CompatCurves:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.rstrip("\n") for ln in fh]
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    rows = [ln for ln in lines if ln and not ln.startswith("#")]
    if not rows:
        raise SchemaError(f"{path}: no header row")
    header = rows[0].split(",")
    if header != ["sigma", "alpha1", "alpha2"]:
        raise SchemaError(f"{path}: unexpected header {header!r}")
    if len(rows) < 2:
        raise SchemaError(f"{path}: no data rows")
    branches: dict[float, list[tuple[float, float]]] = {}
    for number, row in enumerate(rows[1:], start=2):
        cells = row.split(",")
        if len(cells) != 3:
            raise SchemaError(f"{path}:{number}: expected 3 columns")
        try:
            sigma, alpha1, alpha2 = (float(c) for c in cells)
        except ValueError as exc:
            raise SchemaError(f"{path}:{number}: non-numeric cell") from exc
        branches.setdefault(sigma, []).append((alpha1, alpha2))
    return CompatCurves(
        sigmas=list(branches.keys()),
        branches={s: np.array(pts) for s, pts in branches.items()},
    )


def read_spectrum_json(path: str, minimum_functions: int = 6) -> SpectrumFile:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    try:
        result = payload["result"]
        grid = np.asarray(result["grid"], dtype=float)
        functions = result["eigenfunctions"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: not a rotor-spectrum file ({exc})") from exc
    if len(functions) < minimum_functions:
        raise SchemaError(
            f"{path}: need at least {minimum_functions} eigenfunctions, "
            f"found {len(functions)}"
        )
    energies = []
    components = []
    for idx, fn in enumerate(functions):
        try:
            up = np.asarray(fn["up_re"], dtype=float) + 1j * np.asarray(
                fn["up_im"], dtype=float
            )
            down = np.asarray(fn["down_re"], dtype=float) + 1j * np.asarray(
                fn["down_im"], dtype=float
            )
            energies.append(float(fn["energy"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"{path}: eigenfunction {idx} malformed ({exc})") from exc
        if up.shape != grid.shape or down.shape != grid.shape:
            raise SchemaError(
                f"{path}: eigenfunction {idx} length does not match the grid"
            )
        components.append(np.column_stack([up, down]))
    return SpectrumFile(grid=grid, energies=energies, components=components)
