"""Render the standard figures from bext output files.

    render_figs <figure-id> --in <path> [--in <path> ...] --out <path>

fig1: compatibility curves in the (alpha1, alpha2) square, one per gap.
fig2: the same curves unfolded onto the [0, 2pi)^2 torus with their
      reflected branches and the separable endpoints marked.
fig4/fig5: the six lowest eigenfunctions, both spin components per panel,
      real parts in blue, imaginary parts in red.  fig5 additionally
      asserts, from the input data, that the imaginary parts vanish.

Rendering is deterministic: fixed backend, size, fonts and colors, PNG
metadata stripped, so one platform produces pixel-identical files.
"""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import CompatCurves, SchemaError, SpectrumFile, read_compat_csv, read_spectrum_json

FIGURE_IDS = ("fig1", "fig2", "fig4", "fig5")
TWO_PI = 2.0 * np.pi
# rcParams pinned for byte-stable output
_RC = {
    "font.family": "DejaVu Sans",
    "font.size": 9.0,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.2,
    "figure.dpi": 110,
    "savefig.dpi": 110,
}
_CURVE_COLORS = ["tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple"]


def _save(fig, out_path: str) -> None:
    fig.savefig(out_path, metadata={"Software": None})
    plt.close(fig)


def render_fig1(curves: CompatCurves, out_path: str) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.2, 4.2))
        for idx, sigma in enumerate(curves.sigmas):
            pts = curves.branches[sigma]
            color = _CURVE_COLORS[idx % len(_CURVE_COLORS)]
            ax.plot(pts[:, 0], pts[:, 1], color=color, label=f"$\\sigma$ = {sigma:g}")
        ax.set_xlim(0.0, np.pi)
        ax.set_ylim(0.0, np.pi)
        ax.set_xlabel(r"$\alpha_1$")
        ax.set_ylabel(r"$\alpha_2$")
        ax.set_title("Boundary angles with a shared bound state")
        ax.legend(loc="upper left", frameon=False)
        _save(fig, out_path)


def _torus_branches(pts: np.ndarray):
    # the defining relation depends on tan^2 of the half angles, so each
    # branch comes with its reflections alpha -> 2pi - alpha
    a1, a2 = pts[:, 0], pts[:, 1]
    yield a1, a2
    yield a1, (TWO_PI - a2) % TWO_PI
    yield TWO_PI - a1, a2
    yield TWO_PI - a1, (TWO_PI - a2) % TWO_PI


def render_fig2(curves: CompatCurves, out_path: str) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.2, 4.2))
        for idx, sigma in enumerate(curves.sigmas):
            pts = curves.branches[sigma]
            color = _CURVE_COLORS[idx % len(_CURVE_COLORS)]
            label = f"$\\sigma$ = {sigma:g}"
            for a1, a2 in _torus_branches(pts):
                order = np.argsort(a1)
                ax.plot(a1[order], a2[order], color=color, label=label)
                label = None  # legend once per gap
            # separable endpoints: the second channel unbinds at alpha2 = 0
            ends = pts[np.abs(pts[:, 1]) < 1e-12]
            for a1_end, _ in ends:
                for x in (a1_end, TWO_PI - a1_end):
                    for y in (0.0,):
                        ax.plot([x], [y], marker="o", color="black", markersize=4)
        ax.set_xlim(0.0, TWO_PI)
        ax.set_ylim(-0.2, TWO_PI)
        ax.set_xlabel(r"$\alpha_1$")
        ax.set_ylabel(r"$\alpha_2$")
        ax.set_title("Shared-bound-state curves on the torus")
        ax.legend(loc="upper right", frameon=False)
        _save(fig, out_path)


def _render_eigenfunction_panels(spectrum: SpectrumFile, out_path: str, title: str) -> None:
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(2, 3, figsize=(8.4, 5.0), sharex=True)
        for idx, ax in enumerate(axes.flat):
            values = spectrum.components[idx]
            x = spectrum.grid
            ax.plot(x, values[:, 0].real, color="blue", linestyle="-")
            ax.plot(x, values[:, 1].real, color="blue", linestyle="--")
            ax.plot(x, values[:, 0].imag, color="red", linestyle="-")
            ax.plot(x, values[:, 1].imag, color="red", linestyle="--")
            ax.set_title(f"$E_{{{idx + 1}}}$ = {spectrum.energies[idx]:.4f}")
            ax.axhline(0.0, color="0.8", linewidth=0.6, zorder=0)
        for ax in axes[1, :]:
            ax.set_xlabel("x")
        fig.suptitle(title)
        fig.text(
            0.01,
            0.01,
            "solid: spin up, dashed: spin down; blue: real, red: imaginary",
            fontsize=7,
        )
        _save(fig, out_path)


def render_fig4(spectrum: SpectrumFile, out_path: str) -> None:
    _render_eigenfunction_panels(
        spectrum, out_path, "Six lowest eigenfunctions (level-preserving family)"
    )


def render_fig5(spectrum: SpectrumFile, out_path: str) -> None:
    # the spin-flip family produces real eigenfunctions; verify from the
    # data rather than trusting the caption
    worst = max(float(np.max(np.abs(c.imag))) for c in spectrum.components[:6])
    if not worst < 1e-6:
        raise SchemaError(
            f"fig5 expects vanishing imaginary parts, found max |Im| = {worst:.3e}"
        )
    _render_eigenfunction_panels(
        spectrum, out_path, "Six lowest eigenfunctions (spin-flip family)"
    )


def render(figure_id: str, inputs: list[str], out_path: str) -> None:
    if figure_id == "fig1":
        render_fig1(read_compat_csv(inputs[0]), out_path)
    elif figure_id == "fig2":
        render_fig2(read_compat_csv(inputs[0]), out_path)
    elif figure_id == "fig4":
        render_fig4(read_spectrum_json(inputs[0]), out_path)
    elif figure_id == "fig5":
        render_fig5(read_spectrum_json(inputs[0]), out_path)
    else:
        raise SchemaError(f"unknown figure id {figure_id!r}; expected one of {FIGURE_IDS}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figs", description="Render figures from bext output files"
    )
    parser.add_argument("figure_id", choices=FIGURE_IDS)
    parser.add_argument(
        "--in",
        dest="inputs",
        action="append",
        required=True,
        help="input data file (repeatable; the first is used)",
    )
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        render(args.figure_id, args.inputs, args.out)
    except SchemaError as exc:
        print(f"render_figs: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
