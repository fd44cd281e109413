"""Bracketing helpers for scanning spectral functions along the energy axis."""

from __future__ import annotations

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_minimize(f, a: float, b: float, xtol: float = 1e-12) -> float:
    """Argmin of a unimodal function on [a, b] to bracket width xtol."""
    c = b - (b - a) * INV_PHI
    d = a + (b - a) * INV_PHI
    fc = f(c)
    fd = f(d)
    # fixed iteration count: the bracket shrinks by INV_PHI each step
    n_iter = max(0, math.ceil(math.log(max(xtol, 1e-300) / max(b - a, xtol)) / math.log(INV_PHI)))
    for _ in range(n_iter):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * INV_PHI
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * INV_PHI
            fd = f(d)
        if b - a <= xtol:
            break
    return 0.5 * (a + b)


def local_minima_indices(values) -> list[int]:
    """Interior local minima of a sampled curve; plateaus report once."""
    out: list[int] = []
    n = len(values)
    for i in range(1, n - 1):
        if values[i] <= values[i - 1] and values[i] <= values[i + 1]:
            if out and out[-1] == i - 1 and values[i] == values[i - 1]:
                continue
            out.append(i)
    return out
