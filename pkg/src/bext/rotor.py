"""Plane-wave matching solver for the interval x spin-1/2 hybrid.

The Hamiltonian is -d^2/dx^2 (x) I + I (x) mu*sigma_z on [0, 1] with an
arbitrary U(4) boundary condition.  The general solution at energy E is,
per spin component with k^2 = E -+ mu,

    Phi(x) = A cos(k x) + B sin(k x)/k,

a basis chosen because both members are entire functions of E: the
matching matrix below is analytic across the channel thresholds E = +-mu,
where the basis degenerates smoothly to {1, x}.  (An exponential ansatz
would force punctures at the thresholds and lose eigenvalues sitting
exactly there, e.g. the constant modes of the decoupled problem.)

Imposing phi - i*phidot = U (phi + i*phidot) on the coefficient vector
(A, B, C, D) yields a 4x4 matrix M(E) whose nontrivial nullspace marks the
eigenvalues; the spectral indicator is its smallest singular value.

The spin-flip (anti-diagonal level factor) family additionally admits the
closed-form spectral function :func:`antidiag_spectral_function`, whose
zeros are independent of the anti-diagonal angle even though the
eigenfunctions are not.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .boundary import BoundaryUnitary, quasi_periodic_unitary, tensor_boundary
from .search import golden_section_minimize, local_minima_indices

# singular values below this fraction of the matrix scale count as null
NULLITY_RTOL = 1e-7
DEFAULT_SCAN_STEP = 0.01
DEFAULT_REFINE_XTOL = 1e-12


@dataclass(frozen=True)
class MatchingProblem:
    """Interval x spin-1/2 problem: coupling mu and a U(4) boundary unitary."""

    mu: float
    boundary: BoundaryUnitary

    def __post_init__(self) -> None:
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")
        if self.boundary.dim != 4:
            raise ValueError("rotor boundary unitary must be 4x4")

    @property
    def bulk_eigenvalues(self) -> tuple[float, float]:
        return (self.mu, -self.mu)


@dataclass(frozen=True)
class EigenFunction:
    """Sampled eigenfunction with its exact coefficient vector.

    ``values`` has one row per grid point and one column per spin level,
    L2-normalized by the trapezoid rule, global phase fixed by rotating the
    largest-magnitude sample onto the positive real axis.  ``coefficients``
    is (A, B, C, D) in the (cos, sin/k) basis after the same operations.
    """

    energy: float
    values: np.ndarray
    coefficients: np.ndarray


@dataclass(frozen=True)
class SpectralResult:
    eigenvalues: tuple[float, ...]
    multiplicities: tuple[int, ...]
    grid: np.ndarray | None = None
    functions: tuple[EigenFunction, ...] = ()
    bulk_eigenvalues: tuple[float, ...] | None = None


def rotor_boundary_unitary(delta: float, family: str, angle: float) -> BoundaryUnitary:
    """Quasi-periodic point factor tensored with a spin factor.

    ``family`` selects the spin factor: "diag" gives
    diag(e^{i angle}, e^{-i angle}) (levels decouple), "antidiag" gives
    the spin-flip matrix with phases e^{+-i angle}.
    """
    if family == "diag":
        u_b = np.diag([np.exp(1j * angle), np.exp(-1j * angle)])
    elif family == "antidiag":
        u_b = np.array([[0.0, np.exp(1j * angle)], [np.exp(-1j * angle), 0.0]])
    else:
        raise ValueError(f"unknown family {family!r}; expected 'diag' or 'antidiag'")
    return tensor_boundary(quasi_periodic_unitary(delta), u_b)


def _cos_sinc(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """cos(sqrt(z)) and sin(sqrt(z))/sqrt(z); both are entire in z."""
    k = np.sqrt(np.asarray(z, dtype=complex))
    c = np.cos(k)
    zero = k == 0
    kk = np.where(zero, 1.0, k)
    s = np.where(zero, 1.0, np.sin(kk) / kk)
    return c, s


def _transfer_pair(energies: np.ndarray, mu: float) -> tuple[np.ndarray, np.ndarray]:
    """Maps (A,B,C,D) -> phi + i*phidot and phi - i*phidot, batched over E.

    Boundary components are ordered spin-major (up@0, up@1, down@0,
    down@1) with outward derivatives phidot = (-Phi'(0), +Phi'(1)).
    """
    e = np.atleast_1d(np.asarray(energies, dtype=float))
    n = e.shape[0]
    t_plus = np.zeros((n, 4, 4), dtype=complex)
    t_minus = np.zeros((n, 4, 4), dtype=complex)
    for level, shift in enumerate((mu, -mu)):
        k2 = e - shift
        c, s = _cos_sinc(k2)
        j = 2 * level
        for t, sign in ((t_plus, 1.0), (t_minus, -1.0)):
            # x = 0: phi = A, phidot = -B
            t[:, j, j] = 1.0
            t[:, j, j + 1] = -sign * 1j
            # x = 1: phi = A c + B s, phidot = +(A (-k2 s) + B c)
            t[:, j + 1, j] = c + sign * 1j * (-k2 * s)
            t[:, j + 1, j + 1] = s + sign * 1j * c
    return t_plus, t_minus


def matching_matrix(energy: float, problem: MatchingProblem) -> np.ndarray:
    """M(E) = T_minus(E) - U T_plus(E); nullspace vectors are eigenfunctions."""
    t_plus, t_minus = _transfer_pair(np.array([energy]), problem.mu)
    return t_minus[0] - problem.boundary.entries @ t_plus[0]


def _matrix_scale(energy: float, problem: MatchingProblem) -> float:
    t_plus, t_minus = _transfer_pair(np.array([energy]), problem.mu)
    return float(np.linalg.norm(t_minus[0]) + np.linalg.norm(t_plus[0]))


def _null_threshold(svals: np.ndarray, scale: float) -> float:
    # the 1e-3 floor keeps full-nullity roots (M -> 0 entirely) countable
    return NULLITY_RTOL * max(float(svals[0]), 1e-3 * scale)


def spectral_indicator(energy: float, problem: MatchingProblem) -> float:
    """Smallest singular value of M(E); zero exactly at eigenvalues."""
    svals = np.linalg.svd(matching_matrix(energy, problem), compute_uv=False)
    return float(svals[-1])


def _indicator_grid(
    problem: MatchingProblem, energies: np.ndarray, threads: int = 1
) -> np.ndarray:
    def chunk_values(chunk: np.ndarray) -> np.ndarray:
        t_plus, t_minus = _transfer_pair(chunk, problem.mu)
        m = t_minus - problem.boundary.entries[None, :, :] @ t_plus
        return np.linalg.svd(m, compute_uv=False)[:, -1]

    if threads <= 1 or energies.size < 2 * threads:
        return chunk_values(energies)
    pieces = np.array_split(energies, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(chunk_values, pieces))
    return np.concatenate(parts)


def find_eigenvalues(
    problem: MatchingProblem,
    e_min: float,
    e_max: float,
    k_max: int,
    step: float = DEFAULT_SCAN_STEP,
    xtol: float = DEFAULT_REFINE_XTOL,
    threads: int = 1,
) -> SpectralResult:
    """Scan [e_min, e_max], bracket indicator minima, refine to roots.

    Grid scan at the given step, local-minimum bracketing, golden-section
    refinement; a refined minimum is accepted as an eigenvalue when the
    indicator falls below NULLITY_RTOL times the matrix scale, and its
    multiplicity is the nullity of M there.  Returns up to ``k_max`` roots
    ascending; an empty window is not an error.
    """
    if not e_min < e_max:
        raise ValueError("need e_min < e_max")
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    n = int(np.ceil((e_max - e_min) / step)) + 1
    grid = np.linspace(e_min, e_max, n)
    vals = _indicator_grid(problem, grid, threads=threads)

    roots: list[tuple[float, int]] = []
    for i in local_minima_indices(vals):
        e_star = golden_section_minimize(
            lambda e: spectral_indicator(e, problem), grid[i - 1], grid[i + 1], xtol
        )
        svals = np.linalg.svd(matching_matrix(e_star, problem), compute_uv=False)
        thr = _null_threshold(svals, _matrix_scale(e_star, problem))
        nullity = int(np.sum(svals < thr))
        if nullity == 0:
            continue
        if roots and abs(e_star - roots[-1][0]) < max(step * 0.5, 1e-9):
            continue
        roots.append((float(e_star), nullity))
    roots = roots[:k_max]
    return SpectralResult(
        eigenvalues=tuple(r[0] for r in roots),
        multiplicities=tuple(r[1] for r in roots),
    )


def _sample_coefficients(
    coeffs: np.ndarray, energy: float, mu: float, grid: np.ndarray
) -> np.ndarray:
    values = np.zeros((grid.shape[0], 2), dtype=complex)
    for level, shift in enumerate((mu, -mu)):
        k2 = energy - shift
        c_x, s_x = _cos_sinc(k2 * grid**2)
        values[:, level] = coeffs[2 * level] * c_x + coeffs[2 * level + 1] * grid * s_x
    return values


def _trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    w = np.empty_like(grid)
    w[0] = w[-1] = 0.5 * (grid[1] - grid[0])
    w[1:-1] = grid[1] - grid[0]
    return w


def assemble_eigenfunctions(
    energy: float, problem: MatchingProblem, m: int = 1001
) -> list[EigenFunction]:
    """All eigenfunctions at an eigenvalue, sampled on a uniform m-point grid.

    The nullspace of M(E) is taken from its SVD; for degenerate levels the
    basis is L2-orthonormalized (trapezoid rule).  Raises if E is not an
    eigenvalue to tolerance.
    """
    matrix = matching_matrix(energy, problem)
    _, svals, vh = np.linalg.svd(matrix)
    thr = _null_threshold(svals, _matrix_scale(energy, problem))
    nullity = int(np.sum(svals < thr))
    if nullity == 0:
        raise ValueError(
            f"E = {energy!r} is not an eigenvalue to tolerance "
            f"(indicator {svals[-1]:.3e}, threshold {thr:.3e})"
        )
    grid = np.linspace(0.0, 1.0, m)
    w = _trapezoid_weights(grid)

    out: list[EigenFunction] = []
    kept_values: list[np.ndarray] = []
    for row in range(4 - nullity, 4):
        coeffs = vh[row].conj()
        values = _sample_coefficients(coeffs, energy, problem.mu, grid)
        # L2 Gram-Schmidt against previously kept members of the eigenspace
        for prev_vals, prev_fn in zip(kept_values, out):
            overlap = np.sum(w[:, None] * prev_vals.conj() * values)
            values = values - overlap * prev_vals
            coeffs = coeffs - overlap * prev_fn.coefficients
        norm = np.sqrt(np.sum(w[:, None] * np.abs(values) ** 2).real)
        values = values / norm
        coeffs = coeffs / norm
        peak = values.flat[np.argmax(np.abs(values))]
        phase = peak / abs(peak)
        values = values / phase
        coeffs = coeffs / phase
        kept_values.append(values)
        out.append(EigenFunction(energy=float(energy), values=values, coefficients=coeffs))
    return out


def solve_spectrum(
    problem: MatchingProblem,
    e_min: float,
    e_max: float,
    k_max: int,
    m: int = 1001,
    step: float = DEFAULT_SCAN_STEP,
    threads: int = 1,
) -> SpectralResult:
    """find_eigenvalues plus assembled eigenfunctions for every root."""
    found = find_eigenvalues(problem, e_min, e_max, k_max, step=step, threads=threads)
    grid = np.linspace(0.0, 1.0, m)
    functions: list[EigenFunction] = []
    for energy in found.eigenvalues:
        functions.extend(assemble_eigenfunctions(energy, problem, m))
    return SpectralResult(
        eigenvalues=found.eigenvalues,
        multiplicities=found.multiplicities,
        grid=grid,
        functions=tuple(functions),
        bulk_eigenvalues=problem.bulk_eigenvalues,
    )


def antidiag_spectral_function(energy: float, mu: float, delta: float) -> float:
    """Closed-form spectral function of the spin-flip boundary family.

    Evaluated with principal complex square roots; the expression is real
    for E > mu, purely imaginary on (-mu, mu) and real again below -mu, so
    the numerically meaningful real number is whichever part dominates.
    Zeros coincide with the eigenvalues for every anti-diagonal angle; the
    expression also vanishes identically at the thresholds E = +-mu, which
    are spurious unless the indicator confirms an eigenvalue there.
    """
    root_minus = np.sqrt(complex(energy - mu))
    root_plus = np.sqrt(complex(energy + mu))
    # build E^2 - mu^2 in real arithmetic first: complex multiplication of
    # (E + 0j)^2 manufactures a signed zero that would put the principal
    # square root on the wrong side of the branch cut for E < 0
    z = (
        np.sqrt(complex(energy * energy - mu * mu)) * np.cos(root_minus) * np.cos(root_plus)
        - energy * np.sin(root_minus) * np.sin(root_plus)
        - root_minus * root_plus * np.cos(2.0 * delta)
    )
    return float(z.real) if abs(z.real) >= abs(z.imag) else float(z.imag)


def antidiag_spectral_roots(
    mu: float,
    delta: float,
    e_min: float,
    e_max: float,
    step: float = DEFAULT_SCAN_STEP,
) -> list[float]:
    """Zeros of the closed-form spectral function on [e_min, e_max].

    The window is split at the thresholds +-mu (punctured by 1e-6), where
    the expression vanishes identically regardless of the spectrum; within
    each piece, sign changes are bisected and even-order minima refined.
    """
    eps = 1e-6
    cuts = sorted({e_min, e_max} | {t for t in (-mu, mu) if e_min < t < e_max})
    segments = []
    for lo, hi in zip(cuts, cuts[1:]):
        lo_adj = lo + eps if lo in (-mu, mu) else lo
        hi_adj = hi - eps if hi in (-mu, mu) else hi
        if lo_adj < hi_adj:
            segments.append((lo_adj, hi_adj))

    roots: list[float] = []
    for lo, hi in segments:
        n = int(np.ceil((hi - lo) / step)) + 1
        grid = np.linspace(lo, hi, n)
        vals = np.array([antidiag_spectral_function(e, mu, delta) for e in grid])
        scale = float(np.max(np.abs(vals)))
        if scale == 0.0:
            continue
        for i in range(n - 1):
            if vals[i] == 0.0:
                roots.append(float(grid[i]))
            elif vals[i] * vals[i + 1] < 0.0:
                roots.append(
                    float(
                        scipy.optimize.brentq(
                            antidiag_spectral_function,
                            grid[i],
                            grid[i + 1],
                            args=(mu, delta),
                            xtol=1e-13,
                            rtol=8.9e-16,
                        )
                    )
                )
        # even-order roots: local minima of |f| that dip to the noise floor;
        # golden section alone locates a tangential zero only to ~sqrt(eps),
        # so polish with the vertex of a parabola through nearby samples
        for i in local_minima_indices(np.abs(vals)):
            if vals[i] * vals[i - 1] < 0.0 or vals[i] * vals[i + 1] < 0.0:
                continue  # covered by a sign change
            e_star = golden_section_minimize(
                lambda e: abs(antidiag_spectral_function(e, mu, delta)),
                grid[i - 1],
                grid[i + 1],
                1e-10,
            )
            dh = 1e-5
            for _ in range(2):
                f_m = antidiag_spectral_function(e_star - dh, mu, delta)
                f_0 = antidiag_spectral_function(e_star, mu, delta)
                f_p = antidiag_spectral_function(e_star + dh, mu, delta)
                curve = f_p - 2.0 * f_0 + f_m
                if curve == 0.0:
                    break
                e_star -= 0.5 * dh * (f_p - f_m) / curve
            if abs(antidiag_spectral_function(e_star, mu, delta)) < 1e-9 * scale:
                roots.append(float(e_star))
    roots.sort()
    merged: list[float] = []
    for r in roots:
        if merged and abs(r - merged[-1]) < 1e-9 * max(1.0, abs(r)):
            continue
        merged.append(r)
    return merged
