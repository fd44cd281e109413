"""Schmidt analysis of hybrid states and separability verdicts.

A hybrid state is a sampled map x -> C^n; tracing out the particle factor
gives the level-space density matrix rho[a, b] = integral of
Phi_a conj(Phi_b), whose eigenvalues are the Schmidt coefficients.  Zero
von Neumann entropy (below a small threshold) means a product state.

Separable *dynamics* is a stronger property than separable eigenfunctions:
the eigenbasis must factorize with one common set of particle profiles
across all levels.  :func:`dynamics_separability_verdict` checks both,
mirroring how one compares eigenfunctions living on different levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

# entropy below this counts as separable: two orders above quadrature noise
# at ~2000 samples, far below any physical entanglement in scope
SEPARABLE_ENTROPY_TOL = 1e-6


def _trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be one-dimensional with at least two points")
    w = np.empty_like(grid)
    h = grid[1] - grid[0]
    w[0] = w[-1] = 0.5 * h
    w[1:-1] = h
    return w


@dataclass(frozen=True)
class HybridState:
    """L2-normalized samples of a map from a uniform grid into C^n."""

    grid: np.ndarray
    values: np.ndarray  # (m, n_levels) complex
    norm: float  # trapezoid norm of the stored values (1 after normalization)

    @classmethod
    def normalized(cls, grid: np.ndarray, values: np.ndarray) -> "HybridState":
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=complex)
        if values.ndim != 2 or values.shape[0] != grid.shape[0]:
            raise ValueError("values must be (len(grid), n_levels)")
        w = _trapezoid_weights(grid)
        norm = math.sqrt(float(np.sum(w[:, None] * np.abs(values) ** 2)))
        if not norm > 0.0 or not math.isfinite(norm):
            raise ValueError("cannot normalize a zero-norm state")
        return cls(grid=grid, values=values / norm, norm=1.0)

    @property
    def n_levels(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class EntanglementReport:
    reduced_density: np.ndarray
    schmidt_coefficients: np.ndarray  # descending, sums to 1
    entropy: float  # natural log
    separable: bool


class SeparabilityKind(Enum):
    SEPARABLE = "separable"
    NON_SEPARABLE = "non-separable"


@dataclass(frozen=True)
class SeparabilityVerdict:
    kind: SeparabilityKind
    witness: tuple | None = None
    detail: str = ""

    @property
    def separable(self) -> bool:
        return self.kind is SeparabilityKind.SEPARABLE


def reduced_density(state: HybridState) -> np.ndarray:
    """Level-space density matrix by trapezoid quadrature; Hermitian, trace 1."""
    w = _trapezoid_weights(state.grid)
    rho = (state.values.T * w) @ state.values.conj()
    return 0.5 * (rho + rho.conj().T)


def _entropy_of_density(rho: np.ndarray) -> tuple[np.ndarray, float]:
    p = np.clip(np.linalg.eigvalsh(rho), 0.0, None)[::-1]
    nonzero = p[p > 0.0]
    # rounding can push an eigenvalue a hair above 1; entropy is >= 0
    entropy = max(0.0, float(-np.sum(nonzero * np.log(nonzero))))
    return p, entropy


def entanglement_entropy(state: HybridState) -> EntanglementReport:
    """Schmidt coefficients and von Neumann entropy of a normalized state."""
    rho = reduced_density(state)
    p, entropy = _entropy_of_density(rho)
    return EntanglementReport(
        reduced_density=rho,
        schmidt_coefficients=p,
        entropy=entropy,
        separable=entropy < SEPARABLE_ENTROPY_TOL,
    )


def exponential_overlap(kappa1: float, kappa2: float) -> float:
    """Overlap of normalized exponentials exp(-kappa x) on the half-line."""
    return 2.0 * math.sqrt(kappa1 * kappa2) / (kappa1 + kappa2)


def sweep_entropy_closed_form(s: float, sigma: float, c1: complex, c2: complex) -> float:
    """Entropy of the two-exponential sweep state without quadrature.

    Uses the exact overlap of the exponential profiles; same conventions
    as :func:`bext.halfline.sweep_state` (levels with decay rate below its
    normalizability cutoff drop out, so the threshold point is exactly
    separable).
    """
    kappa1 = math.tan(s)
    excess = kappa1 * kappa1 - sigma
    if excess < -1e-12 * max(1.0, sigma):
        raise ValueError("below compatibility threshold: tan(s)^2 < sigma")
    kappa2 = math.sqrt(max(excess, 0.0))
    if kappa2 <= 1e-6 or c2 == 0 or c1 == 0:
        return 0.0
    weights = np.array([abs(c1) ** 2 / (2 * kappa1), abs(c2) ** 2 / (2 * kappa2)])
    weights = weights / weights.sum()
    off = (
        complex(c1)
        * np.conj(c2)
        / (kappa1 + kappa2)
        / (abs(c1) ** 2 / (2 * kappa1) + abs(c2) ** 2 / (2 * kappa2))
    )
    rho = np.array([[weights[0], off], [np.conj(off), weights[1]]])
    _, entropy = _entropy_of_density(rho)
    return entropy


def _weighted(values: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.sqrt(w)[:, None] * values


def _best_product_vector(
    stacks: np.ndarray, rng: np.random.Generator, restarts: int = 6, iters: int = 60
) -> np.ndarray:
    """Coefficients c maximizing the top singular value of sum_j c_j G_j.

    ``stacks`` is (d, m, n) with L2-orthonormal slices; alternating
    rank-one maximization (power iteration over the coefficient simplex),
    best of several random restarts.  The result is the most nearly
    product combination in the degenerate block.
    """
    d = stacks.shape[0]
    best_c = None
    best_score = -1.0
    for _ in range(restarts):
        raw = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        c = raw / np.linalg.norm(raw)
        score = 0.0
        for _ in range(iters):
            combo = np.tensordot(c, stacks, axes=1)
            u_svd, s_svd, vh_svd = np.linalg.svd(combo)
            u = u_svd[:, 0]
            v = vh_svd[0].conj()
            t = np.array([u.conj() @ (stacks[j] @ v) for j in range(d)])
            new_score = float(np.linalg.norm(t))
            c = t.conj() / np.linalg.norm(t)
            if abs(new_score - score) < 1e-14:
                score = new_score
                break
            score = new_score
        if score > best_score:
            best_score = score
            best_c = c
    return best_c


def canonicalize_block(
    grid: np.ndarray, functions: list[np.ndarray], seed: int = 0
) -> list[np.ndarray]:
    """Rotate a degenerate eigenspace toward minimal total entropy.

    Separability of a degenerate eigenspace depends on the basis chosen
    inside it; an eigensolver returns an arbitrary one.  This greedily
    extracts the most nearly product combinations (best rank-one member,
    deflate, repeat), which recovers the factorized basis whenever one
    exists.  Deterministic for a fixed seed.
    """
    if len(functions) < 2:
        return list(functions)
    w = _trapezoid_weights(grid)
    stacks = np.stack([_weighted(f, w) for f in functions])
    rng = np.random.default_rng(seed)
    out: list[np.ndarray] = []
    remaining = stacks
    while remaining.shape[0] > 1:
        c = _best_product_vector(remaining, rng)
        # unitary completion: first column c, the rest spans the complement
        q, _ = np.linalg.qr(
            np.column_stack([c, rng.standard_normal((c.size, c.size - 1))])
        )
        phase = c.conj() @ q[:, 0]
        q[:, 0] = q[:, 0] * np.conj(phase) / abs(phase)
        # new basis member i is sum_j q[j, i] * G_j; orthonormality follows
        # from q being unitary and the G_j orthonormal
        rotated = np.tensordot(q.T, remaining, axes=1)
        out.append(rotated[0])
        remaining = rotated[1:]
    out.append(remaining[0])
    inv_sqrt_w = 1.0 / np.sqrt(w)[:, None]
    result = []
    for g in out:
        f = g * inv_sqrt_w
        peak = f.flat[np.argmax(np.abs(f))]
        result.append(f / (peak / abs(peak)))
    return result


def _dominant_profile(values: np.ndarray, w: np.ndarray) -> tuple[int, np.ndarray]:
    weights = np.sum(w[:, None] * np.abs(values) ** 2, axis=0)
    level = int(np.argmax(weights))
    profile = values[:, level]
    norm = math.sqrt(float(np.sum(w * np.abs(profile) ** 2)))
    return level, profile / norm


def dynamics_separability_verdict(
    result, tol: float = SEPARABLE_ENTROPY_TOL
) -> SeparabilityVerdict:
    """Check whether a computed eigenbasis factorizes as profiles x levels.

    A separable verdict requires every eigenfunction to be a product state
    (entropy below tol) *and* the particle profiles to be shared across
    levels.  Profiles are paired by their inferred particle-factor energy:
    a product eigenfunction at total energy E living on level a has
    particle energy E - lambda_a, and a factorized eigenbasis must show the
    same profile on level b at total energy E - lambda_a + lambda_b.  For
    every function whose partner energy falls inside the computed spectrum
    the partner must exist and the profile must lie in the span of the
    partner profiles up to 1 - tol; partner energies beyond the computed
    range are unverifiable edge effects and are skipped.  Degenerate
    blocks are canonicalized first, since separability inside a degenerate
    eigenspace is basis-dependent.

    ``result`` is a :class:`bext.rotor.SpectralResult`; its
    ``bulk_eigenvalues`` field supplies the level offsets lambda_a.
    """
    functions = list(result.functions)
    if not functions:
        raise ValueError("insufficient eigenfunctions: none provided")
    grid = result.grid
    n_levels = functions[0].values.shape[1]
    if len(functions) < 2 * n_levels:
        raise ValueError(
            f"insufficient eigenfunctions: need at least {2 * n_levels}, got {len(functions)}"
        )
    if result.bulk_eigenvalues is None or len(result.bulk_eigenvalues) != n_levels:
        raise ValueError("result must carry one bulk eigenvalue per level")
    lam = [float(x) for x in result.bulk_eigenvalues]
    w = _trapezoid_weights(grid)

    # canonicalize degenerate blocks (grouped by energy)
    values_list: list[np.ndarray] = []
    energies: list[float] = []
    i = 0
    while i < len(functions):
        j = i + 1
        while (
            j < len(functions)
            and abs(functions[j].energy - functions[i].energy)
            <= 1e-6 * max(1.0, abs(functions[i].energy))
        ):
            j += 1
        block = [f.values for f in functions[i:j]]
        if len(block) > 1:
            block = canonicalize_block(grid, block)
        values_list.extend(block)
        energies.extend(f.energy for f in functions[i:j])
        i = j

    entropies = []
    for vals in values_list:
        state = HybridState.normalized(grid, vals)
        entropies.append(entanglement_entropy(state).entropy)
    worst = int(np.argmax(entropies))
    if entropies[worst] >= tol:
        return SeparabilityVerdict(
            kind=SeparabilityKind.NON_SEPARABLE,
            witness=("entangled-eigenfunction", worst),
            detail=(
                f"eigenfunction {worst} (E = {energies[worst]:.6g}) has "
                f"entropy {entropies[worst]:.3e} >= {tol:.1e}"
            ),
        )

    # every eigenfunction is a product: extract (level, profile) per function
    records = []
    for idx, (vals, energy) in enumerate(zip(values_list, energies)):
        level, profile = _dominant_profile(vals, w)
        records.append((idx, energy, level, profile))
    for a in range(n_levels):
        if not any(rec[2] == a for rec in records):
            raise ValueError(f"insufficient eigenfunctions: level {a} is unrepresented")

    e_low = min(energies)
    e_high = max(energies)
    verified_pairs = 0
    for idx, energy, level, profile in records:
        for other in range(n_levels):
            if other == level:
                continue
            partner_energy = energy - lam[level] + lam[other]
            e_tol = 1e-6 * (1.0 + abs(partner_energy))
            if partner_energy < e_low - e_tol or partner_energy > e_high + e_tol:
                continue  # beyond the computed spectrum: unverifiable edge
            candidates = [
                rec
                for rec in records
                if rec[2] == other and abs(rec[1] - partner_energy) <= e_tol
            ]
            if not candidates:
                return SeparabilityVerdict(
                    kind=SeparabilityKind.NON_SEPARABLE,
                    witness=("missing-partner", idx),
                    detail=(
                        f"eigenfunction {idx} (E = {energy:.6g}, level {level}) "
                        f"has no level-{other} partner at E = {partner_energy:.6g}"
                    ),
                )
            # project onto the span of the candidate profiles so degenerate
            # particle levels compare as subspaces, not vector by vector
            basis = []
            for _, _, _, q in candidates:
                v = q.copy()
                for b in basis:
                    v = v - np.sum(w * b.conj() * v) * b
                norm = math.sqrt(float(np.sum(w * np.abs(v) ** 2)))
                if norm > 1e-12:
                    basis.append(v / norm)
            overlap = math.sqrt(
                min(
                    1.0,
                    sum(abs(np.sum(w * b.conj() * profile)) ** 2 for b in basis),
                )
            )
            if overlap <= 1.0 - tol:
                return SeparabilityVerdict(
                    kind=SeparabilityKind.NON_SEPARABLE,
                    witness=("profile-mismatch", idx, candidates[0][0]),
                    detail=(
                        f"profiles of eigenfunctions {idx} (level {level}) and "
                        f"{candidates[0][0]} (level {other}) overlap only {overlap:.6f}"
                    ),
                )
            verified_pairs += 1
    if verified_pairs == 0:
        raise ValueError(
            "insufficient eigenfunctions: no cross-level partner falls inside "
            "the computed spectrum"
        )
    return SeparabilityVerdict(kind=SeparabilityKind.SEPARABLE)
