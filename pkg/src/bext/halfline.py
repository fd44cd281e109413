"""Closed-form spectral theory of the half-line x n-level hybrid.

With a diagonal boundary unitary the levels decouple, and channel ``a``
(bulk eigenvalue lambda_a, boundary angle alpha_a) carries a single bound
state exactly when tan(alpha_a/2) > 0:

    Phi_a(x) = C_a exp(-kappa_a x),  kappa_a = tan(alpha_a/2),
    E = lambda_a - tan(alpha_a/2)^2.

All formulas use half angles; the sweep parameter is s = alpha/2.  Two
channels share one energy exactly on the compatibility curve

    tan(alpha_1/2)^2 - tan(alpha_2/2)^2 = lambda_1 - lambda_2 = sigma > 0,

which is what makes entangled two-level bound states possible.

Sign bridge: under the outward-normal Cayley map of :mod:`bext.boundary`,
the attractive boundary with decay rate tan(alpha/2) corresponds to the
scalar unitary exp(-i*alpha) (Robin matrix +tan(alpha/2)), see
:func:`halfline_boundary_unitary`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import BoundaryUnitary
from .entangle import HybridState

# decay rates below this are treated as non-normalizable (decay length 1e6)
KAPPA_MIN = 1e-6
# keep tan(alpha/2) <= ~12.5 so the roundtrip error 2 t (1 + t^2) eps of the
# emitted angles stays below 1e-12, the tolerance of the channel-energy
# degeneracy along the curve (the defining residual needs only 1e-10)
S_UPPER_MARGIN = 0.08


@dataclass(frozen=True)
class BoundStateSolution:
    """A normalized bound state of the decoupled half-line problem.

    ``bulk_eigenvalues`` records the level offsets the energy refers to;
    the sweep uses the convention (sigma, 0).  Amplitudes are normalized so
    that sum_a |C_a|^2 / (2 kappa_a) = 1.
    """

    energy: float
    decay_rates: tuple[float, ...]
    amplitudes: tuple[complex, ...]
    populated_levels: tuple[int, ...]
    bulk_eigenvalues: tuple[float, ...]


@dataclass(frozen=True)
class CompatCurve:
    """Sampled branch of the two-channel compatibility curve for one gap."""

    sigma: float
    points: np.ndarray  # shape (n, 2), columns (alpha1, alpha2)


def bound_state_energy(lambda_a: float, alpha: float) -> float | None:
    """Bound-state energy of one channel, or None if no bound state exists.

    alpha = pi is the Dirichlet condition; alpha with tan(alpha/2) <= 0
    (Neumann included) has no normalizable bound state.
    """
    if math.isclose(alpha, math.pi, rel_tol=0.0, abs_tol=1e-15):
        return None
    t = math.tan(0.5 * alpha)
    if t <= 0.0:
        return None
    return lambda_a - t * t


def halfline_boundary_unitary(alphas) -> BoundaryUnitary:
    """Diagonal boundary unitary realizing the given channel angles.

    Under the outward-normal Cayley convention the channel with angle
    alpha and a bound state of decay rate tan(alpha/2) requires the Robin
    coefficient +tan(alpha/2), i.e. the scalar unitary exp(-i*alpha).
    """
    phases = np.exp(-1j * np.asarray(alphas, dtype=float))
    return BoundaryUnitary(np.diag(phases))


def compatibility_curve(sigma: float, n_samples: int) -> CompatCurve:
    """Sample one fundamental branch of the compatibility curve.

    The half angle s = alpha1/2 runs from arctan(sqrt(sigma)) (where
    alpha2 = 0) toward pi/2; the upper end is capped by S_UPPER_MARGIN to
    keep the residual of the defining relation below 1e-10.  Renderers
    replicate the branch periodically over the torus.
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    if n_samples < 2:
        raise ValueError("need at least two samples")
    s_lo = math.atan(math.sqrt(sigma))
    s_hi = 0.5 * math.pi - S_UPPER_MARGIN
    s = np.linspace(s_lo, s_hi, n_samples)
    t1_sq = np.tan(s) ** 2
    alpha1 = 2.0 * s
    alpha2 = 2.0 * np.arctan(np.sqrt(np.maximum(t1_sq - sigma, 0.0)))
    return CompatCurve(sigma=float(sigma), points=np.column_stack([alpha1, alpha2]))


def sweep_state(s: float, sigma: float, c1: complex, c2: complex) -> BoundStateSolution:
    """Two-level bound state at sweep parameter s on the gap-sigma curve.

    Decay rates are kappa_1 = tan(s) and kappa_2 = sqrt(tan(s)^2 - sigma);
    level offsets follow the (sigma, 0) convention so the energy is
    sigma - tan(s)^2.  At the threshold tan(s)^2 = sigma the second
    profile is non-normalizable and c2 is forced to zero.  The amplitude
    ratio within the degenerate eigenspace is caller-supplied.
    """
    if not (0.0 < s < 0.5 * math.pi):
        raise ValueError("sweep parameter must lie in (0, pi/2)")
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    if c1 == 0 and c2 == 0:
        raise ValueError("amplitudes must not both vanish")
    kappa1 = math.tan(s)
    excess = kappa1 * kappa1 - sigma
    if excess < -1e-12 * max(1.0, sigma):
        raise ValueError("below compatibility threshold: tan(s)^2 < sigma")
    kappa2 = math.sqrt(max(excess, 0.0))

    lambdas = (float(sigma), 0.0)
    rates = (kappa1, kappa2)
    raw = [complex(c1), complex(c2)]
    if kappa2 <= KAPPA_MIN:
        raw[1] = 0.0
    populated = tuple(a for a in (0, 1) if raw[a] != 0 and rates[a] > KAPPA_MIN)
    if not populated:
        raise ValueError("no normalizable component is populated")
    norm_sq = sum(abs(raw[a]) ** 2 / (2.0 * rates[a]) for a in populated)
    scale = 1.0 / math.sqrt(norm_sq)
    amps = tuple(raw[a] * scale if a in populated else 0.0 for a in (0, 1))
    return BoundStateSolution(
        energy=sigma - kappa1 * kappa1,
        decay_rates=rates,
        amplitudes=amps,
        populated_levels=populated,
        bulk_eigenvalues=lambdas,
    )


def multilevel_angles(big_lambdas, alpha_1: float) -> list[float]:
    """Chain of boundary angles giving all N levels one common energy.

    ``big_lambdas`` lists the composite bulk spectrum in descending order;
    the first angle fixes tan(alpha_l/2)^2 = tan(alpha_1/2)^2 -
    (Lambda_1 - Lambda_l) for every further level.  Raises if some level
    would need a negative tan^2, naming the first violated level.
    """
    lambdas = [float(x) for x in big_lambdas]
    if any(a < b for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError("level energies must be listed in descending order")
    t1_sq = math.tan(0.5 * alpha_1) ** 2
    angles = [float(alpha_1)]
    for l, lam in enumerate(lambdas[1:], start=1):
        t_sq = t1_sq - (lambdas[0] - lam)
        if t_sq < -1e-12 * max(1.0, abs(lambdas[0])):
            raise ValueError(
                f"alpha_1 infeasible: level {l} would need tan^2 = {t_sq:.6g} < 0"
            )
        angles.append(2.0 * math.atan(math.sqrt(max(t_sq, 0.0))))
    return angles


def sample_bound_state(
    solution: BoundStateSolution, length: float = 40.0, n_points: int = 2001
) -> HybridState:
    """Sample a bound state on a uniform grid as a normalized hybrid state."""
    x = np.linspace(0.0, length, n_points)
    values = np.zeros((n_points, len(solution.amplitudes)), dtype=complex)
    for a, (c, kappa) in enumerate(zip(solution.amplitudes, solution.decay_rates)):
        if c != 0:
            values[:, a] = c * np.exp(-kappa * x)
    return HybridState.normalized(x, values)
