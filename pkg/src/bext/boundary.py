"""Unitary parameterization of self-adjoint boundary conditions.

A particle on a one-dimensional domain (half-line or unit interval)
tensored with an n-level system admits a family of self-adjoint
Hamiltonians H = -d^2/dx^2 (x) I + I (x) H_B, one for every unitary matrix
U on the boundary data space.  The domain of the extension consists of the
wavefunctions whose boundary traces satisfy

    phi - i*phidot = U (phi + i*phidot),

where phi collects boundary values and phidot the *outward* normal
derivatives, phidot = (-Phi'(0), +Phi'(L)) per level.

Index convention (spin-major): the level index is outermost, the boundary
point innermost.  For the interval with two levels the boundary vector is
(Phi_up(0), Phi_up(1), Phi_down(0), Phi_down(1)), and a product condition
with point factor ``u_a`` and level factor ``u_b`` is stored as
``kron(u_b, u_a)``.

Away from the eigenvalue -1 of U the condition is equivalent to the Robin
form phidot = A phi with the Hermitian matrix A = -i (I + U)^{-1} (I - U);
eigenvalue -1 directions are Dirichlet constraints (phi = 0).  In the
scalar case U = exp(i*alpha) the Robin coefficient is -tan(alpha/2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg

UNITARITY_TOL = 1e-12
# |eigenvalue + 1| below this counts as a Dirichlet direction: far below any
# physically chosen phase separation, well above double-precision noise.
DIRICHLET_EIGENVALUE_TOL = 1e-10
# singular values above this fraction of the largest count toward the
# operator Schmidt rank
OPERATOR_SCHMIDT_TOL = 1e-10


class BoundaryOrdering(Enum):
    SPIN_MAJOR = "spin-major"


class Geometry(Enum):
    HALF_LINE = "half-line"
    INTERVAL = "interval"

    @property
    def n_boundary_points(self) -> int:
        return 1 if self is Geometry.HALF_LINE else 2


@dataclass(frozen=True)
class BoundaryUnitary:
    """A unitary matrix on boundary data, checked at construction."""

    entries: np.ndarray
    ordering: BoundaryOrdering = BoundaryOrdering.SPIN_MAJOR

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("boundary unitary must be a square matrix")
        defect = np.max(np.abs(entries.conj().T @ entries - np.eye(entries.shape[0])))
        if not defect < UNITARITY_TOL:
            raise ValueError(f"matrix is not unitary: max|U^H U - I| = {defect:.3e}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class ExtensionSpec:
    """Full problem definition: geometry + level structure + boundary unitary.

    ``bulk_eigenvalues`` lists the diagonalized level Hamiltonian in
    descending order (lambda_1 > lambda_2 > ...).
    """

    geometry: Geometry
    n_levels: int
    bulk_eigenvalues: tuple[float, ...]
    boundary: BoundaryUnitary

    def __post_init__(self) -> None:
        if self.n_levels < 1:
            raise ValueError("n_levels must be positive")
        lam = tuple(float(x) for x in self.bulk_eigenvalues)
        if len(lam) != self.n_levels:
            raise ValueError("need one bulk eigenvalue per level")
        if any(a < b for a, b in zip(lam, lam[1:])):
            raise ValueError("bulk eigenvalues must be listed in descending order")
        expected = self.geometry.n_boundary_points * self.n_levels
        if self.boundary.dim != expected:
            raise ValueError(
                f"boundary dimension {self.boundary.dim} != "
                f"{self.geometry.n_boundary_points} boundary points x {self.n_levels} levels"
            )
        object.__setattr__(self, "bulk_eigenvalues", lam)


@dataclass(frozen=True)
class RobinData:
    """Partial Cayley transform of a boundary unitary.

    ``dirichlet_projector`` projects onto the eigenspace of U with
    eigenvalue -1 (boundary values vanish there); ``robin_matrix`` is the
    Hermitian matrix A with phidot = A phi on the orthogonal complement
    (and zero on the Dirichlet subspace).  ``dirichlet_basis`` holds an
    orthonormal basis of the Dirichlet subspace, convenient for constraint
    elimination.
    """

    dirichlet_projector: np.ndarray
    robin_matrix: np.ndarray
    dirichlet_basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.robin_matrix.shape[0]

    @property
    def n_dirichlet(self) -> int:
        return self.dirichlet_basis.shape[1]


@dataclass(frozen=True)
class DeficiencyIndices:
    n_plus: int
    n_minus: int


class TensorKind(Enum):
    PRODUCT_WITH_IDENTITY = "product-with-identity"
    PRODUCT = "product"
    NON_PRODUCT = "non-product"


@dataclass(frozen=True)
class TensorStructure:
    """Result of the tensor-product classification of a boundary unitary.

    For the product kinds, ``point_factor`` and ``level_factor`` satisfy
    U = kron(level_factor, point_factor) in spin-major layout; any global
    phase is folded into the point factor, and ``phase`` records the phase
    stripped off the level factor.
    """

    kind: TensorKind
    phase: float | None = None
    point_factor: np.ndarray | None = None
    level_factor: np.ndarray | None = None


def quasi_periodic_unitary(delta: float) -> BoundaryUnitary:
    """Boundary unitary of the quasi-periodic interval conditions.

    Encodes Phi(0) = exp(i*delta) Phi(1), Phi'(0) = exp(i*delta) Phi'(1)
    for a single level.
    """
    return BoundaryUnitary(
        np.array([[0.0, np.exp(1j * delta)], [np.exp(-1j * delta), 0.0]])
    )


def tensor_boundary(u_a: BoundaryUnitary, u_b: np.ndarray) -> BoundaryUnitary:
    """Product boundary condition with point factor u_a and level factor u_b.

    Stored in spin-major layout, i.e. entries = kron(u_b, u_a).  For the
    interval with the quasi-periodic point factor and a diagonal level
    factor diag(e^{i a1}, e^{i a2}) the four nonzero entries carry
    phases e^{i(a_k +- delta)}, one quasi-periodic condition per level.
    """
    u_b = np.asarray(u_b, dtype=complex)
    return BoundaryUnitary(np.kron(u_b, u_a.entries), ordering=u_a.ordering)


def cayley_to_robin(u: BoundaryUnitary) -> RobinData:
    """Split a boundary unitary into Dirichlet constraints and a Robin matrix.

    Eigenvalues within ``DIRICHLET_EIGENVALUE_TOL`` of -1 span the
    Dirichlet subspace; on the complement A = -i (I + U)^{-1} (I - U),
    evaluated spectrally so the result is Hermitian by construction.
    """
    t, q = scipy.linalg.schur(u.entries, output="complex")
    eigs = np.diag(t)
    is_dirichlet = np.abs(eigs + 1.0) < DIRICHLET_EIGENVALUE_TOL
    q_dir = q[:, is_dirichlet]
    q_rob = q[:, ~is_dirichlet]
    # -i (1 - e^{i a}) / (1 + e^{i a}) = -tan(a/2), real for |eig| = 1
    coeff = (-1j * (1.0 - eigs[~is_dirichlet]) / (1.0 + eigs[~is_dirichlet])).real
    robin = (q_rob * coeff) @ q_rob.conj().T
    projector = q_dir @ q_dir.conj().T
    return RobinData(
        dirichlet_projector=projector,
        robin_matrix=robin,
        dirichlet_basis=q_dir,
    )


def _reshuffle(entries: np.ndarray, n_points: int, n_levels: int) -> np.ndarray:
    """Rearrange U[(s p), (s' p')] into R[(s s'), (p p')]."""
    m = entries.reshape(n_levels, n_points, n_levels, n_points)
    return m.transpose(0, 2, 1, 3).reshape(n_levels * n_levels, n_points * n_points)


def classify_tensor_structure(
    u: BoundaryUnitary, n_points: int, n_levels: int
) -> TensorStructure:
    """Detect whether U factorizes across the point/level split.

    The operator Schmidt rank of U across the factorization decides the
    outcome: rank one with a level factor proportional to the identity is
    PRODUCT_WITH_IDENTITY, rank one otherwise PRODUCT, rank two or more
    NON_PRODUCT.  Global phases are assigned to the point factor, so
    exp(i nu) (U_A x I) classifies as PRODUCT_WITH_IDENTITY.
    """
    if u.dim != n_points * n_levels:
        raise ValueError(
            f"dimension mismatch: {u.dim} != {n_points} points x {n_levels} levels"
        )
    r = _reshuffle(u.entries, n_points, n_levels)
    svals = np.linalg.svd(r, compute_uv=False)
    rank = int(np.sum(svals > OPERATOR_SCHMIDT_TOL * svals[0]))
    if rank >= 2:
        return TensorStructure(kind=TensorKind.NON_PRODUCT)

    # rank one: R = vec(level) outer vec(point), so the factors are the top
    # singular pair with no conjugation
    u_svd, s, vh = np.linalg.svd(r)
    level_raw = u_svd[:, 0].reshape(n_levels, n_levels)
    point_raw = vh[0, :].reshape(n_points, n_points)
    level_mat = level_raw * np.sqrt(n_levels)  # unitary up to a phase
    point_mat = point_raw * s[0] / np.sqrt(n_levels)
    # fix the level factor's arbitrary phase deterministically: rotate its
    # largest entry to the positive real axis and push the phase into the
    # point factor
    idx = np.unravel_index(np.argmax(np.abs(level_mat)), level_mat.shape)
    level_phase = level_mat[idx] / abs(level_mat[idx])
    level_mat = level_mat / level_phase
    point_mat = point_mat * level_phase

    off_diag = level_mat - np.diag(np.diag(level_mat))
    diag = np.diag(level_mat)
    if np.max(np.abs(off_diag)) < 1e-9 and np.max(np.abs(diag - diag[0])) < 1e-9:
        # level factor is a phase times the identity; fold it into U_A
        phase = float(np.angle(diag[0]))
        return TensorStructure(
            kind=TensorKind.PRODUCT_WITH_IDENTITY,
            phase=phase,
            point_factor=point_mat * diag[0],
            level_factor=np.eye(n_levels, dtype=complex),
        )
    return TensorStructure(
        kind=TensorKind.PRODUCT,
        point_factor=point_mat,
        level_factor=level_mat,
    )


def predict_separable_dynamics(spec: ExtensionSpec) -> bool:
    """True iff the boundary unitary is a phase times (point factor x identity).

    Those are exactly the extensions generating separable dynamics; any
    genuine level factor couples the particle to the levels through the
    boundary even though the bulk Hamiltonian is a sum.
    """
    structure = classify_tensor_structure(
        spec.boundary, spec.geometry.n_boundary_points, spec.n_levels
    )
    return structure.kind is TensorKind.PRODUCT_WITH_IDENTITY


def deficiency_indices(spec: ExtensionSpec) -> DeficiencyIndices:
    """Deficiency indices of the symmetric hybrid operator.

    The particle factor contributes one dimension per boundary point; the
    level factor multiplies by n_levels.
    """
    n = spec.geometry.n_boundary_points * spec.n_levels
    return DeficiencyIndices(n_plus=n, n_minus=n)
