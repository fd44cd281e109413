"""Spectra and boundary-driven entanglement of 1D hybrid quantum systems.

A hybrid system couples a particle on a half-line or on the unit interval
to a finite-level system.  Self-adjoint realizations of the free
Hamiltonian are labelled by unitary matrices acting on boundary data;
this package computes their spectra and eigenfunctions and quantifies the
entanglement those boundary conditions generate.
"""

__version__ = "0.1.0"

from .boundary import (
    BoundaryOrdering,
    BoundaryUnitary,
    DeficiencyIndices,
    ExtensionSpec,
    Geometry,
    RobinData,
    TensorKind,
    TensorStructure,
    cayley_to_robin,
    classify_tensor_structure,
    deficiency_indices,
    predict_separable_dynamics,
    quasi_periodic_unitary,
    tensor_boundary,
)
from .entangle import (
    EntanglementReport,
    HybridState,
    SeparabilityVerdict,
    dynamics_separability_verdict,
    entanglement_entropy,
    exponential_overlap,
    reduced_density,
    sweep_entropy_closed_form,
)
from .fem import (
    ConvergenceStudy,
    FemEigenpairs,
    FemProblem,
    assemble,
    calibrate_error_constant,
    convergence_study,
    error_model_bound,
    solve_lowest,
)
from .halfline import (
    BoundStateSolution,
    CompatCurve,
    bound_state_energy,
    compatibility_curve,
    halfline_boundary_unitary,
    multilevel_angles,
    sample_bound_state,
    sweep_state,
)
from .rotor import (
    EigenFunction,
    MatchingProblem,
    SpectralResult,
    antidiag_spectral_function,
    antidiag_spectral_roots,
    assemble_eigenfunctions,
    find_eigenvalues,
    matching_matrix,
    rotor_boundary_unitary,
    solve_spectrum,
    spectral_indicator,
)
