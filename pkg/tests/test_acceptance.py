"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with `pytest tests/test_acceptance.py -v -s`.  Every tolerance is
pinned here; the helpers compute fresh values on every run (nothing is
cached between criteria except the error-model constant, which is defined
to be calibrated once).
"""

import math

import numpy as np
import pytest

from bext import (
    BoundaryUnitary,
    ExtensionSpec,
    FemProblem,
    Geometry,
    HybridState,
    MatchingProblem,
    antidiag_spectral_roots,
    bound_state_energy,
    calibrate_error_constant,
    cayley_to_robin,
    compatibility_curve,
    dynamics_separability_verdict,
    entanglement_entropy,
    error_model_bound,
    find_eigenvalues,
    halfline_boundary_unitary,
    predict_separable_dynamics,
    quasi_periodic_unitary,
    rotor_boundary_unitary,
    sample_bound_state,
    solve_lowest,
    solve_spectrum,
    sweep_entropy_closed_form,
    sweep_state,
    tensor_boundary,
)
from bext.entangle import SeparabilityKind

from conftest import haar_unitary, trapezoid_ip

SQRT_HALF = 2.0**-0.5
HALF_PI = math.pi / 2


def _report(number: int, ok: bool, detail: str) -> None:
    print(f"criterion {number:02d} {'PASS' if ok else 'FAIL'} - {detail}")


_ERROR_CONSTANT = calibrate_error_constant()


def _flatten(result):
    return [
        e for e, m in zip(result.eigenvalues, result.multiplicities) for _ in range(m)
    ]


def test_criterion_1_halfline_bound_state_oracle():
    """20 random channels: analytic energy vs truncated-domain FEM, 1e-6."""
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(20):
        lam = rng.uniform(-5.0, 10.0)
        t = rng.uniform(0.3, 3.0)
        alpha = 2.0 * math.atan(t)
        expected = bound_state_energy(lam, alpha)
        problem = FemProblem(
            n_elements=1600,
            n_levels=1,
            domain_length=40.0,
            bulk_eigenvalues=(lam,),
            robin=cayley_to_robin(halfline_boundary_unitary([alpha])),
            element_order=2,
        )
        computed = solve_lowest(problem, 1).eigenvalues[0]
        worst = max(worst, abs(computed - expected))
    ok = worst < 1e-6
    _report(1, ok, f"worst |dE| = {worst:.3e} over 20 random (lambda, alpha)")
    assert ok


def test_criterion_2_compatibility_degeneracy():
    """50 curve points per gap: both channel energies coincide to 1e-12."""
    worst = 0.0
    for sigma in (1.0, 5.0, 10.0):
        curve = compatibility_curve(sigma, 50)
        e1 = sigma - np.tan(curve.points[:, 0] / 2.0) ** 2
        e2 = -np.tan(curve.points[:, 1] / 2.0) ** 2
        worst = max(worst, float(np.max(np.abs(e1 - e2))))
    ok = worst < 1e-12
    _report(2, ok, f"worst channel-energy gap = {worst:.3e} over 150 points")
    assert ok


def test_criterion_3_rotor_cross_oracle():
    """Matching vs FEM for the spin-flip configuration, O(h^2) model + ratios."""
    mu, delta, beta = 10.0, HALF_PI, HALF_PI
    boundary = rotor_boundary_unitary(delta, "antidiag", beta)
    robin = cayley_to_robin(boundary)
    reference = _flatten(find_eigenvalues(MatchingProblem(mu, boundary), -11.0, 70.0, 6))[:6]
    gaps = {}
    within = True
    for n in (400, 800):
        problem = FemProblem(
            n_elements=n,
            n_levels=2,
            domain_length=1.0,
            bulk_eigenvalues=(mu, -mu),
            robin=robin,
        )
        vals = solve_lowest(problem, 6).eigenvalues
        gaps[n] = np.abs(vals - np.array(reference))
        for gap, ref in zip(gaps[n], reference):
            within = within and gap < error_model_bound(_ERROR_CONSTANT, 1.0 / n, ref)
    ratios = gaps[400] / gaps[800]
    ratios_ok = bool(np.all((ratios > 3.5) & (ratios < 4.5)))
    ok = within and ratios_ok
    _report(
        3,
        ok,
        f"model bound held: {within}; refinement ratios "
        f"{np.array2string(ratios, precision=3)} in [3.5, 4.5]: {ratios_ok}",
    )
    assert ok


def test_criterion_4_closed_form_root_agreement():
    """Spin-flip closed form vs matching indicator to 1e-8 on two configs."""
    worst = 0.0
    counts = []
    for mu, delta in ((10.0, HALF_PI), (3.0, 1.0)):
        window = (-mu - 1.0, 100.0)
        problem = MatchingProblem(mu, rotor_boundary_unitary(delta, "antidiag", 0.9))
        from_indicator = [
            e
            for e in find_eigenvalues(problem, *window, 200).eigenvalues
            if min(abs(e - mu), abs(e + mu)) > 1e-6
        ]
        from_closed_form = [
            e
            for e in antidiag_spectral_roots(mu, delta, *window)
            if min(abs(e - mu), abs(e + mu)) > 1e-6
        ]
        counts.append((len(from_indicator), len(from_closed_form)))
        if len(from_indicator) != len(from_closed_form):
            worst = math.inf
            continue
        worst = max(
            worst,
            max(abs(a - b) for a, b in zip(from_indicator, from_closed_form)),
        )
    ok = worst < 1e-8
    _report(4, ok, f"root counts {counts}, worst location gap = {worst:.3e}")
    assert ok


def test_criterion_5_spin_flip_angle_independence():
    """Roots identical across the spin-flip angle; eigenfunctions are not."""
    mu, delta = 10.0, HALF_PI
    angles = (0.0, math.pi / 4, HALF_PI, math.pi)
    spectra = {}
    functions = {}
    for beta in angles:
        problem = MatchingProblem(mu, rotor_boundary_unitary(delta, "antidiag", beta))
        result = solve_spectrum(problem, -11.0, 70.0, 6, m=801)
        spectra[beta] = result.eigenvalues
        functions[beta] = result
    roots_ok = all(
        len(spectra[b]) == len(spectra[0.0])
        and max(abs(x - y) for x, y in zip(spectra[b], spectra[0.0])) < 1e-8
        for b in angles[1:]
    )
    grid = functions[0.0].grid
    distances = [
        math.sqrt(max(0.0, 2.0 - 2.0 * abs(trapezoid_ip(grid, f0.values, f1.values))))
        for f0, f1 in zip(functions[0.0].functions, functions[HALF_PI].functions)
    ]
    functions_ok = max(distances) > 1e-2
    ok = roots_ok and functions_ok
    _report(
        5,
        ok,
        f"root lists identical to 1e-8: {roots_ok}; max L2 distance "
        f"beta=0 vs pi/2: {max(distances):.3f}",
    )
    assert ok


def test_criterion_6_product_vs_entangled_eigenfunction_dichotomy():
    """Diagonal family: product eigenfunctions, non-separable dynamics.
    Spin-flip family: entangled and real eigenfunctions."""
    mu, delta = 10.0, HALF_PI
    diag = solve_spectrum(
        MatchingProblem(mu, rotor_boundary_unitary(delta, "diag", HALF_PI)),
        -11.0,
        110.0,
        6,
        m=2001,
    )
    diag_functions = diag.functions[:6]
    diag_entropies = [
        entanglement_entropy(HybridState.normalized(diag.grid, fn.values)).entropy
        for fn in diag_functions
    ]
    diag_product = max(diag_entropies) < 1e-6
    diag_verdict = dynamics_separability_verdict(diag)
    diag_witnessed = (
        diag_verdict.kind is SeparabilityKind.NON_SEPARABLE
        and diag_verdict.witness[0] == "profile-mismatch"
    )

    anti = solve_spectrum(
        MatchingProblem(mu, rotor_boundary_unitary(delta, "antidiag", HALF_PI)),
        -11.0,
        70.0,
        6,
        m=2001,
    )
    anti_functions = anti.functions[:6]
    anti_entropies = [
        entanglement_entropy(HybridState.normalized(anti.grid, fn.values)).entropy
        for fn in anti_functions
    ]
    anti_entangled = max(anti_entropies) > 0.1
    anti_imag = max(np.max(np.abs(fn.values.imag)) for fn in anti_functions)
    anti_real = anti_imag < 1e-8
    ok = diag_product and diag_witnessed and anti_entangled and anti_real
    _report(
        6,
        ok,
        f"diag: max entropy {max(diag_entropies):.2e}, witness "
        f"{diag_verdict.witness and diag_verdict.witness[0]}; antidiag: max entropy "
        f"{max(anti_entropies):.3f}, max |Im| {anti_imag:.2e}",
    )
    assert ok


def test_criterion_7_tensor_structure_concordance():
    """Random boundary unitaries: verdicts match the tensor-structure rule."""
    rng = np.random.default_rng(707)
    mu = 3.0
    failures = []
    for index in range(10):
        u_point = haar_unitary(2, rng)
        phase = np.exp(2j * math.pi * rng.random())
        cases = [
            ("identity-factor", BoundaryUnitary(phase * np.kron(np.eye(2), u_point)), True),
            ("genuine-factor", BoundaryUnitary(np.kron(haar_unitary(2, rng), haar_unitary(2, rng))), False),
            ("non-product", BoundaryUnitary(haar_unitary(4, rng)), False),
        ]
        for tag, boundary, expect_separable in cases:
            spec = ExtensionSpec(Geometry.INTERVAL, 2, (mu, -mu), boundary)
            predicted = predict_separable_dynamics(spec)
            result = solve_spectrum(
                MatchingProblem(mu, boundary), -mu - 1.5, 175.0, 8, m=601
            )
            verdict = dynamics_separability_verdict(result)
            if predicted != expect_separable or verdict.separable != expect_separable:
                failures.append((index, tag, predicted, verdict.separable))
    ok = not failures
    _report(7, ok, f"30 random unitaries, failures: {failures if failures else 'none'}")
    assert ok


def test_criterion_8_sweep_entanglement_generation():
    """Entropy along the gap-1 curve: zero at threshold, growth above it,
    quadrature and closed form agreeing to 1e-8."""
    sigma = 1.0
    s_threshold = math.atan(math.sqrt(sigma))
    s_above = math.atan(math.sqrt(4.0 * sigma))

    closed_threshold = sweep_entropy_closed_form(s_threshold, sigma, SQRT_HALF, SQRT_HALF)
    state_threshold = sample_bound_state(
        sweep_state(s_threshold, sigma, SQRT_HALF, SQRT_HALF), length=40.0, n_points=2001
    )
    quad_threshold = entanglement_entropy(state_threshold).entropy

    closed_above = sweep_entropy_closed_form(s_above, sigma, SQRT_HALF, SQRT_HALF)
    state_above = sample_bound_state(
        sweep_state(s_above, sigma, SQRT_HALF, SQRT_HALF), length=20.0, n_points=400001
    )
    quad_above = entanglement_entropy(state_above).entropy

    threshold_ok = quad_threshold < 1e-10 and closed_threshold < 1e-10
    agreement = abs(quad_above - closed_above)
    agreement_ok = agreement < 1e-8
    growth_ok = quad_above > 0.05 and closed_above > 0.05
    ok = threshold_ok and agreement_ok and growth_ok
    _report(
        8,
        ok,
        f"entropy at threshold {quad_threshold:.2e}; at tan^2 s = 4 sigma "
        f"{quad_above:.6f} (required > 0.05); quadrature-vs-closed-form gap "
        f"{agreement:.2e}",
    )
    assert ok


def test_criterion_9_known_spectra():
    """Periodic and quasi-periodic spectra from both solvers."""
    # matching: periodic
    periodic = rotor_boundary_unitary(0.0, "diag", 0.0)
    result = find_eigenvalues(MatchingProblem(0.0, periodic), -1.0, 170.0, 3)
    expected = [(0.0, 2), (4 * math.pi**2, 4), (16 * math.pi**2, 4)]
    matching_ok = len(result.eigenvalues) == 3 and all(
        abs(e - ref) < 1e-8 and m == mult
        for (e, m), (ref, mult) in zip(
            zip(result.eigenvalues, result.multiplicities), expected
        )
    )
    # FEM: periodic, within the error model
    fem_pairs = solve_lowest(
        FemProblem(
            n_elements=400,
            n_levels=2,
            domain_length=1.0,
            bulk_eigenvalues=(0.0, 0.0),
            robin=cayley_to_robin(periodic),
        ),
        10,
    )
    flat_reference = [0.0, 0.0] + [4 * math.pi**2] * 4 + [16 * math.pi**2] * 4
    fem_ok = all(
        abs(e - ref) < error_model_bound(_ERROR_CONSTANT, 1.0 / 400, ref)
        for e, ref in zip(fem_pairs.eigenvalues, flat_reference)
    )
    # quasi-periodic for two twist angles, both solvers
    quasi_ok = True
    for delta in (math.pi / 4, HALF_PI):
        boundary = tensor_boundary(quasi_periodic_unitary(delta), np.eye(2))
        exact = sorted((2 * math.pi * n - delta) ** 2 for n in range(-2, 3))[:3]
        found = find_eigenvalues(MatchingProblem(0.0, boundary), -1.0, 70.0, 3)
        quasi_ok = quasi_ok and all(
            abs(e - ref) < 1e-8 and m == 2
            for e, m, ref in zip(found.eigenvalues, found.multiplicities, exact)
        )
        fem_vals = solve_lowest(
            FemProblem(
                n_elements=400,
                n_levels=2,
                domain_length=1.0,
                bulk_eigenvalues=(0.0, 0.0),
                robin=cayley_to_robin(boundary),
            ),
            6,
        ).eigenvalues
        flat = [ref for ref in exact for _ in range(2)]
        quasi_ok = quasi_ok and all(
            abs(e - ref) < error_model_bound(_ERROR_CONSTANT, 1.0 / 400, ref)
            for e, ref in zip(fem_vals, flat)
        )
    ok = matching_ok and fem_ok and quasi_ok
    _report(
        9,
        ok,
        f"periodic matching: {matching_ok}, periodic FEM: {fem_ok}, "
        f"quasi-periodic both solvers: {quasi_ok}",
    )
    assert ok
