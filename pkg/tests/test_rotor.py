import math

import numpy as np
import pytest

from bext import (
    MatchingProblem,
    antidiag_spectral_function,
    antidiag_spectral_roots,
    assemble_eigenfunctions,
    find_eigenvalues,
    matching_matrix,
    rotor_boundary_unitary,
    solve_spectrum,
    spectral_indicator,
)

from conftest import trapezoid_ip

PERIODIC = rotor_boundary_unitary(0.0, "diag", 0.0)


def _eval_analytic(coeffs, energy, mu, x):
    """Independent evaluation of the matching ansatz (exp/trig formulas)."""
    out = np.zeros((len(x), 2), dtype=complex)
    for level, shift in ((0, mu), (1, -mu)):
        k2 = energy - shift
        a, b = coeffs[2 * level], coeffs[2 * level + 1]
        if k2 > 0:
            k = math.sqrt(k2)
            out[:, level] = a * np.cos(k * x) + b * np.sin(k * x) / k
        elif k2 < 0:
            k = math.sqrt(-k2)
            out[:, level] = a * np.cosh(k * x) + b * np.sinh(k * x) / k
        else:
            out[:, level] = a + b * x
    return out


def test_matching_matrix_periodic_full_nullity():
    # E = 4 pi^2 carries two periodic plane waves per spin channel
    problem = MatchingProblem(mu=0.0, boundary=PERIODIC)
    m = matching_matrix(4 * np.pi**2, problem)
    svals = np.linalg.svd(m, compute_uv=False)
    assert svals[0] < 1e-10


def test_matching_matrix_quasiperiodic_roots():
    problem = MatchingProblem(mu=0.0, boundary=rotor_boundary_unitary(0.9, "diag", 0.0))
    for n in (0, 1, -1):
        energy = (2 * np.pi * n - 0.9) ** 2
        assert spectral_indicator(energy, problem) < 1e-10


def test_indicator_positive_off_spectrum():
    problem = MatchingProblem(mu=0.0, boundary=PERIODIC)
    assert spectral_indicator(7.7, problem) > 1e-3


def test_indicator_decoupled_channel_example():
    problem = MatchingProblem(
        mu=10.0, boundary=rotor_boundary_unitary(np.pi / 2, "diag", 0.0)
    )
    assert spectral_indicator(np.pi**2 / 4 + 10.0, problem) < 1e-8


def test_find_periodic_spectrum_with_multiplicities():
    problem = MatchingProblem(mu=0.0, boundary=PERIODIC)
    result = find_eigenvalues(problem, -1.0, 50.0, 10)
    assert result.eigenvalues == pytest.approx([0.0, 4 * np.pi**2], abs=1e-8)
    assert result.multiplicities == (2, 4)


def test_find_decoupled_threshold_modes():
    # with mu = 10 and periodic conditions the kappa = 0 modes sit exactly
    # at the channel thresholds E = -+10
    problem = MatchingProblem(mu=10.0, boundary=PERIODIC)
    result = find_eigenvalues(problem, -11.0, 20.0, 10)
    assert result.eigenvalues == pytest.approx([-10.0, 10.0], abs=1e-8)
    assert result.multiplicities == (1, 1)


def test_empty_window_is_not_an_error():
    problem = MatchingProblem(mu=0.0, boundary=PERIODIC)
    result = find_eigenvalues(problem, 1.0, 30.0, 5)
    assert result.eigenvalues == ()


def test_assemble_constant_modes():
    problem = MatchingProblem(mu=0.0, boundary=PERIODIC)
    functions = assemble_eigenfunctions(0.0, problem, m=201)
    assert len(functions) == 2
    for fn in functions:
        spread = np.max(np.abs(fn.values - fn.values[0]))
        assert spread < 1e-9


def test_assemble_rejects_non_eigenvalue():
    problem = MatchingProblem(mu=0.0, boundary=PERIODIC)
    with pytest.raises(ValueError, match="not an eigenvalue"):
        assemble_eigenfunctions(7.7, problem, m=51)


def test_diag_family_single_spin_support():
    problem = MatchingProblem(
        mu=10.0, boundary=rotor_boundary_unitary(np.pi / 2, "diag", np.pi / 2)
    )
    result = solve_spectrum(problem, -11.0, 60.0, 4, m=401)
    assert len(result.functions) >= 4
    for fn in result.functions:
        weights = np.sum(np.abs(fn.values) ** 2, axis=0)
        assert min(weights) < 1e-20 * max(weights)


def test_antidiag_family_real_two_component_eigenfunctions():
    problem = MatchingProblem(
        mu=10.0, boundary=rotor_boundary_unitary(np.pi / 2, "antidiag", np.pi / 2)
    )
    result = solve_spectrum(problem, -11.0, 30.0, 3, m=401)
    assert len(result.functions) >= 3
    for fn in result.functions:
        weights = np.sum(np.abs(fn.values) ** 2, axis=0)
        assert min(weights) > 1e-3 * max(weights)  # both spins populated
        assert np.max(np.abs(fn.values.imag)) < 1e-8  # real after phase fix


def test_eigenfunction_boundary_residual():
    problem = MatchingProblem(
        mu=10.0, boundary=rotor_boundary_unitary(np.pi / 2, "antidiag", 0.7)
    )
    result = solve_spectrum(problem, -11.0, 70.0, 6, m=101)
    u = problem.boundary.entries
    for fn in result.functions:
        x01 = np.array([0.0, 1.0])
        vals = _eval_analytic(fn.coefficients, fn.energy, problem.mu, x01)
        h = 1e-7
        vals_p = _eval_analytic(fn.coefficients, fn.energy, problem.mu, x01 + h)
        vals_m = _eval_analytic(fn.coefficients, fn.energy, problem.mu, x01 - h)
        deriv = (vals_p - vals_m) / (2 * h)
        phi = np.array([vals[0, 0], vals[1, 0], vals[0, 1], vals[1, 1]])
        phidot = np.array([-deriv[0, 0], deriv[1, 0], -deriv[0, 1], deriv[1, 1]])
        residual = (phi - 1j * phidot) - u @ (phi + 1j * phidot)
        assert np.max(np.abs(residual)) < 1e-6  # dominated by the FD step


def test_eigenfunction_boundary_residual_exact_derivatives():
    # same check with closed-form derivatives, at the 1e-8 level
    problem = MatchingProblem(
        mu=10.0, boundary=rotor_boundary_unitary(np.pi / 2, "antidiag", np.pi / 2)
    )
    result = solve_spectrum(problem, -11.0, 70.0, 6, m=11)
    u = problem.boundary.entries
    for fn in result.functions:
        phi = np.zeros(4, dtype=complex)
        phidot = np.zeros(4, dtype=complex)
        for level, shift in ((0, problem.mu), (1, -problem.mu)):
            k2 = fn.energy - shift
            a, b = fn.coefficients[2 * level], fn.coefficients[2 * level + 1]
            kc = np.sqrt(complex(k2))
            c1 = np.cos(kc)
            s1 = np.sin(kc) / kc if kc != 0 else 1.0
            phi[2 * level] = a
            phi[2 * level + 1] = a * c1 + b * s1
            phidot[2 * level] = -b
            phidot[2 * level + 1] = a * (-k2 * s1) + b * c1
        residual = (phi - 1j * phidot) - u @ (phi + 1j * phidot)
        assert np.max(np.abs(residual)) < 1e-8


def test_eigenfunction_interior_ode_residual():
    # five-point finite differences on the analytic form, independent of the
    # coefficient basis used by the solver
    problem = MatchingProblem(
        mu=10.0, boundary=rotor_boundary_unitary(np.pi / 2, "antidiag", np.pi / 2)
    )
    result = solve_spectrum(problem, -11.0, 70.0, 6, m=11)
    h = 1e-3
    xs = np.linspace(0.1, 0.9, 9)
    stencil = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * h * h)
    for fn in result.functions:
        samples = [
            _eval_analytic(fn.coefficients, fn.energy, problem.mu, xs + j * h)
            for j in (-2, -1, 0, 1, 2)
        ]
        second = sum(c * s for c, s in zip(stencil, samples))
        center = samples[2]
        hb = np.array([problem.mu, -problem.mu])
        residual = -second + hb[None, :] * center - fn.energy * center
        assert np.max(np.abs(residual)) < 1e-6


def test_root_reality_guard():
    # located roots are true zeros: tiny at the root, clearly nonzero nearby
    problem = MatchingProblem(
        mu=10.0, boundary=rotor_boundary_unitary(np.pi / 2, "antidiag", np.pi / 2)
    )
    result = find_eigenvalues(problem, -11.0, 70.0, 6)
    for e in result.eigenvalues:
        assert spectral_indicator(e, problem) < 1e-8
        assert spectral_indicator(e + 0.01, problem) > 1e-4
        assert spectral_indicator(e - 0.01, problem) > 1e-4


def test_sigma_beta_mu_zero_reduction():
    # at mu = 0 the closed form reduces to E (cos 2 sqrt(E) - cos 2 delta);
    # smallest positive root for delta = pi/2 is pi^2/4
    delta = np.pi / 2
    for energy in (0.5, 2.0, 7.0, 31.0):
        expected = energy * (math.cos(2 * math.sqrt(energy)) - math.cos(2 * delta))
        assert antidiag_spectral_function(energy, 0.0, delta) == pytest.approx(
            expected, rel=1e-12, abs=1e-12
        )
    # cos(2 sqrt(E)) + 1 vanishes to second order at pi^2/4: a tangential
    # zero, located via the parabola-vertex polish
    roots = antidiag_spectral_roots(0.0, delta, 0.5, 30.0)
    assert roots[0] == pytest.approx(np.pi**2 / 4, abs=1e-8)


def test_sigma_beta_cross_oracle_mu_zero():
    mu, delta = 0.0, np.pi / 2
    problem = MatchingProblem(mu=mu, boundary=rotor_boundary_unitary(delta, "antidiag", 0.3))
    found = find_eigenvalues(problem, 0.5, 60.0, 20)
    closed = antidiag_spectral_roots(mu, delta, 0.5, 60.0)
    assert len(found.eigenvalues) == len(closed)
    for a, b in zip(found.eigenvalues, closed):
        assert abs(a - b) < 1e-8


def test_sigma_beta_angle_independence_of_roots():
    mu, delta = 10.0, np.pi / 2
    lists = []
    for beta in (0.0, np.pi / 4, np.pi / 2, np.pi):
        problem = MatchingProblem(
            mu=mu, boundary=rotor_boundary_unitary(delta, "antidiag", beta)
        )
        lists.append(find_eigenvalues(problem, -11.0, 40.0, 10).eigenvalues)
    for other in lists[1:]:
        assert len(other) == len(lists[0])
        for a, b in zip(lists[0], other):
            assert abs(a - b) < 1e-8


def test_eigenfunctions_depend_on_antidiag_angle():
    mu, delta = 10.0, np.pi / 2
    results = {}
    for beta in (0.0, np.pi / 2):
        problem = MatchingProblem(
            mu=mu, boundary=rotor_boundary_unitary(delta, "antidiag", beta)
        )
        results[beta] = solve_spectrum(problem, -11.0, 30.0, 3, m=401)
    grid = results[0.0].grid
    distances = []
    for f0, f1 in zip(results[0.0].functions, results[np.pi / 2].functions):
        overlap = abs(trapezoid_ip(grid, f0.values, f1.values))
        distances.append(math.sqrt(max(0.0, 2.0 - 2.0 * overlap)))
    assert max(distances) > 1e-2


def test_matching_problem_validation():
    with pytest.raises(ValueError, match="nonnegative"):
        MatchingProblem(mu=-1.0, boundary=PERIODIC)
    with pytest.raises(ValueError, match="4x4"):
        MatchingProblem(mu=1.0, boundary=rotor_boundary_unitary(0.0, "diag", 0.0).__class__(np.eye(2)))
