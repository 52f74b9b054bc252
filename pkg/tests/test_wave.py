import numpy as np
import pytest

from causalgeom.wave import (SpectralMeasure, domain_of_dependence_check, evaluate_F,
                             evaluate_f, fd_wave_solve, solution_csv, wave_residual)
from causalgeom.window import GridWindow


def test_measure_validation():
    with pytest.raises(ValueError):
        SpectralMeasure([[0.5, 1.0, 0.0]], [1.0])
    with pytest.raises(ValueError):
        SpectralMeasure([[1.0, 0.0, 0.0]], [1.0, 2.0])
    assert SpectralMeasure.zero(2).s == 2


def test_zero_measure_residual():
    assert wave_residual(SpectralMeasure.zero(2), GridWindow(0.5, 0.5, 0.1, 2)) == 0.0


def test_single_mode_closed_form():
    m = SpectralMeasure([[2.0, 1.0, 0.5]], [1.0])
    x = np.array([[0.3, -0.2, 0.7]])
    mass = np.sqrt(4 - 1 - 0.25)
    F = evaluate_F(m, x, np.array([0.4]))
    expected = np.cos(0.4 * mass) * np.exp(1j * (2 * 0.3 - (1.0 * -0.2 + 0.5 * 0.7)))
    assert np.allclose(F, expected, atol=1e-14)
    assert np.allclose(evaluate_f(m, x), np.exp(1j * (2 * 0.3 - (1.0 * -0.2 + 0.5 * 0.7))))


def test_cfl_limit():
    u = np.zeros((11, 11))
    with pytest.raises(ValueError):
        fd_wave_solve(u, u, 3, cfl=0.9)


def test_leapfrog_1d_is_exact_and_causal():
    n = 41
    u0 = np.zeros(n)
    u0[20] = 1.0
    sol = fd_wave_solve(u0, np.zeros(n), 10, 1.0, 1.0)
    # a lattice delta splits into two pulses travelling one cell per step
    assert np.isclose(sol[-1][10], 0.5) and np.isclose(sol[-1][30], 0.5)
    assert np.allclose(sol[-1][11:30], 0.0)


def test_dependence_check_detects_violation():
    n = 41
    u0 = np.zeros(n)
    u0[20] = 1.0
    sol = fd_wave_solve(u0, np.zeros(n), 5, 1.0, 1.0)
    rep = domain_of_dependence_check(sol, np.zeros(1), 4.0, 1.0, 1.0, 1e-10)
    assert not rep.verdict


def test_csv():
    sol = fd_wave_solve(np.zeros(5), np.zeros(5), 2, 1.0, 0.5)
    text = solution_csv(sol, 0.5, 1.0)
    assert text.splitlines()[0].startswith("t")
