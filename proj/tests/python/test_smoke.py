import numpy as np
import pytest

import shortcut_forge as sf


def test_exact_cd_on_landau_zener():
    lam, delta, rate = 0.7, 1.0, 2.0
    h = lam * sf.pauli("Z") + delta * sf.pauli("X")
    cd = sf.exact_cd(h, rate * sf.pauli("Z"))
    expect = -rate * delta / (2 * (lam**2 + delta**2)) * sf.pauli("Y")
    assert np.allclose(cd, expect, atol=1e-12)


def test_solvers_agree_at_full_order():
    h = sf.random_hermitian(4, 3)
    dh = sf.random_hermitian(4, 4)
    exact = sf.exact_cd(h, dh)
    assert np.linalg.norm(sf.variational_cd(h, dh) - exact) < 1e-7
    assert np.linalg.norm(sf.krylov_cd(h, dh) - exact) < 1e-7


def test_krylov_coefficients_of_landau_zener():
    b = sf.krylov_coefficients(0.5 * sf.pauli("Z") + 1.5 * sf.pauli("X"), sf.pauli("Z"))
    assert b[1] == pytest.approx(3.0, abs=1e-12)
    assert b[2] == pytest.approx(1.0, abs=1e-12)


def test_trotter_baseline_is_first_order():
    _, slope = sf.trotter_baseline(sf.random_hermitian(3, 1), sf.random_hermitian(3, 2), 1.0, [8, 16, 32, 64])
    assert -1.3 < slope < -0.7


def test_degenerate_levels_raise():
    with pytest.raises(sf.NumericalError):
        sf.exact_cd(np.eye(2, dtype=complex), sf.pauli("X"))


def test_run_scenario():
    summary, tables = sf.run_scenario(
        {
            "system": "landau_zener",
            "method": "exact_cd",
            "hbar": 1.0,
            "parameters": {"delta": 1.0},
            "schedule": {"kind": "linear", "from": -5.0, "to": 5.0, "duration": 1.0},
            "grid": {"points": 21},
        }
    )
    assert summary["final_fidelity"] > 1 - 1e-6
    columns, rows = tables["timeseries.csv"]
    assert columns[0] == "time"
    assert len(rows) == 21


def test_unknown_key_is_rejected():
    with pytest.raises(RuntimeError, match="unknown key"):
        sf.run_scenario({"system": "landau_zener", "method": "exact_cd", "hbar": 1.0, "bogus": 1})
